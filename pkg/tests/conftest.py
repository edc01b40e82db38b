"""Pytest configuration and fixtures for LATE sensitivity tests."""

import pytest
import tempfile
import shutil
from collections import defaultdict
from pathlib import Path
from typing import Dict, Tuple
import numpy as np

from src.late_sensitivity.data.fixtures import (
    BUILTIN_FORGE_CONFIG,
    builtin_binary_base,
    builtin_continuous_base,
    builtin_twin_pair,
)
from src.late_sensitivity.models import (
    BinaryTheta,
    DiscreteDist,
    ForgeConfig,
    SampleData,
    Theta,
)
from src.late_sensitivity.models.theta import CELL_KEYS, TYPE_KEYS


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    temp_path = Path(tempfile.mkdtemp())
    yield temp_path
    shutil.rmtree(temp_path)


@pytest.fixture
def continuous_base():
    """No-defier DGP with beta = -0.01 that the continuous forge accepts."""
    return builtin_continuous_base()


@pytest.fixture
def twin_pair():
    """The built-in continuous base and its forged twin."""
    return builtin_twin_pair()


@pytest.fixture
def forge_config():
    """Forge settings under which the built-in base is accepted."""
    return ForgeConfig(
        eps1=BUILTIN_FORGE_CONFIG.eps1,
        eps2=BUILTIN_FORGE_CONFIG.eps2,
        M=BUILTIN_FORGE_CONFIG.M,
        eta=BUILTIN_FORGE_CONFIG.eta,
    )


@pytest.fixture
def binary_base():
    """Binary no-defier DGP with beta = -0.01."""
    return builtin_binary_base()


@pytest.fixture
def small_sample():
    """Eight rows with a clear first stage and a continuous outcome."""
    return SampleData.from_rows(
        [
            (1.5, 1, 1),
            (0.5, 1, 1),
            (2.0, 1, 1),
            (0.0, 0, 1),
            (0.25, 0, 0),
            (1.0, 1, 0),
            (-0.5, 0, 0),
            (0.75, 0, 0),
        ]
    )


@pytest.fixture
def sample_csv(temp_dir):
    """CSV file with a header and five rows."""
    path = temp_dir / "sample.csv"
    path.write_text("y,d,z\n1.0,1,1\n0.5,1,1\n0.0,0,1\n0.2,0,0\n0.7,1,0\n")
    return path


def random_dist(rng: np.random.Generator, max_atoms: int = 4, bound: float = 1.0) -> DiscreteDist:
    """Finite law with 1..max_atoms atoms inside [-bound, bound]."""
    count = int(rng.integers(1, max_atoms + 1))
    locations = rng.uniform(-bound, bound, size=count)
    masses = rng.dirichlet(np.ones(count))
    return DiscreteDist.from_atoms(zip(locations, masses))


def random_theta(
    rng: np.random.Generator, defiers: bool = True, max_atoms: int = 4
) -> Theta:
    """Random DGP with bound M = 1; compliers and (optionally) defiers present."""
    shares = rng.dirichlet(np.ones(4))
    a, b, c = float(shares[0]), float(shares[1]), float(shares[2])
    if not defiers:
        a, c = a + c, 0.0
    laws = {
        f"{prefix}{d1}{d0}": random_dist(rng, max_atoms)
        for prefix in ("f", "g")
        for d1, d0 in TYPE_KEYS
    }
    return Theta(a=a, b=b, c=c, pz=float(rng.uniform(0.2, 0.8)), M=1.0, **laws)


def random_well_separated_theta(rng: np.random.Generator) -> Tuple[Theta, ForgeConfig]:
    """
    Random no-defier DGP accepted by the continuous forge, with its settings.

    Always-takers put their Y(1) mass on {0.2, 0.5, 0.9} and never-takers their
    Y(0) mass on {-0.9, -0.5, -0.2}, so the overlap margin exceeds 0.4 > eps2.
    """
    k2 = float(rng.uniform(0.2, 0.4))
    k1 = k2 + float(rng.uniform(0.2, 0.3))
    eps1, eps2 = 0.2, 0.3
    eta = eps1 * min(k2, 1 - k1, k1 - k2) * float(rng.uniform(0.3, 0.9))
    beta = -float(rng.uniform(0.1, 0.9)) * eps2 * eta / (3 * (k1 - k2))

    g10 = random_dist(rng, max_atoms=3, bound=0.5)
    f10 = DiscreteDist(
        locations=tuple(loc + beta for loc in g10.locations), masses=g10.masses
    )
    zero = DiscreteDist.point_mass(0.0)
    theta = Theta(
        a=k2,
        b=k1 - k2,
        c=0.0,
        pz=float(rng.uniform(0.3, 0.7)),
        M=1.0,
        f11=DiscreteDist.from_atoms(zip([0.2, 0.5, 0.9], rng.dirichlet(np.ones(3)))),
        f10=f10,
        f01=zero,
        f00=zero,
        g11=zero,
        g10=g10,
        g01=zero,
        g00=DiscreteDist.from_atoms(zip([-0.9, -0.5, -0.2], rng.dirichlet(np.ones(3)))),
    )
    return theta, ForgeConfig(eps1=eps1, eps2=eps2, M=1.0, eta=eta)


def enumerate_observed_cells(theta: Theta) -> Dict[Tuple[int, int], Dict[float, float]]:
    """
    Law of Y given (D, Z) by brute-force enumeration over type, Z, Y(1) and Y(0).

    Returns, per nonempty (d, z) cell, a mapping location -> conditional mass.
    """
    joint: Dict[Tuple[int, int], Dict[float, float]] = defaultdict(lambda: defaultdict(float))
    for d1, d0 in TYPE_KEYS:
        share = theta.share(d1, d0)
        if share <= 0:
            continue
        for z, p_z in ((1, theta.pz), (0, 1 - theta.pz)):
            d = d1 if z == 1 else d0
            for y1, m1 in theta.f(d1, d0).atoms:
                for y0, m0 in theta.g(d1, d0).atoms:
                    y = y1 if d == 1 else y0
                    joint[(d, z)][y] += share * p_z * m1 * m0

    cells = {}
    for key in CELL_KEYS:
        if key not in joint:
            continue
        total = sum(joint[key].values())
        if total <= 0:
            continue
        cells[key] = {y: mass / total for y, mass in joint[key].items()}
    return cells


def random_binary_danger_theta(rng: np.random.Generator) -> Tuple[BinaryTheta, float]:
    """
    Random binary no-defier DGP with beta < 0 plus an eta on the DangerSide.

    Cells are bounded away from zero and eta stays small enough that the
    interior forge's slack condition holds.
    """
    k2 = float(rng.uniform(0.2, 0.4))
    k1 = k2 + float(rng.uniform(0.2, 0.3))
    t10 = float(rng.uniform(0.3, 0.7))
    beta = -float(rng.uniform(0.01, 0.15))
    theta = BinaryTheta(
        a=k2,
        b=k1 - k2,
        c=0.0,
        pz=float(rng.uniform(0.3, 0.7)),
        r11=float(rng.uniform(0.6, 0.95)),
        r10=t10 + beta,
        r01=0.0,
        r00=0.0,
        t11=0.0,
        t10=t10,
        t01=0.0,
        t00=float(rng.uniform(0.2, 0.6)),
    )
    eta = abs(beta) * (k1 - k2) * float(rng.uniform(1.01, 1.5))
    return theta, eta

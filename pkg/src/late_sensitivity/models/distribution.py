"""Finite atomic outcome distributions.

Every outcome law in a DGP (the F and G laws per compliance type, and the
observable conditional laws of Y given D and Z) is a ``DiscreteDist``. Keeping
laws finite makes mixtures, truncations and quantiles exact, so equivalence of
two DGPs can be checked to 1e-12 instead of approximately.
"""

import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

# Locations closer than this are treated as the same atom
LOCATION_TOLERANCE = 1e-12
# Masses must sum to one within this tolerance
MASS_TOLERANCE = 1e-12
# Atoms with a (clamped) mass at or below this are dropped
NEGLIGIBLE_MASS = 1e-15
# Largest rounding drift that construction helpers silently renormalize away
RENORMALIZE_TOLERANCE = 1e-9


def _merge_atoms(
    atoms: Iterable[Tuple[float, float]],
) -> Tuple[List[float], List[float]]:
    """Sort atoms by location and merge locations within LOCATION_TOLERANCE."""
    ordered = sorted((float(loc), float(mass)) for loc, mass in atoms)
    locations: List[float] = []
    masses: List[float] = []
    for loc, mass in ordered:
        if locations and loc - locations[-1] <= LOCATION_TOLERANCE:
            masses[-1] += mass
        else:
            locations.append(loc)
            masses.append(mass)
    return locations, masses


@dataclass(frozen=True)
class DiscreteDist:
    """A probability distribution on finitely many real atoms.

    Locations are strictly increasing, masses strictly positive and summing to
    one within MASS_TOLERANCE. Instances are immutable.
    """

    locations: Tuple[float, ...]
    masses: Tuple[float, ...]

    def __post_init__(self) -> None:
        """Validate the atom list."""
        if len(self.locations) != len(self.masses):
            raise ValueError(
                f"locations and masses differ in length: "
                f"{len(self.locations)} vs {len(self.masses)}"
            )
        if not self.locations:
            raise ValueError("A distribution needs at least one atom")
        locs = np.asarray(self.locations, dtype=float)
        mass = np.asarray(self.masses, dtype=float)
        if not (np.all(np.isfinite(locs)) and np.all(np.isfinite(mass))):
            raise ValueError("Atom locations and masses must be finite")
        if np.any(np.diff(locs) <= 0):
            raise ValueError("Atom locations must be strictly increasing")
        if np.any(mass <= 0):
            raise ValueError("Atom masses must be strictly positive")
        total = float(mass.sum())
        if abs(total - 1.0) > MASS_TOLERANCE:
            raise ValueError(f"Atom masses must sum to 1, got {total!r}")

    @classmethod
    def from_atoms(cls, atoms: Iterable[Tuple[float, float]]) -> "DiscreteDist":
        """Build a distribution from (location, mass) pairs in any order.

        Equal locations are merged, zero masses dropped, and rounding drift up
        to RENORMALIZE_TOLERANCE is normalized away.
        """
        locations, masses = _merge_atoms(atoms)
        if any(m < 0 for m in masses):
            raise ValueError("Atom masses must be nonnegative")
        kept = [(loc, m) for loc, m in zip(locations, masses) if m > NEGLIGIBLE_MASS]
        if not kept:
            raise ValueError("A distribution needs at least one atom with positive mass")
        total = float(np.sum([m for _, m in kept]))
        if abs(total - 1.0) > RENORMALIZE_TOLERANCE:
            raise ValueError(f"Atom masses must sum to 1, got {total!r}")
        return cls(
            locations=tuple(loc for loc, _ in kept),
            masses=tuple(m / total for _, m in kept),
        )

    @classmethod
    def point_mass(cls, location: float) -> "DiscreteDist":
        """Distribution putting all mass on one location."""
        return cls(locations=(float(location),), masses=(1.0,))

    @classmethod
    def uniform(cls, locations: Sequence[float]) -> "DiscreteDist":
        """Equal mass on each of the given (distinct) locations."""
        if not locations:
            raise ValueError("uniform() needs at least one location")
        weight = 1.0 / len(locations)
        return cls.from_atoms((loc, weight) for loc in locations)

    @classmethod
    def bernoulli(cls, p: float) -> "DiscreteDist":
        """Law of a 0/1 variable with P(Y=1) = p."""
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"Bernoulli mean must be in [0, 1], got {p}")
        return cls.from_atoms([(0.0, 1.0 - p), (1.0, p)])

    @classmethod
    def mixture(
        cls, components: Sequence[Tuple[float, "DiscreteDist"]]
    ) -> "DiscreteDist":
        """Convex combination of distributions; weights must be nonnegative."""
        if any(w < 0 for w, _ in components):
            raise ValueError("Mixture weights must be nonnegative")
        return cls.signed_mixture(components)

    @classmethod
    def signed_mixture(
        cls, components: Sequence[Tuple[float, "DiscreteDist"]]
    ) -> "DiscreteDist":
        """Atom-wise linear combination whose weights may be negative.

        The result must itself be a distribution: masses in [-MASS_TOLERANCE, 0)
        are clamped to zero, anything more negative raises ValueError.
        """
        atoms = [
            (loc, weight * mass)
            for weight, dist in components
            if weight != 0.0
            for loc, mass in zip(dist.locations, dist.masses)
        ]
        locations, masses = _merge_atoms(atoms)
        worst = min(masses) if masses else 0.0
        if worst < -MASS_TOLERANCE:
            raise ValueError(
                f"Signed mixture has negative atom mass {worst:.3e} "
                f"at location {locations[masses.index(worst)]!r}"
            )
        return cls.from_atoms(
            (loc, max(m, 0.0)) for loc, m in zip(locations, masses)
        )

    @property
    def atoms(self) -> List[Tuple[float, float]]:
        """Atoms as (location, mass) pairs, sorted by location."""
        return list(zip(self.locations, self.masses))

    def __len__(self) -> int:
        return len(self.locations)

    @property
    def min_location(self) -> float:
        return self.locations[0]

    @property
    def max_location(self) -> float:
        return self.locations[-1]

    def mean(self) -> float:
        """Expected value."""
        return float(np.dot(self.locations, self.masses))

    def cdf(self, t: float) -> float:
        """P(Y <= t)."""
        index = int(np.searchsorted(self.locations, t, side="right"))
        return float(np.sum(self.masses[:index]))

    def quantile(self, eps: float) -> float:
        """Smallest atom location t with CDF(t) >= eps."""
        if not 0.0 < eps < 1.0:
            raise ValueError(f"Quantile level must be in (0, 1), got {eps}")
        cumulative = np.cumsum(self.masses)
        # Cumulative sums drift below exact atom CDFs
        index = int(np.searchsorted(cumulative, eps - MASS_TOLERANCE, side="left"))
        return self.locations[min(index, len(self.locations) - 1)]

    def condition_above(self, threshold: float) -> "DiscreteDist":
        """Law of Y given Y > threshold."""
        kept = [(loc, m) for loc, m in self.atoms if loc > threshold]
        if not kept:
            raise ValueError(f"No mass above {threshold!r}")
        return self._renormalized(kept)

    def condition_at_most(self, threshold: float) -> "DiscreteDist":
        """Law of Y given Y <= threshold."""
        kept = [(loc, m) for loc, m in self.atoms if loc <= threshold]
        if not kept:
            raise ValueError(f"No mass at or below {threshold!r}")
        return self._renormalized(kept)

    @staticmethod
    def _renormalized(atoms: List[Tuple[float, float]]) -> "DiscreteDist":
        total = float(np.sum([m for _, m in atoms]))
        return DiscreteDist(
            locations=tuple(loc for loc, _ in atoms),
            masses=tuple(m / total for _, m in atoms),
        )

    def supported_within(self, bound: float) -> bool:
        """True when every atom lies in [-bound, bound]."""
        return (
            self.min_location >= -bound - LOCATION_TOLERANCE
            and self.max_location <= bound + LOCATION_TOLERANCE
        )

    def total_variation(self, other: "DiscreteDist") -> float:
        """Total-variation distance, matching atoms within LOCATION_TOLERANCE."""
        signed = self.atoms + [(loc, -m) for loc, m in other.atoms]
        _, differences = _merge_atoms(signed)
        return min(1.0, 0.5 * float(np.sum(np.abs(differences))))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw ``size`` iid values."""
        if len(self.locations) == 1:
            return np.full(size, self.locations[0], dtype=float)
        probabilities = np.asarray(self.masses, dtype=float)
        return rng.choice(
            np.asarray(self.locations, dtype=float),
            size=size,
            p=probabilities / probabilities.sum(),
        )

    def to_dict(self) -> dict:
        """Convert to a plain dictionary for reports."""
        return {"atoms": [[loc, m] for loc, m in self.atoms]}

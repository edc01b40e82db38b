"""Versioned JSON documents: DGPs, forge results, analysis and experiment reports.

Every document carries a ``schema`` tag. Canonical output sorts keys and atoms,
so emitting a parsed document reproduces the input byte for byte.
"""

import hashlib
import json
import logging
from dataclasses import asdict, is_dataclass
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator
from pydantic import ValidationError as PydanticValidationError

from ..models.config import ForgeConfig
from ..models.distribution import DiscreteDist
from ..models.results import BootstrapCI, BoundaryReport, Estimates, ForgeResult
from ..models.theta import BinaryTheta, Theta
from ..utils.exceptions import DocumentError

logger = logging.getLogger(__name__)

DGP_SCHEMA = "late-sensitivity/dgp/v1"
FORGE_SCHEMA = "late-sensitivity/forge/v1"
REPORT_SCHEMA = "late-sensitivity/report/v1"
SIMULATION_CONFIG_SCHEMA = "late-sensitivity/simulation-config/v1"
EXPERIMENT_REPORT_SCHEMA = "late-sensitivity/experiment-report/v1"

LAW_KEYS = ("f11", "f10", "f01", "f00", "g11", "g10", "g01", "g00")
MEAN_KEYS = ("r11", "r10", "r01", "r00", "t11", "t10", "t01", "t00")

Atom = Tuple[float, float]
DocumentT = TypeVar("DocumentT", bound=BaseModel)


class DgpKind(str, Enum):
    GENERAL = "general"
    BINARY = "binary"


class _Document(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


class DgpDocument(_Document):
    """A DGP as type shares plus eight atom lists (general) or eight means (binary)."""

    schema_tag: Literal["late-sensitivity/dgp/v1"] = Field(default=DGP_SCHEMA, alias="schema")
    kind: DgpKind = DgpKind.GENERAL
    a: float = Field(ge=0.0, le=1.0, description="Always-taker share")
    b: float = Field(ge=0.0, le=1.0, description="Complier share")
    c: float = Field(ge=0.0, le=1.0, description="Defier share")
    pz: float = Field(gt=0.0, lt=1.0, description="P(Z=1)")
    M: Optional[float] = Field(default=None, gt=0.0, description="Outcome bound")
    laws: Optional[Dict[str, List[Atom]]] = None
    means: Optional[Dict[str, float]] = None

    @model_validator(mode="after")
    def check_kind(self) -> "DgpDocument":
        if self.kind is DgpKind.GENERAL:
            if self.laws is None or self.M is None:
                raise ValueError("a general DGP needs 'M' and 'laws'")
            if self.means is not None:
                raise ValueError("'means' is only allowed for binary DGPs")
            if set(self.laws) != set(LAW_KEYS):
                raise ValueError(f"'laws' must have exactly the keys {', '.join(LAW_KEYS)}")
            empty = [key for key, atoms in self.laws.items() if not atoms]
            if empty:
                raise ValueError(f"empty atom list for {', '.join(sorted(empty))}")
        else:
            if self.means is None:
                raise ValueError("a binary DGP needs 'means'")
            if self.laws is not None:
                raise ValueError("'laws' is only allowed for general DGPs")
            if set(self.means) != set(MEAN_KEYS):
                raise ValueError(f"'means' must have exactly the keys {', '.join(MEAN_KEYS)}")
        return self


class CertificateModel(BaseModel):
    c_tilde: float
    mu1_twin: float
    mu2_twin: float
    equivalence_distance: float
    membership: Dict[str, Optional[bool]]
    certified: bool
    b1: Optional[float] = None
    b2: Optional[float] = None
    delta: Optional[float] = None
    diagnostics: Dict[str, Any] = Field(default_factory=dict)


class ForgeDocument(_Document):
    schema_tag: Literal["late-sensitivity/forge/v1"] = Field(default=FORGE_SCHEMA, alias="schema")
    method: str
    base: DgpDocument
    twin: DgpDocument
    certificate: CertificateModel


class Provenance(BaseModel):
    input_path: Optional[str] = None
    config_hash: str
    seed: int
    tool_version: str


class AnalysisReportDocument(_Document):
    schema_tag: Literal["late-sensitivity/report/v1"] = Field(default=REPORT_SCHEMA, alias="schema")
    estimates: Dict[str, Any]
    boundary_reports: List[Dict[str, Any]] = Field(default_factory=list)
    bootstrap: List[Dict[str, Any]] = Field(default_factory=list)
    provenance: Provenance


class ForgeSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    eps1: float = 0.2
    eps2: float = 0.3
    M: float = 1.0
    eta: float = 0.03
    delta_rule: float = 0.5

    def to_config(self) -> ForgeConfig:
        return ForgeConfig(**self.model_dump())


class SweepSettings(BaseModel):
    model_config = ConfigDict(extra="forbid")

    sizes: List[int] = Field(min_length=1)
    seeds: int = Field(default=20, ge=1)


class SimulationConfigDocument(_Document):
    """Settings of a ``simulate`` run.

    Without ``dgp`` the built-in twin pair is used. With ``dgp`` but no ``twin``
    the twin is forged from ``dgp`` with the ``forge`` settings.
    """

    schema_tag: Literal["late-sensitivity/simulation-config/v1"] = Field(
        default=SIMULATION_CONFIG_SCHEMA, alias="schema"
    )
    n: int = Field(default=5000, ge=1)
    replications: int = Field(default=400, ge=1)
    seed: int = Field(default=20240101, ge=0)
    alpha: float = Field(default=0.05, gt=0.0, lt=1.0)
    significance: float = Field(default=0.01, gt=0.0, lt=1.0)
    procedures: List[str] = Field(default_factory=lambda: ["plug-in-sign"], min_length=1)
    bootstrap_replications: int = Field(default=200, ge=2)
    workers: Optional[int] = Field(default=None, ge=1)
    dgp: Optional[DgpDocument] = None
    twin: Optional[DgpDocument] = None
    forge: Optional[ForgeSettings] = None
    sweep: Optional[SweepSettings] = None

    @model_validator(mode="after")
    def check_pair(self) -> "SimulationConfigDocument":
        if self.twin is not None and self.dgp is None:
            raise ValueError("'twin' given without 'dgp'")
        return self


class ExperimentReportDocument(_Document):
    schema_tag: Literal["late-sensitivity/experiment-report/v1"] = Field(
        default=EXPERIMENT_REPORT_SCHEMA, alias="schema"
    )
    config_hash: str
    equivalence_distance: float
    experiments: List[Dict[str, Any]]
    sweep: Optional[Dict[str, Any]] = None
    tool_version: str


def to_canonical_json(document: BaseModel) -> str:
    """Sorted-key JSON with a trailing newline; None fields are omitted."""
    payload = document.model_dump(mode="json", by_alias=True, exclude_none=True)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def config_hash(config: Any) -> str:
    """SHA-256 of the canonical JSON form of a config dataclass or document."""
    if isinstance(config, BaseModel):
        payload = config.model_dump(mode="json", by_alias=True, exclude_none=True)
    elif is_dataclass(config):
        payload = asdict(config)
    else:
        payload = config
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _parse(model: Type[DocumentT], text: str, file_path: Optional[str]) -> DocumentT:
    try:
        return model.model_validate_json(text)
    except PydanticValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(part) for part in first["loc"]) or None
        raise DocumentError(first["msg"], location=location, file_path=file_path, cause=e)


def _dist_from_atoms(atoms: List[Atom]) -> DiscreteDist:
    ordered = sorted((float(loc), float(mass)) for loc, mass in atoms)
    try:
        return DiscreteDist(
            locations=tuple(loc for loc, _ in ordered),
            masses=tuple(mass for _, mass in ordered),
        )
    except ValueError:
        # Duplicate locations or rounding drift: normalize
        return DiscreteDist.from_atoms(ordered)


def dgp_to_document(model: Union[Theta, BinaryTheta]) -> DgpDocument:
    if isinstance(model, BinaryTheta):
        return DgpDocument(
            kind=DgpKind.BINARY,
            a=model.a,
            b=model.b,
            c=model.c,
            pz=model.pz,
            means={key: getattr(model, key) for key in MEAN_KEYS},
        )
    return DgpDocument(
        kind=DgpKind.GENERAL,
        a=model.a,
        b=model.b,
        c=model.c,
        pz=model.pz,
        M=model.M,
        laws={key: list(dist.atoms) for key, dist in model.distributions().items()},
    )


def document_to_dgp(
    document: DgpDocument, file_path: Optional[str] = None
) -> Union[Theta, BinaryTheta]:
    """Build the DGP a document describes.

    Raises:
        DocumentError: If the values violate a DGP invariant
    """
    try:
        if document.kind is DgpKind.BINARY:
            assert document.means is not None
            return BinaryTheta(
                a=document.a, b=document.b, c=document.c, pz=document.pz, **document.means
            )
        assert document.laws is not None and document.M is not None
        laws = {}
        for key in LAW_KEYS:
            try:
                laws[key] = _dist_from_atoms(document.laws[key])
            except ValueError as e:
                raise DocumentError(str(e), location=f"laws.{key}", file_path=file_path, cause=e)
        return Theta(
            a=document.a, b=document.b, c=document.c, pz=document.pz, M=document.M, **laws
        )
    except ValueError as e:
        raise DocumentError(str(e), file_path=file_path, cause=e)


def parse_dgp(text: str, file_path: Optional[str] = None) -> Union[Theta, BinaryTheta]:
    return document_to_dgp(_parse(DgpDocument, text, file_path), file_path)


def forge_to_document(result: ForgeResult) -> ForgeDocument:
    return ForgeDocument(
        method=result.method,
        base=dgp_to_document(result.base),
        twin=dgp_to_document(result.twin),
        certificate=CertificateModel(
            c_tilde=result.c_tilde,
            mu1_twin=result.mu1_twin,
            mu2_twin=result.mu2_twin,
            equivalence_distance=result.equivalence_distance,
            membership=result.membership_ok.to_dict(),
            certified=result.certified,
            b1=result.b1,
            b2=result.b2,
            delta=result.delta,
            diagnostics=dict(result.diagnostics),
        ),
    )


def parse_forge(text: str, file_path: Optional[str] = None) -> ForgeDocument:
    return _parse(ForgeDocument, text, file_path)


def parse_model_document(
    text: str, file_path: Optional[str] = None, role: str = "base"
) -> Union[Theta, BinaryTheta]:
    """
    Read a DGP from either a DGP document or a forge document.

    For a forge document ``role`` picks its ``base`` or its ``twin``.
    """
    try:
        tag = json.loads(text).get("schema")
    except (json.JSONDecodeError, AttributeError) as e:
        raise DocumentError(f"not a JSON object: {e}", file_path=file_path, cause=e)
    if tag == FORGE_SCHEMA:
        forge = parse_forge(text, file_path)
        chosen = forge.twin if role == "twin" else forge.base
        return document_to_dgp(chosen, file_path)
    return parse_dgp(text, file_path)


def parse_simulation_config(
    text: str, file_path: Optional[str] = None
) -> SimulationConfigDocument:
    return _parse(SimulationConfigDocument, text, file_path)


def _as_dict(item: Any) -> Dict[str, Any]:
    return item.to_dict() if hasattr(item, "to_dict") else dict(item)


def build_analysis_report(
    estimates: Union[Estimates, Dict[str, Any]],
    boundary_reports: List[BoundaryReport],
    bootstrap: List[BootstrapCI],
    config: Any,
    seed: int,
    tool_version: str,
    input_path: Optional[str] = None,
) -> AnalysisReportDocument:
    return AnalysisReportDocument(
        estimates=_as_dict(estimates),
        boundary_reports=[_as_dict(report) for report in boundary_reports],
        bootstrap=[_as_dict(ci) for ci in bootstrap],
        provenance=Provenance(
            input_path=input_path,
            config_hash=config_hash(config),
            seed=seed,
            tool_version=tool_version,
        ),
    )


def parse_analysis_report(text: str, file_path: Optional[str] = None) -> AnalysisReportDocument:
    return _parse(AnalysisReportDocument, text, file_path)

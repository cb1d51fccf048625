import json
import math
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field, validator

from app import __version__
from app.config import Configuration
from app.errors import FrameFileError, InvalidInputError
from app.domain.entities import (
    Certificate,
    Dimension,
    ExactFrame,
    FrameDescriptor,
    FrameValidationReport,
    Operator,
    PolytopeCertificate,
    QuasiDistribution,
    RestartTrace,
    Role,
    ScanRow,
    Scope,
    ThresholdResult,
)

conf = Configuration()

METHODS = ("wigner", "polytope", "kd", "crit")
STATES = ("strange", "norrell", "custom")


class OperatorSchema(BaseModel):
    d: int
    re: List[List[float]]
    im: List[List[float]]
    role: Role = Role.GENERIC


class FrameSchema(BaseModel):
    d: int
    descriptor: FrameDescriptor
    F: List[OperatorSchema]
    D: List[OperatorSchema]
    config: Optional[Dict[str, Any]] = None
    version: str = __version__


class QuasiDistributionSchema(BaseModel):
    labels: List[List[int]]
    re: List[float]
    im: List[float]
    subject: str


class CertificateSchema(BaseModel):
    family: str
    p: float
    witness: float
    scope: Scope
    descriptor: Optional[FrameDescriptor]
    representation: Optional[QuasiDistributionSchema]
    polytope: Optional[PolytopeCertificate]
    extras: Dict[str, float]


class ThresholdReport(BaseModel):
    kind: str
    p: float
    upper_bound: bool
    certificate: CertificateSchema
    scan: List[List[float]]
    tol: float
    seed: Optional[int]
    diagnostics: List[str]
    optimizer_trace: List[RestartTrace]
    config: Dict[str, Any]
    version: str = __version__


class FrameReport(BaseModel):
    descriptor: FrameDescriptor
    report: FrameValidationReport
    config: Dict[str, Any]
    version: str = __version__


class ScanReport(BaseModel):
    rows: List[ScanRow]
    config: Dict[str, Any]
    version: str = __version__


class RunConfig(BaseModel):
    schema_version: int = Field(1, alias="schema")
    d: int = 3
    state: str = "strange"
    vec: Optional[str] = None
    method: str = "wigner"
    scope: Scope = Scope.STATE
    tol: float = conf.bisection_tol
    classification_tol: float = conf.classification_tol
    seed: int = conf.seed
    restarts: int = conf.restarts
    max_iterations: int = conf.max_iterations
    threads: int = conf.threads
    families: Optional[List[str]] = None
    start: float = 0.0
    stop: float = 1.0
    step: float = 0.01
    out: Optional[str] = None
    format: Optional[str] = None

    class Config:
        allow_population_by_field_name = True
        extra = "forbid"

    @validator("schema_version")
    def known_schema(cls, v):
        if v != 1:
            raise ValueError(f"unsupported schema version {v}")
        return v

    @validator("state")
    def known_state(cls, v):
        if v not in STATES:
            raise ValueError(f"must be one of {STATES}")
        return v

    @validator("method")
    def known_method(cls, v):
        if v not in METHODS:
            raise ValueError(f"must be one of {METHODS}")
        return v

    @validator("format")
    def known_format(cls, v):
        if v is not None and v not in ("json", "csv"):
            raise ValueError("must be json or csv")
        return v

    @validator("tol", "classification_tol", "step", "start", "stop")
    def finite(cls, v):
        if not math.isfinite(v):
            raise ValueError("must be a finite number")
        return v

    @validator("tol", "classification_tol", "step")
    def positive(cls, v):
        if v <= 0:
            raise ValueError("must be positive")
        return v

    @validator("restarts", "max_iterations", "threads")
    def positive_int(cls, v):
        if v < 1:
            raise ValueError("must be positive")
        return v

    @validator("families", pre=True)
    def split_families(cls, v):
        if v is None:
            return v
        if isinstance(v, str):
            return [f.strip() for f in v.split(",") if f.strip()]
        return v

    def custom_vector(self) -> Optional[List[complex]]:
        if self.vec is None:
            return None
        try:
            return [complex(x.replace(" ", "")) for x in self.vec.split(",")]
        except ValueError:
            raise InvalidInputError(f"vec: can not parse {self.vec!r} as complex numbers")

    def echo(self) -> Dict[str, Any]:
        return json.loads(self.json(by_alias=True))


def operator_to_schema(op: Operator) -> OperatorSchema:
    return OperatorSchema(
        d=op.d,
        re=op.entries.real.tolist(),
        im=op.entries.imag.tolist(),
        role=op.role,
    )


def operator_from_schema(schema: OperatorSchema) -> Operator:
    return Operator(
        dim=Dimension(d=schema.d),
        entries=np.array(schema.re) + 1j * np.array(schema.im),
        role=schema.role,
    )


def _matrix_schema(d: int, m: np.ndarray) -> OperatorSchema:
    return OperatorSchema(d=d, re=m.real.tolist(), im=m.imag.tolist())


def frame_to_schema(
    frame: ExactFrame,
    config: Optional[RunConfig] = None
) -> FrameSchema:
    d = frame.dim.d
    return FrameSchema(
        d=d,
        config=config.echo() if config is not None else None,
        descriptor=frame.descriptor,
        F=[_matrix_schema(d, f) for f in frame.analysis],
        D=[_matrix_schema(d, g) for g in frame.synthesis],
    )


def frame_from_schema(schema: FrameSchema) -> ExactFrame:
    d = schema.d

    def stack(ops: List[OperatorSchema]) -> np.ndarray:
        try:
            arr = np.array([np.array(o.re) + 1j * np.array(o.im) for o in ops])
        except ValueError as e:
            raise FrameFileError(f"Ragged frame operators: {e}")
        if arr.ndim != 3 or arr.shape[1:] != (d, d):
            raise FrameFileError(
                f"Frame operators must be {d}x{d} matrices, got shape {arr.shape}"
            )
        return arr

    return ExactFrame(
        dim=Dimension(d=d),
        labels=[(i, j) for i in range(d) for j in range(d)][:len(schema.F)],
        analysis=stack(schema.F),
        synthesis=stack(schema.D),
        descriptor=schema.descriptor,
    )


def distribution_to_schema(dist: QuasiDistribution) -> QuasiDistributionSchema:
    values = dist.values.reshape(-1)
    return QuasiDistributionSchema(
        labels=[list(label) for label in dist.labels],
        re=values.real.tolist(),
        im=values.imag.tolist(),
        subject=dist.subject.value,
    )


def certificate_to_schema(cert: Certificate) -> CertificateSchema:
    return CertificateSchema(
        family=cert.family,
        p=cert.p,
        witness=cert.witness,
        scope=cert.scope,
        descriptor=cert.descriptor,
        representation=(
            None if cert.representation is None
            else distribution_to_schema(cert.representation)
        ),
        polytope=cert.polytope,
        extras=cert.extras,
    )


def threshold_report(result: ThresholdResult, config: RunConfig) -> ThresholdReport:
    return ThresholdReport(
        kind=result.kind.value,
        p=result.p_value,
        upper_bound=result.upper_bound,
        certificate=certificate_to_schema(result.certificate),
        scan=[[p, w] for p, w in result.scan_trace],
        tol=result.tol,
        seed=result.seed,
        diagnostics=result.diagnostics,
        optimizer_trace=result.optimizer_trace,
        config=config.echo(),
    )


def dump_json(model: BaseModel) -> str:
    """Deterministic JSON text of a model."""
    return json.dumps(
        json.loads(model.json(by_alias=True)), indent=2, sort_keys=True
    ) + "\n"

from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from app.config import Configuration
from app.errors import (
    InvalidChannelError,
    InvalidOperatorError,
    UnsupportedDimensionError,
)

conf = Configuration()

SUPPORTED_DIMENSIONS = (3, 5, 7)

CONFIRMED = "CONFIRMED"
REFUTED = "REFUTED"
POTENTIAL_GAP = "POTENTIAL_GAP"


def _frozen_array(value) -> np.ndarray:
    arr = np.array(value, dtype=complex)
    arr.setflags(write=False)
    return arr


class Dimension(BaseModel):
    d: int

    class Config:
        frozen = True

    @validator("d")
    def check_supported(cls, v):
        if v not in SUPPORTED_DIMENSIONS:
            raise UnsupportedDimensionError(
                f"Dimension {v} is not an odd prime in {SUPPORTED_DIMENSIONS}"
            )
        return v

    @property
    def omega(self) -> complex:
        return np.exp(2j * np.pi / self.d)

    @property
    def half(self) -> int:
        """Inverse of 2 modulo d."""
        return (self.d + 1) // 2

    @property
    def size(self) -> int:
        return self.d * self.d


class Role(str, Enum):
    STATE = "state"
    UNITARY = "unitary"
    EFFECT = "effect"
    GENERIC = "generic"


class Operator(BaseModel):
    dim: Dimension
    entries: np.ndarray
    role: Role = Role.GENERIC

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("entries", pre=True)
    def as_matrix(cls, v):
        return _frozen_array(v)

    @root_validator(skip_on_failure=True)
    def check_role(cls, values):
        dim, m, role = values["dim"], values["entries"], values["role"]
        if m.shape != (dim.d, dim.d):
            raise InvalidOperatorError(
                f"Expected a {dim.d}x{dim.d} matrix, got shape {m.shape}"
            )
        if role in (Role.STATE, Role.EFFECT):
            herm = np.max(np.abs(m - m.conj().T))
            if herm >= conf.construction_tol:
                raise InvalidOperatorError(
                    f"{role.value} is not Hermitian (deviation {herm:.3e})"
                )
            eigs = np.linalg.eigvalsh(m)
            if role is Role.STATE:
                trace_dev = abs(np.trace(m) - 1)
                if trace_dev >= conf.construction_tol:
                    raise InvalidOperatorError(
                        f"State trace deviates from 1 by {trace_dev:.3e}"
                    )
                if eigs[0] < -conf.validation_tol:
                    raise InvalidOperatorError(
                        f"State has negative eigenvalue {eigs[0]:.3e}"
                    )
            elif eigs[0] < -conf.validation_tol or (
                eigs[-1] > 1 + conf.validation_tol
            ):
                raise InvalidOperatorError(
                    f"Effect eigenvalues [{eigs[0]:.3e}, {eigs[-1]:.3e}] "
                    "outside [0, 1]"
                )
        elif role is Role.UNITARY:
            dev = np.max(np.abs(m.conj().T @ m - np.eye(dim.d)))
            if dev >= conf.construction_tol:
                raise InvalidOperatorError(
                    f"Matrix is not unitary (deviation {dev:.3e})"
                )
        return values

    @property
    def d(self) -> int:
        return self.dim.d

    def dagger(self) -> np.ndarray:
        return self.entries.conj().T


class WeylIndex(BaseModel):
    p: int
    q: int

    class Config:
        frozen = True

    def reduced(self, dim: Dimension) -> "WeylIndex":
        return WeylIndex(p=self.p % dim.d, q=self.q % dim.d)


class StabilizerStateSet(BaseModel):
    """Pure stabiliser states grouped into d+1 mutually unbiased bases.

    ``bases[g][:, k]`` is the k-th vector of group g; group 0 is the
    computational basis and group a+1 the eigenbasis of X Z^a.
    """

    dim: Dimension
    bases: np.ndarray
    states: List[Operator]

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("bases", pre=True)
    def freeze(cls, v):
        return _frozen_array(v)

    def group(self, g: int) -> List[Operator]:
        d = self.dim.d
        return self.states[g * d:(g + 1) * d]


class FrameKind(str, Enum):
    GROSS = "gross"
    KD = "kd"
    PARAMETRIZED = "parametrized"


class FrameDescriptor(BaseModel):
    kind: FrameKind
    basis_a: Optional[str] = None
    basis_b: Optional[str] = None
    params: Optional[List[float]] = None

    class Config:
        frozen = True


class ExactFrame(BaseModel):
    dim: Dimension
    labels: List[Tuple[int, int]]
    analysis: np.ndarray
    synthesis: np.ndarray
    descriptor: FrameDescriptor

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("analysis", "synthesis", pre=True)
    def freeze(cls, v):
        return _frozen_array(v)

    @property
    def size(self) -> int:
        return len(self.labels)


class InvariantCheck(BaseModel):
    name: str
    residual: float
    tolerance: float
    passed: bool


class FrameValidationReport(BaseModel):
    checks: List[InvariantCheck]
    overall: bool

    def residual(self, name: str) -> float:
        return next(c.residual for c in self.checks if c.name == name)

    def passed(self, name: str) -> bool:
        return next(c.passed for c in self.checks if c.name == name)


class Subject(str, Enum):
    STATE = "state"
    EFFECT = "effect"
    CHANNEL = "channel"


class QuasiDistribution(BaseModel):
    """Complex weights over a sample space.

    ``labels`` enumerate ``values`` in row-major order; channel
    distributions keep the square (out, in) matrix shape.
    """

    labels: List[Tuple[int, ...]]
    values: np.ndarray
    subject: Subject

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("values", pre=True)
    def freeze(cls, v):
        return _frozen_array(v)


class Channel(BaseModel):
    name: str
    dim: Dimension
    kraus: np.ndarray

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False

    @validator("kraus", pre=True)
    def freeze(cls, v):
        arr = _frozen_array(v)
        if arr.ndim == 2:
            arr = _frozen_array(arr[None, :, :])
        return arr

    @root_validator(skip_on_failure=True)
    def check_trace_preserving(cls, values):
        d, kraus = values["dim"].d, values["kraus"]
        if kraus.ndim != 3 or kraus.shape[1:] != (d, d) or not len(kraus):
            raise InvalidChannelError(
                f"Kraus operators must be a non-empty list of {d}x{d} matrices"
            )
        total = np.einsum("kba,kbc->ac", kraus.conj(), kraus)
        dev = np.max(np.abs(total - np.eye(d)))
        if dev > conf.validation_tol:
            raise InvalidChannelError(
                f"Channel {values['name']} is not trace preserving "
                f"(deviation {dev:.3e})"
            )
        return values

    def apply(self, m: np.ndarray) -> np.ndarray:
        return np.einsum("kab,bc,kdc->ad", self.kraus, m, self.kraus.conj())


class OperationalSet(BaseModel):
    dim: Dimension
    p: float
    magic: Optional[Operator] = None
    states: List[Operator]
    channels: List[Channel]
    effects: List[Operator]

    class Config:
        allow_mutation = False

    @validator("states", "channels", "effects")
    def not_empty(cls, v, field):
        if not v:
            raise ValueError(f"{field.name} can not be empty")
        return v


class Scope(str, Enum):
    STATE = "state"
    SUBTHEORY = "subtheory"


class ThresholdKind(str, Enum):
    WIGNER = "wigner"
    POLYTOPE = "polytope"
    KD = "kd"
    CRIT = "crit"


class PolytopeCertificate(BaseModel):
    coefficients: List[float]
    residual: float


class Certificate(BaseModel):
    family: str
    p: float
    witness: float
    scope: Scope = Scope.STATE
    descriptor: Optional[FrameDescriptor] = None
    representation: Optional[QuasiDistribution] = None
    polytope: Optional[PolytopeCertificate] = None
    extras: Dict[str, float] = {}

    class Config:
        arbitrary_types_allowed = True


class RestartTrace(BaseModel):
    restart: int
    iterations: int
    objective: float


class ThresholdResult(BaseModel):
    kind: ThresholdKind
    p_value: float = Field(..., ge=0.0, le=1.0)
    upper_bound: bool = False
    certificate: Certificate
    scan_trace: List[Tuple[float, float]] = []
    tol: float
    seed: Optional[int] = None
    diagnostics: List[str] = []
    optimizer_trace: List[RestartTrace] = []

    class Config:
        arbitrary_types_allowed = True


class OptimizerConfig(BaseModel):
    restarts: int = conf.restarts
    max_iterations: int = conf.max_iterations
    convergence_tol: float = conf.convergence_tol
    seed: int = conf.seed
    simplex_scale: float = conf.simplex_scale
    threads: int = conf.threads

    class Config:
        frozen = True

    @validator("restarts", "max_iterations", "threads")
    def positive_int(cls, v, field):
        if v < 1:
            raise ValueError(f"{field.name} must be positive")
        return v

    @validator("convergence_tol", "simplex_scale")
    def positive_float(cls, v, field):
        if v <= 0:
            raise ValueError(f"{field.name} must be positive")
        return v

    @validator("seed")
    def seed_64bit(cls, v):
        if not 0 <= v < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return v


class FrameSearchPoint(BaseModel):
    params: np.ndarray
    objective: float
    restart: int
    iterations: int
    trace: List[RestartTrace] = []

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


class StateClaim(BaseModel):
    group: int
    index: int
    defining: bool
    penalty: float


class MubClaimReport(BaseModel):
    states: List[StateClaim]
    defining_pass: bool
    verdict: str


class ObjectiveContext(BaseModel):
    rho_m: Operator
    opset: OperationalSet
    scope: Scope = Scope.STATE

    class Config:
        allow_mutation = False


class ScanRow(BaseModel):
    p: float
    frame: str
    witness: float
    min_real: float
    max_abs_imag: float

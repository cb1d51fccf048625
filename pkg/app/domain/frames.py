"""Exact frames on the d^2 dimensional operator space.

Analysis operators F act on states (mu = Tr(F rho)) and sum to the
identity; synthesis operators D act on effects (xi = Tr(E D)) and have unit
trace. Both are stored as stacked (d^2, d, d) arrays.
"""
import logging
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from app.config import Configuration
from app.domain.entities import (
    Dimension,
    ExactFrame,
    FrameDescriptor,
    FrameKind,
    FrameValidationReport,
    InvariantCheck,
    Operator,
)
from app.domain.parametrization import unitary_matrix
from app.domain.qudit import (
    fourier_matrix,
    stabilizer_bases,
    weyl_stack,
)
from app.errors import (
    DegenerateFrameError,
    DimensionMismatchError,
    InvalidBasisError,
    InvalidParameterError,
)

conf = Configuration()
log = logging.getLogger(__name__)

Basis = Union[np.ndarray, Operator]


def as_basis(basis: Basis) -> np.ndarray:
    """Column matrix of an orthonormal basis."""
    m = basis.entries if isinstance(basis, Operator) else np.asarray(
        basis, dtype=complex
    )
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidBasisError(f"Basis must be a square matrix, got {m.shape}")
    dev = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
    if dev > conf.validation_tol:
        raise InvalidBasisError(f"Basis is not orthonormal (deviation {dev:.3e})")
    return m


def kd_arrays(
    a: np.ndarray,
    b: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    """Analysis and synthesis stacks of the KD frame of bases a and b.

    Labels run over (i, j) in row-major order with i indexing a.
    """
    d = a.shape[0]
    overlaps = b.conj().T @ a
    weak = np.argwhere(np.abs(overlaps) <= conf.overlap_floor)
    if len(weak):
        j, i = weak[0]
        raise DegenerateFrameError(
            f"Overlap <b_{j}|a_{i}> = {abs(overlaps[j, i]):.3e} "
            f"is below the floor {conf.overlap_floor:.0e}"
        )
    analysis = np.einsum("ji,xj,yi->ijxy", overlaps, b, a.conj())
    synthesis = np.einsum("xi,yj->ijxy", a, b.conj()) / overlaps.T[
        :, :, None, None
    ]
    return (
        analysis.reshape(d * d, d, d),
        synthesis.reshape(d * d, d, d),
    )


def _labels(d: int) -> List[Tuple[int, int]]:
    return [(i, j) for i in range(d) for j in range(d)]


def kd_frame(
    basis_a: Basis,
    basis_b: Basis,
    names: Tuple[str, str] = ("custom", "custom")
) -> ExactFrame:
    a, b = as_basis(basis_a), as_basis(basis_b)
    if a.shape != b.shape:
        raise DimensionMismatchError(
            f"Bases of size {a.shape[0]} and {b.shape[0]} do not match"
        )
    analysis, synthesis = kd_arrays(a, b)
    return ExactFrame(
        dim=Dimension(d=a.shape[0]),
        labels=_labels(a.shape[0]),
        analysis=analysis,
        synthesis=synthesis,
        descriptor=FrameDescriptor(
            kind=FrameKind.KD,
            basis_a=names[0],
            basis_b=names[1]
        ),
    )


@lru_cache(maxsize=None)
def gross_wigner_frame(dim: Dimension) -> ExactFrame:
    """Phase-point operators A = W A0 W^dagger, with A0 the parity operator."""
    d = dim.d
    weyl = weyl_stack(dim)
    p, q = np.divmod(np.arange(d * d), d)
    phases = np.exp(-2j * np.pi * ((dim.half * p * q) % d) / d)
    parity = np.einsum("l,lab->ab", phases, weyl) / d
    points = np.einsum("lab,bc,ldc->lad", weyl, parity, weyl.conj())
    return ExactFrame(
        dim=dim,
        labels=_labels(d),
        analysis=points / d,
        synthesis=points,
        descriptor=FrameDescriptor(kind=FrameKind.GROSS),
    )


def frame_from_unitaries(
    u: Operator,
    v: Operator,
    params: Optional[Sequence[float]] = None
) -> ExactFrame:
    """KD frame of the rotated computational bases U|i> and V|j>."""
    if u.d != v.d:
        raise DimensionMismatchError(
            f"Unitaries of dimension {u.d} and {v.d} do not match"
        )
    analysis, synthesis = kd_arrays(u.entries, v.entries)
    return ExactFrame(
        dim=u.dim,
        labels=_labels(u.d),
        analysis=analysis,
        synthesis=synthesis,
        descriptor=FrameDescriptor(
            kind=FrameKind.PARAMETRIZED,
            params=None if params is None else [float(x) for x in params]
        ),
    )


def frame_from_params(params: Sequence[float], dim: Dimension) -> ExactFrame:
    params = np.asarray(params, dtype=float)
    n = dim.size
    if params.shape != (2 * n,):
        raise InvalidParameterError(
            f"Expected {2 * n} frame parameters, got {params.size}"
        )
    analysis, synthesis = kd_arrays(
        unitary_matrix(params[:n], dim.d),
        unitary_matrix(params[n:], dim.d)
    )
    return ExactFrame(
        dim=dim,
        labels=_labels(dim.d),
        analysis=analysis,
        synthesis=synthesis,
        descriptor=FrameDescriptor(
            kind=FrameKind.PARAMETRIZED,
            params=[float(x) for x in params]
        ),
    )


def named_basis(dim: Dimension, name: str) -> np.ndarray:
    """``computational``, ``fourier`` or ``stab-<g>`` for stabiliser group g."""
    if name == "computational":
        return np.eye(dim.d, dtype=complex)
    if name == "fourier":
        return fourier_matrix(dim)
    if name.startswith("stab-"):
        g = int(name[len("stab-"):])
        if 0 <= g <= dim.d:
            return stabilizer_bases(dim)[g]
    raise InvalidBasisError(f"Unknown basis name {name!r}")


def canonical_mub_frame(dim: Dimension) -> ExactFrame:
    return kd_frame(
        named_basis(dim, "computational"),
        named_basis(dim, "fourier"),
        names=("computational", "fourier")
    )


def stabilizer_kd_frames(dim: Dimension) -> List[ExactFrame]:
    """KD frames of every ordered pair of distinct stabiliser bases."""
    names = [f"stab-{g}" for g in range(dim.d + 1)]
    return [
        kd_frame(named_basis(dim, x), named_basis(dim, y), names=(x, y))
        for x in names
        for y in names
        if x != y
    ]


def frame_from_descriptor(
    dim: Dimension,
    descriptor: FrameDescriptor
) -> ExactFrame:
    if descriptor.kind is FrameKind.GROSS:
        return gross_wigner_frame(dim)
    if descriptor.kind is FrameKind.KD:
        return kd_frame(
            named_basis(dim, descriptor.basis_a),
            named_basis(dim, descriptor.basis_b),
            names=(descriptor.basis_a, descriptor.basis_b)
        )
    if descriptor.params is None:
        raise InvalidParameterError("Parametrized frame without parameters")
    return frame_from_params(descriptor.params, dim)


def frame_operators(frame: ExactFrame) -> Tuple[List[Operator], List[Operator]]:
    return (
        [Operator(dim=frame.dim, entries=f) for f in frame.analysis],
        [Operator(dim=frame.dim, entries=g) for g in frame.synthesis],
    )


def validate_frame(frame: ExactFrame) -> FrameValidationReport:
    d = frame.dim.d
    tol = conf.validation_tol
    analysis, synthesis = frame.analysis, frame.synthesis
    eye = np.eye(d)
    n = len(analysis)

    checks = [
        InvariantCheck(
            name="cardinality",
            residual=float(abs(n - d * d) + abs(len(synthesis) - d * d)),
            tolerance=0.0,
            passed=n == d * d and len(synthesis) == d * d,
        )
    ]
    if checks[0].passed:
        gram = np.einsum("lab,mba->lm", synthesis, analysis)
        units = np.einsum("lba,lxy->abxy", analysis, synthesis)
        target = np.einsum("ax,by->abxy", eye, eye)
        residuals = {
            "biorthogonality": np.max(np.abs(gram - np.eye(n))),
            "normalization": np.max(np.abs(analysis.sum(axis=0) - eye)),
            "unit_trace": np.max(np.abs(
                np.einsum("laa->l", synthesis) - 1
            )),
            "reconstruction": np.max(np.abs(units - target)),
        }
    else:
        residuals = dict.fromkeys(
            ("biorthogonality", "normalization", "unit_trace", "reconstruction"),
            float("inf")
        )
    for name, residual in residuals.items():
        checks.append(InvariantCheck(
            name=name,
            residual=float(residual),
            tolerance=tol,
            passed=bool(residual < tol),
        ))
    overall = all(c.passed for c in checks)
    if not overall:
        failed = [c.name for c in checks if not c.passed]
        log.info(f"Frame {frame.descriptor.kind.value} failed checks: {failed}")
    return FrameValidationReport(checks=checks, overall=overall)

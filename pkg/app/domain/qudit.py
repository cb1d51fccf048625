"""Single-qudit algebra for odd prime dimension.

Weyl operators W_{p,q} = Z^p X^q with X|x> = |x+1> and Z|x> = w^x |x>,
the Clifford generators, the d(d+1) stabiliser states, the canonical
qutrit magic states and the depolarising channel.
"""
import logging
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Sequence

import numpy as np

from app.config import Configuration
from app.domain.entities import (
    Dimension,
    Operator,
    Role,
    StabilizerStateSet,
    WeylIndex,
)
from app.errors import (
    InvalidInputError,
    InvalidParameterError,
    UnsupportedDimensionError,
)

conf = Configuration()
log = logging.getLogger(__name__)


class MagicKind(str, Enum):
    STRANGE = "strange"
    NORRELL = "norrell"
    CUSTOM = "custom"


@lru_cache(maxsize=None)
def _shift(d: int) -> np.ndarray:
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def weyl_matrix(dim: Dimension, p: int, q: int) -> np.ndarray:
    d = dim.d
    x = np.arange(d)
    clock = np.exp(2j * np.pi * ((p * x) % d) / d)
    shift = np.roll(np.eye(d, dtype=complex), q % d, axis=0)
    return clock[:, None] * shift


@lru_cache(maxsize=None)
def weyl_stack(dim: Dimension) -> np.ndarray:
    """All d^2 Weyl matrices, indexed by p * d + q."""
    stack = np.array([
        weyl_matrix(dim, idx.p, idx.q) for idx in weyl_indices(dim)
    ])
    stack.setflags(write=False)
    return stack


def weyl_indices(dim: Dimension) -> List[WeylIndex]:
    return [WeylIndex(p=p, q=q) for p in range(dim.d) for q in range(dim.d)]


def weyl_operator(dim: Dimension, idx: WeylIndex) -> Operator:
    idx = idx.reduced(dim)
    return Operator(
        dim=dim,
        entries=weyl_matrix(dim, idx.p, idx.q),
        role=Role.UNITARY
    )


def fourier_matrix(dim: Dimension) -> np.ndarray:
    d = dim.d
    k = np.arange(d)
    return np.exp(2j * np.pi * (np.outer(k, k) % d) / d) / np.sqrt(d)


def phase_matrix(dim: Dimension) -> np.ndarray:
    d = dim.d
    x = np.arange(d)
    return np.diag(np.exp(2j * np.pi * ((dim.half * x * x) % d) / d))


def clifford_generators(dim: Dimension) -> List[Operator]:
    """Fourier gate, quadratic phase gate, X and Z."""
    mats = [
        fourier_matrix(dim),
        phase_matrix(dim),
        weyl_matrix(dim, 0, 1),
        weyl_matrix(dim, 1, 0),
    ]
    return [Operator(dim=dim, entries=m, role=Role.UNITARY) for m in mats]


def _fix_phase(vec: np.ndarray) -> np.ndarray:
    vec = vec / np.linalg.norm(vec)
    lead = vec[np.argmax(np.abs(vec) > conf.validation_tol)]
    return vec * (abs(lead) / lead)


@lru_cache(maxsize=None)
def stabilizer_bases(dim: Dimension) -> np.ndarray:
    """Unitaries whose columns are the d+1 stabiliser bases."""
    d = dim.d
    bases = [np.eye(d, dtype=complex)]
    for a in range(d):
        m = _shift(d) @ np.linalg.matrix_power(weyl_matrix(dim, 1, 0), a)
        vals, vecs = np.linalg.eig(m)
        angles = np.round(np.mod(np.angle(vals), 2 * np.pi), 9)
        order = np.argsort(angles, kind="stable")
        basis = np.column_stack([_fix_phase(vecs[:, k]) for k in order])
        bases.append(basis)
    stack = np.array(bases)
    stack.setflags(write=False)
    return stack


def stabilizer_states(dim: Dimension) -> StabilizerStateSet:
    bases = stabilizer_bases(dim)
    states = [
        pure_state(dim, basis[:, k])
        for basis in bases
        for k in range(dim.d)
    ]
    log.debug(f"Enumerated {len(states)} stabiliser states for d={dim.d}")
    return StabilizerStateSet(dim=dim, bases=bases, states=states)


def pure_state(dim: Dimension, vec: Sequence[complex]) -> Operator:
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (dim.d,):
        raise InvalidInputError(
            f"State vector must have {dim.d} components, got {vec.shape}"
        )
    norm = np.linalg.norm(vec)
    if norm < conf.construction_tol:
        raise InvalidInputError("State vector can not be zero")
    vec = vec / norm
    return Operator(dim=dim, entries=np.outer(vec, vec.conj()), role=Role.STATE)


def maximally_mixed(dim: Dimension) -> Operator:
    return Operator(dim=dim, entries=np.eye(dim.d) / dim.d, role=Role.STATE)


def unit_effect(dim: Dimension) -> Operator:
    return Operator(dim=dim, entries=np.eye(dim.d), role=Role.EFFECT)


def magic_state(
    kind: MagicKind,
    dim: Dimension,
    custom_vec: Optional[Sequence[complex]] = None
) -> Operator:
    kind = MagicKind(kind)
    if (kind is MagicKind.CUSTOM) != (custom_vec is not None):
        raise InvalidInputError(
            "A custom vector is required for, and only for, kind=custom"
        )
    if kind is MagicKind.CUSTOM:
        return pure_state(dim, custom_vec)
    if dim.d != 3:
        raise UnsupportedDimensionError(
            f"The {kind.value} state is only defined for d=3, got d={dim.d}"
        )
    if kind is MagicKind.STRANGE:
        return pure_state(dim, [0, 1, -1])
    return pure_state(dim, [-1, 2, -1])


def depolarize(rho: Operator, p: float) -> Operator:
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"Noise p={p} outside [0, 1]")
    d = rho.d
    return Operator(
        dim=rho.dim,
        entries=(1 - p) * rho.entries + p * np.eye(d) / d,
        role=Role.STATE
    )


def random_state(dim: Dimension, seed: int) -> Operator:
    rng = np.random.default_rng(seed)
    d = dim.d
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    rho = (rho + rho.conj().T) / 2
    return Operator(dim=dim, entries=rho / np.trace(rho).real, role=Role.STATE)


def random_unitary(dim: Dimension, seed: int) -> Operator:
    rng = np.random.default_rng(seed)
    d = dim.d
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return Operator(dim=dim, entries=q * (diag / np.abs(diag)), role=Role.UNITARY)

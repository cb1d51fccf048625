"""Quasiprobability representations in an exact frame.

mu(l | rho) = Tr(F_l rho), xi(E | l) = Tr(E D_l) and
Gamma(l' | l) = Tr(F_l' E(D_l)) for a channel E.
"""
import itertools
import logging
from concurrent.futures import Executor
from typing import List, Optional, Sequence, Union

import numpy as np

from app.config import Configuration
from app.domain.entities import (
    Channel,
    Dimension,
    ExactFrame,
    OperationalSet,
    Operator,
    QuasiDistribution,
    Role,
    Scope,
    Subject,
)
from app.domain.frames import Basis, as_basis
from app.domain.qudit import (
    clifford_generators,
    depolarize,
    stabilizer_states,
    unit_effect,
    weyl_stack,
)
from app.errors import (
    DimensionMismatchError,
    InvalidInputError,
    InvalidParameterError,
    InvalidPOVMError,
)

conf = Configuration()
log = logging.getLogger(__name__)

ChannelLike = Union[Channel, Operator, Sequence[np.ndarray]]


def _check_dim(frame: ExactFrame, op: Operator):
    if frame.dim.d != op.d:
        raise DimensionMismatchError(
            f"Frame of dimension {frame.dim.d} can not represent "
            f"an operator of dimension {op.d}"
        )


def represent_state(frame: ExactFrame, rho: Operator) -> QuasiDistribution:
    _check_dim(frame, rho)
    return QuasiDistribution(
        labels=frame.labels,
        values=np.einsum("lab,ba->l", frame.analysis, rho.entries),
        subject=Subject.STATE,
    )


def represent_effect(frame: ExactFrame, effect: Operator) -> QuasiDistribution:
    _check_dim(frame, effect)
    return QuasiDistribution(
        labels=frame.labels,
        values=np.einsum("ab,lba->l", effect.entries, frame.synthesis),
        subject=Subject.EFFECT,
    )


def identity_channel(dim: Dimension) -> Channel:
    return Channel(name="identity", dim=dim, kraus=np.eye(dim.d))


def unitary_channel(u: Operator, name: str = "unitary") -> Channel:
    return Channel(name=name, dim=u.dim, kraus=u.entries)


def depolarizing_channel(dim: Dimension, p: float) -> Channel:
    """Kraus form of rho -> (1-p) rho + p 1/d via the Weyl twirl."""
    if not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"Noise p={p} outside [0, 1]")
    n = dim.size
    weights = np.full(n, np.sqrt(p / n))
    weights[0] = np.sqrt(1 - p + p / n)
    return Channel(
        name=f"depolarizing({p})",
        dim=dim,
        kraus=weights[:, None, None] * weyl_stack(dim),
    )


def compose_channels(first: Channel, second: Channel) -> Channel:
    """second after first."""
    kraus = np.einsum("jab,ibc->jiac", second.kraus, first.kraus)
    d = first.dim.d
    return Channel(
        name=f"{second.name}*{first.name}",
        dim=first.dim,
        kraus=kraus.reshape(-1, d, d),
    )


def as_channel(channel: ChannelLike, dim: Dimension) -> Channel:
    if isinstance(channel, Channel):
        return channel
    if isinstance(channel, Operator):
        return unitary_channel(channel)
    return Channel(name="kraus", dim=dim, kraus=np.asarray(channel))


def represent_channel(
    frame_in: ExactFrame,
    frame_out: ExactFrame,
    channel: ChannelLike
) -> QuasiDistribution:
    if frame_in.dim.d != frame_out.dim.d:
        raise DimensionMismatchError("Input and output frames differ in dimension")
    channel = as_channel(channel, frame_in.dim)
    if channel.dim.d != frame_in.dim.d:
        raise DimensionMismatchError(
            f"Channel of dimension {channel.dim.d} does not match the frames"
        )
    k = channel.kraus
    images = np.einsum("kab,lbc,kdc->lad", k, frame_in.synthesis, k.conj())
    gamma = np.einsum("mab,lba->ml", frame_out.analysis, images)
    return QuasiDistribution(
        labels=[m + n for m in frame_out.labels for n in frame_in.labels],
        values=gamma,
        subject=Subject.CHANNEL,
    )


def kd_matrix(rho: Operator, basis_a: Basis, basis_b: Basis) -> QuasiDistribution:
    """rho_ij = <b_j|a_i><a_i|rho|b_j>."""
    a, b = as_basis(basis_a), as_basis(basis_b)
    if a.shape != rho.entries.shape or b.shape != rho.entries.shape:
        raise DimensionMismatchError("Bases and state differ in dimension")
    overlaps = b.conj().T @ a
    inner = a.conj().T @ rho.entries @ b
    d = rho.d
    return QuasiDistribution(
        labels=[(i, j) for i in range(d) for j in range(d)],
        values=(overlaps.T * inner).reshape(-1),
        subject=Subject.STATE,
    )


def kd_sequential(rho: Operator, bases: Sequence[Basis]) -> QuasiDistribution:
    """Sequential KD distribution of k non-degenerate observables.

    rho_{i1..ik} = <a^k|a^(k-1)> ... <a^2|a^1> <a^1|rho|a^k>.
    """
    if not len(bases):
        raise InvalidInputError("At least one basis is required")
    mats = [as_basis(b) for b in bases]
    d, k = rho.d, len(mats)
    if any(m.shape != (d, d) for m in mats):
        raise DimensionMismatchError("Bases and state differ in dimension")
    if k == 1:
        values = np.diag(mats[0].conj().T @ rho.entries @ mats[0])
    else:
        chain = np.ones(d, dtype=complex)
        for m in range(k - 1):
            overlap = mats[m + 1].conj().T @ mats[m]
            chain = np.einsum("...i,ji->...ij", chain, overlap)
        inner = mats[0].conj().T @ rho.entries @ mats[-1]
        values = chain * inner.reshape((d,) + (1,) * (k - 2) + (d,))
    return QuasiDistribution(
        labels=list(itertools.product(range(d), repeat=k)),
        values=values.reshape(-1),
        subject=Subject.STATE,
    )


def _povm_stack(povm, d: int) -> np.ndarray:
    elements = np.array([
        e.entries if isinstance(e, Operator) else np.asarray(e, dtype=complex)
        for e in povm
    ])
    if not len(elements) or elements.shape[1:] != (d, d):
        raise InvalidPOVMError(f"POVM elements must be {d}x{d} matrices")
    total = np.max(np.abs(elements.sum(axis=0) - np.eye(d)))
    if total > conf.validation_tol:
        raise InvalidPOVMError(
            f"POVM elements do not sum to identity (deviation {total:.3e})"
        )
    for e in elements:
        if np.max(np.abs(e - e.conj().T)) > conf.validation_tol:
            raise InvalidPOVMError("POVM element is not Hermitian")
        low = np.linalg.eigvalsh(e)[0]
        if low < -conf.validation_tol:
            raise InvalidPOVMError(
                f"POVM element has negative eigenvalue {low:.3e}"
            )
    return elements


def kd_povm(rho: Operator, povms: Sequence[Sequence]) -> QuasiDistribution:
    """Tr(M_{i_k} ... M_{i_1} rho) for a sequence of POVMs."""
    if not len(povms):
        raise InvalidInputError("At least one POVM is required")
    d = rho.d
    stacks = [_povm_stack(povm, d) for povm in povms]
    current = rho.entries[None, :, :]
    for elements in stacks:
        current = np.einsum("nab,tbc->tnac", elements, current).reshape(-1, d, d)
    return QuasiDistribution(
        labels=list(itertools.product(*[range(len(s)) for s in stacks])),
        values=np.einsum("taa->t", current),
        subject=Subject.STATE,
    )


def _values(dist: Union[QuasiDistribution, np.ndarray]) -> np.ndarray:
    if isinstance(dist, QuasiDistribution):
        return dist.values
    return np.asarray(dist, dtype=complex)


def kd_negativity(dist: QuasiDistribution) -> float:
    """1 - sum |rho|: zero for classical distributions, negative otherwise."""
    return float(1 - np.sum(np.abs(_values(dist))))


def negativity_magnitude(dist: QuasiDistribution) -> float:
    return float(np.sum(np.abs(_values(dist))) - 1)


def penalty(dist: Union[QuasiDistribution, np.ndarray]) -> float:
    """Total imaginarity plus total negativity."""
    values = _values(dist)
    return float(
        np.sum(np.abs(values.imag)) + np.sum(np.abs(np.minimum(0.0, values.real)))
    )


def is_classical(
    dist: Union[QuasiDistribution, np.ndarray],
    tol: Optional[float] = None
) -> bool:
    tol = conf.classification_tol if tol is None else tol
    values = _values(dist)
    return bool(
        np.max(np.abs(values.imag)) < tol and np.min(values.real) > -tol
    )


def build_operational_set(
    dim: Dimension,
    magic: Optional[Operator],
    p: float
) -> OperationalSet:
    """Stabiliser states, Clifford and noise channels, MUB effects.

    The depolarised magic state joins the states when ``magic`` is given.
    """
    stab = stabilizer_states(dim)
    states: List[Operator] = list(stab.states)
    noisy = None
    if magic is not None:
        noisy = depolarize(magic, p)
        states.append(noisy)
    channels = [identity_channel(dim), depolarizing_channel(dim, p)]
    channels += [
        unitary_channel(u, name=name)
        for u, name in zip(clifford_generators(dim), ("F", "S", "X", "Z"))
    ]
    effects = [
        Operator(dim=dim, entries=s.entries, role=Role.EFFECT)
        for s in stab.states
    ]
    effects.append(unit_effect(dim))
    return OperationalSet(
        dim=dim,
        p=p,
        magic=noisy,
        states=states,
        channels=channels,
        effects=effects,
    )


def omega(
    p: float,
    frame: ExactFrame,
    opset: OperationalSet,
    scope: Scope = Scope.STATE,
    executor: Optional[Executor] = None
) -> float:
    """Largest penalty over the operational set represented in ``frame``."""
    if opset.p != p:
        raise InvalidParameterError(
            f"Operational set built for p={opset.p}, evaluated at p={p}"
        )
    if Scope(scope) is Scope.STATE:
        if opset.magic is None:
            raise InvalidInputError("State scope needs a magic state")
        return penalty(represent_state(frame, opset.magic))

    jobs = [(represent_state, s) for s in opset.states]
    jobs += [(represent_effect, e) for e in opset.effects]

    def evaluate(job) -> float:
        fn, obj = job
        return penalty(fn(frame, obj))

    def evaluate_channel(channel: Channel) -> float:
        return penalty(represent_channel(frame, frame, channel))

    if executor is None:
        values = [evaluate(j) for j in jobs]
        values += [evaluate_channel(c) for c in opset.channels]
    else:
        values = list(executor.map(evaluate, jobs))
        values += list(executor.map(evaluate_channel, opset.channels))
    return max(values)

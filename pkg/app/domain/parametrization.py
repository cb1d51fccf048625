"""Real parametrization of d x d unitaries through anti-Hermitian generators.

A parameter vector of length d^2 holds the d imaginary diagonal entries
followed by (re, im) pairs of the strict upper triangle in
``np.triu_indices`` order.
"""
from typing import Sequence

import numpy as np
from scipy import linalg

from app.domain.entities import Dimension, Operator, Role
from app.errors import InvalidParameterError


def generator_from_params(params: Sequence[float], d: int) -> np.ndarray:
    params = np.asarray(params, dtype=float)
    if params.shape != (d * d,):
        raise InvalidParameterError(
            f"Expected {d * d} parameters, got {params.size}"
        )
    gen = np.zeros((d, d), dtype=complex)
    gen[np.diag_indices(d)] = 1j * params[:d]
    rows, cols = np.triu_indices(d, 1)
    upper = params[d::2] + 1j * params[d + 1::2]
    gen[rows, cols] = upper
    gen[cols, rows] = -upper.conj()
    return gen


def unitary_matrix(params: Sequence[float], d: int) -> np.ndarray:
    """exp(A) for the anti-Hermitian A built from ``params``.

    Uses the spectral decomposition of the Hermitian -iA so the result is
    unitary to machine precision for any parameter magnitude.
    """
    herm = -1j * generator_from_params(params, d)
    herm = (herm + herm.conj().T) / 2
    vals, vecs = linalg.eigh(herm)
    return (vecs * np.exp(1j * vals)) @ vecs.conj().T


def unitary_from_params(params: Sequence[float], dim: Dimension) -> Operator:
    return Operator(
        dim=dim,
        entries=unitary_matrix(params, dim.d),
        role=Role.UNITARY
    )


def params_from_unitary(u: np.ndarray) -> np.ndarray:
    """Inverse of ``unitary_matrix`` up to the branch of the logarithm."""
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    schur_form, basis = linalg.schur(u, output="complex")
    phases = np.angle(np.diag(schur_form))
    gen = (basis * (1j * phases)) @ basis.conj().T
    gen = (gen - gen.conj().T) / 2
    rows, cols = np.triu_indices(d, 1)
    upper = gen[rows, cols]
    params = np.empty(d * d)
    params[:d] = np.diag(gen).imag
    params[d::2] = upper.real
    params[d + 1::2] = upper.imag
    return params

import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from app.domain.entities import Dimension, Operator, Role, WeylIndex
from app.domain.qudit import (
    MagicKind,
    clifford_generators,
    depolarize,
    fourier_matrix,
    magic_state,
    maximally_mixed,
    random_state,
    random_unitary,
    stabilizer_states,
    weyl_matrix,
    weyl_operator,
    weyl_stack,
)
from app.errors import (
    InvalidInputError,
    InvalidOperatorError,
    InvalidParameterError,
    UnsupportedDimensionError,
)

OMEGA3 = np.exp(2j * np.pi / 3)


@pytest.mark.parametrize("d", [1, 2, 4, 9, 11])
def test_dimension_rejects_unsupported(d):
    with pytest.raises(UnsupportedDimensionError):
        Dimension(d=d)


def test_state_role_rejects_bad_trace(qutrit):
    with pytest.raises(InvalidOperatorError):
        Operator(dim=qutrit, entries=np.eye(3), role=Role.STATE)


def test_unitary_role_rejects_non_unitary(qutrit):
    with pytest.raises(InvalidOperatorError):
        Operator(dim=qutrit, entries=2 * np.eye(3), role=Role.UNITARY)


def test_operator_entries_read_only(qutrit):
    op = maximally_mixed(qutrit)
    with pytest.raises(ValueError):
        op.entries[0, 0] = 1


def test_weyl_identity(qutrit):
    op = weyl_operator(qutrit, WeylIndex(p=0, q=0))
    assert np.allclose(op.entries, np.eye(3))


def test_weyl_clock(qutrit):
    op = weyl_operator(qutrit, WeylIndex(p=1, q=0))
    assert np.allclose(op.entries, np.diag([1, OMEGA3, OMEGA3 ** 2]))


def test_weyl_clock_times_shift(qutrit):
    shift = np.zeros((3, 3))
    for x in range(3):
        shift[(x + 1) % 3, x] = 1
    expected = np.diag([1, OMEGA3, OMEGA3 ** 2]) @ shift
    assert np.allclose(weyl_operator(qutrit, WeylIndex(p=1, q=1)).entries, expected)


def test_weyl_index_reduced(qutrit):
    op = weyl_operator(qutrit, WeylIndex(p=4, q=-1))
    assert np.allclose(op.entries, weyl_matrix(qutrit, 1, 2))


def test_weyl_composition_exhaustive(qutrit):
    d = 3
    for p in range(d):
        for q in range(d):
            for p2 in range(d):
                for q2 in range(d):
                    lhs = weyl_matrix(qutrit, p, q) @ weyl_matrix(qutrit, p2, q2)
                    rhs = OMEGA3 ** (-q * p2) * weyl_matrix(qutrit, p + p2, q + q2)
                    assert np.max(np.abs(lhs - rhs)) < 1e-12


@given(
    st.sampled_from([5, 7]),
    st.integers(0, 6), st.integers(0, 6), st.integers(0, 6), st.integers(0, 6),
)
def test_weyl_composition_sampled(d, p, q, p2, q2):
    dim = Dimension(d=d)
    omega = np.exp(2j * np.pi / d)
    lhs = weyl_matrix(dim, p, q) @ weyl_matrix(dim, p2, q2)
    rhs = omega ** (-q * p2) * weyl_matrix(dim, p + p2, q + q2)
    assert np.max(np.abs(lhs - rhs)) < 1e-12


@pytest.mark.parametrize("d", [3, 5, 7])
def test_weyl_unitary(d):
    for w in weyl_stack(Dimension(d=d)):
        assert np.max(np.abs(w.conj().T @ w - np.eye(d))) < 1e-12


def _weyl_image(dim, m):
    """(index, phase) with m = phase * W_index, or None."""
    for k, w in enumerate(weyl_stack(dim)):
        c = np.trace(w.conj().T @ m) / dim.d
        if abs(abs(c) - 1) < 1e-10 and np.max(np.abs(m - c * w)) < 1e-10:
            return k, c
    return None


def test_clifford_generators_normalise_weyl_group(qutrit):
    gens = clifford_generators(qutrit)
    assert len(gens) >= 2
    for u in gens:
        for w in weyl_stack(qutrit):
            assert _weyl_image(qutrit, u.entries @ w @ u.dagger()) is not None


def test_fourier_maps_shift_to_clock(qutrit):
    f = fourier_matrix(qutrit)
    image = f @ weyl_matrix(qutrit, 0, 1) @ f.conj().T
    k, _ = _weyl_image(qutrit, image)
    p, q = divmod(k, 3)
    assert q == 0 and p != 0


@pytest.mark.parametrize("d", [3, 5, 7])
def test_stabilizer_states_form_mubs(d):
    dim = Dimension(d=d)
    stab = stabilizer_states(dim)
    assert len(stab.states) == d * (d + 1)
    bases = stab.bases
    assert bases.shape == (d + 1, d, d)
    for g in range(d + 1):
        gram = bases[g].conj().T @ bases[g]
        assert np.max(np.abs(gram - np.eye(d))) < 1e-12
        for h in range(g + 1, d + 1):
            overlaps = np.abs(bases[g].conj().T @ bases[h]) ** 2
            assert np.max(np.abs(overlaps - 1 / d)) < 1e-12


@pytest.mark.parametrize("d", [3, 5])
def test_stabilizer_states_are_weyl_eigenvectors(d):
    dim = Dimension(d=d)
    stab = stabilizer_states(dim)
    roots = np.exp(2j * np.pi * np.arange(d) / d)
    for g in range(d + 1):
        generator = weyl_matrix(dim, 1, 0) if g == 0 else weyl_matrix(dim, g - 1, 1)
        for k in range(d):
            vec = stab.bases[g][:, k]
            image = generator @ vec
            eig = np.vdot(vec, image)
            assert np.min(np.abs(roots - eig)) < 1e-10
            assert np.linalg.norm(image - eig * vec) < 1e-10


def test_stabilizer_phase_convention(qutrit):
    for basis in stabilizer_states(qutrit).bases:
        for k in range(3):
            vec = basis[:, k]
            lead = vec[np.argmax(np.abs(vec) > 1e-10)]
            assert abs(lead.imag) < 1e-12 and lead.real > 0


def test_strange_state_projector(strange):
    vec = np.array([0, 1, -1]) / np.sqrt(2)
    assert np.allclose(strange.entries, np.outer(vec, vec))
    assert abs(np.trace(strange.entries @ strange.entries) - 1) < 1e-12


def test_norrell_state_projector(norrell):
    vec = np.array([-1, 2, -1]) / np.sqrt(6)
    assert np.allclose(norrell.entries, np.outer(vec, vec))


def test_custom_state(qutrit):
    rho = magic_state(MagicKind.CUSTOM, qutrit, [1, 0, 0])
    assert np.allclose(rho.entries, np.diag([1, 0, 0]))


def test_named_states_only_for_qutrits():
    with pytest.raises(UnsupportedDimensionError):
        magic_state(MagicKind.STRANGE, Dimension(d=5))


def test_zero_custom_vector(qutrit):
    with pytest.raises(InvalidInputError):
        magic_state(MagicKind.CUSTOM, qutrit, [0, 0, 0])


def test_custom_vector_required(qutrit):
    with pytest.raises(InvalidInputError):
        magic_state(MagicKind.CUSTOM, qutrit)


def test_depolarize_endpoints(strange):
    assert np.allclose(depolarize(strange, 0).entries, strange.entries)
    assert np.allclose(depolarize(strange, 1).entries, np.eye(3) / 3)


def test_depolarize_basis_state(qutrit):
    rho = magic_state(MagicKind.CUSTOM, qutrit, [1, 0, 0])
    assert np.allclose(depolarize(rho, 0.5).entries, np.diag([2 / 3, 1 / 6, 1 / 6]))


@pytest.mark.parametrize("p", [-0.1, 1.5])
def test_depolarize_rejects_noise(strange, p):
    with pytest.raises(InvalidParameterError):
        depolarize(strange, p)


@given(st.floats(0, 1), st.floats(0, 1), st.integers(0, 1000))
def test_depolarize_affine(alpha, p, seed):
    dim = Dimension(d=3)
    rho1, rho2 = random_state(dim, seed), random_state(dim, seed + 1)
    mixed = Operator(
        dim=dim,
        entries=alpha * rho1.entries + (1 - alpha) * rho2.entries,
        role=Role.STATE,
    )
    lhs = depolarize(mixed, p).entries
    rhs = alpha * depolarize(rho1, p).entries + (1 - alpha) * depolarize(rho2, p).entries
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_random_fixtures_deterministic(qutrit):
    assert np.array_equal(random_state(qutrit, 3).entries, random_state(qutrit, 3).entries)
    u = random_unitary(qutrit, 3)
    assert np.array_equal(u.entries, random_unitary(qutrit, 3).entries)
    assert np.max(np.abs(u.dagger() @ u.entries - np.eye(3))) < 1e-12
    assert np.linalg.eigvalsh(random_state(qutrit, 4).entries)[0] >= -1e-10

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from app.domain.entities import (
    Channel,
    Dimension,
    Operator,
    QuasiDistribution,
    Role,
    Scope,
    Subject,
)
from app.domain.frames import canonical_mub_frame, gross_wigner_frame, kd_frame
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
    unit_effect,
)
from app.domain.representations import (
    build_operational_set,
    compose_channels,
    depolarizing_channel,
    identity_channel,
    is_classical,
    kd_matrix,
    kd_negativity,
    kd_povm,
    kd_sequential,
    negativity_magnitude,
    omega,
    penalty,
    represent_channel,
    represent_effect,
    represent_state,
    unitary_channel,
)
from app.errors import (
    DimensionMismatchError,
    InvalidBasisError,
    InvalidChannelError,
    InvalidInputError,
    InvalidParameterError,
    InvalidPOVMError,
)


def _projectors(basis):
    return [np.outer(basis[:, i], basis[:, i].conj()) for i in range(basis.shape[1])]


def _dist(values):
    values = np.asarray(values, dtype=complex)
    return QuasiDistribution(
        labels=[(i,) for i in range(len(values))],
        values=values,
        subject=Subject.STATE,
    )


def test_state_representation_normalised(qutrit):
    rho = random_state(qutrit, 1)
    for frame in (gross_wigner_frame(qutrit), canonical_mub_frame(qutrit)):
        assert abs(np.sum(represent_state(frame, rho).values) - 1) < 1e-10


def test_kd_uniform_on_maximally_mixed(qutrit):
    values = represent_state(canonical_mub_frame(qutrit), maximally_mixed(qutrit)).values
    assert np.allclose(values, 1 / 9)


def test_strange_state_wigner_negative(qutrit, strange):
    values = represent_state(gross_wigner_frame(qutrit), strange).values
    assert values.real.min() == pytest.approx(-1 / 3, abs=1e-12)


def test_dimension_mismatch(strange):
    with pytest.raises(DimensionMismatchError):
        represent_state(gross_wigner_frame(Dimension(d=5)), strange)


def test_unit_and_zero_effects(qutrit):
    for frame in (gross_wigner_frame(qutrit), canonical_mub_frame(qutrit)):
        assert np.allclose(represent_effect(frame, unit_effect(qutrit)).values, 1)
        zero = Operator(dim=qutrit, entries=np.zeros((3, 3)), role=Role.EFFECT)
        assert np.allclose(represent_effect(frame, zero).values, 0)


def test_gross_effect_is_scaled_wigner(qutrit):
    frame = gross_wigner_frame(qutrit)
    ket0 = np.diag([1.0, 0, 0])
    effect = represent_effect(frame, Operator(dim=qutrit, entries=ket0, role=Role.EFFECT))
    state = represent_state(frame, Operator(dim=qutrit, entries=ket0, role=Role.STATE))
    assert np.allclose(effect.values, 3 * state.values)


def test_identity_channel_representation(qutrit):
    for frame in (gross_wigner_frame(qutrit), canonical_mub_frame(qutrit)):
        gamma = represent_channel(frame, frame, identity_channel(qutrit))
        assert gamma.subject is Subject.CHANNEL
        assert np.max(np.abs(gamma.values - np.eye(9))) < 1e-10
        assert len(gamma.labels) == 81
        assert gamma.labels[1] == (0, 0, 0, 1)


def test_depolarizing_channel_in_gross_frame(qutrit):
    frame = gross_wigner_frame(qutrit)
    p = 0.3
    gamma = represent_channel(frame, frame, depolarizing_channel(qutrit, p)).values
    expected = (1 - p) * np.eye(9) + p / 9 * np.ones((9, 9))
    assert np.max(np.abs(gamma - expected)) < 1e-10


def test_channel_columns_sum_to_one(qutrit):
    frame = canonical_mub_frame(qutrit)
    gamma = represent_channel(frame, frame, random_unitary(qutrit, 2)).values
    assert np.allclose(gamma.sum(axis=0), 1, atol=1e-10)


def test_channel_functoriality(qutrit):
    frame = canonical_mub_frame(qutrit)
    first = unitary_channel(random_unitary(qutrit, 3))
    second = depolarizing_channel(qutrit, 0.2)
    composed = represent_channel(frame, frame, compose_channels(first, second)).values
    product = (
        represent_channel(frame, frame, second).values
        @ represent_channel(frame, frame, first).values
    )
    assert np.max(np.abs(composed - product)) < 1e-10


def test_non_trace_preserving_kraus(qutrit):
    with pytest.raises(InvalidChannelError):
        Channel(name="lossy", dim=qutrit, kraus=0.5 * np.eye(3))


def test_depolarizing_channel_rejects_noise(qutrit):
    with pytest.raises(InvalidParameterError):
        depolarizing_channel(qutrit, 1.2)


def test_depolarizing_channel_matches_depolarize(qutrit):
    rho = random_state(qutrit, 5)
    channel = depolarizing_channel(qutrit, 0.4)
    assert np.allclose(channel.apply(rho.entries), depolarize(rho, 0.4).entries)


def test_kd_matrix_eigenstate_row(qutrit):
    a, b = np.eye(3, dtype=complex), fourier_matrix(qutrit)
    rho = magic_state(MagicKind.CUSTOM, qutrit, [1, 0, 0])
    values = kd_matrix(rho, a, b).values.reshape(3, 3)
    assert np.allclose(values[0], np.abs(b[0]) ** 2)
    assert np.allclose(values[1:], 0)


def test_kd_matrix_marginals(qutrit):
    a, b = random_unitary(qutrit, 11).entries, fourier_matrix(qutrit)
    rho = random_state(qutrit, 11)
    values = kd_matrix(rho, a, b).values.reshape(3, 3)
    born_a = np.real(np.diag(a.conj().T @ rho.entries @ a))
    born_b = np.real(np.diag(b.conj().T @ rho.entries @ b))
    assert np.max(np.abs(values.sum(axis=1) - born_a)) < 1e-12
    assert np.max(np.abs(values.sum(axis=0) - born_b)) < 1e-12
    assert abs(values.sum() - 1) < 1e-12


def test_kd_matrix_matches_frame(qutrit):
    a, b = random_unitary(qutrit, 12), random_unitary(qutrit, 13)
    rho = random_state(qutrit, 14)
    direct = kd_matrix(rho, a, b).values
    framed = represent_state(kd_frame(a, b), rho).values
    assert np.max(np.abs(direct - framed)) < 1e-12


def test_kd_matrix_rejects_non_orthonormal(qutrit, strange):
    with pytest.raises(InvalidBasisError):
        kd_matrix(strange, 2 * np.eye(3), np.eye(3))


def test_kd_sequential_born_rule(qutrit):
    rho = random_state(qutrit, 21)
    b = fourier_matrix(qutrit)
    values = kd_sequential(rho, [b]).values
    assert np.allclose(values, np.diag(b.conj().T @ rho.entries @ b))


def test_kd_sequential_empty(strange):
    with pytest.raises(InvalidInputError):
        kd_sequential(strange, [])


def test_kd_three_forms_agree(qutrit):
    a, b = random_unitary(qutrit, 31).entries, fourier_matrix(qutrit)
    for seed in range(50):
        rho = random_state(qutrit, seed)
        matrix = kd_matrix(rho, a, b).values
        sequential = kd_sequential(rho, [a, b]).values
        povm = kd_povm(rho, [_projectors(a), _projectors(b)]).values
        assert np.max(np.abs(matrix - sequential)) < 1e-12
        assert np.max(np.abs(sequential - povm)) < 1e-12


def test_kd_sequential_three_steps(qutrit, strange):
    bases = [np.eye(3, dtype=complex), fourier_matrix(qutrit), np.eye(3, dtype=complex)]
    sequential = kd_sequential(strange, bases)
    povm = kd_povm(strange, [_projectors(m) for m in bases])
    assert len(sequential.labels) == 27
    assert np.max(np.abs(sequential.values - povm.values)) < 1e-12
    assert abs(np.sum(povm.values) - 1) < 1e-10


def test_kd_povm_trivial(strange):
    values = kd_povm(strange, [[np.eye(3)], [np.eye(3)]]).values
    assert values.shape == (1,)
    assert values[0] == pytest.approx(1)


def test_kd_povm_invalid(strange):
    with pytest.raises(InvalidPOVMError):
        kd_povm(strange, [[np.eye(3), np.eye(3)]])
    with pytest.raises(InvalidPOVMError):
        kd_povm(strange, [[np.diag([2.0, 1, 1]), np.diag([-1.0, 0, 0])]])


def test_kd_negativity():
    assert kd_negativity(_dist(np.full(9, 1 / 9))) == pytest.approx(0, abs=1e-15)
    assert kd_negativity(_dist([1.1, -0.1])) == pytest.approx(-0.2)
    assert negativity_magnitude(_dist([1.1, -0.1])) == pytest.approx(0.2)


def test_kd_negativity_of_strange_state(qutrit, strange):
    assert kd_negativity(represent_state(gross_wigner_frame(qutrit), strange)) < 0


@pytest.mark.parametrize(
    "values, expected",
    [
        ([0.5, 0.5, 0, 0], 0.0),
        ([-0.2, 0.6, 0.6], 0.2),
        ([0.1 + 0.3j, -0.05, 0, 0], 0.35),
    ],
)
def test_penalty(values, expected):
    assert penalty(_dist(values)) == pytest.approx(expected)


def test_is_classical_both_ways():
    assert is_classical(_dist([0.5, 0.5, 0]))
    assert is_classical(_dist([0.5, 0.5 + 1e-13j, -1e-13]))
    assert not is_classical(_dist([0.5, 0.5 + 1e-11j, 0]))
    assert not is_classical(_dist([0.6, 0.5, -1e-11]))


def test_gross_nonnegative_on_stabilizer_subtheory(qutrit):
    frame = gross_wigner_frame(qutrit)
    for state in stabilizer_states(qutrit).states:
        assert penalty(represent_state(frame, state)) < 1e-12
        effect = Operator(dim=qutrit, entries=state.entries, role=Role.EFFECT)
        assert penalty(represent_effect(frame, effect)) < 1e-12
    for u in clifford_generators(qutrit):
        assert penalty(represent_channel(frame, frame, u)) < 1e-12


def test_magic_states_negative_in_gross(qutrit, strange, norrell):
    frame = gross_wigner_frame(qutrit)
    assert penalty(represent_state(frame, strange)) > 0.01
    assert penalty(represent_state(frame, norrell)) > 0.01


@pytest.mark.parametrize("p", [0.0, 0.4, 1.0])
def test_omega_stabilizer_only_gross(qutrit, p):
    opset = build_operational_set(qutrit, None, p)
    assert opset.magic is None
    assert omega(p, gross_wigner_frame(qutrit), opset, Scope.SUBTHEORY) < 1e-12


def test_omega_subtheory_is_magic_term_at_zero_noise(qutrit, strange):
    frame = gross_wigner_frame(qutrit)
    opset = build_operational_set(qutrit, strange, 0.0)
    expected = penalty(represent_state(frame, strange))
    assert omega(0.0, frame, opset, Scope.SUBTHEORY) == pytest.approx(expected, abs=1e-12)


def test_omega_state_scope_at_full_noise(qutrit, strange):
    opset = build_operational_set(qutrit, strange, 1.0)
    frame = kd_frame(random_unitary(qutrit, 40), random_unitary(qutrit, 41))
    assert omega(1.0, frame, opset, Scope.STATE) < 1e-12


def test_omega_parallel_equals_sequential(qutrit, strange):
    frame = canonical_mub_frame(qutrit)
    opset = build_operational_set(qutrit, strange, 0.2)
    with ThreadPoolExecutor(max_workers=4) as pool:
        parallel = omega(0.2, frame, opset, Scope.SUBTHEORY, executor=pool)
    assert parallel == omega(0.2, frame, opset, Scope.SUBTHEORY)


def test_omega_rejects_other_noise(qutrit, strange):
    opset = build_operational_set(qutrit, strange, 0.2)
    with pytest.raises(InvalidParameterError):
        omega(0.3, canonical_mub_frame(qutrit), opset)


def test_omega_state_scope_needs_magic(qutrit):
    opset = build_operational_set(qutrit, None, 0.2)
    with pytest.raises(InvalidInputError):
        omega(0.2, canonical_mub_frame(qutrit), opset, Scope.STATE)


def test_operational_set_members(qutrit, strange):
    opset = build_operational_set(qutrit, strange, 0.1)
    assert len(opset.states) == 13
    assert len(opset.effects) == 13
    assert [c.name for c in opset.channels][:2] == ["identity", "depolarizing(0.1)"]


@pytest.mark.parametrize("frame_name", ["gross", "kd-mub"])
def test_monotone_decay(qutrit, strange, frame_name):
    frame = gross_wigner_frame(qutrit) if frame_name == "gross" else canonical_mub_frame(qutrit)
    penalties = [
        penalty(represent_state(frame, depolarize(strange, p)))
        for p in np.linspace(0, 1, 101)
    ]
    assert all(b <= a + 1e-12 for a, b in zip(penalties, penalties[1:]))

import logging
from types import SimpleNamespace

import numpy as np

from app.domain.qudit import depolarize, maximally_mixed, random_state, stabilizer_states
from app.infra.polytope import PolytopeSolver


def _reconstruction(cert, dim):
    projectors = np.array([s.entries for s in stabilizer_states(dim).states])
    return np.einsum("k,kab->ab", np.array(cert.coefficients), projectors)


def test_maximally_mixed_certificate(qutrit):
    rho = maximally_mixed(qutrit)
    cert = PolytopeSolver().membership(rho)
    assert cert is not None
    assert len(cert.coefficients) == 12
    assert min(cert.coefficients) >= 0
    assert abs(sum(cert.coefficients) - 1) < 1e-8
    assert np.max(np.abs(_reconstruction(cert, qutrit) - rho.entries)) < 1e-8


def test_stabilizer_state_inside(qutrit):
    state = stabilizer_states(qutrit).states[5]
    cert = PolytopeSolver().membership(state)
    assert cert is not None
    assert cert.residual <= 1e-8


def test_magic_state_outside(strange, norrell):
    solver = PolytopeSolver()
    assert solver.membership(strange) is None
    assert solver.membership(norrell) is None


def test_heavily_depolarised_random_states_inside(qutrit):
    solver = PolytopeSolver()
    for seed in range(5):
        rho = depolarize(random_state(qutrit, seed), 0.95)
        cert = solver.membership(rho)
        assert cert is not None
        assert np.max(np.abs(_reconstruction(cert, qutrit) - rho.entries)) < 1e-8


def test_indeterminate_band_treated_as_outside(qutrit, mocker, caplog):
    mocker.patch(
        "app.infra.polytope.linprog",
        return_value=SimpleNamespace(status=0, message="", x=np.zeros(12 + 38), fun=5e-8),
    )
    with caplog.at_level(logging.WARNING, logger="app.infra.polytope"):
        assert PolytopeSolver().membership(maximally_mixed(qutrit)) is None
    assert "Indeterminate" in caplog.text


def test_solver_failure_is_outside(qutrit, mocker):
    mocker.patch(
        "app.infra.polytope.linprog",
        return_value=SimpleNamespace(status=2, message="infeasible", x=None, fun=None),
    )
    assert PolytopeSolver().membership(maximally_mixed(qutrit)) is None

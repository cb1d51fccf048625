import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from app.config import Configuration
from app.domain.entities import Operator, PolytopeCertificate
from app.domain.qudit import stabilizer_states
from app.infra.polytope_i import PolytopeSolverInterface

conf = Configuration()
log = logging.getLogger(__name__)

HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


@dataclass
class PolytopeSolver(PolytopeSolverInterface):
    """Phase-one LP over the d(d+1) pure stabiliser projectors.

    Minimises the L1 slack of  sum_k c_k |s_k><s_k| = rho,  sum_k c_k = 1,
    c >= 0  (real and imaginary parts split into separate rows).
    """

    residual_tol: float = conf.lp_residual_tol
    infeasibility_tol: float = conf.lp_infeasibility_tol

    def membership(self, rho: Operator) -> Optional[PolytopeCertificate]:
        stab = stabilizer_states(rho.dim)
        projectors = np.array([s.entries for s in stab.states])
        n = len(projectors)
        columns = projectors.reshape(n, -1).T
        mixing = np.vstack([columns.real, columns.imag, np.ones((1, n))])
        flat = rho.entries.reshape(-1)
        target = np.concatenate([flat.real, flat.imag, [1.0]])
        m = len(target)
        result = linprog(
            np.concatenate([np.zeros(n), np.ones(2 * m)]),
            A_eq=np.hstack([mixing, np.eye(m), -np.eye(m)]),
            b_eq=target,
            bounds=(0, None),
            method="highs",
            options=HIGHS_OPTIONS,
        )
        if result.status != 0:
            log.warning(f"LP solver stopped with status {result.status}: "
                        f"{result.message}")
            return None

        coefficients = np.clip(result.x[:n], 0.0, None)
        mixture = np.einsum("k,kab->ab", coefficients, projectors)
        residual = float(max(
            np.max(np.abs(mixture - rho.entries)),
            abs(coefficients.sum() - 1)
        ))
        if residual <= self.residual_tol:
            return PolytopeCertificate(
                coefficients=coefficients.tolist(),
                residual=residual
            )
        if result.fun > self.infeasibility_tol:
            return None
        log.warning(
            f"Indeterminate polytope membership: slack {result.fun:.3e}, "
            f"residual {residual:.3e}; treated as outside"
        )
        return None

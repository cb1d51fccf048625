import logging
import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np
from scipy.optimize import minimize

from app.adapters.optimizer_i import FrameSearchInterface
from app.config import Configuration
from app.domain.entities import (
    FrameSearchPoint,
    ObjectiveContext,
    OptimizerConfig,
    Operator,
    RestartTrace,
    Scope,
)
from app.domain.frames import frame_from_params, validate_frame
from app.domain.parametrization import params_from_unitary, unitary_from_params
from app.domain.qudit import fourier_matrix
from app.domain.representations import build_operational_set, omega
from app.errors import DegenerateFrameError, InvalidParameterError, NoThresholdError

conf = Configuration()
log = logging.getLogger(__name__)

__all__ = [
    "FrameOptimizer",
    "bisect_threshold",
    "objective_context",
    "restart_seed",
    "unitary_from_params",
]

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    """One output of the splitmix64 generator for state x."""
    z = (x + GOLDEN_GAMMA) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def restart_seed(master: int, index: int) -> int:
    """Seed of restart ``index``: splitmix64 of master + index * gamma."""
    return splitmix64((master + index * GOLDEN_GAMMA) & MASK64)


def bisect_threshold(
    predicate: Callable[[float], bool],
    lo: float = 0.0,
    hi: float = 1.0,
    tol: float = conf.bisection_tol
) -> float:
    """Smallest p (to within tol) where a monotone predicate turns true.

    The predicate is evaluated at ``hi`` first and then only at midpoints,
    at most ceil(log2((hi - lo) / tol)) + 1 times.
    """
    if tol <= 0:
        raise InvalidParameterError(f"Bisection tolerance must be positive, got {tol}")
    if not predicate(hi):
        raise NoThresholdError(f"Predicate is false at p={hi}")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if predicate(mid):
            hi = mid
        else:
            lo = mid
    return hi


def objective_context(
    rho_m: Operator,
    p: float,
    scope: Scope = Scope.STATE
) -> ObjectiveContext:
    return ObjectiveContext(
        rho_m=rho_m,
        opset=build_operational_set(rho_m.dim, rho_m, p),
        scope=scope
    )


class _TargetReached(Exception):
    pass


class _Aborted(Exception):
    pass


@dataclass
class _Outcome:
    restart: int
    params: np.ndarray
    objective: float
    iterations: int


class _Tracker:
    """Objective wrapper remembering the best point it has seen."""

    def __init__(self, fn, target: Optional[float], cancelled: Callable[[], bool]):
        self.fn = fn
        self.target = target
        self.cancelled = cancelled
        self.best_x: Optional[np.ndarray] = None
        self.best_f = math.inf
        self.iterations = 0

    def __call__(self, x: np.ndarray) -> float:
        if self.cancelled():
            raise _Aborted()
        f = self.fn(x)
        if f < self.best_f or self.best_x is None:
            self.best_f, self.best_x = f, np.array(x, dtype=float)
        if self.target is not None and f <= self.target:
            raise _TargetReached()
        return f

    def step(self, *args):
        self.iterations += 1


@dataclass
class FrameOptimizer(FrameSearchInterface):
    """Multi-start Nelder-Mead over pairs of unitaries (U, V).

    Restart 0 starts at the computational/Fourier frame, restart 1 at the
    frame built on the eigenbasis of the magic state, later restarts at
    uniform random points of [-pi, pi]^(2 d^2).
    """

    def starting_points(
        self,
        context: ObjectiveContext,
        config: OptimizerConfig
    ) -> List[np.ndarray]:
        dim = context.rho_m.dim
        fourier = fourier_matrix(dim)
        points = [np.concatenate([
            np.zeros(dim.size), params_from_unitary(fourier)
        ])]
        if config.restarts > 1:
            _, eigvecs = np.linalg.eigh(context.rho_m.entries)
            points.append(np.concatenate([
                params_from_unitary(eigvecs),
                params_from_unitary(eigvecs @ fourier),
            ]))
        for index in range(2, config.restarts):
            rng = np.random.default_rng(restart_seed(config.seed, index))
            points.append(rng.uniform(-np.pi, np.pi, 2 * dim.size))
        return points

    def minimize_omega(
        self,
        p: float,
        context: ObjectiveContext,
        config: OptimizerConfig,
        target: Optional[float] = None
    ) -> FrameSearchPoint:
        dim = context.rho_m.dim

        def objective(x: np.ndarray) -> float:
            try:
                frame = frame_from_params(x, dim)
            except DegenerateFrameError:
                return math.inf
            return omega(p, frame, context.opset, context.scope)

        starts = self.starting_points(context, config)
        first_hit = [math.inf]
        lock = threading.Lock()

        def run(index: int) -> Optional[_Outcome]:
            def cancelled() -> bool:
                return first_hit[0] < index
            if cancelled():
                return None
            outcome = self._restart(index, starts[index], objective, config,
                                    target, cancelled)
            if outcome is not None and target is not None and (
                outcome.objective <= target
            ):
                with lock:
                    first_hit[0] = min(first_hit[0], index)
            return outcome

        if config.threads == 1:
            outcomes = []
            for index in range(config.restarts):
                outcomes.append(run(index))
                if first_hit[0] <= index:
                    break
        else:
            with ThreadPoolExecutor(max_workers=config.threads) as pool:
                outcomes = list(pool.map(run, range(config.restarts)))

        done = [o for o in outcomes if o is not None]
        if target is not None and first_hit[0] < math.inf:
            done = [o for o in done if o.restart <= first_hit[0]]
        best = min(done, key=lambda o: (o.objective, o.restart))
        log.debug(
            f"p={p:.6g}: best objective {best.objective:.3e} "
            f"from restart {best.restart} of {len(done)}"
        )

        objective_value = best.objective
        if math.isfinite(objective_value) and not validate_frame(
            frame_from_params(best.params, dim)
        ).overall:
            log.warning(f"p={p:.6g}: best frame failed validation, rejected")
            objective_value = math.inf
        return FrameSearchPoint(
            params=best.params,
            objective=objective_value,
            restart=best.restart,
            iterations=best.iterations,
            trace=[
                RestartTrace(
                    restart=o.restart,
                    iterations=o.iterations,
                    objective=o.objective
                )
                for o in sorted(done, key=lambda o: o.restart)
            ],
        )

    def _restart(
        self,
        index: int,
        x0: np.ndarray,
        objective: Callable[[np.ndarray], float],
        config: OptimizerConfig,
        target: Optional[float],
        cancelled: Callable[[], bool]
    ) -> Optional[_Outcome]:
        tracker = _Tracker(objective, target, cancelled)
        simplex = np.vstack([x0, x0 + config.simplex_scale * np.eye(len(x0))])
        try:
            minimize(
                tracker,
                x0,
                method="Nelder-Mead",
                callback=tracker.step,
                options={
                    "maxiter": config.max_iterations,
                    "xatol": config.convergence_tol,
                    "fatol": config.convergence_tol,
                    "initial_simplex": simplex,
                },
            )
        except _TargetReached:
            pass
        except _Aborted:
            return None
        return _Outcome(
            restart=index,
            params=tracker.best_x,
            objective=tracker.best_f,
            iterations=tracker.iterations,
        )

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from app.adapters.optimizer import bisect_threshold, objective_context
from app.adapters.optimizer_i import FrameSearchInterface
from app.adapters.thresholds_i import ThresholdServiceInterface
from app.config import Configuration
from app.domain.entities import (
    CONFIRMED,
    POTENTIAL_GAP,
    REFUTED,
    Certificate,
    Dimension,
    ExactFrame,
    FrameSearchPoint,
    MubClaimReport,
    Operator,
    OptimizerConfig,
    PolytopeCertificate,
    ScanRow,
    Scope,
    StateClaim,
    ThresholdKind,
    ThresholdResult,
)
from app.domain.frames import (
    canonical_mub_frame,
    frame_from_descriptor,
    frame_from_params,
    gross_wigner_frame,
    stabilizer_kd_frames,
)
from app.domain.qudit import depolarize, stabilizer_states
from app.domain.representations import (
    build_operational_set,
    omega,
    penalty,
    represent_state,
)
from app.errors import DimensionMismatchError, InvalidInputError, NoThresholdError
from app.infra.polytope_i import PolytopeSolverInterface

conf = Configuration()
log = logging.getLogger(__name__)

GROSS = "gross"
KD = "kd"
KD_STAB = "kd-stab"
KD_MUB = "kd-mub"
POLYTOPE = "polytope"

CRIT_FAMILIES = (GROSS, KD, KD_STAB)
SCAN_FAMILIES = (GROSS, KD_MUB, KD_STAB, KD)

# groups of the stabiliser enumeration spanned by the computational and
# Fourier bases
DEFINING_GROUPS = (0, 1)


def wigner_scan_oracle(
    values: np.ndarray,
    d: int,
    step: float = conf.scan_oracle_step,
    tol: float = conf.classification_tol,
    chunk: int = 100_000
) -> float:
    """First grid point where every depolarised Wigner value is >= 0."""
    count = int(round(1 / step))
    for start in range(0, count + 1, chunk):
        grid = np.arange(start, min(start + chunk, count + 1)) * step
        lowest = np.min(
            np.outer(1 - grid, values) + grid[:, None] / (d * d), axis=1
        )
        hits = np.nonzero(lowest >= -tol)[0]
        if len(hits):
            return float(grid[hits[0]])
    return 1.0


@dataclass
class ThresholdService(ThresholdServiceInterface):

    optimizer: FrameSearchInterface
    polytope: PolytopeSolverInterface
    classification_tol: float = conf.classification_tol

    def wigner_threshold(
        self,
        rho_m: Operator,
        dim: Optional[Dimension] = None
    ) -> ThresholdResult:
        if dim is not None and dim.d != rho_m.d:
            raise DimensionMismatchError(
                f"State of dimension {rho_m.d} given for d={dim.d}"
            )
        d = rho_m.d
        frame = gross_wigner_frame(rho_m.dim)
        values = represent_state(frame, rho_m).values.real
        w_min = float(values.min())
        if w_min >= -self.classification_tol:
            p_w = 0.0
        else:
            scaled = d * d * abs(w_min)
            p_w = scaled / (1 + scaled)
        oracle = wigner_scan_oracle(values, d, tol=self.classification_tol)
        if abs(oracle - p_w) > conf.scan_oracle_step:
            log.warning(
                f"Closed-form p_W={p_w:.9f} disagrees with grid oracle {oracle:.9f}"
            )
        representation = represent_state(frame, depolarize(rho_m, p_w))
        scan = [
            (float(p), penalty(represent_state(frame, depolarize(rho_m, p))))
            for p in np.linspace(0.0, 1.0, 101)
        ]
        log.info(f"Wigner threshold p_W={p_w:.9f} (w_min={w_min:.6g})")
        return ThresholdResult(
            kind=ThresholdKind.WIGNER,
            p_value=p_w,
            certificate=Certificate(
                family=GROSS,
                p=p_w,
                witness=penalty(representation),
                descriptor=frame.descriptor,
                representation=representation,
                extras={"w_min": w_min, "scan_oracle": oracle},
            ),
            scan_trace=scan,
            tol=self.classification_tol,
        )

    def polytope_membership(self, rho: Operator) -> Optional[PolytopeCertificate]:
        return self.polytope.membership(rho)

    def polytope_threshold(
        self,
        rho_m: Operator,
        tol: Optional[float] = None
    ) -> ThresholdResult:
        tol = conf.bisection_tol if tol is None else tol
        certificates: Dict[float, Optional[PolytopeCertificate]] = {}
        scan: List[Tuple[float, float]] = []

        def inside(p: float) -> bool:
            cert = self.polytope.membership(depolarize(rho_m, p))
            certificates[p] = cert
            scan.append((p, 0.0 if cert is not None else 1.0))
            return cert is not None

        p_stab = bisect_threshold(inside, tol=tol)
        cert = certificates[p_stab]
        p_w = self.wigner_threshold(rho_m).p_value
        verdict = CONFIRMED if abs(p_stab - p_w) <= 2 * tol else REFUTED
        diagnostics = [
            f"WIGNER_POLYTOPE_COINCIDENCE: {verdict} "
            f"(p_W={p_w:.9f}, p_stab={p_stab:.9f})"
        ]
        if p_w > p_stab + 2 * tol:
            log.error(f"p_W={p_w} exceeds p_stab={p_stab}: containment violated")
            diagnostics.append("CONTAINMENT: VIOLATED")
        log.info(f"Polytope threshold p_stab={p_stab:.9f}; coincidence {verdict}")
        return ThresholdResult(
            kind=ThresholdKind.POLYTOPE,
            p_value=p_stab,
            certificate=Certificate(
                family=POLYTOPE,
                p=p_stab,
                witness=cert.residual,
                polytope=cert,
                extras={"p_wigner": p_w},
            ),
            scan_trace=sorted(scan),
            tol=tol,
            diagnostics=diagnostics,
        )

    def kd_threshold(
        self,
        rho_m: Operator,
        config: OptimizerConfig,
        scope: Scope = Scope.STATE,
        tol: Optional[float] = None
    ) -> ThresholdResult:
        tol = conf.bisection_tol if tol is None else tol
        points: Dict[float, FrameSearchPoint] = {}

        def noncontextual(p: float) -> bool:
            point = self.optimizer.minimize_omega(
                p,
                objective_context(rho_m, p, scope),
                config,
                target=self.classification_tol
            )
            points[p] = point
            return point.objective <= self.classification_tol

        try:
            p_kd = bisect_threshold(noncontextual, tol=tol)
        except NoThresholdError:
            log.error(
                f"No KD frame found classical at p=1 in {Scope(scope).value} scope"
            )
            raise
        point = points[p_kd]
        frame = frame_from_params(point.params, rho_m.dim)
        certificate = Certificate(
            family=KD,
            p=p_kd,
            witness=point.objective,
            scope=scope,
            descriptor=frame.descriptor,
            representation=represent_state(frame, depolarize(rho_m, p_kd)),
            extras={"restart": float(point.restart)},
        )
        p_w = self.wigner_threshold(rho_m).p_value
        diagnostics = [self._ordering_verdict(p_kd, p_w)]
        claim = self.mub_stabilizer_claim(rho_m.dim)
        diagnostics.append(f"MUB_STABILIZER_CLAIM: {claim.verdict}")
        return ThresholdResult(
            kind=ThresholdKind.KD,
            p_value=p_kd,
            upper_bound=True,
            certificate=certificate,
            scan_trace=sorted((p, pt.objective) for p, pt in points.items()),
            tol=tol,
            seed=config.seed,
            diagnostics=diagnostics,
            optimizer_trace=point.trace,
        )

    def stabilizer_kd_threshold(
        self,
        rho_m: Operator,
        scope: Scope = Scope.STATE,
        tol: Optional[float] = None
    ) -> ThresholdResult:
        """Threshold over the KD frames of pairs of stabiliser bases."""
        tol = conf.bisection_tol if tol is None else tol
        frames = stabilizer_kd_frames(rho_m.dim)
        best: Dict[float, Tuple[float, ExactFrame]] = {}

        def noncontextual(p: float) -> bool:
            best[p] = self._best_frame(frames, rho_m, p, scope)
            return best[p][0] <= self.classification_tol

        p_kd = bisect_threshold(noncontextual, tol=tol)
        witness, frame = best[p_kd]
        return ThresholdResult(
            kind=ThresholdKind.KD,
            p_value=p_kd,
            upper_bound=True,
            certificate=Certificate(
                family=KD_STAB,
                p=p_kd,
                witness=witness,
                scope=scope,
                descriptor=frame.descriptor,
                representation=represent_state(frame, depolarize(rho_m, p_kd)),
            ),
            scan_trace=sorted((p, w) for p, (w, _) in best.items()),
            tol=tol,
        )

    def crit_threshold(
        self,
        rho_m: Operator,
        families: Sequence[str],
        config: OptimizerConfig,
        scope: Scope = Scope.STATE,
        tol: Optional[float] = None
    ) -> ThresholdResult:
        unknown = set(families) - set(CRIT_FAMILIES)
        if unknown or not families:
            raise InvalidInputError(
                f"Frame families must be a non-empty subset of {CRIT_FAMILIES}"
            )
        results: List[Tuple[str, ThresholdResult]] = []
        diagnostics = []
        for family in CRIT_FAMILIES:
            if family not in families:
                continue
            try:
                if family == GROSS:
                    result = self.wigner_threshold(rho_m)
                elif family == KD:
                    result = self.kd_threshold(rho_m, config, scope, tol)
                else:
                    result = self.stabilizer_kd_threshold(rho_m, scope, tol)
            except NoThresholdError:
                diagnostics.append(f"FAMILY {family}: no threshold")
                continue
            diagnostics.append(f"FAMILY {family}: p={result.p_value:.9f}")
            results.append((family, result))
        if not results:
            raise NoThresholdError(f"No family in {list(families)} has a threshold")
        family, winner = min(results, key=lambda r: r[1].p_value)
        log.info(f"Critical threshold estimate {winner.p_value:.9f} from {family}")
        return ThresholdResult(
            kind=ThresholdKind.CRIT,
            p_value=winner.p_value,
            upper_bound=True,
            certificate=winner.certificate,
            scan_trace=winner.scan_trace,
            tol=winner.tol,
            seed=config.seed if KD in families else None,
            diagnostics=diagnostics + winner.diagnostics,
            optimizer_trace=winner.optimizer_trace,
        )

    def mub_stabilizer_claim(self, dim: Dimension) -> MubClaimReport:
        frame = canonical_mub_frame(dim)
        stab = stabilizer_states(dim)
        claims = [
            StateClaim(
                group=g,
                index=k,
                defining=g in DEFINING_GROUPS,
                penalty=penalty(represent_state(frame, state)),
            )
            for g in range(dim.d + 1)
            for k, state in enumerate(stab.group(g))
        ]
        defining_pass = all(
            c.penalty < self.classification_tol for c in claims if c.defining
        )
        all_pass = all(c.penalty < self.classification_tol for c in claims)
        verdict = CONFIRMED if all_pass else REFUTED
        if not defining_pass:
            log.error("States of the frame-defining bases are not classical")
        log.info(f"Stabiliser states real and non-negative in MUB frame: {verdict}")
        return MubClaimReport(
            states=claims,
            defining_pass=defining_pass,
            verdict=verdict
        )

    def scan(
        self,
        rho_m: Operator,
        grid: Sequence[float],
        families: Sequence[str],
        config: OptimizerConfig,
        scope: Scope = Scope.STATE
    ) -> List[ScanRow]:
        unknown = set(families) - set(SCAN_FAMILIES)
        if unknown:
            raise InvalidInputError(f"Unknown frame families {sorted(unknown)}")
        dim = rho_m.dim
        stab_frames = stabilizer_kd_frames(dim) if KD_STAB in families else []
        rows = []
        for p in grid:
            p = float(p)
            noisy = depolarize(rho_m, p)
            opset = build_operational_set(dim, rho_m, p)
            for family in families:
                if family == GROSS:
                    frame = gross_wigner_frame(dim)
                    witness = omega(p, frame, opset, scope)
                elif family == KD_MUB:
                    frame = canonical_mub_frame(dim)
                    witness = omega(p, frame, opset, scope)
                elif family == KD_STAB:
                    witness, frame = self._best_frame(stab_frames, rho_m, p, scope)
                else:
                    point = self.optimizer.minimize_omega(
                        p,
                        objective_context(rho_m, p, scope),
                        config,
                        target=self.classification_tol
                    )
                    frame = frame_from_params(point.params, dim)
                    witness = point.objective
                values = represent_state(frame, noisy).values
                rows.append(ScanRow(
                    p=p,
                    frame=family,
                    witness=witness,
                    min_real=float(values.real.min()),
                    max_abs_imag=float(np.abs(values.imag).max()),
                ))
        return rows

    def verify_certificate(self, result: ThresholdResult, rho_m: Operator) -> float:
        """Recompute a certificate's witness value from scratch."""
        cert = result.certificate
        noisy = depolarize(rho_m, cert.p)
        if cert.polytope is not None:
            projectors = np.array([s.entries for s in stabilizer_states(rho_m.dim).states])
            coefficients = np.array(cert.polytope.coefficients)
            mixture = np.einsum("k,kab->ab", coefficients, projectors)
            return float(max(
                np.max(np.abs(mixture - noisy.entries)),
                abs(coefficients.sum() - 1)
            ))
        frame = frame_from_descriptor(rho_m.dim, cert.descriptor)
        opset = build_operational_set(rho_m.dim, rho_m, cert.p)
        return omega(cert.p, frame, opset, cert.scope)

    def certificate_holds(self, result: ThresholdResult, rho_m: Operator) -> bool:
        recomputed = self.verify_certificate(result, rho_m)
        if result.certificate.polytope is not None:
            return recomputed <= conf.lp_residual_tol
        return abs(recomputed - result.certificate.witness) <= conf.certificate_tol

    def _best_frame(
        self,
        frames: Sequence[ExactFrame],
        rho_m: Operator,
        p: float,
        scope: Scope
    ) -> Tuple[float, ExactFrame]:
        opset = build_operational_set(rho_m.dim, rho_m, p)
        witnesses = [omega(p, f, opset, scope) for f in frames]
        index = int(np.argmin(witnesses))
        return witnesses[index], frames[index]

    @staticmethod
    def _ordering_verdict(p_kd: float, p_w: float) -> str:
        if p_kd <= p_w + conf.gap_margin:
            log.info(f"p_KD={p_kd:.9f} <= p_W={p_w:.9f}")
            return f"KD_BOUND: {CONFIRMED} (p_KD={p_kd:.9f}, p_W={p_w:.9f})"
        log.warning(f"p_KD={p_kd:.9f} exceeds p_W={p_w:.9f}")
        return f"{POTENTIAL_GAP}: p_KD={p_kd:.9f} exceeds p_W={p_w:.9f}"

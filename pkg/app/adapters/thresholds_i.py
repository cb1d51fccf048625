from typing import List, Optional, Sequence
from abc import ABC, abstractmethod

from app.domain.entities import (
    Dimension,
    MubClaimReport,
    Operator,
    OptimizerConfig,
    PolytopeCertificate,
    ScanRow,
    Scope,
    ThresholdResult,
)


class ThresholdServiceInterface(ABC):

    @abstractmethod
    def wigner_threshold(
        self,
        rho_m: Operator,
        dim: Optional[Dimension] = None
    ) -> ThresholdResult:
        """Noise level where the Gross-Wigner function turns non-negative

        Args:
            rho_m (Operator): magic state
            dim (Optional[Dimension]): expected dimension

        Returns:
            ThresholdResult: p_W with the Wigner representation at p_W
        """

    @abstractmethod
    def polytope_membership(self, rho: Operator) -> Optional[PolytopeCertificate]:
        """Decompose a state into pure stabiliser states

        Args:
            rho (Operator): state to decompose

        Returns:
            Optional[PolytopeCertificate]: coefficients, None when outside
        """

    @abstractmethod
    def polytope_threshold(
        self,
        rho_m: Operator,
        tol: Optional[float] = None
    ) -> ThresholdResult:
        """Noise level where the depolarised state enters the polytope

        Args:
            rho_m (Operator): magic state
            tol (Optional[float]): bisection width

        Returns:
            ThresholdResult: p_stab with the feasible decomposition
        """

    @abstractmethod
    def kd_threshold(
        self,
        rho_m: Operator,
        config: OptimizerConfig,
        scope: Scope = Scope.STATE,
        tol: Optional[float] = None
    ) -> ThresholdResult:
        """Upper bound on the Kirkwood-Dirac transition point

        Args:
            rho_m (Operator): magic state
            config (OptimizerConfig): frame search settings
            scope (Scope): witness scope
            tol (Optional[float]): bisection width

        Returns:
            ThresholdResult: p_KD estimate with the witnessing frame
        """

    @abstractmethod
    def crit_threshold(
        self,
        rho_m: Operator,
        families: Sequence[str],
        config: OptimizerConfig,
        scope: Scope = Scope.STATE,
        tol: Optional[float] = None
    ) -> ThresholdResult:
        """Smallest threshold over the searched frame families

        Args:
            rho_m (Operator): magic state
            families (Sequence[str]): subset of gross, kd, kd-stab
            config (OptimizerConfig): frame search settings
            scope (Scope): witness scope
            tol (Optional[float]): bisection width

        Returns:
            ThresholdResult: upper bound on p_crit and the winning frame
        """

    @abstractmethod
    def mub_stabilizer_claim(self, dim: Dimension) -> MubClaimReport:
        """KD penalties of every stabiliser state in the two-MUB frame

        Args:
            dim (Dimension): qudit dimension

        Returns:
            MubClaimReport: per-state penalties and the verdict
        """

    @abstractmethod
    def scan(
        self,
        rho_m: Operator,
        grid: Sequence[float],
        families: Sequence[str],
        config: OptimizerConfig,
        scope: Scope = Scope.STATE
    ) -> List[ScanRow]:
        """Witness of every frame family along a noise grid

        Args:
            rho_m (Operator): magic state
            grid (Sequence[float]): noise levels
            families (Sequence[str]): gross, kd-mub, kd-stab, kd
            config (OptimizerConfig): frame search settings for kd
            scope (Scope): witness scope

        Returns:
            List[ScanRow]: one row per grid point and family
        """

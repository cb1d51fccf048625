from typing import Optional
from abc import ABC, abstractmethod

from app.domain.entities import Operator, PolytopeCertificate


class PolytopeSolverInterface(ABC):

    @abstractmethod
    def membership(self, rho: Operator) -> Optional[PolytopeCertificate]:
        """Decide whether a state is a convex mixture of stabiliser states

        Args:
            rho (Operator): state to decompose

        Returns:
            Optional[PolytopeCertificate]: mixing coefficients, or None when
            the state lies outside the stabiliser polytope
        """

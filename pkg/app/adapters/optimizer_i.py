from typing import Optional
from abc import ABC, abstractmethod

from app.domain.entities import (
    FrameSearchPoint,
    ObjectiveContext,
    OptimizerConfig,
)


class FrameSearchInterface(ABC):

    @abstractmethod
    def minimize_omega(
        self,
        p: float,
        context: ObjectiveContext,
        config: OptimizerConfig,
        target: Optional[float] = None
    ) -> FrameSearchPoint:
        """Minimise the witness over parametrized KD frames

        Args:
            p (float): noise level
            context (ObjectiveContext): magic state, operational set and scope
            config (OptimizerConfig): restarts, budget and seed
            target (Optional[float]): stop as soon as a restart reaches it

        Returns:
            FrameSearchPoint: best parameters found and their objective
        """

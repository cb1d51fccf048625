from app.infra.polytope import PolytopeSolver
from app.adapters.optimizer import FrameOptimizer
from app.adapters.thresholds import ThresholdService

polytope = PolytopeSolver()
optimizer = FrameOptimizer()
service = ThresholdService(optimizer=optimizer, polytope=polytope)


def get_threshold_service():
    return service

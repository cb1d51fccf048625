import logging

from pydantic import BaseSettings


class Configuration(BaseSettings):

    log_level: str = "INFO"

    # numerical tolerances
    construction_tol: float = 1e-12
    validation_tol: float = 1e-10
    classification_tol: float = 1e-12
    overlap_floor: float = 1e-8
    lp_residual_tol: float = 1e-8
    lp_infeasibility_tol: float = 1e-7
    certificate_tol: float = 1e-9
    bisection_tol: float = 1e-6
    gap_margin: float = 1e-4
    scan_oracle_step: float = 1e-6

    # frame search defaults
    restarts: int = 32
    max_iterations: int = 400
    convergence_tol: float = 1e-10
    simplex_scale: float = 0.3
    seed: int = 1
    threads: int = 1


def configure_logger():
    conf = Configuration()
    logger = logging.getLogger()
    logger.setLevel(conf.log_level)
    ch = logging.StreamHandler()
    ch.setLevel(conf.log_level)
    formatter = logging.Formatter(
        "[%(levelname)s] %(asctime)s: %(name)s: %(message)s"
    )

    ch.setFormatter(formatter)
    logger.addHandler(ch)

import dataclasses
import logging

from app.adapters.thresholds import CRIT_FAMILIES, GROSS, KD
from app.depends import get_threshold_service
from app.domain.entities import ThresholdResult
from app.router.options import (
    EXIT_OK,
    add_common_flags,
    add_state_flags,
    build_magic,
    csv_text,
    guarded,
    load_run_config,
    optimizer_config,
    parse_families,
    write_output,
)
from app.schemas import METHODS, RunConfig, dump_json, threshold_report

log = logging.getLogger(__name__)

FLAGS = (
    "d", "state", "vec", "method", "scope", "tol", "classification_tol", "seed",
    "restarts", "max_iterations", "threads", "families", "out", "format",
)
DEFAULT_FAMILIES = (GROSS, KD)


def register(subparsers):
    parser = subparsers.add_parser(
        "threshold",
        help="noise threshold of a magic state for one method",
    )
    add_common_flags(parser)
    add_state_flags(parser)
    parser.add_argument("--method", choices=METHODS)
    parser.add_argument("--trace", help="CSV of per-restart optimizer outcomes")
    parser.set_defaults(handler=run)


def compute(config: RunConfig) -> ThresholdResult:
    service = dataclasses.replace(
        get_threshold_service(),
        classification_tol=config.classification_tol
    )
    rho_m = build_magic(config)
    if config.method == "wigner":
        return service.wigner_threshold(rho_m)
    if config.method == "polytope":
        return service.polytope_threshold(rho_m, config.tol)
    settings = optimizer_config(config)
    if config.method == "kd":
        return service.kd_threshold(rho_m, settings, config.scope, config.tol)
    return service.crit_threshold(
        rho_m, config.families, settings, config.scope, config.tol
    )


@guarded
def run(args) -> int:
    config = load_run_config(args, FLAGS)
    config = config.copy(update={
        "families": parse_families(config.families, CRIT_FAMILIES, DEFAULT_FAMILIES),
        "format": config.format or "json",
    })
    result = compute(config)
    log.info(f"{config.method} threshold p={result.p_value:.9f}")
    if not get_threshold_service().certificate_holds(result, build_magic(config)):
        log.warning(f"Certificate at p={result.p_value:.9f} did not re-verify")
    for line in result.diagnostics:
        log.info(line)

    if config.format == "json":
        text = dump_json(threshold_report(result, config))
    else:
        text = csv_text(
            ("p", "witness"),
            result.scan_trace,
            config,
            notes=[
                f"kind {result.kind.value}",
                f"p {result.p_value!r}",
                f"upper_bound {str(result.upper_bound).lower()}",
                *result.diagnostics,
            ],
        )
    write_output(text, config.out)

    if getattr(args, "trace", None):
        write_output(
            csv_text(
                ("restart", "iterations", "objective"),
                [(t.restart, t.iterations, t.objective) for t in result.optimizer_trace],
                config,
            ),
            args.trace,
        )
    return EXIT_OK

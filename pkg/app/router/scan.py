import dataclasses
import logging
import math
from typing import List

from app.adapters.thresholds import GROSS, KD_MUB, SCAN_FAMILIES
from app.depends import get_threshold_service
from app.errors import InvalidConfigError
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
from app.schemas import RunConfig, ScanReport, dump_json

log = logging.getLogger(__name__)

FLAGS = (
    "d", "state", "vec", "scope", "classification_tol", "seed", "restarts",
    "max_iterations", "threads", "families", "start", "stop", "step", "out",
    "format",
)
DEFAULT_FAMILIES = (GROSS, KD_MUB)
HEADER = ("p", "frame", "witness", "min_real", "max_abs_imag")


def register(subparsers):
    parser = subparsers.add_parser(
        "scan",
        help="witness of each frame family along a noise grid",
    )
    add_common_flags(parser)
    add_state_flags(parser)
    parser.add_argument("--start", type=float)
    parser.add_argument("--stop", type=float)
    parser.add_argument("--step", type=float)
    parser.set_defaults(handler=run)


def noise_grid(config: RunConfig) -> List[float]:
    """start, start + step, ... up to and including stop."""
    start, stop, step = config.start, config.stop, config.step
    if not 0.0 <= start < stop <= 1.0:
        raise InvalidConfigError(
            f"start/stop: need 0 <= start < stop <= 1, got {start}, {stop}"
        )
    count = int(math.floor((stop - start) / step + 1e-9))
    return [min(round(start + k * step, 12), stop) for k in range(count + 1)]


@guarded
def run(args) -> int:
    config = load_run_config(args, FLAGS)
    config = config.copy(update={
        "families": parse_families(config.families, SCAN_FAMILIES, DEFAULT_FAMILIES),
        "format": config.format or "csv",
    })
    grid = noise_grid(config)
    service = dataclasses.replace(
        get_threshold_service(),
        classification_tol=config.classification_tol
    )
    rows = service.scan(
        build_magic(config),
        grid,
        config.families,
        optimizer_config(config),
        config.scope,
    )
    log.info(f"Scanned {len(grid)} noise levels for {config.families}")

    if config.format == "json":
        text = dump_json(ScanReport(rows=rows, config=config.echo()))
    else:
        text = csv_text(
            HEADER,
            [(r.p, r.frame, r.witness, r.min_real, r.max_abs_imag) for r in rows],
            config,
        )
    write_output(text, config.out)
    return EXIT_OK

import csv
import functools
import io
import json
import logging
import sys
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

from pydantic import ValidationError

from app import TOOL_NAME, __version__
from app.domain.entities import Dimension, Operator, OptimizerConfig
from app.domain.qudit import MagicKind, magic_state
from app.errors import (
    DegenerateFrameError,
    DimensionMismatchError,
    FrameFileError,
    InvalidBasisError,
    InvalidChannelError,
    InvalidConfigError,
    InvalidInputError,
    InvalidOperatorError,
    InvalidParameterError,
    InvalidPOVMError,
    NoThresholdError,
    UnsupportedDimensionError,
)
from app.schemas import RunConfig

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NO_THRESHOLD = 2
EXIT_VALIDATION = 3

exit_codes = {
    EXIT_OK: "success",
    EXIT_INVALID: "invalid input, configuration or file",
    EXIT_NO_THRESHOLD: "no threshold exists in [0, 1]",
    EXIT_VALIDATION: "frame validation failed",
}

INVALID_ERRORS = (
    DegenerateFrameError,
    DimensionMismatchError,
    FrameFileError,
    InvalidBasisError,
    InvalidChannelError,
    InvalidConfigError,
    InvalidInputError,
    InvalidOperatorError,
    InvalidParameterError,
    InvalidPOVMError,
    UnsupportedDimensionError,
)


def add_common_flags(parser):
    parser.add_argument("--config", help="JSON run configuration with \"schema\": 1")
    parser.add_argument("--d", type=int, help="qudit dimension (3, 5 or 7)")
    parser.add_argument("--out", help="output path, stdout when omitted")
    parser.add_argument("--format", choices=("json", "csv"))


def add_state_flags(parser):
    parser.add_argument("--state", choices=[k.value for k in MagicKind])
    parser.add_argument("--vec", help="comma separated amplitudes for --state custom")
    parser.add_argument("--scope", choices=("state", "subtheory"))
    parser.add_argument("--tol", type=float, help="bisection width")
    parser.add_argument("--classification-tol", dest="classification_tol", type=float)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--max-iterations", dest="max_iterations", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--families", help="comma separated frame families")


def _field_names(error: ValidationError) -> str:
    return ", ".join(".".join(str(p) for p in e["loc"]) for e in error.errors())


def load_run_config(args, flags: Sequence[str]) -> RunConfig:
    """File values first, then every flag that was given explicitly."""
    values: Dict[str, Any] = {}
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fp:
                values = json.load(fp)
        except (OSError, json.JSONDecodeError) as e:
            raise InvalidConfigError(f"config: can not read {args.config}: {e}")
        if not isinstance(values, dict) or "schema" not in values:
            raise InvalidConfigError("schema: missing top-level \"schema\" field")
    for flag in flags:
        value = getattr(args, flag, None)
        if value is not None:
            values[flag] = value
    try:
        return RunConfig.parse_obj(values)
    except ValidationError as e:
        raise InvalidConfigError(f"Invalid configuration field(s) {_field_names(e)}: {e}")


def build_magic(config: RunConfig) -> Operator:
    dim = Dimension(d=config.d)
    return magic_state(MagicKind(config.state), dim, config.custom_vector())


def optimizer_config(config: RunConfig) -> OptimizerConfig:
    try:
        return OptimizerConfig(
            restarts=config.restarts,
            max_iterations=config.max_iterations,
            seed=config.seed,
            threads=config.threads,
        )
    except ValidationError as e:
        raise InvalidConfigError(f"Invalid configuration field(s) {_field_names(e)}: {e}")


def csv_text(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config: Optional[RunConfig] = None,
    notes: Sequence[str] = ()
) -> str:
    """CSV with LF line endings, preceded by ``#`` provenance lines."""
    buffer = io.StringIO()
    buffer.write(f"# {TOOL_NAME} {__version__}\n")
    if config is not None:
        buffer.write(f"# config {json.dumps(config.echo(), sort_keys=True)}\n")
    for note in notes:
        buffer.write(f"# {note}\n")
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buffer.getvalue()


def write_output(text: str, out: Optional[str]):
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="\n") as fp:
            fp.write(text)
    except OSError as e:
        raise InvalidConfigError(f"out: can not write {out}: {e}")


def guarded(handler: Callable[..., int]) -> Callable[..., int]:
    """Map domain errors raised by a command onto its exit status."""

    @functools.wraps(handler)
    def run(args) -> int:
        try:
            return handler(args)
        except NoThresholdError as e:
            log.error(f"No threshold: {e}")
            return EXIT_NO_THRESHOLD
        except INVALID_ERRORS as e:
            log.error(f"{type(e).__name__}: {e}")
            return EXIT_INVALID
    return run


def parse_families(
    families: Optional[List[str]],
    allowed: Sequence[str],
    default: Sequence[str]
) -> List[str]:
    if families is None:
        return list(default)
    unknown = [f for f in families if f not in allowed]
    if unknown or not families:
        raise InvalidConfigError(
            f"families: {unknown or families} not a non-empty subset of {list(allowed)}"
        )
    return list(families)

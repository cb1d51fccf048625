import json
import logging

from pydantic import ValidationError

from app.domain.entities import Dimension, ExactFrame
from app.domain.frames import canonical_mub_frame, gross_wigner_frame, validate_frame
from app.errors import FrameFileError
from app.router.options import (
    EXIT_OK,
    EXIT_VALIDATION,
    add_common_flags,
    csv_text,
    guarded,
    load_run_config,
    write_output,
)
from app.schemas import (
    FrameReport,
    FrameSchema,
    RunConfig,
    dump_json,
    frame_from_schema,
    frame_to_schema,
)

log = logging.getLogger(__name__)

FLAGS = ("d", "out", "format")
BUILTINS = ("gross", "kd-mub")


def register(subparsers):
    parser = subparsers.add_parser(
        "validate",
        help="check the exact-frame invariants of a builtin or stored frame",
    )
    add_common_flags(parser)
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--builtin", choices=BUILTINS)
    source.add_argument("--file", help="frame JSON file")
    parser.add_argument("--export", help="write the builtin frame as JSON")
    parser.set_defaults(handler=run)


def builtin_frame(name: str, dim: Dimension) -> ExactFrame:
    if name == "gross":
        return gross_wigner_frame(dim)
    return canonical_mub_frame(dim)


def read_frame(path: str) -> ExactFrame:
    try:
        with open(path, encoding="utf-8") as fp:
            raw = json.load(fp)
        return frame_from_schema(FrameSchema.parse_obj(raw))
    except (OSError, json.JSONDecodeError, ValidationError) as e:
        raise FrameFileError(f"Can not parse frame file {path}: {e}")


@guarded
def run(args) -> int:
    config: RunConfig = load_run_config(args, FLAGS)
    config = config.copy(update={"format": config.format or "json"})
    if args.file:
        frame = read_frame(args.file)
    else:
        frame = builtin_frame(args.builtin, Dimension(d=config.d))
        if args.export:
            write_output(dump_json(frame_to_schema(frame, config)), args.export)

    report = validate_frame(frame)
    if config.format == "json":
        text = dump_json(FrameReport(
            descriptor=frame.descriptor,
            report=report,
            config=config.echo(),
        ))
    else:
        text = csv_text(
            ("check", "residual", "tolerance", "passed"),
            [(c.name, c.residual, c.tolerance, str(c.passed).lower())
             for c in report.checks],
            config,
            notes=[f"overall {str(report.overall).lower()}"],
        )
    write_output(text, config.out)
    if not report.overall:
        log.error(f"Frame {frame.descriptor.kind.value} failed validation")
        return EXIT_VALIDATION
    return EXIT_OK

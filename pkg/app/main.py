import argparse
import logging
import sys

from app import TOOL_NAME, __version__
from app.config import configure_logger
from app.router import scan, threshold, validate
from app.router.options import EXIT_INVALID, exit_codes

log = logging.getLogger(__name__)


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with the invalid-input status."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def build_parser() -> CliParser:
    epilog = "exit status: " + "; ".join(
        f"{code} {meaning}" for code, meaning in exit_codes.items()
    )
    parser = CliParser(
        prog=TOOL_NAME,
        description="Decoherence thresholds of odd-prime qudit magic states "
                    "in quasiprobability representations",
        epilog=epilog,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for router in (threshold, scan, validate):
        router.register(subparsers)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    log.debug(f"Running {args.command}")
    return args.handler(args)


if __name__ == "__main__":
    configure_logger()
    sys.exit(main())

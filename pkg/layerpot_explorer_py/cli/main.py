import argparse
import logging
import sys

from layerpot_explorer_py.cli.commands import COMMAND_HANDLERS, EXIT_CONFIG_ERROR
from layerpot_explorer_py.exceptions.custom_exceptions import ConfigurationError, GeometryError
from layerpot_explorer_py.kernel.derivative_table import init_derivative_table
from layerpot_explorer_py.study_config.loader import load_study_config
from layerpot_explorer_py.study_config.presets import PRESETS

logger = logging.getLogger(__name__)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="layerpot-explorer",
        description="Layer-potential operator checks, shape studies and perforated-domain series studies.")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, help_text in (
            ("verify", "run the operator identity suite on one curve"),
            ("shape-study", "finite-difference smoothness study of a pulled-back operator"),
            ("perforation-study", "series truncation and block/direct equivalence on a perforated domain")):
        sub = subparsers.add_parser(command, help=help_text)
        sub.add_argument("--config", help="study config JSON file")
        sub.add_argument("--out", help="output CSV path (default results/<command>.csv)")
        sub.add_argument("--preset", choices=sorted(PRESETS), help="geometry preset")
        sub.add_argument("--verbose", action="store_true", help="log study progress")
    return parser


def main(argv=None):
    """
    Entry point of the `layerpot-explorer` command.

    Returns:
        int: 0 when every check passed, 1 when a numerical check failed, 2 on a
            configuration or geometry error.
    """
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(levelname)s: %(message)s")
    out = args.out or f"results/{args.command}.csv"
    try:
        init_derivative_table()
        session = load_study_config(args.config, args.command, args.preset)
        return COMMAND_HANDLERS[args.command](session, out)
    except (ConfigurationError, GeometryError) as e:
        print(f"❌ {e}")
        return EXIT_CONFIG_ERROR


if __name__ == "__main__":
    sys.exit(main())

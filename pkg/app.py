import argparse
import logging
import sys

from scenarios import SCENARIOS, report_error, run
from tools.config_tool import load_config
from utils.errors import BouncerError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Neutron bouncer: bound states, absorber overlaps and count curves")
    parser.add_argument("scenario", choices=sorted(SCENARIOS), help="what to run")
    parser.add_argument("--config", help="key = value or YAML run configuration")
    parser.add_argument("--data", help="measured counts, CSV with z_um,n_out[,sigma]")
    parser.add_argument("--out", help="output directory (default: output.dir from the config)")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    overrides = {"scenario": args.scenario, "fit.data": args.data, "output.dir": args.out}
    try:
        config = load_config(args.config, overrides)
    except BouncerError as e:
        return report_error(e)
    return run(config)


if __name__ == "__main__":
    sys.exit(main())

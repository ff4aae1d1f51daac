# softval_cli.py
"""
Command line front end.

Usage:
    python softval_cli.py eval --ref-pred data.csv --group-by iteration,fold --out report.json

The report goes to stdout (or --out), log messages go to stderr.
Exit codes: 0 success, 2 input or schema error, 3 computation error.
"""

import argparse
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from api.softval_api import SoftValAPI
from config.softval_config import SOFTVAL_DEFAULTS
from report_formats import RENDERERS
from softval import TOOL_NAME, __version__
from softval.errors import EXIT_INPUT_ERROR, EXIT_OK, SoftValError, exit_code_for
from softval.report_models import EvaluationConfig

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(levelname)s - [CLI] %(message)s'


def _csv_list(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog=TOOL_NAME, description="Validation of soft classifiers.")
    parser.add_argument("--version", action="version", version=f"{TOOL_NAME} {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    ev = commands.add_parser("eval", help="Evaluate predictions against a reference")
    ev.add_argument("--ref-pred", required=True, help="Dataset with ref:<class> and pred:<class> columns")
    ev.add_argument("--format", choices=["csv", "json"], default=None,
                    help="Dataset format (default: from the file suffix)")
    ev.add_argument("--world", choices=["closed", "open"], default=SOFTVAL_DEFAULTS["world"])
    ev.add_argument("--operators", type=_csv_list, default=SOFTVAL_DEFAULTS["operators"],
                    help="Comma separated: strong,product,weak")
    ev.add_argument("--measures", type=_csv_list, default=SOFTVAL_DEFAULTS["measures"],
                    help="Comma separated: sens,spec,ppv,npv (empty for none)")
    ev.add_argument("--regression", type=_csv_list, default=SOFTVAL_DEFAULTS["regression"],
                    help="Comma separated: mae,rmse")
    ev.add_argument("--classes", type=_csv_list, default=None, help="Classes to report (default: all)")
    ev.add_argument("--group-by", type=_csv_list, default=[], help="Group columns, e.g. iteration,fold")
    ev.add_argument("--id-column", default=SOFTVAL_DEFAULTS["id_column"])
    ev.add_argument("--harden", default=SOFTVAL_DEFAULTS["hardening"],
                    help="Also report hardened predictions: wta, wta:error, threshold=<t>, threshold>=<t>")
    ev.add_argument("--curves", action="store_true", help="Threshold sweep curves")
    ev.add_argument("--curve-grid", type=int, default=SOFTVAL_DEFAULTS["curve_grid"],
                    help="Grid size of the curve bands across groups")
    soft_rows = ev.add_mutually_exclusive_group()
    soft_rows.add_argument("--crisp-only", dest="crisp_only", action="store_true", default=True,
                           help="Fail on soft reference rows in curves (default)")
    soft_rows.add_argument("--exclude-soft", dest="crisp_only", action="store_false",
                           help="Leave soft reference rows out of curves")
    ev.add_argument("--confusion", action="store_true", help="Soft confusion matrices")
    ev.add_argument("--ideal", action="store_true", help="Measures of a perfect prediction")
    ev.add_argument("--interclass", action="store_true", help="Error summed over all classes")
    ev.add_argument("--variance", action="store_true", help="Soft versus hardened variance across groups")
    ev.add_argument("--workers", type=int, default=None, help="Threads for group evaluation")
    ev.add_argument("--out", default=None, help="Report file (default: stdout)")
    ev.add_argument("--out-format", choices=sorted(RENDERERS), default="json")
    ev.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def _config(args: argparse.Namespace) -> EvaluationConfig:
    fields = dict(
        world=args.world,
        operators=args.operators,
        measures=args.measures,
        regression=args.regression,
        classes=args.classes,
        hardening=args.harden,
        curves=args.curves,
        curve_grid=args.curve_grid,
        crisp_only=args.crisp_only,
        interclass=args.interclass,
        confusion=args.confusion,
        ideal=args.ideal,
        variance=args.variance,
    )
    if args.workers is not None:
        fields["workers"] = args.workers
    return EvaluationConfig(**fields)


def run_eval(args: argparse.Namespace) -> int:
    api = SoftValAPI()
    config = _config(args)
    report = api.evaluate_file(args.ref_pred, config, args.format, args.group_by, args.id_column)

    if args.out:
        success, message = api.save_report(report, args.out, args.out_format)
        if not success:
            logger.error(message)
            return EXIT_INPUT_ERROR
        return EXIT_OK
    sys.stdout.write(api.render(report, args.out_format))
    sys.stdout.flush()
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr,
                        force=True)
    try:
        return run_eval(args)
    except ValidationError as e:
        logger.error(f"Invalid options: {e}")
        return EXIT_INPUT_ERROR
    except (SoftValError, OSError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return exit_code_for(e)


if __name__ == "__main__":
    sys.exit(main())

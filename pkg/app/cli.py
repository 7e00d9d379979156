"""
Command line entry point.

    python -m app test --data trial.csv --hypothesis all --out table
    python -m app simulate --config config/simulations/calibration_mcar.json --out-dir results/

Reports go to stdout, logs to stderr. Exit codes: 0 success, 2 usage
error, 3 data or configuration error.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .core.config import settings
from .core.constants import EXIT_DATA, EXIT_OK, EXIT_USAGE
from .io.datasets import (
    TableFormat,
    TableSchema,
    load_simulation_config,
    read_contrast,
    read_dataset,
    read_strata,
)
from .io.reports import render_json, render_table, summary_frame, write_simulation
from .models.reports import BootstrapConfig, StatisticKind
from .services.contrasts import custom_contrast
from .services.mc_harness import simulate
from .utils.errors import RankTestError, format_error_for_user
from .workflows.factorial_analysis import ALL_HYPOTHESES, FactorialAnalysis

logger = logging.getLogger(__name__)

CUSTOM_PREFIX = "custom:"
CANONICAL_CHOICES = ("group", "time", "interaction", ALL_HYPOTHESES)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _non_negative_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _alpha(text: str) -> float:
    value = float(text)
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return value


def _statistics(text: str) -> List[StatisticKind]:
    try:
        kinds = [StatisticKind(part.strip().upper()) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"statistics must be a subset of WTS,ATS,MATS, got {text}")
    if not kinds:
        raise argparse.ArgumentTypeError("at least one statistic is required")
    return list(dict.fromkeys(kinds))


def _hypothesis(text: str) -> str:
    if text.startswith(CUSTOM_PREFIX) and len(text) > len(CUSTOM_PREFIX):
        return text
    if text.lower() in CANONICAL_CHOICES:
        return text.lower()
    raise argparse.ArgumentTypeError(
        f"hypothesis must be one of {', '.join(CANONICAL_CHOICES)} or custom:<path>, got {text}"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ranktest",
        description="Rank-based Wald-type and ANOVA-type tests with wild bootstrap "
                    "for factorial repeated measures with missing values",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--log-level", default=settings.log_level, help="logging level (stderr)")
    commands = parser.add_subparsers(dest="command", required=True)

    test = commands.add_parser("test", parents=[common], help="test hypotheses on a dataset")
    test.add_argument("--data", required=True, help="CSV input table")
    test.add_argument("--format", type=str.upper, choices=[f.value for f in TableFormat], default="WIDE")
    test.add_argument("--group-col", default="group")
    test.add_argument("--subject-col", default="subject")
    test.add_argument("--occasion-cols", help="comma-separated occasion columns (WIDE); default: all others")
    test.add_argument("--occasion-col", default="occasion", help="occasion number column (LONG)")
    test.add_argument("--value-col", default="value", help="value column (LONG)")
    test.add_argument("--missing-token", default=settings.missing_token)
    test.add_argument("--hypothesis", action="append", type=_hypothesis,
                      help="group, time, interaction, all or custom:<path>; repeatable (default: all)")
    test.add_argument("--stats", type=_statistics, default=[k for k in StatisticKind],
                      help="comma-separated subset of WTS,ATS,MATS")
    test.add_argument("--B", dest="replicates", type=_positive_int, default=settings.bootstrap_replicates)
    test.add_argument("--seed", type=_non_negative_int, default=settings.seed)
    test.add_argument("--alpha", type=_alpha, default=settings.alpha)
    test.add_argument("--out", choices=["json", "table"], default="json")
    test.add_argument("--threads", type=_non_negative_int, default=settings.threads, help="0 = all cores")
    test.add_argument("--stratify-by", help="run the analysis separately per level of this column")

    sim = commands.add_parser("simulate", parents=[common], help="run a Monte Carlo study")
    sim.add_argument("--config", required=True, help="JSON simulation config")
    sim.add_argument("--out-dir", required=True)
    sim.add_argument("--threads", type=_non_negative_int, help="override the config's thread count")
    return parser


def _schema(args: argparse.Namespace) -> TableSchema:
    occasions = None
    if args.occasion_cols:
        occasions = [c.strip() for c in args.occasion_cols.split(",") if c.strip()]
    return TableSchema(
        format=TableFormat(args.format),
        group_column=args.group_col,
        subject_column=args.subject_col,
        occasion_columns=occasions,
        occasion_column=args.occasion_col,
        value_column=args.value_col,
        missing_token=args.missing_token,
    )


def _requests(args: argparse.Namespace, dataset) -> list:
    requests = []
    for request in args.hypothesis or [ALL_HYPOTHESES]:
        if request.startswith(CUSTOM_PREFIX):
            path = Path(request[len(CUSTOM_PREFIX):])
            requests.append(custom_contrast(read_contrast(path), dataset.a, dataset.d, f"Custom ({path.name})"))
        else:
            requests.append(request)
    return requests


def cmd_test(args: argparse.Namespace) -> int:
    schema = _schema(args)
    config = BootstrapConfig(
        replicates=args.replicates,
        seed=args.seed,
        statistics=args.stats,
        threads=args.threads,
    )
    analysis = FactorialAnalysis(config, alpha=args.alpha)

    if args.stratify_by:
        strata = read_strata(args.data, args.stratify_by, schema)
        reports = [
            analysis.run(dataset, _requests(args, dataset), stratum=level)
            for level, dataset in strata.items()
        ]
    else:
        dataset = read_dataset(args.data, schema)
        reports = [analysis.run(dataset, _requests(args, dataset))]

    output = render_json(reports) if args.out == "json" else render_table(reports)
    sys.stdout.write(output + "\n")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    config = load_simulation_config(args.config)
    if args.threads is not None:
        config = config.model_copy(update={"threads": args.threads})
    result = simulate(config)
    paths = write_simulation(result, args.out_dir)
    for name, path in paths.items():
        logger.info(f"{name}: {path}")
    columns = ["cell", "hypothesis", "label", "zeta", "rejection_rate", "se", "nsim_effective", "failures"]
    sys.stdout.write(summary_frame(result)[columns].to_string(index=False) + "\n")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE

    logging.basicConfig(
        level=getattr(logging, str(args.log_level).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
    )

    try:
        if args.command == "test":
            return cmd_test(args)
        return cmd_simulate(args)
    except RankTestError as e:
        logger.debug(f"{e.error_type.value}: {e.details}")
        sys.stderr.write(format_error_for_user(e) + "\n")
        return EXIT_DATA

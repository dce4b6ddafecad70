# /handlers/study_commands.py
"""
Команда study: таблица ошибок с фильтром и без по семействам уравнений.
"""
import argparse
import logging

import texts
from core.config import DEFAULT_THREADS
from handlers.utils import add_common_flags, emit_result, parse_families
from modules.datagen import TABLE_FAMILIES
from modules.study import StudyConfig, curves_table, run_study, summary_table
from numerics.particle_filter import FilterConfig
from utils.export import emit

logger = logging.getLogger("symfilter_cli")


def handle_study(args: argparse.Namespace) -> int:
    filter_overrides = {"particles": args.particles, "steps": args.steps}
    cfg = StudyConfig(
        families=tuple(parse_families(args.families, default=list(TABLE_FAMILIES))),
        trials=args.trials,
        coeff_error=args.coeff_error,
        seed=args.seed,
        filter=FilterConfig(**{key: value for key, value in filter_overrides.items() if value is not None}),
        threads=args.threads,
    )
    results = run_study(cfg)
    table = summary_table(results)
    for row in table.itertuples():
        logger.info(f"{row.type}: символьная {row.symbolic_without:.2f}% -> {row.symbolic_with:.2f}%, "
                    f"ряд {row.series_without:.2f}% -> {row.series_with:.2f}%")
    if args.curves:
        emit(curves_table(results), "csv", args.curves)
    columns = texts.STUDY_COLUMNS if args.fmt == "csv" else None
    return emit_result(args, table, columns)


def register_study_commands(subparsers) -> None:
    p = subparsers.add_parser("study", help=texts.HELP_STUDY, description=texts.HELP_STUDY)
    p.add_argument("--families", default=None, help=texts.HELP_FAMILIES)
    p.add_argument("--trials", type=int, default=20, help=texts.HELP_TRIALS)
    p.add_argument("--coeff-error", type=float, default=0.03, help=texts.HELP_COEFF_ERROR)
    p.add_argument("--particles", type=int, default=None, help=texts.HELP_PARTICLES)
    p.add_argument("--steps", type=int, default=None, help=texts.HELP_STEPS)
    p.add_argument("--curves", default=None, help=texts.HELP_CURVES)
    p.add_argument("--threads", type=int, default=DEFAULT_THREADS, help=texts.HELP_THREADS)
    add_common_flags(p)
    p.set_defaults(handler=handle_study)

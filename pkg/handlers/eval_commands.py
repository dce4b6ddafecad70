# /handlers/eval_commands.py
"""
Команда eval: строка метрик {rel_l2, r2, symbolic_error, valid_fraction, time_series_error}.
"""
import argparse
import logging

import texts
from core.errors import UsageError
from handlers.utils import add_common_flags, emit_result
from modules.datagen import read_equation_file
from modules.metrics import metrics_report
from numerics.grid_io import read_grid
from symbolic.parser import parse_infix
from symbolic.tokens import Dialect, parse_token_text

logger = logging.getLogger("symfilter_cli")


def handle_eval(args: argparse.Namespace) -> int:
    if not (args.truth or args.obs):
        raise UsageError("Нужен хотя бы один из флагов --truth или --obs")
    truth = read_equation_file(args.truth)[0] if args.truth else None
    learned = parse_infix(args.learned, implicit_mul=True) if args.learned else None
    truth_traj = read_grid(args.obs) if args.obs else None
    pred_traj = read_grid(args.pred) if args.pred else None
    generated = [parse_token_text(text, args.dialect) for text in args.tokens] if args.tokens else None
    if learned is not None and truth is None:
        raise UsageError("Для --learned нужен --truth")

    report = metrics_report(
        truth_traj=truth_traj,
        pred_traj=pred_traj,
        learned=learned,
        truth=truth,
        generated=generated,
    )
    logger.info(f"✅ Метрики: {report}")
    return emit_result(args, report)


def register_eval_commands(subparsers) -> None:
    p = subparsers.add_parser("eval", help=texts.HELP_EVAL, description=texts.HELP_EVAL)
    p.add_argument("--truth", default=None, help=texts.HELP_TRUTH)
    p.add_argument("--learned", default=None, help=texts.HELP_LEARNED)
    p.add_argument("--obs", default=None, help=texts.HELP_OBS)
    p.add_argument("--pred", default=None, help=texts.HELP_PRED)
    p.add_argument("--tokens", action="append", default=None, help=texts.HELP_DECODE)
    p.add_argument("--dialect", choices=[d.value for d in Dialect], default=Dialect.CANONICAL.value,
                   help=texts.HELP_DIALECT)
    add_common_flags(p)
    p.set_defaults(handler=handle_eval)

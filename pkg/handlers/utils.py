# /handlers/utils.py
"""
Общие флаги и вспомогательные функции команд.
"""
import argparse
from typing import Any, List, Mapping, Optional

import texts
from core.errors import UsageError
from modules.datagen import FAMILY_NAMES
from symbolic.expr import Equation
from symbolic.parser import parse_infix
from utils.export import FORMATS, emit


def add_common_flags(parser: argparse.ArgumentParser) -> None:
    """--seed, --output и --format есть у каждой команды."""
    parser.add_argument("--seed", type=int, default=0, help=texts.HELP_SEED)
    parser.add_argument("--output", "-o", default=None, help=texts.HELP_OUTPUT)
    parser.add_argument("--format", dest="fmt", choices=FORMATS, default="json", help=texts.HELP_FORMAT)


def add_equation_flags(parser: argparse.ArgumentParser, flag: str = "--eq") -> None:
    parser.add_argument(flag, "--expr", dest="expr", required=True, help=texts.HELP_EXPR)
    parser.add_argument("--implicit-mul", action="store_true", help=texts.HELP_IMPLICIT)


def equation_from_args(args: argparse.Namespace) -> Equation:
    return parse_infix(args.expr, implicit_mul=args.implicit_mul)


def parse_families(text: Optional[str], default: Optional[List[str]] = None) -> List[str]:
    """'burgers,icl_sine' -> ['burgers', 'icl_sine'] с проверкой имён."""
    if not text:
        return list(default) if default is not None else list(FAMILY_NAMES)
    names = [name.strip() for name in text.split(",") if name.strip()]
    unknown = [name for name in names if name not in FAMILY_NAMES]
    if unknown:
        raise UsageError(f"Неизвестные семейства: {', '.join(unknown)}; допустимы: {', '.join(FAMILY_NAMES)}")
    if not names:
        raise UsageError("Список семейств пуст")
    return names


def emit_result(args: argparse.Namespace, payload: Any,
                columns: Optional[Mapping[str, str]] = None) -> int:
    emit(payload, args.fmt, args.output, columns)
    return 0

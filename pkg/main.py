# main.py
"""
Точка входа командной строки.

    python main.py canon --expr "x - 1 + 1 + y"
    python main.py study --families icl_sine --trials 20 --coeff-error 0.03
"""
import argparse
import json
import logging
import os
import sys
from typing import List, Optional

import texts
from core.config import LOG_FILE, LOG_LEVEL
from core.errors import SymfilterError, UsageError
from handlers import register_all_commands

logger = logging.getLogger("symfilter_cli")


class _ArgumentParser(argparse.ArgumentParser):
    """argparse, который бросает UsageError вместо выхода с кодом 2."""

    def error(self, message: str):
        raise UsageError(message)


def setup_logging() -> None:
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if LOG_FILE:
        log_dir = os.path.dirname(LOG_FILE)
        if log_dir and not os.path.exists(log_dir):
            os.makedirs(log_dir)
        handlers.append(logging.FileHandler(LOG_FILE, encoding="utf-8"))
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL, logging.INFO),
        format="%(asctime)s [%(levelname)s] %(message)s",
        handlers=handlers,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="symfilter", description=texts.PROG_DESCRIPTION, epilog=texts.PROG_EPILOG)
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    register_all_commands(subparsers)
    return parser


def _report_error(name: str, message: str, exit_code: int) -> int:
    logger.error(f"❌ {name}: {message}")
    sys.stderr.write(json.dumps({"error": name, "message": message, "exit_code": exit_code},
                                ensure_ascii=False) + "\n")
    return exit_code


def run(argv: Optional[List[str]] = None) -> int:
    """Разбирает аргументы, выполняет команду и возвращает код выхода."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "handler", None) is None:
            raise UsageError("Не указана команда, см. --help")
        return args.handler(args)
    except SystemExit as e:
        # --help и --version
        return e.code if isinstance(e.code, int) else 0
    except SymfilterError as e:
        return _report_error(type(e).__name__, str(e), e.exit_code)
    except (OSError, json.JSONDecodeError, KeyError) as e:
        return _report_error(type(e).__name__, str(e), 2)


if __name__ == "__main__":
    setup_logging()
    sys.exit(run())

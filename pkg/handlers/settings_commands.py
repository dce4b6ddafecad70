# /handlers/settings_commands.py
"""
Команда settings: просмотр и изменение файла настроек по пути через точку.
"""
import argparse
import json
import logging
from typing import Any

import texts
from core import settings_manager
from core.errors import ConfigError, UsageError
from handlers.utils import add_common_flags, emit_result

logger = logging.getLogger("symfilter_cli")


def _parse_value(text: str) -> Any:
    # 0.25, [0.1, 1.0], "cubic"; текст без кавычек остаётся строкой
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def handle_settings(args: argparse.Namespace) -> int:
    if args.value is not None and args.set is None:
        raise UsageError("--value используется только вместе с --set")
    if args.set is not None:
        if args.value is None:
            raise UsageError("Для --set нужен --value")
        value = _parse_value(args.value)
        if not settings_manager.update_setting(args.set, value):
            raise ConfigError(f"Не удалось изменить настройку '{args.set}'")
        logger.info(f"✅ Настройка {args.set} = {value}")
        return emit_result(args, {"path": args.set, "value": settings_manager.get_setting(args.set)})
    if args.get is not None:
        value = settings_manager.get_setting(args.get)
        if value is None:
            raise ConfigError(f"Настройка '{args.get}' не найдена")
        return emit_result(args, {"path": args.get, "value": value})
    return emit_result(args, {"value": settings_manager.get_all_settings()})


def register_settings_commands(subparsers) -> None:
    p = subparsers.add_parser("settings", help=texts.HELP_SETTINGS, description=texts.HELP_SETTINGS)
    action = p.add_mutually_exclusive_group()
    action.add_argument("--get", default=None, metavar="PATH", help=texts.HELP_SETTINGS_GET)
    action.add_argument("--set", default=None, metavar="PATH", help=texts.HELP_SETTINGS_SET)
    p.add_argument("--value", default=None, help=texts.HELP_SETTINGS_VALUE)
    add_common_flags(p)
    p.set_defaults(handler=handle_settings)

# /handlers/__init__.py
from handlers.eval_commands import register_eval_commands
from handlers.filter_commands import register_filter_commands
from handlers.numeric_commands import register_numeric_commands
from handlers.settings_commands import register_settings_commands
from handlers.study_commands import register_study_commands
from handlers.symbolic_commands import register_symbolic_commands


def register_all_commands(subparsers) -> None:
    register_symbolic_commands(subparsers)
    register_numeric_commands(subparsers)
    register_filter_commands(subparsers)
    register_eval_commands(subparsers)
    register_study_commands(subparsers)
    register_settings_commands(subparsers)

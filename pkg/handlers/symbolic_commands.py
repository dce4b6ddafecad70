# /handlers/symbolic_commands.py
"""
Команды parse, canon, tokens и perturb.
"""
import argparse
import logging

import texts
from handlers.utils import add_common_flags, add_equation_flags, emit_result, equation_from_args
from symbolic.canon import canonicalize_equation
from symbolic.expr import equation_to_infix, to_dict
from symbolic.perturb import SETTINGS, PerturbConfig, mask_coefficients, symbolic_setting
from symbolic.tokens import Dialect, encode, from_tokens, parse_token_text

logger = logging.getLogger("symfilter_cli")


def handle_parse(args: argparse.Namespace) -> int:
    eq = equation_from_args(args)
    logger.debug(f"Разобрано: {equation_to_infix(eq)}")
    return emit_result(args, {"infix": equation_to_infix(eq), "tree": to_dict(eq.residual)})


def handle_canon(args: argparse.Namespace) -> int:
    canonical = canonicalize_equation(equation_from_args(args))
    seq = encode(canonical, Dialect.CANONICAL)
    return emit_result(args, {"canonical": equation_to_infix(canonical), "tokens": list(seq.tokens)})


def handle_tokens(args: argparse.Namespace) -> int:
    if args.decode:
        eq = from_tokens(parse_token_text(args.expr, args.dialect))
        return emit_result(args, {"dialect": args.dialect, "infix": equation_to_infix(eq)})
    eq = equation_from_args(args)
    if args.mask or args.include_unit:
        eq = mask_coefficients(eq, include_unit=args.include_unit)
    seq = encode(eq, args.dialect)
    return emit_result(args, {"dialect": seq.dialect.value, "tokens": list(seq.tokens), "text": seq.bracketed()})


def handle_perturb(args: argparse.Namespace) -> int:
    eq = equation_from_args(args)
    cfg = PerturbConfig.from_settings(swap_prob=args.swap_prob, noise_prob=args.noise_prob, seed=args.seed)
    dialect = Dialect.CANONICAL if args.setting.endswith("canonical") else Dialect.MANUAL
    output, provenance = symbolic_setting(eq, args.setting, cfg)
    return emit_result(args, {
        "setting": args.setting,
        "input_tokens": list(encode(eq, dialect).tokens),
        "output_tokens": list(output.tokens),
        "injected_term": provenance.to_json(),
    })


def register_symbolic_commands(subparsers) -> None:
    p = subparsers.add_parser("parse", help=texts.HELP_PARSE, description=texts.HELP_PARSE)
    add_equation_flags(p)
    add_common_flags(p)
    p.set_defaults(handler=handle_parse)

    p = subparsers.add_parser("canon", help=texts.HELP_CANON, description=texts.HELP_CANON)
    add_equation_flags(p)
    add_common_flags(p)
    p.set_defaults(handler=handle_canon)

    p = subparsers.add_parser("tokens", help=texts.HELP_TOKENS, description=texts.HELP_TOKENS)
    add_equation_flags(p)
    p.add_argument("--dialect", choices=[d.value for d in Dialect], default=Dialect.CANONICAL.value,
                   help=texts.HELP_DIALECT)
    p.add_argument("--decode", action="store_true", help=texts.HELP_DECODE)
    p.add_argument("--mask", action="store_true", help=texts.HELP_MASK)
    p.add_argument("--include-unit", action="store_true", help=texts.HELP_MASK)
    add_common_flags(p)
    p.set_defaults(handler=handle_tokens)

    p = subparsers.add_parser("perturb", help=texts.HELP_PERTURB, description=texts.HELP_PERTURB)
    add_equation_flags(p)
    p.add_argument("--swap-prob", type=float, default=None, help=texts.HELP_SWAP_PROB)
    p.add_argument("--noise-prob", type=float, default=None, help=texts.HELP_NOISE_PROB)
    p.add_argument("--setting", choices=SETTINGS, default="noisy_swapping", help=texts.HELP_SETTING)
    add_common_flags(p)
    p.set_defaults(handler=handle_perturb)

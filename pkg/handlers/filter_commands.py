# /handlers/filter_commands.py
"""
Команда refine: уточнение коэффициентов уравнения фильтром частиц.
"""
import argparse
import logging
import time

import texts
from handlers.utils import add_common_flags, emit_result
from modules.datagen import read_equation_file
from numerics.grid_io import read_grid
from numerics.particle_filter import LIKELIHOODS, FilterConfig, LawTemplate, ObservationSeq, refine

logger = logging.getLogger("symfilter_cli")


def handle_refine(args: argparse.Namespace) -> int:
    _, law, record = read_equation_file(args.eq_file)
    traj = read_grid(args.obs)
    overrides = {
        "particles": args.particles,
        "steps": args.steps,
        "process_var": args.process_var,
        "obs_scale": args.obs_scale,
        "likelihood": args.likelihood,
    }
    cfg = FilterConfig(seed=args.seed, **{key: value for key, value in overrides.items() if value is not None})
    template = LawTemplate.from_law(law)
    alpha0 = law.coefficients()
    logger.info(f"Уточнение {record.get('id', args.eq_file)}: {cfg.particles} частиц, {cfg.steps} шагов")

    started = time.perf_counter()
    result = refine(alpha0, ObservationSeq.from_field(traj, cfg.steps + 1), template, cfg)
    elapsed = time.perf_counter() - started
    logger.info(f"✅ Уточнение заняло {elapsed:.2f} с")

    refined_law = template.law(result.coefficients)
    payload = {
        "initial_coefficients": alpha0.tolist(),
        "refined_coefficients": result.coefficients.tolist(),
        "refined_q": {"q1": refined_law.q1, "q2": refined_law.q2},
        "ess_per_step": result.ess_per_step,
        "spread": result.spread.tolist(),
    }
    if args.timing:
        payload["elapsed"] = elapsed
    return emit_result(args, payload)


def register_filter_commands(subparsers) -> None:
    p = subparsers.add_parser("refine", help=texts.HELP_REFINE, description=texts.HELP_REFINE)
    p.add_argument("--eq-file", required=True, help=texts.HELP_EQ_FILE)
    p.add_argument("--obs", required=True, help=texts.HELP_OBS)
    p.add_argument("--particles", type=int, default=None, help=texts.HELP_PARTICLES)
    p.add_argument("--steps", type=int, default=None, help=texts.HELP_STEPS)
    p.add_argument("--process-var", type=float, default=None, help=texts.HELP_PROCESS_VAR)
    p.add_argument("--obs-scale", type=float, default=None, help=texts.HELP_OBS_SCALE)
    p.add_argument("--likelihood", choices=LIKELIHOODS, default=None, help=texts.HELP_LIKELIHOOD)
    p.add_argument("--timing", action="store_true", help=texts.HELP_TIMING)
    add_common_flags(p)
    p.set_defaults(handler=handle_refine)

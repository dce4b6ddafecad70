# /handlers/numeric_commands.py
"""
Команды solve и gen: решатель законов сохранения и генерация набора данных.
"""
import argparse
import dataclasses
import logging
from pathlib import Path

import numpy as np

import texts
from core.config import DEFAULT_THREADS
from handlers.utils import add_common_flags, emit_result, parse_families
from modules.datagen import FAMILY_NAMES, SPLITS, DatasetManifest, FamilySpec, generate, read_equation_file, sample_ic
from numerics.grid_io import write_grid
from numerics.solver import solve
from symbolic.expr import equation_to_infix

logger = logging.getLogger("symfilter_cli")


def handle_solve(args: argparse.Namespace) -> int:
    spec = FamilySpec.from_settings(args.family)
    overrides = {key: value for key, value in (("nx", args.nx), ("nt", args.nt), ("t_f", args.t_final))
                 if value is not None}
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    if args.eq_file:
        _, law, _ = read_equation_file(args.eq_file)
    else:
        law = spec.law(args.q1, args.q2)

    u0 = sample_ic(spec, np.random.default_rng(args.seed))
    traj = solve(law, u0, spec.grid(), spec.t_f, spec.nt)
    write_grid(args.grid_out, traj)
    mass = traj.values.sum(axis=1) * traj.grid.dx
    logger.info(f"✅ Траектория {traj.nt}x{traj.grid.nx} записана в {args.grid_out}")
    return emit_result(args, {
        "grid": str(args.grid_out),
        "infix": equation_to_infix(law.to_equation()),
        "flux": law.flux_kind,
        "q1": law.q1,
        "q2": law.q2,
        "nt": traj.nt,
        "nx": traj.grid.nx,
        "mass_initial": float(mass[0]),
        "mass_drift": float(np.max(np.abs(mass - mass[0]))),
        "max_abs": float(np.max(np.abs(traj.values))),
    })


def handle_gen(args: argparse.Namespace) -> int:
    manifest = DatasetManifest.desk_scale(args.split, args.seed, parse_families(args.families))
    if args.params is not None:
        manifest.params_per_family = args.params
    if args.ics is not None:
        manifest.ics_per_param = args.ics
    # повторная проверка после подстановки флагов
    manifest = DatasetManifest(**{f.name: getattr(manifest, f.name) for f in dataclasses.fields(manifest)})
    index = generate(manifest, args.out_dir, threads=args.threads)
    return emit_result(args, {
        "out_dir": str(args.out_dir),
        "manifest": str(Path(args.out_dir) / "manifest.json"),
        "equations": len(index.equations),
        "skipped": index.skipped,
    })


def register_numeric_commands(subparsers) -> None:
    p = subparsers.add_parser("solve", help=texts.HELP_SOLVE, description=texts.HELP_SOLVE)
    p.add_argument("--family", choices=FAMILY_NAMES, default="burgers", help=texts.HELP_FAMILY)
    p.add_argument("--eq-file", default=None, help=texts.HELP_EQ_FILE)
    p.add_argument("--q1", type=float, default=None)
    p.add_argument("--q2", type=float, default=None)
    p.add_argument("--nx", type=int, default=None)
    p.add_argument("--nt", type=int, default=None)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--grid-out", required=True, help=texts.HELP_OBS)
    add_common_flags(p)
    p.set_defaults(handler=handle_solve)

    p = subparsers.add_parser("gen", help=texts.HELP_GEN, description=texts.HELP_GEN)
    p.add_argument("--out-dir", required=True, help=texts.HELP_OUT_DIR)
    p.add_argument("--families", default=None, help=texts.HELP_FAMILIES)
    p.add_argument("--split", choices=tuple(SPLITS), default="train", help=texts.HELP_SPLIT)
    p.add_argument("--params", type=int, default=None, help=texts.HELP_PARAMS)
    p.add_argument("--ics", type=int, default=None, help=texts.HELP_ICS)
    p.add_argument("--threads", type=int, default=DEFAULT_THREADS, help=texts.HELP_THREADS)
    add_common_flags(p)
    p.set_defaults(handler=handle_gen)

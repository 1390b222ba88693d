"""Command line interface.

Exit codes: 0 success, 2 invalid input, 3 stopped at a time limit before
optimality was proven, 4 internal consistency failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import instance as inst_io
from . import tour as tour_io
from .assignment import two_way_assign
from .bench import bench, load_references
from .exact import (
    OPTIMAL,
    InfeasibleError,
    SolveOptions,
    retain_min_for,
    solve,
    solve_large_alpha,
)
from .lpformat import write_lp
from .merging import merge_cycles
from .metrics import kopt_move_types, large_alpha_neighborhood
from .pipeline import run_pipeline
from .ppr import RecoveryError, refine_merge
from .render import render_svg
from .slppr import DEFAULT_CIRCLE_TIME, PolishConfig, polish
from .tour import TourError, tour_cost, validate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_TIME_LIMIT = 3
EXIT_INTERNAL = 4


class InputError(Exception):
    pass


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _load_instance(args):
    if getattr(args, "instance", None):
        try:
            return inst_io.load(args.instance)
        except OSError as exc:
            raise InputError(f"cannot read instance: {exc}") from exc
    if getattr(args, "n", None) is None:
        raise InputError("give an instance file or --n")
    return inst_io.generate(args.n, args.seed)


def _load_tour(path, inst):
    try:
        t = tour_io.load(path)
    except OSError as exc:
        raise InputError(f"cannot read tour: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed tour JSON: {exc}") from exc
    validate(t, inst.n, inst.fixed_pair)
    return t


def _opts(args) -> SolveOptions:
    return SolveOptions(time_limit=args.time_limit)


def _polish_cfg(args) -> PolishConfig:
    return PolishConfig(radius=args.radius, n_stp=args.nstp, passes=args.passes)


def _tour_out(inst, t, args, status=OPTIMAL) -> int:
    _emit(tour_io.dumps(t, tour_cost(inst, t)), args.out)
    return EXIT_OK if status == OPTIMAL else EXIT_TIME_LIMIT


# -- subcommands -----------------------------------------------------------


def cmd_generate(args):
    if args.n is None:
        raise InputError("--n is required")
    _emit(inst_io.dumps(inst_io.generate(args.n, args.seed, args.area)), args.out)
    return EXIT_OK


def cmd_solve_exact(args):
    inst = _load_instance(args)
    res = solve(inst, _opts(args))
    print(json.dumps({"status": res.status, **res.stats}), file=sys.stderr)
    if res.tour is None:
        print(f"no tour found ({res.status})", file=sys.stderr)
        return EXIT_TIME_LIMIT if res.status != "infeasible" else EXIT_INPUT
    return _tour_out(inst, res.tour, args, res.status)


def cmd_merge(args):
    inst = _load_instance(args)
    t, _ = merge_cycles(inst, two_way_assign(inst))
    return _tour_out(inst, t, args)


def cmd_ppr_merge(args):
    inst = _load_instance(args)
    t, collector = merge_cycles(inst, two_way_assign(inst))
    res = refine_merge(inst, t, collector, _opts(args), return_result=True)
    return _tour_out(inst, res.tour, args, res.status)


def cmd_polish(args):
    inst = _load_instance(args)
    if args.tour:
        t = _load_tour(args.tour, inst)
    else:
        t, _ = merge_cycles(inst, two_way_assign(inst))
    limit = min(DEFAULT_CIRCLE_TIME, args.time_limit) if args.time_limit else None
    t, stats = polish(inst, t, _polish_cfg(args), SolveOptions(time_limit=limit))
    if args.stats:
        Path(args.stats).write_text(stats.dumps())
    return _tour_out(inst, t, args, OPTIMAL if stats.time_limited == 0 else "limited")


def cmd_large_alpha(args):
    inst = _load_instance(args)
    if not args.tour:
        raise InputError("large-alpha needs an incumbent tour file")
    t = _load_tour(args.tour, inst)
    res = solve_large_alpha(inst, t, args.alpha, _opts(args))
    print(json.dumps({"status": res.status, **res.stats}), file=sys.stderr)
    return _tour_out(inst, res.tour if res.edges else t, args, res.status)


def _reference_for(args, name):
    if not args.ref:
        return None
    refs = load_references(args.ref)
    if name in refs:
        return refs[name]
    stem = Path(name).stem
    return refs.get(stem)


def cmd_pipeline(args):
    inst = _load_instance(args)
    name = Path(args.instance).name if args.instance else f"n{args.n}_seed{args.seed}"
    ref = _reference_for(args, name)
    t, report = run_pipeline(
        inst, _polish_cfg(args), args.alpha, _opts(args),
        use_ppr_merge=not args.no_ppr_merge, reference=ref,
    )
    report.instance["name"] = name
    _emit(report.dumps(), args.out)
    if args.tour_out:
        tour_io.save(t, args.tour_out, tour_cost(inst, t))
    if not report.complete:
        return EXIT_INTERNAL
    return EXIT_TIME_LIMIT if report.time_limited else EXIT_OK


def cmd_bench(args):
    d = Path(args.directory)
    if not d.is_dir():
        raise InputError(f"not a directory: {d}")
    refs = load_references(args.ref) if args.ref else None
    text = bench(d, _polish_cfg(args), args.alpha, _opts(args), refs,
                 use_ppr_merge=not args.no_ppr_merge)
    _emit(text, args.out)
    return EXIT_OK


def cmd_render(args):
    inst = _load_instance(args)
    tours = [_load_tour(p, inst) for p in args.tours]
    _emit(render_svg(inst, tours), args.out)
    return EXIT_OK


def cmd_export_lp(args):
    inst = _load_instance(args)
    opts = SolveOptions(time_limit=None)
    if args.tour:
        t = _load_tour(args.tour, inst)
        opts = SolveOptions(
            time_limit=None,
            retain_set=tour_io.edges_of(t),
            retain_min=retain_min_for(inst.n, args.alpha),
        )
    _emit(write_lp(inst, opts), args.out)
    return EXIT_OK


def cmd_analyze_kopt(args):
    lines = ["k,MT(k)"]
    for k in range(2, args.kmax + 1):
        lines.append(f"{k},{kopt_move_types(k)}")
    if args.n is not None:
        nb = large_alpha_neighborhood(args.n, args.alpha)
        lines.append("")
        lines.append(f"n={args.n} alpha={args.alpha} k_max={nb.k_max}")
        if nb.exact is not None:
            lines.append(f"N_total={nb.exact}")
        lines.append(f"log10(N_total)={nb.log10:.4f}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


# -- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jra", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, instance=True, solve=True, pol=False):
        if instance:
            sp.add_argument("instance", nargs="?", help="instance JSON (or use --n/--seed)")
            sp.add_argument("--n", type=int)
            sp.add_argument("--seed", type=int, default=0)
        if solve:
            sp.add_argument("--time-limit", type=float, default=60.0)
        if pol:
            sp.add_argument("--radius", type=float, default=0.2)
            sp.add_argument("--nstp", type=int, default=3)
            sp.add_argument("--passes", type=int, default=2)
        sp.add_argument("--out", help="output file (default stdout)")

    sp = sub.add_parser("generate", help="write a seeded uniform instance")
    sp.add_argument("--n", type=int)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--area", type=float, default=1.0)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_generate)

    sp = sub.add_parser("solve-exact", help="exact branch-and-cut solve")
    common(sp)
    sp.set_defaults(func=cmd_solve_exact)

    sp = sub.add_parser("merge", help="two-way assignment plus cycle merging")
    common(sp, solve=False)
    sp.set_defaults(func=cmd_merge)

    sp = sub.add_parser("ppr-merge", help="merge, then re-solve around merged nodes")
    common(sp)
    sp.set_defaults(func=cmd_ppr_merge)

    sp = sub.add_parser("polish", help="circle-by-circle polishing of a tour")
    common(sp, pol=True)
    sp.add_argument("--tour", help="starting tour JSON (default: merged tour)")
    sp.add_argument("--stats", help="write per-circle statistics JSON here")
    sp.set_defaults(func=cmd_polish)

    sp = sub.add_parser("large-alpha", help="re-solve keeping most incumbent edges")
    common(sp)
    sp.add_argument("--tour", help="incumbent tour JSON")
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.set_defaults(func=cmd_large_alpha)

    sp = sub.add_parser("pipeline", help="full workflow with a JSON report")
    common(sp, pol=True)
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.add_argument("--no-ppr-merge", action="store_true")
    sp.add_argument("--ref", help="reference costs JSON")
    sp.add_argument("--tour-out", help="write the final tour JSON here")
    sp.set_defaults(func=cmd_pipeline)

    sp = sub.add_parser("bench", help="pipeline over a directory, CSV table")
    sp.add_argument("directory")
    common(sp, instance=False, pol=True)
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.add_argument("--no-ppr-merge", action="store_true")
    sp.add_argument("--ref", help="reference costs JSON")
    sp.set_defaults(func=cmd_bench)

    sp = sub.add_parser("render", help="SVG drawing of an instance and tours")
    common(sp, solve=False)
    sp.add_argument("--tour", dest="tours", action="append", default=[])
    sp.set_defaults(func=cmd_render)

    sp = sub.add_parser("export-lp", help="write the model in LP format")
    common(sp, solve=False)
    sp.add_argument("--tour", help="incumbent for the retain row")
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.set_defaults(func=cmd_export_lp)

    sp = sub.add_parser("analyze-kopt", help="k-opt move counts and neighbourhood size")
    sp.add_argument("--kmax", type=int, default=10)
    sp.add_argument("--n", type=int)
    sp.add_argument("--alpha", type=float, default=0.15)
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_analyze_kopt)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InputError, inst_io.InstanceError, TourError, InfeasibleError,
            ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (RecoveryError, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

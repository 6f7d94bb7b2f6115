"""Command-line driver.

Exit status: 0 ok, 2 bad input, 3 work cap exceeded, 4 internal invariant broken.
Identical arguments produce byte-identical output.
"""
from __future__ import annotations

import argparse
import math
import sys
from collections.abc import Callable
from statistics import fmean

from . import report
from .elemset import ElemSet
from .errors import InputError, InvariantViolation, WorkCapExceeded
from .exponents import c_of_d, exponent_table
from .fpoly import Poly, format_poly, orbit, parse_poly
from .gf_tower import FieldCtx, decode, encode, field_from_spec
from .klinalg import AffineSubspace, random_affine
from .rng import SplitMix64
from .setcalc import plunnecke_check
from . import theorems


def random_subset(ctx: FieldCtx, size: int, seed: int) -> ElemSet:
    if not 1 <= size <= ctx.order:
        raise InputError(f"set size must lie in [1, {ctx.order}]")
    return ElemSet.from_indices(ctx.order, SplitMix64(seed).sample(ctx.order, size))


def _field(args) -> FieldCtx:
    return field_from_spec(args.field, allow_r1=args.allow_r1, max_order=args.cap)


def _poly(ctx: FieldCtx, args) -> Poly:
    if not args.poly:
        raise InputError("--poly is required for this command")
    return parse_poly(ctx, args.poly)


def _u(ctx: FieldCtx, args) -> int:
    if args.u is None:
        raise InputError("--u is required for this command")
    return decode(ctx, args.u)


def _lit(ctx: FieldCtx, f: Poly) -> str:
    # space separated so CSV cells never need quoting
    return format_poly(ctx, f).replace(",", " ")


def _seeds(args):
    return [args.seed + i for i in range(args.samples)]


def _verdict(cond) -> str:
    return "satisfied" if cond.satisfied else "violated"


# commands ---------------------------------------------------------------


def cmd_field_info(args):
    ctx = _field(args)
    rows = [
        {"d": s.d, "size": s.size, "contains_K": s.contains_K, "contained_in_K": s.contained_in_K}
        for s in ctx.subfields()
    ]
    summary = {
        "field": ctx.spec,
        "order": ctx.order,
        "q": ctx.q,
        "g": list(ctx.g),
        "h": [encode(ctx, c) if ctx.r > 1 else c for c in ctx.h],
        "generator": encode(ctx, ctx.generator()),
        "subfields": rows,
    }
    return rows, summary


def cmd_orbit(args):
    ctx = _field(args)
    f = _poly(ctx, args)
    u = _u(ctx, args)
    orb = orbit(ctx, f, u)
    row = {
        "field_spec": ctx.spec, "poly_literal": _lit(ctx, f), "u": encode(ctx, u),
        "tail": orb.tail_len, "cycle": orb.cycle_len, "T_u": orb.orbit_size,
        "elements": " ".join(encode(ctx, x) for x in orb.elements),
    }
    return [row], dict(row)


def cmd_detect(args):
    ctx = _field(args)
    f = _poly(ctx, args)
    u = _u(ctx, args)
    d_sub = args.dsub if args.dsub is not None else ctx.m
    res = theorems.detect_subfield_iterate(ctx, f, u, d_sub, args.N)
    row = {
        "field_spec": ctx.spec, "poly_literal": _lit(ctx, f), "u": encode(ctx, u),
        "N": args.N, "d_sub": d_sub, "hits": res.hits_count, "T_u": res.orbit_size,
        "within_orbit": res.within_orbit, "threshold": res.threshold,
        "threshold_met": res.threshold_met, "found_k": res.found_k,
        "method": res.verification_method,
    }
    summary = dict(row, gaps={str(h): a for h, a in res.histogram.counts.items()})
    return [row], summary


def cmd_verify_subfield(args):
    ctx = _field(args)
    d_sub = args.dsub if args.dsub is not None else ctx.m
    if args.exhaustive:
        rep = theorems.verify_thm_subfield(ctx, args.degree, leading=args.leading, d_sub=d_sub)
    else:
        rng = SplitMix64(args.seed)
        coeff_set = sorted({rng.below(ctx.order) for _ in range(args.samples)} | {0, 1})
        rep = theorems.verify_thm_subfield(ctx, args.degree, coeff_set=coeff_set,
                                           leading=args.leading, d_sub=d_sub)
    summary = rep.to_json()
    summary["seed"] = args.seed if not args.exhaustive else None
    row = {k: v for k, v in summary.items() if not isinstance(v, (dict, list))}
    return [row], summary


def cmd_expansion(args):
    ctx = _field(args)
    f = _poly(ctx, args)
    rows = []
    for seed in _seeds(args):
        A = random_subset(ctx, args.size, seed)
        rep = theorems.expansion_experiment(ctx, A, f)
        rows.append({
            "field_spec": ctx.spec, "poly_literal": _lit(ctx, f), "size": args.size,
            "M": rep.M, "gamma_M": rep.gamma_M, "xi_M": rep.xi_M,
            "measured_exponent": rep.measured_exponent, "no_growth": rep.no_growth,
            "worst_d": rep.condition.worst_d, "worst_count": rep.condition.worst_count,
            "condition": _verdict(rep.condition), "seed": seed,
        })
    exps = [r["measured_exponent"] for r in rows if r["measured_exponent"] is not None]
    summary = {
        "field": ctx.spec, "poly": _lit(ctx, f), "instances": len(rows),
        "mean_exponent": fmean(exps) if exps else None,
        "min_exponent": min(exps) if exps else None,
        "fraction_above_one": sum(e > 1 for e in exps) / len(exps) if exps else None,
        "condition_satisfied": sum(r["condition"] == "satisfied" for r in rows),
    }
    return rows, summary


def _subspace(ctx, args, seed) -> AffineSubspace:
    return random_affine(ctx, args.dim, seed)


def cmd_polydim(args):
    ctx = _field(args)
    f = _poly(ctx, args)
    rows = []
    for seed in _seeds(args):
        A = _subspace(ctx, args, seed)
        rep = theorems.polydim_experiment(ctx, A, f, strict=not args.nonstrict)
        rows.append({
            "field_spec": ctx.spec, "poly_literal": _lit(ctx, f),
            "base": encode(ctx, A.base), "basis": " ".join(encode(ctx, v) for v in A.basis),
            "s": rep.s, "dim_fA": rep.dim_fA, "ratio": rep.ratio,
            "hypotheses": rep.hypotheses_hold, "condition": _verdict(rep.condition), "seed": seed,
        })
    summary = {"field": ctx.spec, "poly": _lit(ctx, f), "instances": len(rows),
               "max_dim_fA": max(r["dim_fA"] for r in rows) if rows else None}
    return rows, summary


def cmd_intersect(args):
    ctx = _field(args)
    f = _poly(ctx, args)
    rows = []
    for seed in _seeds(args):
        A = _subspace(ctx, args, seed)
        rep = theorems.intersection_experiment(ctx, A, f, strict=not args.nonstrict)
        rows.append({
            "field_spec": ctx.spec, "poly_literal": _lit(ctx, f),
            "base": encode(ctx, A.base), "basis": " ".join(encode(ctx, v) for v in A.basis),
            "s": rep.s, "card_intersection": rep.card_intersection,
            "bound_exponent": rep.bound_exponent, "log_ratio": rep.log_ratio,
            "inclusions": rep.inclusions_hold, "hypotheses": rep.hypotheses_hold,
            "condition": _verdict(rep.condition), "seed": seed,
        })
    summary = {"field": ctx.spec, "poly": _lit(ctx, f), "instances": len(rows),
               "inclusions_all": all(r["inclusions"] for r in rows),
               "max_intersection": max(r["card_intersection"] for r in rows) if rows else None}
    return rows, summary


def cmd_orbit_run(args):
    ctx = _field(args)
    f = _poly(ctx, args)
    u = _u(ctx, args)
    rows = []
    for seed in _seeds(args):
        A = _subspace(ctx, args, seed)
        if args.anchor:
            A = AffineSubspace(u, A.basis)
        rep = theorems.orbit_run_experiment(ctx, f, u, A)
        rows.append({
            "field_spec": ctx.spec, "poly_literal": _lit(ctx, f), "u": encode(ctx, u),
            "base": encode(ctx, A.base), "basis": " ".join(encode(ctx, v) for v in A.basis),
            "run_from_zero": rep.run_from_zero, "longest_run": rep.longest_run,
            "T_u": rep.orbit_size, "subspace_size": rep.subspace_size,
            "exponent": rep.exponent, "seed": seed,
        })
    runs = [r["exponent"] for r in rows if r["exponent"] is not None]
    summary = {"field": ctx.spec, "instances": len(rows), "with_run": len(runs),
               "min_exponent": min(runs) if runs else None}
    return rows, summary


def cmd_exponents(args):
    base = math.e if args.log_base == "e" else 2.0
    rows = []
    for row in exponent_table(args.dmax, args.c2):
        rows.append({
            "d": row.d, "eta": row.eta, "theta": row.theta, "kappa": row.kappa, "rho": row.rho,
            "log_c": row.log_c, "c_of_d_threshold_coefficient": c_of_d(row.d, base),
        })
    summary = {"dmax": args.dmax, "c2": args.c2, "log_base": args.log_base, "rows": rows}
    return rows, summary


def cmd_sp_measure(args):
    ctx = _field(args)
    rows = []
    for seed in _seeds(args):
        A = random_subset(ctx, args.size, seed)
        rep = theorems.sp_gen_measure(ctx, A)
        rows.append({
            "field_spec": ctx.spec, "size": rep.M, "ratio_card": rep.ratio_card,
            "quad_card": rep.quad_card, "lhs1": rep.lhs1, "lhs2": rep.lhs2, "rhs": rep.rhs,
            "zero_skipped": rep.zero_skipped, "condition": _verdict(rep.condition), "seed": seed,
        })
    summary = {"field": ctx.spec, "instances": len(rows),
               "max_lhs_over_rhs": max(max(r["lhs1"], r["lhs2"]) / r["rhs"] for r in rows) if rows else None}
    return rows, summary


def cmd_plunnecke(args):
    ctx = _field(args)
    rows = []
    for seed in _seeds(args):
        U = random_subset(ctx, args.size, seed)
        rep = plunnecke_check(ctx, U, args.variant)
        rows.append({"field_spec": ctx.spec, "size": U.card, "lhs": rep.lhs, "rhs": rep.rhs,
                     "holds": rep.holds, "variant": rep.variant, "seed": seed})
    summary = {"field": ctx.spec, "instances": len(rows),
               "failures": sum(not r["holds"] for r in rows), "variant": args.variant}
    return rows, summary


COMMANDS: dict[str, Callable] = {
    "field-info": cmd_field_info,
    "orbit": cmd_orbit,
    "detect": cmd_detect,
    "verify-subfield": cmd_verify_subfield,
    "expansion": cmd_expansion,
    "polydim": cmd_polydim,
    "intersect": cmd_intersect,
    "orbit-run": cmd_orbit_run,
    "exponents": cmd_exponents,
    "sp-measure": cmd_sp_measure,
    "plunnecke": cmd_plunnecke,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ffdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--field", default="2^1^6", help="tower as p^m^r")
        p.add_argument("--allow-r1", action="store_true", help="permit r = 1 (prime-field oracle mode)")
        p.add_argument("--poly", help="coefficient literals, low degree first, comma separated")
        p.add_argument("--u", help="starting element literal")
        p.add_argument("--N", type=int, default=100)
        p.add_argument("--dsub", type=int)
        p.add_argument("--dim", type=int, default=2)
        p.add_argument("--size", type=int, default=16)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--samples", type=int, default=1)
        p.add_argument("--cap", type=int, help="field-size cap (overrides FFDYN_MAX_FIELD)")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--exhaustive", action="store_true")
        p.add_argument("--degree", type=int, default=2)
        p.add_argument("--leading", choices=("monic", "all"), default="monic")
        p.add_argument("--dmax", type=int, default=10)
        p.add_argument("--c2", type=float, default=1.0)
        p.add_argument("--log-base", choices=("e", "2"), default="e")
        p.add_argument("--variant", choices=("standard", "displayed"), default="standard")
        p.add_argument("--nonstrict", action="store_true",
                       help="polydim/intersect: report rather than enforce p > deg f")
        p.add_argument("--anchor", action="store_true", help="orbit-run: base the subspace at u")
    return parser


def render(args) -> tuple[str, dict]:
    rows, summary = COMMANDS[args.command](args)
    if args.format == "json":
        return report.to_json({"summary": summary, "rows": rows}), summary
    return report.to_csv(rows), summary


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.cap is not None and args.cap < 1:
        print("error: --cap must be positive", file=sys.stderr)
        return 2
    try:
        text, summary = render(args)
    except (InputError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WorkCapExceeded as exc:
        print(f"work cap exceeded: {exc}", file=sys.stderr)
        return 3
    except (InvariantViolation, AssertionError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    if args.command == "verify-subfield":
        print(f"counterexamples: {summary['counterexamples']}", file=sys.stderr)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())

"""Command-line interface.

Subcommands: solve, sample, decompose, gadget, verify, reduce, experiment,
bm-check.  Results print as JSON on stdout; experiments additionally write
CSV / JSON-lines files when output paths are configured.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

import numpy as np

from . import harness
from .core import load_profile, save_profile
from .gadgets import (
    ReductionConfig,
    build_eulerian_profile,
    build_tournament_profile,
    build_triangle_profile,
    check_gadget_identities,
    load_fas,
    mallows_witness,
    verify_witness,
)
from .graph_algebra import format_wmg, orthogonal_decompose, parse_wmg


def _emit(obj) -> None:
    print(json.dumps(obj, sort_keys=True, default=str))


def _phi_arg(s: str):
    return Fraction(s) if "/" in s else float(s)


def cmd_solve(args) -> int:
    from .solvers import get_solver, result_record, slater_brute

    profile = load_profile(args.input)
    if args.rule == "slater":
        res = slater_brute(profile)
    else:
        res = get_solver(args.solver)(profile)
    _emit(result_record(res))
    return 0


def cmd_sample(args) -> int:
    from .gadgets import round_to_integral
    from .models import load_parameter_profile, sample_profile

    pp = load_parameter_profile(args.input)
    if args.round_k:
        pp = round_to_integral(pp, args.round_k, max_n=args.max_n)
    rng = np.random.default_rng(args.seed)
    prof = sample_profile(pp, rng)
    save_profile(prof, args.out)
    _emit({"written": args.out, "n": int(prof.n), "m": prof.m, "types": len(prof)})
    return 0


def cmd_decompose(args) -> int:
    with open(args.input, "r", encoding="utf-8") as fh:
        g = parse_wmg(fh.read())
    g_cyc, g_co = orthogonal_decompose(g)
    if args.out_cyclic:
        with open(args.out_cyclic, "w", encoding="utf-8") as fh:
            fh.write(format_wmg(g_cyc))
    if args.out_cocyclic:
        with open(args.out_cocyclic, "w", encoding="utf-8") as fh:
            fh.write(format_wmg(g_co))
    _emit(
        {
            "m": g.m,
            "cyclic": format_wmg(g_cyc).splitlines()[1:],
            "cocyclic": format_wmg(g_co).splitlines()[1:],
        }
    )
    return 0


def cmd_gadget(args) -> int:
    from .models import save_parameter_profile

    phi = _phi_arg(args.phi)
    if args.kind == "triangle":
        theta = mallows_witness(args.m, phi)
        pp = build_triangle_profile(theta)
    else:
        if not args.input:
            print("gadget: --in <instance file> is required for graph gadgets", file=sys.stderr)
            return 2
        inst = load_fas(args.input)
        theta = mallows_witness(inst.graph.m, phi)
        if args.kind == "eulerian":
            pp = build_eulerian_profile(inst.graph, theta)
        else:
            pp = build_tournament_profile(inst.graph, theta, theta)
    save_parameter_profile(pp, args.out)
    _emit(
        {
            "written": args.out,
            "types": pp.type_count,
            "total_weight": float(pp.total_weight),
        }
    )
    return 0


def cmd_verify(args) -> int:
    phi = _phi_arg(args.phi)
    if args.target == "gadgets":
        theta = mallows_witness(args.m, phi)
        checks = check_gadget_identities(args.m, theta)
        for c in checks:
            status = "PASS" if c.passed else "FAIL"
            print(f"{status} {c.name} {c.detail}", file=sys.stderr)
        ok = all(c.passed for c in checks)
        _emit({"target": "gadgets", "m": args.m, "phi": str(phi), "all_passed": ok})
        return 0 if ok else 1
    report = verify_witness(args.family, phi=phi)
    _emit(
        {
            "target": "witness",
            "family": report.family,
            "alpha": report.alpha,
            "beta": report.beta,
            "gamma": report.gamma,
            "alpha_prob_form": report.alpha_prob_form,
            "k": report.k,
            "k_star": report.k_star,
            "A": report.A,
            "B": report.B,
            "ok_3cycle": report.ok_3cycle,
            "ok_cocycle": report.ok_cocycle,
        }
    )
    return 0 if (report.ok_3cycle and report.ok_cocycle) else 1


def cmd_reduce(args) -> int:
    inst = load_fas(args.input)
    rcfg = ReductionConfig(K=args.K, solver=args.solver, phi=float(args.phi))
    summary, rows = harness.reduction_trials(inst, rcfg, args.trials, args.seed)
    if args.out:
        harness.write_jsonl(args.out, rows, f"reduce-K{args.K}", args.seed)
    _emit(summary)
    return 0


def cmd_experiment(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        cfg = harness.ExperimentConfig.from_text(fh.read())
    summary = harness.run_experiment(cfg)
    _emit(summary)
    return 0


def cmd_bm_check(args) -> int:
    p = harness.BmParams(m=args.m, n=args.n, phi_max=args.phi_max)
    report = harness.bm_paradox_check(p)
    _emit(
        {
            "threshold_m": report.threshold_m,
            "in_regime": report.in_regime,
            "inequality_holds": report.inequality_holds,
            "lhs_log": report.lhs_log,
            "rhs_log": report.rhs_log,
            "ell_bits": p.ell_bits,
            "log_outcomes": p.log_outcomes,
            "log_phi_floor": p.log_phi_floor,
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="votelab", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="solve a profile file")
    p.add_argument("rule", choices=["kemeny", "slater"])
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--solver", default="dp", choices=["dp", "brute"])
    p.set_defaults(fn=cmd_solve)

    p = sub.add_parser("sample", help="sample an election from a parameter profile")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--round-k", dest="round_k", type=int, default=0)
    p.add_argument("--max-n", dest="max_n", type=int, default=1_000_000)
    p.set_defaults(fn=cmd_sample)

    p = sub.add_parser("decompose", help="orthogonal cycle/co-cycle decomposition")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out-cyclic", default="")
    p.add_argument("--out-cocyclic", default="")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("gadget", help="build a gadget parameter profile")
    p.add_argument("kind", choices=["triangle", "eulerian", "tournament"])
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--phi", default="1/2")
    p.add_argument("--in", dest="input", default="")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gadget)

    p = sub.add_parser("verify", help="verify gadget identities or witness margins")
    p.add_argument("target", choices=["gadgets", "witness"])
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--phi", default="1/2")
    p.add_argument("--family", default="mallows", choices=["mallows", "pl"])
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("reduce", help="randomized feedback-arc-set decision")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--K", type=int, default=9)
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--phi", default="0.5")
    p.add_argument("--solver", default="dp", choices=["dp", "brute"])
    p.add_argument("--out", default="")
    p.set_defaults(fn=cmd_reduce)

    p = sub.add_parser("experiment", help="run a named experiment from a config file")
    p.add_argument("--config", required=True)
    p.set_defaults(fn=cmd_experiment)

    p = sub.add_parser("bm-check", help="enumeration-is-smoothed-efficient calculator")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--phi-max", dest="phi_max", type=float, default=0.5)
    p.set_defaults(fn=cmd_bm_check)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    raise SystemExit(main())

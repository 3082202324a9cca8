"""Command-line interface.

Exit codes: 0 success, 1 verification/assertion failure, 2 degenerate or
invalid input.  Every randomized path takes a mandatory --seed, and every
report embeds enough of the configuration to reproduce the run.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from .builder import BuildConfig, baseline_hw_net, build_net, explain_coverage
from .dual import family_dual_stats
from .envelope import face_degrees_and_pockets, incremental_degrees, peel_layers
from .errors import DegeneracyError, RetryLimitError, VerificationError
from .instances import (
    DEFAULT_BOX,
    GENERATOR_KINDS,
    Instance,
    elekes_demo,
    generate,
    load_instance,
    save_instance,
)
from .pipeline import PipelineConfig, run_pipeline
from .ranges import TraceEnumerator, verify_net

CSV_COLUMNS = [
    "generator",
    "n",
    "dim",
    "epsilon",
    "beta",
    "seed",
    "family_size",
    "net_size",
    "baseline_size",
    "valid",
    "millis",
]


def _frac(text: str) -> Fraction:
    return Fraction(text)


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def net_report_json(report) -> dict:
    return {
        "epsilon": _frac_str(report.epsilon),
        "beta": _frac_str(report.beta),
        "net": [int(i) for i in report.net],
        "families": [
            {
                "scale": _frac_str(f.scale),
                "members": [
                    {
                        "trace": [int(i) for i in m.indices],
                        "contacts": [int(i) for i in m.contacts],
                        "subnet": [int(i) for i in s],
                    }
                    for m, s in zip(f.members, f.subnets)
                ],
            }
            for f in report.families
        ],
        "valid": bool(report.verdict.valid),
    }


def cmd_gen(args) -> int:
    inst = generate(args.kind, args.n, args.seed, dim=args.dim, box=args.box)
    save_instance(inst, args.output)
    print(f"wrote {args.output}: {inst.n} points, dim {inst.dim}, kind {args.kind}, seed {args.seed}")
    return 0


def cmd_build(args) -> int:
    inst = load_instance(args.instance)
    config = BuildConfig(args.epsilon, args.beta, args.mode, args.subnet_method, args.seed)
    enum = TraceEnumerator(inst.points)
    report = build_net(inst.points, config, enum=enum)
    if args.output:
        Path(args.output).write_text(json.dumps(net_report_json(report), sort_keys=True))
    sizes = ", ".join(f"{f['side']}@{f['scale']}:{f['members']}" for f in report.stats["family_sizes"])
    print(
        f"net size {len(report.net)} (n={inst.n}, eps={_frac_str(config.eps)}), "
        f"families [{sizes}], valid={report.verdict.valid}, {report.stats['millis']:.0f} ms"
    )
    if args.explain:
        cov = explain_coverage(inst.points, report, enum=enum)
        print(
            f"coverage: {cov.heavy_traces} heavy traces, "
            f"{cov.via_member_equality} hit their own member, "
            f"{cov.via_neighbor} hit a neighbor subnet, {cov.uncovered} uncovered"
        )
        if cov.uncovered:
            raise VerificationError("coverage explanation found uncovered heavy traces")
    return 0


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    data = json.loads(Path(args.net).read_text())
    eps = args.epsilon if args.epsilon is not None else Fraction(data["epsilon"])
    verdict = verify_net(inst.points, data["net"], eps)
    if verdict.valid:
        print(f"valid: every trace with >= {verdict.heavy_threshold} points is hit")
        return 0
    print(f"INVALID: witness trace of size {verdict.witness.size} misses the net: {verdict.witness.indices}")
    return 1


def cmd_diagnose_envelope(args) -> int:
    inst = load_instance(args.instance)
    config = BuildConfig(args.epsilon, args.beta, seed=args.seed)
    enum = TraceEnumerator(inst.points)
    report = build_net(inst.points, config, enum=enum)
    out = {"epsilon": _frac_str(config.eps), "beta": _frac_str(config.beta), "families": []}
    failures = 0
    for fam in report.families:
        es = face_degrees_and_pockets(inst.points, fam, seed=args.seed)
        peel = peel_layers(inst.points, fam, seed=args.seed)
        inc = incremental_degrees(inst.points, fam, seed=args.seed, permutations=args.permutations)
        t = es.t
        all_on = all(es.on_envelope)
        sum_deg = es.total_degree()
        light = [i for i, d in enumerate(es.degrees) if d is not None and d <= 11]
        pocket_floor = math.ceil(config.eps * inst.n / 2)
        pockets_ok = all(len(es.pockets[i]) >= pocket_floor for i in light)
        entry = {
            "side": fam.side,
            "t": t,
            "all_on_envelope": all_on,
            "sum_degrees": sum_deg,
            "degree_budget": 6 * t,
            "light_faces": len(light),
            "pocket_floor": pocket_floor,
            "pockets_ok": pockets_ok,
            "peel_layers": list(peel.layer_sizes),
            "mean_degree_at_birth_ratio": inc.mean_degree_ratio,
        }
        out["families"].append(entry)
        ok = all_on and sum_deg < 6 * t and 2 * len(light) >= t and pockets_ok and len(peel.layers) == 1
        print(
            f"{fam.side}: t={t} on_envelope={all_on} sum_deg={sum_deg}<{6*t} "
            f"light={len(light)}/{t} pockets>={pocket_floor}:{pockets_ok} "
            f"peel={peel.layer_sizes} birth_ratio={inc.mean_degree_ratio:.2f} -> {'ok' if ok else 'FAIL'}"
        )
        failures += 0 if ok else 1
    if args.output:
        Path(args.output).write_text(json.dumps(out, sort_keys=True))
    return 1 if failures else 0


def cmd_diagnose_dual(args) -> int:
    inst = load_instance(args.instance)
    config = BuildConfig(args.epsilon, args.beta, seed=args.seed)
    enum = TraceEnumerator(inst.points)
    report = build_net(inst.points, config, enum=enum)
    out = {"epsilon": _frac_str(config.eps), "beta": _frac_str(config.beta), "families": []}
    failures = 0
    for fam in report.families:
        st = family_dual_stats(inst.points, fam, config.beta, seed=args.seed)
        k = st.k
        levels_ok = all(k <= l <= 2 * k for l in st.member_levels)
        sep_ok = st.min_pairwise_distance is None or st.min_pairwise_distance >= st.separation_bound
        b = st.balls
        ok = levels_ok and sep_ok and st.triangle_inequality_ok and b.disjoint and b.level_bounds_ok and b.sum_sizes <= b.shallow_count
        entry = {
            "side": fam.side,
            "k": k,
            "levels": list(st.member_levels),
            "min_pairwise_distance": st.min_pairwise_distance,
            "separation_bound": _frac_str(st.separation_bound),
            "ball_sizes": list(b.ball_sizes),
            "balls_disjoint": b.disjoint,
            "ball_levels_ok": b.level_bounds_ok,
            "shallow_3k": b.shallow_count,
            "min_ball_over_r3": b.min_size_over_r3,
            "shallow_over_nk2": b.count_over_nk2,
        }
        out["families"].append(entry)
        print(
            f"{fam.side}: k={k} levels={list(st.member_levels)} min_d={st.min_pairwise_distance} "
            f">= {_frac_str(st.separation_bound)}:{sep_ok} balls={list(b.ball_sizes)} disjoint={b.disjoint} "
            f"sum={b.sum_sizes}<=shallow3k={b.shallow_count} -> {'ok' if ok else 'FAIL'}"
        )
        failures += 0 if ok else 1
    if args.output:
        Path(args.output).write_text(json.dumps(out, sort_keys=True))
    return 1 if failures else 0


def cmd_pipeline_dual(args) -> int:
    inst = load_instance(args.instance)
    config = PipelineConfig(args.epsilon, args.approx_multiplier, args.beta, args.seed)
    trace = run_pipeline(inst.points, config)
    if args.output:
        payload = {
            "epsilon": _frac_str(config.eps),
            "beta": _frac_str(config.beta),
            "x_indices": list(trace.x_indices),
            "members": [list(m) for m in trace.members],
            "member_x_levels": list(trace.member_x_levels),
            "member_h_levels": list(trace.member_h_levels),
            "net": list(trace.net),
            "valid": trace.verdict.valid,
            "attempts": trace.attempts,
            "stats": trace.stats,
        }
        Path(args.output).write_text(json.dumps(payload, sort_keys=True))
    print(
        f"pipeline net size {len(trace.net)} valid={trace.verdict.valid} "
        f"|X|={len(trace.x_indices)} |S|={trace.shallow_count} |F|={len(trace.members)} "
        f"attempts={trace.attempts}"
    )
    return 0


def cmd_elekes(args) -> int:
    report = elekes_demo(args.k)
    if args.output:
        Path(args.output).write_text(json.dumps(report.to_json_dict(), sort_keys=True))
    print(
        f"k={report.k}: n={report.n}, eps={_frac_str(report.epsilon)}, {report.line_count} lines, "
        f"each with exactly {report.points_per_line} grid points, pairwise shared <= "
        f"{report.max_pairwise_shared}, family size {report.family_size} = Omega(eps^-3/2)"
    )
    return 0


def cmd_sweep(args) -> int:
    epsilons = [Fraction(tok) for tok in args.epsilons.split(",") if tok]
    seeds = [int(tok) for tok in args.seeds.split(",") if tok]
    rows = []
    for seed in seeds:
        inst = generate(args.kind, args.n, seed, dim=args.dim, box=args.box)
        enum = TraceEnumerator(inst.points)
        for eps in epsilons:
            t0 = time.perf_counter()
            config = BuildConfig(eps, args.beta, seed=seed)
            report = build_net(inst.points, config, enum=enum)
            baseline = baseline_hw_net(inst.points, eps, seed, enum=enum)
            millis = (time.perf_counter() - t0) * 1000.0
            family_size = max(
                (len(f) for f in report.families if f.scale == eps), default=0
            )
            rows.append(
                {
                    "generator": args.kind,
                    "n": inst.n,
                    "dim": inst.dim,
                    "epsilon": _frac_str(eps),
                    "beta": _frac_str(config.beta),
                    "seed": seed,
                    "family_size": family_size,
                    "net_size": len(report.net),
                    "baseline_size": len(baseline.net),
                    "valid": report.verdict.valid,
                    "millis": f"{millis:.1f}",
                }
            )
            print(
                f"eps={_frac_str(eps)} seed={seed}: |F|={family_size} |N|={len(report.net)} "
                f"baseline={len(baseline.net)} valid={report.verdict.valid} {millis:.0f} ms"
            )
    with open(args.output, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {args.output} ({len(rows)} rows)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="epsnets", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random general-position instance")
    p.add_argument("--kind", choices=GENERATOR_KINDS, default="cube_uniform")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=3, choices=(2, 3))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--box", type=int, default=DEFAULT_BOX)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("build", help="build and verify a net")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", type=_frac, required=True)
    p.add_argument("--beta", type=_frac, default=Fraction(1, 22))
    p.add_argument("--mode", choices=("single_scale", "doubling"), default="single_scale")
    p.add_argument("--subnet-method", choices=("greedy_hitting_set", "sample_and_verify"), default="greedy_hitting_set")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--explain", action="store_true", help="also run the per-trace coverage explanation")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="verify a net file against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--net", required=True)
    p.add_argument("--epsilon", type=_frac, default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("diagnose-envelope", help="envelope membership/degree/pocket/peeling diagnostics")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", type=_frac, required=True)
    p.add_argument("--beta", type=_frac, default=Fraction(1, 22))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--permutations", type=int, default=20)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_diagnose_envelope)

    p = sub.add_parser("diagnose-dual", help="dual levels/crossing-distance/ball diagnostics")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", type=_frac, required=True)
    p.add_argument("--beta", type=_frac, default=Fraction(1, 22))
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_diagnose_dual)

    p = sub.add_parser("pipeline-dual", help="dual-space construction with primal verification")
    p.add_argument("--instance", required=True)
    p.add_argument("--epsilon", type=_frac, required=True)
    p.add_argument("--beta", type=_frac, default=Fraction(1, 16))
    p.add_argument("--approx-multiplier", type=int, default=4)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_pipeline_dual)

    p = sub.add_parser("elekes", help="grid line-family lower-bound demo")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_elekes)

    p = sub.add_parser("sweep", help="epsilon sweep to CSV with baseline comparison")
    p.add_argument("--kind", choices=GENERATOR_KINDS, default="cube_uniform")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim", type=int, default=3, choices=(2, 3))
    p.add_argument("--epsilons", required=True, help="comma-separated, e.g. 0.05,0.1,0.2,0.4")
    p.add_argument("--beta", type=_frac, default=Fraction(1, 22))
    p.add_argument("--seeds", required=True, help="comma-separated integer seeds")
    p.add_argument("--box", type=int, default=DEFAULT_BOX)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DegeneracyError, RetryLimitError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (VerificationError, AssertionError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

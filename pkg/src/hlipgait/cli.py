"""Command-line interface: plan, verify, export, reward, bench.

Exit codes: 0 success, 1 infeasible request or failed verification,
2 usage error (argparse's convention).
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import verify as _verify
from .gaitfile import load_gait, save_gait
from .hlip import HlipParams
from .kinematics import y_leg_lengths
from .params import LinkParams
from .planner import (
    GaitError,
    GaitRequestX,
    GaitRequestY,
    SearchConfig,
    plan_x,
    plan_y,
)
from .retarget import JOINT_NAMES, assemble_gait, sample
from .rewards import DEFAULT_WEIGHTS, FootState, PhaseConfig, TrackPair, composite

FMT = "%.9g"  # canonical numeric formatting of printed output


def _fmt(x: float) -> str:
    return FMT % x


def _plan_pair(args) -> tuple:
    lp = LinkParams.from_env_or_default(args.params)
    search = SearchConfig(samples=args.samples, radius=args.radius,
                          rng_seed=args.seed)
    req_x = GaitRequestX(step_length=args.lx, walking_speed=args.vx,
                         t_ssp=args.t_ssp, z0=args.z0, degree=args.degree,
                         height_policy=args.height_policy, search=search)
    px = plan_x(req_x, lp)
    ly1, ly2 = y_leg_lengths(px.curve.eval(0.0), lp)
    lp_y = lp.with_y_legs(ly1, ly2)
    req_y = GaitRequestY(walking_speed=args.vy, t_ssp=px.t_ssp, z0=args.z0,
                         degree=args.degree, height_policy=args.height_policy,
                         search=search)
    py = plan_y(req_y, lp_y)
    return px, py, lp_y


def cmd_plan(args) -> int:
    try:
        px, py, _ = _plan_pair(args)
    except GaitError as err:
        print(f"planning failed: {err}", file=sys.stderr)
        if getattr(err, "best_report", None) is not None:
            for p in err.best_report.properties:
                status = "ok" if p.passed else "VIOLATED"
                print(f"  {p.name}: {_fmt(p.max_violation)} "
                      f"(tol {_fmt(p.tolerance)}) {status}", file=sys.stderr)
        return 1
    gait = assemble_gait(px, py, stance_first=args.stance_first)
    samples = None
    if args.sample_dt:
        ts, q, dq = sample(gait, args.sample_dt)
        samples = {"dt": args.sample_dt, "t": ts.tolist(),
                   "q": q.tolist(), "dq": dq.tolist()}
    provenance = {
        "request": {k: getattr(args, k) for k in
                    ("lx", "vx", "vy", "t_ssp", "z0", "degree", "seed",
                     "stance_first", "height_policy")},
        "rng_seed": args.seed,
    }
    save_gait(args.out, px, py, stance_first=args.stance_first,
              provenance=provenance, samples=samples)
    print(f"wrote {args.out}")
    print(f"  t_ssp {_fmt(px.t_ssp)} s, cycle {_fmt(2 * px.t_ssp)} s")
    print(f"  sagittal: step {_fmt(px.step_length)} m, CoM height "
          f"{_fmt(px.z_target)} m (pendulum {_fmt(px.z_pendulum)} m), "
          f"solved in {px.solve_time * 1e3:.1f} ms")
    print(f"  frontal:  step {_fmt(py.step_length)} m, CoM height "
          f"{_fmt(py.z_target)} m, solved in {py.solve_time * 1e3:.1f} ms")
    return 0


def cmd_verify(args) -> int:
    gf = load_gait(args.infile)
    hlip = gf.hlip()
    rep_x = _verify.verify_x_curve(gf.curve_x, gf.lp, hlip, gf.step_length_x,
                                   gf.z_target_x, grid=args.grid)
    rep_y = _verify.verify_y_curve(gf.curve_y, gf.lp, hlip, gf.step_length_y,
                                   gf.z_target_y, grid=args.grid)
    cons_x = _verify.hlip_consistency(gf.curve_x, gf.lp, hlip, model="x",
                                      grid=args.grid)
    cons_y = _verify.hlip_consistency(gf.curve_y, gf.lp, hlip, model="y",
                                      grid=args.grid)
    report = {"x": rep_x.to_dict(), "y": rep_y.to_dict(),
              "hlip_consistency": {"x": cons_x, "y": cons_y},
              "passed": rep_x.passed and rep_y.passed}
    text = json.dumps(report, indent=1, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    for label, rep in (("x", rep_x), ("y", rep_y)):
        for p in rep.properties:
            status = "ok" if p.passed else "VIOLATED"
            print(f"{label}.{p.name}: {_fmt(p.max_violation)} "
                  f"(tol {_fmt(p.tolerance)}) {status}", file=sys.stderr)
    return 0 if report["passed"] else 1


def cmd_export(args) -> int:
    gf = load_gait(args.infile)
    if args.dt <= 0:
        print(f"invalid dt: {args.dt}", file=sys.stderr)
        return 2
    ts, q, dq = sample(gf.gait, args.dt, cycles=args.cycles)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        header = ["t"] + list(JOINT_NAMES) + ["d" + n for n in JOINT_NAMES]
        out.write(",".join(header) + "\n")
        for i in range(len(ts)):
            row = [_fmt(ts[i])] + [_fmt(v) for v in q[i]] + [_fmt(v) for v in dq[i]]
            out.write(",".join(row) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_reward(args) -> int:
    gf = load_gait(args.gait)
    gait = gf.gait
    weights = tuple(float(w) for w in args.weights.split(","))
    if len(weights) != 3:
        print("expected three comma-separated weights", file=sys.stderr)
        return 2
    cfg = PhaseConfig(f_c=1.0 / gait.duration)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("t,r_vf,r_cs,r_track,total\n")
        with open(args.states) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                    t = float(rec["t"])
                    feet = [FootState(force=tuple(f), vel_xy=tuple(v))
                            for f, v in zip(rec["forces"], rec["vel_xy"])]
                    q_actual = np.asarray(rec["q_actual"], dtype=float)
                    if q_actual.shape != (12,):
                        raise ValueError(f"q_actual must have 12 entries")
                except (KeyError, TypeError, ValueError) as err:
                    print(f"{args.states}:{lineno}: bad record: {err}",
                          file=sys.stderr)
                    return 1
                pair = TrackPair(q_des=gait.joints(t), q_actual=q_actual)
                r = composite(t, feet, pair, cfg, weights)
                out.write(",".join(_fmt(v) for v in
                                   (t, r["r_vf"], r["r_cs"], r["r_track"],
                                    r["total"])) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def cmd_bench(args) -> int:
    lp = LinkParams.from_env_or_default(args.params)
    res = run_benchmark(k=args.k, t_ssp=args.t_ssp, z0=args.z0, lp=lp,
                        seed=args.seed)
    print(f"K = {args.k}, t_ssp = {_fmt(args.t_ssp)} s, z0 = {_fmt(args.z0)} m")
    print(f"{'':14s}{'total s':>12s}{'mean ms':>12s}{'median ms':>12s}")
    for name in ("sagittal", "frontal"):
        r = res[name]
        print(f"{name:14s}{r['total_s']:12.6f}{r['mean_ms']:12.3f}"
              f"{r['median_ms']:12.3f}")
    if res["failures"]:
        print(f"failures: {res['failures']}", file=sys.stderr)
        return 1
    return 0


def run_benchmark(k: int, t_ssp: float, z0: float,
                  lp: LinkParams | None = None, seed: int = 0,
                  vx_range: tuple[float, float] = (-1.2, 1.2),
                  vy_range: tuple[float, float] = (-0.4, 0.4)) -> dict:
    """Latency benchmark: K uniformly spaced velocities per model, planner
    wall time only (no file I/O)."""
    lp = lp or LinkParams.default()
    search = SearchConfig(rng_seed=seed)
    failures = []
    times_x = np.empty(k)
    vxs = np.linspace(*vx_range, k)
    reqs_x = [GaitRequestX(walking_speed=float(vx), t_ssp=t_ssp, z0=z0,
                           search=search) for vx in vxs]
    for i, req in enumerate(reqs_x):
        t0 = time.perf_counter()
        try:
            plan_x(req, lp)
        except GaitError as err:
            failures.append(("x", float(vxs[i]), str(err)))
        times_x[i] = time.perf_counter() - t0
    ly1, ly2 = y_leg_lengths(
        np.array([0.1, 0.0, 0.0, 0.1, 0.0]), lp)
    lp_y = lp.with_y_legs(ly1, ly2)
    times_y = np.empty(k)
    vys = np.linspace(*vy_range, k)
    reqs_y = [GaitRequestY(walking_speed=float(vy), t_ssp=t_ssp, z0=z0,
                           search=search) for vy in vys]
    for i, req in enumerate(reqs_y):
        t0 = time.perf_counter()
        try:
            plan_y(req, lp_y)
        except GaitError as err:
            failures.append(("y", float(vys[i]), str(err)))
        times_y[i] = time.perf_counter() - t0

    def stats(ts):
        return {"total_s": float(np.sum(ts)),
                "mean_ms": float(np.mean(ts) * 1e3),
                "median_ms": float(np.median(ts) * 1e3)}

    return {"sagittal": stats(times_x), "frontal": stats(times_y),
            "failures": failures}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="hlipgait",
        description="Plan, verify and export periodic bipedal gaits built on "
                    "a hybrid linear inverted pendulum approximation.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="plan a gait and write a gait file")
    p.add_argument("--lx", type=float, default=None, help="sagittal step length (m)")
    p.add_argument("--vx", type=float, default=None, help="sagittal speed (m/s)")
    p.add_argument("--vy", type=float, default=0.0, help="lateral speed (m/s)")
    p.add_argument("--t-ssp", dest="t_ssp", type=float, default=None,
                   help="swing period (s); derived from --lx/--vx when omitted")
    p.add_argument("--z0", type=float, default=0.856, help="pendulum height (m)")
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--seed", type=int, default=0, help="sampler RNG seed")
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--radius", type=float, default=0.1)
    p.add_argument("--stance-first", choices=("left", "right"), default="right")
    p.add_argument("--height-policy", choices=("clamp", "exact"), default="clamp")
    p.add_argument("--sample-dt", type=float, default=None,
                   help="embed a sampled trajectory block with this period")
    p.add_argument("--params", default=None, help="robot parameter file")
    p.add_argument("--out", default="gait.json")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("verify", help="re-verify a gait file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--grid", type=int, default=1000)
    p.add_argument("--out", default=None, help="write the JSON report here")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export", help="export a CSV joint trajectory")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--cycles", type=float, default=1.0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("reward", help="evaluate rewards over a state stream")
    p.add_argument("--gait", required=True)
    p.add_argument("--states", required=True,
                   help="line-delimited JSON records "
                        "{t, forces[2][3], vel_xy[2][2], q_actual[12]}")
    p.add_argument("--weights", default=",".join(str(w) for w in DEFAULT_WEIGHTS))
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_reward)

    p = sub.add_parser("bench", help="planner latency benchmark")
    p.add_argument("--k", type=int, default=1000)
    p.add_argument("--t-ssp", dest="t_ssp", type=float, default=0.4)
    p.add_argument("--z0", type=float, default=0.825)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--params", default=None)
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except GaitError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

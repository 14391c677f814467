"""Command-line entry point: ``hardybound {bound,worstcase,oracle,moments,selfcheck}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from . import kernels
from .bounds import (
    corollary_power_bound,
    iid_bound,
    incr_expectation,
    moment_bound_check,
    naive_union_bound,
    theorem1_bound,
)
from .distributions import Discrete, distribution_from_json
from .errors import HardyBoundError, PreconditionError
from .hardy import hardy_of
from .oracle import max_tail_two_sweep
from .worst_case import simulate_profile

DEFAULTS = {
    "dist": None,
    "p": 0.5,
    "n": None,
    "q": None,
    "reps": 100000,
    "seed": 0,
    "thresholds": None,
    "out": None,
    "format": "csv",
    "workers": 1,
    "margin": 0.05,
}


class CliError(Exception):
    pass


def fmt(v) -> str:
    """17 significant digits; infinities as ``inf`` / ``-inf``."""
    if isinstance(v, str):
        return v
    x = float(v)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    return format(x, ".17g")


def parse_thresholds(spec):
    """``"a,b,c"`` or ``"start:stop:count"`` (inclusive, evenly spaced)."""
    if spec is None:
        return None
    if isinstance(spec, (list, tuple)):
        vals = [float(v) for v in spec]
    elif ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise CliError(f"range thresholds need start:stop:count, got {spec!r}")
        vals = np.linspace(float(parts[0]), float(parts[1]), int(parts[2])).tolist()
    else:
        vals = [float(v) for v in spec.split(",") if v.strip()]
    if not vals or any(not math.isfinite(v) for v in vals):
        raise CliError("thresholds must be a nonempty list of finite numbers")
    return vals


def parse_dist(spec):
    if isinstance(spec, dict):
        return distribution_from_json(spec)
    if isinstance(spec, str) and os.path.isfile(spec):
        with open(spec) as fh:
            return distribution_from_json(json.load(fh))
    return distribution_from_json(spec)


def parse_ints(spec):
    if spec is None:
        return None
    if isinstance(spec, int):
        return [spec]
    if isinstance(spec, (list, tuple)):
        return [int(v) for v in spec]
    return [int(float(v)) for v in str(spec).split(",") if v.strip()]


def parse_floats(spec):
    if spec is None:
        return None
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, (list, tuple)):
        return [float(v) for v in spec]
    return [float(v) for v in str(spec).split(",") if v.strip()]


def parse_level(v):
    """Keep rational levels exact when given as ``a/b``."""
    if isinstance(v, str) and "/" in v:
        return Fraction(v)
    return float(v)


def build_parser():
    ap = argparse.ArgumentParser(prog="hardybound", description=__doc__)
    sub = ap.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file whose keys mirror the flags")
    common.add_argument("--dist", action="append", help="distribution: name, JSON, or JSON file (repeatable)")
    common.add_argument("--p", help="level in (0, 1]; a/b keeps it exact")
    common.add_argument("--n", help="size, or a comma-separated ladder")
    common.add_argument("--q", help="exponent(s), comma-separated")
    common.add_argument("--reps", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--thresholds", help="comma list or start:stop:count")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--workers", type=int)
    common.add_argument("--margin", type=float, help="jump exclusion margin for worstcase flags")
    for name, help_ in [
        ("bound", "sum bound, reference curves and optional corollary profile"),
        ("worstcase", "simulate the mixed slot coupling"),
        ("oracle", "exact two-marginal adversary versus the bound"),
        ("moments", "moment bound check"),
        ("selfcheck", "run the invariant suite"),
    ]:
        sub.add_parser(name, parents=[common], help=help_)
    return ap


def resolve(args):
    cfg = dict(DEFAULTS)
    if args.config:
        with open(args.config) as fh:
            loaded = json.load(fh)
        unknown = set(loaded) - set(DEFAULTS) - {"command"}
        if unknown:
            raise CliError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    for key in DEFAULTS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    dists = cfg["dist"]
    if dists is not None and not isinstance(dists, list):
        dists = [dists]
    cfg["dist"] = dists
    return cfg


def _need_dists(cfg, count=None):
    if not cfg["dist"]:
        raise CliError("--dist is required")
    dists = [parse_dist(d) for d in cfg["dist"]]
    if count is not None and len(dists) != count:
        raise CliError(f"expected {count} distribution(s), got {len(dists)}")
    return dists


def _default_thresholds(mus):
    lo = sum(float(mu.quantile(Fraction(999, 1000))) for mu in mus)
    hi = sum(float(hardy_of(mu).value(Fraction(1, 1000))) for mu in mus)
    if hi <= lo:
        hi = lo + 1.0
    return np.linspace(lo, hi, 41).tolist()


def _csv(header, rows, comment=None):
    buf = io.StringIO()
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def _curve_rows(label, curve, ts):
    rows = []
    for t in ts:
        try:
            iv = curve.eval(t)
        except HardyBoundError:
            continue
        rows.append((label, t, iv.lo, iv.hi))
    return rows


def cmd_bound(cfg):
    mus = _need_dists(cfg)
    ts = parse_thresholds(cfg["thresholds"]) or _default_thresholds(mus)
    notes = []
    if len(mus) == 1:
        mu = mus[0]
        main = iid_bound(mu)
        curves = [("iid_bound", main.bound), ("survival", mu.survival), ("incr_mean", incr_expectation(mu))]
        for n in parse_ints(cfg["n"]) or []:
            curves.append((f"naive_union_n{n}", naive_union_bound(mu, n).bound))
        for q in parse_floats(cfg["q"]) or []:
            try:
                curves.append((f"corollary_power_q{fmt(q)}", corollary_power_bound(mu.survival, q).bound))
            except PreconditionError as exc:
                notes.append(f"corollary_power_q{fmt(q)} skipped: {exc}")
    else:
        main = theorem1_bound(mus)
        curves = [("theorem1_bound", main.bound)]
    if cfg["format"] == "json":
        return json.dumps(
            {
                "command": "bound",
                "kind": main.kind,
                "inputs": [mu.to_json() for mu in mus],
                "curves": {label: c.to_json() for label, c in curves},
                "notes": notes,
            },
            sort_keys=True,
        ) + "\n"
    rows = [r for label, c in curves for r in _curve_rows(label, c, ts)]
    return _csv(["curve", "t", "survival_lo", "survival_hi"], rows)


def cmd_worstcase(cfg):
    (mu,) = _need_dists(cfg, 1)
    p = parse_level(cfg["p"])
    ns = parse_ints(cfg["n"]) or [100]
    ts = parse_thresholds(cfg["thresholds"])
    if ts is None:
        from .hardy import jump_points

        a, b = (float(v) for v in jump_points(mu, p))
        ts = sorted({a - 0.5, (a + b) / 2, b + 0.5})
    res = simulate_profile(mu, p, ns, int(cfg["reps"]), ts, seed=int(cfg["seed"]),
                           workers=int(cfg["workers"]), margin=float(cfg["margin"]))
    header = ["n", "t", "empirical_survival", "half_width", "limit_value", "flag"]
    rows = [(r.n, r.t, r.empirical_survival, r.half_width, r.limit_value, r.flag) for r in res.rows]
    if cfg["format"] == "json":
        out = {"command": "worstcase", "summary": res.summary(), "rows": [dict(zip(header, r)) for r in rows]}
        return json.dumps(out, sort_keys=True, default=float) + "\n"
    comment = f"seed={res.seed} reps={res.reps} p={fmt(p)} dist={json.dumps(mu.to_json(), sort_keys=True)}"
    return _csv(header, rows, comment)


def cmd_oracle(cfg):
    a, b = _need_dists(cfg, 2)
    if not (isinstance(a, Discrete) and isinstance(b, Discrete)):
        raise CliError("oracle needs two discrete distributions")
    ts = parse_thresholds(cfg["thresholds"]) or _default_thresholds([a, b])
    values, mats = max_tail_two_sweep(a, b, ts)
    bound = theorem1_bound([a, b]).bound
    rows = []
    for t, v in zip(ts, values):
        hi = bound.eval(t).hi
        rows.append((t, v, hi, hi - v))
    if cfg["format"] == "json":
        return json.dumps(
            {
                "command": "oracle",
                "rows": [dict(zip(["t", "oracle_max", "bound_hi", "slack"], map(float, r))) for r in rows],
                "witnesses": [[[str(x) for x in row] for row in m] for m in mats],
            },
            sort_keys=True,
        ) + "\n"
    return _csv(["t", "oracle_max", "bound_hi", "slack"], rows)


def cmd_moments(cfg):
    mus = _need_dists(cfg)
    qs = parse_floats(cfg["q"]) or [1.5, 2.0, 4.0]
    rows = []
    for i, mu in enumerate(mus):
        for q in qs:
            lhs, rhs, m = moment_bound_check(mu, q)
            rows.append((i, q, lhs, rhs, m))
    header = ["dist_index", "q", "lhs", "rhs", "jensen_rhs"]
    if cfg["format"] == "json":
        return json.dumps({"command": "moments", "rows": [dict(zip(header, map(float, r))) for r in rows]},
                          sort_keys=True) + "\n"
    return _csv(header, rows)


def cmd_selfcheck(cfg):
    from .selfcheck import run_selfcheck

    results = run_selfcheck()
    if cfg["format"] == "json":
        text = json.dumps([{"check": n, "passed": ok, "detail": d} for n, ok, d in results], sort_keys=True) + "\n"
    else:
        width = max(len(n) for n, _, _ in results)
        lines = [f"{n:<{width}}  {'PASS' if ok else 'FAIL'}  {d}" for n, ok, d in results]
        lines.append(f"backend: {kernels.BACKEND}")
        text = "\n".join(lines) + "\n"
    return text, all(ok for _, ok, _ in results)


COMMANDS = {
    "bound": cmd_bound,
    "worstcase": cmd_worstcase,
    "oracle": cmd_oracle,
    "moments": cmd_moments,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        if cfg["format"] not in ("csv", "json"):
            raise CliError(f"unknown format {cfg['format']!r}")
        status = 0
        if args.command == "selfcheck":
            text, ok = cmd_selfcheck(cfg)
            status = 0 if ok else 1
        else:
            text = COMMANDS[args.command](cfg)
        if cfg["out"]:
            with open(cfg["out"], "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return status
    except (HardyBoundError, CliError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

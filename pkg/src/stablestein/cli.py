"""Command-line front end.

Every command accepts ``--config FILE`` (JSON object keyed by option names,
dashes or underscores); explicit flags override the file.  The effective
configuration is echoed into each output.  Exit codes: 0 success, 1 runtime
or numerical failure, 2 usage or parameter error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys

import numpy as np

from . import bench, bounds, domains, quad, stable, stein
from .errors import NumericalError, ParameterError, StableSteinError

FORMAT_VERSION = 1

# options that steer execution but not results; kept out of echoed configs
_NOT_ECHOED = {"config", "output", "workers", "command", "plan"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ParameterError(f"expected comma-separated numbers, got {text!r}") from None


def parse_grid(text: str) -> np.ndarray:
    """'start:stop:step' -> inclusive uniform grid."""
    parts = str(text).split(":")
    if len(parts) != 3:
        raise ParameterError(f"grid must be start:stop:step, got {text!r}")
    try:
        a, b, h = (float(p) for p in parts)
    except ValueError:
        raise ParameterError(f"grid must be start:stop:step, got {text!r}") from None
    if not (h > 0 and b > a and math.isfinite(a) and math.isfinite(b)):
        raise ParameterError(f"grid needs start < stop and step > 0, got {text!r}")
    k = int(round((b - a) / h))
    if k > 10_000_000:
        raise ParameterError(f"grid {text!r} has more than 1e7 points")
    return a + h * np.arange(k + 1)


def _octave_grid(nmin: int, nmax: int) -> list[int]:
    nmin, nmax = int(nmin), int(nmax)
    if nmin < 1 or nmax < nmin:
        raise ParameterError(f"need 1 <= nmin <= nmax, got nmin={nmin}, nmax={nmax}")
    out = []
    n = nmin
    while n <= nmax:
        out.append(n)
        n *= 2
    return out


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    """defaults < config file < explicit flags."""
    cfg = dict(defaults)
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read config {args.config!r}: {exc}") from None
        if not isinstance(data, dict):
            raise ParameterError("config file must hold a JSON object")
        for k, v in data.items():
            key = k.replace("-", "_")
            if key not in defaults:
                raise ParameterError(f"unknown config key {k!r}")
            cfg[key] = v
    for k, v in vars(args).items():
        if v is not None and k in defaults:
            cfg[k] = v
    return cfg


def _echo(cfg: dict) -> str:
    shown = {k: v for k, v in sorted(cfg.items()) if k not in _NOT_ECHOED}
    return json.dumps(shown, sort_keys=True)


def _write(text: str, path) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise _RuntimeFailure(f"cannot write {path!r}: {exc}") from None


class _RuntimeFailure(Exception):
    pass


def _law_from(cfg: dict):
    spec = {"family": cfg["law"], "alpha": cfg["alpha"]}
    for key, name in (("beta", "beta"), ("alphatilde", "alpha_tilde"), ("atilde", "A_tilde"),
                      ("B", "B"), ("D", "D")):
        if cfg.get(key) is not None:
            spec[name] = cfg[key]
    return domains.law_from_spec(spec)


def _quad_cfg(cfg: dict) -> quad.QuadConfig:
    base = stein.OP_CFG
    return quad.QuadConfig(
        rel_tol=base.rel_tol if cfg.get("rel_tol") is None else float(cfg["rel_tol"]),
        abs_tol=base.abs_tol if cfg.get("abs_tol") is None else float(cfg["abs_tol"]),
        max_subdivisions=base.max_subdivisions if cfg.get("max_subdivisions") is None
        else int(cfg["max_subdivisions"]),
    )


# ---------------------------------------------------------------------------
# commands


DENSITY_DEFAULTS = {"alpha": None, "beta": 0.0, "sigma": 1.0, "grid": "-10:10:0.01", "output": "-",
                    "config": None}


def cmd_density(args) -> int:
    """pdf, pdf', cdf and cell masses on a uniform grid.

    The mass column is the trapezoid weight of the pdf at each node, with the
    probability beyond the first and last node added to the end weights, so
    it sums to one up to the trapezoid error.
    """
    cfg = _merge(args, DENSITY_DEFAULTS)
    if cfg["alpha"] is None:
        raise ParameterError("--alpha is required")
    p = stable.StableParams(float(cfg["alpha"]), float(cfg["sigma"]), float(cfg["beta"]))
    x = parse_grid(cfg["grid"])
    table = stable.build_table(p)
    pdf = stable.pdf(table, x, p)
    dpdf = stable.pdf_deriv(table, x, p)
    cdf = stable.cdf(table, x, p)
    h = np.diff(x)
    w = np.zeros_like(x)
    w[:-1] += 0.5 * h
    w[1:] += 0.5 * h
    mass = w * pdf
    mass[0] += cdf[0]
    mass[-1] += 1.0 - cdf[-1]
    buf = io.StringIO()
    buf.write(f"# format_version={FORMAT_VERSION}\n# config={_echo(cfg)}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["x", "pdf", "pdf_deriv", "cdf", "mass"])
    for row in zip(x, pdf, dpdf, cdf, mass):
        wr.writerow([repr(float(v)) for v in row])
    _write(buf.getvalue(), cfg["output"])
    return 0


STEIN_DEFAULTS = {"alpha": "1.2,1.5,1.8", "beta": "-0.7,0,0.7", "lambda_": "0.5,1,2", "x": "-3,0,3",
                  "threshold": 1e-4, "rel_tol": None, "abs_tol": None, "max_subdivisions": None,
                  "output": "-", "config": None}


def cmd_stein_check(args) -> int:
    """|Stein residual| over an (alpha, beta, lambda, x) lattice; exit 1 above threshold."""
    cfg = _merge(args, STEIN_DEFAULTS)
    lists = {k: _floats(cfg[k]) if isinstance(cfg[k], str) else [float(v) for v in np.atleast_1d(cfg[k])]
             for k in ("alpha", "beta", "lambda_", "x")}
    threshold = float(cfg["threshold"])
    if not threshold > 0:
        raise ParameterError(f"threshold must be > 0, got {threshold}")
    qcfg = _quad_cfg(cfg)
    # build everything first so parameter errors surface before any work
    cells = [stein.SteinSolutionHLambda(lam, stable.StableParams(a, 1.0, b))
             for a in lists["alpha"] for b in lists["beta"] for lam in lists["lambda_"]]
    xs = np.array(lists["x"])
    buf = io.StringIO()
    buf.write(f"# format_version={FORMAT_VERSION}\n# config={_echo(cfg)}\n")
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["alpha", "beta", "lambda", "x", "abs_residual", "pass"])
    worst = 0.0
    for s in cells:
        res = np.abs(np.atleast_1d(stein.stein_residual(s, xs, qcfg)))
        for xv, r in zip(xs, res):
            worst = max(worst, float(r))
            wr.writerow([repr(s.params.alpha), repr(s.params.beta), repr(s.lam), repr(float(xv)),
                         f"{float(r):.6e}", int(r < threshold)])
    _write(buf.getvalue(), cfg["output"])
    print(f"max residual {worst:.3e} (threshold {threshold:.1e})", file=sys.stderr)
    return 0 if worst < threshold else 1


BENCH_DEFAULTS = {"law": "pareto", "alpha": 1.5, "beta": 0.0, "alphatilde": None, "atilde": None, "B": None,
                  "D": None, "nmin": 256, "nmax": 32768, "reps": 50, "batch": 10_000, "seed": 0,
                  "estimator": "crossfit", "window": 0.005, "cells": 2000, "workers": None,
                  "output": "rate_report.json", "config": None, "plan": None}


def cmd_bench(args) -> int:
    """Run a rate experiment; write the JSON report and a CSV next to it."""
    cfg = _merge(args, BENCH_DEFAULTS)
    if cfg["plan"] is not None:
        try:
            with open(cfg["plan"]) as fh:
                plan = bench.ExperimentPlan.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError) as exc:
            raise ParameterError(f"cannot read plan {cfg['plan']!r}: {exc}") from None
    else:
        law = _law_from(cfg)
        plan = bench.ExperimentPlan(law, tuple(_octave_grid(cfg["nmin"], cfg["nmax"])), int(cfg["reps"]),
                                    int(cfg["batch"]), int(cfg["seed"]), cfg["estimator"],
                                    float(cfg["window"]), int(cfg["cells"]))
    workers = bench.worker_count(None if cfg["workers"] is None else int(cfg["workers"]))
    out = cfg["output"]
    echoed = json.loads(_echo(cfg))
    partial = None if out in (None, "-") else out
    report = bench.run_rate_experiment(plan, workers=workers, partial_path=partial, config=echoed)
    _write(report.to_json(), out)
    if out not in (None, "-"):
        stem = out[:-5] if out.endswith(".json") else out
        _write(report.to_csv(), stem + ".csv")
    if report.fit is not None:
        lo, hi = report.fit.slope_ci
        print(f"slope {report.fit.slope:.4f}  ci [{lo:.4f}, {hi:.4f}]", file=sys.stderr)
    return 0


BOUNDS_DEFAULTS = {"law": "pareto", "alpha": 1.5, "beta": 0.0, "alphatilde": None, "atilde": None, "B": None,
                   "D": None, "nmin": 1, "nmax": 2 ** 20, "variant": None, "output": "-", "config": None}


def cmd_bounds(args) -> int:
    """Theorem bound and its components over an octave grid of n."""
    cfg = _merge(args, BOUNDS_DEFAULTS)
    law = _law_from(cfg)
    if law.family_tag == "slowvary":
        raise ParameterError("no theorem bound is available for the slowly varying family")
    rows = bounds.bound_table(law, _octave_grid(cfg["nmin"], cfg["nmax"]), cfg["variant"])
    text = bounds.bound_table_csv(rows)
    first, rest = text.split("\n", 1)
    _write(f"{first}\n# config={_echo(cfg)}\n{rest}", cfg["output"])
    return 0


SAMPLE_DEFAULTS = {"alpha": None, "beta": 0.0, "sigma": 1.0, "n": 1000, "seed": 0, "output": "-",
                   "config": None}


def cmd_sample(args) -> int:
    """Draws from S_alpha(sigma, beta), one per line."""
    cfg = _merge(args, SAMPLE_DEFAULTS)
    if cfg["alpha"] is None:
        raise ParameterError("--alpha is required")
    p = stable.StableParams(float(cfg["alpha"]), float(cfg["sigma"]), float(cfg["beta"]))
    x = stable.sample(p, int(cfg["n"]), int(cfg["seed"]))
    lines = [f"# format_version={FORMAT_VERSION}", f"# config={_echo(cfg)}", "x"]
    lines += [repr(float(v)) for v in x]
    _write("\n".join(lines) + "\n", cfg["output"])
    return 0


# ---------------------------------------------------------------------------
# parser


def _law_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--law", choices=[f for f in domains.FAMILIES if f != "custom"])
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--alphatilde", type=float, help="second tail index (twopower)")
    p.add_argument("--atilde", type=float, help="amplitude of the second power (twopower)")
    p.add_argument("--B", type=float, help="oscillation amplitude (trig)")
    p.add_argument("--D", type=float, help="log-tail amplitude (logtail)")
    p.add_argument("--nmin", type=int)
    p.add_argument("--nmax", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="stablestein", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    d = sub.add_parser("density", help="tabulate pdf, pdf', cdf to CSV")
    d.add_argument("--alpha", type=float)
    d.add_argument("--beta", type=float)
    d.add_argument("--sigma", type=float)
    d.add_argument("--grid", help="start:stop:step")
    d.set_defaults(func=cmd_density)

    s = sub.add_parser("stein-check", help="Stein-identity residuals over a lattice")
    s.add_argument("--alpha", help="comma-separated list")
    s.add_argument("--beta", help="comma-separated list")
    s.add_argument("--lambda", dest="lambda_", help="comma-separated list of nonzero values")
    s.add_argument("--x", help="comma-separated list")
    s.add_argument("--threshold", type=float)
    s.add_argument("--rel-tol", dest="rel_tol", type=float)
    s.add_argument("--abs-tol", dest="abs_tol", type=float)
    s.add_argument("--max-subdivisions", dest="max_subdivisions", type=int)
    s.set_defaults(func=cmd_stein_check)

    b = sub.add_parser("bench", help="Monte Carlo rate experiment")
    _law_options(b)
    b.add_argument("--reps", type=int)
    b.add_argument("--batch", type=int, help="sums per replication")
    b.add_argument("--seed", type=int)
    b.add_argument("--estimator", choices=bench.ESTIMATORS)
    b.add_argument("--window", type=float, help="tail probability excluded on each side (crossfit)")
    b.add_argument("--cells", type=int)
    b.add_argument("--workers", type=int)
    b.add_argument("--plan", help="JSON experiment plan (overrides the law and grid flags)")
    b.set_defaults(func=cmd_bench)

    t = sub.add_parser("bounds", help="theorem bound table to CSV")
    _law_options(t)
    t.add_argument("--variant", choices=("thm12", "thm13"))
    t.set_defaults(func=cmd_bounds)

    m = sub.add_parser("sample", help="draw stable variates")
    m.add_argument("--alpha", type=float)
    m.add_argument("--beta", type=float)
    m.add_argument("--sigma", type=float)
    m.add_argument("--n", type=int)
    m.add_argument("--seed", type=int)
    m.set_defaults(func=cmd_sample)

    for p in (d, s, b, t, m):
        p.add_argument("--config", help="JSON file of option values; flags take precedence")
        p.add_argument("--output", "-o", help="output path ('-' for stdout)")
    return parser


_NEGATIVE_VALUE = re.compile(r"^-[\d.]")


def _attach_negative_values(argv):
    """'--grid -10:10:1' -> '--grid=-10:10:1'; argparse would read the value as a flag."""
    out = []
    for tok in argv:
        if out and out[-1].startswith("--") and "=" not in out[-1] and _NEGATIVE_VALUE.match(tok):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _attach_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"stablestein: error: {exc}", file=sys.stderr)
        return 2
    except ParameterError as exc:
        print(f"stablestein: error: {exc}", file=sys.stderr)
        return 2
    except (NumericalError, StableSteinError, _RuntimeFailure) as exc:
        print(f"stablestein: failure: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        print("stablestein: interrupted", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

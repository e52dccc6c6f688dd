"""Monte Carlo rate experiments for normalized partial sums.

Each (n, replication) work unit draws ``batch_size`` normalized sums with the
counter-based kernel keyed by SeedSequence([seed, n, replication]); results
therefore do not depend on the number of worker threads.  Distances to the
stable target use the one-dimensional identity d_W = integral of |F_n - F|:
either the plug-in integral over one sample, exact between order statistics,
or a cross-fitted version across replications that removes the plug-in's
sampling floor.
"""
from __future__ import annotations

import concurrent.futures as cf
import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from . import _kernels, bounds, domains
from .errors import EmptySample, InsufficientPoints, InvalidPlan, ParameterError
from .stable import DensityTable, StableParams, build_table, sampler_self_test

__all__ = [
    "FORMAT_VERSION",
    "ESTIMATORS",
    "ExperimentPlan",
    "RateRow",
    "RateReport",
    "RateFit",
    "WassersteinEstimate",
    "stream_key",
    "kernel_parameters",
    "normalization",
    "simulate_partial_sum",
    "simulate_partial_sums",
    "empirical_wasserstein",
    "crossfit_wasserstein",
    "fit_rate",
    "run_rate_experiment",
    "worker_count",
]

FORMAT_VERSION = 1
ESTIMATORS = ("crossfit", "plain")
_FAMILY_CODES = {"pareto": _kernels.PARETO, "twopower": _kernels.TWOPOWER, "trig": _kernels.TRIG,
                 "logtail": _kernels.LOGTAIL, "slowvary": _kernels.SLOWVARY}


# ---------------------------------------------------------------------------
# sampling


def stream_key(seed: int, n: int, replication: int) -> int:
    """64-bit key of the uniform stream for one (n, replication) unit."""
    ss = np.random.SeedSequence([int(seed), int(n), int(replication)])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def kernel_parameters(law) -> tuple[int, list]:
    """Family code and parameter vector understood by the sampling kernel."""
    tag = law.family_tag
    if tag not in _FAMILY_CODES:
        raise ParameterError(f"no sampling kernel for family {tag!r}")
    p = law.params
    if tag == "slowvary":
        return _FAMILY_CODES[tag], [law.alpha]
    if tag == "pareto":
        return _FAMILY_CODES[tag], [law.alpha, law.beta]
    extra = {"twopower": p.get("alpha_tilde"), "trig": p.get("B"), "logtail": p.get("D")}[tag]
    return _FAMILY_CODES[tag], [law.alpha, law.beta, law.A, extra]


def normalization(law, n: int) -> tuple[float, float]:
    """(center, scale) with S_n = (X_1 + ... + X_n - n*center) / scale.

    Normal-attraction laws use center = EX and scale = sigma n**(1/alpha);
    the slowly varying example uses no centering and scale = sigma gamma_n.
    """
    if law.family_tag == "slowvary":
        return 0.0, law.sigma * domains.gamma_n_solve(law.alpha, n)
    return domains.moments(law).mean, law.sigma * n ** (1.0 / law.alpha)


def simulate_partial_sums(law, n: int, count: int, key: int, first: int = 0) -> np.ndarray:
    """``count`` independent normalized sums from the stream ``key``."""
    n = int(n)
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    family, params = kernel_parameters(law)
    center, scale = normalization(law, n)
    return _kernels.partial_sums(family, params, n, int(count), int(key), center, scale, int(first))


def simulate_partial_sum(law, n: int, stream: tuple[int, int, int] | int) -> float:
    """One normalized sum; ``stream`` is a key or a (seed, n_tag, replication) triple."""
    key = stream_key(*stream) if isinstance(stream, tuple) else int(stream)
    return float(simulate_partial_sums(law, n, 1, key)[0])


# ---------------------------------------------------------------------------
# Wasserstein distance to the target


@dataclass(frozen=True)
class WassersteinEstimate:
    estimate: float
    tail_remainder_bound: float


def _segment_integrals(table: DensityTable, left, right, level):
    """Integral of |level - F| over [left, right] for arrays of segments.

    F is increasing, so |level - F| changes sign at most once, at the
    quantile of ``level`` (clipped to the segment).
    """
    q = np.clip(table.quantile(np.clip(level, 1e-300, 1.0 - 1e-16)), left, right)
    q = np.where(level <= 0.0, left, np.where(level >= 1.0, right, q))
    below = level * (q - left) - table.cdf_integral(left, q)
    above = table.cdf_integral(q, right) - level * (right - q)
    return below + above


def _tail_pieces(table: DensityTable, lo: float, hi: float) -> tuple[float, float]:
    """Integrals of F over (-inf, lo] and of 1 - F over [hi, inf)."""
    left = float(table.cdf_antiderivative(np.array([lo]))[0])
    al = table.params.alpha
    cut_hi = table.tail_cut[1]
    if hi >= cut_hi:
        right = table.tail_closure[1] * hi ** (1.0 - al) / (al - 1.0)
    else:
        beyond = table.tail_closure[1] * cut_hi ** (1.0 - al) / (al - 1.0)
        right = float((cut_hi - hi) - table.cdf_integral(np.array([hi]), np.array([cut_hi]))[0]) + beyond
    return left, right


def empirical_wasserstein(sample, target: DensityTable, params: StableParams | None = None) -> WassersteinEstimate:
    """Integral of |F_m - F| for a sorted sample against the target table.

    Between consecutive order statistics F_m is constant and the integral is
    exact up to the table's interpolation.  Beyond the extreme order
    statistics the integrals of F and 1 - F are analytic (power-law closure);
    they are part of the estimate and also reported as ``tail_remainder_bound``.
    """
    target.check(params)
    x = np.asarray(sample, dtype=float)
    m = x.size
    if m == 0:
        raise EmptySample("empirical_wasserstein needs at least one point")
    if np.any(np.diff(x) < 0):
        raise ParameterError("sample must be sorted")
    left_tail, right_tail = _tail_pieces(target, x[0], x[-1])
    interior = 0.0
    if m > 1:
        levels = np.arange(1, m) / m
        interior = float(np.sum(_segment_integrals(target, x[:-1], x[1:], levels)))
    tails = left_tail + right_tail
    return WassersteinEstimate(interior + tails, tails)


def _cell_integrals(sample, edges):
    """Integral of the empirical CDF of ``sample`` over every cell of ``edges``."""
    y = np.sort(np.asarray(sample, dtype=float))
    m = y.size
    csum = np.concatenate(([0.0], np.cumsum(y)))
    idx = np.searchsorted(y, edges, side="right")
    a, b = edges[:-1], edges[1:]
    # F_m(b)(b - a) minus sum over points y in (a, b] of (y - a)
    entering = csum[idx[1:]] - csum[idx[:-1]] - a * (idx[1:] - idx[:-1])
    return ((b - a) * idx[1:] - entering) / m


def crossfit_wasserstein(samples, target: DensityTable, window: float = 0.005, cells: int = 2000,
                         params: StableParams | None = None) -> np.ndarray:
    """Per-replication estimates of d_W with the sign of F_n - F fitted out of sample.

    d_W = integral of (F_n - F) s with s = sign(F_n - F).  Replication i
    integrates its own deviation against the sign of the deviation pooled
    over the other replications, cell by cell on the target's central
    quantile range [q(window), q(1 - window)].  The plug-in |F_m - F| has a
    noise floor of order m**-1/2 integrated over heavy tails, far above the
    distances of interest; this estimator is unbiased for the integral of
    |F_n - F| wherever the pooled sign is right and biased low elsewhere.
    """
    target.check(params)
    R = len(samples)
    if R < 2:
        raise ParameterError("crossfit_wasserstein needs at least two replications")
    if any(np.asarray(s).size == 0 for s in samples):
        raise EmptySample("every replication needs at least one point")
    if not 0.0 < window < 0.5:
        raise ParameterError(f"window must lie in (0, 0.5), got {window}")
    if int(cells) < 1:
        raise ParameterError(f"cells must be >= 1, got {cells}")
    lo, hi = target.quantile(np.array([window, 1.0 - window]))
    edges = np.linspace(lo, hi, int(cells) + 1)
    ref = target.cdf_integral(edges[:-1], edges[1:])
    dev = np.array([_cell_integrals(s, edges) for s in samples]) - ref
    others = (dev.sum(axis=0) - dev) / (R - 1)
    return np.sum(dev * np.sign(others), axis=1)


# ---------------------------------------------------------------------------
# rate fitting


@dataclass(frozen=True)
class RateFit:
    slope: float
    intercept: float
    slope_ci: tuple[float, float]
    n_used: tuple[int, ...]

    def to_dict(self) -> dict:
        return {"slope": self.slope, "intercept": self.intercept, "ci": list(self.slope_ci),
                "n_used": list(self.n_used)}


def fit_rate(points, drop_smallest_octave: bool = False, level: float = 0.95) -> RateFit:
    """Weighted least squares of log dW on log n.

    ``points`` are (n, dW, stderr) triples.  Weights are (dW/stderr)**2, the
    inverse delta-method variance of log dW; with any zero or missing stderr
    the fit is unweighted.  Non-positive dW cannot be logged and are skipped.
    The slope interval uses Student t with k - 2 degrees of freedom.
    """
    pts = sorted((float(n), float(d), float(s) if s is not None else 0.0) for n, d, s in points)
    if drop_smallest_octave and pts:
        n0 = pts[0][0]
        pts = [p for p in pts if p[0] >= 2.0 * n0]
    pts = [p for p in pts if p[1] > 0.0 and math.isfinite(p[1])]
    if len({p[0] for p in pts}) < 3:
        raise InsufficientPoints("rate fitting needs at least 3 distinct n with positive dW")
    n, d, s = (np.array(v) for v in zip(*pts))
    x, y = np.log(n), np.log(d)
    w = (d / s) ** 2 if np.all(s > 0) else np.ones_like(x)
    xb = float(np.sum(w * x) / np.sum(w))
    yb = float(np.sum(w * y) / np.sum(w))
    sxx = float(np.sum(w * (x - xb) ** 2))
    slope = float(np.sum(w * (x - xb) * (y - yb)) / sxx)
    intercept = yb - slope * xb
    dof = x.size - 2
    resid = y - intercept - slope * x
    se = math.sqrt(max(float(np.sum(w * resid ** 2)), 0.0) / dof / sxx) if dof > 0 else math.inf
    half = float(stats.t.ppf(0.5 + level / 2.0, dof)) * se if dof > 0 else math.inf
    return RateFit(slope, intercept, (slope - half, slope + half), tuple(int(v) for v in n))


# ---------------------------------------------------------------------------
# plans and reports


@dataclass(frozen=True)
class ExperimentPlan:
    """A rate benchmark: law spec, n grid, replications of ``batch_size`` sums each."""

    law: dict
    n_grid: tuple
    replications: int = 50
    batch_size: int = 10_000
    seed: int = 0
    estimator: str = "crossfit"
    window: float = 0.005
    cells: int = 2000

    def __post_init__(self):
        if not isinstance(self.law, dict):
            object.__setattr__(self, "law", domains.law_spec(self.law))
        grid = tuple(int(v) for v in self.n_grid)
        if any(float(a) != float(b) for a, b in zip(grid, self.n_grid)):
            raise InvalidPlan("n_grid entries must be integers")
        object.__setattr__(self, "n_grid", grid)
        if len(set(grid)) < 3:
            raise InvalidPlan(f"n_grid needs at least 3 distinct values to identify a slope, got {grid}")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise InvalidPlan(f"n_grid must be strictly increasing, got {grid}")
        if grid[0] < 1:
            raise InvalidPlan("n_grid entries must be >= 1")
        if int(self.replications) < 2:
            raise InvalidPlan(f"replications must be >= 2, got {self.replications}")
        if int(self.batch_size) < 1:
            raise InvalidPlan(f"batch_size must be >= 1, got {self.batch_size}")
        if int(self.seed) < 0:
            raise InvalidPlan(f"seed must be a nonnegative integer, got {self.seed}")
        if self.estimator not in ESTIMATORS:
            raise InvalidPlan(f"estimator must be one of {ESTIMATORS}, got {self.estimator!r}")
        if not 0.0 < float(self.window) < 0.5:
            raise InvalidPlan(f"window must lie in (0, 0.5), got {self.window}")
        if int(self.cells) < 1:
            raise InvalidPlan(f"cells must be >= 1, got {self.cells}")
        for name in ("replications", "batch_size", "seed", "cells"):
            object.__setattr__(self, name, int(getattr(self, name)))
        object.__setattr__(self, "window", float(self.window))
        self.build_law()

    def build_law(self):
        return domains.law_from_spec(self.law)

    @property
    def target(self) -> StableParams:
        return self.build_law().target

    @property
    def octaves(self) -> float:
        return math.log2(self.n_grid[-1] / self.n_grid[0])

    @property
    def ci_valid(self) -> bool:
        """Whether the plan meets the size the reported intervals are calibrated for."""
        return self.octaves >= 3.0 and self.replications >= 30

    def to_dict(self) -> dict:
        out = asdict(self)
        out["n_grid"] = list(self.n_grid)
        t = self.target
        out["target"] = {"alpha": t.alpha, "sigma": t.sigma, "beta": t.beta}
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentPlan":
        data = {k: v for k, v in dict(data).items() if k != "target"}
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise InvalidPlan(f"unknown plan fields: {sorted(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class RateRow:
    n: int
    dw_mean: float
    dw_stderr: float
    bound_total: float | None
    bound_components: dict | None
    bound_status: str
    tail_remainder_mean: float | None = None


@dataclass(frozen=True)
class RateReport:
    plan: ExperimentPlan
    rows: tuple
    fit: RateFit | None
    fit_note: str
    regime: dict
    complete: bool = True
    config: dict | None = None

    def to_dict(self) -> dict:
        fit = self.fit.to_dict() if self.fit is not None else {}
        fit["ci_valid"] = self.plan.ci_valid
        fit["note"] = self.fit_note
        return _clean({
            "format_version": FORMAT_VERSION,
            "complete": self.complete,
            "plan": self.plan.to_dict(),
            "config": self.config,
            "regime": self.regime,
            "rows": [asdict(r) for r in self.rows],
            "fit": fit,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# format_version={FORMAT_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "dw_mean", "dw_stderr", "bound_total", "term_I", "term_II", "term_III_IV",
                    "bound_status"])
        for r in self.rows:
            comp = r.bound_components or {}
            w.writerow([r.n, repr(r.dw_mean), repr(r.dw_stderr),
                        "" if r.bound_total is None else repr(r.bound_total),
                        *("" if k not in comp else repr(comp[k]) for k in ("term_I", "term_II", "term_III_IV")),
                        r.bound_status])
        return buf.getvalue()


def _clean(obj):
    """JSON-safe copy: non-finite floats become null."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


# ---------------------------------------------------------------------------
# the experiment


def worker_count(requested: int | None = None) -> int:
    """Worker threads: ``requested`` (default: CPU count) capped by STABLE_STEIN_THREADS."""
    n = (os.cpu_count() or 1) if requested is None else int(requested)
    if n < 1:
        raise ParameterError(f"workers must be >= 1, got {requested}")
    cap = os.environ.get("STABLE_STEIN_THREADS", "").strip()
    if cap:
        try:
            cap_n = int(cap)
        except ValueError:
            raise ParameterError(f"STABLE_STEIN_THREADS must be a positive integer, got {cap!r}") from None
        if cap_n < 1:
            raise ParameterError(f"STABLE_STEIN_THREADS must be a positive integer, got {cap!r}")
        n = min(n, cap_n)
    return n


def _regime_info(law) -> dict:
    if law.family_tag == "slowvary":
        return {"family": "slowvary", "regime": "slowly_varying", "rate_exponent": None,
                "log_factor": False, "predicted": "O(1/log n)"}
    rate = bounds.rate_exponent(law.alpha, law.gamma)
    variant = bounds.preferred_variant(law)
    return {"family": law.family_tag, "regime": bounds.regime_of(law.gamma, law.alpha),
            "variant": variant, "rate_exponent": rate.exponent, "log_factor": rate.log_factor,
            "gamma": law.gamma}


def _bound_for(law, n: int):
    if law.family_tag == "slowvary":
        return None, None, "not available"
    res = bounds.bound_table(law, [n])[0]
    if isinstance(res, bounds.BoundNotApplicable):
        return None, None, f"not applicable (n_min={res.n_min:.6g})"
    return res.total, dict(res.components), "ok"


def _mean_stderr(values) -> tuple[float, float]:
    v = [float(x) for x in values]
    k = len(v)
    mean = math.fsum(v) / k
    var = math.fsum((x - mean) ** 2 for x in v) / (k - 1)
    return mean, math.sqrt(var / k)


def run_rate_experiment(plan: ExperimentPlan, workers: int | None = None, partial_path=None,
                        config: dict | None = None, self_test: bool = True) -> RateReport:
    """Simulate, estimate d_W per replication, aggregate, fit and attach bounds.

    Work units are (n, replication) pairs with their own counter-based
    stream, collected in replication order, so the report does not depend on
    ``workers``.  With ``partial_path`` the report so far is rewritten after
    every n and on interrupt (``complete`` is false until the end).
    """
    law = plan.build_law()
    if self_test:
        sampler_self_test(law.target)
    table = build_table(law.target)
    regime = _regime_info(law)
    rows: list[RateRow] = []

    def partial(note):
        return RateReport(plan, tuple(rows), None, note, regime, complete=False, config=config)

    def flush(note):
        if partial_path is not None:
            with open(partial_path, "w") as fh:
                fh.write(partial(note).to_json())

    def unit(n, rep):
        x = simulate_partial_sums(law, n, plan.batch_size, stream_key(plan.seed, n, rep))
        x.sort()
        return x

    pool = cf.ThreadPoolExecutor(max_workers=worker_count(workers))
    try:
        for n in plan.n_grid:
            samples = list(pool.map(lambda r: unit(n, r), range(plan.replications)))
            tail_mean = None
            if plan.estimator == "crossfit":
                est = crossfit_wasserstein(samples, table, plan.window, plan.cells)
            else:
                ws = [empirical_wasserstein(s, table) for s in samples]
                est = [w.estimate for w in ws]
                tail_mean = math.fsum(w.tail_remainder_bound for w in ws) / len(ws)
            mean, se = _mean_stderr(est)
            total, comps, status = _bound_for(law, n)
            rows.append(RateRow(n, mean, se, total, comps, status, tail_mean))
            flush("interrupted or in progress")
    except KeyboardInterrupt:
        flush("interrupted")
        raise
    finally:
        pool.shutdown(wait=True, cancel_futures=True)

    drop = bool(regime["log_factor"])
    try:
        fit = fit_rate([(r.n, r.dw_mean, r.dw_stderr) for r in rows], drop_smallest_octave=drop)
        note = "smallest octave dropped (log factor)" if drop else ""
    except InsufficientPoints as exc:
        fit, note = None, str(exc)
    return RateReport(plan, tuple(rows), fit, note, regime, complete=True, config=config)

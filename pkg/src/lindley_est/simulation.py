"""Monte Carlo comparison of the PDF/CDF estimators.

Every replication draws its sample from the substream keyed by
``(master_seed, n, r)``, so a report is a pure function of its config: the
number of worker threads only changes how the fits are scheduled.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from importlib import resources
import io
import json
import math
import os
import time
from typing import Optional

import jsonschema
import numpy as np

from . import _backend
from .distribution import check_theta, draw, quantile, substream
from .errors import DomainError
from .estimators import EstimatorKind, fit_rows
from .function_estimators import umvue_cdf_values, umvue_pdf_values
from .risk import Target

DEFAULT_QUANTILES = (0.1, 0.25, 0.5, 0.75, 0.9)
DEFAULT_REPLICATIONS = 1000
THREADS_ENV = "LINDLEY_EST_THREADS"
CSV_COLUMNS = ("method", "n", "x", "target", "bias", "mse", "se")


class ConfigError(DomainError):
    """Invalid simulation config; ``fields`` lists the offending keys."""

    def __init__(self, problems):
        self.problems = list(problems)
        self.fields = sorted({p[0] for p in self.problems})
        super().__init__("invalid config: " + "; ".join(f"{f}: {m}" for f, m in self.problems))


def load_schema():
    text = resources.files("lindley_est").joinpath("schemas/simconfig.schema.json").read_text()
    return json.loads(text)


def fmt(v):
    """Fixed 10-significant-digit rendering used by every tabular output."""
    return f"{float(v):.10g}"


@dataclass(frozen=True)
class SimConfig:
    theta0: float
    sample_sizes: tuple
    replications: int = DEFAULT_REPLICATIONS
    eval_points: Optional[tuple] = None
    eval_quantiles: Optional[tuple] = None
    methods: tuple = tuple(EstimatorKind)
    master_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "sample_sizes", tuple(int(n) for n in self.sample_sizes))
        object.__setattr__(self, "methods", tuple(
            m if isinstance(m, EstimatorKind) else EstimatorKind.parse(m) for m in self.methods))
        if self.eval_points is not None:
            object.__setattr__(self, "eval_points", tuple(float(x) for x in self.eval_points))
        if self.eval_quantiles is not None:
            object.__setattr__(self, "eval_quantiles", tuple(float(q) for q in self.eval_quantiles))
        problems = []
        try:
            check_theta(self.theta0)
        except DomainError as exc:
            problems.append(("theta0", str(exc)))
        if not self.sample_sizes:
            problems.append(("sample_sizes", "must be nonempty"))
        for n in self.sample_sizes:
            if n < 2:
                msg = f"n={n} < 2"
                if EstimatorKind.UMVUE in self.methods:
                    msg += " (the UMVUE needs n >= 2)"
                problems.append(("sample_sizes", msg))
        if int(self.replications) < 1:
            problems.append(("replications", "must be >= 1"))
        if not self.methods:
            problems.append(("methods", "must be nonempty"))
        if self.eval_points is not None and self.eval_quantiles is not None:
            problems.append(("eval_points", "give eval_points or eval_quantiles, not both"))
        for x in self.eval_points or ():
            if not math.isfinite(x) or x < 0.0:
                problems.append(("eval_points", f"{x} is not a finite value >= 0"))
        for q in self.eval_quantiles or ():
            if not 0.0 < q < 1.0:
                problems.append(("eval_quantiles", f"{q} is not in (0, 1)"))
        if problems:
            raise ConfigError(problems)

    @classmethod
    def from_dict(cls, doc):
        validator = jsonschema.Draft202012Validator(load_schema())
        problems = []
        for err in sorted(validator.iter_errors(doc), key=lambda e: list(e.path)):
            where = ".".join(str(p) for p in err.path) or "<root>"
            problems.append((where, err.message))
        if problems:
            raise ConfigError(problems)
        kw = dict(doc)
        if "methods" in kw:
            kw["methods"] = tuple(kw["methods"])
        return cls(**kw)

    def to_dict(self):
        d = {
            "theta0": self.theta0,
            "sample_sizes": list(self.sample_sizes),
            "replications": int(self.replications),
            "methods": [m.value for m in self.methods],
            "master_seed": int(self.master_seed),
        }
        if self.eval_points is not None:
            d["eval_points"] = list(self.eval_points)
        else:
            d["eval_quantiles"] = list(self.eval_quantiles or DEFAULT_QUANTILES)
        return d

    def grid(self):
        if self.eval_points is not None:
            return np.array(self.eval_points)
        levels = self.eval_quantiles or DEFAULT_QUANTILES
        return np.array([quantile(q, self.theta0) for q in levels])


@dataclass(frozen=True)
class MseCell:
    method: EstimatorKind
    n: int
    x: float
    target: Target
    mean_estimate: float
    bias: float
    mse: float
    se: float
    used: int


@dataclass(frozen=True)
class AverageMse:
    method: EstimatorKind
    n: int
    target: Target
    mse: float
    se: float
    used: int


@dataclass
class MseReport:
    config: SimConfig
    grid: np.ndarray
    cells: list
    averages: list
    exclusions: dict
    backend: str = ""
    wall_time: float = 0.0
    threads: int = 1
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._index = {(a.method, a.n, a.target): a for a in self.averages}

    def average(self, method, n, target):
        key = (EstimatorKind.parse(method) if not isinstance(method, EstimatorKind) else method,
               int(n), Target.parse(target))
        try:
            return self._index[key]
        except KeyError:
            raise DomainError(f"report has no entry for {key}") from None

    def cell(self, method, n, x_index, target):
        method = method if isinstance(method, EstimatorKind) else EstimatorKind.parse(method)
        target = Target.parse(target)
        x = float(self.grid[x_index])
        for c in self.cells:
            if c.method is method and c.n == n and c.target is target and c.x == x:
                return c
        raise DomainError("no such cell")

    def to_csv(self):
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for c in self.cells:
            buf.write(",".join([c.method.value, str(c.n), fmt(c.x), c.target.value,
                                fmt(c.bias), fmt(c.mse), fmt(c.se)]) + "\n")
        return buf.getvalue()

    def metadata(self):
        return {
            "config": self.config.to_dict(),
            "master_seed": int(self.config.master_seed),
            "grid": [float(x) for x in self.grid],
            "exclusions": self.exclusions,
            "averages": [
                {"method": a.method.value, "n": a.n, "target": a.target.value,
                 "mse": a.mse, "se": a.se, "used": a.used}
                for a in self.averages
            ],
            "cells": [
                {**asdict(c), "method": c.method.value, "target": c.target.value}
                for c in self.cells
            ],
            "backend": self.backend,
            "threads": self.threads,
            "wall_time_seconds": self.wall_time,
        }


def thread_count(threads=None):
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise DomainError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def draw_replications(theta0, n, replications, master_seed):
    """Sorted samples, one row per replication, from index-keyed substreams."""
    rows = np.empty((replications, n))
    for r in range(replications):
        rows[r] = draw(n, theta0, substream(master_seed, n, r))
    rows.sort(axis=1, kind="stable")
    return rows


def _fit_parallel(method, rows, threads):
    if threads <= 1 or rows.shape[0] < 2:
        return fit_rows(method, rows)
    chunks = np.array_split(np.arange(rows.shape[0]), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda idx: fit_rows(method, rows[idx]), chunks))
    return np.concatenate(parts)


def _plugin_curves(theta, grid):
    th = theta[:, None]
    x = grid[None, :]
    u = th * x
    f = th * th / (1.0 + th) * (1.0 + x) * np.exp(-u)
    F = 1.0 - (1.0 + th + u) / (1.0 + th) * np.exp(-u)
    return f, F


def _summarize(method, n, grid, target, est, truth):
    ok = np.all(np.isfinite(est), axis=1)
    e = est[ok] - truth[None, :]
    m = int(ok.sum())
    cells = []
    for g, x in enumerate(grid):
        if m == 0:
            cells.append(MseCell(method, n, float(x), target, math.nan, math.nan,
                                 math.nan, math.nan, 0))
            continue
        sq = e[:, g] ** 2
        se = float(np.std(sq, ddof=1) / math.sqrt(m)) if m > 1 else math.nan
        cells.append(MseCell(method, n, float(x), target, float(np.mean(est[ok, g])),
                             float(np.mean(e[:, g])), float(np.mean(sq)), se, m))
    if m == 0:
        avg = AverageMse(method, n, target, math.nan, math.nan, 0)
    else:
        per_rep = np.mean(e ** 2, axis=1)
        se = float(np.std(per_rep, ddof=1) / math.sqrt(m)) if m > 1 else math.nan
        avg = AverageMse(method, n, target, float(np.mean(per_rep)), se, m)
    return cells, avg


def run_simulation(cfg, threads=None):
    """Run the study described by ``cfg`` and return an :class:`MseReport`."""
    if not isinstance(cfg, SimConfig):
        cfg = SimConfig.from_dict(cfg)
    threads = thread_count(threads)
    start = time.perf_counter()
    grid = cfg.grid()
    theta0 = float(cfg.theta0)
    u = theta0 * grid
    true_pdf = theta0 ** 2 / (1.0 + theta0) * (1.0 + grid) * np.exp(-u)
    true_cdf = 1.0 - (1.0 + theta0 + u) / (1.0 + theta0) * np.exp(-u)
    methods = sorted(cfg.methods, key=lambda m: m.order)
    results = {}
    exclusions = {m.value: {} for m in methods}
    for n in sorted(cfg.sample_sizes):
        rows = draw_replications(theta0, n, int(cfg.replications), cfg.master_seed)
        for method in methods:
            if method is EstimatorKind.UMVUE:
                t = np.array([math.fsum(r) for r in rows])[:, None]
                f_hat = umvue_pdf_values(grid[None, :], t, n)
                F_hat = umvue_cdf_values(grid[None, :], t, n)
            else:
                theta_hat = _fit_parallel(method, rows, threads)
                f_hat, F_hat = _plugin_curves(theta_hat, grid)
            exclusions[method.value][str(n)] = int(np.sum(~np.all(np.isfinite(f_hat), axis=1)))
            results[(method, n, Target.PDF)] = _summarize(method, n, grid, Target.PDF, f_hat, true_pdf)
            results[(method, n, Target.CDF)] = _summarize(method, n, grid, Target.CDF, F_hat, true_cdf)
    cells, averages = [], []
    for method in methods:
        for n in sorted(cfg.sample_sizes):
            pdf_cells, pdf_avg = results[(method, n, Target.PDF)]
            cdf_cells, cdf_avg = results[(method, n, Target.CDF)]
            for a, b in zip(pdf_cells, cdf_cells):
                cells.extend((a, b))
            averages.extend((pdf_avg, cdf_avg))
    return MseReport(cfg, grid, cells, averages, exclusions, backend=_backend.NAME,
                     wall_time=time.perf_counter() - start, threads=threads)


def rank_methods(report, n, target):
    """Methods ordered by grid-averaged MSE, ties by enumeration order."""
    target = Target.parse(target)
    entries = [a for a in report.averages if a.n == int(n) and a.target is target]
    if not entries:
        raise DomainError(f"report does not cover n={n}, target={target.value}")
    return [a.method for a in sorted(entries, key=lambda a: (a.mse, a.method.order))]

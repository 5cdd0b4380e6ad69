"""Compare the compiled and pure-Python fitting kernels.

Usage::

    python benchmarks/bench_kernels.py [--reps 200] [--sizes 20,80,320]

Prints the mean time per fit for each estimator kind, sample size and
backend, the speed-up, and the largest relative difference in theta between
the two backends.
"""
import argparse
import time

import numpy as np

from lindley_est import _purefit
from lindley_est.distribution import draw, substream
from lindley_est.estimators import DEFAULT_BRACKET

try:
    from lindley_est import _kernels
except ImportError:
    _kernels = None

KINDS = {"PCE": _purefit.PCE, "LSE": _purefit.LSE, "WLSE": _purefit.WLSE,
         "CVME": _purefit.CVME, "ADE": _purefit.ADE}


def time_batch(module, kind, rows):
    lo, hi = DEFAULT_BRACKET
    start = time.perf_counter()
    theta, *_ = module.fit_batch(kind, rows, lo, hi, 1e-8, 10_000)
    return (time.perf_counter() - start) / rows.shape[0], theta


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--reps", type=int, default=200)
    ap.add_argument("--sizes", default="20,80,320")
    ap.add_argument("--theta", type=float, default=1.0)
    args = ap.parse_args(argv)
    if _kernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e .` first")
    print(f"{'kind':<5} {'n':>5} {'cython ms':>10} {'python ms':>10} {'speed-up':>9} {'max rel diff':>13}")
    for n in (int(v) for v in args.sizes.split(",")):
        rows = np.sort(draw((args.reps, n), args.theta, substream(1, n)), axis=1)
        for name, kind in KINDS.items():
            tc, thc = time_batch(_kernels, kind, rows)
            tp, thp = time_batch(_purefit, kind, rows)
            diff = float(np.max(np.abs(thc - thp) / thp))
            print(f"{name:<5} {n:>5} {tc * 1e3:>10.3f} {tp * 1e3:>10.3f} {tp / tc:>9.1f} {diff:>13.1e}")


if __name__ == "__main__":
    main()

"""Command-line interface: ``lindley-est {fit,sample,simulate,risk,curve}``.

Exit status is 0 on success, 1 on a numerical failure and 2 on invalid
input.
"""
import argparse
import csv
import io
import json
import math
from pathlib import Path
import sys

import numpy as np

from . import __version__
from .distribution import Sample, cdf, pdf, sample as draw_sample
from .errors import ConvergenceError, DomainError, EvaluationError, NumericalError
from .estimators import EstimatorKind, estimate
from .function_estimators import estimate_curve
from .risk import RiskQuery, risk
from .simulation import SimConfig, fmt, run_simulation

EXIT_OK, EXIT_NUMERIC, EXIT_INPUT = 0, 1, 2


class InputError(DomainError):
    pass


def read_data(path):
    """Parse a data file: one decimal per line, ``#`` comments, blanks ignored."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror or exc}") from None
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            v = float(line)
        except ValueError:
            raise InputError(f"{path}:{lineno}: {line!r} is not a number") from None
        if not math.isfinite(v) or v <= 0.0:
            raise InputError(f"{path}:{lineno}: value {line} is not a positive finite number")
        values.append(v)
    if not values:
        raise InputError(f"{path}: no observations")
    return Sample(values)


def parse_grid(spec):
    """``start:stop:count`` (inclusive, evenly spaced) or a comma list."""
    try:
        if ":" in spec:
            start, stop, count = spec.split(":")
            count = int(count)
            if count < 1:
                raise ValueError
            grid = np.linspace(float(start), float(stop), count)
        else:
            grid = np.array([float(v) for v in spec.split(",") if v.strip()])
    except ValueError:
        raise InputError(f"bad grid spec {spec!r}; use start:stop:count or a comma list") from None
    if grid.size == 0 or not np.all(np.isfinite(grid)) or np.any(grid < 0.0):
        raise InputError("grid points must be finite and >= 0")
    return grid


def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows([_cell(v) for v in row] for row in rows)
    return buf.getvalue()


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def _emit(text, output):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _json(obj):
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def cmd_fit(args):
    s = read_data(args.input)
    if args.method.lower() == "all":
        kinds = list(EstimatorKind)
    else:
        kinds = [EstimatorKind.parse(args.method)]
    records = []
    for kind in kinds:
        if kind is EstimatorKind.UMVUE:
            records.append({"method": kind.value, "theta_hat": None, "objective_value": None,
                            "evaluations": None, "converged": None,
                            "note": "functional only, use curve"})
            continue
        est = estimate(s, kind)
        records.append({"method": kind.value, "theta_hat": est.theta_hat,
                        "objective_value": est.objective_value,
                        "evaluations": est.evaluations, "converged": est.converged,
                        "note": ""})
    if args.format == "json":
        _emit(_json({"n": s.n, "sum": s.t, "fits": records}), args.output)
    else:
        header = ["method", "theta_hat", "objective_value", "evaluations", "converged", "note"]
        _emit(_csv(header, [[r[h] for h in header] for r in records]), args.output)


def cmd_sample(args):
    if args.n < 1:
        raise InputError("--n must be >= 1")
    s = draw_sample(args.n, args.theta, args.seed)
    if args.format == "json":
        _emit(_json({"n": args.n, "theta": args.theta, "seed": args.seed,
                     "values": [float(fmt(v)) for v in s.values]}), args.output)
    else:
        _emit("".join(fmt(v) + "\n" for v in s.values), args.output)


def cmd_simulate(args):
    try:
        doc = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {args.config}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.config}: not valid JSON ({exc})") from None
    cfg = SimConfig.from_dict(doc)
    report = run_simulation(cfg, threads=args.threads)
    if args.format == "json":
        _emit(_json(report.metadata()), args.output)
        return
    _emit(report.to_csv(), args.output)
    if args.output:
        meta = args.metadata or f"{args.output}.meta.json"
        Path(meta).write_text(_json(report.metadata()))


def cmd_risk(args):
    q = RiskQuery(args.x, args.theta, args.n, args.target, args.estimator)
    r = risk(q, jacobian_factor=args.jacobian_factor)
    record = {"x": q.x, "theta": q.theta, "n": q.n, "target": q.target.value,
              "estimator": q.estimator.value, **r.as_dict()}
    if args.format == "json":
        _emit(_json(record), args.output)
    else:
        _emit(_csv(list(record), [list(record.values())]), args.output)


def cmd_curve(args):
    s = read_data(args.input)
    grid = parse_grid(args.grid)
    kind = EstimatorKind.parse(args.method)
    f_hat, F_hat = estimate_curve(s, kind, grid)
    header = ["x", "pdf_hat", "cdf_hat"]
    cols = [grid, np.atleast_1d(f_hat), np.atleast_1d(F_hat)]
    if args.theta0 is not None:
        header += ["pdf_true", "cdf_true"]
        cols += [np.atleast_1d(pdf(grid, args.theta0)), np.atleast_1d(cdf(grid, args.theta0))]
    rows = [[float(c[i]) for c in cols] for i in range(grid.size)]
    if args.format == "json":
        _emit(_json({"method": kind.value, "n": s.n,
                     "points": [dict(zip(header, r)) for r in rows]}), args.output)
    else:
        _emit(_csv(header, rows), args.output)


def build_parser():
    p = argparse.ArgumentParser(prog="lindley-est", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--output", help="write here instead of standard output")

    sp = sub.add_parser("fit", help="estimate theta from a data file")
    sp.add_argument("input")
    sp.add_argument("--method", default="all",
                    help="one of " + ", ".join(k.value for k in EstimatorKind) + ", or 'all'")
    common(sp)
    sp.set_defaults(func=cmd_fit)

    sp = sub.add_parser("sample", help="draw a Lindley sample")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--seed", type=int, default=0)
    common(sp)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("simulate", help="run a Monte Carlo MSE study")
    sp.add_argument("--config", required=True, help="JSON simulation config")
    sp.add_argument("--metadata", help="metadata sidecar path (default: OUTPUT.meta.json)")
    sp.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: $LINDLEY_EST_THREADS or CPU count)")
    common(sp)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("risk", help="exact bias and MSE by quadrature")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--theta", type=float, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--target", choices=("pdf", "cdf", "PDF", "CDF"), required=True)
    sp.add_argument("--estimator", choices=("mle", "umvue", "MLE", "UMVUE", "MLE_PLUGIN"),
                    default="mle")
    sp.add_argument("--jacobian-factor", action="store_true",
                    help="multiply the integrands by |dg/dt| (literal printed form)")
    common(sp)
    sp.set_defaults(func=cmd_risk)

    sp = sub.add_parser("curve", help="estimated pdf/cdf on a grid")
    sp.add_argument("input")
    sp.add_argument("--method", default="MLE")
    sp.add_argument("--grid", required=True, help="start:stop:count or comma list")
    sp.add_argument("--theta0", type=float, default=None, help="add true-curve columns")
    common(sp)
    sp.set_defaults(func=cmd_curve)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except DomainError as exc:
        print(f"lindley-est: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (EvaluationError, ConvergenceError, NumericalError) as exc:
        print(f"lindley-est: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

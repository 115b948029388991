"""Command-line front end: tables and figure-ready data for every result.

Lists are comma-separated; any item may be a range ``min:max:step``
(inclusive). Every CSV starts with a ``# config:`` comment and a header row.
Exit status is 0 when all checks pass; otherwise 1, with a JSON failure list
on stderr.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from dataclasses import asdict, dataclass, field
from decimal import Decimal, InvalidOperation

import numpy as np

from . import certificate, pep_search, rates, simulator
from .instances import make_huber, make_quadratic, oracle_exact, oracle_orthogonal, oracle_random, oracle_scaled


@dataclass
class SweepConfig:
    deltas: list
    h_min: float = 0.0
    h_max: float = 1.0
    h_policy: str = "fraction"  # "fraction" of 2/(1+delta), or "absolute"
    points: int = 500
    n_list: list = field(default_factory=lambda: [1])
    fmt: str = "csv"
    out: str = "-"

    def __post_init__(self):
        if not self.deltas:
            raise ValueError("delta list is empty")
        if not self.n_list:
            raise ValueError("N list is empty")
        if self.points < 2:
            raise ValueError("resolution must be at least 2 points")
        if self.h_policy not in ("fraction", "absolute"):
            raise ValueError("h policy must be 'fraction' or 'absolute'")

    def h_grid(self, delta):
        hm = rates.h_max(delta)
        hi = self.h_max * hm if self.h_policy == "fraction" else min(self.h_max, hm)
        lo = self.h_min * hm if self.h_policy == "fraction" else self.h_min
        return np.linspace(lo, hi, self.points)


def _decimal(text):
    try:
        return Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def parse_list(text, kind=float):
    """``"0.1,0.5"`` or ``"0.01:0.99:0.01"`` (or a mix) to a list of numbers."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        if ":" in item:
            parts = item.split(":")
            if len(parts) != 3:
                raise argparse.ArgumentTypeError(f"range must be min:max:step, got {item!r}")
            lo, hi, step = (_decimal(p) for p in parts)
            if step <= 0:
                raise argparse.ArgumentTypeError("range step must be positive")
            n = int((hi - lo) / step)
            vals = [lo + i * step for i in range(n + 1)]
            out.extend(kind(v) for v in vals if v <= hi)
        else:
            out.append(kind(_decimal(item)))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _int_list(text):
    return parse_list(text, int)


def fmt_num(x):
    if x is None or x == "":
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return repr(x)
    return str(x)


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return x if math.isfinite(x) else ("inf" if x > 0 else ("-inf" if x < 0 else "nan"))
    return x


def write_output(path, text):
    """Write atomically (temp file then rename); ``-`` means stdout."""
    if path in (None, "-"):
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def render_table(rows, columns, config, fmt="csv", extra=None):
    if fmt == "json":
        payload = {"config": config, "rows": [{c: r.get(c, "") for c in columns} for r in rows]}
        if extra:
            payload.update(extra)
        return json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"
    buf = io.StringIO()
    buf.write("# config: " + json.dumps(_jsonable(config), sort_keys=True) + "\n")
    for k, v in (extra or {}).items():
        buf.write(f"# {k}: " + json.dumps(_jsonable(v), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt_num(r.get(c, "")) for c in columns])
    return buf.getvalue()


# ---------------------------------------------------------------------------


def rate_rows(cfg):
    """One row per ``(delta, h)``; regime endpoints are always included."""
    rows, failures = [], []
    for delta in cfg.deltas:
        lo, hi, _ = rates.regime_boundaries(delta)
        grid = np.union1d(cfg.h_grid(delta), [lo, hi])
        for h in grid:
            h = float(h)
            regime = rates.classify_regime(h, delta)
            row = {
                "delta": delta,
                "h": h,
                "regime": regime.value,
                "C": rates.rate_one_step_to_f1(h, delta),
                "C_tilde": rates.rate_one_step_to_fstar(h, delta),
                "lambda_tilde": rates.lambda_tilde(h, delta) if (regime is rates.Regime.INTERMEDIATE and delta > 0) else "",
                "boundary": "",
                "branch_gap": "",
            }
            for N in cfg.n_list:
                row[f"C_tilde_N{N}"] = rates.rate_N_steps(h, delta, N)
                row[f"lower_bound_N{N}"] = rates.lower_bound_N(h, delta, N)
            if delta > 0 and h in (lo, hi):
                row["boundary"] = "h_LI" if h == lo else "h_IR"
                gap = boundary_gap(h, delta, cfg.n_list, "left" if h == lo else "right")
                row["branch_gap"] = gap
                if not gap <= 1e-10:
                    failures.append({"check": "continuity", "delta": delta, "h": h, "gap": gap})
            rows.append(row)
    cols = ["delta", "h", "regime", "C", "C_tilde", "lambda_tilde"]
    cols += [f"C_tilde_N{N}" for N in cfg.n_list] + [f"lower_bound_N{N}" for N in cfg.n_list]
    cols += ["boundary", "branch_gap"]
    return rows, cols, failures


def boundary_gap(h, delta, n_list, side):
    """Largest relative difference between the two branch formulas meeting at ``h``."""
    gaps = []
    combos = [("f1", 1)] + [("fstar", N) for N in sorted(set([1, *n_list]))]
    for crit, N in combos:
        left, inter, right = (float(v) for v in rates.branch_values(h, delta, N, crit))
        other = left if side == "left" else right
        gaps.append(abs(inter - other) / max(abs(inter), abs(other)))
    return max(gaps)


def cmd_rates(args):
    cfg = SweepConfig(
        deltas=args.delta,
        h_min=args.h_min,
        h_max=args.h_max,
        h_policy=args.h_policy,
        points=args.points,
        n_list=args.n,
        fmt=args.format,
        out=args.out,
    )
    rows, cols, failures = rate_rows(cfg)
    config = {"command": "rates", **asdict(cfg)}
    del config["out"], config["fmt"]  # where and how to write is not part of the result
    write_output(cfg.out, render_table(rows, cols, config, cfg.fmt))
    return failures


def _certify_grid(delta, grid):
    if delta == 0:
        return [2.0 * k / (grid + 1) for k in range(1, grid + 1)]
    hm = rates.h_max(delta)
    return [hm * k / (grid + 1) for k in range(1, grid + 1)]


def cmd_certify(args):
    rows, failures = [], []
    for delta in args.delta:
        for h in _certify_grid(delta, args.grid):
            rep = certificate.verify_certificate_exact(h) if delta == 0 else certificate.verify_certificate(h, delta)
            row = rep.as_row()
            rows.append(row)
            if not rep.passed:
                failures.append({"delta": delta, "h": h, "failed": rep.failures})
    cols = ["delta", "h", "regime", "lambda", "b", "rho", "min_eig_A1", "rank1_residual", "rate_gap", "passed", "failures"]
    config = {"command": "certify", "delta": args.delta, "grid": args.grid}
    summary = {"summary": {"checked": len(rows), "failed": len(failures)}}
    write_output(args.out, render_table(rows, cols, config, args.format, summary))
    return failures


def _make_oracle(name, delta, seed, orientation, instance_kind):
    if name == "auto":
        name = "lower" if instance_kind == "huber" else "upper"
    if name == "lower":
        return oracle_scaled(1.0 - delta, delta)
    if name == "upper":
        return oracle_scaled(1.0 + delta, delta)
    if name == "exact":
        return oracle_exact()
    if name == "orthogonal":
        return oracle_orthogonal(delta, orientation)
    if name == "random":
        return oracle_random(delta, seed)
    raise ValueError(f"unknown oracle {name!r}")


def cmd_simulate(args):
    _echo_seed(args)
    if args.instance == "huber":
        inst = make_huber(args.delta, args.h, args.n, args.l, args.dim)
    else:
        inst = make_quadratic(args.l, args.dim)
    oracle = _make_oracle(args.oracle, args.delta, args.seed, args.orientation, args.instance)
    failures = []
    try:
        trace = simulator.run(inst, oracle, args.h, args.delta, args.n)
    except (simulator.InexactnessViolation, ValueError) as exc:
        return [{"check": "inexactness", "error": str(exc), "iteration": getattr(exc, "k", None)}]
    m = simulator.metrics(trace)
    summary = dict(m)
    if args.h <= rates.h_max(args.delta):
        bound = rates.rate_N_steps(args.h, args.delta, args.n)
        summary["rate_N_steps"] = bound
        if m["ratio_min"] > bound + 1e-9:
            failures.append({"check": "upper_bound", "ratio_min": m["ratio_min"], "bound": bound})
    config = {
        "command": "simulate",
        "instance": inst.descriptor(),
        "oracle": oracle.descriptor(),
        "h": args.h,
        "delta": args.delta,
        "N": args.n,
        "seed": args.seed,
    }
    comment = "config: " + json.dumps(_jsonable(config), sort_keys=True)
    comment += "\nmetrics: " + json.dumps(_jsonable(summary), sort_keys=True)
    write_output(args.out, trace.to_csv(comment))
    print(json.dumps(_jsonable(summary), sort_keys=True), file=sys.stderr)
    return failures


def cmd_search(args):
    _echo_seed(args)
    best, value = pep_search.search_one_step(args.h, args.delta, args.criterion, args.dim, args.budget, args.seed, args.n_refine)
    bound = rates.rate_one_step_to_fstar(args.h, args.delta) if args.criterion == "to_fstar" else rates.rate_one_step_to_f1(args.h, args.delta)
    ok, rep = best.validate()
    payload = {
        "config": {
            "command": "search",
            "h": args.h,
            "delta": args.delta,
            "criterion": args.criterion,
            "dimension": args.dim,
            "budget": args.budget,
            "seed": args.seed,
        },
        "value": value,
        "bound": bound,
        "value_over_bound": value / bound,
        "regime": rates.classify_regime(args.h, args.delta).value,
        "candidate": best.to_dict(),
    }
    write_output(args.out, json.dumps(_jsonable(payload), indent=2) + "\n")
    failures = []
    if not ok:
        failures.append({"check": "feasibility", "issues": rep["issues"]})
    if value > bound + 1e-6:
        failures.append({"check": "exceeds_bound", "value": value, "bound": bound})
    return failures


def cmd_hopt(args):
    rows, failures = [], []
    for delta in args.delta:
        lo, hi, _ = rates.regime_boundaries(delta)
        for N in args.n:
            h_opt, r_opt = rates.optimal_stepsize(delta, N)
            r_ir = rates.rate_N_steps(hi, delta, N)
            inside = lo - 1e-9 <= h_opt <= hi + 1e-9
            row = {
                "delta": delta,
                "N": N,
                "h_opt": h_opt,
                "rate_opt": r_opt,
                "h_LI": lo,
                "h_IR": hi,
                "rate_at_h_IR": r_ir,
                "ratio": r_ir / r_opt,
                "in_intermediate": inside,
            }
            rows.append(row)
            if not inside:
                failures.append({"check": "h_opt_in_intermediate", "delta": delta, "N": N, "h_opt": h_opt})
            if delta >= 0.2 and row["ratio"] > 1.05:
                failures.append({"check": "h_IR_near_optimal", "delta": delta, "N": N, "ratio": row["ratio"]})
    cols = ["delta", "N", "h_opt", "rate_opt", "h_LI", "h_IR", "rate_at_h_IR", "ratio", "in_intermediate"]
    write_output(args.out, render_table(rows, cols, {"command": "hopt", "delta": args.delta, "N": args.n}, args.format))
    return failures


def cmd_hmax(args):
    rows, failures = [], []
    for delta in args.delta:
        ours, prior, ratio = rates.compare_h_max(delta)
        rows.append({"delta": delta, "h_max": ours, "h_max_prior": prior, "ratio": ratio})
        if ours < prior or (delta > 0 and ours == prior):
            failures.append({"check": "dominance", "delta": delta})
    cols = ["delta", "h_max", "h_max_prior", "ratio"]
    write_output(args.out, render_table(rows, cols, {"command": "hmax", "delta": args.delta}, args.format))
    return failures


def _echo_seed(args):
    if args.seed_given is None:
        args.seed = 0
        print("seed: 0 (default)", file=sys.stderr)
    else:
        args.seed = args.seed_given
        print(f"seed: {args.seed}", file=sys.stderr)


def build_parser():
    p = argparse.ArgumentParser(prog="inexact-gd", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt=True):
        sp.add_argument("--out", default="-", help="output path, '-' for stdout")
        if fmt:
            sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("rates", help="rates, regimes and bounds over a stepsize grid")
    sp.add_argument("--delta", type=parse_list, default=[0.0, 0.1, 0.5, 0.8])
    sp.add_argument("--h-min", type=float, default=0.0)
    sp.add_argument("--h-max", type=float, default=1.0)
    sp.add_argument("--h-policy", choices=("fraction", "absolute"), default="fraction")
    sp.add_argument("--points", type=int, default=500)
    sp.add_argument("--n", type=_int_list, default=[1, 5, 20])
    common(sp)
    sp.set_defaults(func=cmd_rates)

    sp = sub.add_parser("certify", help="rebuild and check the one-step dual certificates")
    sp.add_argument("--delta", type=parse_list, default=[0.1, 0.5, 0.8])
    sp.add_argument("--grid", type=int, default=200)
    common(sp)
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("simulate", help="run inexact gradient descent on a worst-case instance")
    sp.add_argument("--instance", choices=("huber", "quadratic"), required=True)
    sp.add_argument("--oracle", choices=("auto", "lower", "upper", "exact", "orthogonal", "random"), default="auto")
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--h", type=float, required=True)
    sp.add_argument("--n", type=int, default=1)
    sp.add_argument("--l", type=float, default=1.0)
    sp.add_argument("--dim", type=int, choices=(1, 2), default=1)
    sp.add_argument("--orientation", type=int, choices=(1, -1), default=1)
    sp.add_argument("--seed", dest="seed_given", type=int, default=None)
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("search", help="numerical one-step worst case in dimension 1 or 2")
    sp.add_argument("--h", type=float, required=True)
    sp.add_argument("--delta", type=float, required=True)
    sp.add_argument("--criterion", choices=pep_search.CRITERIA, default="to_fstar")
    sp.add_argument("--dim", type=int, choices=(1, 2), default=2)
    sp.add_argument("--budget", type=int, default=10_000)
    sp.add_argument("--n-refine", type=int, default=16)
    sp.add_argument("--seed", dest="seed_given", type=int, default=None)
    common(sp, fmt=False)
    sp.set_defaults(func=cmd_search)

    sp = sub.add_parser("hopt", help="optimal stepsize of the N-step bound vs the h_IR approximation")
    sp.add_argument("--delta", type=parse_list, default=parse_list("0.1:0.9:0.1"))
    sp.add_argument("--n", type=_int_list, default=[1, 5, 20, 50])
    common(sp)
    sp.set_defaults(func=cmd_hopt)

    sp = sub.add_parser("hmax", help="largest admissible stepsize vs the earlier bound")
    sp.add_argument("--delta-grid", "--delta", dest="delta", type=parse_list, default=parse_list("0.01:0.99:0.01"))
    common(sp)
    sp.set_defaults(func=cmd_hmax)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        failures = args.func(args)
    except (ValueError, OSError) as exc:
        print(json.dumps({"error": str(exc)}), file=sys.stderr)
        return 2
    if failures:
        print(json.dumps({"failures": _jsonable(failures)}), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

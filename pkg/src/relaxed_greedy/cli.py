"""Command-line experiment runner.

Subcommands::

    relaxed-greedy run --alg prga --alpha 2 --instance counterexample:b=0.4 --m 500
    relaxed-greedy reproduce [--output-dir DIR]
    relaxed-greedy verify crga --trials 100 --dim 16 --m 200 --seed 7

``verify`` exits 0 iff every checked bound holds and 1 otherwise. Invalid
arguments and I/O failures exit 2. Parallelism for ``verify`` trials is read
from ``RELAXED_GREEDY_JOBS`` (default: number of processors).
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path


from . import analysis
from .dictionary import build_a1_element, canonical_dictionary, load_instance
from .engines import AlgorithmConfig, run

JOBS_ENV = "RELAXED_GREEDY_JOBS"
SIMULATION_ALPHAS = (1.1, 1.5, 2.0)


def parse_instance(text):
    """Resolve an ``--instance`` argument to ``(dictionary, element, label)``.

    Accepted forms: ``counterexample:b=<b>``, ``lowerbound:m=<m>``,
    ``simulation`` (f = (1/2, 1/2) in R^2) and ``file:<path.json>``.
    """
    name, _, rest = text.partition(":")
    if name == "file":
        with open(rest) as fh:
            doc = json.load(fh)
        d, el = load_instance(doc)
        return d, el, Path(rest).stem
    params = {}
    if rest:
        for item in rest.split(","):
            key, eq, value = item.partition("=")
            if not eq:
                raise ValueError(f"malformed instance parameter {item!r}")
            params[key.strip()] = value.strip()
    if name == "counterexample":
        b = float(params["b"])
        d, el = analysis.counterexample_instance(b)
        return d, el, f"counterexample(b={b})"
    if name == "lowerbound":
        m = int(params["m"])
        d, el = analysis.lower_bound_instance(m)
        return d, el, f"lowerbound(m={m})"
    if name == "simulation":
        d = canonical_dictionary(2)
        return d, build_a1_element(d, [(0, 1, 0.5), (1, 1, 0.5)]), "simulation"
    raise ValueError(f"unknown instance {text!r}")


def final_error_line(m, value, prefix=""):
    return f"{prefix}Final Error ||f - T_{m}|| = {value:.6f}"


def cmd_run(args):
    d, el, label = parse_instance(args.instance)
    cfg = AlgorithmConfig(args.alg, alpha=args.alpha, max_iterations=args.m,
                          stop_epsilon=args.stop_epsilon)
    trace = run(el.vector, d, cfg, label=label)
    out = Path(args.output or f"{args.alg}_trace.{args.format}")
    with open(out, "w", newline="") as fh:
        if args.format == "csv":
            trace.to_csv(fh)
        else:
            fh.write(trace.to_json(indent=1))
            fh.write("\n")
    print(final_error_line(len(trace.records), trace.final_residual_l2))
    return 0


def simulate(m=500, alphas=SIMULATION_ALPHAS):
    """PRGA on f = (1/2, 1/2) over the canonical R^2 dictionary, one trace per alpha."""
    d, el, label = parse_instance("simulation")
    return {
        a: run(el.vector, d, AlgorithmConfig("prga", alpha=a, max_iterations=m), label=label)
        for a in alphas
    }


def cmd_reproduce(args):
    traces = simulate(args.m)
    print("--- Results of the simulation ---")
    for a, tr in traces.items():
        print(final_error_line(len(tr.records), tr.final_residual_l2, prefix=f"Alpha={a}: "))
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "prga_simulation.csv", "w") as fh:
        fh.write("alpha,m,residual_l2\n")
        for a, tr in traces.items():
            for rec in tr.records:
                fh.write(f"{a},{rec.m},{rec.residual_l2:.17g}\n")
    return 0


def _n_jobs():
    value = os.environ.get(JOBS_ENV)
    if value:
        return max(1, int(value))
    return os.cpu_count() or 1


def _upper_bound_trial(task):
    seed_seq, dim, bound, alpha, m = task
    d, el = analysis.trial_instance(seed_seq, dim)
    kind = {"rga": "rga", "prga": "prga", "crga": "crga"}[bound]
    trace = run(el.vector, d, AlgorithmConfig(kind, alpha=alpha, max_iterations=m))
    return analysis.check_upper_bound(trace, bound)


def _map_trials(fn, tasks):
    jobs = min(_n_jobs(), len(tasks))
    if jobs <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves submission order
        return list(pool.map(fn, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def _write_trial_reports(path, reports, header):
    with open(path, "w") as fh:
        fh.write(f"# {header}\n")
        fh.write("trial,m,observed,bound,satisfied\n")
        for t, rep in enumerate(reports):
            for m, o, b, ok in rep.rows:
                fh.write(f"{t},{m},{o:.17g},{b:.17g},{str(ok).lower()}\n")


def _verify_upper(args):
    dims = [int(x) for x in str(args.dim).split(",")]
    seeds = analysis.trial_seeds(args.seed, args.trials)
    tasks = [(s, dims[t % len(dims)], args.bound, args.alpha, args.m) for t, s in enumerate(seeds)]
    reports = _map_trials(_upper_bound_trial, tasks)
    header = f"rng={analysis.RNG_ID} seed={args.seed} bound={args.bound} alpha={args.alpha} dims={args.dim}"
    if args.output:
        _write_trial_reports(args.output, reports, header)
    failed = [(t, r) for t, r in enumerate(reports) if not r.all_satisfied]
    worst = min((r.worst_margin for r in reports), default=math.inf)
    summary = {"name": args.bound, "trials": len(reports), "all_satisfied": not failed,
               "worst_margin": worst if math.isfinite(worst) else None}
    print(json.dumps(summary))
    for t, r in failed:
        print(f"trial {t}: violated at m={r.worst_m} (margin {r.worst_margin:.3e})", file=sys.stderr)
    return 0 if not failed else 1


def _verify_divergence(args):
    d, el = analysis.counterexample_instance(args.b)
    trace = run(el.vector, d, AlgorithmConfig("prga", alpha=args.alpha, max_iterations=args.m,
                                              stop_epsilon=0.0))
    report = analysis.check_divergence_floor(trace, args.b, args.alpha)
    limit = analysis.counterexample_limit_floor(args.b, args.alpha)
    ok = report.all_satisfied and trace.final_residual_l2 > limit > 0
    if args.output:
        with open(args.output, "w") as fh:
            report.to_csv(fh)
    summary = report.summary()
    summary.update(limit_floor=limit, final_residual=trace.final_residual_l2, all_satisfied=ok)
    print(json.dumps(summary))
    if not ok:
        print(f"violated at m={report.worst_m}", file=sys.stderr)
    return 0 if ok else 1


def _verify_lowerbound(args):
    m = args.m
    d, el = analysis.lower_bound_instance(m)
    target = analysis.lower_bound_value(m)
    best = analysis.best_m_term_error(el.vector, d, m)
    report = analysis.BoundReport(f"lowerbound(m={m})", "floor")
    report.add(m, best, target)
    for kind in ("pga", "rga", "crga"):
        tr = run(el.vector, d, AlgorithmConfig(kind, max_iterations=m, stop_epsilon=0.0))
        report.add(m, tr.final_residual_l2, target)
    exact = abs(best - target) <= analysis.BOUND_TOL
    ok = exact and report.all_satisfied
    if args.output:
        with open(args.output, "w") as fh:
            report.to_csv(fh)
    summary = report.summary()
    summary.update(best_m_term_error=best, expected=target, all_satisfied=ok)
    print(json.dumps(summary))
    print(f"best {m}-term error = {best:.6f} (1/(2*sqrt({m})) = {target:.6f})")
    return 0 if ok else 1


def cmd_verify(args):
    if args.bound == "divergence-floor":
        return _verify_divergence(args)
    if args.bound == "lowerbound":
        return _verify_lowerbound(args)
    if args.bound == "prga" and args.alpha > 1:
        raise ValueError(f"prga bound needs alpha <= 1, got {args.alpha}")
    return _verify_upper(args)


def build_parser():
    p = argparse.ArgumentParser(prog="relaxed-greedy", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run one algorithm and write its trace")
    r.add_argument("--alg", required=True, choices=["pga", "rga", "prga", "crga"])
    r.add_argument("--alpha", type=float, default=1.0)
    r.add_argument("--instance", required=True,
                   help="counterexample:b=B | lowerbound:m=M | simulation | file:PATH")
    r.add_argument("--m", type=int, default=100, help="number of iterations")
    r.add_argument("--format", choices=["csv", "json"], default="csv")
    r.add_argument("--output", "-o")
    r.add_argument("--stop-epsilon", type=float, default=1e-14)
    r.set_defaults(func=cmd_run)

    rp = sub.add_parser("reproduce", help="PRGA simulation for alpha in {1.1, 1.5, 2.0}")
    rp.add_argument("--m", type=int, default=500)
    rp.add_argument("--output-dir", default=".")
    rp.set_defaults(func=cmd_reproduce)

    v = sub.add_parser("verify", help="check a convergence bound numerically")
    v.add_argument("bound", choices=["rga", "prga", "crga", "divergence-floor", "lowerbound"])
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--dim", default="2,8,16,64", help="dimension or comma-separated list")
    v.add_argument("--m", type=int, default=200)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--alpha", type=float, default=1.0)
    v.add_argument("--b", type=float, default=0.4)
    v.add_argument("--output", "-o")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

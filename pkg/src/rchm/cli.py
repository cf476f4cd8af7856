"""Command-line entry points.

Every command writes plain-text tables into ``--out`` together with a
``manifest.json`` that records the arguments, parameters, seeds and format
version needed to reproduce them.  Exit codes: 0 success, 2 invalid input,
3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy

from . import __version__
from .bipartite import build_stratified
from .calibrate import (
    CalibrationError,
    DataSummary,
    InfeasibleSummaryError,
    calibrate,
    gamma_from_exponent,
)
from .dowker import DEGREE_KINDS, degree_histogram, degree_values, enumerate_simplices
from .homology import betti_numbers, filtered_complex, persistence_diagram, write_diagram
from .ingest import IngestError, dataset_summary, load_incidence_file
from .model import ModelParams, theoretical_degree_exponents
from .palm import typical_degree_samples, write_degree_samples
from .sampler import RngStream, sample_network
from .stats import (
    DegenerateSampleError,
    StableIntegrationError,
    TailTooSmallError,
    distribution_diagnostics,
    fit_power_law,
    fit_stable,
    five_number_summary,
    stable_p_value,
)

FORMAT_VERSION = 1
SCALAR_STATISTICS = ("incidences", "edges", "triangles", "betti1")
STATISTICS = SCALAR_STATISTICS + ("degree_exponent",)
EXPONENT_KINDS = ("Delta0", "Delta1", "Delta0_prime")
# skew of the fitted stable law: counts have heavy right tails, the first Betti number a left one
STABLE_SKEW = {"incidences": 1.0, "edges": 1.0, "triangles": 1.0, "betti1": -1.0}


class InputError(ValueError):
    pass


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, Path):
        return str(obj)
    return obj


def write_json(path, obj):
    Path(path).write_text(json.dumps(_clean(obj), indent=2, sort_keys=True) + "\n")


def write_manifest(out: Path, command: str, args: argparse.Namespace, **extra):
    # the output location and worker count do not affect any output
    arguments = {k: v for k, v in vars(args).items() if k not in ("func", "out", "workers")}
    outputs = sorted(p.name for p in out.iterdir() if p.is_file() and p.name != "manifest.json")
    manifest = {
        "command": command,
        "arguments": arguments,
        "format_version": FORMAT_VERSION,
        "versions": {"rchm": __version__, "numpy": np.__version__, "scipy": scipy.__version__},
        "outputs": outputs,
    }
    manifest.update(extra)
    write_json(out / "manifest.json", manifest)


def load_params(path) -> ModelParams:
    try:
        return ModelParams.from_json(Path(path).read_text())
    except (OSError, ValueError, TypeError) as exc:
        raise InputError(f"cannot load parameters from {path}: {exc}") from exc


def _cap(value):
    if value is None:
        return None
    if str(value).lower() in ("none", "0", "off"):
        return None
    n = int(value)
    if n < 1:
        raise InputError("--max-authors must be positive or 'none'")
    return n


def _out(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_value_counts(values, path):
    vals = np.asarray(values)
    vals = vals[np.isfinite(vals)] if vals.dtype.kind == "f" else vals
    uniq, freq = np.unique(vals, return_counts=True)
    with open(path, "w") as fh:
        fh.write("value,count\n")
        for v, c in zip(uniq.tolist(), freq.tolist()):
            fh.write(f"{v},{c}\n")


def _tail_exponent(values, x_min, discrete):
    try:
        fit = fit_power_law(values, x_min, discrete=discrete)
    except TailTooSmallError:
        return math.nan, 0
    return fit.exponent, fit.n_tail


@dataclass(frozen=True)
class ReplicationTask:
    params: ModelParams
    seed: int
    statistics: tuple
    x_mins: tuple
    max_authors: int | None
    continuous: bool = False


def run_replication(task: ReplicationTask, rep: int) -> dict:
    """All requested statistics of replication ``rep`` (stream ``(seed, rep)``)."""
    inst = sample_network(task.params, RngStream(task.seed, rep))
    graph = build_stratified(inst)
    need_betti = "betti1" in task.statistics
    cx = enumerate_simplices(graph, 2, task.max_authors)
    row = {
        "rep": rep,
        "n_p": len(inst.p),
        "n_p_prime": len(inst.p_prime),
        "incidences": graph.n_edges,
        "edges": cx.count(1),
        "triangles": cx.count(2),
    }
    if need_betti:
        row["betti1"] = betti_numbers(cx, 1)[1]
    if "degree_exponent" in task.statistics:
        for kind in EXPONENT_KINDS:
            vals = degree_values(graph if kind == "Delta0_prime" else cx, kind)
            for x_min in task.x_mins:
                e, n = _tail_exponent(vals, x_min, not task.continuous)
                row[f"exponent_{kind}_x{x_min:g}"] = e
                row[f"ntail_{kind}_x{x_min:g}"] = n
    return row


def _run_task(args):
    task, rep = args
    return run_replication(task, rep)


def run_ensemble(task: ReplicationTask, n_reps: int, workers: int = 1) -> list[dict]:
    jobs = [(task, rep) for rep in range(n_reps)]
    if workers <= 1:
        rows = [_run_task(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_task, jobs))
    return sorted(rows, key=lambda r: r["rep"])


def write_rows(rows, path):
    cols = list(rows[0].keys()) if rows else ["rep"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join("" if _clean(r[c]) is None else str(r[c]) for c in cols) + "\n")


def _scalar_outputs(out, name, values):
    diag = distribution_diagnostics(values)
    write_value_counts(np.asarray(values, dtype=np.int64), out / f"{name}_value_counts.csv")
    diag.write_qq(out / f"{name}_qq.csv")
    summary = diag.to_dict()
    summary["five_number"] = five_number_summary(values)
    write_json(out / f"{name}_summary.json", summary)
    return summary


def cmd_generate(args) -> int:
    params = load_params(args.params)
    out = _out(args.out)
    cap = _cap(args.max_authors)
    inst = sample_network(params, RngStream(args.seed, 0))
    inst.write(out / "instance.csv", out / "instance.params.json")
    graph = build_stratified(inst)
    graph.write_edge_list(out / "edges.csv")
    cx = enumerate_simplices(graph, args.max_dim, cap, inst.p.marks, inst.p.positions)
    cx.write(out / "complex.csv")
    kinds = ["Delta0", "Delta0_prime"]
    if args.max_dim >= 1:
        kinds += ["Delta1", "coface0"]
    if args.max_dim >= 2:
        kinds.append("coface1")
    for kind in kinds:
        degree_histogram(graph if kind == "Delta0_prime" else cx, kind).write(
            out / f"degree_{kind}_value_counts.csv"
        )
    counts = {
        "n_p": len(inst.p),
        "n_p_prime": len(inst.p_prime),
        "incidences": graph.n_edges,
        "simplices": [cx.count(m) for m in range(args.max_dim + 1)],
        "excluded_witnesses": cx.n_excluded_witnesses,
    }
    write_manifest(out, "generate", args, params=params.to_dict(), seed=args.seed, counts=counts)
    return 0


def cmd_ensemble(args) -> int:
    params = load_params(args.params)
    if args.reps < 1:
        raise InputError("--reps must be at least 1")
    stats = STATISTICS if "all" in args.statistic else tuple(args.statistic)
    out = _out(args.out)
    task = ReplicationTask(params, args.seed, stats, tuple(args.x_min), _cap(args.max_authors),
                           args.continuous)
    rows = run_ensemble(task, args.reps, args.workers)
    write_rows(rows, out / "replications.csv")
    summaries = {}
    for name in SCALAR_STATISTICS:
        if name in stats:
            summaries[name] = _scalar_outputs(out, name, [r[name] for r in rows])
    if "degree_exponent" in stats:
        with open(out / "degree_exponents_boxplot.csv", "w") as fh:
            fh.write("kind,x_min,min,q1,median,q3,max,n,theory\n")
            for kind in EXPONENT_KINDS:
                g = params.gamma_prime if kind == "Delta0_prime" else params.gamma
                theory = theoretical_degree_exponents(1 if kind == "Delta1" else 0, g)[1]
                for x_min in args.x_min:
                    s = five_number_summary([r[f"exponent_{kind}_x{x_min:g}"] for r in rows])
                    vals = [s[k] for k in ("min", "q1", "median", "q3", "max")]
                    fh.write(",".join([kind, f"{x_min:g}"] + ["" if v is None else repr(float(v)) for v in vals]
                                      + [str(s["n"]), repr(float(theory))]) + "\n")
    write_manifest(out, "ensemble", args, params=params.to_dict(), seed=args.seed,
                   streams=f"(seed, rep) for rep in 0..{args.reps - 1}", summaries=summaries)
    return 0


def cmd_palm(args) -> int:
    params = load_params(args.params)
    if args.m not in (0, 1):
        raise InputError("--m must be 0 or 1")
    out = _out(args.out)
    samples = typical_degree_samples(args.m, args.samples, params, RngStream(args.seed, 0),
                                     selection=args.selection)
    write_degree_samples(samples, out / "degrees.txt")
    theory = theoretical_degree_exponents(args.m, params.gamma)[1]
    fits = {}
    for x_min in args.x_min:
        d = fit_power_law(samples, x_min, discrete=True)
        c = fit_power_law(samples, x_min, discrete=False)
        fits[f"{x_min:g}"] = {"discrete": d.to_dict(), "continuous": c.to_dict()}
    write_json(out / "fit.json", {"theoretical_pdf_exponent": theory, "fits": fits,
                                  "mean_degree": float(samples.mean()) if samples.size else None})
    write_manifest(out, "palm", args, params=params.to_dict(), seed=args.seed)
    return 0


def _histograms(out, graph, cx):
    for kind in DEGREE_KINDS:
        if kind == "coface1" and cx.max_dim < 2:
            continue
        degree_histogram(graph if kind == "Delta0_prime" else cx, kind).write(
            out / f"degree_{kind}_value_counts.csv"
        )


def cmd_ingest(args) -> int:
    cap = _cap(args.max_authors)
    out = _out(args.out)
    result = load_incidence_file(args.data, cap)
    graph = result.graph
    graph.write_edge_list(out / "edges.csv")
    (out / "authors.txt").write_text("".join(f"{a}\n" for a in result.author_ids))
    (out / "documents.txt").write_text("".join(f"{d}\n" for d in result.document_ids))
    summary = dataset_summary(result)
    write_json(out / "summary.json", summary.to_dict())
    cx = enumerate_simplices(graph, max(args.max_dim + 1, 1), None)
    _histograms(out, graph, cx)
    write_diagram(persistence_diagram(filtered_complex(cx, args.max_dim)), out / "diagram.csv")
    write_manifest(out, "ingest", args, counts=summary.to_dict())
    return 0


def _load_summary(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot load summary from {path}: {exc}") from exc


def _with_gammas(d: dict, args) -> dict:
    d = dict(d)
    if args.gamma is not None:
        d["gamma"] = args.gamma
    if args.gamma_prime is not None:
        d["gamma_prime"] = args.gamma_prime
    return d


def cmd_calibrate(args) -> int:
    d = _with_gammas(_load_summary(args.summary), args)
    try:
        summary = DataSummary.from_dict(d)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    out = _out(args.out)
    params = calibrate(summary)
    (out / "params.json").write_text(params.to_json() + "\n")
    write_manifest(out, "calibrate", args, summary=d, params=params.to_dict())
    return 0


def observed_statistics(graph, max_authors=None, with_betti=True) -> dict:
    """Edge, triangle and first Betti counts of a graph's Dowker complex."""
    cx = enumerate_simplices(graph, 2, max_authors)
    obs = {"incidences": graph.n_edges, "edges": cx.count(1), "triangles": cx.count(2)}
    if with_betti:
        obs["betti1"] = betti_numbers(cx, 1)[1]
    return obs


def estimate_gammas(graph, x_min=10):
    """Tail exponents of author and document degrees, inverted to ``(gamma, gamma')``."""
    e = fit_power_law(degree_values(graph, "Delta0"), x_min, discrete=True).exponent
    e_p = fit_power_law(degree_values(graph, "Delta0_prime"), x_min, discrete=True).exponent
    g, gp = gamma_from_exponent(e, 0), gamma_from_exponent(e_p, 0)
    if not (g.in_range and gp.in_range):
        raise InputError(f"estimated exponents {e:.4g}, {e_p:.4g} give gammas outside (0, 1)")
    return g.gamma, gp.gamma, e, e_p


def stable_test(values, observed, gamma, skew):
    """Fit a stable law with ``alpha = min(1/gamma, 2)`` and fixed skew; two-sided p-value."""
    alpha = min(1.0 / gamma, 2.0)
    fit = fit_stable(values, alpha, skew)
    return {
        "dataset_value": observed,
        "alpha": fit.alpha,
        "skew": fit.skew,
        "location": fit.location,
        "scale": fit.scale,
        "p_value": stable_p_value(observed, fit),
    }


def fit_test(summary: DataSummary, observed: dict, reps: int, seed: int, workers: int = 1,
             max_authors=None) -> dict:
    """Calibrate to ``summary``, simulate ``reps`` networks and test every observed statistic."""
    params = calibrate(summary)
    wanted = tuple(k for k in SCALAR_STATISTICS if k in observed)
    task = ReplicationTask(params, seed, wanted, (), max_authors)
    rows = run_ensemble(task, reps, workers)
    tests = {}
    for name in wanted:
        values = np.array([r[name] for r in rows], dtype=float)
        tests[name] = stable_test(values, observed[name], summary.gamma, STABLE_SKEW[name])
        tests[name]["n_reps"] = reps
    return {"params": params.to_dict(), "tests": tests}


def cmd_fit_test(args) -> int:
    out = _out(args.out)
    cap = _cap(args.max_authors)
    extra = {}
    if args.data:
        result = load_incidence_file(args.data, cap)
        s = dataset_summary(result)
        if s.degenerate:
            raise InputError("dataset has no incidences after the author cap")
        g, gp = args.gamma, args.gamma_prime
        if g is None or gp is None:
            eg, egp, e, e_p = estimate_gammas(result.graph, args.x_min[0])
            extra["estimated_exponents"] = {"Delta0": e, "Delta0_prime": e_p}
            g = eg if g is None else g
            gp = egp if gp is None else gp
        d = {"n_authors": s.n_authors, "n_documents": s.n_documents, "n_incidences": s.n_incidences,
             "gamma": g, "gamma_prime": gp}
        observed = observed_statistics(result.graph)
        observed.pop("incidences")
        extra["dataset"] = s.to_dict()
    elif args.summary:
        raw = _with_gammas(_load_summary(args.summary), args)
        if "gamma" not in raw or "gamma_prime" not in raw:
            raise InputError("gammas are required with --summary (pass --gamma/--gamma-prime)")
        d = raw
        observed = {k: raw["observed"][k] for k in SCALAR_STATISTICS
                    if k in raw.get("observed", {})}
        if not observed:
            raise InputError("summary needs an 'observed' object with edges/triangles/betti1")
    else:
        raise InputError("fit-test needs --data or --summary")
    try:
        summary = DataSummary.from_dict(d)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = fit_test(summary, observed, args.reps, args.seed, args.workers, cap)
    report["summary"] = d
    report.update(extra)
    write_json(out / "report.json", report)
    write_manifest(out, "fit-test", args, seed=args.seed)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rchm", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, params=True, seed=True):
        if params:
            p.add_argument("--params", required=True, help="model parameter JSON")
        if seed:
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("generate", help="sample one network and dump it")
    common(p)
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--max-authors", default="20", help="witness cap, or 'none'")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("ensemble", help="statistics over independent replications")
    common(p)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--statistic", nargs="+", default=["all"], choices=STATISTICS + ("all",))
    p.add_argument("--x-min", type=float, nargs="+", default=[10.0])
    p.add_argument("--max-authors", default="none", help="witness cap, or 'none'")
    p.add_argument("--continuous", action="store_true", help="continuous power-law MLE")
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("palm", help="typical simplex degrees from the Palm environment")
    common(p)
    p.add_argument("--m", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--x-min", type=float, nargs="+", default=[10.0])
    p.add_argument("--selection", choices=("uniform", "pooled"), default="uniform")
    p.set_defaults(func=cmd_palm)

    p = sub.add_parser("ingest", help="load an author_id,document_id file")
    common(p, params=False, seed=False)
    p.add_argument("--data", required=True)
    p.add_argument("--max-authors", default="20")
    p.add_argument("--max-dim", type=int, default=1, help="top persistence dimension")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("calibrate", help="solve for beta, lambda, lambda' from counts")
    common(p, params=False, seed=False)
    p.add_argument("--summary", required=True)
    p.add_argument("--gamma", type=float)
    p.add_argument("--gamma-prime", type=float)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("fit-test", help="calibrate, simulate and test observed statistics")
    common(p, params=False)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data")
    src.add_argument("--summary")
    p.add_argument("--gamma", type=float)
    p.add_argument("--gamma-prime", type=float)
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--x-min", type=float, nargs="+", default=[10.0])
    p.add_argument("--max-authors", default="20")
    p.set_defaults(func=cmd_fit_test)
    return parser


NUMERIC_ERRORS = (CalibrationError, StableIntegrationError, TailTooSmallError,
                  DegenerateSampleError, ArithmeticError)
INPUT_ERRORS = (InputError, IngestError, InfeasibleSummaryError, OSError, ValueError, KeyError)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NUMERIC_ERRORS as exc:
        print(f"rchm {args.command}: numeric failure: {exc}", file=sys.stderr)
        return 3
    except INPUT_ERRORS as exc:
        print(f"rchm {args.command}: invalid input: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

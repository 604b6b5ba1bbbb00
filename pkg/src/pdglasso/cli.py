"""Command-line interface: fit, thresholds, path, simulate, compare.

Matrix input is CSV with a header row of variable names; the first half of
the columns is the left group and the second half the right group with
positional pairing.  Rows are observations unless --cov marks the file as a
p x p covariance matrix.  Fit reports are canonical JSON documents that
round-trip byte for byte.

Exit codes: 0 success, 1 input error, 2 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import InputError, MleError, PdglassoError
from .model import (
    FitResult,
    PdColouredGraph,
    SubmodelClass,
    deviance,
    extract_graph,
    filter_extracted_colours,
    fit_point,
    lrt,
    mle,
    n_params,
    selection_path,
)
from .paired import PairedIndex
from .penalties import (
    INF,
    PenaltySpec,
    is_inf,
    lambda1_block_max,
    lambda1_diag_max,
    lambda2_sym_max,
    parse_penalty_value,
)
from .simulate import ScenarioSpec, results_to_csv, run_scenario
from .solver import AdmmConfig, SolveReport, pdglasso_solve

_STANDARDIZE_CAVEAT = (
    "note: rescaling the variables does not preserve equality constraints, "
    "so symmetries found on standardized data need careful interpretation"
)


def _default_threads() -> int:
    env = os.environ.get("PDGLASSO_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


# ---------------------------------------------------------------------------
# matrix file handling


def read_matrix_csv(path: str, cov: bool) -> tuple[np.ndarray, list[str]]:
    """Load a data or covariance CSV; returns (matrix, column names)."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    if not lines:
        raise InputError(f"{path}: empty file")
    names = [c.strip() for c in lines[0].split(",")]
    if len(names) < 2 or len(names) % 2 != 0:
        raise InputError(
            f"{path}: expected an even column count >= 2, got {len(names)}"
        )
    rows = []
    for ln, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = line.split(",")
        if len(parts) != len(names):
            raise InputError(
                f"{path}: line {ln} has {len(parts)} fields, expected {len(names)}"
            )
        try:
            rows.append([float(x) for x in parts])
        except ValueError as exc:
            raise InputError(f"{path}: line {ln}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: no data rows")
    M = np.asarray(rows, dtype=float)

    if cov:
        p = len(names)
        if M.shape != (p, p):
            raise InputError(
                f"{path}: covariance must be {p} x {p}, got {M.shape[0]} x {M.shape[1]}"
            )
        asym = float(np.abs(M - M.T).max())
        if asym > 1e-10:
            raise InputError(
                f"{path}: covariance asymmetry {asym:.3e} exceeds 1e-10"
            )
        if asym > 1e-12:
            print(
                f"warning: symmetrizing covariance (asymmetry {asym:.3e})",
                file=sys.stderr,
            )
        M = 0.5 * (M + M.T)
    return M, names


def _cov_from_input(M: np.ndarray, cov: bool, standardize: bool) -> tuple[np.ndarray, int | None]:
    """Second-moment matrix and the sample size when one is known."""
    if cov:
        S = M
        n = None
    else:
        n = M.shape[0]
        S = M.T @ M / n
    if standardize:
        d = np.sqrt(np.diag(S))
        if np.any(d <= 0):
            raise InputError("cannot standardize: zero variance column")
        S = S / np.outer(d, d)
        print(_STANDARDIZE_CAVEAT, file=sys.stderr)
    return S, n


# ---------------------------------------------------------------------------
# fit report serialization


def _graph_edges_json(g: PdColouredGraph, names: list[str]) -> list[dict]:
    q = g.q
    idx = PairedIndex(q)
    i_arr, j_arr = idx._pairs
    edges = []
    for k in range(g.s):
        i, j = int(i_arr[k]), int(j_arr[k])
        sym_inside = (
            "parametric"
            if g.inside_coloured[k]
            else ("structural" if g.inside_present[k].all() else "none")
        )
        if g.inside_present[k, 0]:
            edges.append(
                {"i": names[i], "j": names[j], "kind": "inside-L", "symmetry": sym_inside}
            )
        if g.inside_present[k, 1]:
            edges.append(
                {"i": names[i + q], "j": names[j + q], "kind": "inside-R", "symmetry": sym_inside}
            )
        sym_across = (
            "parametric"
            if g.across_coloured[k]
            else ("structural" if g.across_present[k].all() else "none")
        )
        if g.across_present[k, 0]:
            edges.append(
                {"i": names[i], "j": names[j + q], "kind": "across", "symmetry": sym_across}
            )
        if g.across_present[k, 1]:
            edges.append(
                {"i": names[i + q], "j": names[j], "kind": "across", "symmetry": sym_across}
            )
    for i in range(q):
        if g.across_diag[i]:
            edges.append(
                {"i": names[i], "j": names[i + q], "kind": "across-diagonal", "symmetry": "none"}
            )
    return edges


def _graph_from_json(doc: dict) -> PdColouredGraph:
    names = doc["variables"]
    p = len(names)
    idx = PairedIndex.from_p(p)
    q, s = idx.q, idx.s
    pos = {name: k for k, name in enumerate(names)}
    i_arr, j_arr = idx._pairs
    pair_no = {(int(i_arr[k]), int(j_arr[k])): k for k in range(s)}

    vertex = np.zeros(q, dtype=bool)
    for name in doc["vertex_symmetries"]:
        vertex[pos[name]] = True
    inside_present = np.zeros((s, 2), dtype=bool)
    inside_col = np.zeros(s, dtype=bool)
    across_present = np.zeros((s, 2), dtype=bool)
    across_col = np.zeros(s, dtype=bool)
    across_diag = np.zeros(q, dtype=bool)

    for e in doc["edges"]:
        a, b = pos[e["i"]], pos[e["j"]]
        kind = e["kind"]
        if kind == "inside-L":
            inside_present[pair_no[(a, b)], 0] = True
            if e["symmetry"] == "parametric":
                inside_col[pair_no[(a, b)]] = True
        elif kind == "inside-R":
            inside_present[pair_no[(a - q, b - q)], 1] = True
            if e["symmetry"] == "parametric":
                inside_col[pair_no[(a - q, b - q)]] = True
        elif kind == "across-diagonal":
            across_diag[a] = True
        elif kind == "across":
            left, right = (a, b - q) if b >= q else (b, a - q)
            if left < right:
                across_present[pair_no[(left, right)], 0] = True
                if e["symmetry"] == "parametric":
                    across_col[pair_no[(left, right)]] = True
            else:
                across_present[pair_no[(right, left)], 1] = True
                if e["symmetry"] == "parametric":
                    across_col[pair_no[(right, left)]] = True
        else:
            raise InputError(f"unknown edge kind {kind!r} in report")
    return PdColouredGraph(
        q, vertex, inside_present, inside_col, across_present, across_col, across_diag
    )


def _penalty_json(value):
    return "Inf" if is_inf(value) else value


def _penalty_from_json(value):
    return INF if value == "Inf" else float(value)


def fit_report_doc(
    fit: FitResult, names: list[str], n: int | None, gamma: float, cfg: AdmmConfig,
    seed: int | None = None,
) -> dict:
    """JSON-ready document for a fitted model."""
    g = fit.graph
    return {
        "version": __version__,
        "variables": list(names),
        "n": n,
        "gamma": gamma,
        "penalties": {
            "lambda1": fit.spec.lambda1,
            "lambda2_vertex": _penalty_json(fit.spec.lambda2_vertex),
            "lambda2_inside": _penalty_json(fit.spec.lambda2_inside),
            "lambda2_across": _penalty_json(fit.spec.lambda2_across),
        },
        "d": fit.d,
        "ebic": None if fit.ebic is None or math.isnan(fit.ebic) else fit.ebic,
        "edges": _graph_edges_json(g, names),
        "vertex_symmetries": [names[i] for i in range(g.q) if g.vertex_coloured[i]],
        "solver_report": {
            "outer_iterations": fit.report.outer_iterations,
            "primal_residual": fit.report.primal_residual,
            "dual_residual": fit.report.dual_residual,
            "converged": fit.report.converged,
            "objective_value": fit.report.objective_value,
            "kkt_residual": fit.report.kkt_residual,
            "kkt_ok": fit.report.kkt_ok,
            "z_not_pd": fit.report.z_not_pd,
            "inner_warning": fit.report.inner_warning,
            "constraint_violation": fit.report.constraint_violation,
        },
        "theta_hat": [[float(x) for x in row] for row in fit.theta_hat],
        "theta_mle": None
        if fit.theta_mle is None
        else [[float(x) for x in row] for row in fit.theta_mle],
        "config": {
            "rho1": cfg.rho1,
            "rho2": cfg.rho2,
            "adaptive": cfg.adaptive,
            "eps_abs": cfg.eps_abs,
            "eps_rel": cfg.eps_rel,
            "max_outer": cfg.max_outer,
            "max_inner": cfg.max_inner,
            "inf_surrogate_factor": cfg.inf_surrogate_factor,
            "kkt_refine": cfg.kkt_refine,
            "kkt_tol_factor": cfg.kkt_tol_factor,
        },
        "seed": seed,
    }


def dump_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_fit_report(path: str, doc: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_report(doc))


def read_fit_report(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read report {path}: {exc}") from exc


def report_fit_result(doc: dict) -> FitResult:
    """Rebuild the in-memory fit from a report document."""
    graph = _graph_from_json(doc)
    pen = doc["penalties"]
    spec = PenaltySpec(
        pen["lambda1"],
        _penalty_from_json(pen["lambda2_vertex"]),
        _penalty_from_json(pen["lambda2_inside"]),
        _penalty_from_json(pen["lambda2_across"]),
    )
    rep = doc["solver_report"]
    report = SolveReport(
        outer_iterations=rep["outer_iterations"],
        primal_residual=rep["primal_residual"],
        dual_residual=rep["dual_residual"],
        converged=rep["converged"],
        objective_value=rep["objective_value"],
        kkt_residual=rep["kkt_residual"],
        kkt_ok=rep["kkt_ok"],
        z_not_pd=rep["z_not_pd"],
        inner_warning=rep["inner_warning"],
        constraint_violation=rep["constraint_violation"],
    )
    return FitResult(
        theta_hat=np.asarray(doc["theta_hat"], dtype=float),
        graph=graph,
        d=doc["d"],
        ebic=math.nan if doc["ebic"] is None else doc["ebic"],
        spec=spec,
        report=report,
        theta_mle=None
        if doc["theta_mle"] is None
        else np.asarray(doc["theta_mle"], dtype=float),
    )


# ---------------------------------------------------------------------------
# subcommands


def _admm_config(args) -> AdmmConfig:
    return AdmmConfig(
        eps_abs=args.eps_abs,
        eps_rel=args.eps_rel,
        max_outer=args.max_outer,
        kkt_refine=not args.no_kkt_refine,
    )


def _add_solver_flags(parser):
    parser.add_argument("--eps-abs", type=float, default=1e-8)
    parser.add_argument("--eps-rel", type=float, default=1e-8)
    parser.add_argument("--max-outer", type=int, default=5000)
    parser.add_argument("--no-kkt-refine", action="store_true",
                        help="stop on residuals only, skip optimality polishing")


def _add_input_flags(parser):
    parser.add_argument("input", help="CSV matrix file (header row of variable names)")
    parser.add_argument("--cov", action="store_true",
                        help="input is a p x p covariance matrix, not data rows")
    parser.add_argument("--standardize", action="store_true",
                        help="rescale to unit diagonal before fitting")


def cmd_fit(args) -> int:
    M, names = read_matrix_csv(args.input, args.cov)
    S, n = _cov_from_input(M, args.cov, args.standardize)
    if n is None:
        n = args.n
    if n is None:
        raise InputError("--n is required with --cov (the eBIC needs a sample size)")
    spec = PenaltySpec(
        args.lambda1,
        parse_penalty_value(args.lambda2_vertex),
        parse_penalty_value(args.lambda2_inside),
        parse_penalty_value(args.lambda2_across),
    )
    cfg = _admm_config(args)
    try:
        fit = fit_point(
            S, n, args.gamma, spec, cfg, diag_penalty=not args.no_diag_penalty
        )
    except MleError as exc:
        # the refit failed: report the penalized solve alone and exit 2
        print(f"warning: MLE refit failed ({exc})", file=sys.stderr)
        theta_hat, report = pdglasso_solve(
            S, spec, cfg, diag_penalty=not args.no_diag_penalty
        )
        idx = PairedIndex.from_p(S.shape[0])
        graph = filter_extracted_colours(extract_graph(theta_hat, idx), spec)
        fit = FitResult(theta_hat, graph, n_params(graph), math.nan, spec, report,
                        theta_mle=None)
    doc = fit_report_doc(fit, names, n, args.gamma, cfg)
    if args.output:
        write_fit_report(args.output, doc)
    else:
        sys.stdout.write(dump_report(doc))
    print(
        f"fit: {fit.graph.n_edges} edges, d={fit.d}, eBIC={fit.ebic:.4f}, "
        f"converged={fit.report.converged}",
        file=sys.stderr,
    )
    return 0 if fit.report.converged and fit.theta_mle is not None else 2


def cmd_thresholds(args) -> int:
    M, names = read_matrix_csv(args.input, args.cov)
    S, _ = _cov_from_input(M, args.cov, args.standardize)
    idx = PairedIndex.from_p(S.shape[0])
    values = {
        "lambda1_diag": lambda1_diag_max(S),
        "lambda1_block": lambda1_block_max(S, idx),
        "lambda2_sym": lambda2_sym_max(S, idx),
    }
    if args.json:
        sys.stdout.write(json.dumps(values, indent=2, sort_keys=True) + "\n")
    else:
        for key, value in values.items():
            print(f"{key} {value!r}")
    return 0


def cmd_path(args) -> int:
    M, names = read_matrix_csv(args.input, args.cov)
    S, n = _cov_from_input(M, args.cov, args.standardize)
    if n is None:
        n = args.n
    if n is None:
        raise InputError("--n is required with --cov (the eBIC needs a sample size)")
    class_spec = SubmodelClass(
        _mode(args.lambda2_vertex), _mode(args.lambda2_inside), _mode(args.lambda2_across)
    )
    cfg = _admm_config(args)
    winner, points = selection_path(
        S, n, args.m, args.gamma, class_spec, cfg, threads=args.threads
    )
    doc = fit_report_doc(winner, names, n, args.gamma, cfg)
    if args.output:
        write_fit_report(args.output, doc)
    else:
        sys.stdout.write(dump_report(doc))
    if args.grid_csv:
        lines = ["stage,lambda1,lambda2,ebic,d,converged"]
        for pt in points:
            eb = "" if pt.ebic is None else repr(float(pt.ebic))
            dd = "" if pt.d is None else str(pt.d)
            conv = "true" if pt.converged else "false"
            lines.append(
                f"{pt.stage},{float(pt.lambda1)!r},{float(pt.lambda2)!r},{eb},{dd},{conv}"
            )
        with open(args.grid_csv, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    print(
        f"path: winner lambda1={float(winner.spec.lambda1)!r} d={winner.d} "
        f"eBIC={winner.ebic:.4f}",
        file=sys.stderr,
    )
    return 0 if winner.report.converged else 2


def _mode(text: str) -> str:
    mapping = {"0": "zero", "zero": "zero", "grid": "grid", "inf": "inf"}
    key = text.strip().lower()
    if key not in mapping:
        raise InputError(f"penalty mode must be 0, grid or Inf, got {text!r}")
    return mapping[key]


def cmd_simulate(args) -> int:
    spec = ScenarioSpec(
        p=args.p,
        density=args.density,
        symmetry_fraction=args.symmetry_fraction,
        n_list=tuple(int(x) for x in args.n_list.split(",")),
        replications=args.replications,
        seed=args.seed,
        select_m=args.m,
        select_gamma=args.gamma,
    )
    cfg = _admm_config(args)
    rows = run_scenario(spec, cfg, threads=args.threads)
    text = results_to_csv(rows)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    failures = sum(1 for r in rows if r.error)
    if failures:
        print(f"simulate: {failures} cell(s) failed", file=sys.stderr)
    return 0


def cmd_compare(args) -> int:
    alpha = args.alpha
    if args.precomputed:
        result = lrt(args.deviance_full, args.d_full, args.deviance_sub, args.d_sub, alpha)
        _print_lrt(result, args.deviance_full, args.deviance_sub)
        return 0

    if not args.input:
        raise InputError("--input is required unless --precomputed is used")
    full_doc = read_fit_report(args.full)
    sub_doc = read_fit_report(args.sub)
    g_full = _graph_from_json(full_doc)
    g_sub = _graph_from_json(sub_doc)
    violation = _nesting_violation(g_full, g_sub)
    if violation:
        raise InputError(f"models are not nested: {violation}")

    M, _ = read_matrix_csv(args.input, args.cov)
    S, n = _cov_from_input(M, args.cov, args.standardize)
    if n is None:
        n = args.n
    if n is None:
        raise InputError("--n is required with --cov")
    cfg = _admm_config(args)
    theta_full = mle(S, g_full, cfg)
    theta_sub = mle(S, g_sub, cfg)
    dev_full = deviance(theta_full, S, n)
    dev_sub = deviance(theta_sub, S, n)
    d_full = n_params(g_full)
    d_sub = n_params(g_sub)
    if d_full == d_sub:
        print(json.dumps({
            "degenerate": True, "stat": 0.0, "df": 0,
            "deviance_full": dev_full, "deviance_sub": dev_sub,
        }, indent=2, sort_keys=True))
        return 0
    result = lrt(dev_full, d_full, dev_sub, d_sub, alpha)
    _print_lrt(result, dev_full, dev_sub)
    return 0


def _print_lrt(result, dev_full, dev_sub):
    print(json.dumps({
        "degenerate": False,
        "deviance_full": dev_full,
        "deviance_sub": dev_sub,
        "stat": result.stat,
        "df": result.df,
        "critical": result.critical,
        "reject": result.reject,
    }, indent=2, sort_keys=True))


def _nesting_violation(g_full: PdColouredGraph, g_sub: PdColouredGraph) -> str | None:
    """First constraint of the full model the submodel fails to imply."""
    if g_full.q != g_sub.q:
        return "different dimensions"
    # every absence in full must persist in sub; every colour in full must be
    # a colour (or a shared absence) in sub
    for name in ("inside_present", "across_present"):
        extra = getattr(g_sub, name) & ~getattr(g_full, name)
        if extra.any():
            return f"submodel adds edges in {name.split('_')[0]} block"
    if (g_sub.across_diag & ~g_full.across_diag).any():
        return "submodel adds across-diagonal edges"
    if (g_full.vertex_coloured & ~g_sub.vertex_coloured).any():
        return "full-model vertex symmetry missing in submodel"
    for fam in ("inside", "across"):
        col_full = getattr(g_full, f"{fam}_coloured")
        col_sub = getattr(g_sub, f"{fam}_coloured")
        present_sub = getattr(g_sub, f"{fam}_present")
        ok = col_sub | ~present_sub.any(axis=1)
        if (col_full & ~ok).any():
            return f"full-model {fam} symmetry missing in submodel"
    return None


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pdglasso",
        description="Joint structure learning of two dependent Gaussian graphical models",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="solve at fixed penalties and report the model")
    _add_input_flags(p_fit)
    p_fit.add_argument("--lambda1", type=float, required=True)
    p_fit.add_argument("--lambda2-vertex", default="0", metavar="VAL|Inf")
    p_fit.add_argument("--lambda2-inside", default="0", metavar="VAL|Inf")
    p_fit.add_argument("--lambda2-across", default="0", metavar="VAL|Inf")
    p_fit.add_argument("--n", type=int, default=None,
                       help="sample size (required with --cov)")
    p_fit.add_argument("--gamma", type=float, default=0.0, help="eBIC gamma")
    p_fit.add_argument("--no-diag-penalty", action="store_true",
                       help="exclude diagonal entries from the l1 penalty")
    p_fit.add_argument("--output", "-o", default=None, help="report JSON path")
    _add_solver_flags(p_fit)
    p_fit.set_defaults(func=cmd_fit)

    p_thr = sub.add_parser("thresholds", help="print the maximal useful penalty values")
    _add_input_flags(p_thr)
    p_thr.add_argument("--json", action="store_true")
    p_thr.set_defaults(func=cmd_thresholds)

    p_path = sub.add_parser("path", help="two-stage eBIC model selection over a grid")
    _add_input_flags(p_path)
    p_path.add_argument("--n", type=int, default=None)
    p_path.add_argument("--m", type=int, default=20, help="grid length per stage")
    p_path.add_argument("--gamma", type=float, default=0.0)
    p_path.add_argument("--lambda2-vertex", default="grid", metavar="0|grid|Inf")
    p_path.add_argument("--lambda2-inside", default="grid", metavar="0|grid|Inf")
    p_path.add_argument("--lambda2-across", default="grid", metavar="0|grid|Inf")
    p_path.add_argument("--output", "-o", default=None)
    p_path.add_argument("--grid-csv", default=None, help="write all grid points as CSV")
    p_path.add_argument("--threads", type=int, default=_default_threads())
    _add_solver_flags(p_path)
    p_path.set_defaults(func=cmd_path)

    p_sim = sub.add_parser("simulate", help="benchmark the two selection methods")
    p_sim.add_argument("--p", type=int, required=True)
    p_sim.add_argument("--density", type=float, default=0.2)
    p_sim.add_argument("--symmetry-fraction", type=float, default=0.0)
    p_sim.add_argument("--n-list", default="100", help="comma-separated sample sizes")
    p_sim.add_argument("--replications", type=int, default=1)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--m", type=int, default=20)
    p_sim.add_argument("--gamma", type=float, default=0.0)
    p_sim.add_argument("--output", "-o", default=None, help="CSV path (default stdout)")
    p_sim.add_argument("--threads", type=int, default=_default_threads())
    _add_solver_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_cmp = sub.add_parser("compare", help="likelihood ratio test of nested reports")
    p_cmp.add_argument("full", nargs="?", default=None, help="report JSON of the fuller model")
    p_cmp.add_argument("sub", nargs="?", default=None, help="report JSON of the submodel")
    p_cmp.add_argument("--input", default=None, help="matrix CSV both models were fit on")
    p_cmp.add_argument("--cov", action="store_true")
    p_cmp.add_argument("--standardize", action="store_true")
    p_cmp.add_argument("--n", type=int, default=None)
    p_cmp.add_argument("--alpha", type=float, default=0.05)
    p_cmp.add_argument("--precomputed", action="store_true",
                       help="test from supplied deviances and parameter counts")
    p_cmp.add_argument("--deviance-full", type=float, default=None)
    p_cmp.add_argument("--d-full", type=int, default=None)
    p_cmp.add_argument("--deviance-sub", type=float, default=None)
    p_cmp.add_argument("--d-sub", type=int, default=None)
    _add_solver_flags(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "compare" and args.precomputed:
            missing = [
                flag
                for flag, value in (
                    ("--deviance-full", args.deviance_full),
                    ("--d-full", args.d_full),
                    ("--deviance-sub", args.deviance_sub),
                    ("--d-sub", args.d_sub),
                )
                if value is None
            ]
            if missing:
                raise InputError(f"--precomputed needs {', '.join(missing)}")
        elif args.command == "compare" and (args.full is None or args.sub is None):
            raise InputError("compare needs two report files (or --precomputed)")
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (PdglassoError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

"""Command-line entry points with deterministic, manifest-stamped outputs.

Subcommands: generate | cuts | simulate | sweep | rwre | star | renorm |
check-conditions.  Every run writes its artifacts plus a ``*.manifest.json``
recording the resolved model spec, all numeric parameters, the master seed,
the tool version and the RNG; result files embed the manifest (minus the
timestamp) in comment headers, and reruns with identical manifests are
byte-identical for any ``CPPHASE_THREADS``.  The timestamp honours
``SOURCE_DATE_EPOCH`` for reproducible archiving.

Exit codes: 0 success, 2 validation/usage error, 3 insufficient data,
4 budget exhaustion.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import (BracketError, BudgetExceededError, CpphaseError,
                     DecompositionUnavailableError, DomainError,
                     GenerationError, InsufficientDataError, MarginError,
                     SpecError)
from .rng import GENERATOR_NAME

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INSUFFICIENT = 3
EXIT_BUDGET = 4


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if x is None:
        return ""
    return str(x)


def _jsonable(x):
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def build_manifest(subcommand: str, spec: dict | None, params: dict, seed: int,
                   outputs: list) -> dict:
    env_ts = os.environ.get("SOURCE_DATE_EPOCH", "").strip()
    when = (datetime.fromtimestamp(int(env_ts), tz=timezone.utc) if env_ts
            else datetime.now(tz=timezone.utc))
    return {
        "subcommand": subcommand,
        "spec": _jsonable(spec),
        "params": _jsonable(params),
        "master_seed": int(seed),
        "version": __version__,
        "rng": GENERATOR_NAME,
        "outputs": [str(p) for p in outputs],
        "timestamp": when.isoformat(),
    }


def _embedded(manifest: dict) -> dict:
    return {k: v for k, v in manifest.items() if k not in ("timestamp", "outputs")}


def write_csv(path, columns, rows, manifest) -> None:
    """CSV with stable column order, 17-significant-digit floats and the
    manifest embedded in comment headers.  Empty row sets produce a
    header-only file."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(f"# cpphase {__version__}\n")
        fh.write("# manifest " + json.dumps(_embedded(manifest), sort_keys=True) + "\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(row[c]) for c in columns) + "\n")


def write_json(path, payload: dict, manifest) -> None:
    body = {"manifest": _embedded(manifest)}
    body.update(_jsonable(payload))
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(body, fh, indent=1, sort_keys=True)
        fh.write("\n")


def write_results(result, path, format: str = "csv", manifest: dict | None = None):
    """Persist a result table or mapping; schema documented in docs/reference.md."""
    manifest = manifest or build_manifest("adhoc", None, {}, 0, [path])
    if format == "csv":
        write_csv(path, result["columns"], result.get("rows", []), manifest)
    elif format == "json":
        write_json(path, result, manifest)
    else:
        raise SpecError(f"unknown format {format!r}")
    return path


def write_manifest(manifest: dict, primary_out) -> str:
    path = str(primary_out) + ".manifest.json"
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return path


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _parse_window(text: str):
    if ":" in text:
        lo, hi = text.split(":")
        return int(lo), int(hi)
    n = int(text)
    half = (n - 1) // 2
    return -half, n - 1 - half


def _parse_list(text: str, cast=float):
    return [cast(x) for x in text.replace(",", " ").split()]


def _add_model_flags(p: argparse.ArgumentParser):
    p.add_argument("--model", choices=["lrp", "gilbert", "wdrcm", "boolean", "clique"])
    p.add_argument("--model-file", help="read the model spec from a key-value config file")
    p.add_argument("--delta", type=float, help="LRP power-law exponent (> 1)")
    p.add_argument("--gamma", type=float, help="WDRCM / Boolean kernel exponent")
    p.add_argument("--mu", type=float, default=0.1, help="WDRCM truncation exponent (> 0)")
    p.add_argument("--alpha", type=float, help="Pareto exponent (radii or clique sizes); "
                                               "finite mean iff alpha > 1")
    p.add_argument("--dimension", type=int, default=2, help="lattice dimension (boolean)")
    p.add_argument("--points", choices=["unit", "poisson", "renewal"], default="poisson")
    p.add_argument("--radius-const", type=float, help="constant radius (gilbert)")
    p.add_argument("--k-const", type=int, help="constant clique size (clique)")
    p.add_argument("--augment", action="store_true", help="force nearest-neighbour links (lrp)")


def _resolve_model(args):
    from .graph_models import (BooleanLatticeSpec, CliqueChainSpec, GilbertSpec,
                               LrpSpec, WdrcmSpec, spec_from_config)
    if args.model_file:
        with open(args.model_file, "r", encoding="ascii") as fh:
            return spec_from_config(fh.read())
    if args.model is None:
        raise SpecError("choose --model or --model-file")
    if args.model == "lrp":
        if args.delta is None:
            raise SpecError("lrp needs --delta")
        return LrpSpec(delta=args.delta, augment=args.augment)
    if args.model == "gilbert":
        radius = (("const", args.radius_const) if args.radius_const is not None
                  else ("pareto", args.alpha if args.alpha is not None else 1.5))
        return GilbertSpec(points=args.points, radius=radius)
    if args.model == "wdrcm":
        if args.gamma is None:
            raise SpecError("wdrcm needs --gamma")
        return WdrcmSpec(gamma=args.gamma, mu=args.mu, points=args.points)
    if args.model == "boolean":
        if args.gamma is None:
            raise SpecError("boolean needs --gamma")
        return BooleanLatticeSpec(d=args.dimension, gamma=args.gamma)
    if args.model == "clique":
        law = (("const", args.k_const) if args.k_const is not None
               else ("pareto_int", args.alpha if args.alpha is not None else 2.5))
        return CliqueChainSpec(k_law=law)
    raise SpecError(f"unknown model {args.model!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cpphase",
        description="Contact processes on 1-d spatial random graphs: generators, "
                    "exact simulation, cut/block diagnostics and phase estimation.")
    ap.add_argument("--version", action="version", version=f"cpphase {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("generate", help="sample a graph and write an edge-list file")
    _add_model_flags(g)
    g.add_argument("--window", help="length (centred at 0) or lo:hi")
    g.add_argument("--box", help="lattice sides, e.g. 200 or 200,200")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)

    c = sub.add_parser("cuts", help="cut points, blocks and their statistics")
    c.add_argument("--graph", required=True)
    c.add_argument("--K", type=int, default=1)
    c.add_argument("--L", type=int)
    c.add_argument("--margin", type=int)
    c.add_argument("--min-blocks", type=int, default=30)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--out", required=True, help="output prefix")

    s = sub.add_parser("simulate", help="contact-process replicas on a graph file")
    s.add_argument("--graph", required=True)
    s.add_argument("--lambda", dest="lam", type=float, required=True)
    s.add_argument("--horizon", type=float, required=True)
    s.add_argument("--replicas", type=int, default=1)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--margin", type=int)
    s.add_argument("--samples", type=int, default=20)
    s.add_argument("--initial", help="initially infected vertex (default: 0 or centre)")
    s.add_argument("--out", required=True, help="output prefix")

    w = sub.add_parser("sweep", help="survival matrix over a rate grid and windows")
    _add_model_flags(w)
    w.add_argument("--lambda-grid", required=True)
    w.add_argument("--window", required=True, help="comma-separated window lengths")
    w.add_argument("--horizon", help="comma-separated horizons (default window/4)")
    w.add_argument("--replicas", type=int, default=200)
    w.add_argument("--seed", type=int, default=0)
    w.add_argument("--mode", choices=["quenched", "annealed"], default="annealed")
    w.add_argument("--margin", type=int)
    w.add_argument("--threshold", type=float, default=0.05)
    w.add_argument("--out", required=True, help="output prefix")

    r = sub.add_parser("rwre", help="block-environment estimates and the recurrence verdict")
    r.add_argument("--graph", required=True)
    r.add_argument("--lambda", dest="lam", type=float, required=True)
    r.add_argument("--K", type=int, default=1)
    r.add_argument("--L", type=int)
    r.add_argument("--replicas", type=int, default=1000)
    r.add_argument("--min-blocks", type=int, default=30)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True, help="output prefix")

    st = sub.add_parser("star", help="persistence and survival-time scaling on stars")
    st.add_argument("--k-leaves", required=True, help="comma-separated leaf counts")
    st.add_argument("--lambda", dest="lam", type=float, required=True)
    st.add_argument("--eps1", type=float, default=0.1)
    st.add_argument("--horizon", type=float, default=100.0)
    st.add_argument("--replicas", type=int, default=1000)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--scaling", action="store_true", help="also run extinction-time scaling")
    st.add_argument("--quantile", type=float, default=0.5)
    st.add_argument("--event-budget", type=int, default=50_000_000)
    st.add_argument("--out", required=True, help="output prefix")

    rn = sub.add_parser("renorm", help="good-box field and box survival contrast")
    rn.add_argument("--gamma", type=float, required=True)
    rn.add_argument("--dimension", type=int, default=2)
    rn.add_argument("--box", help="sampled region side for the good-box field")
    rn.add_argument("--L", type=int, help="box volume (d-th power of an integer)")
    rn.add_argument("--eps", type=float, default=0.1)
    rn.add_argument("--lambda", dest="lam", type=float, default=0.05)
    rn.add_argument("--box-sides", help="comma-separated sides for the survival experiment")
    rn.add_argument("--replicas", type=int, default=10)
    rn.add_argument("--event-budget", type=int, default=20_000_000)
    rn.add_argument("--seed", type=int, default=0)
    rn.add_argument("--out", required=True, help="output prefix")

    cc = sub.add_parser("check-conditions", help="numeric verdicts for ensemble conditions")
    _add_model_flags(cc)
    cc.add_argument("--k-max", type=int, default=10_000)
    cc.add_argument("--n-max", type=int, default=60)
    cc.add_argument("--format", choices=["json", "csv"], default="json")
    cc.add_argument("--seed", type=int, default=0)
    cc.add_argument("--out", required=True)
    return ap


# ---------------------------------------------------------------------------
# subcommand implementations
# ---------------------------------------------------------------------------


def _cmd_generate(args) -> int:
    from .graph_core import write_edge_file
    from .graph_models import (BooleanLatticeSpec, generate_graph, spec_to_dict)
    spec = _resolve_model(args)
    params = {"window": args.window, "box": args.box, "seed": args.seed}
    if isinstance(spec, BooleanLatticeSpec):
        if not args.box:
            raise SpecError("boolean model needs --box")
        box = tuple(_parse_list(args.box, int))
        if len(box) == 1:
            box = box * spec.d
        graph = generate_graph(spec, box=box, seed=args.seed)
    else:
        if not args.window:
            raise SpecError("windowed models need --window")
        graph = generate_graph(spec, window=_parse_window(args.window), seed=args.seed)
    manifest = build_manifest("generate", spec_to_dict(spec), params, args.seed, [args.out])
    write_edge_file(graph, args.out)
    write_manifest(manifest, args.out)
    return EXIT_OK


def _cmd_cuts(args) -> int:
    from .cut_analysis import block_decomposition, block_statistics, edges_above_profile
    from .graph_core import read_edge_file
    graph = read_edge_file(args.graph)
    params = {"graph": args.graph, "K": args.K, "L": args.L, "margin": args.margin,
              "min_blocks": args.min_blocks}
    manifest = build_manifest("cuts", None, params, args.seed, [])
    decomp = block_decomposition(graph, args.K, args.L, margin=args.margin)
    zs, counts = edges_above_profile(graph, margin=args.margin)
    cut_set = set(decomp.cut_points.tolist())
    cut_rows = [{"z": int(z), "edges_above": int(e)}
                for z, e in zip(zs, counts) if int(z) in cut_set]
    p_cuts = f"{args.out}.cuts.csv"
    write_csv(p_cuts, ["z", "edges_above"], cut_rows, manifest)
    blk_rows = [{"index": i, "start": int(b[0]), "end": int(b[1]),
                 "length": int(b[1] - b[0] + 1), "internal_edges": int(m)}
                for i, (b, m) in enumerate(zip(decomp.blocks, decomp.block_edge_counts))]
    p_blocks = f"{args.out}.blocks.csv"
    write_csv(p_blocks, ["index", "start", "end", "length", "internal_edges"],
              blk_rows, manifest)
    stats = block_statistics(decomp, graph, min_blocks=args.min_blocks, seed=args.seed)
    srow = {
        "p_hat": stats.p_hat, "mean_block": stats.mean_block,
        "mean_block_sq": stats.mean_block_sq, "tau_hat": stats.tau_hat,
        "mean_block_edges": stats.mean_block_edges, "n_blocks": stats.n_blocks,
        "kac_residual_mean": stats.kac_residual_mean,
        "kac_residual_sq": stats.kac_residual_sq,
        "kac_consistent_mean": stats.kac_consistent_mean,
        "kac_consistent_sq": stats.kac_consistent_sq,
        "edge_density_bound": stats.edge_density_bound,
        "max_crossing_length": decomp.max_crossing_length,
    }
    p_sum = f"{args.out}.summary.csv"
    write_csv(p_sum, list(srow.keys()), [srow], manifest)
    manifest["outputs"] = [p_cuts, p_blocks, p_sum]
    write_manifest(manifest, args.out)
    return EXIT_OK


def _cmd_simulate(args) -> int:
    from .contact_process import SimParams, simulate, simulate_batch
    from .graph_core import read_edge_file
    graph = read_edge_file(args.graph)
    origin = int(args.initial) if args.initial is not None else (
        0 if 0 in graph else (graph.lo + graph.hi) // 2)
    sample_times = tuple(np.linspace(args.horizon / args.samples, args.horizon,
                                     args.samples))
    params = SimParams(lam=args.lam, horizon=args.horizon, initial=(origin,),
                       sample_times=sample_times, margin=args.margin)
    manifest = build_manifest("simulate", None,
                              {**params.to_dict(), "graph": args.graph,
                               "replicas": args.replicas}, args.seed, [])
    traj = simulate(graph, params, args.seed)
    rows = [{"t": t, "infected_count": int(c), "rightmost": int(r)}
            for t, c, r in zip(traj.sample_times, traj.infected_counts,
                               traj.rightmost_track)]
    p_traj = f"{args.out}.trajectory.csv"
    write_csv(p_traj, ["t", "infected_count", "rightmost"], rows, manifest)
    batch = simulate_batch(graph, params, args.replicas, args.seed)
    payload = {
        "fate_tallies": batch.tally(),
        "replicas": args.replicas,
        "params": params.to_dict(),
        "seeds": {"master": int(args.seed), "module": "cp.sim",
                  "indices": f"0..{args.replicas - 1}"},
        "mean_events": float(batch.events.mean()),
        "mean_t_end": float(batch.t_end.mean()),
    }
    p_json = f"{args.out}.outcome.json"
    write_json(p_json, payload, manifest)
    manifest["outputs"] = [p_traj, p_json]
    write_manifest(manifest, args.out)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    from .graph_models import spec_to_dict
    from .phase_estimation import lambda_sweep
    spec = _resolve_model(args)
    lams = _parse_list(args.lambda_grid, float)
    wins = _parse_list(args.window, int)
    hors = _parse_list(args.horizon, float) if args.horizon else None
    params = {"lambda_grid": lams, "windows": wins, "horizons": hors,
              "replicas": args.replicas, "mode": args.mode,
              "threshold": args.threshold, "margin": args.margin}
    manifest = build_manifest("sweep", spec_to_dict(spec), params, args.seed, [])
    res = lambda_sweep(spec, lams, wins, horizons=hors, replicas=args.replicas,
                       seed=args.seed, mode=args.mode, threshold=args.threshold,
                       margin=args.margin)
    p_csv = f"{args.out}.sweep.csv"
    cols = ["lam", "window", "horizon", "p_upper", "ci_upper_lo", "ci_upper_hi",
            "p_lower", "ci_lower_lo", "ci_lower_hi", "replicas"]
    write_csv(p_csv, cols, list(res.rows()), manifest)
    summary = {
        "threshold": res.threshold,
        "crossings": res.crossings,
        "windows": res.windows, "horizons": res.horizons,
        "lambda_grid": res.lams, "mode": res.mode,
    }
    p_json = f"{args.out}.summary.json"
    write_json(p_json, summary, manifest)
    manifest["outputs"] = [p_csv, p_json]
    write_manifest(manifest, args.out)
    return EXIT_OK


def _cmd_rwre(args) -> int:
    from .coupling_rwre import pipeline_verdict
    from .graph_core import read_edge_file
    graph = read_edge_file(args.graph)
    params = {"graph": args.graph, "lam": args.lam, "K": args.K, "L": args.L,
              "replicas": args.replicas, "min_blocks": args.min_blocks}
    manifest = build_manifest("rwre", None, params, args.seed, [])
    report = pipeline_verdict(graph, args.K, args.L, args.lam, args.replicas,
                              args.seed, min_blocks=args.min_blocks)
    env = report.environment
    rows = [{"block": int(i), "size": int(s), "internal_edges": int(e),
             "omega": float(o), "ci_lo": float(lo), "ci_hi": float(hi),
             "lower_bound": float(lb), "degenerate": bool(dg)}
            for i, (s, e, o, lo, hi, lb, dg) in enumerate(zip(
                env.sizes, env.edges, env.omega, env.ci_lo, env.ci_hi,
                env.lower_bound, env.degenerate))]
    p_csv = f"{args.out}.environment.csv"
    write_csv(p_csv, ["block", "size", "internal_edges", "omega", "ci_lo",
                      "ci_hi", "lower_bound", "degenerate"], rows, manifest)
    led = env.ledrappier
    payload = {
        "verdict": report.verdict,
        "functional": led.value,
        "functional_ci": list(led.ci),
        "n_blocks": led.n_blocks,
        "n_degenerate": led.n_degenerate,
        "n_distinct_blocks": report.n_distinct_blocks,
        "skipped_exit_edges": report.skipped_exit_edges,
    }
    p_json = f"{args.out}.verdict.json"
    write_json(p_json, payload, manifest)
    manifest["outputs"] = [p_csv, p_json]
    write_manifest(manifest, args.out)
    return EXIT_OK


def _cmd_star(args) -> int:
    from .star_lab import (StarExperimentConfig, star_persist_from_K,
                           star_persist_from_root, star_survival_time_scaling,
                           star_threshold)
    ks = _parse_list(args.k_leaves, int)
    params = {"k_leaves": ks, "lam": args.lam, "eps1": args.eps1,
              "horizon": args.horizon, "replicas": args.replicas,
              "scaling": args.scaling, "quantile": args.quantile,
              "event_budget": args.event_budget}
    manifest = build_manifest("star", None, params, args.seed, [])
    rows = []
    for k in ks:
        for initial, fn in (("K_leaves_plus_root", star_persist_from_K),
                            ("root_only", star_persist_from_root)):
            cfg = StarExperimentConfig(k=k, lam=args.lam, initial=initial,
                                       eps1=args.eps1, horizon=args.horizon,
                                       replicas=args.replicas,
                                       event_budget=args.event_budget)
            est = fn(cfg, args.seed)
            rows.append({"k": k, "lam": args.lam, "initial": initial,
                         "threshold": est.threshold,
                         "window_lo": est.window[0], "window_hi": est.window[1],
                         "probability": est.probability,
                         "ci_lo": est.ci[0], "ci_hi": est.ci[1],
                         "replicas": est.replicas,
                         "budget_censored": est.n_budget_censored})
    p_csv = f"{args.out}.persistence.csv"
    write_csv(p_csv, ["k", "lam", "initial", "threshold", "window_lo",
                      "window_hi", "probability", "ci_lo", "ci_hi", "replicas",
                      "budget_censored"], rows, manifest)
    outputs = [p_csv]
    if args.scaling:
        srows, fit = star_survival_time_scaling(
            ks, args.lam, args.quantile, args.replicas, args.seed,
            event_budget=args.event_budget)
        p_sc = f"{args.out}.scaling.csv"
        write_csv(p_sc, ["k", "quantile", "value", "ci_lo", "ci_hi",
                         "n_censored", "is_lower_bound"],
                  [{"k": r.k, "quantile": r.quantile, "value": r.value,
                    "ci_lo": r.ci[0], "ci_hi": r.ci[1],
                    "n_censored": r.n_censored,
                    "is_lower_bound": r.is_lower_bound} for r in srows],
                  manifest)
        p_fit = f"{args.out}.scaling.json"
        write_json(p_fit, fit, manifest)
        outputs += [p_sc, p_fit]
    manifest["outputs"] = outputs
    write_manifest(manifest, args.out)
    return EXIT_OK


def _cmd_renorm(args) -> int:
    from .graph_models import BooleanLatticeSpec, boolean_lattice_generate
    from .renorm_lab import box_survival_experiment, good_box_field
    params = {"gamma": args.gamma, "d": args.dimension, "box": args.box,
              "L": args.L, "eps": args.eps, "lam": args.lam,
              "box_sides": args.box_sides, "replicas": args.replicas,
              "event_budget": args.event_budget}
    manifest = build_manifest("renorm", None, params, args.seed, [])
    outputs = []
    if args.box and args.L:
        spec = BooleanLatticeSpec(d=args.dimension, gamma=args.gamma)
        side = int(args.box)
        graph = boolean_lattice_generate(spec, (side,) * args.dimension, args.seed)
        field = good_box_field(graph, args.L, args.gamma, args.eps)
        rows = [{"box": int(i), "max_degree": int(m), "good": bool(g)}
                for i, (m, g) in enumerate(zip(field.max_degrees, field.good))]
        p_good = f"{args.out}.goodbox.csv"
        write_csv(p_good, ["box", "max_degree", "good"], rows, manifest)
        outputs.append(p_good)
    if args.box_sides:
        sides = _parse_list(args.box_sides, int)
        rows = box_survival_experiment(args.gamma, sides, args.lam, args.replicas,
                                       args.seed, d=args.dimension,
                                       event_budget=args.event_budget)
        p_surv = f"{args.out}.survival.csv"
        write_csv(p_surv, ["side", "gamma", "lam", "replicas", "quantile",
                           "value", "ci_lo", "ci_hi", "n_censored",
                           "is_lower_bound"],
                  [{"side": r.side, "gamma": r.gamma, "lam": r.lam,
                    "replicas": r.replicas, "quantile": r.quantile,
                    "value": r.value, "ci_lo": r.ci[0], "ci_hi": r.ci[1],
                    "n_censored": r.n_censored,
                    "is_lower_bound": r.is_lower_bound} for r in rows],
                  manifest)
        outputs.append(p_surv)
    if not outputs:
        raise SpecError("renorm needs --box with --L (good boxes) and/or --box-sides")
    manifest["outputs"] = outputs
    write_manifest(manifest, args.out)
    return EXIT_OK


def _cmd_check_conditions(args) -> int:
    from .graph_models import (LrpSpec, WdrcmSpec, lrp_condition_check,
                               spec_to_dict, wdrcm_cut_condition)
    spec = _resolve_model(args)
    params = {"k_max": args.k_max, "n_max": args.n_max}
    manifest = build_manifest("check-conditions", spec_to_dict(spec), params,
                              args.seed, [args.out])
    if isinstance(spec, LrpSpec):
        reports = lrp_condition_check(spec, k_max=args.k_max)
    elif isinstance(spec, WdrcmSpec):
        reports = {"dyadic_crossings": wdrcm_cut_condition(spec, n_max=args.n_max)}
    else:
        raise SpecError("condition checks exist for lrp and wdrcm models")
    payload = {"reports": {
        name: {"partial_value": r.partial_value, "tail_bound": r.tail_bound,
               "verdict": r.verdict, "witness": r.witness, "n_terms": r.n_terms}
        for name, r in reports.items()}}
    if args.format == "json":
        write_json(args.out, payload, manifest)
    else:
        rows = [{"condition": name, **payload["reports"][name]}
                for name in payload["reports"]]
        write_csv(args.out, ["condition", "partial_value", "tail_bound",
                             "verdict", "witness", "n_terms"], rows, manifest)
    write_manifest(manifest, args.out)
    return EXIT_OK


_COMMANDS = {
    "generate": _cmd_generate,
    "cuts": _cmd_cuts,
    "simulate": _cmd_simulate,
    "sweep": _cmd_sweep,
    "rwre": _cmd_rwre,
    "star": _cmd_star,
    "renorm": _cmd_renorm,
    "check-conditions": _cmd_check_conditions,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.cmd](args)
    except (SpecError, DomainError, MarginError, GenerationError,
            BracketError) as exc:
        print(f"cpphase: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (InsufficientDataError, DecompositionUnavailableError) as exc:
        print(f"cpphase: {exc}", file=sys.stderr)
        return EXIT_INSUFFICIENT
    except BudgetExceededError as exc:
        print(f"cpphase: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CpphaseError as exc:
        print(f"cpphase: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

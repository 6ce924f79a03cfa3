#!/usr/bin/env python3
"""
netdist command line.

    python main.py compare a.edges b.edges --edit --deltacon
    python main.py benchmark --preset sbm --seed 7 --out runs/sbm
    python main.py benchmark --preset pa --sweep laplacian --k-values 2,5,10,50,100
    python main.py anomaly --events contacts.csv --intervals 150 --distances edit,deltacon
    python main.py generate --model pa --n 100 --l 6 --count 3 --out samples/
    python main.py density --model gnp --n 100 --p 0.12 --representation adjacency

Results go to standard output and --out; progress and logs go to standard
error. Exit codes: 0 ok, 2 bad input or parameters, 3 size mismatch or
disconnected graph, 4 degenerate null, 5 zero-mean series, 6 generator
retries exhausted, 1 anything else.
"""

import argparse
import csv
import json
import logging
import math
import os
import re
import sys
import time
from contextlib import contextmanager
from dataclasses import dataclass, field, replace
from pathlib import Path

from anomaly_detection import (
    build_sequence_from_events,
    consecutive_distances,
    read_graph_sequence_dir,
    top_anomalies,
    write_series_csv,
)
from benchmark_presets import DEFAULT_SAMPLES, PRESET_NAMES, preset_config
from experiment_runner import (
    ExperimentConfig,
    boxstats_csv,
    ensemble_spectral_density,
    lambda_k_sweep,
    results_to_json,
    run_experiment,
    sweep_k_values,
)
from graph_core import read_contact_events, read_edge_list, write_edge_list
from graph_distances import (
    ALL_DISTANCES,
    EDIT,
    GraphCache,
    compute_distance,
    parse_distance_list,
    parse_eps,
    parse_k,
    parse_p_norm,
)
from graph_errors import InvalidParams, NetDistError, ParseError, UnsupportedModel
from graph_generators import (
    LATTICE2D,
    RANDOM_DEGREE_SEQUENCE,
    EnsembleSpec,
    Seed,
    canonical_model,
    expected_edge_count,
    sample,
)
from spectral_linalg import ADJACENCY, REPRESENTATIONS

VERSION = "0.1.0"
SEED_ENV = "NETDIST_SEED"
DEFAULT_INTERVALS = 150
DEFAULT_TOP_K = 5

logger = logging.getLogger("netdist")


def print_header(title):
    print("\n" + "=" * 60, file=sys.stderr)
    print(f"  {title}", file=sys.stderr)
    print("=" * 60, file=sys.stderr)


def print_step(step, description):
    print(f"\n[{step}] {description}", file=sys.stderr)


def print_ok(message):
    print(f"  ✓ {message}", file=sys.stderr)


@dataclass
class RunManifest:
    """Everything needed to rerun a command; timing lives apart from the rest"""

    command: str
    config: dict
    timing: dict = field(default_factory=dict)

    @contextmanager
    def phase(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timing[name] = time.perf_counter() - start

    def to_dict(self):
        return {
            "tool": "netdist",
            "tool_version": VERSION,
            "command": self.command,
            "config": self.config,
            "timing": self.timing,
        }

    def write(self, out_dir):
        path = Path(out_dir) / "manifest.json"
        path.write_text(json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n")
        return path


# ------------------------------------------------------------------ flag helpers

def _seed_from_flags(args):
    """--seed, then $NETDIST_SEED; None when neither is set"""
    if args.seed is not None:
        text, source = args.seed, "--seed"
    elif os.environ.get(SEED_ENV):
        text, source = os.environ[SEED_ENV], SEED_ENV
    else:
        return None
    try:
        value = int(text)
    except ValueError:
        raise InvalidParams(f"{source} must be an unsigned 64-bit integer, got {text!r}") from None
    return Seed(value).master


def resolve_seed(args):
    seed = _seed_from_flags(args)
    return 0 if seed is None else seed


def _auto_or_positive(text, what):
    if text in (None, "auto"):
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise InvalidParams(f"{what} must be a number or 'auto', got {text!r}") from None


def _json_number(x):
    return "inf" if x == math.inf else x


def distance_specs(args, default="all"):
    names = list(getattr(args, "kinds", None) or [])
    if args.distances:
        names.extend(args.distances.split(","))
    return parse_distance_list(
        ",".join(names) or default,
        k=parse_k(args.k),
        p_norm=parse_p_norm(args.p_norm),
        eps=parse_eps(args.eps),
        penalty=_auto_or_positive(args.penalty, "penalty"),
    )


def _distance_params(args):
    return {
        "k": parse_k(args.k),
        "p_norm": _json_number(parse_p_norm(args.p_norm)),
        "eps": parse_eps(args.eps),
        "penalty": _auto_or_positive(args.penalty, "penalty"),
    }


def _int_list(text, what):
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise InvalidParams(f"{what} must be a comma-separated list of integers, got {text!r}") from None


def ensemble_from_args(args):
    model = canonical_model(args.model)
    params = {}
    for key in ("p", "q", "l", "k_ring", "beta", "rows", "cols"):
        value = getattr(args, key)
        if value is not None:
            params[key] = value
    if args.degrees is not None:
        params["degrees"] = _int_list(args.degrees, "--degrees")
    n = args.n
    if n is None and model == LATTICE2D and args.rows is not None and args.cols is not None:
        n = args.rows * args.cols
    if n is None and model == RANDOM_DEGREE_SEQUENCE and "degrees" in params:
        n = len(params["degrees"])
    if n is None:
        raise InvalidParams(f"--n is required for model {model}")
    return EnsembleSpec(model, n, params, require_connected=not args.allow_disconnected,
                        max_retries=args.max_retries)


def _expected_edges(spec):
    try:
        return expected_edge_count(spec)
    except UnsupportedModel:
        return None


def _prepare_out(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _slug(distance_id):
    return re.sub(r"[^A-Za-z0-9=.-]+", "_", distance_id).strip("_")


def _emit(payload):
    print(json.dumps(payload, sort_keys=True, indent=1))


# ------------------------------------------------------------------ commands

def cmd_compare(args):
    print_step(1, f"Reading {args.path1} and {args.path2}")
    g1 = read_edge_list(args.path1)
    g2 = read_edge_list(args.path2)
    print_ok(f"{g1!r} and {g2!r}")

    print_step(2, "Computing distances")
    specs = distance_specs(args)
    manifest = RunManifest("compare", {
        "paths": [str(args.path1), str(args.path2)],
        "distances": [s.to_dict() for s in specs],
    })
    cache = GraphCache()
    report = {}
    with manifest.phase("distances"):
        for spec in specs:
            report[spec.distance_id] = compute_distance(g1, g2, spec, cache)
            print_ok(f"{spec.distance_id} = {report[spec.distance_id]:.6g}")
    report["params"] = _distance_params(args)

    if args.out:
        out = _prepare_out(args.out)
        (out / "compare.json").write_text(json.dumps(report, sort_keys=True, indent=1) + "\n")
        manifest.write(out)
    _emit(report)
    return 0


def _load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ParseError(f"cannot read config {path}: {e}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidParams(f"config {path} is not valid JSON: {e}") from None
    if not isinstance(data, dict):
        raise InvalidParams(f"config {path} must hold a JSON object")
    return ExperimentConfig.from_dict(data)


def benchmark_config(args):
    seed = _seed_from_flags(args)
    distances = distance_specs(args) if (args.distances or getattr(args, "kinds", None)) else None
    if args.config:
        cfg = _load_config(args.config)
        changes = {}
        if seed is not None:
            changes["master_seed"] = seed
        if args.samples is not None:
            changes["n_samples"] = args.samples
        if distances is not None:
            changes["distances"] = distances
        return replace(cfg, **changes) if changes else cfg
    if args.preset:
        return preset_config(
            args.preset,
            n_samples=DEFAULT_SAMPLES if args.samples is None else args.samples,
            master_seed=0 if seed is None else seed,
            distances=distances,
        )
    raise InvalidParams(f"benchmark needs --preset ({', '.join(PRESET_NAMES)}) or --config")


def cmd_benchmark(args):
    print_header("netdist benchmark")
    cfg = benchmark_config(args)
    sweep_reps = [r.strip() for r in args.sweep.split(",") if r.strip()] if args.sweep else []
    for rep in sweep_reps:
        if rep not in REPRESENTATIONS:
            raise InvalidParams(f"unknown sweep representation {rep!r}; choose from {', '.join(REPRESENTATIONS)}")
    n = min(cfg.null_spec.n, cfg.alt_spec.n)
    explicit_k = _int_list(args.k_values, "--k-values") if args.k_values else None
    k_values = {rep: explicit_k or sweep_k_values(rep, n) for rep in sweep_reps}

    manifest = RunManifest("benchmark", {
        "experiment": cfg.to_dict(),
        "threads": args.threads,
        "sweep": sweep_reps,
        "k_values": k_values,
        "expected_edges": {"null": _expected_edges(cfg.null_spec),
                           "alternative": _expected_edges(cfg.alt_spec)},
    })

    print_step(1, f"Sampling {cfg.n_samples} graph triples for {cfg.name} ({len(cfg.distances)} distances)")
    with manifest.phase("experiment"):
        sets = run_experiment(cfg, threads=args.threads)
    for s in sets:
        print_ok(f"{s.distance_id}: median d1_hat {s.box.median:.3f}")

    sweeps = {}
    for step, rep in enumerate(sweep_reps, start=2):
        print_step(step, f"lambda_k sweep on the {rep} spectrum over {len(k_values[rep])} values of k")
        with manifest.phase(f"sweep_{rep}"):
            sweeps[rep] = lambda_k_sweep(cfg, rep, k_values[rep], threads=args.threads)
        empty = [k for k, box in sweeps[rep] if box is None]
        print_ok(f"{rep}: {len(sweeps[rep])} rows" + (f", degenerate null at k={empty}" if empty else ""))

    out = _prepare_out(args.out or ".")
    (out / "results.json").write_text(results_to_json(cfg, sets, sweeps))
    (out / "boxstats.csv").write_text(boxstats_csv(cfg, sets, sweeps))
    manifest.write(out)
    print_ok(f"results written to {out}")

    _emit({s.distance_id: s.box.to_dict() for s in sets})
    return 0


def _event_sequence(args):
    events = read_contact_events(args.events)
    times = [ev.t for ev in events]
    t_start = args.t_start if args.t_start is not None else (min(times) if times else 0.0)
    t_end = args.t_end if args.t_end is not None else (max(times) + 1.0 if times else t_start + 1.0)
    n = args.vertices
    if n is None:
        n = 1 + max((max(ev.u, ev.v) for ev in events), default=0)
    return build_sequence_from_events(events, t_start, t_end, args.intervals, n), {
        "events": str(args.events), "t_start": t_start, "t_end": t_end,
        "intervals": args.intervals, "n": n,
    }


def cmd_anomaly(args):
    print_header("netdist anomaly")
    print_step(1, "Building the graph sequence")
    if args.edges_dir:
        seq = read_graph_sequence_dir(args.edges_dir)
        source = {"edges_dir": str(args.edges_dir)}
    elif args.events:
        seq, source = _event_sequence(args)
    else:
        raise InvalidParams("anomaly needs --events or --edges-dir")
    print_ok(f"{len(seq)} graphs on {seq.n} vertices")

    specs = distance_specs(args, default=EDIT)
    manifest = RunManifest("anomaly", {
        "source": source,
        "distances": [s.to_dict() for s in specs],
        "top_k": args.top_k,
    })
    out = _prepare_out(args.out or ".")

    print_step(2, "Consecutive distances")
    report = {}
    for spec in specs:
        with manifest.phase(spec.distance_id):
            series = consecutive_distances(seq, spec)
        path = write_series_csv(series, seq.interval_labels, out / f"series_{_slug(series.distance_id)}.csv")
        report[series.distance_id] = [
            {"index": series.time_index(pos), "normalized": value}
            for pos, value in top_anomalies(series, args.top_k)
        ]
        print_ok(f"{series.distance_id} -> {path.name}")
    manifest.write(out)
    _emit(report)
    return 0


def cmd_generate(args):
    spec = ensemble_from_args(args)
    seed = resolve_seed(args)
    if args.count < 1:
        raise InvalidParams(f"--count must be positive, got {args.count}")
    manifest = RunManifest("generate", {
        "ensemble": spec.to_dict(), "count": args.count, "seed": seed,
        "expected_edges": _expected_edges(spec),
    })
    out = _prepare_out(args.out or ".")
    print_step(1, f"Drawing {args.count} {spec.model} graphs (n={spec.n}, seed {seed})")
    files = []
    with manifest.phase("sampling"):
        for i in range(args.count):
            g = sample(spec, Seed(seed, i))
            path = out / f"{i:04d}.edges"
            write_edge_list(g, path)
            files.append({"file": path.name, "m": g.m, "fingerprint": g.fingerprint()})
    print_ok(f"{len(files)} edge lists in {out}")
    manifest.write(out)
    _emit({"files": files})
    return 0


def cmd_density(args):
    spec = ensemble_from_args(args)
    seed = resolve_seed(args)
    if args.graphs < 1 or args.bins < 1:
        raise InvalidParams("--graphs and --bins must be positive")
    manifest = RunManifest("density", {
        "ensemble": spec.to_dict(), "representation": args.representation,
        "graphs": args.graphs, "bins": args.bins, "seed": seed,
    })
    print_step(1, f"Pooling {args.representation} spectra of {args.graphs} {spec.model} graphs")
    with manifest.phase("spectra"):
        edges, density = ensemble_spectral_density(spec, args.representation, args.graphs, args.bins, seed)
    out = _prepare_out(args.out or ".")
    with open(out / "density.csv", "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "density"])
        for left, right, value in zip(edges[:-1], edges[1:], density):
            writer.writerow([repr(float(left)), repr(float(right)), repr(float(value))])
    manifest.write(out)
    print_ok(f"{args.bins} bins written to {out / 'density.csv'}")
    return 0


# ------------------------------------------------------------------ parser

def _common_parent():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--verbose", action="store_true", help="debug logging on standard error")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", help=f"master seed (unsigned 64-bit); falls back to ${SEED_ENV}, then 0")
    return common


def _distance_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--distances", help=f"comma list of {', '.join(ALL_DISTANCES)} or 'all'")
    parent.add_argument("--k", default="all", help="eigenvalue count for spectral distances (int or 'all')")
    parent.add_argument("--p-norm", default="2", help="l_p exponent for spectral distances (float or 'inf')")
    parent.add_argument("--eps", default="auto", help="DeltaCon epsilon (float or 'auto')")
    parent.add_argument("--penalty", default="auto", help="cross-component resistance (float or 'auto' = n)")
    parent.add_argument("--all", dest="kinds", action="append_const", const="all")
    for kind in ALL_DISTANCES:
        parent.add_argument("--" + kind.replace("_", "-"), dest="kinds", action="append_const", const=kind)
    return parent


def _ensemble_parent():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--model", required=True, help="gnp, sbm2, pa, ws, rds or lattice2d")
    parent.add_argument("--n", type=int)
    parent.add_argument("--p", type=float)
    parent.add_argument("--q", type=float)
    parent.add_argument("--l", type=int)
    parent.add_argument("--k-ring", dest="k_ring", type=int)
    parent.add_argument("--beta", type=float)
    parent.add_argument("--rows", type=int)
    parent.add_argument("--cols", type=int)
    parent.add_argument("--degrees", help="comma list for random_degree_sequence")
    parent.add_argument("--allow-disconnected", action="store_true")
    parent.add_argument("--max-retries", type=int, default=1000)
    return parent


def build_parser():
    parser = argparse.ArgumentParser(prog="netdist", description="Graph distances, ensemble benchmarks and "
                                                                 "dynamic-graph anomaly detection")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    common, distances, ensemble = _common_parent(), _distance_parent(), _ensemble_parent()

    compare = sub.add_parser("compare", parents=[common, distances], help="distances between two edge lists")
    compare.add_argument("path1")
    compare.add_argument("path2")
    compare.set_defaults(handler=cmd_compare)

    bench = sub.add_parser("benchmark", parents=[common, distances], help="null-vs-alternative experiment")
    bench.add_argument("--preset", help=", ".join(PRESET_NAMES))
    bench.add_argument("--config", help="ExperimentConfig JSON file")
    bench.add_argument("--samples", type=int)
    bench.add_argument("--threads", type=int, default=1)
    bench.add_argument("--sweep", help="comma list of representations for lambda_k sweeps")
    bench.add_argument("--k-values", help="comma list of k for --sweep (default 1..n)")
    bench.set_defaults(handler=cmd_benchmark)

    anomaly = sub.add_parser("anomaly", parents=[common, distances], help="consecutive-step distance series")
    anomaly.add_argument("--events", help="contact CSV with header t,u,v")
    anomaly.add_argument("--edges-dir", help="directory of 0000.edges, 0001.edges, ...")
    anomaly.add_argument("--t-start", type=float)
    anomaly.add_argument("--t-end", type=float)
    anomaly.add_argument("--intervals", type=int, default=DEFAULT_INTERVALS)
    anomaly.add_argument("--vertices", type=int, help="vertex count (default: largest id in the events + 1)")
    anomaly.add_argument("--top-k", type=int, default=DEFAULT_TOP_K)
    anomaly.set_defaults(handler=cmd_anomaly)

    generate = sub.add_parser("generate", parents=[common, ensemble], help="write sampled graphs as edge lists")
    generate.add_argument("--count", type=int, default=1)
    generate.set_defaults(handler=cmd_generate)

    density = sub.add_parser("density", parents=[common, ensemble], help="pooled spectral density of an ensemble")
    density.add_argument("--representation", default=ADJACENCY, choices=REPRESENTATIONS)
    density.add_argument("--graphs", type=int, default=1000)
    density.add_argument("--bins", type=int, default=50)
    density.set_defaults(handler=cmd_density)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logger.debug("netdist %s: %s", VERSION, args.command)
    try:
        return args.handler(args)
    except NetDistError as e:
        print(f"{e.kind}: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    exit(main())

"""Command-line interface and experiment orchestration.

Subcommands: topo, ingest, metrics, synth, verify, field, opt, sweep.
Exit codes: 0 success, 2 configuration error, 3 infeasibility.
"""

from __future__ import annotations

import argparse
import csv
import json
import statistics
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import alliance as zd
from . import graphs
from .errors import ConfigError, ConvergenceError, InfeasibleError, ZdlabError
from .field import Deployment, cooperator_ratio, evaluate
from .game import GameShape, PayoffScale
from .markov import FollowerStrategy, LeaderStrategy
from .optimize import GAConfig, optimize_exhaustive, optimize_ga

CSV_VERSION = "# zdlab-v1"

SWEEP_COLUMNS = [
    "K", "repetition", "seed", "objective", "mean_regular_coop",
    "expected_ratio", "monte_carlo_ratio", "zd_set", "zd_mean_degree",
    "zd_mean_betweenness", "wall_ms",
]

AGGREGATE_COLUMNS = [
    "objective", "mean_regular_coop", "expected_ratio", "monte_carlo_ratio",
    "zd_mean_degree", "zd_mean_betweenness",
]


@dataclass(frozen=True)
class TopologySpec:
    kind: str | None = None
    n: int = 0
    seed: int = 0
    density: float | None = None
    trace: str | None = None
    min_contacts: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    topology: TopologySpec
    scale: PayoffScale
    k_min: int
    k_max: int
    k_step: int = 1
    ga: GAConfig = GAConfig()
    ratio_mode: str = "expected"
    ratio_rounds: int = 1000
    repetitions: int = 30
    seed: int = 0
    output: str = "sweep.csv"


def _require_keys(mapping, allowed, where):
    unknown = set(mapping) - set(allowed)
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {sorted(unknown)}")


def load_config(doc: dict) -> ExperimentConfig:
    """Strictly validated sweep configuration."""
    _require_keys(doc, ("topology", "scale", "k_range", "ga", "ratio",
                        "repetitions", "seed", "output"), "config")
    for key in ("topology", "scale", "k_range", "output"):
        if key not in doc:
            raise ConfigError(f"config missing required field {key!r}")

    topo_doc = doc["topology"]
    if "trace" in topo_doc:
        _require_keys(topo_doc, ("trace", "min_contacts"), "topology")
        topology = TopologySpec(trace=topo_doc["trace"],
                                min_contacts=int(topo_doc.get("min_contacts", 1)))
    else:
        _require_keys(topo_doc, ("type", "n", "seed", "density"), "topology")
        if "type" not in topo_doc or "n" not in topo_doc:
            raise ConfigError("topology needs 'type' and 'n' (or 'trace')")
        kind = topo_doc["type"]
        if kind not in graphs.TOPOLOGIES:
            raise ConfigError(f"unknown topology type {kind!r}")
        topology = TopologySpec(kind=kind, n=int(topo_doc["n"]),
                                seed=int(topo_doc.get("seed", 0)),
                                density=topo_doc.get("density"))

    scale_doc = doc["scale"]
    _require_keys(scale_doc, ("a", "k", "b"), "scale")
    try:
        scale = PayoffScale(float(scale_doc.get("a", 2.0)),
                            int(scale_doc.get("k", 1)),
                            float(scale_doc.get("b", 3.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if scale(2) <= 1.0:
        raise ConfigError(
            "payoff scale must exceed 1 for every reachable game size"
        )

    k_doc = doc["k_range"]
    _require_keys(k_doc, ("min", "max", "step"), "k_range")
    k_min = int(k_doc.get("min", 1))
    k_max = int(k_doc.get("max", k_min))
    k_step = int(k_doc.get("step", 1))
    if k_min < 1 or k_max < k_min or k_step < 1:
        raise ConfigError("k_range must satisfy 1 <= min <= max, step >= 1")

    ga_doc = doc.get("ga", {})
    _require_keys(ga_doc, ("population_size", "generations", "tournament_size",
                           "crossover_rate", "mutation_rate", "elitism_count"),
                  "ga")
    try:
        ga = GAConfig(**ga_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid ga config: {exc}") from exc

    ratio_doc = doc.get("ratio", {})
    _require_keys(ratio_doc, ("mode", "rounds"), "ratio")
    ratio_mode = ratio_doc.get("mode", "expected")
    if ratio_mode not in ("expected", "monte_carlo"):
        raise ConfigError(f"unknown ratio mode {ratio_mode!r}")
    ratio_rounds = int(ratio_doc.get("rounds", 1000))
    if ratio_rounds < 1:
        raise ConfigError("ratio rounds must be positive")

    repetitions = int(doc.get("repetitions", 30))
    if repetitions < 1:
        raise ConfigError("repetitions must be positive")

    return ExperimentConfig(topology=topology, scale=scale, k_min=k_min,
                            k_max=k_max, k_step=k_step, ga=ga,
                            ratio_mode=ratio_mode, ratio_rounds=ratio_rounds,
                            repetitions=repetitions,
                            seed=int(doc.get("seed", 0)),
                            output=str(doc["output"]))


def load_config_file(path) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")
    return load_config(doc)


def build_graph(spec: TopologySpec) -> graphs.Graph:
    if spec.trace is not None:
        records = graphs.parse_trace_file(spec.trace)
        return graphs.ingest_trace(records, spec.min_contacts)
    return graphs.generate(spec.kind, spec.n, spec.seed, spec.density)


def _rep_seed(base, k, rep):
    return base * 1_000_003 + k * 1_009 + rep


def run_sweep(cfg: ExperimentConfig):
    """K-sweep over repeated placements; returns the result rows and
    writes the CSV to ``cfg.output``."""
    g = build_graph(cfg.topology)
    if cfg.k_max >= g.n:
        raise ConfigError(f"k_max {cfg.k_max} must be below node count {g.n}")
    node_betweenness = graphs.betweenness(g)
    rows = []
    for k in range(cfg.k_min, cfg.k_max + 1, cfg.k_step):
        for rep in range(cfg.repetitions):
            seed = _rep_seed(cfg.seed, k, rep)
            start = time.perf_counter()
            ga = GAConfig(**{**_ga_dict(cfg.ga), "seed": seed})
            dep, objective, _ = optimize_ga(g, k, cfg.scale, ga)
            result = evaluate(dep)
            expected = cooperator_ratio(dep, "expected")
            mc = cooperator_ratio(dep, "monte_carlo", cfg.ratio_rounds,
                                  seed + 1)
            zd_sorted = sorted(dep.zd_nodes)
            wall_ms = (time.perf_counter() - start) * 1000.0
            rows.append({
                "K": k,
                "repetition": rep,
                "seed": seed,
                "objective": objective,
                "mean_regular_coop": result.mean_regular,
                "expected_ratio": expected,
                "monte_carlo_ratio": mc,
                "zd_set": ";".join(str(u) for u in zd_sorted),
                "zd_mean_degree": sum(g.degree(u) for u in zd_sorted) / k,
                "zd_mean_betweenness":
                    sum(node_betweenness[u] for u in zd_sorted) / k,
                "wall_ms": wall_ms,
            })
    write_sweep_csv(cfg.output, rows)
    return rows


def _ga_dict(ga: GAConfig):
    return {"population_size": ga.population_size,
            "generations": ga.generations,
            "tournament_size": ga.tournament_size,
            "crossover_rate": ga.crossover_rate,
            "mutation_rate": ga.mutation_rate,
            "elitism_count": ga.elitism_count,
            "seed": ga.seed}


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.10g}"
    return str(value)


def write_sweep_csv(path, rows):
    """Per-repetition rows followed by mean/std aggregate rows per K."""
    by_k: dict[int, list] = {}
    for row in rows:
        by_k.setdefault(row["K"], []).append(row)
    with open(path, "w", newline="") as fh:
        fh.write(CSV_VERSION + "\n")
        writer = csv.writer(fh)
        writer.writerow(SWEEP_COLUMNS)
        for row in rows:
            writer.writerow(_fmt(row[c]) for c in SWEEP_COLUMNS)
        for k in sorted(by_k):
            group = by_k[k]
            for stat_name, stat in (("mean", statistics.fmean),
                                    ("std", _sample_std)):
                agg = {c: "" for c in SWEEP_COLUMNS}
                agg["K"] = k
                agg["repetition"] = stat_name
                for col in AGGREGATE_COLUMNS:
                    agg[col] = _fmt(stat([row[col] for row in group]))
                writer.writerow(agg[c] for c in SWEEP_COLUMNS)


def _sample_std(values):
    if len(values) < 2:
        return 0.0
    return statistics.stdev(values)


def _shape_from_args(args) -> GameShape:
    n_leaders = args.leaders if args.leaders is not None else args.alliance
    return GameShape(args.players, n_leaders, args.alliance, args.r)


def _outsiders_from_args(shape, args):
    if getattr(args, "outsider_file", None):
        with open(args.outsider_file) as fh:
            doc = json.load(fh)
        _require_keys(doc, ("leaders", "followers"), "outsider file")
        leaders = []
        for offset, table in enumerate(doc.get("leaders", [])):
            owner = shape.n_alliance + offset
            probs = {tuple(json.loads(key)): value
                     for key, value in table.items()}
            leaders.append(LeaderStrategy(owner, probs))
        followers = [FollowerStrategy(shape.n_leaders + j, tuple(probs))
                     for j, probs in enumerate(doc.get("followers", []))]
        return leaders + followers
    rng = np.random.default_rng(args.outsider_seed)
    return zd.random_outsiders(shape, rng)


def cmd_topo(args):
    g = graphs.generate(args.type, args.n, args.seed, args.density)
    g.write(args.out)
    print(f"{args.type} graph: {g.n} nodes, {g.edge_count} edges -> {args.out}")
    return 0


def cmd_ingest(args):
    records = graphs.parse_trace_file(args.trace)
    g = graphs.ingest_trace(records, args.min_contacts)
    g.write(args.out)
    print(f"trace graph: {g.n} nodes, {g.edge_count} edges -> {args.out}")
    return 0


def cmd_metrics(args):
    g = graphs.Graph.read(args.graph)
    stats = graphs.degree_stats(g)
    scores = graphs.betweenness(g)
    print(f"nodes {g.n} edges {g.edge_count}")
    print(f"mean_degree {_fmt(stats.mean)}")
    print(f"mean_betweenness {_fmt(sum(scores) / g.n)}")
    if args.per_node:
        for u in range(g.n):
            print(f"{u} degree={stats.degrees[u]} "
                  f"betweenness={_fmt(scores[u])}")
    return 0


def cmd_synth(args):
    shape = _shape_from_args(args)
    params = zd.ZDParams(args.chi, args.l, shape, args.phi)
    result = zd.synthesize(params)
    report = {
        "f": {f"{'c' if s else 'd'},{b}": fv
              for (s, b), fv in sorted(result.f_unison.items(), reverse=True)},
        "phi_interval": list(result.phi_interval),
        "phi": result.phi,
        "strategy": {f"{'c' if s else 'd'},{x},{y}": p
                     for (s, x, y), p in sorted(result.strategy.probs.items(),
                                                reverse=True)},
        "residual": result.certificate,
    }
    print(json.dumps(report, indent=2))
    return 0


def cmd_verify(args):
    shape = _shape_from_args(args)
    params = zd.ZDParams(args.chi, args.l, shape, args.phi)
    result = zd.synthesize(params)
    residual = zd.verify_enforcement(result, _outsiders_from_args(shape, args))
    print(f"residual {residual:.3e}")
    return 0


def _parse_zd_nodes(text):
    try:
        return frozenset(int(tok) for tok in text.split(",") if tok != "")
    except ValueError as exc:
        raise ConfigError(f"bad ZD node list {text!r}") from exc


def cmd_field(args):
    g = graphs.Graph.read(args.graph)
    scale = PayoffScale(args.scale_a, args.scale_k, args.scale_b)
    dep = Deployment(g, _parse_zd_nodes(args.zd), scale)
    result = evaluate(dep)
    for u in sorted(result.nodes):
        info = result.nodes[u]
        print(f"{u} zd_neighbors={info.zd_neighbors} "
              f"delta={_fmt(info.delta)} q={_fmt(info.coop_prob)}")
    print(f"objective {_fmt(result.objective)}")
    print(f"mean_regular {_fmt(result.mean_regular)}")
    print(f"expected_ratio {_fmt(cooperator_ratio(dep))}")
    return 0


def cmd_opt(args):
    g = graphs.Graph.read(args.graph)
    scale = PayoffScale(args.scale_a, args.scale_k, args.scale_b)
    if args.exhaustive:
        dep, objective = optimize_exhaustive(g, args.K, scale)
    else:
        cfg = GAConfig(population_size=args.population,
                       generations=args.generations, seed=args.seed)
        dep, objective, _ = optimize_ga(g, args.K, scale, cfg)
    print(f"zd_set {';'.join(str(u) for u in sorted(dep.zd_nodes))}")
    print(f"objective {_fmt(objective)}")
    print(f"mean_regular {_fmt(evaluate(dep).mean_regular)}")
    return 0


def cmd_sweep(args):
    cfg = load_config_file(args.config)
    rows = run_sweep(cfg)
    print(f"wrote {len(rows)} rows -> {cfg.output}")
    return 0


def _add_shape_args(parser):
    parser.add_argument("--players", type=int, required=True)
    parser.add_argument("--alliance", type=int, required=True)
    parser.add_argument("--leaders", type=int, default=None,
                        help="defaults to the alliance size")
    parser.add_argument("--r", type=float, required=True)
    parser.add_argument("--chi", type=float, default=0.0)
    parser.add_argument("--l", type=float, required=True)
    parser.add_argument("--phi", type=float, default=None)


def _add_scale_args(parser):
    parser.add_argument("--scale-a", type=float, default=2.0)
    parser.add_argument("--scale-k", type=int, default=1)
    parser.add_argument("--scale-b", type=float, default=3.0)


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zdlab",
        description="ZD alliance synthesis and ZD-player placement",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("topo", help="generate a topology and write it out")
    p.add_argument("--type", choices=graphs.TOPOLOGIES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--density", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_topo)

    p = sub.add_parser("ingest", help="contact trace to graph file")
    p.add_argument("--trace", required=True)
    p.add_argument("--min-contacts", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("metrics", help="degree and betweenness statistics")
    p.add_argument("--graph", required=True)
    p.add_argument("--per-node", action="store_true")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("synth", help="synthesize a ZD alliance strategy")
    _add_shape_args(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("verify", help="enforcement residual against outsiders")
    _add_shape_args(p)
    p.add_argument("--outsider-seed", type=int, default=0)
    p.add_argument("--outsider-file", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("field", help="evaluate one deployment")
    p.add_argument("--graph", required=True)
    p.add_argument("--zd", required=True, help="comma-separated ZD node ids")
    _add_scale_args(p)
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("opt", help="optimize a single-K placement")
    p.add_argument("--graph", required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--population", type=int, default=100)
    p.add_argument("--generations", type=int, default=300)
    p.add_argument("--exhaustive", action="store_true")
    _add_scale_args(p)
    p.set_defaults(func=cmd_opt)

    p = sub.add_parser("sweep", help="run a configured K-sweep experiment")
    p.add_argument("--config", required=True)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (InfeasibleError, ConvergenceError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 3
    except (ZdlabError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

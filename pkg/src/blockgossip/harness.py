"""Experiment orchestration: config files, multi-trial runs, CSV/JSON output.

A config is a single JSON file describing the graph, the covering, the noise
model, and the run budget.  Outputs are fully determined by the config: the
same config always produces byte-identical CSV and JSON files, regardless of
the worker count.

Seed scheme (all derived from ``base_seed``):

* initial node values: ``default_rng(base_seed)``, i.i.d. uniform on [0, 100]
* trial ``t`` block draws: seed ``base_seed + t``
* constant-edge-error vector (when drawn from ``std``): seed
  ``base_seed + 2**33`` unless the noise spec carries an explicit ``seed``
* varying-edge-error stream of trial ``t``: seed ``base_seed + t + 2**32``

Wall-clock time is reported on stdout only; the JSON artifact carries no
timing so that identical configs give identical bytes.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from . import covering as covering_mod
from . import gossip
from .covering import CoveringConstants, RowCovering
from .graph import (
    Graph,
    generate_complete,
    generate_erdos_renyi,
    generate_path,
    generate_square_lattice,
    load_graph,
    save_graph,
)

CECE_SEED_OFFSET = 2**33
VECE_SEED_OFFSET = 2**32


@dataclass
class ExperimentConfig:
    """Validated run description (one JSON object)."""

    graph: dict[str, Any]
    covering: dict[str, Any]
    noise: dict[str, Any]
    iterations: int
    trials: int
    base_seed: int
    record_collapse: bool
    output_dir: str
    workers: int = 1

    @staticmethod
    def from_dict(raw: dict[str, Any]) -> "ExperimentConfig":
        missing = {"graph", "covering", "noise", "iterations", "trials"} - raw.keys()
        if missing:
            raise ValueError(f"config missing keys: {sorted(missing)}")
        cfg = ExperimentConfig(
            graph=dict(raw["graph"]),
            covering=dict(raw["covering"]),
            noise=dict(raw["noise"]),
            iterations=int(raw["iterations"]),
            trials=int(raw["trials"]),
            base_seed=int(raw.get("base_seed", 0)),
            record_collapse=bool(raw.get("record_collapse", False)),
            output_dir=str(raw.get("output_dir", "out")),
            workers=int(raw.get("workers", 1)),
        )
        if cfg.iterations < 0:
            raise ValueError("iterations must be >= 0")
        if cfg.trials < 1:
            raise ValueError("trials must be >= 1")
        if cfg.workers < 1:
            raise ValueError("workers must be >= 1")
        return cfg

    @staticmethod
    def from_file(path: str | Path) -> "ExperimentConfig":
        return ExperimentConfig.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def build_graph(spec: dict[str, Any]) -> Graph:
    """Construct a graph from a config ``graph`` spec."""
    kind = spec.get("kind")
    if kind == "er":
        return generate_erdos_renyi(int(spec["n"]), float(spec["p"]), int(spec.get("seed", 0)))
    if kind == "lattice":
        return generate_square_lattice(int(spec["rows"]), int(spec["cols"]))
    if kind == "complete":
        return generate_complete(int(spec["n"]))
    if kind == "path":
        return generate_path(int(spec["n"]))
    if kind == "file":
        return load_graph(spec["path"])
    raise ValueError(f"unknown graph kind {kind!r}")


def build_covering(spec: dict[str, Any], g: Graph, base_seed: int = 0) -> RowCovering:
    """Construct a covering from a config ``covering`` spec.

    ``count`` for the random constructions defaults to the edge count, which
    keeps the expected number of patch blocks low.
    """
    kind = spec.get("kind")
    seed = int(spec.get("seed", base_seed))
    count = int(spec.get("count", g.edge_count))
    if kind == "ies":
        return covering_mod.greedy_ies_cover(g)
    if kind == "clique":
        return covering_mod.greedy_clique_cover(g)
    if kind == "path":
        return covering_mod.random_path_cover(g, int(spec.get("length", 10)), count, seed)
    if kind == "random":
        return covering_mod.random_block_cover(g, int(spec.get("size", 10)), count, seed)
    if kind == "file":
        return covering_mod.load_covering(spec["path"])
    raise ValueError(f"unknown covering kind {kind!r}")


def build_constant_error(spec: dict[str, Any], g: Graph, base_seed: int) -> gossip.ConstantEdgeError:
    if "m_file" in spec:
        m = np.loadtxt(spec["m_file"], dtype=float, ndmin=1)
        if m.size != g.edge_count:
            raise ValueError(f"m_file has {m.size} entries, graph has {g.edge_count} edges")
        return gossip.ConstantEdgeError(m)
    std = float(spec["std"])
    seed = int(spec.get("seed", base_seed + CECE_SEED_OFFSET))
    m = np.random.default_rng(seed).normal(0.0, std, g.edge_count)
    return gossip.ConstantEdgeError(m)


def build_noise(spec: dict[str, Any], g: Graph, base_seed: int, trial_seed: int) -> gossip.NoiseModel:
    """Noise model for one trial.

    The constant-error vector is drawn once per experiment (it does not
    depend on the trial); the varying-error stream is per-trial.
    """
    kind = spec.get("kind", "consistent")
    if kind == "consistent":
        return gossip.Consistent()
    if kind == "cece":
        return build_constant_error(spec, g, base_seed)
    if kind == "vece":
        return gossip.VaryingEdgeError(float(spec["std"]), trial_seed + VECE_SEED_OFFSET)
    raise ValueError(f"unknown noise kind {kind!r}")


@dataclass
class ExperimentResult:
    """Everything a run produced, ready for CSV/JSON serialization."""

    config: dict[str, Any]
    constants: CoveringConstants
    rate_bound: float
    horizon_bound: float
    initial_error: float
    trial_errors: np.ndarray
    mean_error: np.ndarray
    q05: np.ndarray
    q95: np.ndarray
    bound: np.ndarray
    collapse_values: np.ndarray | None

    def to_json_dict(self) -> dict[str, Any]:
        return {
            "config": self.config,
            "covering_constants": {
                "block_count": self.constants.block_count,
                "alpha": self.constants.alpha,
                "beta": self.constants.beta,
                "min_multiplicity": self.constants.min_multiplicity,
                "max_multiplicity": self.constants.max_multiplicity,
                "max_block_size": self.constants.max_block_size,
            },
            "rate_bound": self.rate_bound,
            "horizon_bound": self.horizon_bound,
            "initial_error": self.initial_error,
            "mean_error": [float(v) for v in self.mean_error],
            "q05": [float(v) for v in self.q05],
            "q95": [float(v) for v in self.q95],
            "bound": [float(v) for v in self.bound],
            "trial_errors": [[float(v) for v in row] for row in self.trial_errors],
        }


def _run_trial(args: tuple) -> tuple[np.ndarray, np.ndarray | None]:
    problem, covering, noise, iterations, seed, record_values = args
    traj = gossip.run(problem, covering, noise, iterations, seed, record_values=record_values)
    return traj.errors, traj.values


def run_experiment(cfg: ExperimentConfig, g: Graph | None = None, covering: RowCovering | None = None) -> ExperimentResult:
    """Execute all trials of a config and aggregate.

    ``g`` / ``covering`` may be passed in to share construction across
    protocols (compare/sweep); they must match the config specs.
    """
    if g is None:
        g = build_graph(cfg.graph)
    if covering is None:
        covering = build_covering(cfg.covering, g, cfg.base_seed)
    initial = np.random.default_rng(cfg.base_seed).uniform(0.0, 100.0, g.node_count)
    problem = gossip.ConsensusProblem(g, initial)
    consts = covering_mod.constants(covering, g)
    rate = gossip.gossip_rate_bound(consts, g)
    # The horizon depends only on the noise energy, which is trial-independent.
    noise0 = build_noise(cfg.noise, g, cfg.base_seed, cfg.base_seed)
    horizon = gossip.gossip_horizon_bound(consts, g, noise0)

    target = gossip.consensus_target(problem)
    init_err = float(np.linalg.norm(problem.initial_values - target))

    tasks = []
    for t in range(cfg.trials):
        trial_seed = cfg.base_seed + t
        noise = build_noise(cfg.noise, g, cfg.base_seed, trial_seed)
        tasks.append((problem, covering, noise, cfg.iterations, trial_seed, cfg.record_collapse and t == 0))
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_trial, tasks))
    else:
        outcomes = [_run_trial(task) for task in tasks]

    trial_errors = np.vstack([errors for errors, _ in outcomes])
    collapse = outcomes[0][1] if cfg.record_collapse else None
    ks = np.arange(cfg.iterations + 1)
    bound = np.sqrt(rate**ks * init_err**2 + horizon)
    return ExperimentResult(
        config=_config_echo(cfg),
        constants=consts,
        rate_bound=rate,
        horizon_bound=horizon,
        initial_error=init_err,
        trial_errors=trial_errors,
        mean_error=trial_errors.mean(axis=0),
        q05=np.quantile(trial_errors, 0.05, axis=0),
        q95=np.quantile(trial_errors, 0.95, axis=0),
        bound=bound,
        collapse_values=collapse,
    )


def _config_echo(cfg: ExperimentConfig) -> dict[str, Any]:
    return {
        "graph": cfg.graph,
        "covering": cfg.covering,
        "noise": cfg.noise,
        "iterations": cfg.iterations,
        "trials": cfg.trials,
        "base_seed": cfg.base_seed,
        "record_collapse": cfg.record_collapse,
        "output_dir": cfg.output_dir,
        "workers": cfg.workers,
    }


def _fmt(x: float) -> str:
    return repr(float(x))


def write_error_csv(result: ExperimentResult, path: Path) -> None:
    lines = ["iteration,mean_error,q05,q95,bound"]
    for k in range(result.mean_error.size):
        lines.append(
            f"{k},{_fmt(result.mean_error[k])},{_fmt(result.q05[k])},"
            f"{_fmt(result.q95[k])},{_fmt(result.bound[k])}"
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_collapse_csv(values: np.ndarray, path: Path) -> None:
    n = values.shape[1]
    lines = ["iteration," + ",".join(f"node_{i}" for i in range(n))]
    for k in range(values.shape[0]):
        lines.append(f"{k}," + ",".join(_fmt(v) for v in values[k]))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_result_json(result: ExperimentResult, path: Path) -> None:
    path.write_text(
        json.dumps(result.to_json_dict(), sort_keys=True, indent=1) + "\n", encoding="utf-8"
    )


def cmd_generate_graph(kind: str, out: str, **params: Any) -> Graph:
    """Build a graph from CLI parameters and write the edge-list file."""
    g = build_graph({"kind": kind, **params})
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    save_graph(g, out_path)
    print(f"wrote {out_path} ({g.node_count} nodes, {g.edge_count} edges)")
    return g


def cmd_build_covering(graph_path: str, kind: str, out: str, **params: Any) -> RowCovering:
    """Build a covering for a saved graph, write it, print its constants."""
    g = load_graph(graph_path)
    cov = build_covering({"kind": kind, **params}, g)
    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    covering_mod.save_covering(cov, out_path)
    consts = covering_mod.constants(cov, g)
    rate = gossip.gossip_rate_bound(consts, g)
    print(f"wrote {out_path}")
    print(
        f"d={consts.block_count} alpha={consts.alpha:.6g} beta={consts.beta:.6g} "
        f"r={consts.min_multiplicity} R={consts.max_multiplicity} M={consts.max_block_size}"
    )
    print(f"rate_bound={rate:.6g}")
    return cov


def cmd_run(cfg: ExperimentConfig) -> ExperimentResult:
    """Run one experiment; write errors.csv, result.json and (optionally)
    collapse.csv into the output directory."""
    start = time.perf_counter()
    result = run_experiment(cfg)
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_error_csv(result, out_dir / "errors.csv")
    write_result_json(result, out_dir / "result.json")
    if cfg.record_collapse and result.collapse_values is not None:
        write_collapse_csv(result.collapse_values, out_dir / "collapse.csv")
    print(f"wrote {out_dir}/errors.csv and {out_dir}/result.json")
    print(f"wall_time_s={time.perf_counter() - start:.3f}")
    return result


def cmd_compare(raw: dict[str, Any]) -> dict[str, ExperimentResult]:
    """Run several covering specs on one graph with matched seeds.

    Emits ``compare.csv`` with one error and one bound column per protocol.
    With ``exclude_trivial`` set, protocols whose covering collapses to a
    single block (consensus in one step) are skipped.
    """
    protocols = raw.get("protocols")
    if not protocols:
        raise ValueError("compare config needs a non-empty 'protocols' list")
    exclude_trivial = bool(raw.get("exclude_trivial", False))
    base = {k: v for k, v in raw.items() if k not in ("protocols", "exclude_trivial")}
    g = build_graph(base["graph"])
    results: dict[str, ExperimentResult] = {}
    for proto in protocols:
        name = proto["name"]
        cfg = ExperimentConfig.from_dict({**base, "covering": proto["covering"]})
        cov = build_covering(cfg.covering, g, cfg.base_seed)
        if exclude_trivial and cov.block_count == 1:
            print(f"skipping protocol {name}: covering is a single block")
            continue
        results[name] = run_experiment(cfg, g=g, covering=cov)
    if not results:
        raise ValueError("all protocols were excluded")
    out_dir = Path(base.get("output_dir", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    names = list(results)
    header = "iteration," + ",".join(f"{n}_error,{n}_bound" for n in names)
    iters = int(base["iterations"])
    lines = [header]
    for k in range(iters + 1):
        cells = [str(k)]
        for n in names:
            cells.append(_fmt(results[n].mean_error[k]))
            cells.append(_fmt(results[n].bound[k]))
        lines.append(",".join(cells))
    (out_dir / "compare.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out_dir}/compare.csv ({', '.join(names)})")
    return results


def cmd_sweep(raw: dict[str, Any]) -> dict[float, ExperimentResult]:
    """Run one protocol across a grid of edge probabilities with matched
    seeds; one error CSV per p, named from the parameter."""
    graph_spec = dict(raw.get("graph", {}))
    if graph_spec.get("kind") != "er":
        raise ValueError("sweep requires an 'er' graph spec with a 'p_grid'")
    grid = graph_spec.pop("p_grid", None)
    if not grid:
        raise ValueError("sweep requires a non-empty 'p_grid'")
    out_dir = Path(raw.get("output_dir", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)
    results: dict[float, ExperimentResult] = {}
    for p in grid:
        cfg = ExperimentConfig.from_dict({**raw, "graph": {**graph_spec, "p": p}})
        result = run_experiment(cfg)
        results[float(p)] = result
        name = f"errors_p{p:g}.csv"
        write_error_csv(result, out_dir / name)
        print(f"wrote {out_dir}/{name}")
    return results

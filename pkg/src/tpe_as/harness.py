"""Experiment driver: config loading, grid runs, trial logs, summary tables."""

from __future__ import annotations

import csv
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .baselines import run_baseline
from .blackbox import evaluate, scenario_preset, strategy_preset
from .optimizer import OptimizerConfig, run, summarize
from .space import Config, ParamSpace
from .surrogate import History, TrialRecord

METHODS = ("tpe_as", "tpe_conventional", "random_search")
SUMMARY_HEADER = [
    "method",
    "strategy",
    "scenario",
    "seed",
    "status",
    "max_f",
    "variance_f",
    "mean_step_time",
]


class HarnessError(ValueError):
    """Raised for unresolvable presets or malformed configs/CSVs."""


@dataclass(frozen=True)
class ExperimentConfig:
    method: str
    strategy: str
    scenario: str
    optimizer: OptimizerConfig
    seeds: tuple
    output_dir: str

    def __post_init__(self):
        if self.method not in METHODS:
            raise HarnessError(f"unknown method {self.method!r}")
        if not self.seeds or len(set(self.seeds)) != len(self.seeds):
            raise HarnessError("seeds must be non-empty and distinct")

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        doc = json.loads(text)
        opt_doc = dict(doc.get("optimizer", {}))
        opt_doc.pop("mode", None)  # mode follows the method
        opt = OptimizerConfig(mode="adaptive", seed=0, **opt_doc)
        cfg = cls(
            method=doc["method"],
            strategy=doc["strategy"],
            scenario=doc["scenario"],
            optimizer=opt,
            seeds=tuple(doc["seeds"]),
            output_dir=doc.get("output_dir", "out"),
        )
        # fail fast on unresolvable presets, before any run starts
        strategy_preset(cfg.strategy)
        scenario_preset(cfg.scenario)
        return cfg


def trial_to_json(trial: TrialRecord, space: ParamSpace) -> str:
    return json.dumps(
        {
            "step": trial.step,
            "config": trial.config.as_dict(space),
            "f": trial.f_value,
            "j_score": trial.j_score,
            "lambda": trial.lambda_used,
            "proposal_density": trial.proposal_density,
            "flags": list(trial.flags),
        },
        separators=(",", ":"),
    )


def history_to_jsonl(history: History, space: ParamSpace) -> str:
    return "\n".join(trial_to_json(t, space) for t in history.trials) + "\n"


def history_from_jsonl(text: str, space: ParamSpace) -> History:
    history = History()
    for line in text.strip().splitlines():
        doc = json.loads(line)
        history.append(
            TrialRecord(
                step=doc["step"],
                config=Config.from_dict(space, doc["config"]),
                f_value=doc["f"],
                j_score=doc["j_score"],
                proposal_density=doc["proposal_density"],
                lambda_used=doc["lambda"],
                flags=tuple(doc["flags"]),
            )
        )
    return history


def run_name(config: ExperimentConfig, seed: int) -> str:
    return f"{config.method}_{config.strategy}_{config.scenario}_seed{seed}"


def _run_cell(method: str, strategy: str, scenario: str, opt: OptimizerConfig, seed: int):
    """One grid cell: returns (history, space, mean_step_time)."""
    kind = strategy_preset(strategy)
    spec = scenario_preset(scenario, seed=seed)
    space = kind.param_space
    blackbox = lambda cfg: evaluate(kind, spec, cfg)
    opt_seeded = OptimizerConfig(
        budget=opt.budget,
        mode="adaptive" if method == "tpe_as" else "conventional",
        k=opt.k,
        epsilon=opt.epsilon,
        window=opt.window,
        n_init=opt.n_init,
        n_candidates=opt.n_candidates,
        seed=seed,
    )
    start = time.perf_counter()
    if method == "tpe_as":
        history = run(opt_seeded, blackbox, space)
    else:
        history = run_baseline(method, opt_seeded, blackbox, space)
    elapsed = time.perf_counter() - start
    return history, space, elapsed / opt.budget


def _cell_worker(args):
    config_json, seed = args
    config = ExperimentConfig.from_json(config_json)
    return seed, _run_cell(
        config.method, config.strategy, config.scenario, config.optimizer, seed
    )


def run_experiment(
    config: ExperimentConfig, overwrite: bool = False, parallelism: int = 1
) -> int:
    """Run all seeds, persist trial logs, trajectories, and a summary CSV.

    Returns a process exit status: 0 iff every run succeeded.
    """
    out = Path(config.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    summary_path = out / "summary.csv"
    if summary_path.exists() and not overwrite:
        raise HarnessError(f"{summary_path} exists; pass overwrite to replace it")

    results = {}
    failures = {}
    if parallelism > 1:
        config_json = json.dumps(
            {
                "method": config.method,
                "strategy": config.strategy,
                "scenario": config.scenario,
                "optimizer": {
                    "budget": config.optimizer.budget,
                    "k": config.optimizer.k,
                    "epsilon": config.optimizer.epsilon,
                    "window": config.optimizer.window,
                    "n_init": config.optimizer.n_init,
                    "n_candidates": config.optimizer.n_candidates,
                },
                "seeds": list(config.seeds),
                "output_dir": config.output_dir,
            }
        )
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for seed, cell in pool.map(
                _cell_worker, [(config_json, s) for s in config.seeds]
            ):
                results[seed] = cell
    else:
        for seed in config.seeds:
            try:
                results[seed] = _run_cell(
                    config.method, config.strategy, config.scenario, config.optimizer, seed
                )
            except Exception as exc:  # keep the grid going
                failures[seed] = repr(exc)

    with summary_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(SUMMARY_HEADER)
        for seed in config.seeds:
            if seed in failures:
                writer.writerow(
                    [config.method, config.strategy, config.scenario, seed,
                     f"failed: {failures[seed]}", "", "", ""]
                )
                continue
            history, space, step_time = results[seed]
            summary = summarize(history)
            name = run_name(config, seed)
            (out / f"trials_{name}.jsonl").write_text(history_to_jsonl(history, space))
            with (out / f"traj_{name}.csv").open("w", newline="") as tf:
                tw = csv.writer(tf)
                tw.writerow(["step", "f", "j_score"])
                for step, f, j, _lam in summary.trajectory:
                    tw.writerow([step, repr(f), repr(j)])
            writer.writerow(
                [config.method, config.strategy, config.scenario, seed, "ok",
                 repr(summary.max_f), repr(summary.variance_f), f"{step_time:.6f}"]
            )
    return 1 if failures else 0


def summary_from_log(log_path) -> dict:
    """Recompute a summary row's metrics straight from its trial log."""
    fs = []
    for line in Path(log_path).read_text().strip().splitlines():
        fs.append(json.loads(line)["f"])
    arr = np.asarray(fs)
    return {"max_f": float(arr.max()), "variance_f": float(np.var(arr))}


def _median_iqr(values):
    med = statistics.median(values)
    if len(values) < 2:
        return med, 0.0
    qs = statistics.quantiles(values, n=4)
    return med, qs[2] - qs[0]


def report(summary_csv) -> str:
    """Aggregate the summary CSV per (method, strategy, scenario) group."""
    path = Path(summary_csv)
    if not path.exists():
        raise HarnessError(f"no such summary file: {path}")
    groups: dict = {}
    with path.open() as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SUMMARY_HEADER:
            raise HarnessError(f"{path}:1: unexpected header {reader.fieldnames}")
        for i, row in enumerate(reader, start=2):
            if row["status"] != "ok":
                continue
            key = (row["method"], row["strategy"], row["scenario"])
            try:
                groups.setdefault(key, []).append(
                    (float(row["max_f"]), float(row["variance_f"]))
                )
            except ValueError as exc:
                raise HarnessError(f"{path}:{i}: {exc}") from exc

    stats = {}
    for key, rows in groups.items():
        max_med, max_iqr = _median_iqr([r[0] for r in rows])
        var_med, var_iqr = _median_iqr([r[1] for r in rows])
        stats[key] = (max_med, max_iqr, var_med, var_iqr)

    best_max = max(stats, key=lambda k: stats[k][0]) if stats else None
    best_var = min(stats, key=lambda k: stats[k][2]) if stats else None

    lines = [
        f"{'method':<18} {'strategy':<18} {'scenario':<18} "
        f"{'max_f med':>10} {'iqr':>8} {'var_f med':>10} {'iqr':>8}  flags"
    ]
    for key in sorted(stats):
        max_med, max_iqr, var_med, var_iqr = stats[key]
        flags = []
        if key == best_max:
            flags.append("best-max")
        if key == best_var:
            flags.append("best-var")
        lines.append(
            f"{key[0]:<18} {key[1]:<18} {key[2]:<18} "
            f"{max_med:>10.4f} {max_iqr:>8.4f} {var_med:>10.4f} {var_iqr:>8.4f}  "
            + ",".join(flags)
        )
    return "\n".join(lines)

"""The sequential optimization loop and run summarization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .objective import (
    ScheduleState,
    build_g_model,
    lagrangian_score,
    lambda_schedule,
    windowed_variance,
)
from .space import Config, ParamSpace, sample_uniform, uniform_density
from .surrogate import History, TrialRecord, propose_next

FAILURE_FLAG = "blackbox_failure"
DEGENERATE_FLAG = "degenerate_volatility"


class OptimizerError(ValueError):
    """Raised for invalid optimizer configuration."""


@dataclass(frozen=True)
class OptimizerConfig:
    budget: int
    mode: str = "adaptive"  # adaptive | conventional
    k: float = 0.15
    epsilon: float = 0.2
    window: int = 20
    n_init: int = 20
    n_candidates: int = 64
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("adaptive", "conventional"):
            raise OptimizerError(f"unknown mode {self.mode!r}")
        if not 0 < self.k < 1:
            raise OptimizerError("k must lie in (0,1)")
        if self.n_init < 2 or self.n_init >= self.budget:
            raise OptimizerError("need 2 <= n_init < budget")
        if self.epsilon < 0 or self.window < 2 or self.n_candidates < 1:
            raise OptimizerError("bad epsilon/window/n_candidates")


@dataclass(frozen=True)
class RunSummary:
    max_f: float
    variance_f: float  # population variance of all observed f
    mean_f: float
    best_config: Config
    trajectory: tuple  # (step, f, j_score, lambda) rows


def run(
    opt: OptimizerConfig,
    blackbox: Callable[[Config], float],
    space: ParamSpace,
    schedule: Callable[[int, int], float] = lambda_schedule,
) -> History:
    """Warm-up with uniform draws, then TPE proposals; score each trial.

    Conventional mode keeps lambda at 0 (objective score equals raw f);
    adaptive mode follows the cosine schedule and penalizes the clip-weighted
    windowed variance.  A blackbox failure records f = 0 with a flag and the
    budget is still consumed.
    """
    rng = np.random.default_rng(opt.seed)
    history = History()
    u_density = uniform_density(space)
    state = ScheduleState(
        budget=opt.budget, step=1, epsilon=opt.epsilon, window=opt.window
    )

    for t in range(1, opt.budget + 1):
        if t <= opt.n_init:
            config = sample_uniform(space, rng)
            q = u_density
        else:
            config, q = propose_next(history, space, opt.k, opt.n_candidates, rng)

        flags = []
        try:
            result = blackbox(config)
            f = float(result)
            if getattr(result, "degenerate", False):
                flags.append(DEGENERATE_FLAG)
        except Exception:
            f = 0.0
            flags.append(FAILURE_FLAG)

        if opt.mode == "adaptive":
            lam = schedule(t, opt.budget)
            if len(history) >= 2:
                g_model = build_g_model(history, opt.k, space)
                stats = windowed_variance(history, g_model, state, (config, f, q))
                variance = stats.variance
            else:
                variance = 0.0
        else:
            lam = 0.0
            variance = 0.0

        j = lagrangian_score(f, variance, lam)
        history.append(
            TrialRecord(
                step=t,
                config=config,
                f_value=f,
                j_score=j,
                proposal_density=q,
                lambda_used=lam,
                flags=tuple(flags),
            )
        )
    return history


def summarize(history: History) -> RunSummary:
    """Whole-run metrics: max f, population variance of f, best config."""
    if len(history) == 0:
        raise OptimizerError("cannot summarize an empty history")
    fs = np.array([t.f_value for t in history.trials])
    best = history.trials[int(np.argmax(fs))]
    trajectory = tuple(
        (t.step, t.f_value, t.j_score, t.lambda_used) for t in history.trials
    )
    return RunSummary(
        max_f=float(fs.max()),
        variance_f=float(np.var(fs)),
        mean_f=float(fs.mean()),
        best_config=best.config,
        trajectory=trajectory,
    )

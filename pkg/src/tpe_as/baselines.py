"""Comparison methods sharing the optimizer's loop contract."""

from __future__ import annotations

from typing import Callable

import numpy as np

from .optimizer import DEGENERATE_FLAG, FAILURE_FLAG, OptimizerConfig, run
from .space import Config, ParamSpace, sample_uniform, uniform_density
from .surrogate import History, TrialRecord

BASELINE_KINDS = ("random_search", "tpe_conventional")


def run_baseline(
    kind: str,
    opt: OptimizerConfig,
    blackbox: Callable[[Config], float],
    space: ParamSpace,
) -> History:
    """random_search: all trials uniform; tpe_conventional: lambda-free TPE."""
    if kind == "tpe_conventional":
        conv = OptimizerConfig(
            budget=opt.budget,
            mode="conventional",
            k=opt.k,
            epsilon=opt.epsilon,
            window=opt.window,
            n_init=opt.n_init,
            n_candidates=opt.n_candidates,
            seed=opt.seed,
        )
        return run(conv, blackbox, space)
    if kind != "random_search":
        raise ValueError(f"unknown baseline {kind!r}")

    rng = np.random.default_rng(opt.seed)
    history = History()
    u_density = uniform_density(space)
    for t in range(1, opt.budget + 1):
        config = sample_uniform(space, rng)
        flags = []
        try:
            result = blackbox(config)
            f = float(result)
            if getattr(result, "degenerate", False):
                flags.append(DEGENERATE_FLAG)
        except Exception:
            f = 0.0
            flags.append(FAILURE_FLAG)
        history.append(
            TrialRecord(
                step=t,
                config=config,
                f_value=f,
                j_score=f,
                proposal_density=u_density,
                lambda_used=0.0,
                flags=tuple(flags),
            )
        )
    return history

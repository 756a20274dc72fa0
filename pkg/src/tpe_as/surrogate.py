"""Good/bad Parzen densities over trial history and the density-ratio proposal."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.special import erf

from .space import Config, ParamSpace, require_valid

BANDWIDTH_FLOOR_FRAC = 1e-3  # of domain width
MAX_REJECTION_TRIES = 1000
DENSITY_FLOOR = 1e-300  # keeps far-tail evaluations positive despite underflow
SQRT2 = math.sqrt(2.0)
SQRT2PI = math.sqrt(2.0 * math.pi)


class SurrogateError(ValueError):
    """Raised for insufficient history or mismatched models."""


@dataclass(frozen=True)
class TrialRecord:
    """One evaluated configuration."""

    step: int
    config: Config
    f_value: float
    j_score: float
    proposal_density: float  # density of config under the model that proposed it
    lambda_used: float
    flags: tuple = ()

    def __post_init__(self):
        if self.proposal_density <= 0:
            raise SurrogateError("proposal_density must be positive")


@dataclass
class History:
    """Append-only ordered record of all evaluated trials."""

    trials: list = field(default_factory=list)

    def append(self, trial: TrialRecord) -> None:
        expected = self.trials[-1].step + 1 if self.trials else 1
        if trial.step != expected:
            raise SurrogateError(f"expected step {expected}, got {trial.step}")
        self.trials.append(trial)

    def __len__(self) -> int:
        return len(self.trials)


@dataclass(frozen=True)
class KdeModel:
    """Parzen mixture over a ParamSpace.

    One kernel component per member config.  Continuous dimensions use
    Gaussian kernels truncated and renormalized to the bounds; integer
    dimensions use Gaussian weights on the integer lattice; categorical
    dimensions share one smoothed frequency table across components.
    Truncation masses and lattice pmfs are precomputed at fit time.
    """

    space: ParamSpace
    centers: tuple  # per dim: component centers (None for categorical)
    bandwidths: dict  # numeric dim index -> float > 0
    categorical_tables: dict  # categorical dim index -> np.ndarray over choices
    n_components: int
    trunc_mass: dict = field(default_factory=dict, compare=False)  # continuous dim -> per-component mass
    lattice_pmf: dict = field(default_factory=dict, compare=False)  # integer dim -> (n_comp, lattice) pmf


def split_history(history: History, k: float):
    """Partition trials into (good, bad) at the top-k quantile of j_score.

    Good group size is max(2, ceil(k*n)); ties at the threshold are broken
    by lower step index entering good first.
    """
    n = len(history)
    if n < 2:
        raise SurrogateError("need at least 2 trials to split")
    if not 0 < k < 1:
        raise SurrogateError("k must lie in (0, 1)")
    n_good = max(2, math.ceil(k * n))
    ranked = sorted(history.trials, key=lambda t: (-t.j_score, t.step))
    good = ranked[:n_good]
    bad = ranked[n_good:]
    good.sort(key=lambda t: t.step)
    bad.sort(key=lambda t: t.step)
    return good, bad


def _scott_bandwidth(values: np.ndarray, n_numeric: int, width: float) -> float:
    sigma = float(np.std(values))
    bw = sigma * len(values) ** (-1.0 / (n_numeric + 4))
    # adaptive minimum keeps proposals diverse when members coincide; without
    # it the search freezes on whatever point the good group collapses to
    magic_clip = width / min(100, len(values) + 1)
    return max(bw, magic_clip, BANDWIDTH_FLOOR_FRAC * width)


def fit_kde(members, space: ParamSpace, floor_weight: float = 0.1) -> KdeModel:
    """Fit a Parzen density with one component per member config."""
    if not members:
        raise SurrogateError("cannot fit a KDE on zero members")
    for cfg in members:
        require_valid(space, cfg)

    n_numeric = sum(1 for d in space.domains if d.is_numeric)
    centers = []
    bandwidths = {}
    tables = {}
    trunc_mass = {}
    lattice_pmf = {}
    for i, d in enumerate(space.domains):
        col = [cfg.values[i] for cfg in members]
        if d.is_numeric:
            arr = np.asarray(col, dtype=float)
            centers.append(arr)
            bw = _scott_bandwidth(arr, n_numeric, d.width())
            bandwidths[i] = bw
            if d.kind == "continuous":
                hi_mass = erf((d.hi - arr) / (bw * SQRT2))
                lo_mass = erf((d.lo - arr) / (bw * SQRT2))
                trunc_mass[i] = 0.5 * (hi_mass - lo_mass)
            else:
                lattice = np.arange(int(d.lo), int(d.hi) + 1, dtype=float)
                z = (lattice[None, :] - arr[:, None]) / bw
                w = np.exp(-0.5 * z * z)
                lattice_pmf[i] = w / w.sum(axis=1, keepdims=True)
        else:
            centers.append(None)
            counts = np.array([col.count(c) for c in d.choices], dtype=float)
            empirical = counts / counts.sum()
            uniform = np.full(len(d.choices), 1.0 / len(d.choices))
            tables[i] = (1.0 - floor_weight) * empirical + floor_weight * uniform
    return KdeModel(
        space=space,
        centers=tuple(centers),
        bandwidths=bandwidths,
        categorical_tables=tables,
        n_components=len(members),
        trunc_mass=trunc_mass,
        lattice_pmf=lattice_pmf,
    )


def density(model: KdeModel, config: Config) -> float:
    """Evaluate the mixture density at a config; strictly positive."""
    require_valid(model.space, config)
    per_component = np.ones(model.n_components)
    categorical_factor = 1.0
    for i, d in enumerate(model.space.domains):
        v = config.values[i]
        if d.kind == "continuous":
            bw = model.bandwidths[i]
            z = (float(v) - model.centers[i]) / bw
            pdf = np.exp(-0.5 * z * z) / (bw * SQRT2PI)
            per_component *= pdf / model.trunc_mass[i]
        elif d.kind == "integer":
            per_component *= model.lattice_pmf[i][:, int(v) - int(d.lo)]
        else:
            table = model.categorical_tables[i]
            categorical_factor *= float(table[d.choices.index(v)])
    return max(float(per_component.mean() * categorical_factor), DENSITY_FLOOR)


def acquisition(good_model: KdeModel, bad_model: KdeModel, config: Config) -> float:
    """Density ratio of the good model over the bad model at a config."""
    if good_model.space != bad_model.space:
        raise SurrogateError("good and bad models must share a space")
    return density(good_model, config) / density(bad_model, config)


def sample_from_kde(model: KdeModel, rng: np.random.Generator) -> Config:
    """Draw one config: pick a component uniformly, then sample each kernel."""
    comp = int(rng.integers(model.n_components))
    values = []
    for i, d in enumerate(model.space.domains):
        if d.kind == "continuous":
            center = model.centers[i][comp]
            bw = model.bandwidths[i]
            for _ in range(MAX_REJECTION_TRIES):
                x = rng.normal(center, bw)
                if d.lo <= x <= d.hi:
                    break
            else:
                x = min(max(center, d.lo), d.hi)
            values.append(float(x))
        elif d.kind == "integer":
            pmf = model.lattice_pmf[i][comp]
            values.append(int(d.lo) + int(rng.choice(len(pmf), p=pmf)))
        else:
            table = model.categorical_tables[i]
            values.append(d.choices[int(rng.choice(len(table), p=table))])
    return Config(tuple(values))


def propose_next(
    history: History,
    space: ParamSpace,
    k: float,
    n_candidates: int,
    rng: np.random.Generator,
    floor_weight: float = 0.1,
):
    """Propose the next config by maximizing the good/bad density ratio.

    Returns (config, proposal_density) where the density is taken under the
    good-group model the candidate was drawn from.
    """
    if n_candidates < 1:
        raise SurrogateError("need at least one candidate")
    good, bad = split_history(history, k)
    good_model = fit_kde([t.config for t in good], space, floor_weight)
    bad_model = fit_kde([t.config for t in bad], space, floor_weight)

    best_cfg: Optional[Config] = None
    best_alpha = -math.inf
    best_q = 0.0
    for _ in range(n_candidates):
        cand = sample_from_kde(good_model, rng)
        q = density(good_model, cand)
        alpha = q / density(bad_model, cand)
        if alpha > best_alpha:
            best_cfg, best_alpha, best_q = cand, alpha, q
    return best_cfg, best_q

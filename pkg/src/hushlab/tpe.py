"""Black-box parameter search: TPE with a random-search baseline.

Univariate Tree-structured Parzen Estimator: the gamma-scaled elite of
the history (size ceil(gamma * sqrt(n)), capped) forms the good set and
the remainder the bad set; per-dimension Gaussian KDEs are fitted to
both (Scott's-rule bandwidth with a 1%-of-range floor, log transform
for log dimensions); candidates drawn from the good density are ranked
by the good/bad density ratio.  Everything is deterministic per seed;
objective failures score -inf instead of aborting the search.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from hushlab.metrics import si_snr
from hushlab.mixgen import splitmix64

TPE_GAMMA = 0.25
TPE_CANDIDATES = 24
TPE_STARTUP = 10


@dataclass(frozen=True)
class Dim:
    kind: str  # uniform | log_uniform | int_uniform
    lo: float
    hi: float

    def __post_init__(self):
        if self.kind not in ("uniform", "log_uniform", "int_uniform"):
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        if not self.lo < self.hi:
            raise ValueError(f"need lo < hi, got [{self.lo}, {self.hi}]")
        if self.kind == "log_uniform" and self.lo <= 0.0:
            raise ValueError(f"log_uniform needs lo > 0, got {self.lo}")

    # internal coordinate: log-space for log dims, identity otherwise
    def to_z(self, x: float) -> float:
        return math.log(x) if self.kind == "log_uniform" else float(x)

    def from_z(self, z: float) -> float:
        z = min(max(z, self.to_z(self.lo)), self.to_z(self.hi))
        x = math.exp(z) if self.kind == "log_uniform" else z
        if self.kind == "int_uniform":
            x = float(int(round(x)))
        return min(max(x, self.lo), self.hi)

    def sample(self, rng) -> float:
        if self.kind == "int_uniform":
            return float(rng.integers(int(self.lo), int(self.hi) + 1))
        return self.from_z(rng.uniform(self.to_z(self.lo), self.to_z(self.hi)))


def uniform(lo: float, hi: float) -> Dim:
    return Dim("uniform", lo, hi)


def log_uniform(lo: float, hi: float) -> Dim:
    return Dim("log_uniform", lo, hi)


def int_uniform(lo: int, hi: int) -> Dim:
    return Dim("int_uniform", lo, hi)


@dataclass(frozen=True)
class ParamSpace:
    dims: dict  # name -> Dim

    def __post_init__(self):
        if not self.dims:
            raise ValueError("parameter space is empty")
        object.__setattr__(self, "dims", dict(self.dims))

    def sample(self, rng) -> dict:
        return {name: dim.sample(rng) for name, dim in self.dims.items()}

    def contains(self, params: dict) -> bool:
        return all(
            name in params and self.dims[name].lo <= params[name] <= self.dims[name].hi
            for name in self.dims
        )


@dataclass(frozen=True)
class Trial:
    params: dict
    objective: float  # higher is better; failures carry -inf


@dataclass(frozen=True)
class TpeConfig:
    gamma: float = TPE_GAMMA
    n_candidates: int = TPE_CANDIDATES
    n_startup: int = TPE_STARTUP
    seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.gamma < 1.0:
            raise ValueError(f"gamma must be in (0, 1), got {self.gamma}")
        if self.n_candidates < 1 or self.n_startup < 1:
            raise ValueError("n_candidates and n_startup must be >= 1")


def _kde_log_density(z: np.ndarray, centers: np.ndarray, bandwidth: float) -> float:
    # mean of Gaussian kernels, evaluated in log space for stability
    d = (z - centers) / bandwidth
    log_k = -0.5 * d * d - math.log(bandwidth * math.sqrt(2.0 * math.pi))
    m = float(np.max(log_k))
    return m + math.log(float(np.mean(np.exp(log_k - m))))


def _bandwidth(centers: np.ndarray, z_range: float) -> float:
    sigma = float(np.std(centers))
    scott = sigma * len(centers) ** (-0.2)
    return max(scott, 0.01 * z_range)


def suggest(history, space: ParamSpace, config: TpeConfig = TpeConfig()) -> dict:
    """Propose the next parameter point.

    Uniform within bounds for the first ``n_startup`` trials; afterwards
    the best trials anchor a good-set density and the TPE candidate
    maximizing density_good/density_bad is returned.  Deterministic for
    a fixed (seed, len(history)).

    Parameters
    ----------
    history : list of Trial
    space : ParamSpace
    config : TpeConfig

    Returns
    -------
    dict
        name -> value, always within bounds (integers for int dims).
    """
    rng = np.random.default_rng(splitmix64(config.seed, len(history)))
    if len(history) < config.n_startup:
        return space.sample(rng)

    ranked = sorted(history, key=lambda t: t.objective, reverse=True)
    # sqrt scaling keeps the elite small: a linear gamma*n split lets a
    # crowd of mediocre-but-clustered trials out-vote the lone best point
    # in the KDE and the search stalls on the wrong mode
    n_good = max(1, math.ceil(config.gamma * math.sqrt(len(ranked))))
    n_good = min(n_good, 25, len(ranked) - 1)  # keep the bad set non-empty
    good, bad = ranked[:n_good], ranked[n_good:]

    names = list(space.dims)
    z_good = {}
    z_bad = {}
    bw_good = {}
    bw_bad = {}
    for name in names:
        dim = space.dims[name]
        z_range = dim.to_z(dim.hi) - dim.to_z(dim.lo)
        z_good[name] = np.array([dim.to_z(t.params[name]) for t in good])
        z_bad[name] = np.array([dim.to_z(t.params[name]) for t in bad])
        bw_good[name] = _bandwidth(z_good[name], z_range)
        bw_bad[name] = _bandwidth(z_bad[name], z_range)

    best_score = -math.inf
    best = None
    for _ in range(config.n_candidates):
        candidate = {}
        score = 0.0
        for name in names:
            dim = space.dims[name]
            center = z_good[name][int(rng.integers(len(z_good[name])))]
            z = float(np.clip(center + rng.normal(0.0, bw_good[name]),
                              dim.to_z(dim.lo), dim.to_z(dim.hi)))
            candidate[name] = dim.from_z(z)
            z_eval = dim.to_z(candidate[name])
            score += _kde_log_density(z_eval, z_good[name], bw_good[name])
            score -= _kde_log_density(z_eval, z_bad[name], bw_bad[name])
        if score > best_score:
            best_score = score
            best = candidate
    return best


def run_search(objective, space: ParamSpace, n_trials: int,
               strategy: str = "tpe", seed: int = 0):
    """Sequential search returning (best trial, full history).

    Parameters
    ----------
    objective : callable params -> float
        Higher is better.  Exceptions and non-finite values are recorded
        as -inf trials, not raised.
    space : ParamSpace
    n_trials : int
    strategy : {"tpe", "random"}
    seed : int
        Identical (space, objective, seed, n_trials, strategy) give an
        identical history.

    Returns
    -------
    (Trial, list of Trial)
    """
    if strategy not in ("tpe", "random"):
        raise ValueError(f"strategy must be 'tpe' or 'random', got {strategy!r}")
    if n_trials < 1:
        raise ValueError(f"n_trials must be >= 1, got {n_trials}")
    history = []
    config = TpeConfig(seed=seed)
    for t in range(n_trials):
        if strategy == "tpe":
            params = suggest(history, space, config)
        else:
            params = space.sample(np.random.default_rng(splitmix64(seed, t)))
        try:
            value = float(objective(params))
        except Exception:
            value = -math.inf
        if math.isnan(value):
            value = -math.inf
        history.append(Trial(params=params, objective=value))
    best = max(history, key=lambda tr: tr.objective)
    return best, history


def mean_sisnr_objective(processor_factory, validation):
    """Objective closure: mean SI-SNR of processed mixtures vs ground truth.

    ``processor_factory(params)`` must return a StreamProcessor;
    construction or processing failures make the closure return -inf for
    that point — whole parameter regions can be numerically unstable
    (AGC notoriously), so the search has to survive them.
    """
    if not validation:
        raise ValueError("validation set is empty")

    def objective(params: dict) -> float:
        try:
            scores = []
            for result in validation:
                processor = processor_factory(params)
                processor.reset()
                est = processor.process(result.mixture.samples)
                scores.append(si_snr(est, result.ground_truth.samples))
            return float(np.mean(scores))
        except Exception:
            return -math.inf

    return objective


def write_history_csv(history, path) -> None:
    """Export trials as CSV: trial_index, each param, objective."""
    if not history:
        raise ValueError("empty history")
    names = list(history[0].params)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["trial_index", *names, "objective"])
        for i, trial in enumerate(history):
            writer.writerow([i, *[repr(trial.params[n]) for n in names],
                             repr(trial.objective)])

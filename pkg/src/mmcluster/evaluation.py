"""Misclustering rate and the repeated-trial experiment harness."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import cluster as clu
from .affinity import ScaleParams
from .cluster import Labeling
from .datasets import DatasetSpec, generate, global_radius
from .errors import InvalidInput, MMClusterError
from .neighborhoods import PointCloud
from .seeding import derive_seed

Array = np.ndarray

RATE_THRESHOLDS = (0.05, 0.10, 0.15)


def misclustering_rate(pred, truth: Array, k: int) -> float:
    """Fraction of points misassigned under the best injective matching of
    predicted cluster ids to true labels (optimal assignment on the
    contingency table).  Predicted clusters left unmatched count all of
    their members as errors, which penalizes over-segmentation.
    """
    pred_labels = pred.assignments if isinstance(pred, Labeling) else np.asarray(pred, int)
    truth = np.asarray(truth, int)
    if pred_labels.shape != truth.shape:
        raise InvalidInput("prediction and truth have different lengths")
    if truth.min() < 1 or truth.max() > k:
        raise InvalidInput(f"truth labels must lie in [1..{k}]")
    n = truth.size
    k_found = int(pred_labels.max())
    table = np.zeros((k, k_found), dtype=int)
    np.add.at(table, (truth - 1, pred_labels - 1), 1)
    rows, cols = linear_sum_assignment(-table)
    correct = int(table[rows, cols].sum())
    return 1.0 - correct / n


@dataclass
class MethodConfig:
    """Which pipeline to run and with what parameters."""

    method: str                      # alg2 | alg3 | alg4 | njw_baseline
    r: float
    k: int | None = None
    d: int | None = None
    eps: float | None = None
    eta: float | None = None
    affinity: str = "gauss"
    norm: str = "spectral"
    ell: int = 10
    alpha: float = 2.0

    def __post_init__(self):
        if self.method not in ("alg2", "alg3", "alg4", "njw_baseline"):
            raise InvalidInput(f"unknown method {self.method!r}")
        if self.r <= 0:
            raise InvalidInput("r must be positive")
        if self.method in ("alg2", "alg3") and (self.eps is None or self.eta is None):
            raise InvalidInput(f"{self.method} requires explicit eps and eta")
        if self.method == "alg3" and not (0 < self.eta < 1):
            raise InvalidInput("alg3 requires 0 < eta < 1")
        if self.method == "alg4" and (self.k is None or self.d is None):
            raise InvalidInput("alg4 requires K and d")
        if self.method == "njw_baseline" and self.k is None:
            raise InvalidInput("njw_baseline requires K")


def run_method(cloud: PointCloud, cfg: MethodConfig, seed: int, threads: int = 1) -> Labeling:
    """Run the configured pipeline on a point cloud with a fresh generator."""
    rng = np.random.default_rng(seed)
    if cfg.method == "alg2":
        params = ScaleParams(r=cfg.r, eps=cfg.eps, eta=cfg.eta)
        return clu.algorithm2_cov_components(cloud, params, norm=cfg.norm, threads=threads)
    if cfg.method == "alg3":
        params = ScaleParams(r=cfg.r, eps=cfg.eps, eta=cfg.eta)
        return clu.algorithm3_proj_components(cloud, params, norm=cfg.norm, threads=threads)
    if cfg.method == "alg4":
        return clu.algorithm4_local_pca_spectral(
            cloud, cfg.r, cfg.k, cfg.d, rng, eps=cfg.eps, eta=cfg.eta,
            threads=threads, affinity_kind=cfg.affinity, ell=cfg.ell, alpha=cfg.alpha)
    return clu.njw_baseline(cloud, cfg.r, cfg.k, rng, eps=cfg.eps)


@dataclass
class TrialStats:
    """Per-configuration statistics over repeated seeded trials."""

    rates: list[float]
    median: float
    count_below: dict[float, int]
    r_used: float
    r_over_R: float
    k_found: list[int] = field(default_factory=list)
    errors: list[str | None] = field(default_factory=list)


def lower_median(values) -> float:
    values = sorted(float(v) for v in values)
    if not values:
        raise InvalidInput("median of empty sequence")
    return values[(len(values) - 1) // 2]


def _single_trial(spec: DatasetSpec, cfg: MethodConfig, base_seed: int, t: int):
    trial_seed = derive_seed(base_seed, t)
    data_seed = derive_seed(trial_seed, 0)
    algo_seed = derive_seed(trial_seed, 1)
    cloud = generate(replace(spec, seed=data_seed))
    radius = global_radius(cloud)
    k_true = int(cloud.n_clusters)
    try:
        labeling = run_method(cloud, cfg, algo_seed)
        rate = misclustering_rate(labeling, cloud.labels, k_true)
        return rate, int(labeling.K_found), None, radius
    except MMClusterError as exc:
        return 1.0, 0, f"{type(exc).__name__}: {exc}", radius


def run_trials(spec: DatasetSpec, cfg: MethodConfig, n_trials: int,
               base_seed: int, threads: int = 1) -> TrialStats:
    """Repeat generation + clustering ``n_trials`` times with derived seeds.

    Trial t draws its dataset seed and algorithm seed from
    derive_seed(derive_seed(base_seed, t), 0|1), so results do not depend
    on execution order or thread count.  A failing trial is recorded as
    rate 1.0 with an error note instead of aborting the sweep.
    """
    if n_trials < 1:
        raise InvalidInput("n_trials must be >= 1")

    def work(t):
        return _single_trial(spec, cfg, base_seed, t)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(work, range(n_trials)))
    else:
        outcomes = [work(t) for t in range(n_trials)]

    rates = [o[0] for o in outcomes]
    k_found = [o[1] for o in outcomes]
    notes = [o[2] for o in outcomes]
    radii = [o[3] for o in outcomes]
    counts = {thr: int(sum(r < thr for r in rates)) for thr in RATE_THRESHOLDS}
    mean_radius = float(np.mean(radii))
    return TrialStats(
        rates=rates,
        median=lower_median(rates),
        count_below=counts,
        r_used=cfg.r,
        r_over_R=cfg.r / mean_radius if mean_radius > 0 else float("inf"),
        k_found=k_found,
        errors=notes,
    )


def angle_sweep(angles, spec: DatasetSpec, cfg: MethodConfig, n_trials: int,
                base_seed: int, threads: int = 1) -> dict[float, TrialStats]:
    """run_trials for each intersection angle; same base seed per angle."""
    out: dict[float, TrialStats] = {}
    for a in angles:
        out[float(a)] = run_trials(replace(spec, angle=float(a)), cfg,
                                   n_trials, base_seed, threads=threads)
    return out

"""Local sample covariances and tangent-projection estimation.

Covariances are normalized by the neighborhood size m (empirical-measure
convention), not m - 1; the closed-form oracles for uniform samples on
balls and segments rely on this.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import EmptyNeighborhood, InvalidInput, ZeroCovariance
from .neighborhoods import NeighborhoodIndex, PointCloud

Array = np.ndarray


@dataclass
class LocalModel:
    """Per-center local PCA summary.

    degenerate marks neighborhoods with fewer than 2 points (zero
    covariance); indicator affinities treat such models as unconnected.
    est_dim equals trace(projection) except for degenerate models, where
    both are zero.
    """

    center: Array
    neighbor_count: int
    covariance: Array
    projection: Array
    est_dim: int
    degenerate: bool = False
    degenerate_gap: bool = False


def empirical_covariance(points: Array) -> Array:
    """Covariance of the empirical measure on ``points`` (1/m normalization)."""
    points = np.asarray(points, dtype=float)
    mu = points.mean(axis=0)
    dev = points - mu
    return linalg.symmetrize(dev.T @ dev / points.shape[0])


def local_covariance(cloud: PointCloud, index: NeighborhoodIndex, x: Array, r: float) -> Array:
    """Sample covariance of the closed r-ball neighborhood of ``x``."""
    idx = index.query(np.asarray(x, float), r)
    if idx.size == 0:
        raise EmptyNeighborhood(f"no points within r={r} of {x}")
    return empirical_covariance(cloud.coords[idx])


def estimate_projection(c: Array, d: int) -> Array:
    """Rank-d orthogonal projection onto the top-d eigenvectors of ``c``."""
    return linalg.projection_onto_top_d(linalg.eigh(c), d)


def estimate_dim_thresholded(c: Array, eta: float) -> tuple[int, Array]:
    """Dimension and projection from eigenvalues exceeding sqrt(eta)*||c||.

    The count uses strict inequality.  Raises ZeroCovariance on the zero
    matrix.
    """
    if not 0.0 < eta < 1.0:
        raise InvalidInput("eta must lie in (0, 1)")
    e = linalg.eigh(c)
    top = e.eigenvalues[0]
    if top <= 0.0:
        raise ZeroCovariance("cannot threshold the zero covariance matrix")
    threshold = np.sqrt(eta) * top
    est_dim = int((e.eigenvalues > threshold).sum())
    return est_dim, linalg.projection_onto_top_d(e, est_dim)


def _model_for_center(
    cloud: PointCloud,
    neighbors: Array,
    center: Array,
    d: int | None,
    eta: float | None,
) -> LocalModel:
    dim = cloud.dim
    m = len(neighbors)
    if m < 2:
        zero = np.zeros((dim, dim))
        return LocalModel(
            center=center, neighbor_count=m, covariance=zero,
            projection=zero, est_dim=0, degenerate=True,
        )
    cov = empirical_covariance(cloud.coords[neighbors])
    e = linalg.eigh(cov)
    if d is not None:
        est_dim = d
        proj = linalg.projection_onto_top_d(e, d)
        gap = linalg.degenerate_gap(e, d)
    else:
        top = e.eigenvalues[0]
        if top <= 0.0:
            zero = np.zeros((dim, dim))
            return LocalModel(
                center=center, neighbor_count=m, covariance=cov,
                projection=zero, est_dim=0, degenerate=True,
            )
        est_dim = int((e.eigenvalues > np.sqrt(eta) * top).sum())
        proj = linalg.projection_onto_top_d(e, est_dim)
        gap = linalg.degenerate_gap(e, est_dim)
    return LocalModel(
        center=center, neighbor_count=m, covariance=cov,
        projection=proj, est_dim=est_dim, degenerate_gap=gap,
    )


def batch_local_models(
    cloud: PointCloud,
    index: NeighborhoodIndex,
    centers: Array,
    r: float,
    d: int | None = None,
    eta: float | None = None,
    threads: int = 1,
) -> list[LocalModel]:
    """One LocalModel per center index, in center order.

    Exactly one of ``d`` (fixed tangent dimension) and ``eta``
    (threshold scale for dimension estimation) must be given.  Results
    are independent of ``threads``.
    """
    if (d is None) == (eta is None):
        raise InvalidInput("pass exactly one of d (fixed) or eta (thresholded)")
    if d is not None and not 1 <= d <= cloud.dim:
        raise InvalidInput(f"d={d} out of range for ambient dimension {cloud.dim}")
    if eta is not None and not 0.0 < eta < 1.0:
        raise InvalidInput("eta must lie in (0, 1)")
    centers = np.asarray(centers, dtype=int)
    if centers.size == 0:
        raise InvalidInput("centers must be nonempty")

    neighbor_lists = index.tree.query_ball_point(cloud.coords[centers], r,
                                                 return_sorted=True)
    results: list[LocalModel | None] = [None] * len(centers)

    def work(k: int):
        results[k] = _model_for_center(
            cloud, neighbor_lists[k], cloud.coords[centers[k]], d, eta
        )

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(len(centers))))
    else:
        for k in range(len(centers)):
            work(k)
    return results  # type: ignore[return-value]

"""Radius neighborhoods, center subsampling, and graph components.

Every neighborhood is a closed ball: radius_query(x, r) returns exactly
the indices j with ||x - x_j|| <= r.  The KD-tree is an exact
accelerator, never an approximation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse.csgraph import connected_components as _cc
from scipy.spatial import cKDTree

from .errors import InvalidInput, NoSurvivors

Array = np.ndarray


@dataclass
class PointCloud:
    """n points in D-dimensional ambient space, with optional ground truth.

    labels, when present, are 1-based cluster ids in [1..K].
    """

    coords: Array
    labels: Array | None = None
    seed: int | None = None
    intrinsic_dim: int | None = None
    n_clusters: int | None = None

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=float)
        if self.coords.ndim != 2 or self.coords.shape[0] < 1:
            raise InvalidInput(f"coords must be (n, D) with n >= 1, got {self.coords.shape}")
        if not np.all(np.isfinite(self.coords)):
            raise InvalidInput("coords contain non-finite values")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=int)
            if self.labels.shape != (self.coords.shape[0],):
                raise InvalidInput("labels length must match point count")
            if self.labels.min() < 1:
                raise InvalidInput("labels must be 1-based")
            if self.n_clusters is not None and self.labels.max() > self.n_clusters:
                raise InvalidInput("labels exceed the declared cluster count")

    @property
    def n(self) -> int:
        return self.coords.shape[0]

    @property
    def dim(self) -> int:
        return self.coords.shape[1]


class NeighborhoodIndex:
    """Exact closed-ball radius queries over a point cloud."""

    def __init__(self, cloud: PointCloud):
        self.cloud = cloud
        self.tree = cKDTree(cloud.coords)

    def query(self, x: Array, r: float) -> Array:
        idx = self.tree.query_ball_point(np.asarray(x, float), r, return_sorted=True)
        return np.asarray(idx, dtype=int)

    def query_all(self, r: float) -> list:
        """Closed-ball neighbor lists for every point of the cloud."""
        return self.tree.query_ball_point(self.cloud.coords, r, return_sorted=True)

    def pairs_within(self, r: float) -> Array:
        """All index pairs (i < j) at distance <= r, as an (m, 2) array."""
        out = self.tree.query_pairs(r, output_type="ndarray")
        if out.size == 0:
            return out.reshape(0, 2)
        return out


def build_index(cloud: PointCloud) -> NeighborhoodIndex:
    return NeighborhoodIndex(cloud)


def radius_query(index: NeighborhoodIndex, x: Array, r: float) -> Array:
    if r <= 0:
        raise InvalidInput("radius must be positive")
    return index.query(x, r)


def subsample_centers(index: NeighborhoodIndex, r: float, rng: np.random.Generator) -> Array:
    """Greedy r-packing: draw a point, discard its r-ball, repeat.

    The draw at each step is uniform over points not covered by any
    previously chosen center.  Returns center indices in selection order;
    deterministic for a given generator state.
    """
    if r <= 0:
        raise InvalidInput("radius must be positive")
    n = index.cloud.n
    remaining = np.ones(n, dtype=bool)
    centers = []
    while remaining.any():
        candidates = np.flatnonzero(remaining)
        pick = int(candidates[rng.integers(len(candidates))])
        centers.append(pick)
        covered = index.query(index.cloud.coords[pick], r)
        remaining[covered] = False
        remaining[pick] = False
    return np.asarray(centers, dtype=int)


@dataclass
class Graph:
    """Undirected graph on [0..n_nodes): symmetric edge set, no self-loops."""

    n_nodes: int
    edges: Array = field(default_factory=lambda: np.empty((0, 2), dtype=int))

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=int).reshape(-1, 2)
        if e.size:
            if (e < 0).any() or (e >= self.n_nodes).any():
                raise InvalidInput("edge endpoint out of range")
            lo = e.min(axis=1)
            hi = e.max(axis=1)
            keep = lo != hi  # drop self-loops; duplicate edges are harmless
            e = np.column_stack([lo[keep], hi[keep]])
        self.edges = e


def connected_components(g: Graph) -> Array:
    """1-based component id per node, numbered by smallest contained node."""
    n = g.n_nodes
    if g.edges.size:
        i, j = g.edges[:, 0], g.edges[:, 1]
        data = np.ones(len(i), dtype=np.int8)
        adj = sparse.coo_matrix((data, (i, j)), shape=(n, n))
        _, raw = _cc(adj, directed=False)
    else:
        raw = np.arange(n)
    ids = np.empty(n, dtype=int)
    seen: dict[int, int] = {}
    for node in range(n):
        key = int(raw[node])
        if key not in seen:
            seen[key] = len(seen) + 1
        ids[node] = seen[key]
    return ids


def assign_to_closest_survivor(
    cloud: PointCloud, removed: Array, survivors: Array, survivor_labels: Array
) -> Array:
    """Label each removed point by its nearest survivor (ties: lowest index)."""
    survivors = np.asarray(survivors, dtype=int)
    removed = np.asarray(removed, dtype=int)
    if survivors.size == 0:
        raise NoSurvivors("cannot reassign: no surviving points")
    order = np.argsort(survivors, kind="stable")
    survivors = survivors[order]
    survivor_labels = np.asarray(survivor_labels)[order]
    if removed.size == 0:
        return np.empty(0, dtype=survivor_labels.dtype)
    diff = cloud.coords[removed][:, None, :] - cloud.coords[survivors][None, :, :]
    d2 = (diff * diff).sum(axis=2)
    nearest = d2.argmin(axis=1)  # argmin takes the first minimum: lowest index
    return survivor_labels[nearest]

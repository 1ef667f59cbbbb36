"""Seedable synthetic generators for the benchmark geometries.

Each dataset is a union of K surfaces of common intrinsic dimension d.
Points are sampled uniformly by arclength/area from each surface
(rejection sampling against the parametrization's speed/Jacobian), then
jittered by additive noise drawn uniformly from the ball of radius tau.
Ground-truth labels record the source surface (1-based).

Parametrizations (the figures in the literature show shapes only, so the
exact formulas below are this package's own):

* two_segments(theta):  S1 = [-1,1] x {0};  S2 = {s (cos t, sin t) : |s| <= 1}.
* two_curves_angle(theta):  c(t) = (t, 0.35 t^2), t in [-1,1], and the same
  curve rotated by theta about the origin.  Both bend the same way, so the
  origin is their only crossing for theta in (atan(0.7)/2 .. pi/2].
* three_curves:  y = 4(x-1/2)^2,  y = 1 - 4(x-1/2)^2,  y = 1.2x - 0.2x^2
  on x in [0,1]; the arcs cross pairwise inside the unit square.
* self_intersecting_curves:  the figure-eight c(t) = (sin t, sin t cos t),
  t in [0, 2pi), and its copy rotated by pi/2; each self-intersects at the
  origin and the two curves cross each other.
* two_spheres:  unit spheres centered at the origin and (1.5, 0, 0); they
  meet in a circle.
* mobius_strips:  the standard Mobius embedding
  ((1 + w cos(t/2)) cos t, (1 + w cos(t/2)) sin t, w sin(t/2)),
  t in [0,2pi), w in [-0.3,0.3], and its copy rotated by pi/2 about the
  x-axis.
* monkey_saddle:  z = x^3 - 3xy^2 over [-1,1]^2, plus the plane patch
  z = 0 over the same square.
* paraboloids:  z = +(x^2+y^2)/2 and z = -(x^2+y^2)/2 over the unit disk;
  they touch tangentially at the origin (the hardest instance).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy import integrate, optimize

from .errors import InvalidInput, UnknownDataset
from .neighborhoods import PointCloud

Array = np.ndarray

DATASET_NAMES = (
    "two_segments",
    "three_curves",
    "self_intersecting_curves",
    "two_spheres",
    "mobius_strips",
    "monkey_saddle",
    "paraboloids",
    "two_curves_angle",
)

_ANGLE_DATASETS = {"two_segments", "two_curves_angle"}

CURVE_BEND = 0.35  # quadratic coefficient of the two_curves_angle arcs


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    n_per_cluster: int
    tau: float = 0.0
    angle: float | None = None
    seed: int = 0
    proportional: bool = False

    def __post_init__(self):
        if self.name not in DATASET_NAMES:
            raise UnknownDataset(f"unknown dataset {self.name!r}")
        if self.n_per_cluster < 1:
            raise InvalidInput("n_per_cluster must be >= 1")
        if self.tau < 0:
            raise InvalidInput("tau must be >= 0")
        if self.angle is not None:
            if self.name not in _ANGLE_DATASETS:
                raise InvalidInput(f"{self.name} takes no angle parameter")
            if not 0.0 < self.angle <= math.pi / 2:
                raise InvalidInput("angle must lie in (0, pi/2]")

    @property
    def effective_angle(self) -> float:
        return self.angle if self.angle is not None else math.pi / 2


@dataclass
class Surface:
    """One cluster surface: uniform sampler, exact/numeric distance, measure."""

    sample: Callable[[int, np.random.Generator], Array]
    distance: Callable[[Array], float]
    measure: Callable[[], float]


@dataclass
class Geometry:
    ambient_dim: int
    intrinsic_dim: int
    surfaces: list[Surface] = field(default_factory=list)

    @property
    def n_clusters(self) -> int:
        return len(self.surfaces)


# ---------------------------------------------------------------------------
# sampling helpers

def _rejection_sample_1d(n, rng, t_lo, t_hi, speed, speed_max):
    """Arclength-uniform parameter draws via rejection on the speed."""
    out = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 64)
        t = rng.uniform(t_lo, t_hi, size=m)
        u = rng.uniform(0.0, 1.0, size=m)
        acc = t[u * speed_max <= speed(t)]
        take = min(acc.size, n - filled)
        out[filled:filled + take] = acc[:take]
        filled += take
    return out


def _rejection_sample_2d(n, rng, u_rng, v_rng, jac, jac_max):
    """Area-uniform parameter draws via rejection on the Jacobian norm."""
    out_u = np.empty(n)
    out_v = np.empty(n)
    filled = 0
    while filled < n:
        m = max(2 * (n - filled), 64)
        u = rng.uniform(u_rng[0], u_rng[1], size=m)
        v = rng.uniform(v_rng[0], v_rng[1], size=m)
        z = rng.uniform(0.0, 1.0, size=m)
        keep = z * jac_max <= jac(u, v)
        acc_u, acc_v = u[keep], v[keep]
        take = min(acc_u.size, n - filled)
        out_u[filled:filled + take] = acc_u[:take]
        out_v[filled:filled + take] = acc_v[:take]
        filled += take
    return out_u, out_v


def _segment_distance(p, a, b):
    p = np.asarray(p, float)
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    ab = b - a
    t = float(np.clip(np.dot(p - a, ab) / np.dot(ab, ab), 0.0, 1.0))
    return float(np.linalg.norm(p - (a + t * ab)))


def _curve_distance(p, point_of_t, t_lo, t_hi, grid=2001):
    """min_t ||p - c(t)|| by dense grid search plus bounded polish."""
    ts = np.linspace(t_lo, t_hi, grid)
    pts = point_of_t(ts)
    d2 = ((pts - np.asarray(p, float)) ** 2).sum(axis=1)
    k = int(d2.argmin())
    lo = ts[max(0, k - 1)]
    hi = ts[min(grid - 1, k + 1)]

    def f(t):
        c = point_of_t(np.array([t]))[0]
        return float(((c - p) ** 2).sum())

    res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    return math.sqrt(min(float(res.fun), float(d2[k])))


def _patch_distance(p, point_of_uv, u_rng, v_rng, grid=81):
    """min over a 2-d parameter patch: coarse grid plus L-BFGS-B polish."""
    us = np.linspace(u_rng[0], u_rng[1], grid)
    vs = np.linspace(v_rng[0], v_rng[1], grid)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    pts = point_of_uv(uu.ravel(), vv.ravel())
    d2 = ((pts - np.asarray(p, float)) ** 2).sum(axis=1)
    k = int(d2.argmin())
    u0, v0 = uu.ravel()[k], vv.ravel()[k]

    def f(z):
        c = point_of_uv(np.array([z[0]]), np.array([z[1]]))[0]
        return float(((c - p) ** 2).sum())

    res = optimize.minimize(f, x0=[u0, v0], method="L-BFGS-B",
                            bounds=[u_rng, v_rng],
                            options={"ftol": 1e-16, "gtol": 1e-12})
    return math.sqrt(min(float(res.fun), float(d2[k])))


def _rotation2(theta):
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]])


# ---------------------------------------------------------------------------
# geometry builders

def _segment_surface(a, b):
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    length = float(np.linalg.norm(b - a))

    def sample(n, rng):
        t = rng.uniform(0.0, 1.0, size=n)
        return a[None, :] + t[:, None] * (b - a)[None, :]

    return Surface(sample=sample,
                   distance=lambda p: _segment_distance(p, a, b),
                   measure=lambda: length)


def _plane_curve_surface(xy_of_t, speed_of_t, t_lo, t_hi, speed_max, rotate=None):
    """Curve t -> xy_of_t(t) in the plane, optionally rotated about the origin."""
    rot = None if rotate is None else _rotation2(rotate)

    def point_of_t(t):
        pts = xy_of_t(np.asarray(t, float))
        return pts if rot is None else pts @ rot.T

    def sample(n, rng):
        t = _rejection_sample_1d(n, rng, t_lo, t_hi, speed_of_t, speed_max)
        return point_of_t(t)

    def distance(p):
        return _curve_distance(p, point_of_t, t_lo, t_hi)

    def measure():
        val, _ = integrate.quad(lambda t: float(speed_of_t(np.array([t]))[0]), t_lo, t_hi)
        return float(val)

    return Surface(sample=sample, distance=distance, measure=measure)


def _quadratic_arc(a2, a1, a0, x_lo, x_hi):
    """y = a2 x^2 + a1 x + a0 over [x_lo, x_hi], arclength-uniform."""
    def xy(t):
        t = np.asarray(t, float)
        return np.column_stack([t, a2 * t * t + a1 * t + a0])

    def speed(t):
        t = np.asarray(t, float)
        return np.sqrt(1.0 + (2 * a2 * t + a1) ** 2)

    smax = float(max(speed(np.array([x_lo]))[0], speed(np.array([x_hi]))[0]))
    return xy, speed, smax


def _sphere_surface(center, radius=1.0):
    center = np.asarray(center, float)

    def sample(n, rng):
        u = rng.normal(size=(n, 3))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        return center[None, :] + radius * u

    def distance(p):
        return abs(float(np.linalg.norm(np.asarray(p, float) - center)) - radius)

    return Surface(sample=sample, distance=distance,
                   measure=lambda: 4.0 * math.pi * radius**2)


def _mobius_point(t, w):
    t = np.asarray(t, float)
    w = np.asarray(w, float)
    c1, s1 = np.cos(t), np.sin(t)
    c2, s2 = np.cos(t / 2), np.sin(t / 2)
    rho = 1.0 + w * c2
    return np.column_stack([rho * c1, rho * s1, w * s2])


def _mobius_jacobian(t, w):
    t = np.asarray(t, float)
    w = np.asarray(w, float)
    c1, s1 = np.cos(t), np.sin(t)
    c2, s2 = np.cos(t / 2), np.sin(t / 2)
    rho = 1.0 + w * c2
    dt = np.stack([-rho * s1 - 0.5 * w * s2 * c1,
                   rho * c1 - 0.5 * w * s2 * s1,
                   0.5 * w * c2], axis=-1)
    dw = np.stack([c2 * c1, c2 * s1, s2], axis=-1)
    cross = np.cross(dt, dw)
    return np.linalg.norm(cross, axis=-1)


_MOBIUS_W = 0.3


@lru_cache(maxsize=1)
def _mobius_jac_max():
    t = np.linspace(0.0, 2 * math.pi, 721)
    w = np.linspace(-_MOBIUS_W, _MOBIUS_W, 61)
    tt, ww = np.meshgrid(t, w, indexing="ij")
    return float(_mobius_jacobian(tt.ravel(), ww.ravel()).max()) * 1.001


def _mobius_surface(rotate_x=False):
    rot = np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])

    def point(t, w):
        pts = _mobius_point(t, w)
        return pts @ rot.T if rotate_x else pts

    def sample(n, rng):
        t, w = _rejection_sample_2d(n, rng, (0.0, 2 * math.pi),
                                    (-_MOBIUS_W, _MOBIUS_W),
                                    _mobius_jacobian, _mobius_jac_max())
        return point(t, w)

    def distance(p):
        return _patch_distance(p, point, (0.0, 2 * math.pi), (-_MOBIUS_W, _MOBIUS_W))

    def measure():
        val, _ = integrate.dblquad(
            lambda w, t: float(_mobius_jacobian(np.array([t]), np.array([w]))[0]),
            0.0, 2 * math.pi, -_MOBIUS_W, _MOBIUS_W)
        return float(val)

    return Surface(sample=sample, distance=distance, measure=measure)


def _monkey_saddle_surface():
    def point(x, y):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        return np.column_stack([x, y, x**3 - 3 * x * y * y])

    def jac(x, y):
        fx = 3 * x * x - 3 * y * y
        fy = -6 * x * y
        return np.sqrt(1.0 + fx * fx + fy * fy)

    jmax = math.sqrt(37.0)

    def sample(n, rng):
        x, y = _rejection_sample_2d(n, rng, (-1.0, 1.0), (-1.0, 1.0), jac, jmax)
        return point(x, y)

    def distance(p):
        return _patch_distance(p, point, (-1.0, 1.0), (-1.0, 1.0))

    def measure():
        val, _ = integrate.dblquad(lambda y, x: float(jac(x, y)), -1.0, 1.0, -1.0, 1.0)
        return float(val)

    return Surface(sample=sample, distance=distance, measure=measure)


def _square_plane_surface():
    def sample(n, rng):
        xy = rng.uniform(-1.0, 1.0, size=(n, 2))
        return np.column_stack([xy, np.zeros(n)])

    def distance(p):
        p = np.asarray(p, float)
        cx = float(np.clip(p[0], -1.0, 1.0))
        cy = float(np.clip(p[1], -1.0, 1.0))
        return float(math.sqrt((p[0] - cx) ** 2 + (p[1] - cy) ** 2 + p[2] ** 2))

    return Surface(sample=sample, distance=distance, measure=lambda: 4.0)


def _paraboloid_surface(sign):
    def sample(n, rng):
        # uniform on the unit disk, then rejection on sqrt(1 + rho^2)
        out = np.empty((n, 2))
        filled = 0
        while filled < n:
            m = max(2 * (n - filled), 64)
            rho = np.sqrt(rng.uniform(0.0, 1.0, size=m))
            phi = rng.uniform(0.0, 2 * math.pi, size=m)
            z = rng.uniform(0.0, 1.0, size=m)
            keep = z * math.sqrt(2.0) <= np.sqrt(1.0 + rho * rho)
            xk = np.column_stack([rho[keep] * np.cos(phi[keep]),
                                  rho[keep] * np.sin(phi[keep])])
            take = min(xk.shape[0], n - filled)
            out[filled:filled + take] = xk[:take]
            filled += take
        return np.column_stack([out, sign * 0.5 * (out**2).sum(axis=1)])

    def distance(p):
        # the nearest surface point lies in the meridian plane of p
        p = np.asarray(p, float)
        rho0 = math.hypot(p[0], p[1])
        z0 = p[2]

        def f(s):
            return (s - rho0) ** 2 + (sign * 0.5 * s * s - z0) ** 2

        ss = np.linspace(0.0, 1.0, 2001)
        vals = f(ss)
        k = int(vals.argmin())
        lo, hi = ss[max(0, k - 1)], ss[min(2000, k + 1)]
        res = optimize.minimize_scalar(f, bounds=(lo, hi), method="bounded",
                                       options={"xatol": 1e-12})
        return math.sqrt(min(float(res.fun), float(vals[k])))

    def measure():
        val, _ = integrate.quad(lambda r: 2 * math.pi * r * math.sqrt(1 + r * r), 0.0, 1.0)
        return float(val)

    return Surface(sample=sample, distance=distance, measure=measure)


def _figure_eight_speed(t):
    t = np.asarray(t, float)
    return np.sqrt(np.cos(t) ** 2 + np.cos(2 * t) ** 2)


def _build_geometry(spec: DatasetSpec) -> Geometry:
    name = spec.name
    if name == "two_segments":
        theta = spec.effective_angle
        u = np.array([math.cos(theta), math.sin(theta)])
        return Geometry(2, 1, [
            _segment_surface([-1.0, 0.0], [1.0, 0.0]),
            _segment_surface(-u, u),
        ])
    if name == "two_curves_angle":
        theta = spec.effective_angle
        xy, speed, smax = _quadratic_arc(CURVE_BEND, 0.0, 0.0, -1.0, 1.0)
        return Geometry(2, 1, [
            _plane_curve_surface(xy, speed, -1.0, 1.0, smax),
            _plane_curve_surface(xy, speed, -1.0, 1.0, smax, rotate=theta),
        ])
    if name == "three_curves":
        arcs = [_quadratic_arc(4.0, -4.0, 1.0, 0.0, 1.0),        # y = 4(x-1/2)^2
                _quadratic_arc(-4.0, 4.0, 0.0, 0.0, 1.0),        # y = 1-4(x-1/2)^2
                _quadratic_arc(-0.2, 1.2, 0.0, 0.0, 1.0)]        # y = 1.2x-0.2x^2
        return Geometry(2, 1, [
            _plane_curve_surface(xy, speed, 0.0, 1.0, smax)
            for xy, speed, smax in arcs
        ])
    if name == "self_intersecting_curves":
        def xy(t):
            t = np.asarray(t, float)
            return np.column_stack([np.sin(t), np.sin(t) * np.cos(t)])
        return Geometry(2, 1, [
            _plane_curve_surface(xy, _figure_eight_speed, 0.0, 2 * math.pi, math.sqrt(2.0)),
            _plane_curve_surface(xy, _figure_eight_speed, 0.0, 2 * math.pi, math.sqrt(2.0),
                                 rotate=math.pi / 2),
        ])
    if name == "two_spheres":
        return Geometry(3, 2, [
            _sphere_surface([0.0, 0.0, 0.0]),
            _sphere_surface([1.5, 0.0, 0.0]),
        ])
    if name == "mobius_strips":
        return Geometry(3, 2, [
            _mobius_surface(rotate_x=False),
            _mobius_surface(rotate_x=True),
        ])
    if name == "monkey_saddle":
        return Geometry(3, 2, [
            _monkey_saddle_surface(),
            _square_plane_surface(),
        ])
    if name == "paraboloids":
        return Geometry(3, 2, [
            _paraboloid_surface(+1.0),
            _paraboloid_surface(-1.0),
        ])
    raise UnknownDataset(f"unknown dataset {name!r}")


def _ball_noise(n, dim, tau, rng):
    u = rng.normal(size=(n, dim))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    radii = tau * rng.uniform(0.0, 1.0, size=n) ** (1.0 / dim)
    return u * radii[:, None]


def generate(spec: DatasetSpec) -> PointCloud:
    """Sample the dataset described by ``spec``; deterministic per seed.

    Default: n_per_cluster points on each surface.  With
    spec.proportional, the total K*n_per_cluster points are split
    proportionally to surface measure (multinomial draw).
    """
    geom = _build_geometry(spec)
    rng = np.random.default_rng(spec.seed)
    k = geom.n_clusters
    if spec.proportional:
        weights = np.array([s.measure() for s in geom.surfaces])
        counts = rng.multinomial(spec.n_per_cluster * k, weights / weights.sum())
        counts = np.maximum(counts, 1)
    else:
        counts = np.full(k, spec.n_per_cluster)
    parts = [geom.surfaces[i].sample(int(counts[i]), rng) for i in range(k)]
    coords = np.vstack(parts)
    labels = np.repeat(np.arange(1, k + 1), counts)
    if spec.tau > 0:
        coords = coords + _ball_noise(coords.shape[0], geom.ambient_dim, spec.tau, rng)
    return PointCloud(coords=coords, labels=labels, seed=spec.seed,
                      intrinsic_dim=geom.intrinsic_dim, n_clusters=k)


def global_radius(cloud: PointCloud) -> float:
    """Largest distance from the cloud centroid to any point."""
    center = cloud.coords.mean(axis=0)
    return float(np.linalg.norm(cloud.coords - center, axis=1).max())


def distance_to_surface(point: Array, surface_id: int, spec: DatasetSpec) -> float:
    """Distance from ``point`` to surface ``surface_id`` (1-based) of ``spec``."""
    geom = _build_geometry(spec)
    if not 1 <= surface_id <= geom.n_clusters:
        raise InvalidInput(f"surface_id {surface_id} out of range")
    return float(geom.surfaces[surface_id - 1].distance(np.asarray(point, float)))


def surface_count(spec: DatasetSpec) -> int:
    return _build_geometry(spec).n_clusters


def cluster_count(name: str) -> int:
    return _build_geometry(DatasetSpec(name, 1)).n_clusters


def intrinsic_dim(spec: DatasetSpec) -> int:
    return _build_geometry(spec).intrinsic_dim


def ambient_dim(spec: DatasetSpec) -> int:
    return _build_geometry(spec).ambient_dim

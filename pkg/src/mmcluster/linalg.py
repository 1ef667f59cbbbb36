"""Dense symmetric linear algebra primitives.

Conventions: eigenvalues are sorted in descending order, eigenvectors are
column-aligned with them, and every eigenvector is flipped so that its
first nonzero component is positive.  This makes all downstream results
reproducible for a given input matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInput, SingularCovariance

Array = np.ndarray

# Eigenvector components below this are treated as zero by the sign rule.
_SIGN_TOL = 1e-9


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: Array   # (D,), nonincreasing
    eigenvectors: Array  # (D, D), columns aligned with eigenvalues

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]


def symmetrize(m: Array) -> Array:
    """Return the symmetric part (m + m.T)/2 as float64."""
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInput(f"expected a square matrix, got shape {m.shape}")
    return 0.5 * (m + m.T)


def _check_finite(m: Array) -> Array:
    m = symmetrize(m)
    if not np.all(np.isfinite(m)):
        raise InvalidInput("matrix has non-finite entries")
    return m


def eigh(m: Array) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, descending, sign-fixed."""
    m = _check_finite(m)
    vals, vecs = np.linalg.eigh(m)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1].copy()
    for k in range(vecs.shape[1]):
        col = vecs[:, k]
        nz = np.abs(col) > _SIGN_TOL
        if not nz.any():
            continue
        if col[np.argmax(nz)] < 0:
            vecs[:, k] = -col
    return EigenDecomposition(eigenvalues=vals, eigenvectors=vecs)


def spectral_norms(ms: Array) -> Array:
    """Spectral norms of a stack (..., D, D) of symmetric matrices.

    The 2x2 case uses the closed-form eigenvalues; larger sizes go through
    batched ``eigvalsh``.  Both routes are cross-checked in the tests.
    """
    ms = np.asarray(ms, dtype=float)
    d = ms.shape[-1]
    if d == 2:
        a = ms[..., 0, 0]
        b = ms[..., 0, 1]
        c = ms[..., 1, 1]
        mid = 0.5 * (a + c)
        rad = np.hypot(0.5 * (a - c), b)
        return np.abs(mid) + rad
    return np.abs(np.linalg.eigvalsh(ms)).max(axis=-1)


def spectral_norm(m: Array) -> float:
    """Largest absolute eigenvalue of a symmetric matrix."""
    m = _check_finite(m)
    return float(spectral_norms(m[None])[0])


def frobenius_norm(m: Array) -> float:
    m = _check_finite(m)
    return float(np.sqrt((m * m).sum()))


def matrix_diff_norm(a: Array, b: Array, norm: str = "spectral") -> float:
    """Norm of a - b under the selected mode ('spectral' or 'frobenius')."""
    if norm == "spectral":
        return spectral_norm(np.asarray(a, float) - np.asarray(b, float))
    if norm == "frobenius":
        return frobenius_norm(np.asarray(a, float) - np.asarray(b, float))
    raise InvalidInput(f"unknown norm mode {norm!r}")


def projection_onto_top_d(e: EigenDecomposition, d: int) -> Array:
    """Orthogonal projection onto the span of the top ``d`` eigenvectors."""
    dim = e.dim
    if not 1 <= d <= dim:
        raise InvalidInput(f"d={d} out of range for dimension {dim}")
    v = e.eigenvectors[:, :d]
    return symmetrize(v @ v.T)


def degenerate_gap(e: EigenDecomposition, d: int, tol: float = 1e-12) -> bool:
    """True when the eigen-gap below position ``d`` vanishes (diagnostic)."""
    if d >= e.dim:
        return False
    return bool(e.eigenvalues[d - 1] - e.eigenvalues[d] <= tol)


def is_projection(m: Array, tol: float = 1e-8) -> bool:
    m = symmetrize(m)
    return bool(spectral_norm(m @ m - m) <= tol)


def projection_rank(m: Array) -> int:
    return int(round(float(np.trace(np.asarray(m, float)))))


def _orthonormal_range(p: Array) -> Array:
    """Orthonormal basis (columns) of the range of a projection matrix."""
    e = eigh(p)
    rank = projection_rank(p)
    return e.eigenvectors[:, :rank]


def principal_angles(p: Array, q: Array) -> Array:
    """Principal angles between the ranges of two orthogonal projections.

    Returns min(rank p, rank q) angles in [0, pi/2], sorted descending
    (theta_1 >= theta_2 >= ...), computed from the singular values of the
    cross-basis product with clamping before arccos.
    """
    for m in (p, q):
        if not is_projection(m):
            raise InvalidInput("principal_angles expects orthogonal projection matrices")
    u = _orthonormal_range(symmetrize(p))
    v = _orthonormal_range(symmetrize(q))
    if u.shape[1] < 1 or v.shape[1] < 1:
        raise InvalidInput("projections must have rank >= 1")
    s = np.linalg.svd(u.T @ v, compute_uv=False)
    s = np.clip(s, -1.0, 1.0)
    return np.arccos(np.sort(s))


def _regularize_pd(c: Array, reg: float) -> Array:
    """Add the ridge and verify strict positive definiteness."""
    c = _check_finite(c)
    if reg:
        c = c + reg * np.eye(c.shape[0])
    w = np.linalg.eigvalsh(c)
    if w[-1] <= 0 or w[0] <= 1e-14 * w[-1]:
        raise SingularCovariance("covariance is singular after regularization")
    return c


def hellinger_distance(ci: Array, cj: Array, reg: float = 0.0) -> float:
    """Hellinger distance between N(0, ci) and N(0, cj) for full-rank inputs.

    ``reg`` is an absolute ridge added to both matrices before the
    determinants are taken (callers use lambda * r^2).
    """
    ci = _regularize_pd(ci, reg)
    cj = _regularize_pd(cj, reg)
    if ci.shape != cj.shape:
        raise InvalidInput("covariance dimensions differ")
    d = ci.shape[0]
    log_det_i = float(np.linalg.slogdet(ci)[1])
    log_det_j = float(np.linalg.slogdet(cj)[1])
    sign, log_det_sum = np.linalg.slogdet(ci + cj)
    if sign <= 0:
        raise SingularCovariance("sum of covariances is not positive definite")
    bc = np.exp(0.5 * d * np.log(2.0) + 0.25 * (log_det_i + log_det_j) - 0.5 * log_det_sum)
    return float(np.sqrt(max(0.0, 1.0 - bc)))


def inv_sqrt(c: Array, reg: float = 0.0) -> Array:
    """Symmetric PSD inverse square root, with optional absolute ridge."""
    e = eigh(_regularize_pd(c, reg))
    w = 1.0 / np.sqrt(e.eigenvalues)
    return symmetrize(e.eigenvectors @ np.diag(w) @ e.eigenvectors.T)


def mahalanobis_avg(ci: Array, cj: Array, xi: Array, xj: Array, reg: float = 0.0) -> float:
    """Average Mahalanobis distance between two points under two covariances."""
    xi = np.asarray(xi, float)
    xj = np.asarray(xj, float)
    diff = xi - xj
    a = np.linalg.norm(inv_sqrt(ci, reg) @ diff)
    b = np.linalg.norm(inv_sqrt(cj, reg) @ (-diff))
    return float(a + b)

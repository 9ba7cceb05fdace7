"""Intrinsic Riemannian geometry of a chart-level metric field.

Everything here is a pure function of (metric source, point).  A metric
source is any object exposing ``dim`` and ``derivs(x) -> (g, dg, d2g)``
where ``dg[k,i,j]`` and ``d2g[k,l,i,j]`` are first and second coordinate
partials of the matrix entries; :class:`MetricField` evaluates expression
entries as jets, and induced metrics of immersions provide the same surface.

Index conventions, fixed once for the whole package:

* Christoffel symbols ``Gamma[k,i,j]`` carry the upper index first.
* The curvature tensor is stored as ``R[i,j,k,l] = g(R(d_i,d_j)d_k, d_l)``
  so the sectional-curvature numerator is the contraction of ``R`` with
  ``(X, Y, Y, X)``.
* The Laplacian uses the geometer's sign, the negative of the trace of the
  Hessian: on a flat chart ``lap(psi) = -sum_i d2psi/dx_i^2``.  Every
  warped-product identity downstream balances under this convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as dsl
from .errors import (DegenerateMetricError, DegeneratePlaneError,
                     DependentSeedsError)
from .jets import DomainBox, Jet3, Point, as_point, jet_var

GS_PIVOT_THRESHOLD = 1e-12
PLANE_GRAM_THRESHOLD = 1e-12


# ---------------------------------------------------------------------------
# Metric sources
# ---------------------------------------------------------------------------


@dataclass
class MetricField:
    """Symmetric matrix of expressions g_ij over a coordinate chart."""

    dim: int
    entries: list  # dim x dim nested list of Expr, symmetric
    domain: DomainBox | None = None
    params: tuple[float, ...] = ()
    name: str = ""

    def __post_init__(self):
        n = self.dim
        if len(self.entries) != n or any(len(row) != n for row in self.entries):
            raise ValueError(f"metric entries must form a {n}x{n} matrix")

    @classmethod
    def from_strings(cls, rows: Sequence[Sequence[str]], domain: DomainBox | None = None,
                     params: tuple[float, ...] = (), n_params: int = 0,
                     name: str = "") -> "MetricField":
        n = len(rows)
        entries = [[dsl.parse(s, n, n_params or len(params)) for s in row] for row in rows]
        return cls(n, entries, domain=domain, params=tuple(params), name=name)

    def entry_jets(self, x: Point) -> list[list[Jet3]]:
        x = as_point(x)
        seeds = [jet_var(i, x) for i in range(self.dim)]
        out: list[list[Jet3]] = [[None] * self.dim for _ in range(self.dim)]
        for i in range(self.dim):
            for j in range(i, self.dim):
                jet = dsl.eval_jets(self.entries[i][j], seeds, self.params)
                out[i][j] = jet
                out[j][i] = jet
        return out

    def derivs(self, x: Point) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = self.dim
        jets_ = self.entry_jets(x)
        g = np.empty((n, n))
        dg = np.empty((n, n, n))
        d2g = np.empty((n, n, n, n))
        for i in range(n):
            for j in range(n):
                jet = jets_[i][j]
                g[i, j] = jet.value
                dg[:, i, j] = jet.d1
                d2g[:, :, i, j] = jet.d2
        return g, dg, d2g

    def value(self, x: Point) -> np.ndarray:
        n = self.dim
        x = as_point(x)
        g = np.empty((n, n))
        for i in range(n):
            for j in range(i, n):
                v = dsl.eval_expr(self.entries[i][j], x, self.params).value
                g[i, j] = g[j, i] = v
        return g

    def symmetry_residual(self, x: Point) -> float:
        g = np.empty((self.dim, self.dim))
        for i in range(self.dim):
            for j in range(self.dim):
                g[i, j] = dsl.eval_expr(self.entries[i][j], x, self.params).value
        return float(np.max(np.abs(g - g.T)))

    def validate_at(self, points: Sequence[Point]) -> None:
        """Check symmetry and positive definiteness at the given sample points."""
        for x in points:
            if self.symmetry_residual(x) > 1e-10:
                raise DegenerateMetricError(f"metric not symmetric at {x}")
            metric_value_checked(self, x)


@dataclass
class SlicedMetric:
    """Coordinate-block restriction of a metric source.

    Evaluates the base metric at a full chart point whose off-block
    coordinates are frozen, then keeps only in-block entries and in-block
    derivative directions.  This is how leaf-factor operators (gradient,
    Laplacian of the warping function) are computed on induced metrics.
    """

    base: object
    axes: tuple[int, ...]
    anchor: np.ndarray  # full chart point supplying the frozen coordinates

    @property
    def dim(self) -> int:
        return len(self.axes)

    def _full(self, x_sub: Point) -> np.ndarray:
        full = np.array(self.anchor, dtype=float)
        full[list(self.axes)] = x_sub
        return full

    def derivs(self, x_sub: Point):
        g, dg, d2g = self.base.derivs(self._full(x_sub))
        ix = list(self.axes)
        return (g[np.ix_(ix, ix)], dg[np.ix_(ix, ix, ix)],
                d2g[np.ix_(ix, ix, ix, ix)])

    def value(self, x_sub: Point) -> np.ndarray:
        ix = list(self.axes)
        return self.base.value(self._full(x_sub))[np.ix_(ix, ix)]


def metric_value_checked(g_like, x: Point) -> np.ndarray:
    """Metric matrix at x, verified positive definite (all leading minors > 0)."""
    g = g_like.value(x)
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError(
            f"metric not positive definite at {np.asarray(x)}") from None
    return g


# ---------------------------------------------------------------------------
# Connection and curvature
# ---------------------------------------------------------------------------


def christoffel(g_like, x: Point) -> np.ndarray:
    """Levi-Civita connection coefficients Gamma[k,i,j] at x."""
    g, dg, _ = g_like.derivs(x)
    return _christoffel_from(g, dg, x)


def _inverse_checked(g: np.ndarray, x) -> np.ndarray:
    try:
        np.linalg.cholesky(g)
    except np.linalg.LinAlgError:
        raise DegenerateMetricError(
            f"metric not positive definite at {np.asarray(x)}") from None
    return np.linalg.inv(g)


def _christoffel_from(g: np.ndarray, dg: np.ndarray, x) -> np.ndarray:
    ginv = _inverse_checked(g, x)
    low = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg)
                 - np.einsum("kij->kij", dg))
    return np.einsum("kl,lij->kij", ginv, low)


def curvature_components(g_like, x: Point) -> np.ndarray:
    """Covariant curvature R[i,j,k,l] = g(R(d_i,d_j)d_k, d_l) in chart coordinates."""
    g, dg, d2g = g_like.derivs(x)
    ginv = _inverse_checked(g, x)

    low = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", ginv, low)

    # d_m Gamma^l_ij = d_m(g^lk) Gamma_kij + g^lk d_m Gamma_kij
    dginv = -np.einsum("la,mab,bk->mlk", ginv, dg, ginv)
    dlow = 0.5 * (np.einsum("mijk->mkij", d2g) + np.einsum("mjik->mkij", d2g)
                  - np.einsum("mkij->mkij", d2g))
    dgamma = (np.einsum("mlk,kij->mlij", dginv, low)
              + np.einsum("lk,mkij->mlij", ginv, dlow))

    # R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
    r_up = (np.einsum("iljk->lkij", dgamma) - np.einsum("jlik->lkij", dgamma)
            + np.einsum("lim,mjk->lkij", gamma, gamma)
            - np.einsum("ljm,mik->lkij", gamma, gamma))
    return np.einsum("lm,mkij->ijkl", g, r_up)


@dataclass
class Curvature4:
    """Fully covariant curvature tensor at a point, in a tagged basis."""

    point: np.ndarray
    comp: np.ndarray  # shape (n, n, n, n)
    basis: str = "coordinate"  # or "frame"

    def symmetry_residuals(self) -> dict[str, float]:
        r = self.comp
        return {
            "antisymmetry_first_pair": float(np.max(np.abs(r + r.transpose(1, 0, 2, 3)))),
            "antisymmetry_second_pair": float(np.max(np.abs(r + r.transpose(0, 1, 3, 2)))),
            "pair_symmetry": float(np.max(np.abs(r - r.transpose(2, 3, 0, 1)))),
            "first_bianchi": float(np.max(np.abs(
                r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)))),
        }

    def max_symmetry_residual(self) -> float:
        return max(self.symmetry_residuals().values())


def curvature(g_like, x: Point) -> Curvature4:
    return Curvature4(np.array(as_point(x)), curvature_components(g_like, x),
                      basis="coordinate")


def sectional(g_like, x: Point, X, Y) -> float:
    """Sectional curvature of span(X, Y); invariant under GL(2) changes of the pair."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    g = g_like.value(x)
    gxx = X @ g @ X
    gyy = Y @ g @ Y
    gxy = X @ g @ Y
    den = gxx * gyy - gxy * gxy
    if den <= PLANE_GRAM_THRESHOLD:
        raise DegeneratePlaneError(f"vectors do not span a 2-plane at {x}")
    r4 = curvature_components(g_like, x)
    num = np.einsum("ijkl,i,j,k,l->", r4, X, Y, Y, X)
    return float(num / den)


def frame_curvature(r4: np.ndarray, columns: np.ndarray) -> np.ndarray:
    """Contract a coordinate curvature tensor into a frame given by columns."""
    return np.einsum("ijkl,ia,jb,kc,ld->abcd", r4, columns, columns, columns, columns)


def scalar_curvature(g_like, x: Point) -> float:
    """Sum of sectional curvatures over orthonormal frame pairs (frame independent)."""
    frame = orthonormal_frame(g_like, x)
    r4 = curvature_components(g_like, x)
    rf = frame_curvature(r4, frame.columns)
    n = g_like.dim
    total = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            total += rf[i, j, j, i]
    return float(total)


# ---------------------------------------------------------------------------
# Gradient and Laplacian
# ---------------------------------------------------------------------------


def _psi_jet(g_like, psi, x: Point, params) -> Jet3:
    if isinstance(psi, Jet3):
        return psi
    return dsl.eval_expr(psi, x, params)


def gradient(g_like, psi, x: Point, params: Sequence[float] = ()) -> np.ndarray:
    """Gradient vector: the metric dual of d(psi), so g(grad psi, X) = X psi."""
    j = _psi_jet(g_like, psi, x, params)
    g, _, _ = g_like.derivs(x)
    return _inverse_checked(g, x) @ j.d1


def grad_norm_sq(g_like, psi, x: Point, params: Sequence[float] = ()) -> float:
    j = _psi_jet(g_like, psi, x, params)
    g, _, _ = g_like.derivs(x)
    return float(j.d1 @ _inverse_checked(g, x) @ j.d1)


def laplacian(g_like, psi, x: Point, params: Sequence[float] = ()) -> float:
    """Geometer's-sign Laplacian: the negative of the metric trace of the Hessian.

    Flat chart: lap(x1^2) = -2.
    """
    j = _psi_jet(g_like, psi, x, params)
    g, dg, _ = g_like.derivs(x)
    ginv = _inverse_checked(g, x)
    low = 0.5 * (np.einsum("ijk->kij", dg) + np.einsum("jik->kij", dg) - dg)
    gamma = np.einsum("kl,lij->kij", ginv, low)
    return float(np.einsum("ij,kij,k->", ginv, gamma, j.d1)
                 - np.einsum("ij,ij->", ginv, j.d2))


# ---------------------------------------------------------------------------
# Orthonormal frames
# ---------------------------------------------------------------------------


@dataclass
class OrthoFrame:
    """Columns orthonormal against a metric at a base point."""

    point: np.ndarray
    columns: np.ndarray  # shape (dim, k); column i is the i-th frame vector

    @property
    def k(self) -> int:
        return self.columns.shape[1]

    def gram_residual(self, g: np.ndarray) -> float:
        gram = self.columns.T @ g @ self.columns
        return float(np.max(np.abs(gram - np.eye(self.k))))


def gram_schmidt(g: np.ndarray, seeds: np.ndarray,
                 threshold: float = GS_PIVOT_THRESHOLD) -> np.ndarray:
    """Modified Gram-Schmidt against inner product g, preserving seed order.

    Raises DependentSeedsError when a seed's residual norm falls below the
    threshold.  Deterministic for fixed input.
    """
    n, k = seeds.shape
    cols = np.zeros((n, 0))
    for j in range(k):
        v = seeds[:, j].astype(float).copy()
        for _ in range(2):  # re-orthogonalize once for float stability
            for i in range(cols.shape[1]):
                v -= (cols[:, i] @ g @ v) * cols[:, i]
        nrm = float(np.sqrt(max(v @ g @ v, 0.0)))
        if nrm < threshold:
            raise DependentSeedsError(f"seed {j} is dependent on earlier seeds")
        cols = np.column_stack([cols, v / nrm])
    return cols


def orthonormal_frame(g_like, x: Point, seeds: np.ndarray | None = None) -> OrthoFrame:
    """Frame of the whole tangent space at x, Gram-Schmidt over the seeds
    (coordinate directions by default)."""
    x = as_point(x)
    g = metric_value_checked(g_like, x)
    if seeds is None:
        seeds = np.eye(g_like.dim)
    return OrthoFrame(np.array(x), gram_schmidt(g, np.asarray(seeds, dtype=float)))

"""Warped-product metrics g = g1 + f^2 g2 and the mixed-sectional identity.

The identity checked here ties the sum of sectional curvatures over mixed
leaf/fiber planes to the leaf Laplacian of the warping function:

    sum_{a <= n1 < A} K(e_a ^ e_A) = n2 * lap(f) / f

with the geometer's-sign Laplacian taken on the leaf factor.  Both sides are
computed numerically and the residual is reported; the hyperbolic-plane and
round-sphere presentations pin the sign convention (both sides -1 and +1
respectively).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import expr as dsl
from . import jets
from .errors import InvalidWarpingError
from .jets import DomainBox, ExcludedBall, Point, as_point
from .riemann import (MetricField, christoffel, curvature_components,
                      frame_curvature, laplacian, orthonormal_frame)


def _expr_is_constant(e) -> bool:
    if isinstance(e, dsl.Var):
        return False
    if isinstance(e, (dsl.Num, dsl.Param)):
        return True
    if isinstance(e, dsl.Neg):
        return _expr_is_constant(e.arg)
    if isinstance(e, dsl.BinOp):
        return _expr_is_constant(e.left) and _expr_is_constant(e.right)
    if isinstance(e, dsl.Call):
        return _expr_is_constant(e.arg)
    raise TypeError(f"not an expression node: {e!r}")


def _expr_max_var(e) -> int:
    """Largest 0-based variable index used, or -1."""
    if isinstance(e, dsl.Var):
        return e.index
    if isinstance(e, (dsl.Num, dsl.Param)):
        return -1
    if isinstance(e, dsl.Neg):
        return _expr_max_var(e.arg)
    if isinstance(e, dsl.BinOp):
        return max(_expr_max_var(e.left), _expr_max_var(e.right))
    if isinstance(e, dsl.Call):
        return _expr_max_var(e.arg)
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


@dataclass
class WarpedMetric:
    """Block metric g1 + f^2 g2 on the product chart (leaf coords first)."""

    g1: MetricField
    g2: MetricField
    f: object  # Expr over the leaf chart
    assembled: MetricField
    name: str = ""

    @property
    def n1(self) -> int:
        return self.g1.dim

    @property
    def n2(self) -> int:
        return self.g2.dim

    @property
    def dim(self) -> int:
        return self.n1 + self.n2

    @property
    def is_trivial(self) -> bool:
        """Trivial warped product: constant warping function."""
        return _expr_is_constant(self.f)

    def geometry(self) -> "WarpedGeometry":
        return WarpedGeometry(metric=self.assembled, n1=self.n1, n2=self.n2,
                              f=self.f, params=self.assembled.params,
                              leaf_factory=lambda x: self.g1)

    def validate_at(self, points: Sequence[Point]) -> None:
        self.assembled.validate_at(points)
        for x in points:
            f_val = dsl.eval_expr(self.f, as_point(x)[: self.n1],
                                  self.assembled.params).value
            if f_val <= 0.0:
                raise InvalidWarpingError(f"warping function {f_val} <= 0 at {x}")


def _product_domain(d1: DomainBox | None, d2: DomainBox | None,
                    n1: int) -> DomainBox | None:
    if d1 is None or d2 is None:
        return None
    balls = []
    for b in d1.balls:
        axes = b.axes if b.axes is not None else tuple(range(len(d1.lo)))
        balls.append(ExcludedBall(b.center, b.radius, axes))
    for b in d2.balls:
        axes = b.axes if b.axes is not None else tuple(range(len(d2.lo)))
        balls.append(ExcludedBall(b.center, b.radius, tuple(a + n1 for a in axes)))
    return DomainBox(lo=d1.lo + d2.lo, hi=d1.hi + d2.hi, balls=tuple(balls))


def assemble(g1: MetricField, g2: MetricField, f,
             validate_points: Sequence[Point] = (), name: str = "") -> WarpedMetric:
    """Build the product-chart metric with leaf block g1 and fiber block f^2 g2.

    ``f`` must involve only leaf coordinates; fiber entries are re-indexed
    into the product chart.  Any supplied validation points are checked for
    f > 0 and positive definiteness.
    """
    n1, n2 = g1.dim, g2.dim
    if _expr_max_var(f) >= n1:
        raise InvalidWarpingError("warping function may only use leaf coordinates")
    n = n1 + n2
    zero = dsl.const(0.0)
    f_sq = dsl.BinOp("*", f, f)
    entries = [[zero] * n for _ in range(n)]
    for i in range(n1):
        for j in range(n1):
            entries[i][j] = g1.entries[i][j]
    for i in range(n2):
        for j in range(n2):
            shifted = dsl.shift_vars(g2.entries[i][j], n1)
            entries[n1 + i][n1 + j] = dsl.BinOp("*", f_sq, shifted)
    params = tuple(g1.params) or tuple(g2.params)
    assembled = MetricField(n, entries, domain=_product_domain(g1.domain, g2.domain, n1),
                            params=params, name=name or f"warped({g1.name},{g2.name})")
    w = WarpedMetric(g1=g1, g2=g2, f=f, assembled=assembled, name=name)
    if len(validate_points):
        w.validate_at(validate_points)
    return w


# ---------------------------------------------------------------------------
# Warped geometry view (shared by assembled metrics and warped immersions)
# ---------------------------------------------------------------------------


@dataclass
class WarpedGeometry:
    """What the identity checks need: the total metric, the block split and f.

    ``leaf_factory(x)`` returns a metric source of dimension n1 evaluable at
    leaf points; for induced metrics it freezes the fiber coordinates of x.
    """

    metric: object
    n1: int
    n2: int
    f: object
    params: tuple
    leaf_factory: Callable[[Point], object]


@dataclass(frozen=True)
class LeafScalars:
    """Leaf-factor quantities entering the identities and inequalities."""

    f_value: float
    lap_f: float            # geometer's sign
    grad_f: np.ndarray      # leaf gradient vector of f
    grad_lnf_sq: float
    lap_lnf: float


def _as_geometry(w) -> WarpedGeometry:
    return w.geometry() if isinstance(w, WarpedMetric) else w


def leaf_scalars(geom: WarpedGeometry | WarpedMetric, x: Point) -> LeafScalars:
    geom = _as_geometry(geom)
    x = as_point(x)
    x_leaf = x[: geom.n1]
    leaf = geom.leaf_factory(x)
    f_jet = dsl.eval_expr(geom.f, x_leaf, geom.params)
    if f_jet.value <= 0.0:
        raise InvalidWarpingError(f"warping function {f_jet.value} <= 0 at {x}")
    lnf_jet = jets.ln(f_jet)
    g_leaf, _, _ = leaf.derivs(x_leaf)
    ginv = np.linalg.inv(g_leaf)
    return LeafScalars(
        f_value=f_jet.value,
        lap_f=laplacian(leaf, f_jet, x_leaf),
        grad_f=ginv @ f_jet.d1,
        grad_lnf_sq=float(lnf_jet.d1 @ ginv @ lnf_jet.d1),
        lap_lnf=laplacian(leaf, lnf_jet, x_leaf),
    )


def adapted_frame(geom: WarpedGeometry | WarpedMetric, x: Point):
    """Orthonormal frame whose first n1 vectors span the leaf block.

    Coordinate seeds stay inside their blocks because the metric is
    block-diagonal, so plain Gram-Schmidt already yields an adapted frame.
    """
    return orthonormal_frame(_as_geometry(geom).metric, x)


def adapted_block_residual(columns: np.ndarray, n1: int) -> float:
    """Max magnitude of frame components leaking into the other block."""
    a = np.max(np.abs(columns[n1:, :n1])) if columns.shape[0] > n1 else 0.0
    b = np.max(np.abs(columns[:n1, n1:])) if columns.shape[1] > n1 else 0.0
    return float(max(a, b))


def mixed_sectional_sum(geom: WarpedGeometry | WarpedMetric, x: Point) -> float:
    """Sum of sectional curvatures over all mixed leaf/fiber frame planes."""
    geom = _as_geometry(geom)
    frame = adapted_frame(geom, x)
    r4 = curvature_components(geom.metric, x)
    rf = frame_curvature(r4, frame.columns)
    n, n1 = geom.n1 + geom.n2, geom.n1
    total = 0.0
    for a in range(n1):
        for big_a in range(n1, n):
            total += rf[a, big_a, big_a, a]
    return float(total)


def warping_identity_residual(geom: WarpedGeometry | WarpedMetric,
                              x: Point) -> dict[str, float]:
    """Both sides of the mixed-sectional identity and their difference."""
    geom = _as_geometry(geom)
    lhs = mixed_sectional_sum(geom, x)
    sc = leaf_scalars(geom, x)
    rhs = geom.n2 * sc.lap_f / sc.f_value
    return {"lhs": lhs, "rhs": rhs, "residual": abs(lhs - rhs)}


def block_second_form_residuals(geom: WarpedGeometry | WarpedMetric,
                                x: Point) -> dict[str, float]:
    """Intrinsic second fundamental forms of the blocks inside the product.

    Leaves must be totally geodesic: the fiber components Gamma[A,a,b] of the
    assembled connection vanish.  Fibers must be totally umbilical with shape
    term -(g(Z,W)/f) grad f: Gamma[a,A,B] equals -(g_AB/f) (grad_leaf f)^a.
    """
    geom = _as_geometry(geom)
    x = as_point(x)
    n1 = geom.n1
    n = n1 + geom.n2
    gam = christoffel(geom.metric, x)
    g, _, _ = geom.metric.derivs(x)
    sc = leaf_scalars(geom, x)

    leaf_geodesic = float(np.max(np.abs(gam[n1:n, :n1, :n1])))
    expected = -np.einsum("AB,a->aAB", g[n1:, n1:], sc.grad_f) / sc.f_value
    fiber_umbilic = float(np.max(np.abs(gam[:n1, n1:, n1:] - expected)))
    return {"leaf_geodesic": leaf_geodesic, "fiber_umbilical_shape": fiber_umbilic}

"""Extrinsic geometry of an immersion: induced metric, adapted frames, second
fundamental form, shape operator, curvature-equation residuals and
classification predicates.

The induced metric is evaluated by composing the ambient metric entries with
the immersion in jet arithmetic, so its first and second derivatives (and
hence its intrinsic curvature) are exact to float round-off.  The Gauss
equation residual therefore transitively validates the jet substrate, the
connection, both curvature paths and the second fundamental form at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import expr as dsl
from .errors import (ConfigurationError, ImmersionDegenerateError,
                     InvalidNormalError)
from .jets import DomainBox, Jet3, Point, as_point, differentiate, jet_var
from .report import CheckReport
from .riemann import (MetricField, SlicedMetric, christoffel,
                      curvature_components, frame_curvature, gram_schmidt,
                      metric_value_checked, scalar_curvature)
from .structures import AlmostComplexStructure, AlmostContactStructure
from .warped import WarpedGeometry

RANK_THRESHOLD = 1e-8
NORMAL_COMPLETION_THRESHOLD = 1e-8
NULL_SPACE_THRESHOLD = 1e-8
CLASSIFY_TOL = 1e-7


# ---------------------------------------------------------------------------
# Immersion and induced metric
# ---------------------------------------------------------------------------


@dataclass
class WarpedDecl:
    """Marks the sub chart as a warped product: leaf coordinates first."""

    n1: int
    n2: int
    f: object                      # Expr over the leaf coordinates
    g2: MetricField | None = None  # declared fiber metric (identity if omitted)


@dataclass
class Immersion:
    """Smooth map from a submanifold chart into an ambient chart metric."""

    dim: int
    components: list               # ambient_dim Exprs over the sub chart
    ambient: MetricField
    structure: AlmostComplexStructure | AlmostContactStructure | None = None
    warped: WarpedDecl | None = None
    domain: DomainBox | None = None
    params: tuple[float, ...] = ()
    name: str = ""

    @property
    def ambient_dim(self) -> int:
        return self.ambient.dim

    def component_jets(self, x: Point) -> list[Jet3]:
        x = as_point(x)
        seeds = [jet_var(i, x) for i in range(self.dim)]
        return [dsl.eval_jets(c, seeds, self.params) for c in self.components]

    def map_point(self, x: Point) -> np.ndarray:
        x = as_point(x)
        return np.array([dsl.eval_expr(c, x, self.params).value
                         for c in self.components])

    def jacobian(self, x: Point) -> np.ndarray:
        jets_ = self.component_jets(x)
        return np.array([j.d1 for j in jets_])  # shape (m, n)


@dataclass
class InducedMetric:
    """Pullback of the ambient metric through the immersion (metric source)."""

    im: Immersion

    @property
    def dim(self) -> int:
        return self.im.dim

    def entry_jets(self, x: Point) -> list[list[Jet3]]:
        im = self.im
        n, m = im.dim, im.ambient_dim
        phi = im.component_jets(x)
        dphi = [[differentiate(phi[k], i) for i in range(n)] for k in range(m)]
        amb = [[None] * m for _ in range(m)]
        for k in range(m):
            for l in range(k, m):
                amb[k][l] = dsl.eval_jets(im.ambient.entries[k][l], phi,
                                          im.ambient.params)
                amb[l][k] = amb[k][l]
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                acc = None
                for k in range(m):
                    for l in range(m):
                        term = amb[k][l] * dphi[k][i] * dphi[l][j]
                        acc = term if acc is None else acc + term
                out[i][j] = acc
                out[j][i] = acc
        return out

    def derivs(self, x: Point):
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
        im = self.im
        jac = im.jacobian(x)
        g_amb = im.ambient.value(im.map_point(x))
        return jac.T @ g_amb @ jac


def induced_metric(im: Immersion) -> InducedMetric:
    """Pullback metric; positive definite wherever the rank condition holds."""
    return InducedMetric(im)


# ---------------------------------------------------------------------------
# Second fundamental form
# ---------------------------------------------------------------------------


@dataclass
class SFFData:
    """Adapted frames and second-fundamental-form data at a point.

    ``tangent_frame`` columns are sub-chart vectors orthonormal for the
    induced metric (leaf block first when a warped split is declared);
    ``normal_frame`` columns are ambient vectors.  ``h_coord`` holds the
    normal-valued form on coordinate fields, ``h_frame`` on the orthonormal
    tangent frame; ``coeffs[r, i, j]`` are its components in the normal frame.
    """

    point: np.ndarray
    ambient_point: np.ndarray
    g_induced: np.ndarray          # (n, n)
    g_ambient: np.ndarray          # (m, m)
    jacobian: np.ndarray           # (m, n)
    tangent_frame: np.ndarray      # (n, n) columns, sub-chart coords
    tangent_ambient: np.ndarray    # (m, n) frame pushed to ambient coords
    normal_frame: np.ndarray       # (m, m-n)
    h_coord: np.ndarray            # (n, n, m), h on coordinate fields
    h_frame: np.ndarray            # (n, n, m), h on the orthonormal frame
    coeffs: np.ndarray             # (m-n, n, n)
    mean: np.ndarray               # (m,)
    n1: int | None = None
    mean_leaf: np.ndarray | None = None   # partial mean over the leaf block
    mean_fiber: np.ndarray | None = None  # partial mean over the fiber block
    nu_start: int | None = None    # normal-frame index where the invariant complement starts

    @property
    def n(self) -> int:
        return self.tangent_frame.shape[0]

    def h_norm_sq(self) -> float:
        return float(np.sum(self.coeffs**2))

    def mean_norm(self) -> float:
        return float(math.sqrt(max(self.mean @ self.g_ambient @ self.mean, 0.0)))

    def vec_norm(self, v: np.ndarray) -> float:
        return float(math.sqrt(max(v @ self.g_ambient @ v, 0.0)))

    def h_on(self, X: np.ndarray, Y: np.ndarray) -> np.ndarray:
        """h evaluated on sub-chart coordinate vectors."""
        return np.einsum("i,j,ijk->k", X, Y, self.h_coord)

    def coeffs_check_residual(self) -> float:
        """g(h(e_i, e_j), zeta_r) must reproduce coeffs[r, i, j]."""
        back = np.einsum("ijk,km,mr->rij", self.h_frame, self.g_ambient,
                         self.normal_frame)
        return float(np.max(np.abs(back - self.coeffs)))


def _complete_normal_frame(g_amb: np.ndarray, tangent_cols: np.ndarray,
                           priority_seeds: np.ndarray | None,
                           m: int) -> tuple[np.ndarray, int]:
    """Extend an ambient-orthonormal tangent frame to a full basis.

    ``priority_seeds`` (used for the image of the anti-invariant block under
    the structure tensor) are orthonormalized first, then ambient coordinate
    seeds in index order; dependent seeds are skipped deterministically.
    Returns the normal columns and the count taken from priority seeds.
    """
    accepted = tangent_cols.copy()
    normals: list[np.ndarray] = []
    n_priority = 0

    def try_seed(seed: np.ndarray) -> bool:
        nonlocal accepted
        v = seed.astype(float).copy()
        for _ in range(2):
            for i in range(accepted.shape[1]):
                u = accepted[:, i]
                v -= (u @ g_amb @ v) * u
        nrm = math.sqrt(max(v @ g_amb @ v, 0.0))
        if nrm < NORMAL_COMPLETION_THRESHOLD:
            return False
        v /= nrm
        accepted = np.column_stack([accepted, v])
        normals.append(v)
        return True

    if priority_seeds is not None:
        for j in range(priority_seeds.shape[1]):
            if try_seed(priority_seeds[:, j]):
                n_priority += 1
    for j in range(m):
        if len(normals) == m - tangent_cols.shape[1]:
            break
        try_seed(np.eye(m)[:, j])
    if len(normals) != m - tangent_cols.shape[1]:
        raise ImmersionDegenerateError("could not complete normal frame")
    return np.column_stack(normals) if normals else np.zeros((m, 0)), n_priority


def second_fundamental_form(im: Immersion, x: Point) -> SFFData:
    """Second fundamental form via the ambient covariant derivative of the
    pushed-forward coordinate frame, projected to the normal space."""
    x = as_point(x)
    n, m = im.dim, im.ambient_dim
    phi = im.component_jets(x)
    y = np.array([p.value for p in phi])
    jac = np.array([p.d1 for p in phi])              # (m, n)
    d2phi = np.array([p.d2 for p in phi])            # (m, n, n)

    g_amb = metric_value_checked(im.ambient, y)
    g_ind = jac.T @ g_amb @ jac
    eigs = np.linalg.eigvalsh(g_ind)
    if eigs[0] <= RANK_THRESHOLD**2:
        raise ImmersionDegenerateError(
            f"immersion differential near rank-deficient at {x} "
            f"(smallest singular value {math.sqrt(max(eigs[0], 0.0)):.3e})")

    tangent_frame = gram_schmidt(g_ind, np.eye(n))
    tangent_amb = jac @ tangent_frame                # (m, n), ambient-orthonormal

    gam = christoffel(im.ambient, y)
    # full ambient derivative of the coordinate frame: D[i,j,:] in ambient coords
    d_full = np.einsum("kij->ijk", d2phi) + np.einsum(
        "klm,li,mj->ijk", gam, jac, jac)
    # normal projection: subtract ambient-orthonormal tangent components
    tang_comp = np.einsum("ijk,km,ma->ija", d_full, g_amb, tangent_amb)
    h_coord = d_full - np.einsum("ija,ka->ijk", tang_comp, tangent_amb)
    h_frame = np.einsum("pqk,pi,qj->ijk", h_coord, tangent_frame, tangent_frame)

    priority = None
    if isinstance(im.structure, AlmostContactStructure) and im.warped is not None:
        # image of the fiber (anti-invariant) frame under phi comes first, so
        # the invariant complement of the normal bundle sits after it
        phi_mat, _, _ = im.structure.tensors_at(y)
        fiber_amb = tangent_amb[:, im.warped.n1:]
        priority = phi_mat @ fiber_amb
    normal_frame, n_priority = _complete_normal_frame(g_amb, tangent_amb, priority, m)

    coeffs = np.einsum("ijk,km,mr->rij", h_frame, g_amb, normal_frame)
    mean = np.einsum("iik->k", h_frame) / n

    decl = im.warped
    n1 = decl.n1 if decl is not None else None
    mean_leaf = mean_fiber = None
    if decl is not None:
        mean_leaf = np.einsum("iik->k", h_frame[: decl.n1, : decl.n1]) / decl.n1
        mean_fiber = np.einsum("iik->k", h_frame[decl.n1:, decl.n1:]) / decl.n2

    return SFFData(
        point=np.array(x), ambient_point=y, g_induced=g_ind, g_ambient=g_amb,
        jacobian=jac, tangent_frame=tangent_frame, tangent_ambient=tangent_amb,
        normal_frame=normal_frame, h_coord=h_coord, h_frame=h_frame,
        coeffs=coeffs, mean=mean, n1=n1, mean_leaf=mean_leaf,
        mean_fiber=mean_fiber,
        nu_start=n_priority if priority is not None else None,
    )


# ---------------------------------------------------------------------------
# Shape operator
# ---------------------------------------------------------------------------


def shape_operator(im: Immersion, x: Point, zeta: np.ndarray,
                   sff: SFFData | None = None) -> tuple[np.ndarray, float]:
    """Shape operator of a normal vector in the coordinate basis, plus the
    duality residual against the projected second fundamental form.

    The operator matrix is assembled from the unprojected ambient derivative
    (pairing with a normal kills tangential parts), so the residual is a
    genuine consistency check of the normal projection, not a tautology.
    """
    sff = sff or second_fundamental_form(im, x)
    zeta = np.asarray(zeta, dtype=float)
    tang = np.einsum("k,km,ma->a", zeta, sff.g_ambient, sff.tangent_ambient)
    if np.max(np.abs(tang)) > 1e-8 * max(sff.vec_norm(zeta), 1e-300):
        raise InvalidNormalError(
            f"vector has tangential component {np.max(np.abs(tang)):.3e}")

    phi_jets = im.component_jets(x)
    d2phi = np.array([p.d2 for p in phi_jets])
    gam = christoffel(im.ambient, sff.ambient_point)
    d_full = np.einsum("kij->ijk", d2phi) + np.einsum(
        "klm,li,mj->ijk", gam, sff.jacobian, sff.jacobian)
    b = np.einsum("ijk,km,m->ij", d_full, sff.g_ambient, zeta)
    a = np.linalg.solve(sff.g_induced, b)

    lhs = sff.g_induced @ a   # g(A d_p, d_q) as a matrix
    rhs = np.einsum("pqk,km,m->pq", sff.h_coord, sff.g_ambient, zeta)
    return a, float(np.max(np.abs(lhs - rhs)))


# ---------------------------------------------------------------------------
# Curvature-equation residuals
# ---------------------------------------------------------------------------


def ambient_frame_curvature(im: Immersion, sff: SFFData) -> np.ndarray:
    """Ambient curvature tensor contracted into the tangent frame."""
    r4 = curvature_components(im.ambient, sff.ambient_point)
    return frame_curvature(r4, sff.tangent_ambient)


def gauss_residual_tensor(im: Immersion, x: Point,
                          sff: SFFData | None = None) -> np.ndarray:
    """Pointwise defect tensor of the curvature relation between the induced
    and ambient metrics, over the orthonormal tangent frame."""
    sff = sff or second_fundamental_form(im, x)
    r_ind = frame_curvature(curvature_components(InducedMetric(im), x),
                            sff.tangent_frame)
    r_amb = ambient_frame_curvature(im, sff)
    c = sff.coeffs
    h_term = np.einsum("ril,rjk->ijkl", c, c) - np.einsum("rik,rjl->ijkl", c, c)
    return r_ind - r_amb - h_term


def gauss_residual(im: Immersion, x: Point, i: int, j: int, k: int, l: int) -> float:
    return float(abs(gauss_residual_tensor(im, x)[i, j, k, l]))


def gauss_residual_max(im: Immersion, x: Point, sff: SFFData | None = None) -> float:
    return float(np.max(np.abs(gauss_residual_tensor(im, x, sff))))


def scalar_identity_residual(im: Immersion, x: Point,
                             sff: SFFData | None = None) -> float:
    """Defect of the traced curvature relation: twice the intrinsic scalar
    curvature against the ambient tangent-plane sum plus mean-curvature and
    form-norm terms."""
    sff = sff or second_fundamental_form(im, x)
    tau = scalar_curvature(InducedMetric(im), x)
    r_amb = ambient_frame_curvature(im, sff)
    n = sff.n
    tau_amb = sum(r_amb[i, j, j, i] for i in range(n) for j in range(i + 1, n))
    lhs = 2.0 * tau
    rhs = 2.0 * tau_amb + n**2 * sff.mean_norm() ** 2 - sff.h_norm_sq()
    return float(abs(lhs - rhs))


# ---------------------------------------------------------------------------
# Relative null space
# ---------------------------------------------------------------------------


def relative_null_space(im: Immersion, x: Point,
                        threshold: float = NULL_SPACE_THRESHOLD) -> np.ndarray:
    """Basis (sub-chart columns) of the kernel of X -> h(X, .) at x.

    Rank is revealed by the SVD of the stacked coefficient matrix; singular
    directions below the threshold span the null space.
    """
    sff = second_fundamental_form(im, x)
    n = sff.n
    mat = sff.coeffs.transpose(0, 2, 1).reshape(-1, n)  # rows (r, j), columns i
    if mat.shape[0] == 0:
        return sff.tangent_frame.copy()
    _, s, vt = np.linalg.svd(mat)
    svals = np.zeros(n)
    svals[: len(s)] = s
    keep = svals < threshold
    kernel = vt[keep].T
    return sff.tangent_frame @ kernel


# ---------------------------------------------------------------------------
# Classification
# ---------------------------------------------------------------------------


@dataclass
class ClassificationFlags:
    """Worst-case residuals over the sample and the derived predicates.

    Block-split predicates are None when no warped declaration is present.
    """

    residuals: dict[str, float]
    tol: float
    totally_geodesic: bool = False
    totally_umbilical: bool = False
    minimal: bool = False
    mixed_totally_geodesic: bool | None = None
    d1_totally_geodesic: bool | None = None
    d1_minimal: bool | None = None
    d2_minimal: bool | None = None
    d2_totally_umbilical: bool | None = None


def classify(im: Immersion, points: Sequence[Point],
             tol: float = CLASSIFY_TOL) -> ClassificationFlags:
    """Each predicate holds iff its defining residual stays below tol at all
    sampled points."""
    decl = im.warped
    keys = ["geodesic", "umbilical", "minimal"]
    if decl is not None:
        keys += ["mixed_geodesic", "d1_geodesic", "d1_minimal", "d2_minimal",
                 "d2_umbilical"]
    worst = {k: 0.0 for k in keys}

    for x in points:
        sff = second_fundamental_form(im, x)
        n = sff.n
        h_norms = np.array([[sff.vec_norm(sff.h_frame[i, j])
                             for j in range(n)] for i in range(n)])
        worst["geodesic"] = max(worst["geodesic"], float(h_norms.max()))
        umb = max(sff.vec_norm(sff.h_frame[i, j] - (1.0 if i == j else 0.0) * sff.mean)
                  for i in range(n) for j in range(n))
        worst["umbilical"] = max(worst["umbilical"], umb)
        worst["minimal"] = max(worst["minimal"], sff.mean_norm())
        if decl is not None:
            n1 = decl.n1
            worst["mixed_geodesic"] = max(
                worst["mixed_geodesic"],
                float(h_norms[:n1, n1:].max()) if n1 < n else 0.0)
            worst["d1_geodesic"] = max(worst["d1_geodesic"],
                                       float(h_norms[:n1, :n1].max()))
            worst["d1_minimal"] = max(worst["d1_minimal"],
                                      sff.vec_norm(sff.mean_leaf))
            worst["d2_minimal"] = max(worst["d2_minimal"],
                                      sff.vec_norm(sff.mean_fiber))
            umb2 = max(sff.vec_norm(sff.h_frame[i, j]
                                    - (1.0 if i == j else 0.0) * sff.mean_fiber)
                       for i in range(n1, n) for j in range(n1, n))
            worst["d2_umbilical"] = max(worst["d2_umbilical"], umb2)

    flags = ClassificationFlags(residuals=worst, tol=tol,
                                totally_geodesic=worst["geodesic"] < tol,
                                totally_umbilical=worst["umbilical"] < tol,
                                minimal=worst["minimal"] < tol)
    if decl is not None:
        flags.mixed_totally_geodesic = worst["mixed_geodesic"] < tol
        flags.d1_totally_geodesic = worst["d1_geodesic"] < tol
        flags.d1_minimal = worst["d1_minimal"] < tol
        flags.d2_minimal = worst["d2_minimal"] < tol
        flags.d2_totally_umbilical = worst["d2_umbilical"] < tol
    return flags


# ---------------------------------------------------------------------------
# Warped geometry view of an immersion
# ---------------------------------------------------------------------------


def warped_geometry(im: Immersion) -> WarpedGeometry:
    """Identity-check view of a warped-declared immersion: the induced metric
    with the declared block split and warping function."""
    decl = im.warped
    if decl is None:
        raise ConfigurationError("immersion has no warped declaration")
    ind = InducedMetric(im)
    leaf_axes = tuple(range(decl.n1))
    return WarpedGeometry(
        metric=ind, n1=decl.n1, n2=decl.n2, f=decl.f, params=im.params,
        leaf_factory=lambda x: SlicedMetric(ind, axes=leaf_axes,
                                            anchor=as_point(x)))


def warped_block_residual(im: Immersion, points: Sequence[Point]) -> float:
    """Isometric-immersion sanity for warped declarations: the induced metric
    must be block diagonal with fiber block equal to f^2 times the declared
    fiber metric (identity when none is declared)."""
    decl = im.warped
    if decl is None:
        raise ConfigurationError("immersion has no warped declaration")
    ind = InducedMetric(im)
    worst = 0.0
    for x in points:
        x = as_point(x)
        g = ind.value(x)
        n1 = decl.n1
        off = float(np.max(np.abs(g[:n1, n1:]))) if n1 < im.dim else 0.0
        f_val = dsl.eval_expr(decl.f, x[:n1], im.params).value
        g2 = (decl.g2.value(x[n1:]) if decl.g2 is not None
              else np.eye(decl.n2))
        fiber = float(np.max(np.abs(g[n1:, n1:] - f_val**2 * g2)))
        worst = max(worst, off, fiber)
    return worst


# ---------------------------------------------------------------------------
# Contact CR checks
# ---------------------------------------------------------------------------


def tangency_coefficients(sff: SFFData, v_amb: np.ndarray) -> tuple[np.ndarray, float]:
    """Least-squares sub-chart coordinates of an ambient vector and the
    metric norm of the non-tangential remainder."""
    b = sff.jacobian.T @ sff.g_ambient @ v_amb
    c = np.linalg.solve(sff.g_induced, b)
    resid = v_amb - sff.jacobian @ c
    return c, float(math.sqrt(max(resid @ sff.g_ambient @ resid, 0.0)))


def contact_cr_checks(im: Immersion, points: Sequence[Point],
                      tol: float = 1e-7) -> CheckReport:
    """Residual suite for contact CR-warped immersions.

    Gate: the Reeb field must be tangent at every sample (recorded as a
    precondition failure otherwise); the leaf block minus the Reeb direction
    must be invariant under the structure tensor and the fiber block
    anti-invariant.  Post-gate residuals: the form kills Reeb pairings, leaf
    self-pairings have no components along the image of the fiber block, and
    leaf self-pairings flip sign under the structure tensor against the
    invariant normal complement.
    """
    if not isinstance(im.structure, AlmostContactStructure):
        raise ConfigurationError("contact CR checks need an almost contact ambient")
    decl = im.warped
    if decl is None:
        raise ConfigurationError("contact CR checks need a warped declaration")

    worst = {
        "reeb_tangency": 0.0,
        "leaf_block_invariance": 0.0,
        "fiber_block_anti_invariance": 0.0,
        "form_on_reeb_pairs": 0.0,        # h(X, xi) and h(xi, xi)
        "leaf_pairs_vs_fiber_image": 0.0,  # g(h(X,X), phi Z)
        "invariant_complement_flip": 0.0,  # g(h(X,X), zeta) + g(h(phi X, phi X), zeta)
    }
    precondition_failed = False
    n1, n = decl.n1, im.dim

    for x in points:
        sff = second_fundamental_form(im, x)
        phi_mat, xi_vec, _ = im.structure.tensors_at(sff.ambient_point)

        xi_sub, xi_resid = tangency_coefficients(sff, xi_vec)
        worst["reeb_tangency"] = max(worst["reeb_tangency"], xi_resid)
        if xi_resid > 1e-8:
            precondition_failed = True
            continue

        # frame of the leaf block with the Reeb direction first
        seeds = np.zeros((n, n1 + 1))
        seeds[:, 0] = xi_sub
        seeds[:n1, 1:] = np.eye(n1)
        leaf_cols = _schmidt_skip(sff.g_induced, seeds, want=n1)
        xi_hat, dt_cols = leaf_cols[:, 0], leaf_cols[:, 1:]

        fiber_cols = np.zeros((n, decl.n2))
        fiber_cols[n1:, :] = np.eye(decl.n2)
        fiber_cols = gram_schmidt(sff.g_induced, fiber_cols)

        # invariance of the leaf block (minus Reeb), anti-invariance of the fiber
        for a in range(dt_cols.shape[1]):
            v_amb = phi_mat @ (sff.jacobian @ dt_cols[:, a])
            _, r = tangency_coefficients(sff, v_amb)
            worst["leaf_block_invariance"] = max(worst["leaf_block_invariance"], r)
        for b in range(fiber_cols.shape[1]):
            v_amb = phi_mat @ (sff.jacobian @ fiber_cols[:, b])
            tang = np.einsum("k,km,ma->a", v_amb, sff.g_ambient,
                             sff.tangent_ambient)
            worst["fiber_block_anti_invariance"] = max(
                worst["fiber_block_anti_invariance"], float(np.max(np.abs(tang))))

        # (a) pairings with the Reeb direction vanish
        r_reeb = sff.vec_norm(sff.h_on(xi_hat, xi_hat))
        for a in range(dt_cols.shape[1]):
            r_reeb = max(r_reeb, sff.vec_norm(sff.h_on(dt_cols[:, a], xi_hat)))
        worst["form_on_reeb_pairs"] = max(worst["form_on_reeb_pairs"], r_reeb)

        # (b) leaf self-pairings against the image of the fiber block
        for a in range(dt_cols.shape[1]):
            h_xx = sff.h_on(dt_cols[:, a], dt_cols[:, a])
            for b in range(fiber_cols.shape[1]):
                fz = phi_mat @ (sff.jacobian @ fiber_cols[:, b])
                val = abs(float(h_xx @ sff.g_ambient @ fz))
                worst["leaf_pairs_vs_fiber_image"] = max(
                    worst["leaf_pairs_vs_fiber_image"], val)

        # (c) sign flip against the invariant complement of the normal bundle
        nu_cols = sff.normal_frame[:, sff.nu_start:] if sff.nu_start is not None \
            else sff.normal_frame
        for a in range(dt_cols.shape[1]):
            X = dt_cols[:, a]
            phix_amb = phi_mat @ (sff.jacobian @ X)
            phix_sub, _ = tangency_coefficients(sff, phix_amb)
            h_xx = sff.h_on(X, X)
            h_pp = sff.h_on(phix_sub, phix_sub)
            for r_i in range(nu_cols.shape[1]):
                zeta = nu_cols[:, r_i]
                val = abs(float((h_xx + h_pp) @ sff.g_ambient @ zeta))
                worst["invariant_complement_flip"] = max(
                    worst["invariant_complement_flip"], val)

    rep = CheckReport()
    rep.add("cr-reeb-tangency", "contact-cr-reeb-tangency",
            worst["reeb_tangency"], 1e-8, len(points),
            note="precondition failed at some points" if precondition_failed else "")
    rep.add("cr-leaf-invariance", "contact-cr-leaf-invariance",
            worst["leaf_block_invariance"], tol, len(points))
    rep.add("cr-fiber-anti-invariance", "contact-cr-fiber-anti-invariance",
            worst["fiber_block_anti_invariance"], tol, len(points))
    rep.add("cr-form-on-reeb-pairs", "contact-cr-form-on-reeb-pairs",
            worst["form_on_reeb_pairs"], tol, len(points))
    rep.add("cr-leaf-vs-fiber-image", "contact-cr-leaf-vs-fiber-image",
            worst["leaf_pairs_vs_fiber_image"], tol, len(points))
    rep.add("cr-invariant-flip", "contact-cr-invariant-flip",
            worst["invariant_complement_flip"], tol, len(points))
    return rep


def complex_cr_residuals(im: Immersion, points: Sequence[Point]) -> dict[str, float]:
    """CR gate for complex ambients: the leaf block must be invariant under
    the structure tensor and the fiber block anti-invariant.

    Returns worst-case residuals; both near zero certify a CR-warped product,
    which is the hypothesis under which leaf-minimality is a theorem.
    """
    if not isinstance(im.structure, AlmostComplexStructure):
        raise ConfigurationError("complex CR gate needs a complex ambient structure")
    decl = im.warped
    if decl is None:
        raise ConfigurationError("complex CR gate needs a warped declaration")
    worst_leaf = worst_fiber = 0.0
    for x in points:
        sff = second_fundamental_form(im, x)
        j_mat = im.structure.j_value(sff.ambient_point)
        leaf_cols = sff.tangent_ambient[:, : decl.n1]
        fiber_cols = sff.tangent_ambient[:, decl.n1:]
        for a in range(leaf_cols.shape[1]):
            v = j_mat @ leaf_cols[:, a]
            coeff = leaf_cols.T @ sff.g_ambient @ v
            resid = v - leaf_cols @ coeff
            worst_leaf = max(worst_leaf, sff.vec_norm(resid))
        for b in range(fiber_cols.shape[1]):
            v = j_mat @ fiber_cols[:, b]
            tang = sff.tangent_ambient.T @ sff.g_ambient @ v
            worst_fiber = max(worst_fiber, float(np.max(np.abs(tang))))
    return {"leaf_invariance": worst_leaf, "fiber_anti_invariance": worst_fiber}


def _schmidt_skip(g: np.ndarray, seeds: np.ndarray, want: int) -> np.ndarray:
    """Gram-Schmidt that silently skips dependent seeds, keeping `want` columns."""
    cols: list[np.ndarray] = []
    for j in range(seeds.shape[1]):
        v = seeds[:, j].astype(float).copy()
        for _ in range(2):
            for u in cols:
                v -= (u @ g @ v) * u
        nrm = math.sqrt(max(v @ g @ v, 0.0))
        if nrm < 1e-8:
            continue
        cols.append(v / nrm)
        if len(cols) == want:
            break
    if len(cols) != want:
        raise ConfigurationError("could not build the requested frame")
    return np.column_stack(cols)

"""Ambient geometric structures: almost complex and almost contact metric
structures on chart metrics, plus closed-form space-form curvature models.

The space-form models evaluate constant-curvature-type tensors directly from
the displayed closed forms; they are curvature models, not metrics.  Each
ships with standard constant structure tensors (identity metric, block
rotation phi/J, last-coordinate Reeb direction), which is all the inequality
evaluators and constancy tests need.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import expr as dsl
from .errors import ConfigurationError, DegeneratePlaneError
from .jets import Point, as_point, jet_var
from .report import CheckReport
from .riemann import MetricField, christoffel


def _eval_matrix(entries, x: Point, params, dim: int):
    """Values and first derivatives of a matrix of expressions.

    Returns (V, D) with V[i,j] the value and D[k,i,j] the k-th partial.
    """
    x = as_point(x)
    seeds = [jet_var(i, x) for i in range(x.shape[0])]
    n_rows = len(entries)
    n_cols = len(entries[0])
    v = np.empty((n_rows, n_cols))
    d = np.empty((x.shape[0], n_rows, n_cols))
    for i in range(n_rows):
        for j in range(n_cols):
            jet = dsl.eval_jets(entries[i][j], seeds, params)
            v[i, j] = jet.value
            d[:, i, j] = jet.d1
    return v, d


def _eval_vector(entries, x: Point, params):
    x = as_point(x)
    seeds = [jet_var(i, x) for i in range(x.shape[0])]
    v = np.empty(len(entries))
    d = np.empty((x.shape[0], len(entries)))
    for i, e in enumerate(entries):
        jet = dsl.eval_jets(e, seeds, params)
        v[i] = jet.value
        d[:, i] = jet.d1
    return v, d


# ---------------------------------------------------------------------------
# Almost complex structures
# ---------------------------------------------------------------------------


@dataclass
class AlmostComplexStructure:
    """(1,1) tensor field J on an even-dimensional chart metric."""

    metric: MetricField
    j_entries: list  # dim x dim Exprs, (J v)^i = J[i][j] v^j
    params: tuple[float, ...] = ()
    name: str = ""

    @property
    def dim(self) -> int:
        return self.metric.dim

    def j_value(self, x: Point) -> np.ndarray:
        v, _ = _eval_matrix(self.j_entries, x, self.params, self.dim)
        return v

    def square_residual(self, x: Point) -> float:
        j = self.j_value(x)
        return float(np.max(np.abs(j @ j + np.eye(self.dim))))

    def compatibility_residual(self, x: Point) -> float:
        j = self.j_value(x)
        g = self.metric.value(x)
        return float(np.max(np.abs(j.T @ g @ j - g)))

    def parallel_residual(self, x: Point) -> float:
        """Max component of the covariant derivative of J (zero iff Kahler at x)."""
        j, dj = _eval_matrix(self.j_entries, x, self.params, self.dim)
        gam = christoffel(self.metric, x)
        # (nabla_i J)^k_j = d_i J^k_j + Gamma^k_im J^m_j - Gamma^m_ij J^k_m
        nj = (dj + np.einsum("kim,mj->ikj", gam, j)
              - np.einsum("mij,km->ikj", gam, j))
        return float(np.max(np.abs(nj)))

    def validate(self, points: Sequence[Point], tol: float = 1e-10,
                 require_kahler: bool = False) -> CheckReport:
        rep = CheckReport()
        sq = max(self.square_residual(x) for x in points)
        comp = max(self.compatibility_residual(x) for x in points)
        rep.add("complex-square", "almost-complex-square", sq, tol, len(points))
        rep.add("complex-compatibility", "almost-complex-compatibility", comp, tol,
                len(points))
        if require_kahler:
            par = max(self.parallel_residual(x) for x in points)
            rep.add("kahler-parallel", "kahler-parallel-structure", par, 1e-8,
                    len(points))
        return rep


# ---------------------------------------------------------------------------
# Almost contact metric structures
# ---------------------------------------------------------------------------


@dataclass
class AlmostContactStructure:
    """(phi, xi, eta, g) on an odd-dimensional chart metric."""

    metric: MetricField
    phi_entries: list   # dim x dim Exprs
    xi_entries: list    # dim Exprs (vector components)
    eta_entries: list   # dim Exprs (covector components)
    params: tuple[float, ...] = ()
    name: str = ""

    @property
    def dim(self) -> int:
        return self.metric.dim

    def tensors_at(self, x: Point):
        phi, _ = _eval_matrix(self.phi_entries, x, self.params, self.dim)
        xi, _ = _eval_vector(self.xi_entries, x, self.params)
        eta, _ = _eval_vector(self.eta_entries, x, self.params)
        return phi, xi, eta

    def identity_residuals(self, x: Point) -> dict[str, float]:
        """The six defining identities of an almost contact metric structure."""
        n = self.dim
        phi, xi, eta = self.tensors_at(x)
        g = self.metric.value(x)
        return {
            "phi_square": float(np.max(np.abs(phi @ phi + np.eye(n) - np.outer(xi, eta)))),
            "phi_of_reeb": float(np.max(np.abs(phi @ xi))),
            "dual_form_kills_phi": float(np.max(np.abs(eta @ phi))),
            "dual_pairing": abs(float(eta @ xi) - 1.0),
            "dual_is_metric_dual": float(np.max(np.abs(eta - g @ xi))),
            "phi_compatibility": float(np.max(np.abs(phi.T @ g @ phi - (g - np.outer(eta, eta))))),
        }


def validate_almost_contact(s: AlmostContactStructure, points: Sequence[Point],
                            tol: float = 1e-10) -> CheckReport:
    """Max residual of each defining identity over the sample points."""
    if s.dim % 2 == 0:
        raise ConfigurationError("almost contact structures need odd dimension")
    worst: dict[str, float] = {}
    for x in points:
        for key, val in s.identity_residuals(x).items():
            worst[key] = max(worst.get(key, 0.0), val)
    rep = CheckReport()
    for key, val in worst.items():
        rep.add(f"contact-{key}", f"almost-contact-{key.replace('_', '-')}", val, tol,
                len(points))
    return rep


def covariant_phi_derivative(s: AlmostContactStructure, X, Y, x: Point) -> np.ndarray:
    """(nabla_X phi)Y for vectors at x (constant coordinate extensions)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    phi, dphi = _eval_matrix(s.phi_entries, x, s.params, s.dim)
    gam = christoffel(s.metric, x)
    term = np.einsum("i,ikm,m->k", X, dphi, Y)
    term += np.einsum("kim,i,mj,j->k", gam, X, phi, Y)
    term -= np.einsum("km,mij,i,j->k", phi, gam, X, Y)
    return term


CLASS_NAMES = ("sasakian", "kenmotsu", "cosymplectic", "nearly_cosymplectic")


def structure_class_residual(s: AlmostContactStructure, klass: str, X, Y,
                             x: Point) -> float:
    """Metric norm of the defect of the class-defining covariant-derivative law."""
    if klass not in CLASS_NAMES:
        raise ConfigurationError(f"unknown structure class {klass!r}")
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    g = s.metric.value(x)
    phi, xi, eta = s.tensors_at(x)
    lhs = covariant_phi_derivative(s, X, Y, x)
    if klass == "sasakian":
        rhs = -(X @ g @ Y) * xi + (eta @ Y) * X
    elif klass == "kenmotsu":
        rhs = ((phi @ X) @ g @ Y) * xi - (eta @ Y) * (phi @ X)
    elif klass == "cosymplectic":
        rhs = np.zeros(s.dim)
    else:  # nearly cosymplectic: symmetrized derivative vanishes
        lhs = lhs + covariant_phi_derivative(s, Y, X, x)
        rhs = np.zeros(s.dim)
    diff = lhs - rhs
    return float(math.sqrt(max(diff @ g @ diff, 0.0)))


def _exterior_d_eta(s: AlmostContactStructure, X, Y, x: Point) -> float:
    """d(eta)(X, Y) = X eta(Y) - Y eta(X) for constant-extended X, Y."""
    _, deta = _eval_vector(s.eta_entries, x, s.params)
    return float(np.einsum("i,ij,j->", X, deta, Y) - np.einsum("i,ij,j->", Y, deta, X))


def nijenhuis_normality_residual(s: AlmostContactStructure, X, Y, x: Point) -> float:
    """Metric norm of the normality defect [phi, phi](X, Y) + d(eta)(X, Y) xi.

    Convention note: with the halved exterior derivative
    d'eta(X,Y) = (X eta(Y) - Y eta(X) - eta([X,Y]))/2 common in the contact
    literature this is the usual N + 2 d'eta (x) xi; here d(eta) is the
    unhalved convention used by :func:`fundamental_form_residual`, so the
    correct factor is 1.  The standard Sasakian chart vanishes under this
    combination and not under the doubled one.

    The combination is tensorial, so constant coordinate extensions of X and
    Y are valid; brackets reduce to first derivatives of the phi-images.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    phi, dphi = _eval_matrix(s.phi_entries, x, s.params, s.dim)
    _, xi, _ = s.tensors_at(x)
    g = s.metric.value(x)

    fx = phi @ X
    fy = phi @ Y
    dfx = np.einsum("kim,m->ki", dphi, X)   # dfx[k, i] = d_k (phi X)^i
    dfy = np.einsum("kim,m->ki", dphi, Y)

    bracket_fxfy = np.einsum("k,ki->i", fx, dfy) - np.einsum("k,ki->i", fy, dfx)
    nij = (bracket_fxfy
           - phi @ np.einsum("k,ki->i", X, dfy)
           + phi @ np.einsum("k,ki->i", Y, dfx))
    vec = nij + _exterior_d_eta(s, X, Y, x) * xi
    return float(math.sqrt(max(vec @ g @ vec, 0.0)))


def fundamental_form_residual(s: AlmostContactStructure, X, Y, x: Point) -> float:
    """|Phi(X,Y) - d(eta)(X,Y)/2| with Phi(X,Y) = g(phi X, Y) (contact metric law)."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    phi, _, _ = s.tensors_at(x)
    g = s.metric.value(x)
    return abs(float((phi @ X) @ g @ Y) - 0.5 * _exterior_d_eta(s, X, Y, x))


# ---------------------------------------------------------------------------
# Space-form curvature models
# ---------------------------------------------------------------------------

MODEL_KINDS = ("complex", "generalized_complex", "sasakian", "kenmotsu",
               "cosymplectic")


@dataclass
class SpaceFormModel:
    """Closed-form constant-phi-sectional curvature tensor.

    Tensors are constant matrices in the model chart; ``constant`` is the
    phi-sectional (or holomorphic-sectional) curvature and ``gamma`` the
    second parameter of the generalized complex family (zero reduces it to
    the complex space form).
    """

    kind: str
    dim: int
    constant: float
    gamma: float = 0.0
    g: np.ndarray = field(default=None)
    j: np.ndarray = field(default=None)      # complex kinds
    phi: np.ndarray = field(default=None)    # contact kinds
    xi: np.ndarray = field(default=None)
    eta: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigurationError(f"unknown space-form kind {self.kind!r}")
        if self.g is None:
            self.g = np.eye(self.dim)
        contact = self.kind in ("sasakian", "kenmotsu", "cosymplectic")
        if contact:
            if self.dim % 2 == 0:
                raise ConfigurationError("contact space forms need odd dimension")
            if self.phi is None:
                self.phi = _block_rotation(self.dim - 1, self.dim)
            if self.xi is None:
                self.xi = np.eye(self.dim)[:, -1].copy()
            if self.eta is None:
                self.eta = self.g @ self.xi
        else:
            if self.dim % 2 == 1:
                raise ConfigurationError("complex space forms need even dimension")
            if self.j is None:
                self.j = _block_rotation(self.dim, self.dim)


def _block_rotation(pairs_span: int, dim: int) -> np.ndarray:
    """Skew matrix rotating coordinate pairs: e_{2k} -> e_{2k+1} -> -e_{2k}."""
    m = np.zeros((dim, dim))
    for k in range(pairs_span // 2):
        m[2 * k + 1, 2 * k] = 1.0
        m[2 * k, 2 * k + 1] = -1.0
    return m


def complex_space_form(c: float, dim: int) -> SpaceFormModel:
    return SpaceFormModel("complex", dim, c)


def generalized_complex_space_form(c: float, gamma: float, dim: int) -> SpaceFormModel:
    return SpaceFormModel("generalized_complex", dim, c, gamma=gamma)


def sasakian_space_form(c: float, dim: int) -> SpaceFormModel:
    return SpaceFormModel("sasakian", dim, c)


def kenmotsu_space_form(c: float, dim: int) -> SpaceFormModel:
    return SpaceFormModel("kenmotsu", dim, c)


def cosymplectic_space_form(c: float, dim: int) -> SpaceFormModel:
    return SpaceFormModel("cosymplectic", dim, c)


def model_curvature(m: SpaceFormModel, X, Y, Z, W, x: Point | None = None) -> float:
    """Covariant curvature value R(X, Y, Z, W) of the model at any point."""
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    W = np.asarray(W, dtype=float)
    g = m.g

    def ip(a, b):
        return float(a @ g @ b)

    if m.kind in ("complex", "generalized_complex"):
        if m.j is None:
            raise ConfigurationError("complex model lacks J tensor")
        c = m.constant
        if m.kind == "complex":
            f1 = f2 = c / 4.0
        else:
            f1 = (c + 3.0 * m.gamma) / 4.0
            f2 = (c - m.gamma) / 4.0
        jx, jy, jz = m.j @ X, m.j @ Y, m.j @ Z
        base = ip(Y, Z) * ip(X, W) - ip(X, Z) * ip(Y, W)
        jpart = (ip(jy, Z) * ip(jx, W) - ip(jx, Z) * ip(jy, W)
                 + 2.0 * ip(X, jy) * ip(jz, W))
        return f1 * base + f2 * jpart

    if m.phi is None or m.xi is None or m.eta is None:
        raise ConfigurationError("contact model lacks structure tensors")
    c = m.constant
    eta = m.eta
    ex, ey, ez = float(eta @ X), float(eta @ Y), float(eta @ Z)
    exw = ip(m.xi, W)
    px, py, pz = m.phi @ X, m.phi @ Y, m.phi @ Z
    base = ip(X, W) * ip(Y, Z) - ip(X, Z) * ip(Y, W)
    contact = (ez * (ey * ip(X, W) - ex * ip(Y, W))
               + (ip(Y, Z) * ex - ip(X, Z) * ey) * exw)
    jpart = (-ip(px, W) * ip(py, Z) + ip(px, Z) * ip(py, W)
             + 2.0 * ip(px, Y) * ip(pz, W))
    if m.kind == "sasakian":
        return (c + 3.0) / 4.0 * base - (c - 1.0) / 4.0 * (contact + jpart)
    if m.kind == "kenmotsu":
        return (c - 3.0) / 4.0 * base - (c + 1.0) / 4.0 * (contact + jpart)
    # cosymplectic
    return c / 4.0 * (base - contact - jpart)


def model_sectional(m: SpaceFormModel, X, Y) -> float:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    g = m.g
    den = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if den <= 1e-12:
        raise DegeneratePlaneError("vectors do not span a 2-plane")
    return model_curvature(m, X, Y, Y, X) / float(den)


def phi_sectional(m: SpaceFormModel, X, x: Point | None = None) -> float:
    """Sectional curvature of span(X, phi X); the model constant by construction."""
    X = np.asarray(X, dtype=float)
    op = m.j if m.kind in ("complex", "generalized_complex") else m.phi
    if m.kind not in ("complex", "generalized_complex"):
        if abs(float(m.eta @ X)) > 1e-8 * np.linalg.norm(X):
            raise DegeneratePlaneError("phi-sections must be orthogonal to the Reeb direction")
    px = op @ X
    if float(px @ m.g @ px) <= 1e-12:
        raise DegeneratePlaneError("phi X vanishes; no phi-section")
    return model_sectional(m, X, px)


def model_symmetry_residual(m: SpaceFormModel, rng: np.random.Generator,
                            trials: int = 20) -> float:
    """Max violation of curvature symmetries and the first Bianchi identity
    on random vector quadruples."""
    worst = 0.0
    for _ in range(trials):
        x_, y_, z_, w_ = rng.standard_normal((4, m.dim))
        r = model_curvature
        vals = [
            r(m, x_, y_, z_, w_) + r(m, y_, x_, z_, w_),
            r(m, x_, y_, z_, w_) + r(m, x_, y_, w_, z_),
            r(m, x_, y_, z_, w_) - r(m, z_, w_, x_, y_),
            r(m, x_, y_, z_, w_) + r(m, y_, z_, x_, w_) + r(m, z_, x_, y_, w_),
        ]
        worst = max(worst, max(abs(v) for v in vals))
    return worst

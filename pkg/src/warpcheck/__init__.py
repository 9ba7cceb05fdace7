"""warpcheck: pointwise numerical verification of curvature identities and
inequalities for warped-product CR-submanifolds, from chart-level data.

The computation stack: order-3 jet arithmetic (:mod:`warpcheck.jets`) feeds
an expression DSL (:mod:`warpcheck.expr`), which defines chart metrics and
immersions; intrinsic invariants come from :mod:`warpcheck.riemann`, warped
products from :mod:`warpcheck.warped`, ambient structures and space-form
curvature models from :mod:`warpcheck.structures`, extrinsic geometry from
:mod:`warpcheck.subman`, and the inequality evaluators from
:mod:`warpcheck.ineq`.  Validated examples live in :mod:`warpcheck.gallery`;
:mod:`warpcheck.cli` is the command-line front door.
"""

__version__ = "0.1.0"

from .errors import (ConfigurationError, DegenerateMetricError,
                     DegeneratePlaneError, ImmersionDegenerateError,
                     InvalidNormalError, InvalidWarpingError, JetDomainError,
                     WarpcheckError)
from .expr import ParseError, eval_expr, parse, pretty
from .gallery import builtin_names, load_builtin, validate
from .ineq import (InequalityResult, d2_umbilical_implies_geodesic,
                   dt_minimality_check, generalized_inequality, main_inequality,
                   nearly_kahler_inequality, scalar_decomposition_residual,
                   space_form_inequality)
from .jets import DomainBox, ExcludedBall, Jet3, fd_partial, jet_arith, jet_const, jet_var
from .report import CheckRecord, CheckReport
from .riemann import (Curvature4, MetricField, OrthoFrame, christoffel, curvature,
                      grad_norm_sq, gradient, laplacian, orthonormal_frame,
                      scalar_curvature, sectional)
from .structures import (AlmostComplexStructure, AlmostContactStructure,
                         SpaceFormModel, complex_space_form,
                         cosymplectic_space_form, generalized_complex_space_form,
                         kenmotsu_space_form, model_curvature, phi_sectional,
                         sasakian_space_form, structure_class_residual,
                         validate_almost_contact)
from .subman import (Immersion, SFFData, WarpedDecl, classify, contact_cr_checks,
                     gauss_residual, gauss_residual_max, induced_metric,
                     relative_null_space, scalar_identity_residual,
                     second_fundamental_form, shape_operator)
from .warped import WarpedMetric, assemble, mixed_sectional_sum, warping_identity_residual

__all__ = [
    "__version__",
    # errors
    "WarpcheckError", "JetDomainError", "DegenerateMetricError",
    "DegeneratePlaneError", "ImmersionDegenerateError", "InvalidWarpingError",
    "InvalidNormalError", "ConfigurationError", "ParseError",
    # jets and DSL
    "Jet3", "DomainBox", "ExcludedBall", "jet_const", "jet_var", "jet_arith",
    "fd_partial", "parse", "eval_expr", "pretty",
    # intrinsic geometry
    "MetricField", "OrthoFrame", "Curvature4", "christoffel", "curvature",
    "sectional", "scalar_curvature", "gradient", "grad_norm_sq", "laplacian",
    "orthonormal_frame",
    # warped products
    "WarpedMetric", "assemble", "mixed_sectional_sum", "warping_identity_residual",
    # structures and models
    "AlmostComplexStructure", "AlmostContactStructure", "SpaceFormModel",
    "complex_space_form", "generalized_complex_space_form", "sasakian_space_form",
    "kenmotsu_space_form", "cosymplectic_space_form", "model_curvature",
    "phi_sectional", "structure_class_residual", "validate_almost_contact",
    # submanifolds
    "Immersion", "WarpedDecl", "SFFData", "induced_metric",
    "second_fundamental_form", "shape_operator", "gauss_residual",
    "gauss_residual_max", "scalar_identity_residual", "relative_null_space",
    "classify", "contact_cr_checks",
    # inequalities
    "InequalityResult", "main_inequality", "space_form_inequality",
    "nearly_kahler_inequality", "generalized_inequality",
    "scalar_decomposition_residual", "dt_minimality_check",
    "d2_umbilical_implies_geodesic",
    # gallery and reports
    "builtin_names", "load_builtin", "validate", "CheckRecord", "CheckReport",
]

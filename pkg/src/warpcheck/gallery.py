"""Curated, validated example instances anchoring the acceptance suite.

Built-ins ship as config files in the package data directory, in the same
format user configs use.  Every example carries a machine-checkable
validation gate; a gate failure is a build-breaking error, never a silent
skip.  Expected outcomes recorded here state how each expectation was
obtained ("hand" for closed-form computation, "numerical" for values the
engine itself certifies through independent residual checks, "definition"
for direct consequences of the construction).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
import numpy as np

from .config import BuiltConfig, load_config_text
from .errors import ConfigurationError
from .report import CheckReport
from .sampling import halton_points
from .structures import (AlmostComplexStructure, AlmostContactStructure,
                         validate_almost_contact)
from .subman import Immersion, second_fundamental_form, warped_block_residual
from .warped import WarpedMetric

GATE_POINTS = 16
GATE_SEED = 7


@dataclass(frozen=True)
class ExampleSpec:
    """Roster entry: where the config lives and what the example promises."""

    name: str
    config_file: str
    kind: str  # metric | structure | warped | immersion
    summary: str
    gates: tuple[str, ...]
    expected: dict = field(default_factory=dict)


BUILTINS: dict[str, ExampleSpec] = {
    spec.name: spec for spec in (
        ExampleSpec(
            name="e1", config_file="e1_chen_cr.cfg", kind="immersion",
            summary="complex plane times rotation circle in flat C^2, warping |z|",
            gates=("metric", "rank", "warped-block"),
            expected={
                "d1_minimal": (True, "hand"),
                "minimal": (True, "hand"),
                "mixed_totally_geodesic": (False, "hand"),
                "main_inequality": ("equality", "hand"),
                "half_form_norm_sq": ("1/r^2", "hand"),
            }),
        ExampleSpec(
            name="e2", config_file="e2_hyperbolic.cfg", kind="warped",
            summary="hyperbolic plane as an exponentially warped line over a line",
            gates=("metric", "warping-positive"),
            expected={"sectional": (-1.0, "hand"),
                      "warped_identity_sides": (-1.0, "hand")}),
        ExampleSpec(
            name="e3", config_file="e3_round_s2.cfg", kind="immersion",
            summary="round unit sphere in flat 3-space",
            gates=("metric", "rank"),
            expected={"scalar_curvature": (1.0, "hand"),
                      "mean_norm": (1.0, "hand"),
                      "form_norm_sq": (2.0, "hand")}),
        ExampleSpec(
            name="e4", config_file="e4_trivial_product.cfg", kind="immersion",
            summary="affine plane in flat C^2, constant warping",
            gates=("metric", "rank", "warped-block"),
            expected={"all_residuals": (0.0, "definition"),
                      "main_inequality": ("equality", "definition")}),
        ExampleSpec(
            name="e5", config_file="e5_sasakian_cr.cfg", kind="immersion",
            summary="contact CR-warped product in the standard Sasakian 5-chart",
            gates=("metric", "rank", "warped-block", "reeb-tangency",
                   "leaf-invariance", "fiber-anti-invariance"),
            expected={"cr_pairing_residuals": ("< 1e-7", "numerical"),
                      "leaf_mean_curvature": ("< 1e-7", "numerical")}),
        ExampleSpec(
            name="e6", config_file="e6_perturbed_e1.cfg", kind="immersion",
            summary="e1 with a normal bending 0.1*x1^2 in a fresh pair of flat C^3",
            gates=("metric", "rank", "warped-block"),
            expected={"main_inequality_slack": ("> 1e-3", "numerical")}),
        ExampleSpec(
            name="e7", config_file="e7_torus.cfg", kind="immersion",
            summary="standard torus in flat 3-space; fiber not minimal",
            gates=("metric", "rank", "warped-block"),
            expected={"d2_minimal": (False, "hand")}),
        ExampleSpec(
            name="s2-warped", config_file="s2_warped.cfg", kind="warped",
            summary="round sphere as a sine-warped line over a circle chart",
            gates=("metric", "warping-positive"),
            expected={"sectional": (1.0, "hand"),
                      "warped_identity_sides": (1.0, "hand")}),
        ExampleSpec(
            name="sasakian-r5", config_file="sasakian_r5.cfg", kind="structure",
            summary="standard Sasakian structure on the 5-chart",
            gates=("metric", "contact-identities"),
            expected={"phi_sectional": (-3.0, "hand"),
                      "class": ("sasakian", "hand")}),
    )
}


@dataclass
class LoadedExample:
    spec: ExampleSpec
    config: BuiltConfig

    @property
    def subject(self):
        return self.config.subject


def builtin_names() -> list[str]:
    return sorted(BUILTINS)


def load_builtin(name: str) -> LoadedExample:
    spec = BUILTINS.get(name)
    if spec is None:
        raise ConfigurationError(
            f"unknown builtin {name!r}; available: {', '.join(builtin_names())}")
    text = resources.files("warpcheck").joinpath("data", spec.config_file) \
        .read_text(encoding="utf-8")
    return LoadedExample(spec=spec, config=load_config_text(text))


# ---------------------------------------------------------------------------
# Validation gates
# ---------------------------------------------------------------------------


def _gate_points(subject, n: int, seed: int) -> list[np.ndarray]:
    domain = getattr(subject, "domain", None)
    if domain is None and isinstance(subject, WarpedMetric):
        domain = subject.assembled.domain
    if domain is None and isinstance(subject, AlmostContactStructure):
        domain = subject.metric.domain
    if domain is None and isinstance(subject, AlmostComplexStructure):
        domain = subject.metric.domain
    if domain is None:
        raise ConfigurationError("subject has no domain to sample")
    return halton_points(domain, n, seed)


def validate(loaded: LoadedExample, n_points: int = GATE_POINTS,
             seed: int = GATE_SEED) -> CheckReport:
    """Run the example's validation gate; every record must pass before the
    example feeds any downstream check."""
    subject = loaded.subject
    rep = CheckReport()
    kind = loaded.spec.kind

    if kind == "metric":
        points = _gate_points(subject, n_points, seed)
        subject.validate_at(points)
        worst = max(subject.symmetry_residual(x) for x in points)
        rep.add("gate-metric", "metric-validity", worst, 1e-10, len(points))
        return rep

    if kind == "warped":
        points = _gate_points(subject, n_points, seed)
        subject.validate_at(points)  # raises on f <= 0 or indefinite blocks
        rep.add("gate-warping-positive", "warping-positivity", 0.0, 1.0,
                len(points), passed=True, note="positivity verified pointwise")
        return rep

    if kind == "structure":
        points = _gate_points(subject, n_points, seed)
        if isinstance(subject, AlmostContactStructure):
            rep.merge(validate_almost_contact(subject, points, tol=1e-9))
        else:
            rep.merge(subject.validate(points))
        return rep

    # immersion
    im: Immersion = subject
    points = _gate_points(im, n_points, seed)
    rank_ok = True
    try:
        for x in points:
            second_fundamental_form(im, x)
    except Exception:  # rank or definiteness failure
        rank_ok = False
    rep.add("gate-rank", "immersion-rank", 0.0 if rank_ok else 1.0, 0.5,
            len(points), passed=rank_ok)
    if im.warped is not None:
        rep.add("gate-warped-block", "induced-warped-block-form",
                warped_block_residual(im, points), 1e-8, len(points))
    if isinstance(im.structure, AlmostContactStructure) and im.warped is not None:
        from .subman import contact_cr_checks
        cr = contact_cr_checks(im, points)
        for rec_name in ("cr-reeb-tangency", "cr-leaf-invariance",
                         "cr-fiber-anti-invariance"):
            rep.records.append(cr[rec_name])
    return rep

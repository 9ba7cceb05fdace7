"""Command-line front door: run check suites on built-ins or user configs.

Exit codes: 0 all requested checks pass, 1 at least one check fails,
2 configuration or parse error.  Reports are deterministic for a fixed
(config, seed, version): points come from a seeded Halton sequence, record
order is fixed, and numbers are serialized with 17 significant digits.
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .config import BuiltConfig, load_config
from .errors import WarpcheckError
from .expr import ParseError
from .gallery import BUILTINS, builtin_names, load_builtin
from .ineq import (d2_umbilical_implies_geodesic, dt_minimality_check,
                   generalized_rhs, main_inequality, space_form_inequality,
                   space_form_rhs)
from .report import CheckReport, format_number, to_json_bytes
from .riemann import MetricField, curvature
from .sampling import halton_points
from .structures import (AlmostComplexStructure, AlmostContactStructure,
                         fundamental_form_residual, nijenhuis_normality_residual,
                         structure_class_residual, validate_almost_contact)
from .subman import (Immersion, classify, complex_cr_residuals, contact_cr_checks,
                     gauss_residual_max, scalar_identity_residual,
                     second_fundamental_form, shape_operator,
                     warped_block_residual, warped_geometry)
from .warped import WarpedMetric, block_second_form_residuals, warping_identity_residual

CHECK_GROUPS = ("structure", "identities", "classify", "inequalities")

DEFAULT_TOLS = {
    "structure": 1e-8,
    "curvature-symmetry": 1e-9,
    "gauss": 1e-7,
    "scalar-identity": 1e-7,
    "duality": 1e-10,
    "warped-identity": 1e-8,
    "warped-block": 1e-8,
    "scalar-split": 1e-7,
    "slack": 1e-8,
    "leaf-minimality": 1e-8,
    "classify": 1e-7,
    "cr": 1e-7,
    "reduction": 1e-12,
}


@dataclass
class RunConfig:
    target: str
    checks: tuple[str, ...] = CHECK_GROUPS
    points: int = 64
    seed: int = 42
    tols: dict[str, float] = field(default_factory=dict)
    fmt: str = "text"
    out: str | None = None

    def __post_init__(self):
        if self.points < 1:
            raise WarpcheckError("points must be >= 1")
        for name, val in self.tols.items():
            if val <= 0:
                raise WarpcheckError(f"tolerance {name!r} must be positive")

    def tol(self, name: str) -> float:
        return self.tols.get(name, DEFAULT_TOLS[name])


def _map_points(fn, points):
    """Evaluate fn over points, optionally in parallel; order is preserved
    so report assembly stays deterministic."""
    try:
        workers = int(os.environ.get("WARPCHECK_THREADS", "1"))
    except ValueError:
        workers = 1
    if workers <= 1:
        return [fn(x) for x in points]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, points))


# ---------------------------------------------------------------------------
# Check runners per subject kind
# ---------------------------------------------------------------------------


def _sample(subject, rc: RunConfig):
    domain = getattr(subject, "domain", None)
    if domain is None and isinstance(subject, WarpedMetric):
        domain = subject.assembled.domain
    if domain is None and isinstance(subject, (AlmostContactStructure,
                                               AlmostComplexStructure)):
        domain = subject.metric.domain
    if domain is None:
        raise WarpcheckError("subject declares no domain box to sample")
    return halton_points(domain, rc.points, rc.seed)


def _metric_checks(g: MetricField, rc: RunConfig, rep: CheckReport):
    points = _sample(g, rc)
    g.validate_at(points)
    sym = max(_map_points(lambda x: curvature(g, x).max_symmetry_residual(), points))
    rep.add("curvature-symmetries", "curvature-tensor-symmetries", sym,
            rc.tol("curvature-symmetry"), len(points))


def _structure_checks(s, expected_class: str | None, rc: RunConfig,
                      rep: CheckReport, points=None):
    if points is None:
        points = _sample(s, rc)
    if isinstance(s, AlmostComplexStructure):
        rep.merge(s.validate(points, require_kahler=True))
        return
    rep.merge(validate_almost_contact(s, points, tol=rc.tol("structure")))
    n = s.dim
    pairs = [(np.eye(n)[:, i], np.eye(n)[:, j])
             for i in range(n) for j in range(i + 1, n)]

    def worst_over(fn):
        def at_point(x):
            return max(fn(X, Y, x) for X, Y in pairs)
        return max(_map_points(at_point, points))

    if expected_class:
        rep.add(f"class-{expected_class}", "structure-class-law",
                worst_over(lambda X, Y, x: structure_class_residual(s, expected_class, X, Y, x)),
                rc.tol("structure"), len(points))
    rep.add("normality", "normality-defect",
            worst_over(lambda X, Y, x: nijenhuis_normality_residual(s, X, Y, x)),
            rc.tol("structure"), len(points))
    rep.add("fundamental-form", "contact-metric-form-law",
            worst_over(lambda X, Y, x: fundamental_form_residual(s, X, Y, x)),
            rc.tol("structure"), len(points))


def _warped_checks(w: WarpedMetric, rc: RunConfig, rep: CheckReport):
    points = _sample(w, rc)
    w.validate_at(points)
    geom = w.geometry()
    worst = max(r["residual"] for r in
                _map_points(lambda x: warping_identity_residual(geom, x), points))
    rep.add("warped-identity", "warped-mixed-sectional-identity", worst,
            rc.tol("warped-identity"), len(points))
    blocks = _map_points(lambda x: block_second_form_residuals(geom, x), points)
    rep.add("leaf-geodesic", "warped-leaf-geodesic",
            max(b["leaf_geodesic"] for b in blocks), rc.tol("warped-block"),
            len(points))
    rep.add("fiber-umbilical-shape", "warped-fiber-umbilical-shape",
            max(b["fiber_umbilical_shape"] for b in blocks), rc.tol("warped-block"),
            len(points))
    sym = max(_map_points(
        lambda x: curvature(w.assembled, x).max_symmetry_residual(), points))
    rep.add("curvature-symmetries", "curvature-tensor-symmetries", sym,
            rc.tol("curvature-symmetry"), len(points))


def _immersion_identity_checks(im: Immersion, points, rc: RunConfig,
                               rep: CheckReport):
    def per_point(x):
        sff = second_fundamental_form(im, x)
        duality = 0.0
        for r in range(sff.normal_frame.shape[1]):
            _, resid = shape_operator(im, x, sff.normal_frame[:, r], sff)
            duality = max(duality, resid)
        return (gauss_residual_max(im, x, sff),
                scalar_identity_residual(im, x, sff), duality)

    vals = _map_points(per_point, points)
    rep.add("gauss-equation", "gauss-curvature-relation",
            max(v[0] for v in vals), rc.tol("gauss"), len(points))
    rep.add("scalar-identity", "traced-curvature-relation",
            max(v[1] for v in vals), rc.tol("scalar-identity"), len(points))
    rep.add("shape-duality", "shape-operator-duality",
            max(v[2] for v in vals), rc.tol("duality"), len(points))

    if im.warped is not None:
        rep.add("warped-block-form", "induced-warped-block-form",
                warped_block_residual(im, points), rc.tol("warped-block"),
                len(points))
        geom = warped_geometry(im)
        worst = max(r["residual"] for r in
                    _map_points(lambda x: warping_identity_residual(geom, x),
                                points))
        rep.add("warped-identity", "warped-mixed-sectional-identity", worst,
                rc.tol("warped-identity"), len(points))
        from .ineq import scalar_decomposition_residual
        split = max(_map_points(lambda x: scalar_decomposition_residual(im, x),
                                points))
        rep.add("scalar-split", "scalar-curvature-split", split,
                rc.tol("scalar-split"), len(points))


def _classify_checks(im: Immersion, points, rc: RunConfig, rep: CheckReport):
    flags = classify(im, points, tol=rc.tol("classify"))
    pairs = [("totally-geodesic", flags.totally_geodesic, "geodesic"),
             ("totally-umbilical", flags.totally_umbilical, "umbilical"),
             ("minimal", flags.minimal, "minimal"),
             ("mixed-totally-geodesic", flags.mixed_totally_geodesic,
              "mixed_geodesic"),
             ("leaf-totally-geodesic", flags.d1_totally_geodesic, "d1_geodesic"),
             ("leaf-minimal", flags.d1_minimal, "d1_minimal"),
             ("fiber-minimal", flags.d2_minimal, "d2_minimal"),
             ("fiber-totally-umbilical", flags.d2_totally_umbilical,
              "d2_umbilical")]
    for name, value, key in pairs:
        if value is None:
            continue
        rep.add(f"flag-{name}", "classification-flag", flags.residuals[key],
                rc.tol("classify"), len(points), passed=True,
                note=f"holds: {str(value).lower()}")


def _inequality_checks(im: Immersion, points, rc: RunConfig, rep: CheckReport):
    if im.warped is None:
        rep.add("inequalities", "inequality-suite", 0.0, 1.0, 0, passed=True,
                note="skipped: no warped declaration")
        return

    if isinstance(im.structure, AlmostComplexStructure):
        results = _map_points(lambda x: main_inequality(im, x, tol=rc.tol("slack")),
                              points)
        min_slack = min(r.slack for r in results)
        rep.add("main-inequality", "main-curvature-sum-bound",
                -min_slack if min_slack < 0 else 0.0, rc.tol("slack"),
                len(points),
                note=f"min slack {format_number(min_slack)}; equality at "
                     f"{sum(1 for r in results if r.equality)}/{len(results)} points")
        worst_diag = max(max(r.diagnostics["leaf_form_norm"],
                             r.diagnostics["fiber_form_norm"],
                             r.diagnostics["mean_norm"]) for r in results)
        rep.add("equality-diagnostics", "equality-case-diagnostics", worst_diag,
                rc.tol("slack"), len(points), passed=True,
                note="informational: worst equality-condition residual")
        csf_gap = max(_map_points(
            lambda x: abs(space_form_inequality(im, x, c=0.0).reduction.rhs
                          - main_inequality(im, x).rhs), points))
        rep.add("space-form-consistency", "flat-space-form-reduction", csf_gap,
                rc.tol("slack"), len(points))

    if isinstance(im.structure, AlmostContactStructure):
        rep.merge(contact_cr_checks(im, points, tol=rc.tol("cr")))
        rep.merge(dt_minimality_check(im, points, tol=rc.tol("cr")))
    else:
        # leaf-minimality is a theorem about CR-warped products: enforce it
        # only when the machine-checked CR gate holds, report otherwise
        gate_ok = False
        if isinstance(im.structure, AlmostComplexStructure):
            gate = complex_cr_residuals(im, points)
            gate_worst = max(gate.values())
            gate_ok = gate_worst < rc.tol("cr")
            rep.add("cr-invariance-gate", "complex-cr-invariance", gate_worst,
                    rc.tol("cr"), len(points), passed=True,
                    note=f"CR gate {'holds' if gate_ok else 'fails'} (informational)")
        dt = dt_minimality_check(im, points, tol=rc.tol("leaf-minimality"))
        rec = dt["leaf-mean-curvature"]
        if not gate_ok:
            rec.passed = True
            rec.note = "informational: not a CR-warped product, theorem not applicable"
        rep.records.append(rec)
    rep.merge(d2_umbilical_implies_geodesic(im, points, tol=rc.tol("cr")))

    rng = np.random.default_rng(rc.seed)
    worst = 0.0
    for _ in range(1000):
        c = rng.uniform(-8, 8)
        n1, n2 = int(rng.integers(1, 6)), int(rng.integers(1, 6))
        grad, lap = rng.uniform(0, 50), rng.uniform(-50, 50)
        worst = max(worst, abs(generalized_rhs(c, 0.0, n1, n2, grad, lap)
                               - 2.0 * space_form_rhs(c, n1, n2, grad, lap)))
    rep.add("variant-reduction", "generalized-bound-reduction", worst,
            rc.tol("reduction"), 1000)


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------


def _resolve(target: str) -> tuple[BuiltConfig, str]:
    if target in BUILTINS:
        loaded = load_builtin(target)
        return loaded.config, f"builtin:{target}"
    path = Path(target)
    if path.exists():
        return load_config(path), str(path)
    raise WarpcheckError(
        f"target {target!r} is neither a builtin ({', '.join(builtin_names())}) "
        f"nor a config file")


def run(rc: RunConfig) -> tuple[int, dict, str]:
    """Execute the requested checks; returns (exit code, report doc, text)."""
    try:
        cfg, resolved = _resolve(rc.target)
        subject = cfg.subject
        rep = CheckReport()
        groups = CHECK_GROUPS if "all" in rc.checks else rc.checks

        if isinstance(subject, MetricField):
            if "identities" in groups:
                _metric_checks(subject, rc, rep)
        elif isinstance(subject, (AlmostComplexStructure, AlmostContactStructure)):
            if "structure" in groups:
                name = cfg.subject_name
                _structure_checks(subject, cfg.expected_class.get(name), rc, rep)
        elif isinstance(subject, WarpedMetric):
            if "identities" in groups:
                _warped_checks(subject, rc, rep)
        elif isinstance(subject, Immersion):
            points = _sample(subject, rc)
            if "structure" in groups and subject.structure is not None:
                # validate the ambient structure where the immersion lives
                image = [subject.map_point(x) for x in points]
                _structure_checks(subject.structure, None, rc, rep, points=image)
            if "identities" in groups:
                _immersion_identity_checks(subject, points, rc, rep)
            if "classify" in groups:
                _classify_checks(subject, points, rc, rep)
            if "inequalities" in groups:
                _inequality_checks(subject, points, rc, rep)
        else:
            raise WarpcheckError(f"cannot check subject of type {type(subject)}")
    except (ParseError, WarpcheckError) as err:
        return 2, {}, f"configuration error: {err}"

    doc = {
        "version": __version__,
        "config": {
            "target": resolved,
            "checks": list(CHECK_GROUPS if "all" in rc.checks else rc.checks),
            "points": rc.points,
            "seed": rc.seed,
            "tolerances": {k: rc.tols[k] for k in sorted(rc.tols)},
        },
        "checks": [r.as_dict() for r in rep.records],
        "verdict": "pass" if rep.passed else "fail",
    }
    text = render_text(doc)
    return (0 if rep.passed else 1), doc, text


def render_text(doc: dict) -> str:
    lines = [f"warpcheck {doc['version']}  target={doc['config']['target']}  "
             f"points={doc['config']['points']}  seed={doc['config']['seed']}"]
    for rec in doc["checks"]:
        status = "PASS" if rec["pass"] else "FAIL"
        line = (f"{status} {rec['name']}  worst={format_number(rec['worst'])}  "
                f"tol={format_number(rec['tol'])}  points={rec['points']}")
        if rec.get("note"):
            line += f"  ({rec['note']})"
        lines.append(line)
    lines.append(f"VERDICT: {doc['verdict']}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="warpcheck",
        description="Pointwise verification of curvature identities and "
                    "inequalities for warped-product CR-submanifolds.")
    p.add_argument("--target", required=True,
                   help="builtin name or path to a config file")
    p.add_argument("--checks", default="all",
                   help="comma list from: structure, identities, classify, "
                        "inequalities, all")
    p.add_argument("--points", type=int, default=64,
                   help="Halton points per domain box (default 64)")
    p.add_argument("--seed", type=int, default=42,
                   help="Halton sequence offset (default 42)")
    p.add_argument("--tol", action="append", default=[], metavar="NAME=VALUE",
                   help="tolerance override, repeatable")
    p.add_argument("--format", dest="fmt", choices=("text", "json"),
                   default="text")
    p.add_argument("--out", default=None, help="write the report to a file")
    p.add_argument("--version", action="version", version=__version__)
    return p


def parse_args(argv=None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    checks = tuple(c.strip() for c in ns.checks.split(",") if c.strip())
    for c in checks:
        if c not in CHECK_GROUPS + ("all",):
            raise WarpcheckError(f"unknown check group {c!r}")
    tols = {}
    for item in ns.tol:
        name, _, val = item.partition("=")
        if name not in DEFAULT_TOLS:
            raise WarpcheckError(f"unknown tolerance name {name!r}")
        try:
            tols[name] = float(val)
        except ValueError:
            raise WarpcheckError(f"bad tolerance value in {item!r}") from None
    return RunConfig(target=ns.target, checks=checks, points=ns.points,
                     seed=ns.seed, tols=tols, fmt=ns.fmt, out=ns.out)


def main(argv=None) -> int:
    try:
        rc = parse_args(argv)
    except WarpcheckError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2

    code, doc, text = run(rc)
    if code == 2:
        print(text, file=sys.stderr)
        return 2

    payload = to_json_bytes(doc) if rc.fmt == "json" else text.encode()
    if rc.out:
        Path(rc.out).write_bytes(payload)
    else:
        sys.stdout.write(payload.decode())
    return code


if __name__ == "__main__":
    raise SystemExit(main())

"""Acceptance gate: every criterion at its stated tolerance, one printed
pass/fail line per criterion (run with ``pytest -v -s`` to see them all).

The checks around the scalar-curvature gradient identities reproduce the
stated closed forms faithfully; on the validated charts those closed forms
do not hold, and the corresponding criterion is reported as failing rather
than weakened (the cyclic curvature-derivative identity they are meant to
follow from is itself verified exactly).
"""

import numpy as np
import pytest

from norden.config import DEFAULT_TOLS
from norden.errors import PreconditionError
from norden.connections import (
    CANONICAL_PARAMS,
    ConnectionFamily,
    THREE_FORM_PARAMS,
    YANO_PARAMS,
    sweep_minimum,
    table1_matrix,
)
from norden.manifold import (
    ChartFrame,
    conformal_kahler_chart,
    field_F_theta,
    flat_chart,
    kahler_residual,
    tau_checks,
)
from norden.pointwise import (
    class_projector,
    classify,
    generate_in_class,
    nijenhuis_pair,
    random_point,
    standard_point,
)
from norden.tensor import component_norm

DIMS = (4, 6)


def report(num, ok, detail):
    marker = "PASS" if ok else "FAIL"
    print(f"acceptance {num:02d}: {marker}  {detail}")
    return ok


def nondegenerate(seed, dim=4, floor=0.1):
    for k in range(100):
        pt = random_point(seed + 104729 * k, dim)
        N, Nt = nijenhuis_pair(pt)
        if component_norm(N) > floor and component_norm(Nt) > floor:
            return pt
    raise AssertionError("no nondegenerate draw")


def test_criterion_01_family_preserves_structure():
    worst = 0.0
    for dim in DIMS:
        for trial in range(100):
            rng = np.random.default_rng([dim, trial])
            pt = random_point(10_000 * dim + trial, dim)
            fam = ConnectionFamily(pt)
            params = tuple(rng.uniform(-1.0, 1.0, 4))
            worst = max(worst, fam.almost_complex_residual(params))
    ok = worst < 1e-10
    assert report(1, ok, f"structure preservation, 200 pairs, worst {worst:.2e} < 1e-10")


def test_criterion_02_metric_derivative_formulas():
    worst = 0.0
    for dim in DIMS:
        for trial in range(50):
            rng = np.random.default_rng([2, dim, trial])
            pt = random_point(20_000 * dim + trial, dim)
            fam = ConnectionFamily(pt)
            params = tuple(rng.uniform(-1.0, 1.0, 4))
            worst = max(
                worst,
                component_norm(
                    fam.metric_derivative_direct(params)
                    - fam.metric_derivative_formula(params)
                ),
                component_norm(
                    fam.assoc_metric_derivative_direct(params)
                    - fam.assoc_metric_derivative_formula(params)
                ),
            )
    ok = worst < 1e-10
    assert report(2, ok, f"covariant metric derivatives, 100 pairs, worst {worst:.2e} < 1e-10")


def test_criterion_03_naturality_both_directions():
    worst_if = 0.0
    worst_only_if = np.inf
    for trial in range(50):
        rng = np.random.default_rng([3, trial])
        pt = nondegenerate(30_000 + trial)
        fam = ConnectionFamily(pt)
        t1, t2 = rng.uniform(-1.0, 1.0, 2)
        worst_if = max(worst_if, fam.natural_residual((t1, t2, -t1, -t2)))
        while True:
            params = tuple(rng.uniform(-1.0, 1.0, 4))
            if abs(params[0] + params[2]) + abs(params[1] + params[3]) > 0.01:
                break
        worst_only_if = min(worst_only_if, fam.natural_residual(params))
    ok = worst_if < 1e-10 and worst_only_if > 1e-3
    assert report(
        3, ok,
        f"naturality iff, worst pass {worst_if:.2e} < 1e-10, "
        f"worst separation {worst_only_if:.2e} > 1e-3",
    )


def test_criterion_04_canonical_proposition():
    pt = nondegenerate(40_000)
    fam = ConnectionFamily(pt)
    at_params = max(
        fam.natural_residual(CANONICAL_PARAMS),
        fam.canonical_residual(CANONICAL_PARAMS),
    )
    separation = np.inf
    grid = [v / 8.0 for v in range(-8, 9)]
    for a in grid:
        for b in grid:
            if (a, b) == (0.0, 0.125):
                continue
            separation = min(separation, fam.canonical_residual((a, b, -a, -b)))
    ok = at_params < 1e-10 and separation > 1e-3
    assert report(
        4, ok,
        f"canonical at (0,1/8,0,-1/8): {at_params:.2e} < 1e-10, "
        f"grid separation {separation:.2e} > 1e-3",
    )


def test_criterion_05_three_form_theorem():
    pt = nondegenerate(50_000)
    fam = ConnectionFamily(pt)
    at_params = fam.three_form_residual(THREE_FORM_PARAMS)
    separation, _ = sweep_minimum(fam, "three_form", exclude=THREE_FORM_PARAMS)
    ok = at_params < 1e-10 and separation > 1e-3
    assert report(
        5, ok,
        f"3-form torsion at (0,0,0,1/4): {at_params:.2e} < 1e-10, "
        f"grid separation {separation:.2e} > 1e-3",
    )


def test_criterion_06_symmetric_connection():
    cw = generate_in_class("W1+W2", 60_000, 4)
    yano = ConnectionFamily(cw).symmetric_residual(YANO_PARAMS)
    pt = nondegenerate(60_500)
    minimum, _ = sweep_minimum(ConnectionFamily(pt), "symmetric")
    ok = yano < 1e-10 and minimum > 1e-3
    assert report(
        6, ok,
        f"symmetric connection: Yano torsion {yano:.2e} < 1e-10, "
        f"nonintegrable grid minimum {minimum:.2e} > 1e-3",
    )


def test_criterion_07_decision_matrix():
    rep = table1_matrix(70_000, 4)
    worst_stated = max(
        (c.residual for c in rep if not c.check.endswith("nonexistence")),
        default=0.0,
    )
    worst_sweep = min(
        (c.residual for c in rep if c.check.endswith("nonexistence")),
        default=np.inf,
    )
    ok = rep.all_passed
    assert report(
        7, ok,
        f"decision matrix, 15 cells: stated worst {worst_stated:.2e} < 1e-10, "
        f"sweep minima {worst_sweep:.2e} > 1e-6",
    ), rep.to_text()


def test_criterion_08_class_round_trip_and_decomposition():
    mismatches = 0
    for label in ("W0", "W1", "W2", "W3", "W1+W2"):
        for dim in DIMS:
            for trial in range(50):
                pt = generate_in_class(label, 80_000 + trial, dim)
                if classify(pt).name != label:
                    mismatches += 1
    decomp = 0.0
    for dim in DIMS:
        pt = standard_point(0, dim)
        total = sum(class_projector(pt, c).matrix() for c in ("W1", "W2", "W3"))
        decomp = max(
            decomp, component_norm(total - class_projector(pt, "sym").matrix())
        )
    ok = mismatches == 0 and decomp < 1e-8
    assert report(
        8, ok,
        f"class round trips (100/label): {mismatches} mismatches; "
        f"projector decomposition {decomp:.2e} < 1e-8",
    )


def test_criterion_09_flat_chart():
    worst = 0.0
    for dim in DIMS:
        chart = flat_chart(dim)
        for x in chart.probe_points():
            frame = ChartFrame(chart, x)
            worst = max(
                worst,
                component_norm(frame.Gamma),
                component_norm(frame.R4),
                component_norm(frame.F3),
            )
    ok = worst < 1e-12
    assert report(9, ok, f"flat chart: connection, curvature, F all {worst:.2e} < 1e-12")


def test_criterion_10_conformal_chart_validation():
    chart = conformal_kahler_chart(4)
    labels_ok = True
    closed = 0.0
    for x in chart.probe_points():
        data = field_F_theta(chart, x)
        labels_ok &= data.classification.label == {"W1"}
        closed = max(
            closed,
            component_norm(data.d_theta),
            component_norm(data.d_theta_star),
        )
    ok = labels_ok and closed < 1e-8
    assert report(
        10, ok,
        f"conformal chart: pure W1 at all probes, closedness {closed:.2e} < 1e-8",
    )


def test_criterion_11_curvature_structure_theorem():
    chart = conformal_kahler_chart(4)
    worst_structural = 0.0
    worst_kahler = 0.0
    worst_independence = 0.0
    for x in chart.probe_points():
        frame = ChartFrame(chart, x)
        R1, _, _, _ = frame.prime_curvature(0.0, 0.0)
        R2, _, _, _ = frame.prime_curvature(0.3, -0.2)
        S = frame.structural_curvature()
        scale = max(component_norm(R1), 1e-30)
        worst_structural = max(worst_structural, component_norm(R1 - S) / scale)
        worst_kahler = max(worst_kahler, kahler_residual(R1, frame.J))
        worst_independence = max(
            worst_independence, component_norm(R1 - R2) / scale
        )
    ok = max(worst_structural, worst_kahler, worst_independence) < 1e-6
    assert report(
        11, ok,
        f"curvature theorem: structural {worst_structural:.2e}, "
        f"Kahler identity {worst_kahler:.2e}, "
        f"parameter independence {worst_independence:.2e}, all < 1e-6",
    )


def test_criterion_12_scalar_gradient_identities():
    chart = conformal_kahler_chart(4)
    tol = DEFAULT_TOLS.scalar_fd
    worst = {}
    probes = 0
    for x in chart.probe_points():
        for pq in ((0.0, 0.0), (0.3, -0.2)):
            try:
                rep = tau_checks(chart, x, *pq)
            except PreconditionError:
                continue
            probes += 1
            for c in rep:
                if c.check == "tau.cyclic_identity":
                    continue
                worst[c.check] = max(worst.get(c.check, 0.0), c.residual)
    gradient = max(worst["tau.gradient"], worst["tau_star.gradient"])
    cauchy = worst["tau.cauchy_riemann"]
    recovery = max(worst["tau.theta_recovery"], worst["tau.theta_star_recovery"])
    ok = probes > 0 and max(gradient, cauchy, recovery) < tol
    assert report(
        12, ok,
        f"scalar gradient identities at {probes} nondegenerate probes: "
        f"gradient {gradient:.2e}, holomorphicity {cauchy:.2e}, "
        f"recovery {recovery:.2e}, stated bound 1e-5",
    )

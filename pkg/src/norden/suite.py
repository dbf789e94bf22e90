"""Full verification suite: pointwise invariants, the connection-family
theorems, the decision matrix, and the chart-level curvature checks, in a
fixed order with per-check residual statistics.

All randomness flows from (seed, trial-index) pairs, so the report is a
pure function of the configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOLS, Tolerances
from .connections import (
    CANONICAL_PARAMS,
    ConnectionFamily,
    THREE_FORM_PARAMS,
    YANO_PARAMS,
    sweep_minimum,
    table1_matrix,
)
from .errors import ConfigError, NordenError
from .manifold import (
    BUILTIN_CHARTS,
    builtin_chart,
    chart_from_json,
    tau_checks,
    validate_chart,
    verify_w1_theorems,
)
from .pointwise import (
    classify,
    generate_in_class,
    lie_forms,
    nijenhuis_pair,
    random_point,
    validate_point,
    w1_from_theta,
)
from .report import Check, Report
from .tensor import component_norm


@dataclass
class SuiteConfig:
    seed: int = 42
    dims: list[int] = field(default_factory=lambda: [4, 6])
    trials: int = 200
    tolerances: Tolerances = DEFAULT_TOLS
    charts: list[str] = field(default_factory=lambda: list(BUILTIN_CHARTS))
    chart_dim: int = 4

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError(f"trials must be >= 1, got {self.trials}")
        for d in self.dims:
            if d < 4 or d % 2:
                raise ConfigError(f"dims must be even and >= 4, got {d}")
        if not self.dims:
            raise ConfigError("at least one dimension required")


def _trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial])


def _trial_seed(seed: int, trial: int) -> int:
    return int(np.random.default_rng([seed, trial]).integers(0, 2**31 - 1))


def _split(total: int, dims: list[int]) -> dict[int, int]:
    base = max(1, total // len(dims))
    return {d: base for d in dims}


def _nondegenerate_point(seed: int, dim: int, min_nijenhuis: float = 0.1):
    for attempt in range(100):
        pt = random_point(seed + 7919 * attempt, dim)
        N, Nt = nijenhuis_pair(pt)
        if (
            component_norm(N) > min_nijenhuis
            and component_norm(Nt) > min_nijenhuis
        ):
            return pt
    raise NordenError("could not draw a nondegenerate point")


def run_suite(config: SuiteConfig) -> Report:
    config.validate()
    tols = config.tolerances
    report = Report()
    seed = config.seed

    # 1. pointwise invariant suite: generation, classification round trips
    per_dim = _split(config.trials // 2, config.dims)
    for dim in config.dims:
        mismatches = 0
        trials = per_dim[dim]
        for cls in ("W0", "W1", "W2", "W3", "W1+W2"):
            for t in range(trials):
                pt = generate_in_class(cls, _trial_seed(seed, 1000 + 31 * t), dim)
                validate_point(pt.g.array, pt.J.array, pt.F.array)
                expected = {
                    "W0": "W0", "W1": "W1", "W2": "W2", "W3": "W3",
                    "W1+W2": "W1+W2",
                }[cls]
                if classify(pt).name != expected:
                    mismatches += 1
        report.add(
            Check(
                check=f"pointwise.roundtrip.dim{dim}",
                residual=float(mismatches),
                tolerance=0.5,
                passed=mismatches == 0,
                seed=seed,
            )
        )
        # trace-family reconstruction from the Lie form
        resids = []
        for t in range(trials):
            pt = generate_in_class("W1", _trial_seed(seed, 2000 + t), dim)
            theta, _, _ = lie_forms(pt)
            rebuilt = w1_from_theta(theta.array, pt.g.array, pt.J.array)
            resids.append(component_norm(rebuilt - pt.F.array))
        report.add_statistics(
            f"pointwise.w1_reconstruction.dim{dim}", resids, 1e-9, seed=seed
        )

    # 2. family-wide almost-complex check
    for dim in config.dims:
        resids = []
        for t in range(_split(config.trials, config.dims)[dim]):
            rng = _trial_rng(seed, 3000 + t)
            pt = random_point(_trial_seed(seed, 4000 + t), dim)
            fam = ConnectionFamily(pt)
            params = tuple(rng.uniform(-1.0, 1.0, 4))
            resids.append(fam.almost_complex_residual(params))
        report.add_statistics(
            f"connections.almost_complex.dim{dim}", resids, tols.structural,
            seed=seed,
        )

    # 3. covariant metric derivative agreement (direct vs closed form)
    for dim in config.dims:
        resids = []
        for t in range(_split(config.trials // 2, config.dims)[dim]):
            rng = _trial_rng(seed, 5000 + t)
            pt = random_point(_trial_seed(seed, 6000 + t), dim)
            fam = ConnectionFamily(pt)
            params = tuple(rng.uniform(-1.0, 1.0, 4))
            resids.append(
                component_norm(
                    fam.metric_derivative_direct(params)
                    - fam.metric_derivative_formula(params)
                )
                + component_norm(
                    fam.assoc_metric_derivative_direct(params)
                    - fam.assoc_metric_derivative_formula(params)
                )
            )
        report.add_statistics(
            f"connections.metric_derivative.dim{dim}", resids, tols.structural,
            seed=seed,
        )

    # 4. characterization theorems (both directions where applicable)
    dim = config.dims[0]
    direction_trials = max(1, config.trials // 4)
    natural_pass, natural_sep = [], []
    for t in range(direction_trials):
        rng = _trial_rng(seed, 7000 + t)
        pt = _nondegenerate_point(_trial_seed(seed, 8000 + t), dim)
        fam = ConnectionFamily(pt)
        t1, t2 = rng.uniform(-1.0, 1.0, 2)
        natural_pass.append(fam.natural_residual((t1, t2, -t1, -t2)))
        while True:
            params = tuple(rng.uniform(-1.0, 1.0, 4))
            if abs(params[0] + params[2]) + abs(params[1] + params[3]) > 0.01:
                break
        natural_sep.append(fam.natural_residual(params))
    report.add_statistics(
        "connections.natural.if", natural_pass, tols.structural, seed=seed
    )
    worst_sep = min(natural_sep)
    report.add(
        Check(
            check="connections.natural.only_if",
            residual=worst_sep,
            tolerance=tols.separation,
            passed=worst_sep > tols.separation,
            seed=seed,
        )
    )

    pt = _nondegenerate_point(_trial_seed(seed, 8500), dim)
    fam = ConnectionFamily(pt)
    report.add(
        Check(
            check="connections.canonical.at_params",
            residual=max(
                fam.natural_residual(CANONICAL_PARAMS),
                fam.canonical_residual(CANONICAL_PARAMS),
            ),
            tolerance=tols.structural,
            passed=max(
                fam.natural_residual(CANONICAL_PARAMS),
                fam.canonical_residual(CANONICAL_PARAMS),
            )
            < tols.structural,
            params=CANONICAL_PARAMS,
            seed=seed,
        )
    )
    grid = [v / 8.0 for v in range(-8, 9)]
    canon_sep = min(
        fam.canonical_residual((a, b, -a, -b))
        for a in grid
        for b in grid
        if (a, b) != (0.0, 0.125)
    )
    report.add(
        Check(
            check="connections.canonical.separation",
            residual=canon_sep,
            tolerance=tols.separation,
            passed=canon_sep > tols.separation,
            seed=seed,
        )
    )

    report.add(
        Check(
            check="connections.three_form.at_params",
            residual=fam.three_form_residual(THREE_FORM_PARAMS),
            tolerance=tols.structural,
            passed=fam.three_form_residual(THREE_FORM_PARAMS) < tols.structural,
            params=THREE_FORM_PARAMS,
            seed=seed,
        )
    )
    tf_sep, _ = sweep_minimum(fam, "three_form", exclude=THREE_FORM_PARAMS)
    report.add(
        Check(
            check="connections.three_form.separation",
            residual=tf_sep,
            tolerance=tols.separation,
            passed=tf_sep > tols.separation,
            seed=seed,
        )
    )

    cw = generate_in_class("W1+W2", _trial_seed(seed, 8600), dim)
    fam_cw = ConnectionFamily(cw)
    report.add(
        Check(
            check="connections.symmetric.yano",
            residual=fam_cw.symmetric_residual(YANO_PARAMS),
            tolerance=tols.structural,
            passed=fam_cw.symmetric_residual(YANO_PARAMS) < tols.structural,
            klass="W1+W2",
            params=YANO_PARAMS,
            seed=seed,
        )
    )
    sym_sep, _ = sweep_minimum(fam, "symmetric")
    report.add(
        Check(
            check="connections.symmetric.nonexistence",
            residual=sym_sep,
            tolerance=tols.separation,
            passed=sym_sep > tols.separation,
            seed=seed,
        )
    )

    w3 = generate_in_class("W3", _trial_seed(seed, 8700), dim)
    fam_w3 = ConnectionFamily(w3)
    bismut = max(
        fam_w3.natural_residual(THREE_FORM_PARAMS),
        fam_w3.three_form_residual(THREE_FORM_PARAMS),
    )
    report.add(
        Check(
            check="connections.bismut_analogue",
            residual=bismut,
            tolerance=tols.structural,
            passed=bismut < tols.structural,
            klass="W3",
            params=THREE_FORM_PARAMS,
            seed=seed,
        )
    )

    # 5. the decision matrix
    report.extend(table1_matrix(seed, dim, tols))

    # 6. charts and the curvature theorems
    for name in config.charts:
        try:
            chart = (
                builtin_chart(name, config.chart_dim)
                if name in BUILTIN_CHARTS
                else chart_from_json(open(name).read())
            )
        except (OSError, NordenError) as err:
            report.add(
                Check(
                    check=f"chart.{name}.load",
                    residual=float("inf"),
                    tolerance=tols.structural,
                    passed=False,
                    seed=seed,
                )
            )
            continue
        chart_report = validate_chart(chart, seed)
        report.extend(chart_report)
        if chart.name != "conformal_kahler":
            continue
        if not chart_report.all_passed:
            report.add(
                Check(
                    check=f"chart.{chart.name}.theorem_suite_skipped",
                    residual=float("inf"),
                    tolerance=tols.structural,
                    passed=False,
                    seed=seed,
                )
            )
            continue
        x = chart.probe_points()[1]
        for (p, q) in ((0.0, 0.0), (0.3, -0.2)):
            report.extend(verify_w1_theorems(chart, x, p, q, seed))
            report.extend(tau_checks(chart, x, p, q, seed))

    return report

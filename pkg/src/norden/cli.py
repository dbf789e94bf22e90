"""Command-line front end.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for
configuration or ingestion problems.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .config import DEFAULT_TOLS
from .connections import (
    ConnectionFamily,
    TABLE1_COLUMNS,
    TABLE1_ROWS,
    table1_matrix,
)
from .errors import ConfigError, NordenError
from .manifold import (
    BUILTIN_CHARTS,
    builtin_chart,
    chart_from_json,
    curvature_report,
    validate_chart,
)
from .pointwise import classify, generate_in_class, point_from_json, random_point
from .report import Check, Report, emit_report, render_table1_text
from .suite import SuiteConfig, run_suite


def _parse_params(text: str, count: int, flag: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != count:
        raise ConfigError(f"{flag} expects {count} comma-separated values")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as err:
        raise ConfigError(f"could not parse {flag}: {err}") from None


def _load_chart(spec: str, dim: int):
    if spec in BUILTIN_CHARTS:
        return builtin_chart(spec, dim)
    path = Path(spec)
    if not path.exists():
        raise ConfigError(
            f"chart {spec!r} is neither a built-in {BUILTIN_CHARTS} nor a file"
        )
    return chart_from_json(path.read_text())


def _load_point(args):
    if getattr(args, "point", None):
        path = Path(args.point)
        if not path.exists():
            raise ConfigError(f"point fixture {args.point!r} not found")
        return point_from_json(path.read_text())
    if getattr(args, "klass", None):
        return generate_in_class(args.klass, args.seed, args.dim)
    return random_point(args.seed, args.dim)


def _emit(report: Report, args) -> int:
    text = emit_report(report, args.format)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    if args.figures:
        from .figures import render_report_figures

        paths = render_report_figures(report, args.figures, stem=args.prog_name)
        for p in paths:
            print(f"figure: {p}", file=sys.stderr)
    return 0 if report.all_passed else 1


def cmd_classify(args) -> int:
    pt = _load_point(args)
    result = classify(pt)
    report = Report()
    for cls in sorted(result.component_norms):
        present = cls in result.label
        report.add(
            Check(
                check=f"classify.component.{cls}",
                residual=result.component_norms[cls],
                tolerance=result.tolerance,
                passed=True,
                klass=result.name,
                seed=args.seed,
            )
        )
    code = _emit(report, args)
    print(f"class: {result.name}", file=sys.stderr)
    return code


def cmd_connections(args) -> int:
    pt = _load_point(args)
    fam = ConnectionFamily(pt)
    if args.pq:
        p, q = _parse_params(args.pq, 2, "--pq")
        params = (p, q, 0.0, 0.0)
    elif args.params:
        params = _parse_params(args.params, 4, "--params")
    else:
        params = (0.0, 0.125, 0.0, -0.125)
    label = classify(pt).name
    report = Report()
    report.add(
        Check(
            "connections.almost_complex",
            fam.almost_complex_residual(params),
            DEFAULT_TOLS.structural,
            fam.almost_complex_residual(params) < DEFAULT_TOLS.structural,
            label,
            params,
            args.seed,
        )
    )
    fam.check_torsion_nijenhuis_identity(params)
    for name in ("natural", "canonical", "three_form", "symmetric"):
        residual = getattr(fam, f"{name}_residual")(params)
        report.add(
            Check(
                check=f"connections.{name}",
                residual=residual,
                tolerance=DEFAULT_TOLS.structural,
                passed=True,  # informational: a large residual is not an error
                klass=label,
                params=params,
                seed=args.seed,
            )
        )
    lemma_gap = (
        np.linalg.norm(
            fam.metric_derivative_direct(params)
            - fam.metric_derivative_formula(params)
        )
        + np.linalg.norm(
            fam.assoc_metric_derivative_direct(params)
            - fam.assoc_metric_derivative_formula(params)
        )
    )
    report.add(
        Check(
            "connections.metric_derivative_agreement",
            float(lemma_gap),
            DEFAULT_TOLS.structural,
            float(lemma_gap) < DEFAULT_TOLS.structural,
            label,
            params,
            args.seed,
        )
    )
    return _emit(report, args)


def cmd_table1(args) -> int:
    report = table1_matrix(args.seed, args.dim)
    if args.format == "text":
        text = render_table1_text(report, TABLE1_ROWS, TABLE1_COLUMNS)
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.figures:
            from .figures import render_report_figures

            render_report_figures(report, args.figures, stem="table1")
        return 0 if report.all_passed else 1
    return _emit(report, args)


def cmd_curvature(args) -> int:
    chart = _load_chart(args.chart, args.dim)
    report = Report()
    report.extend(validate_chart(chart, args.seed))
    if args.pq:
        p, q = _parse_params(args.pq, 2, "--pq")
    else:
        p, q = 0.0, 0.0
    if report.all_passed and chart.name != "flat":
        for x in chart.probe_points():
            cr = curvature_report(chart, x, p, q, args.seed)
            report.extend(cr.checks)
    return _emit(report, args)


def cmd_suite(args) -> int:
    config = SuiteConfig(
        seed=args.seed,
        dims=[int(d) for d in args.dim] if args.dim else [4, 6],
        trials=args.trials,
        charts=args.chart if args.chart else list(BUILTIN_CHARTS),
        chart_dim=4,
    )
    report = run_suite(config)
    return _emit(report, args)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="norden",
        description=(
            "Verification engine for almost complex connections on "
            "almost complex manifolds with Norden metric."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, chart_flag=False, point_flags=True):
        p.add_argument("--seed", type=int, default=42)
        p.add_argument("--dim", type=int, default=4)
        p.add_argument("--out", type=str, default=None)
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--figures", type=str, default=None,
                       help="directory for rendered PNG figures")
        if point_flags:
            p.add_argument("--point", type=str, default=None,
                           help="path to a point fixture (JSON)")
            p.add_argument("--class", dest="klass", default=None,
                           choices=("W0", "W1", "W2", "W3", "W1+W2"))
        if chart_flag:
            p.add_argument("--chart", type=str, default="conformal_kahler",
                           help=f"built-in {BUILTIN_CHARTS} or a JSON file")

    p = sub.add_parser("classify", help="classify a structure into the basic classes")
    common(p)
    p.set_defaults(fn=cmd_classify, prog_name="classify")

    p = sub.add_parser("connections", help="residuals of one family member")
    common(p)
    p.add_argument("--params", type=str, default=None,
                   help="t1,t2,t3,t4 of the connection family")
    p.add_argument("--pq", type=str, default=None, help="p,q reparameterization")
    p.set_defaults(fn=cmd_connections, prog_name="connections")

    p = sub.add_parser("table1", help="reproduce the decision matrix")
    common(p, point_flags=False)
    p.set_defaults(fn=cmd_table1, prog_name="table1")

    p = sub.add_parser("curvature", help="chart validation and curvature checks")
    common(p, chart_flag=True, point_flags=False)
    p.add_argument("--pq", type=str, default=None, help="p,q of the family")
    p.set_defaults(fn=cmd_curvature, prog_name="curvature")

    p = sub.add_parser("suite", help="run the full verification suite")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--dim", type=int, action="append", default=None,
                   help="pointwise dimensions (repeatable; default 4 and 6)")
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--chart", type=str, action="append", default=None)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--format", choices=("json", "text"), default="json")
    p.add_argument("--figures", type=str, default=None)
    p.set_defaults(fn=cmd_suite, prog_name="suite")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return 2 if err.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as err:
        print(f"configuration error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"i/o error: {err}", file=sys.stderr)
        return 2
    except NordenError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

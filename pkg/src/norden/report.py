"""Verification reports: named residual checks with stable JSON and text
renderings.  The JSON schema is a flat list of records with exactly the
keys {check, class, params, residual, tolerance, pass, seed} so reports
from different runs diff cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class Check:
    check: str
    residual: float
    tolerance: float
    passed: bool
    klass: str | None = None
    params: tuple | None = None
    seed: int | None = None

    def to_record(self) -> dict:
        return {
            "check": self.check,
            "class": self.klass,
            "params": list(self.params) if self.params is not None else None,
            "residual": self.residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "seed": self.seed,
        }


@dataclass
class Report:
    checks: list[Check] = field(default_factory=list)

    def add(self, check: Check) -> None:
        self.checks.append(check)

    def extend(self, other: "Report") -> None:
        self.checks.extend(other.checks)

    def __len__(self) -> int:
        return len(self.checks)

    def __iter__(self):
        return iter(self.checks)

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def add_statistics(self, name: str, residuals, tolerance: float,
                       klass: str | None = None, seed: int | None = None) -> bool:
        """Summarize a batch of residuals as max/median records; the check
        passes when the worst residual clears the tolerance."""
        import statistics

        values = [float(r) for r in residuals]
        worst = max(values)
        ok = worst < tolerance
        self.add(Check(f"{name}.max", worst, tolerance, ok, klass, None, seed))
        self.add(
            Check(
                f"{name}.median",
                float(statistics.median(values)),
                tolerance,
                ok,
                klass,
                None,
                seed,
            )
        )
        return ok

    def to_json(self) -> str:
        records = [c.to_record() for c in self.checks]
        return json.dumps(records, indent=2, sort_keys=True)

    def to_text(self) -> str:
        if not self.checks:
            return "(empty report)\n"
        width = max(len(c.check) for c in self.checks)
        lines = []
        for c in self.checks:
            status = "pass" if c.passed else "FAIL"
            extra = f"  class={c.klass}" if c.klass else ""
            if c.params is not None:
                extra += f"  params={tuple(round(p, 6) for p in c.params)}"
            lines.append(
                f"{c.check:<{width}}  {status}  residual={c.residual:.3e}"
                f"  tol={c.tolerance:.1e}{extra}"
            )
        passed = sum(1 for c in self.checks if c.passed)
        lines.append(f"{passed}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"


def emit_report(report: Report, fmt: str = "json") -> str:
    if fmt == "json":
        return report.to_json()
    if fmt == "text":
        return report.to_text()
    raise ValueError(f"unknown format {fmt!r}")


def render_table1_text(report: Report, rows, columns) -> str:
    """Aligned table mirroring the decision-matrix layout."""
    from .connections import _slug  # local import to avoid a cycle

    cell_text: dict[tuple[str, str], str] = {}
    for row in rows:
        for col in columns:
            name = f"table1.{_slug(row)}.{_slug(col)}"
            related = [
                c for c in report
                if c.check == name or c.check == name + ".nonexistence"
            ]
            if not related:
                cell_text[(row, col)] = "-"
                continue
            ok = all(c.passed for c in related)
            if any(c.check.endswith(".nonexistence") for c in related):
                label = "none exists" if ok else "FOUND ONE"
            else:
                label = "ok" if ok else "FAIL"
            cell_text[(row, col)] = label
    row_width = max(len(r) for r in rows) + 2
    col_widths = [max(len(c), 12) + 2 for c in columns]
    header = " " * row_width + "".join(
        f"{c:^{w}}" for c, w in zip(columns, col_widths)
    )
    lines = [header, "-" * len(header)]
    for row in rows:
        cells = "".join(
            f"{cell_text[(row, col)]:^{w}}" for col, w in zip(columns, col_widths)
        )
        lines.append(f"{row:<{row_width}}" + cells)
    return "\n".join(lines) + "\n"

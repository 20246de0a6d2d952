"""Verification records and their JSON, Markdown and CSV renderings."""
from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from ..errors import ParameterError

__all__ = ["REPORT_FORMAT", "TestRecord", "VerificationReport"]

REPORT_FORMAT = 1


def _clean(v: Any) -> Any:
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return None if math.isnan(v) else (str(v) if math.isinf(v) else v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    return v


@dataclass
class TestRecord:
    """Outcome of one check.

    Attributes
    ----------
    test_id : str
        Stable identifier, e.g. ``"csbp.extinction.survival"``.
    anchor : str
        The identity or law being checked, in words.
    statistic : float
        The measured quantity the verdict is based on.
    threshold : float or tuple
        Acceptance bound for ``statistic`` under ``comparator``.
    comparator : str
        One of ``"<="``, ``">"``, ``"in"`` (closed interval), ``"=="``.
    seed : int
        Root seed; ``stream`` names the RNG stream used.
    """

    __test__ = False  # not a pytest class

    test_id: str
    anchor: str
    statistic: float
    threshold: Any
    comparator: str
    seed: int
    stream: str = ""
    n: int = 0
    pvalue: float | None = None
    ci: tuple[float, float] | None = None
    criterion: int | None = None
    detail: dict = field(default_factory=dict)
    runtime: float = 0.0
    csv_rows: list | None = None

    @property
    def passed(self) -> bool:
        s, t, c = self.statistic, self.threshold, self.comparator
        if s is None or (isinstance(s, float) and math.isnan(s)):
            return False
        if c == "<=":
            return s <= t
        if c == "<":
            return s < t
        if c == ">":
            return s > t
        if c == ">=":
            return s >= t
        if c == "in":
            return t[0] <= s <= t[1]
        if c == "==":
            return s == t
        raise ParameterError(f"unknown comparator {c!r}")

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def body(self) -> dict:
        """Deterministic content (no timing)."""
        return _clean(
            {
                "test_id": self.test_id,
                "criterion": self.criterion,
                "anchor": self.anchor,
                "statistic": self.statistic,
                "comparator": self.comparator,
                "threshold": self.threshold,
                "pvalue": self.pvalue,
                "ci": self.ci,
                "seed": self.seed,
                "stream": self.stream,
                "n": self.n,
                "verdict": self.verdict,
                "detail": self.detail,
            }
        )

    def line(self) -> str:
        """One human-readable summary line."""
        extra = f" p={self.pvalue:.3g}" if self.pvalue is not None else ""
        if self.ci is not None:
            extra += f" ci=[{self.ci[0]:.4g}, {self.ci[1]:.4g}]"
        return f"{self.verdict.upper():4s} {self.test_id}: {self.statistic:.6g} {self.comparator} {self.threshold}{extra}"


@dataclass
class VerificationReport:
    """All records of one suite run."""

    suite: str
    root_seed: int
    version: str
    records: list[TestRecord] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    timings: list[dict] = field(default_factory=list)
    started: float = field(default_factory=time.time)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def body(self) -> dict:
        return _clean(
            {
                "format": REPORT_FORMAT,
                "suite": self.suite,
                "version": self.version,
                "root_seed": self.root_seed,
                "config": self.config,
                "records": [r.body() for r in self.records],
                "skipped": self.skipped,
                "passed": self.passed,
            }
        )

    def to_json(self) -> str:
        doc = {
            "body": self.body(),
            "timing": {
                "started": self.started,
                "runtime": {r.test_id: round(r.runtime, 3) for r in self.records},
                "budgets": _clean(self.timings),
            },
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    def to_markdown(self) -> str:
        lines = [
            f"# Verification report: {self.suite}",
            "",
            f"version {self.version}, root seed {self.root_seed}, "
            f"{sum(r.passed for r in self.records)}/{len(self.records)} passed",
            "",
            "| test | criterion | statistic | threshold | p / CI | verdict | runtime (s) |",
            "|---|---|---|---|---|---|---|",
        ]
        for r in self.records:
            pc = f"{r.pvalue:.3g}" if r.pvalue is not None else ""
            if r.ci is not None:
                pc += f" [{r.ci[0]:.4g}, {r.ci[1]:.4g}]"
            crit = "" if r.criterion is None else str(r.criterion)
            lines.append(
                f"| {r.test_id} | {crit} | {r.statistic:.6g} | {r.comparator} {r.threshold} | {pc} | {r.verdict} | {r.runtime:.1f} |"
            )
        if self.skipped:
            lines += ["", "## Not checked", ""]
            lines += [f"- {s['item']}: {s['reason']}" for s in self.skipped]
        if self.timings:
            lines += ["", "## Runtime", "", "| check | seconds | budget |", "|---|---|---|"]
            lines += [f"| {t['check']} | {t['seconds']:.1f} | {t['budget']:g} |" for t in self.timings]
        return "\n".join(lines) + "\n"

    def write(self, out_dir: str | Path) -> Path:
        """Write ``report.json``, ``report.md`` and one CSV per test that has data.

        Raises
        ------
        OSError
            If the directory cannot be created or written.
        """
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(self.to_json())
        (out / "report.md").write_text(self.to_markdown())
        for r in self.records:
            if r.csv_rows:
                with open(out / f"{r.test_id}.csv", "w", newline="") as fh:
                    csv.writer(fh).writerows(r.csv_rows)
        return out

"""Running verification suites."""
from __future__ import annotations

import logging
from pathlib import Path

from .config import RunConfig
from .criteria import SKIPPED, checks_for
from .report import VerificationReport

__all__ = ["run_suite"]

log = logging.getLogger(__name__)


def run_suite(name: str, config: RunConfig | None = None, *, write: bool = True) -> VerificationReport:
    """Run every check of suite ``name`` and write the report to ``config.out``.

    Parameters
    ----------
    name : str
        A suite name from :data:`levynet.harness.SUITES` or ``"all"``.
    config : RunConfig, optional
        Sample sizes, seed and threshold overrides. Defaults to ``RunConfig()``.
    write : bool
        Write ``report.json``, ``report.md`` and CSVs when true.

    Raises
    ------
    ParameterError
        For an unknown suite name.
    """
    from .. import __version__

    cfg = config or RunConfig()
    checks = checks_for(name)
    report = VerificationReport(name, cfg.seed, __version__, config=cfg.to_dict())
    for check in checks:
        log.info("running %s", check.name)
        recs, timing = check.run(cfg)
        report.records.extend(recs)
        report.timings.append(timing)
    report.skipped = list(SKIPPED) if name == "all" else []
    if write:
        report.write(Path(cfg.out))
    return report

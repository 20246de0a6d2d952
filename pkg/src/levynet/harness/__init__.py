"""Verification harness: acceptance checks, configuration and reports."""
from .config import RunConfig, load_config
from .criteria import CHECKS, SKIPPED, SUITES, checks_for
from .report import REPORT_FORMAT, TestRecord, VerificationReport
from .suites import run_suite

__all__ = [
    "CHECKS",
    "REPORT_FORMAT",
    "RunConfig",
    "SKIPPED",
    "SUITES",
    "TestRecord",
    "VerificationReport",
    "checks_for",
    "load_config",
    "run_suite",
]

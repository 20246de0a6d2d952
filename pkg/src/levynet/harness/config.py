"""Run configuration for the verification suites.

A configuration is a flat key-value document: either a JSON object or
``key = value`` lines (``#`` starts a comment). Unknown keys are rejected and
every sample size is checked against its documented minimum.
"""
from __future__ import annotations

import configparser
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import ParameterError

__all__ = ["RunConfig", "load_config"]

# Smallest sizes at which the corresponding tests are meaningful.
_MINIMA = {
    "csbp_n": 1000,
    "ratio_n": 1000,
    "slice_n": 1000,
    "coalescence_runs": 100,
    "forest_count": 20,
    "forest_n": 1000,
    "snake_count": 1,
    "snake_points": 3,
    "snake_steps": 16,
    "excursion_n": 1000,
    "drift_n": 1000,
    "reversal_n": 1000,
    "fold_draws": 20,
    "jobs": 1,
}


@dataclass
class RunConfig:
    """Seeds, sample sizes, tolerances and output settings for a run.

    ``overrides`` maps a test id to a replacement threshold; it is written
    in flat documents as ``threshold.<test id> = value``.
    """

    seed: int = 42
    out: str = "verify-out"
    jobs: int = 1
    csbp_n: int = 100_000
    ratio_n: int = 100_000
    ratio_t: float = 0.5
    slice_n: int = 100_000
    coalescence_runs: int = 10_000
    forest_count: int = 2000
    forest_n: int = 100_000
    snake_count: int = 100
    snake_points: int = 512
    snake_steps: int = 8192
    excursion_n: int = 20_000
    drift_n: int = 1_000_000
    drift_r: float = 1e-2
    drift_eps: float = 1e-3
    reversal_n: int = 100_000
    fold_draws: int = 1000
    overrides: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for key, lo in _MINIMA.items():
            if int(getattr(self, key)) < lo:
                raise ParameterError(f"{key} must be at least {lo}")
        if self.snake_points > 2048:
            raise ParameterError("snake_points must be at most 2048")
        if self.snake_steps % 2:
            raise ParameterError("snake_steps must be even")

    def threshold(self, test_id: str, default: float) -> float:
        return float(self.overrides.get(test_id, default))

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        ov = d.pop("overrides")
        d.update({f"threshold.{k}": v for k, v in sorted(ov.items())})
        return d

    @classmethod
    def from_mapping(cls, data: dict[str, Any]) -> "RunConfig":
        """Build from a flat mapping, coercing string values.

        Raises
        ------
        ParameterError
            On unknown keys or values of the wrong type.
        """
        fields = {f.name: f for f in dataclasses.fields(cls) if f.name != "overrides"}
        kwargs: dict[str, Any] = {}
        overrides: dict[str, float] = {}
        for key, value in data.items():
            if key.startswith("threshold."):
                overrides[key[len("threshold.") :]] = float(value)
                continue
            if key not in fields:
                raise ParameterError(f"unknown configuration key {key!r}")
            typ = fields[key].type
            try:
                if typ in ("int", int):
                    kwargs[key] = int(float(value)) if isinstance(value, str) else int(value)
                elif typ in ("float", float):
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = str(value)
            except (TypeError, ValueError) as exc:
                raise ParameterError(f"bad value for {key}: {value!r}") from exc
        return cls(**kwargs, overrides=overrides)

    def updated(self, **changes: Any) -> "RunConfig":
        d = {k: v for k, v in self.to_dict().items() if v is not None}
        d.update({k: v for k, v in changes.items() if v is not None})
        return RunConfig.from_mapping(d)


def load_config(path: str | Path) -> RunConfig:
    """Read a flat JSON or ``key = value`` document."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        data = json.loads(text)
        if any(isinstance(v, (dict, list)) for v in data.values()):
            raise ParameterError("configuration must be flat")
        return RunConfig.from_mapping(data)
    parser = configparser.ConfigParser(delimiters=("=",), comment_prefixes=("#",))
    parser.optionxform = str  # keep key case
    parser.read_string("[run]\n" + text)
    return RunConfig.from_mapping(dict(parser["run"]))

"""Run configuration shared by the command-line front end."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .errors import ValidationError
from .normkernel.dense import DENSE_CAP, ORACLE_CAP, TIE_TOL
from .normkernel.runs import RUN_CAP, STRADDLE_MODES
from .tsirelson import TSIRELSON_CAP

OUTPUT_FORMATS = ("human", "json", "csv")


@dataclass(frozen=True)
class RunConfig:
    f: str = "log2p1"
    precision: int | None = None
    tol: float = TIE_TOL
    dense_cap: int = DENSE_CAP
    oracle_cap: int = ORACLE_CAP
    run_cap: int = RUN_CAP
    tsirelson_cap: int = TSIRELSON_CAP
    straddle: str = "auto"
    cache_dir: str | None = None
    output: str = "human"
    seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        for name in ("dense_cap", "oracle_cap", "run_cap", "tsirelson_cap", "jobs"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValidationError(f"{name} must be a positive integer, got {v!r}")
        if not isinstance(self.tol, (int, float)) or not 0 < self.tol <= 1e-3:
            raise ValidationError(f"tol must lie in (0, 1e-3], got {self.tol!r}")
        if self.precision is not None and (isinstance(self.precision, bool)
                                           or not isinstance(self.precision, int) or self.precision < 53):
            raise ValidationError("precision must be an integer number of bits >= 53")
        if self.output not in OUTPUT_FORMATS:
            raise ValidationError(f"output must be one of {OUTPUT_FORMATS}")
        if self.straddle not in STRADDLE_MODES:
            raise ValidationError(f"straddle must be one of {STRADDLE_MODES}")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool):
            raise ValidationError("seed must be an integer")

    @classmethod
    def from_mapping(cls, data: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValidationError(f"unknown configuration keys: {', '.join(unknown)}")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "RunConfig":
        """Read a JSON object of settings."""
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read config {path}: {exc}") from None
        if not isinstance(data, dict):
            raise ValidationError("config file must hold a JSON object")
        return cls.from_mapping(data)

    def merged(self, **overrides) -> "RunConfig":
        data = asdict(self)
        data.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig.from_mapping(data)

    def as_dict(self):
        return asdict(self)

"""Normalized constant blocks and exact norms of their sums."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from ..errors import ValidationError
from ..normkernel.dense import DENSE_CAP, ell_norm, s_norm
from ..normkernel.runs import run_ell_norm, run_norm
from ..vectorspace import LOG2P1, FinVector, RunVector, ScalingFunction, to_fraction


@dataclass(frozen=True)
class AverageSpec:
    """Constant block of length ``m`` at ``start``; ``scale=None`` means f(m)/m (norm 1)."""

    start: int
    m: int
    scale: float | None = None

    def __post_init__(self):
        if self.m < 1:
            raise ValidationError("block length m must be >= 1")
        if self.start < 1:
            raise ValidationError("positions start at 1")
        if self.scale is not None and not self.scale > 0:
            raise ValidationError("scale must be positive")

    def value(self, f: ScalingFunction = LOG2P1) -> float:
        return float(self.scale) if self.scale is not None else f(self.m) / self.m

    @property
    def stop(self) -> int:
        return self.start + self.m - 1

    def as_dict(self):
        return asdict(self)


def build_average(spec: AverageSpec, f: ScalingFunction = LOG2P1) -> FinVector:
    c = to_fraction(spec.value(f))
    return FinVector(tuple((p, c) for p in range(spec.start, spec.stop + 1)))


def successive_specs(lengths, start: int = 1) -> list:
    """Back-to-back normalized blocks with the given lengths."""
    out = []
    for m in lengths:
        out.append(AverageSpec(start, int(m)))
        start += int(m)
    return out


def build_averages(specs, f: ScalingFunction = LOG2P1) -> RunVector:
    """Sum of successive blocks as a RunVector (gaps vanish by spreading invariance)."""
    prev = 0
    for s in specs:
        if s.start <= prev:
            raise ValidationError(f"block at {s.start}..{s.stop} overlaps or precedes the previous block")
        prev = s.stop
    return RunVector.merged((s.value(f), s.m) for s in specs)


def runs_norm(rv: RunVector, f: ScalingFunction = LOG2P1, *, dense_cap: int = DENSE_CAP,
              straddle: str = "auto", want_cert: bool = True):
    """Exact norm of a RunVector: the dense DP when the expansion is small and
    has three or more runs, the run evaluator otherwise."""
    if len(rv) >= 3 and rv.total_length <= dense_cap:
        return s_norm(rv.expand(), f, cap=dense_cap, want_cert=want_cert)
    return run_norm(rv, f, straddle=straddle, want_cert=want_cert)


def runs_ell_norm(rv: RunVector, ell: int, f: ScalingFunction = LOG2P1, *,
                  dense_cap: int = DENSE_CAP, straddle: str = "auto", want_cert: bool = True):
    if len(rv) >= 3 and rv.total_length <= dense_cap:
        return ell_norm(rv.expand(), ell, f, cap=dense_cap, want_cert=want_cert)
    return run_ell_norm(rv, ell, f, straddle=straddle, want_cert=want_cert)

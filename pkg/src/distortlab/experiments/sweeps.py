"""Constant-block sweeps and block-sum trends."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import mpmath

from ..errors import CapExceededError, ValidationError
from ..normkernel.dense import DENSE_CAP, _tables, s_norm
from ..normkernel.runs import run_norm
from ..vectorspace import LOG2P1, RunVector, ScalingFunction
from .blocks import build_averages, runs_norm, successive_specs

# n with log2(n + 1) an integer, so n / f(n) is rational
INTEGER_F_POINTS = (1, 3, 7, 15, 31, 63, 127)


def lemma4_sweep(n_max: int, f: ScalingFunction = LOG2P1, *, cap: int = DENSE_CAP) -> list:
    """Rows (n, DP value, n / f(n), |difference|) for n = 1..n_max.

    One DP on the all-ones vector of length n_max serves every prefix, since
    N(0, n - 1) is the norm of the first n coordinates.
    """
    if n_max < 1:
        raise ValidationError("n_max must be >= 1")
    if n_max > cap:
        raise CapExceededError(f"n_max = {n_max} exceeds the dense cap {cap}; use constant_norm")
    T = _tables((Fraction(1),) * n_max, f, None)
    rows = []
    for n in range(1, n_max + 1):
        dp = float(T.N(0, n - 1))
        closed = n / f(n)
        rows.append((n, dp, closed, abs(dp - closed)))
    return rows


def _digits(a, b):
    if a == b:
        return mpmath.inf
    return -mpmath.log10(abs(a - b) / abs(b))


def lemma4_checkpoints(ns=INTEGER_F_POINTS, *, precision: int = 200, dense_max: int = 63) -> list:
    """High-precision values at n with integer log2(n + 1) against the rational n / log2(n + 1).

    Returns rows (n, value, exact fraction, matching significant digits). n up to
    ``dense_max`` uses the mpmath DP, larger n the run evaluator.
    """
    rows = []
    for n in ns:
        k = (n + 1).bit_length() - 1
        if 2 ** k != n + 1:
            raise ValidationError(f"log2({n} + 1) is not an integer")
        exact = Fraction(n, k)
        if n <= dense_max:
            val, _ = s_norm([1] * n, LOG2P1, precision=precision, want_cert=False)
        else:
            val, _ = run_norm(RunVector.constant(1, n), LOG2P1, precision=precision, want_cert=False)
        with mpmath.workprec(precision):
            ref = mpmath.mpf(exact.numerator) / exact.denominator
            digits = _digits(val, ref)
        rows.append((n, val, exact, float(digits) if digits != mpmath.inf else float("inf")))
    return rows


@dataclass
class TrendRow:
    lengths: tuple
    value: float
    lower: float
    upper: float
    closed_form: float | None = None

    def as_dict(self):
        return {"lengths": list(self.lengths), "value": self.value, "lower": self.lower,
                "upper": self.upper, "closed_form": self.closed_form}


@dataclass
class TrendTable:
    ell: int
    rows: list = field(default_factory=list)

    def in_bounds(self, tol: float = 1e-9) -> bool:
        return all(r.lower - tol <= r.value <= r.upper + tol for r in self.rows)

    def decreasing(self, tol: float = 1e-12) -> bool:
        vals = [r.value for r in self.rows]
        return all(b < a + tol for a, b in zip(vals, vals[1:]))

    def as_dict(self):
        return {"ell": self.ell, "rows": [r.as_dict() for r in self.rows]}


def lemma6_trend(ell: int, ladder, f: ScalingFunction = LOG2P1, *, straddle: str = "auto") -> TrendTable:
    """Norms of sums of ell successive normalized blocks, one row per length tuple.

    Values lie in [ell / f(ell), ell]. Equal lengths merge into one constant
    block with the closed form ell * f(L) / f(ell * L).
    """
    if ell < 2:
        raise ValidationError("ell must be >= 2")
    table = TrendTable(ell)
    for lengths in ladder:
        lengths = tuple(int(m) for m in lengths)
        if len(lengths) != ell:
            raise ValidationError(f"tuple {lengths} does not have {ell} lengths")
        equal = len(set(lengths)) == 1
        if not equal and any(b <= a for a, b in zip(lengths, lengths[1:])):
            raise ValidationError(f"tuple {lengths} is neither strictly increasing nor constant")
        rv = build_averages(successive_specs(lengths), f)
        value, _ = runs_norm(rv, f, straddle=straddle, want_cert=False)
        closed = ell * f(lengths[0]) / f(ell * lengths[0]) if equal else None
        table.rows.append(TrendRow(lengths, float(value), ell / f(ell), float(ell), closed))
    return table

"""The gap-coordinate inequality

    q1 |x + a e_n| + q2 |b e_n + y|
        <= max(q1 |x + (a + b) e_n| + q2 |y|,  q1 |x| + q2 |(a + b) e_n + y|)

for x supported before n and y after n, with a fuzz harness.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from ..errors import ValidationError
from ..normkernel.dense import brute_norm, s_norm
from ..vectorspace import LOG2P1, FinVector, ScalingFunction, to_fraction


@dataclass
class ClaimReport:
    lhs: float
    rhs: float
    slack: float  # rhs - lhs

    def holds(self, tol: float = 1e-9) -> bool:
        return self.slack >= -tol

    def as_dict(self):
        return asdict(self)


def _norm(v: FinVector, f, evaluator):
    if evaluator == "brute":
        return brute_norm(v, f)
    return s_norm(v, f, want_cert=False)[0]


def claim_check(x: FinVector, alpha, beta, n: int, y: FinVector, q1=1, q2=1,
                f: ScalingFunction = LOG2P1, *, evaluator: str = "dp") -> ClaimReport:
    alpha, beta, q1, q2 = (to_fraction(t) for t in (alpha, beta, q1, q2))
    if min(alpha, beta, q1, q2) < 0:
        raise ValidationError("alpha, beta, q1, q2 must be nonnegative")
    if x.entries and x.entries[-1][0] >= n:
        raise ValidationError(f"x must be supported before position {n}")
    if y.entries and y.entries[0][0] <= n:
        raise ValidationError(f"y must be supported after position {n}")

    def at_n(c):
        return FinVector(((n, c),)) if c else FinVector()

    def N(v):
        return _norm(v, f, evaluator)

    s = alpha + beta
    lhs = float(q1) * N(x + at_n(alpha)) + float(q2) * N(at_n(beta) + y)
    rhs = max(float(q1) * N(x + at_n(s)) + float(q2) * N(y),
              float(q1) * N(x) + float(q2) * N(at_n(s) + y))
    return ClaimReport(lhs, rhs, rhs - lhs)


def _rational(rng, den_max=6, num_max=12):
    return Fraction(int(rng.integers(0, num_max + 1)), int(rng.integers(1, den_max + 1)))


def random_claim_case(seed: int, index: int, max_support: int = 4, weighted: bool = True):
    """Case ``index`` of a fuzz run; depends only on (seed, index)."""
    rng = np.random.default_rng([seed, index])
    kx = int(rng.integers(0, max_support + 1))
    ky = int(rng.integers(0, max_support + 1))
    gap = 1 + kx + int(rng.integers(0, 3))
    x = FinVector.from_mapping({p: _rational(rng) for p in range(1, kx + 1)})
    y = FinVector.from_mapping({gap + 1 + p: _rational(rng) for p in range(ky)})
    alpha, beta = _rational(rng), _rational(rng)
    if weighted:
        q1, q2 = _rational(rng), _rational(rng)
    else:
        q1 = q2 = Fraction(1)
    return x, alpha, beta, gap, y, q1, q2


@dataclass
class FuzzSummary:
    cases: int
    violations: int
    worst_slack: float
    worst_index: int | None

    def as_dict(self):
        return asdict(self)


def _run_chunk(args):
    seed, lo, hi, max_support, tol = args
    worst, worst_i, bad = np.inf, None, 0
    for i in range(lo, hi):
        # alternate plain and weighted cases
        case = random_claim_case(seed, i, max_support, weighted=bool(i % 2))
        r = claim_check(*case)
        if r.slack < worst:
            worst, worst_i = r.slack, i
        if not r.holds(tol):
            bad += 1
    return worst, worst_i, bad


def claim_fuzz(cases: int = 10_000, seed: int = 0, *, max_support: int = 4, tol: float = 1e-9,
               jobs: int = 1) -> FuzzSummary:
    """Check ``cases`` random instances (every other one weighted); deterministic in ``seed``."""
    chunk = max(1, cases // max(1, 4 * jobs))
    tasks = [(seed, lo, min(cases, lo + chunk), max_support, tol) for lo in range(0, cases, chunk)]
    if jobs > 1:
        with ProcessPoolExecutor(jobs) as ex:
            parts = list(ex.map(_run_chunk, tasks))
    else:
        parts = [_run_chunk(t) for t in tasks]
    worst, worst_i, bad = np.inf, None, 0
    for w, wi, b in parts:  # input order, so ties resolve identically for any job count
        if w < worst:
            worst, worst_i = w, wi
        bad += b
    return FuzzSummary(cases, bad, float(worst), worst_i)

"""Tsirelson-type norms, where the admissible families depend on absolute positions.

For theta in (0, 1) the norm solves

    |x| = max(|x|_inf, theta * sup sum_i |E_i x|)

over families E_1 < ... < E_l with l <= min E_1. The DP runs over segments
i..j of the support (in support order) and keeps the absolute positions:

    node(i, j) = theta * max_{s in i..j} B(s, j, min(pos[s], j - s + 1))

where B(s, j, l) is the best sum over l consecutive nonempty blocks of s..j.
Taking the largest admissible l is safe since splitting a block never lowers
the sum (triangle inequality), and a block family may always be enlarged to
close gaps except below its first element, which is why the start s is free.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import CapExceededError, ValidationError
from .vectorspace import FinVector

TSIRELSON_CAP = 24


@dataclass(frozen=True)
class AdmissibleFamily:
    """``ell`` successive position intervals with ``ell <= min`` of the first one."""

    ell: int
    blocks: tuple  # ((lo, hi), ...) inclusive position intervals

    def __post_init__(self):
        if self.ell < 1 or len(self.blocks) != self.ell:
            raise ValidationError("an admissible family needs ell >= 1 blocks")
        prev = None
        for lo, hi in self.blocks:
            if lo > hi:
                raise ValidationError(f"empty interval [{lo}, {hi}]")
            if prev is not None and lo <= prev:
                raise ValidationError("blocks must be successive")
            prev = hi
        if self.ell > self.blocks[0][0]:
            raise ValidationError(f"{self.ell} blocks starting at position {self.blocks[0][0]} is not admissible")


def _theta(n) -> float:
    if isinstance(n, bool) or int(n) != n or n < 2:
        raise ValidationError("theta must be 1/n with an integer n >= 2")
    return 1.0 / int(n)


def _prepare(v, cap):
    if not isinstance(v, FinVector):
        v = FinVector.dense(v)
    if len(v.entries) > cap:
        raise CapExceededError(f"support size {len(v.entries)} exceeds the Tsirelson cap {cap}")
    pos = [p for p, _ in v.entries]
    mags = np.array([float(abs(x)) for _, x in v.entries])
    return pos, mags


def _tables(pos, mags, theta):
    m = len(mags)
    N = np.zeros((m, m))
    B = np.full((m, m, m + 1), -np.inf)  # B[j, i, l]
    for i in range(m - 1, -1, -1):
        top = 0.0
        for j in range(i, m):
            top = max(top, mags[j])
            if j > i:
                L = j - i + 1
                cand = N[i, i:j, None] + B[j, i + 1:j + 1, 1:L]
                B[j, i, 2:L + 1] = cand.max(axis=0)
            best = top
            for s in range(i, j):
                ell = min(pos[s], j - s + 1)
                if ell >= 2:
                    best = max(best, theta * B[j, s, ell])
            N[i, j] = best
            B[j, i, 1] = best
    return N, B


def t_theta_norm(v, n: int = 2, *, cap: int = TSIRELSON_CAP) -> float:
    """Norm of the space with factor 1/n (n = 2 is Tsirelson's original norm)."""
    pos, mags = _prepare(v, cap)
    if not len(mags):
        return 0.0
    N, _ = _tables(pos, mags, _theta(n))
    return float(N[0, -1])


def t_norm(v, *, cap: int = TSIRELSON_CAP) -> float:
    return t_theta_norm(v, 2, cap=cap)


def best_family(v, n: int = 2, *, cap: int = TSIRELSON_CAP):
    """Admissible family attaining the top-level value, or None when the sup norm does."""
    pos, mags = _prepare(v, cap)
    m = len(mags)
    if not m:
        return None
    theta = _theta(n)
    N, B = _tables(pos, mags, theta)
    value = N[0, m - 1]
    if mags.max() >= value - 1e-12:
        return None
    j = m - 1
    for s in range(m - 1):
        ell = min(pos[s], m - s)
        if ell >= 2 and theta * B[j, s, ell] >= value - 1e-12:
            blocks, a = [], s
            for rem in range(ell, 1, -1):
                t = next(t for t in range(a, j - rem + 2)
                         if N[a, t] + B[j, t + 1, rem - 1] >= B[j, a, rem] - 1e-12)
                blocks.append((pos[a], pos[t]))
                a = t + 1
            blocks.append((pos[a], pos[j]))
            return AdmissibleFamily(ell, tuple(blocks))
    raise AssertionError("no family attains the node value")


def odell_norm(v, n: int, *, cap: int = TSIRELSON_CAP) -> float:
    """Best sum of 1/n-norms over at most n consecutive blocks (no admissibility, no 1/f).

    Lies between the 1/n-norm and n times it.
    """
    pos, mags = _prepare(v, cap)
    m = len(mags)
    if not m:
        return 0.0
    N, B = _tables(pos, mags, _theta(n))
    return float(B[m - 1, 0, 1:min(n, m) + 1].max())


def evaluate_family(v, family: AdmissibleFamily, n: int = 2, *, cap: int = TSIRELSON_CAP) -> float:
    """theta * sum of norms of the restrictions to the family's blocks (a lower bound)."""
    if not isinstance(v, FinVector):
        v = FinVector.dense(v)
    total = 0.0
    for lo, hi in family.blocks:
        part = v.restrict_interval(lo, hi)
        total += t_theta_norm(part, n, cap=cap)
    return total * _theta(n)


def tsirelson_block(n: int, start: int | None = None) -> FinVector:
    """e_start + ... + e_{start+n-1}, by default starting at n."""
    start = n if start is None else start
    return FinVector(tuple((p, Fraction(1)) for p in range(start, start + n)))

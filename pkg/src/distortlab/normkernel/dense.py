"""Interval dynamic programme for the implicitly defined norm on short supports.

For a CanonKey ``a`` of length m and a segment i..j put

    N(i, j)    = norm of (a_i, ..., a_j)
    B(i, j, l) = best sum of N over a split of i..j into l consecutive nonempty blocks.

Then B(i, j, 1) = N(i, j), B(i, j, l) = max_t N(i, t) + B(t+1, j, l-1) and

    N(i, j) = max(max_k a_k, max_{2 <= l <= j-i+1} B(i, j, l) / f(l)).

Segments are processed by decreasing i and increasing j, so every quantity on the
right-hand side is final when it is read (induction on support size). Restricting
to consecutive nonempty blocks loses nothing: gaps can be closed by
1-unconditionality, and empty blocks only enlarge f(l).
"""

from __future__ import annotations

from contextlib import nullcontext
from functools import lru_cache

import mpmath
import numpy as np

from ..errors import CapExceededError, ValidationError
from ..vectorspace import LOG2P1, ScalingFunction, as_key, to_fraction
from .certs import EllCert, Leaf, Node

DENSE_CAP = 150
ORACLE_CAP = 10
TIE_TOL = 1e-9


class _Tables:
    """N and B for every segment of one key, in float64 or mpmath."""

    def __init__(self, mags, fvals, N, B, exact):
        self.mags = mags
        self.fvals = fvals  # fvals[l] = f(l)
        self._N = N
        self._B = B  # B[j][i][l]
        self.exact = exact

    def N(self, i, j):
        return self._N[i][j]

    def B(self, i, j, ell):
        return self._B[j][i][ell]


def _float_tables(mags: np.ndarray, fvals: np.ndarray) -> _Tables:
    m = len(mags)
    N = np.zeros((m, m))
    B = np.full((m, m, m + 1), -np.inf)
    for i in range(m - 1, -1, -1):
        top = 0.0
        for j in range(i, m):
            top = max(top, mags[j])
            best = top
            if j > i:
                L = j - i + 1
                cand = N[i, i:j, None] + B[j, i + 1:j + 1, 1:L]
                row = cand.max(axis=0)
                B[j, i, 2:L + 1] = row
                best = max(best, float((row / fvals[2:L + 1]).max()))
            N[i, j] = best
            B[j, i, 1] = best
    return _Tables(mags, fvals, N, B, exact=False)


def _mp_tables(mags: list, fvals: list) -> _Tables:
    m = len(mags)
    N = [[None] * m for _ in range(m)]
    B = [[None] * m for _ in range(m)]
    for i in range(m - 1, -1, -1):
        top = mags[i]
        for j in range(i, m):
            if mags[j] > top:
                top = mags[j]
            L = j - i + 1
            row = [None, None]
            best = top
            for ell in range(2, L + 1):
                s = max(N[i][t] + B[j][t + 1][ell - 1] for t in range(i, j - ell + 2))
                row.append(s)
                v = s / fvals[ell]
                if v > best:
                    best = v
            row[1] = best
            N[i][j] = best
            B[j][i] = row
    return _Tables(mags, fvals, N, B, exact=True)


@lru_cache(maxsize=4)
def _tables(key: tuple, f: ScalingFunction, precision: int | None) -> _Tables:
    m = len(key)
    if precision is None:
        mags = np.array([float(v) for v in key])
        return _float_tables(mags, f.upto(m))
    with mpmath.workprec(precision):
        mags = [_mpf(v) for v in key]
        fvals = [None] + [f.mp(ell) for ell in range(1, m + 1)]
        return _mp_tables(mags, fvals)


def _mpf(v):
    q = to_fraction(v)
    return mpmath.mpf(q.numerator) / q.denominator


def _prepare(x, cap):
    key = as_key(x)
    if len(key) > cap:
        raise CapExceededError(
            f"support size {len(key)} exceeds the dense cap {cap}; "
            "use run_norm for piecewise constant vectors")
    return key


def _build_cert(T: _Tables, i, j, tol, memo):
    """Certificate of N(i, j): smallest (ell, boundaries) among maximizers."""
    hit = memo.get((i, j))
    if hit is not None:
        return hit
    value = T.N(i, j)
    seg = T.mags[i:j + 1]
    top = max(seg)
    if top >= value - tol:
        cert = Leaf(i + next(k for k, v in enumerate(seg) if v == top))
        memo[(i, j)] = cert
        return cert
    L = j - i + 1
    ell = next(e for e in range(2, L + 1) if T.B(i, j, e) / T.fvals[e] >= value - tol)
    cuts, kids = _split(T, i, j, ell, tol, memo)
    cert = Node(ell, tuple(cuts), tuple(kids))
    memo[(i, j)] = cert
    return cert


def _split(T, i, j, parts, tol, memo):
    """Lexicographically smallest cut tuple attaining B(i, j, parts) within tol."""
    cuts, kids = [], []
    a, rem, target = i, parts, T.B(i, j, parts)
    while rem > 1:
        t = next(t for t in range(a, j - rem + 2)
                 if T.N(a, t) + T.B(t + 1, j, rem - 1) >= target - tol)
        kids.append(_build_cert(T, a, t, tol, memo))
        cuts.append(t + 1)
        target = T.B(t + 1, j, rem - 1)
        a, rem = t + 1, rem - 1
    kids.append(_build_cert(T, a, j, tol, memo))
    return cuts, kids


def s_norm(x, f: ScalingFunction = LOG2P1, *, cap: int = DENSE_CAP, precision: int | None = None,
           tol: float = TIE_TOL, cache=None, want_cert: bool = True):
    """Norm of a finitely supported vector with an optimal partition-tree certificate.

    ``x`` may be a FinVector, a RunVector or a sequence of numbers (zeros dropped).
    With ``precision`` (mantissa bits) the DP runs in mpmath and returns an mpf.

    >>> s_norm([1, 1, 1])[0]
    1.5
    """
    key = _prepare(x, cap)
    if not key:
        return (mpmath.mpf(0) if precision else 0.0), None
    if cache is not None and precision is None:
        hit = cache.get(key, f)
        if hit is not None:
            return hit
    T = _tables(key, f, precision)
    m = len(key)
    value = T.N(0, m - 1)
    cert = None
    if want_cert:
        if precision:
            with mpmath.workprec(precision):
                cert = _build_cert(T, 0, m - 1, mpmath.mpf(tol), {})
        else:
            cert = _build_cert(T, 0, m - 1, tol, {})
    if precision is None:
        value = float(value)
        if cache is not None and cert is not None:
            cache.put(key, value, cert, f)
    return value, cert


def ell_norm(x, ell: int, f: ScalingFunction = LOG2P1, *, cap: int = DENSE_CAP,
             precision: int | None = None, tol: float = TIE_TOL, want_cert: bool = True):
    """(1/f(ell)) * best sum of norms over at most ``ell`` consecutive nonempty blocks."""
    if ell < 2:
        raise ValidationError("ell must be >= 2")
    key = _prepare(x, cap)
    if not key:
        return (mpmath.mpf(0) if precision else 0.0), None
    T = _tables(key, f, precision)
    m = len(key)
    parts_max = min(ell, m)
    sums = [T.B(0, m - 1, p) for p in range(1, parts_max + 1)]
    best = max(sums)
    cert = None
    if want_cert:
        with mpmath.workprec(precision) if precision else nullcontext():
            t = mpmath.mpf(tol) if precision else tol
            p = next(k + 1 for k, s in enumerate(sums) if s >= best - t)
            cuts, kids = _split(T, 0, m - 1, p, t, {})
            cert = EllCert(ell, tuple(cuts), tuple(kids))
    if precision:
        with mpmath.workprec(precision):
            return best / f.mp(ell), cert
    return float(best) / f(ell), cert


def level_norm(x, k: int, f: ScalingFunction = LOG2P1, *, cap: int = DENSE_CAP) -> float:
    """|x|_k: k rounds of block splitting starting from the sup norm.

    The rounds stop early once a round changes no segment value (the sequence has
    reached its fixed point, so every later level is the same).
    """
    if k < 0:
        raise ValidationError("level k must be >= 0")
    key = _prepare(x, cap)
    if not key:
        return 0.0
    mags = np.array([float(v) for v in key])
    m = len(mags)
    fvals = f.upto(m)
    L = np.zeros((m, m))
    for i in range(m):
        L[i, i:] = np.maximum.accumulate(mags[i:])
    for _ in range(k):
        new = _level_round(L, fvals)
        if np.array_equal(new, L):
            break
        L = new
    return float(L[0, m - 1])


def _level_round(L, fvals):
    m = L.shape[0]
    B = np.full((m, m, m + 1), -np.inf)
    new = L.copy()
    for i in range(m - 1, -1, -1):
        for j in range(i, m):
            B[j, i, 1] = L[i, j]
            if j > i:
                n = j - i + 1
                cand = L[i, i:j, None] + B[j, i + 1:j + 1, 1:n]
                row = cand.max(axis=0)
                B[j, i, 2:n + 1] = row
                new[i, j] = max(L[i, j], float((row / fvals[2:n + 1]).max()))
    return new


def constant_norm(c, n: int, f: ScalingFunction = LOG2P1, *, precision: int | None = None):
    """Norm of c*(e_1 + ... + e_n) in closed form: c*n/f(n)."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not c > 0:
        raise ValidationError("c must be positive")
    if precision:
        with mpmath.workprec(precision):
            return _mpf(c) * n / f.mp(n)
    return float(c) * n / f(n)


def brute_norm(x, f: ScalingFunction = LOG2P1, *, cap: int = ORACLE_CAP) -> float:
    """Exhaustive maximum over every partition tree (independent oracle).

    Each segment enumerates all 2**(len-1) - 1 nontrivial cut sets and recurses.
    """
    key = as_key(x)
    if len(key) > cap:
        raise CapExceededError(f"support size {len(key)} exceeds the oracle cap {cap}")
    return _brute(tuple(float(v) for v in key), f)


@lru_cache(maxsize=1 << 18)
def _brute(key: tuple, f: ScalingFunction) -> float:
    n = len(key)
    if n == 0:
        return 0.0
    best = max(key)
    for mask in range(1, 1 << (n - 1)):
        total = 0.0
        start = 0
        blocks = 1
        for pos in range(1, n):
            if mask >> (pos - 1) & 1:
                total += _brute(key[start:pos], f)
                start = pos
                blocks += 1
        total += _brute(key[start:], f)
        val = total / f(blocks)
        if val > best:
            best = val
    return best

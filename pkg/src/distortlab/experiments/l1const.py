"""Lower l1 constant of a family of successive blocks.

phi(a) = |sum a_i x_i| is a maximum of linear functions of a (one per
partition tree), so it is convex and piecewise linear on the simplex. Every
evaluation returns an optimal tree, whose weights give a supporting cut
phi(b) >= c . b that is tight at a. Kelley's cutting-plane method alternates:

* the LP  min t  s.t.  t >= c_k . a for all cuts, a in the simplex  gives a
  lower bound and a new trial point;
* evaluating phi at the trial point gives an upper bound and a new cut.

Since there are finitely many trees the loop terminates; in practice it stops
when the bracket is narrower than ``tol``. Simplex vertices, the centroid and
a coarse grid seed the cut set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from ..errors import ValidationError
from ..normkernel.certs import cert_weights
from ..normkernel.dense import DENSE_CAP, s_norm
from ..vectorspace import LOG2P1, FinVector, ScalingFunction

MAX_BLOCKS = 6


@dataclass
class L1Bracket:
    value: float  # best upper bound found (attained at ``point``)
    lower: float  # certified lower bound from the cut model
    point: tuple
    evaluations: int


def _check_blocks(blocks, f, tol, cap):
    if not 1 <= len(blocks) <= MAX_BLOCKS:
        raise ValidationError(f"need between 1 and {MAX_BLOCKS} blocks")
    blocks = [b if isinstance(b, FinVector) else FinVector.dense(b) for b in blocks]
    for k, b in enumerate(blocks):
        if not b.entries:
            raise ValidationError(f"block {k} is zero")
        if k and not blocks[k - 1].precedes(b):
            raise ValidationError(f"block {k} does not come after block {k - 1}")
        nb, _ = s_norm(b, f, cap=cap, want_cert=False)
        if abs(nb - 1) > tol:
            raise ValidationError(f"block {k} has norm {nb}, not 1")
    return blocks


def _grid(n, res):
    for c in itertools.product(range(res + 1), repeat=n):
        if sum(c) == res:
            yield tuple(x / res for x in c)


def l1_lower_bracket(blocks, f: ScalingFunction = LOG2P1, *, tol: float = 1e-6,
                     max_iter: int = 400, grid_res: int | None = None, cap: int = DENSE_CAP) -> L1Bracket:
    blocks = _check_blocks(blocks, f, 1e-9, cap)
    n = len(blocks)
    mags = [np.array([float(abs(v)) for v in b.values]) for b in blocks]
    if sum(len(m) for m in mags) > cap:
        raise ValidationError(f"total support exceeds the dense cap {cap}")

    def evaluate(a):
        key, owner = [], []
        for i, (ai, m) in enumerate(zip(a, mags)):
            if ai > 0:
                key.extend(ai * m)
                owner.extend((i, float(x)) for x in m)
        val, cert = s_norm(key, f, cap=cap)
        w = cert_weights(cert, len(key), f)
        cut = np.zeros(n)
        for wk, (i, x) in zip(w, owner):
            cut[i] += wk * x
        return val, cut

    if grid_res is None:
        grid_res = 4 if n <= 3 else 2
    seeds = set(_grid(n, grid_res)) | {tuple([1.0 / n] * n)}
    cuts, best, best_pt = [], np.inf, None
    evals = 0
    for a in sorted(seeds):
        val, cut = evaluate(a)
        evals += 1
        cuts.append(cut)
        if val < best:
            best, best_pt = val, a
    lower = -np.inf
    c = np.zeros(n + 1)
    c[-1] = 1.0
    bounds = [(0, None)] * n + [(None, None)]
    A_eq = np.array([[1.0] * n + [0.0]])
    for _ in range(max_iter):
        A = np.array([np.append(cut, -1.0) for cut in cuts])
        res = linprog(c, A_ub=A, b_ub=np.zeros(len(cuts)), A_eq=A_eq, b_eq=[1.0],
                      bounds=bounds, method="highs")
        if not res.success:
            raise RuntimeError(f"cut LP failed: {res.message}")
        lower = max(lower, res.fun)
        if best - lower <= tol:
            break
        a = tuple(max(0.0, x) for x in res.x[:n])
        s = sum(a)
        a = tuple(x / s for x in a)
        val, cut = evaluate(a)
        evals += 1
        cuts.append(cut)
        if val < best:
            best, best_pt = val, a
    # LP round-off can push the cut bound a few ulps past an attained value
    return L1Bracket(float(best), float(min(lower, best)), best_pt, evals)


def l1_lower_constant(blocks, f: ScalingFunction = LOG2P1, *, tol: float = 1e-6, **kw) -> float:
    """min over the probability simplex of |sum a_i x_i| for successive normalized blocks.

    The blocks dominate the l1 unit basis with constant 1 / result.
    """
    return l1_lower_bracket(blocks, f, tol=tol, **kw).value


def unit_blocks(n: int) -> list:
    return [FinVector.unit(i) for i in range(1, n + 1)]

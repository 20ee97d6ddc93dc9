import math
import random

import mpmath
import pytest
from oracles import balanced_split, f, g

from distortlab.errors import CapExceededError, ValidationError
from distortlab.normkernel import Leaf, ell_norm, run_ell_norm, run_norm, s_norm, verify_cert, verify_ell_cert
from distortlab.vectorspace import RunVector

VALUES = [1, 2, 3, 5, 0.5, 0.25, 1.5, 0.1, 4, 0.7]


def _random_runs(rng, r, max_len):
    vals = []
    while len(vals) < r:
        v = rng.choice(VALUES)
        if not vals or vals[-1] != v:
            vals.append(v)
    return RunVector(tuple((v, rng.randint(1, max_len)) for v in vals))


def test_single_run_closed_form():
    assert run_norm(RunVector.constant(1, 100))[0] == pytest.approx(100 / math.log2(101), abs=1e-12)
    assert run_norm(RunVector.constant(0.3, 1)) == (0.3, Leaf(0))


def test_long_single_run():
    n = 10 ** 6
    val, _ = run_norm(RunVector.constant(2, n), want_cert=False)
    assert val == pytest.approx(2 * g(n), rel=1e-14)


@pytest.mark.parametrize("r", [2, 3, 4])
def test_agrees_with_dense(r):
    rng = random.Random(100 + r)
    for _ in range(25):
        rv = _random_runs(rng, r, 12 if r < 4 else 8)
        key = rv.expand()
        dense = s_norm(key)[0]
        val, cert = run_norm(rv)
        assert val == pytest.approx(dense, abs=1e-9)
        assert verify_cert(key, cert) == pytest.approx(dense, abs=1e-9)


def test_agrees_with_dense_up_to_120():
    rng = random.Random(3)
    for _ in range(12):
        rv = _random_runs(rng, 2, 60)
        assert run_norm(rv, want_cert=False)[0] == pytest.approx(s_norm(rv.expand())[0], abs=1e-9)


def test_exhaustive_mode_is_exact_where_minimal_fails():
    rv = RunVector(((5, 4), (1.5, 8), (1, 8), (4, 9)))
    dense = s_norm(rv.expand())[0]
    assert run_norm(rv, straddle="exhaustive", want_cert=False)[0] == pytest.approx(dense, abs=1e-9)
    assert run_norm(rv, want_cert=False)[0] == pytest.approx(dense, abs=1e-9)
    # the restricted extents miss the optimum on this vector
    assert run_norm(rv, straddle="minimal", want_cert=False)[0] < dense - 1e-4


def test_two_blocks_example():
    rv = RunVector(((f(8) / 8, 8), (f(64) / 64, 64)))
    val, cert = run_norm(rv)
    assert 2 / f(2) - 1e-9 <= val < 2
    assert val == pytest.approx(s_norm(rv.expand())[0], abs=1e-9)
    assert verify_cert(rv.expand(), cert) == pytest.approx(val, abs=1e-9)


@pytest.mark.parametrize("ell", [2, 3, 5])
def test_ell_norm_agrees_with_dense(ell):
    rng = random.Random(ell)
    for _ in range(15):
        rv = _random_runs(rng, rng.randint(1, 3), 10)
        key = rv.expand()
        val, cert = run_ell_norm(rv, ell)
        assert val == pytest.approx(ell_norm(key, ell)[0], abs=1e-9)
        assert verify_ell_cert(key, cert) == pytest.approx(val, abs=1e-9)


def test_ell_norm_of_constant_block_is_balanced_split():
    n = 4095
    val, _ = run_ell_norm(RunVector.constant(1, n), 2)
    assert val == pytest.approx(sum(g(k) for k in balanced_split(n, 2)) / f(2), abs=1e-9)


def test_high_precision_run():
    with mpmath.workprec(200):
        val, _ = run_norm(RunVector.constant(1, 127), precision=200)
        assert abs(val - mpmath.mpf(127) / 7) < mpmath.mpf(10) ** -50
        two, _ = run_norm(RunVector(((1, 3), (2, 4))), precision=200, want_cert=False)
    assert float(two) == pytest.approx(run_norm(RunVector(((1, 3), (2, 4))))[0], abs=1e-12)


def test_run_cap():
    rv = RunVector(tuple((v, 1) for v in [1, 2, 1, 2, 1]))
    with pytest.raises(CapExceededError):
        run_norm(rv)
    assert run_norm(rv, run_cap=5, want_cert=False)[0] == pytest.approx(s_norm(rv.expand())[0], abs=1e-9)


def test_bad_arguments():
    with pytest.raises(ValidationError):
        run_ell_norm(RunVector.constant(1, 3), 1)
    with pytest.raises(ValidationError):
        run_norm(RunVector.constant(1, 3), straddle="some")
    assert run_norm(RunVector()) == (0.0, None)

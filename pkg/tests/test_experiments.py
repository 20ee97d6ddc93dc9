import json
import math
from fractions import Fraction

import pytest
from oracles import balanced_split, f, g

from distortlab.errors import CapExceededError, ValidationError
from distortlab.experiments import (AverageSpec, build_average, build_averages, build_witness_z1, build_witness_z2,
                                    claim_check, claim_fuzz, csv_report, distortion_report, json_report,
                                    l1_lower_bracket, l1_lower_constant, lemma4_checkpoints, lemma4_sweep,
                                    lemma6_trend, random_claim_case, unit_blocks)
from distortlab.normkernel import s_norm
from distortlab.vectorspace import FinVector


def test_average_is_normalized():
    for m in (1, 8, 64):
        v = build_average(AverageSpec(3, m))
        assert v.support == tuple(range(3, 3 + m))
        assert s_norm(v)[0] == pytest.approx(1, abs=1e-12)
    assert float(build_average(AverageSpec(1, 8)).values[0]) == pytest.approx(math.log2(9) / 8)


def test_overlapping_batch_rejected():
    with pytest.raises(ValidationError):
        build_averages([AverageSpec(1, 4), AverageSpec(4, 2)])
    rv = build_averages([AverageSpec(1, 2), AverageSpec(5, 2)])
    assert rv.total_length == 4 and len(rv) == 1


def test_lemma4_sweep():
    rows = lemma4_sweep(63)
    assert rows[0][1] == 1 and rows[2][1] == 1.5 and rows[-1][1] == 10.5
    assert max(r[3] for r in rows) <= 1e-9
    with pytest.raises(CapExceededError):
        lemma4_sweep(151)


def test_lemma4_checkpoints_small():
    for n, val, exact, digits in lemma4_checkpoints((3, 7, 15), precision=160):
        assert exact == Fraction(n, int(math.log2(n + 1)))
        assert digits >= 40


def test_witness_z2_examples():
    _, p = build_witness_z2(2, 1)
    assert p["ell_norm"] == pytest.approx(1 / f(2), abs=1e-12)
    assert p["epsilon_effective"] == pytest.approx(0, abs=1e-12)
    _, p = build_witness_z2(2, 3)
    assert p["ell_norm"] == pytest.approx((2 / 3) * (1 + 2 / f(2)) / f(2), abs=1e-12)
    _, p = build_witness_z2(2, 63)
    expect = (6 / 63) * (31 / 5 + 32 / math.log2(33)) / f(2)
    assert p["ell_norm"] == pytest.approx(expect, abs=1e-12)
    assert p["size_rule_epsilon"] == pytest.approx(8 / 63)


def test_witness_z1_examples():
    z1, p = build_witness_z1(2, (1, 1))
    assert p["norm_sum"] == pytest.approx(2 / f(2), abs=1e-12)
    assert p["ell_norm"] == pytest.approx(1, abs=1e-12)
    _, p = build_witness_z1(2, (8, 64))
    assert 2 / f(2) - 1e-9 <= p["norm_sum"] < 2
    assert p["ell_norm"] >= p["lower_bound"] - 1e-12
    with pytest.raises(ValidationError):
        build_witness_z1(2, (64, 8))
    with pytest.raises(ValidationError):
        build_witness_z1(3, (1, 2))


def test_distortion_reports():
    r = distortion_report(2, (1, 1), 1)
    # z1 keeps l-norm 1 while the single coordinate sits on the sandwich floor
    assert r.ratio == pytest.approx(f(2), abs=1e-12)
    r = distortion_report(2, (8, 64), 63)
    assert r.ratio <= r.target
    assert r.ell_norm_z2 * r.target == pytest.approx(1 + r.epsilon_effective, abs=1e-12)
    doc = json.loads(json_report("witness", r))
    assert doc["schema"] == "report-1" and doc["certificates"]["z1_sum"] is not None


def test_lemma6_examples():
    t = lemma6_trend(2, [(1, 1), (32, 32), (8, 64)])
    assert t.rows[0].value == pytest.approx(2 / f(2), abs=1e-12)
    assert t.rows[1].value == pytest.approx(2 * f(32) / f(64), abs=1e-12)
    assert t.rows[1].closed_form == pytest.approx(t.rows[1].value, abs=1e-12)
    assert 2 / f(2) < t.rows[2].value < t.rows[1].value
    assert t.in_bounds()
    with pytest.raises(ValidationError):
        lemma6_trend(2, [(4, 2)])


def test_l1_constant_examples():
    assert l1_lower_constant(unit_blocks(1)) == pytest.approx(1)
    assert l1_lower_constant(unit_blocks(2)) == pytest.approx(1 / f(2), abs=1e-9)
    assert l1_lower_constant(unit_blocks(3)) == pytest.approx(0.5, abs=1e-9)


def test_l1_bracket_and_constant_blocks():
    blocks = [build_average(AverageSpec(1, 4)), build_average(AverageSpec(5, 4))]
    br = l1_lower_bracket(blocks)
    assert br.lower <= br.value <= br.lower + 1e-6
    # the equal-weight point gives the merged constant block: f(4) * 2 / f(8) / 2
    assert br.value <= f(4) / f(8) + 1e-12
    with pytest.raises(ValidationError):
        l1_lower_constant([FinVector.unit(2), FinVector.unit(1)])
    with pytest.raises(ValidationError):
        l1_lower_constant([FinVector.dense([2])])


def test_claim_examples():
    r = claim_check(FinVector.unit(1), 1, 1, 2, FinVector.unit(3))
    assert r.lhs == pytest.approx(2 * 2 / f(2), abs=1e-12)
    assert r.rhs == pytest.approx(3, abs=1e-12)
    x, y = FinVector.dense([1, 2]), FinVector.dense([0, 0, 0, 3, 1])
    r = claim_check(x, 0, 0, 3, y, Fraction(2), Fraction(1, 3))
    assert r.slack == pytest.approx(0, abs=1e-12)
    with pytest.raises(ValidationError):
        claim_check(FinVector.unit(3), 1, 1, 2, FinVector.unit(4))


def test_claim_fuzz_against_brute():
    for i in range(200):
        case = random_claim_case(4, i)
        assert claim_check(*case, evaluator="brute").holds()
        assert claim_check(*case).lhs == pytest.approx(claim_check(*case, evaluator="brute").lhs, abs=1e-12)


def test_claim_fuzz_deterministic():
    a = claim_fuzz(300, seed=1)
    b = claim_fuzz(300, seed=1, jobs=2)
    assert a == b and a.violations == 0


def test_csv_report_layout():
    text = csv_report("lemma4", ["n", "value"], [(1, 1.0), (3, 1.5)])
    assert text.splitlines() == ["# report-1 lemma4", "n,value", "1,1.0", "3,1.5"]

import random

import pytest
from oracles import gapped_tsirelson

from distortlab.errors import CapExceededError, ValidationError
from distortlab.tsirelson import (AdmissibleFamily, best_family, evaluate_family, odell_norm, t_norm, t_theta_norm,
                                  tsirelson_block)
from distortlab.vectorspace import FinVector


def test_examples():
    assert t_norm(FinVector.dense([1, 1])) == 1
    assert t_norm(tsirelson_block(4)) == 2
    assert t_norm(FinVector.unit(9)) == 1
    assert t_theta_norm(FinVector.unit(3), 5) == 1
    assert t_theta_norm(tsirelson_block(4), 2) == 2
    assert t_theta_norm(tsirelson_block(4), 4) == 1


@pytest.mark.parametrize("n", [2, 4, 8])
def test_block_at_its_length(n):
    assert t_norm(tsirelson_block(n)) == pytest.approx(n / 2, abs=1e-12)


def test_position_dependence():
    early = FinVector.dense([1, 1, 1, 1])
    late = tsirelson_block(4, start=10)
    assert t_norm(early) < t_norm(late)


def test_matches_gapped_oracle():
    rng = random.Random(2)
    for _ in range(150):
        m = rng.randint(1, 6)
        pos = sorted(rng.sample(range(1, 14), m))
        vals = [rng.choice([1, 2, 0.5, 3, 0.25]) for _ in range(m)]
        v = FinVector.from_mapping(dict(zip(pos, vals)))
        for n in (2, 3):
            assert t_theta_norm(v, n) == pytest.approx(gapped_tsirelson(v.entries, 1 / n), abs=1e-12)


def test_best_family_attains_value():
    v = tsirelson_block(6)
    fam = best_family(v)
    assert fam.ell <= fam.blocks[0][0]
    assert evaluate_family(v, fam) == pytest.approx(t_norm(v), abs=1e-12)
    assert best_family(FinVector.dense([1, 1])) is None


def test_admissible_family_validation():
    AdmissibleFamily(2, ((2, 3), (4, 4)))
    with pytest.raises(ValidationError):
        AdmissibleFamily(3, ((2, 3), (4, 4), (5, 6)))
    with pytest.raises(ValidationError):
        AdmissibleFamily(2, ((3, 4), (4, 5)))


def test_odell_examples():
    assert odell_norm(FinVector.dense([0, 1, 1]), 2) == 2
    assert odell_norm(FinVector.unit(5), 2) == 1
    # (e4) + (e5 + e6 + e7): 1 + 3/2, the three-term block being admissible at position 5
    assert odell_norm(tsirelson_block(4), 2) == pytest.approx(2.5, abs=1e-12)


def test_odell_sandwich():
    rng = random.Random(9)
    for _ in range(100):
        m = rng.randint(1, 8)
        pos = sorted(rng.sample(range(1, 20), m))
        v = FinVector.from_mapping({p: rng.choice([1, 2, 0.5, 3]) for p in pos})
        n = rng.randint(2, 4)
        t = t_theta_norm(v, n)
        o = odell_norm(v, n)
        assert t - 1e-12 <= o <= n * t + 1e-12


def test_caps_and_theta():
    with pytest.raises(CapExceededError):
        t_norm(FinVector.dense([1] * 25))
    with pytest.raises(ValidationError):
        t_theta_norm(FinVector.unit(1), 1)
    assert t_norm(FinVector()) == 0.0

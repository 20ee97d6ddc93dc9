import json
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from distortlab.errors import ParseError, ValidationError
from distortlab.vectorspace import (LOG2P1, FinVector, RunVector, ScalingFunction, as_key, canonicalize, embed,
                                    emit_runs, emit_vector, load_vector, parse_runs, parse_vector, resolve_scaling,
                                    validate_scaling)

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def test_dense_literal_drops_zeros():
    v = parse_vector("1,1/2,0,2")
    assert v.entries == ((1, Fraction(1)), (2, Fraction(1, 2)), (4, Fraction(2)))
    assert canonicalize(v) == (Fraction(1), Fraction(1, 2), Fraction(2))


def test_empty_literal():
    assert parse_vector("").entries == ()


@pytest.mark.parametrize("text,where", [("1,abc", "term 2"), ("1,,2", "term 2"), ("1/0", "term 1")])
def test_bad_literals_report_location(text, where):
    with pytest.raises(ParseError) as err:
        parse_vector(text)
    assert err.value.location == where


def test_sparse_json_roundtrip():
    v = FinVector(((3, Fraction(1, 3)), (10, Fraction(-2))))
    text = emit_vector(v, "json")
    assert json.loads(text)["format"] == "sdvec-1"
    assert parse_vector(text) == v


@pytest.mark.parametrize("doc,where", [
    ({"format": "sdvec-1", "entries": [[2, 1], [1, 1]]}, "$.entries[1]"),
    ({"format": "sdvec-1", "entries": [[1, 1], [1, 2]]}, "$.entries[1]"),
    ({"format": "sdvec-1", "entries": [[0, 1]]}, "$.entries[0]"),
    ({"format": "sdvec-1", "entries": [[1, "x"]]}, "$.entries[0]"),
    ({"format": "other", "entries": []}, "$.format"),
])
def test_sparse_json_errors(doc, where):
    with pytest.raises(ParseError) as err:
        load_vector(doc)
    assert err.value.location == where


def test_load_vector_from_file(tmp_path):
    p = tmp_path / "v.json"
    p.write_text(json.dumps({"format": "sdvec-1", "entries": [[5, "1/2"]]}))
    assert load_vector(str(p)).entries == ((5, Fraction(1, 2)),)


@given(st.lists(rationals, max_size=12))
def test_dense_emit_parse_roundtrip(vals):
    v = FinVector.dense(vals)
    assert parse_vector(emit_vector(v, "dense")) == v
    assert parse_vector(emit_vector(v, "json")) == v


def test_finvector_rejects_bad_entries():
    with pytest.raises(ValidationError):
        FinVector(((2, Fraction(1)), (1, Fraction(1))))
    with pytest.raises(ValidationError):
        FinVector(((1, Fraction(0)),))


def test_vector_algebra():
    x = FinVector.dense([1, 2])
    y = FinVector.dense([0, 0, 3])
    assert (x + y).to_dense() == [1, 2, 3]
    assert (x - x).entries == ()
    assert x.precedes(y) and not y.precedes(x)
    assert x.scale(Fraction(1, 2)).values == (Fraction(1, 2), Fraction(1))
    assert x.shift(3).support == (4, 5)


def test_canonical_key_is_spreading_invariant():
    x = FinVector.dense([1, -2, 3])
    assert canonicalize(x) == canonicalize(embed(canonicalize(x), positions=[4, 9, 30], signs=[-1, 1, -1]))
    assert as_key([0, 1, 0, -2]) == (Fraction(1), Fraction(2))


def test_runs_literal():
    rv = parse_runs("0.5x8,0.25x64")
    assert rv.runs == ((Fraction(1, 2), 8), (Fraction(1, 4), 64))
    assert rv.total_length == 72
    assert parse_runs(emit_runs(rv)) == rv
    assert parse_runs("1x2,1x3").runs == ((Fraction(1), 5),)


@pytest.mark.parametrize("text", ["0.5", "0.5x0", "-1x3", "ax2"])
def test_bad_runs(text):
    with pytest.raises(ParseError):
        parse_runs(text)


def test_runvector_validation():
    with pytest.raises(ValidationError):
        RunVector(((1, 2), (1, 3)))
    with pytest.raises(ValidationError):
        RunVector(((0, 2),))
    assert RunVector.merged([(1, 2), (1, 3), (2, 0)]).runs == ((1, 5),)


def test_default_scaling_values():
    assert LOG2P1(1) == 1
    assert LOG2P1(3) == 2
    assert LOG2P1(7) == 3
    assert LOG2P1.upto(4)[1:].tolist() == [1.0, math.log2(3), 2.0, math.log2(5)]


def test_table_scaling(tmp_path):
    p = tmp_path / "f.txt"
    p.write_text("1 1\n3 2\n7 3\n")
    f = resolve_scaling(f"table:{p}")
    assert f(3) == 2
    assert f(2) == pytest.approx(1.5)
    with pytest.raises(ValidationError):
        resolve_scaling("cubic")


def test_default_passes_validator():
    for grid in ([1, 2, 3], [1, 1.5, 2, 10, 100], [2 ** k for k in range(21)], list(range(1, 200))):
        rep = validate_scaling(LOG2P1, grid)
        assert rep.passed, rep.as_dict()


def test_identity_and_sqrt_rejected():
    grid = [2 ** k for k in range(11)]
    ident = validate_scaling(ScalingFunction.from_callable(lambda x: x, "x"), grid)
    assert "f1" in ident.failed
    root = validate_scaling(ScalingFunction.from_callable(math.sqrt, "sqrt"), grid)
    assert "f3" in root.failed
    assert not root.passed


def test_f3_inconclusive_on_short_grid():
    rep = validate_scaling(LOG2P1, [1, 2, 3])
    assert rep["f3"].status == "inconclusive"
    assert rep.passed


def test_validator_grid_preconditions():
    with pytest.raises(ValidationError):
        validate_scaling(LOG2P1, [1, 2])
    with pytest.raises(ValidationError):
        validate_scaling(LOG2P1, [1, 3, 2])

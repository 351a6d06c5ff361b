from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from svetlichny.core import (
    CorrelationTable,
    ExactScalar,
    InputVector,
    OutcomeVector,
    TableInvariantError,
    TableShapeError,
    delta_table,
    parity,
    uniform_table,
    validate_table,
)


def test_uniform_table_valid():
    assert validate_table(uniform_table(3)) is None


def test_negative_entry_reported():
    probs = np.full((8, 8), 1 / 8)
    probs[5, 2] = -0.1
    probs[5, 3] += 0.1
    t = CorrelationTable.floating(3, probs, validate=False)
    bad = validate_table(t)
    assert (bad.condition, bad.x, bad.a) == ("positivity", 5, 2)
    assert bad.value == pytest.approx(-0.1)


def test_column_sum_reported():
    probs = np.full((4, 4), 0.25)
    probs[1, 0] -= 0.001
    bad = validate_table(CorrelationTable.floating(2, probs, validate=False), tol=1e-12)
    assert bad.condition == "normalisation" and bad.x == 1 and bad.a is None
    assert bad.value == pytest.approx(0.999)


def test_construction_rejects_invalid():
    with pytest.raises(TableInvariantError):
        CorrelationTable.floating(1, [[0.5, 0.6], [0.5, 0.5]])


def test_wrong_entry_count_is_structural():
    doc = {"m": 2, "entries": [[0, 0, 1.0]] * 15}
    with pytest.raises(TableShapeError):
        CorrelationTable.from_json(doc)
    with pytest.raises(TableShapeError):
        CorrelationTable.floating(2, np.ones((4, 3)) / 3)


@pytest.mark.parametrize("word,m,expected", [(0b0000, 4, 0), (0b0111, 4, 1), (0b1111, 4, 0)])
def test_parity(word, m, expected):
    assert parity(word) == expected
    assert OutcomeVector(m, word).parity == expected


@given(st.integers(1, 12).flatmap(lambda m: st.tuples(st.just(m), st.integers(0, 2**m - 1))))
def test_signed_round_trip(mw):
    m, w = mw
    a = OutcomeVector(m, w)
    assert OutcomeVector.from_signs(a.signs()) == a


def test_bit_convention():
    x = InputVector.from_tuple((1, 0, 0, 1))
    assert x.bits == 0b1001 and x[1] == 1 and x[4] == 1 and x[2] == 0
    with pytest.raises(ValueError):
        InputVector(2, 4)


dyadic = st.builds(ExactScalar, st.integers(-(2**40), 2**40), st.integers(0, 40))


@given(dyadic, dyadic)
def test_exact_scalar_arithmetic(a, b):
    assert (a + b).to_fraction() == a.to_fraction() + b.to_fraction()
    assert (-a).to_fraction() == -a.to_fraction()
    assert a.half().to_fraction() == a.to_fraction() / 2
    assert (a - b).to_fraction() == a.to_fraction() - b.to_fraction()
    c = a + b
    assert c.numerator == 0 and c.exponent == 0 or c.numerator % 2 == 1 or c.exponent == 0


def test_exact_scalar_canonical():
    assert ExactScalar(4, 3) == ExactScalar(1, 1)
    assert ExactScalar(0, 7) == ExactScalar(0, 0)
    assert ExactScalar.from_fraction(Fraction(-3, 8)) == ExactScalar(-3, 3)
    with pytest.raises(ValueError):
        ExactScalar.from_fraction(Fraction(1, 3))
    assert ExactScalar(1, 2) < ExactScalar(1, 1)


def test_json_round_trip_exact_and_float():
    t = delta_table(2, [3, 0, 1, 2])
    back = CorrelationTable.from_json(t.to_json())
    assert back.equals(t)
    u = uniform_table(2)
    doc = u.to_json()
    assert doc["entries"][0] == [0, 0, 1, 2]
    f = CorrelationTable.floating(2, np.full((4, 4), 0.25))
    assert CorrelationTable.from_json(f.to_json()).equals(f)


def test_exact_prob_is_fraction():
    assert uniform_table(3).prob(2, 5) == Fraction(1, 8)

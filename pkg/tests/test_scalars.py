"""Exact-field tests: canonical forms, q-numbers, evaluation, serialization."""

import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from suq2.scalars import (
    ONE,
    ZERO,
    EvaluationSingularityError,
    Scalar,
    as_scalar,
    big_q,
    q_number,
    scalar_sqrt,
)


def frac(n, d=1):
    return Scalar.from_fraction(Fraction(n, d))


class TestCanonicalForm:
    def test_zero_is_zero_over_one(self):
        z = Scalar({0: 0})
        assert z.num_terms == ()
        assert z.den_terms == ((0, Fraction(1)),)
        assert z == ZERO and z.is_zero()

    def test_common_factor_cancels(self):
        # (v^-2 - v^2) / (v^-1 - v) reduces to the Laurent polynomial v^-1 + v.
        x = Scalar({-2: 1, 2: -1}, {-1: 1, 1: -1})
        assert x == Scalar({-1: 1, 1: 1})
        assert x.is_polynomial()

    def test_denominator_lowest_coefficient_is_one(self):
        x = Scalar({0: 1}, {3: 2, 5: 7})
        lo, c = x.den_terms[0]
        assert (lo, c) == (0, Fraction(1))
        # The v-shift and the scale both moved into the numerator.
        assert x == Scalar({-3: Fraction(1, 2)}, {0: 1, 2: Fraction(7, 2)})

    def test_equal_fractions_share_representation(self):
        x = Scalar({1: 2, 3: 2}, {0: 4})
        y = Scalar({1: 1, 3: 1}, {0: 2})
        assert x == y and hash(x) == hash(y)

    def test_zero_denominator_rejected(self):
        with pytest.raises(ZeroDivisionError):
            Scalar({0: 1}, {0: 0})


class TestArithmetic:
    def test_field_inverse(self):
        x = Scalar({-1: 1, 1: 3}, {0: 1, 2: 1})
        assert (x * x.inverse()).is_one()
        assert (x / x).is_one()

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO
        with pytest.raises(ZeroDivisionError):
            ZERO.inverse()

    def test_integer_coercion(self):
        x = Scalar.v_pow(2)
        assert 1 + x == Scalar({0: 1, 2: 1})
        assert 2 * x - x == x
        assert (1 - x) == -(x - 1)
        assert 6 / frac(3) == frac(2)

    def test_pow(self):
        v = Scalar.v_pow(1)
        assert v ** 0 == ONE
        assert v ** 7 == Scalar.v_pow(7)
        assert v ** -3 == Scalar.v_pow(-3)
        x = ONE + v
        assert x ** 2 == ONE + 2 * v + v * v


class TestQNumbers:
    def test_small_values(self):
        assert q_number(0) == ZERO
        assert q_number(2) == ONE
        # [2]_q = q^-1 + q
        assert q_number(4) == Scalar({-2: 1, 2: 1})
        # [3]_q = q^-2 + 1 + q^2
        assert q_number(6) == Scalar({-4: 1, 0: 1, 4: 1})
        # Half-integer spin: [1/2]_q has an honest denominator.
        assert q_number(1) == Scalar({-1: 1, 1: -1}, {-2: 1, 2: -1})

    def test_negation_symmetry(self):
        for t in range(-9, 10):
            assert q_number(-t) == -q_number(t)

    def test_difference_of_squares(self):
        # [x]^2 - [y]^2 == [x+y][x-y], the workhorse identity behind the
        # spectral-gap factorizations.
        for tx in range(0, 21, 3):
            for ty in range(0, 21, 4):
                lhs = q_number(tx) ** 2 - q_number(ty) ** 2
                rhs = q_number(tx + ty) * q_number(tx - ty)
                assert lhs == rhs

    def test_big_q_matches_bracket_two(self):
        # Q = 1/(q^-1 - q) and [2] = q^-1 + q give Q*[2]*(q^-1 - q) == [2]... ;
        # more simply Q * (q^-1 - q) == 1.
        assert big_q() * Scalar({-2: 1, 2: -1}) == ONE


class TestEvaluation:
    def test_bracket_two_at_half(self):
        assert q_number(4).eval_at_q(0.5) == pytest.approx(2.5, rel=1e-15)

    def test_big_q_at_half(self):
        assert big_q().eval_at_q(0.5) == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_half_power(self):
        assert Scalar.v_pow(1).eval_at_q(0.49) == pytest.approx(0.7, rel=1e-12)

    def test_evaluation_is_a_ring_map(self):
        x = Scalar({-3: 2, 1: 5}, {0: 1, 2: 3})
        y = Scalar({0: 1, 4: -2}, {-1: 1, 1: 2})
        q = 0.37
        assert (x * y).eval_at_q(q) == pytest.approx(
            x.eval_at_q(q) * y.eval_at_q(q), rel=1e-12)
        assert (x + y).eval_at_q(q) == pytest.approx(
            x.eval_at_q(q) + y.eval_at_q(q), rel=1e-12)

    def test_singular_point_raises(self):
        x = ONE / (Scalar.q_pow(1) - frac(1, 2))
        with pytest.raises(EvaluationSingularityError):
            x.eval_at_q(0.5)
        # Fine slightly away from the pole.
        assert math.isfinite(x.eval_at_q(0.50001))

    def test_nonpositive_q_rejected(self):
        with pytest.raises(ValueError):
            ONE.eval_at_q(0.0)


class TestSerialization:
    def test_round_trip(self):
        x = Scalar({-3: Fraction(2, 7), 0: 1, 5: -4}, {0: 3, 2: 1})
        blob = x.dumps()
        assert Scalar.loads(blob) == x
        # Deterministic: canonical dict ordering in the JSON text.
        assert blob == Scalar.loads(blob).dumps()

    def test_schema(self):
        data = json.loads(q_number(4).dumps())
        assert data == {"den": [[0, "1"]], "num": [[-2, "1"], [2, "1"]]}


class TestSqrt:
    def test_perfect_square(self):
        x = Scalar({-1: 1, 1: 3}, {0: 2, 4: 1})
        root = scalar_sqrt(x * x)
        assert root is not None and root ** 2 == x * x

    def test_v_is_not_a_square(self):
        assert scalar_sqrt(Scalar.v_pow(1)) is None

    def test_bracket_two_is_not_a_square(self):
        assert scalar_sqrt(q_number(4)) is None

    def test_zero_and_one(self):
        assert scalar_sqrt(ZERO) == ZERO
        assert scalar_sqrt(ONE) == ONE


# ---------------------------------------------------------------------------
# Property-based field laws.

coeffs = st.fractions(min_value=-40, max_value=40, max_denominator=8)


@st.composite
def scalars(draw, allow_zero=True):
    n = draw(st.dictionaries(st.integers(-4, 4), coeffs, max_size=3))
    d = draw(st.dictionaries(st.integers(-2, 2), coeffs, min_size=1, max_size=2))
    if not any(d.values()):
        d = {0: Fraction(1)}
    x = Scalar(n, d)
    if not allow_zero and x.is_zero():
        x = x + 1
    return x


@settings(max_examples=60, deadline=None)
@given(scalars(), scalars(), scalars())
def test_ring_laws(x, y, z):
    assert (x + y) + z == x + (y + z)
    assert x + y == y + x
    assert (x * y) * z == x * (y * z)
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert x + ZERO == x and x * ONE == x
    assert x - x == ZERO


@settings(max_examples=60, deadline=None)
@given(scalars(allow_zero=False))
def test_multiplicative_inverse(x):
    assert (x * x.inverse()).is_one()


@settings(max_examples=60, deadline=None)
@given(scalars())
def test_json_round_trip(x):
    assert Scalar.loads(x.dumps()) == x


@settings(max_examples=40, deadline=None)
@given(scalars())
def test_sqrt_of_square(x):
    root = scalar_sqrt(x * x)
    assert root is not None
    assert root * root == x * x


def test_as_scalar_coercion():
    assert as_scalar(3) == frac(3)
    assert as_scalar(Fraction(1, 2)) == frac(1, 2)
    assert as_scalar(ONE) is ONE
    with pytest.raises(TypeError):
        as_scalar("v")

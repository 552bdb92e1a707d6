"""Expression parser tests."""

import numpy as np
import pytest

from geofrac.errors import ExpressionError
from geofrac.expressions import parse_expression


def _eval(text, x):
    return parse_expression(text)(np.asarray(x, dtype=float))


def test_constant():
    f = parse_expression("1")
    assert f(np.array([0.0, 0.5, 2.0])) == pytest.approx([1.0, 1.0, 1.0])
    assert f.text == "1"


def test_identity_and_scalar_input():
    f = parse_expression("t")
    assert float(f(0.75)) == 0.75
    assert f(np.array([1.0, 2.0])).tolist() == [1.0, 2.0]


def test_polynomial():
    vals = _eval("3*t^2 - 2*t + 0.5", [0.0, 1.0, 2.0])
    assert vals == pytest.approx([0.5, 1.5, 8.5])


def test_integer_power():
    assert _eval("t^2", [3.0]) == pytest.approx([9.0])
    assert _eval("t^10", [2.0]) == pytest.approx([1024.0])


def test_rational_exponent():
    assert _eval("t^(1/2)", [4.0]) == pytest.approx([2.0])
    assert _eval("t^1/2", [4.0]) == pytest.approx([2.0])
    assert _eval("t^(3/2)", [4.0]) == pytest.approx([8.0])


def test_negative_exponent():
    assert _eval("t^-1", [4.0]) == pytest.approx([0.25])
    assert _eval("t^(-2)", [2.0]) == pytest.approx([0.25])
    # total evaluation: 0^-1 becomes inf, not an exception
    assert np.isinf(_eval("t^-1", [0.0]))[0]


def test_unary_minus_binds_tighter_than_subtraction():
    assert _eval("-t^2", [3.0]) == pytest.approx([-9.0])
    assert _eval("1 - -t", [2.0]) == pytest.approx([3.0])


def test_parentheses_group():
    assert _eval("(1 + t)^2", [2.0]) == pytest.approx([9.0])
    assert _eval("2*(t - 1)", [5.0]) == pytest.approx([8.0])


def test_unicode_aliases():
    assert _eval("2·t − 1", [3.0]) == pytest.approx([5.0])


def test_whitespace_insensitive():
    a = _eval(" 1+2 * t ^ 2 ", [1.5])
    b = _eval("1+2*t^2", [1.5])
    assert a == pytest.approx(b)


def test_vectorized_shape_preserved():
    f = parse_expression("t^2 + 1")
    x = np.linspace(0.0, 1.0, 17)
    assert f(x).shape == (17,)


@pytest.mark.parametrize("bad", [
    "t^^2", "", "t +", "2 t", "(t", "t)", "1/2", "t^", "t^(1/0)",
    "sin(t)", "t^(2+1)", "x", "t^2^3", "*t", "1..5",
])
def test_rejects_malformed(bad):
    with pytest.raises(ExpressionError):
        parse_expression(bad)


def test_rejects_non_string():
    with pytest.raises(ExpressionError):
        parse_expression(12)


def test_error_mentions_position():
    with pytest.raises(ExpressionError, match="position"):
        parse_expression("t^^2")

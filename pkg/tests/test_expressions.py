import pytest
import sys
import math
from pathlib import Path

sys.path.append(str(Path(__file__).resolve().parent))
sys.path.append(str(Path(__file__).resolve().parents[1]))

from oracles import cart
from moyal_spin.cli.expressions import operator_from_spec, parse_operator, parse_scalar, tokenize
from moyal_spin.exceptions import ExpressionError
from moyal_spin.spin_ops import identity_op


def test_tokenize_spin_operators():
    tokens = tokenize("2*I1z*I12alpha")
    assert [t.kind for t in tokens] == ["number", "symbol", "spinop", "symbol", "spinop", "end"]
    assert (tokens[2].slot, tokens[2].axis) == (1, "z")
    assert (tokens[4].slot, tokens[4].axis) == (12, "alpha")


def test_parse_coupling_hamiltonian():
    H = parse_operator("pi*nu*2*I1z*I2z", 2, parameters={"nu": 0.5})
    assert H.allclose(math.pi * cart(2, (1, "z"), (2, "z")))


def test_parse_identity_forms():
    expected = 0.5 * identity_op(2) + cart(2, (1, "x"))
    assert parse_operator("E/2 + I1x", 2).allclose(expected)
    assert parse_operator("\U0001D7D9/2 + I1x", 2).allclose(expected)
    assert parse_operator("3", 1).allclose(3 * identity_op(1))


def test_parse_precedence_and_unary_minus():
    op = parse_operator("-(I1b*I2x + I1z/2)*2", 2)
    expected = -2 * (cart(2, (1, "b"), (2, "x")) + 0.5 * cart(2, (1, "z")))
    assert op.allclose(expected)


def test_parse_complex_coefficient():
    assert parse_operator("I1x + i*I1y", 1).allclose(cart(1, (1, "p")))


@pytest.mark.parametrize(
    "text, position",
    [
        ("I1x +", 5),
        ("I3x", 0),
        ("2*foo", 2),
        ("I1x / I1z", 4),
        ("(I1x", 4),
        ("I1x $", 4),
        ("", 0),
    ],
)
def test_parse_errors_report_position(text, position):
    with pytest.raises(ExpressionError) as info:
        parse_operator(text, 2)
    assert info.value.position == position


def test_parse_scalar():
    assert parse_scalar("1/(2*nu)", {"nu": 2.0}) == pytest.approx(0.25)
    assert parse_scalar(3) == 3.0
    with pytest.raises(ExpressionError):
        parse_scalar("I1x")
    with pytest.raises(ExpressionError):
        parse_scalar("1/0")


def test_operator_from_mapping():
    op = operator_from_spec({"2*I1z*I2z": 3.0, "I1x": "nu"}, 2, parameters={"nu": 0.5})
    assert op.allclose(6 * cart(2, (1, "z"), (2, "z")) + 0.5 * cart(2, (1, "x")))

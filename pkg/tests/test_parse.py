import json
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from slowfast.parse import ParseError, SpecError, parse_polynomial, parse_system
from slowfast.poly import Polynomial, canonical_string

from conftest import FIXTURES

XY = ("x", "y")
XYZ = ("x", "y", "z")


def test_examples():
    p = parse_polynomial("x^2 + x*y - 1", XY)
    assert p == Polynomial(XY, {((2, 0), 0): 1, ((1, 1), 0): 1, ((0, 0), 0): -1})
    vdp = parse_polynomial("y^2*z - 1/2*x^2*y - 1/3*x^3", XYZ)
    assert canonical_string(vdp) == "-1/3*x^3 - 1/2*x^2*y + y^2*z"
    with pytest.raises(ParseError) as info:
        parse_polynomial("x^^2", XY)
    assert (info.value.line, info.value.column) == (1, 3)


def test_precedence_and_associativity():
    assert parse_polynomial("-x^2", XY) == -parse_polynomial("x*x", XY)
    assert parse_polynomial("2^3^2", XY) == Polynomial.constant(XY, 512)
    assert parse_polynomial("1 - x - y", XY) == parse_polynomial("1 - (x + y)", XY)
    assert parse_polynomial("3/4*x", XY) == parse_polynomial("x*3/4", XY)
    assert parse_polynomial("(x+y)^2", XY) == parse_polynomial("x^2 + 2*x*y + y^2", XY)
    with pytest.raises(ParseError, match="decimal"):
        parse_polynomial("0.25*eps", XY)


@pytest.mark.parametrize("src,fragment", [
    ("x^-1", "negative exponent"),
    ("x^1.5", "fractional exponent"),
    ("w + x", "unknown identifier w"),
    ("2x", "implicit multiplication"),
    ("x +", "unexpected end"),
    ("(x", "expected ')'"),
    ("", "empty expression"),
    ("x $ y", ""),
])
def test_errors(src, fragment):
    with pytest.raises(ParseError) as info:
        parse_polynomial(src, XY)
    assert fragment in str(info.value)


def test_multiline_position():
    with pytest.raises(ParseError) as info:
        parse_polynomial("x +\n  y ^ ^", XY)
    assert info.value.line == 2


def _doc(**over):
    doc = {"variables": ["x", "y", "z"], "fast": "x", "P": "y + z",
           "Q": {"y": "x + z", "z": "x + y"}, "weights": [1, 1, 1], "eps": [0.1]}
    doc.update(over)
    return json.dumps(doc)


def test_system_example():
    spec = parse_system(_doc())
    assert spec.n == 3 and spec.variable_names == ["x", "y", "z"]
    assert spec.system().P == parse_polynomial("y + z", XYZ)


def test_fast_variable_moved_first():
    spec = parse_system(_doc(variables=["y", "x", "z"], weights=[2, 1, 3],
                             initial_conditions=[[5, 4, 6]]))
    assert spec.variable_names == ["x", "y", "z"]
    assert spec.weights == [1, 2, 3]
    assert spec.initial_conditions == [[4.0, 5.0, 6.0]]


@pytest.mark.parametrize("over,fragment", [
    ({"weights": [1, 1]}, "weight count mismatch"),
    ({"Q": {"y": "x + w", "z": "x"}}, "unknown identifier w"),
    ({"variables": ["x", "y", "y"]}, "duplicate variable"),
    ({"fast": "q"}, "fast variable"),
    ({"Q": {"y": "x"}}, "missing slow equation"),
    ({"weights": [1, 0, 1]}, "positive"),
    ({"eps": "small"}, "eps"),
])
def test_system_errors(over, fragment):
    with pytest.raises(SpecError) as info:
        parse_system(_doc(**over))
    assert fragment in str(info.value)


def test_missing_field():
    doc = json.loads(_doc())
    del doc["P"]
    with pytest.raises(SpecError, match="missing field 'P'"):
        parse_system(json.dumps(doc))
    with pytest.raises(ParseError):
        parse_system("{not json")


def test_all_fixtures_parse():
    files = sorted(FIXTURES.glob("*.json"))
    assert len(files) >= 10
    for f in files:
        spec = parse_system(f.read_text())
        assert spec.system().n == spec.n


def _mutations(r, s):
    alphabet = "xyz+-*/^()1 2.eps"
    out = []
    for _ in range(40):
        t = list(s)
        for _ in range(r.randint(1, 3)):
            op = r.randint(0, 2)
            k = r.randrange(len(t) + 1)
            if op == 0 and t:
                del t[min(k, len(t) - 1)]
            elif op == 1:
                t.insert(k, r.choice(alphabet))
            elif t:
                t[min(k, len(t) - 1)] = r.choice(alphabet)
        out.append("".join(t))
    return out


def test_fuzz_total():
    """Mutated inputs give a polynomial or a structured error, never a crash."""
    r = random.Random(1)
    seeds = ["x^2 + x*y - 1", "y^2*z - 1/2*x^2*y - 1/3*x^3", "(x + y)^3*eps",
             "x*(y^2 - z^2)", "-1 + x*y"]
    for s in seeds:
        for m in _mutations(r, s):
            try:
                parse_polynomial(m, XYZ)
            except ParseError as exc:
                assert exc.line >= 1 and exc.column >= 1


@given(st.text(alphabet="xyz+-*/^()0123456789. eps\n", max_size=30))
def test_fuzz_hypothesis(src):
    try:
        parse_polynomial(src, XYZ)
    except ParseError:
        pass

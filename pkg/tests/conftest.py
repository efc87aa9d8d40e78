import os
import random
from fractions import Fraction
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from slowfast.parse import load_system, parse_polynomial
from slowfast.poly import Polynomial
from slowfast.system import SlowFastSystem

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures" / "systems"
GOLDEN = ROOT / "fixtures" / "golden"

settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def make_system(P, *Q, names=None):
    """System from source strings; names default to x, y[, z]."""
    names = tuple(names or ("x", "y", "z")[: len(Q) + 1])
    return SlowFastSystem(names, parse_polynomial(P, names),
                          [parse_polynomial(q, names) for q in Q])


def fixture_spec(name):
    return load_system(FIXTURES / f"{name}.json")


@pytest.fixture
def rng():
    return random.Random(20240611)


# ---- hypothesis strategies -------------------------------------------------------

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def polynomials(draw, names=("x", "y"), max_degree=4, max_terms=6, with_eps=True):
    n = len(names)
    k = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(k):
        exps = tuple(draw(st.integers(0, max_degree)) for _ in range(n))
        e = draw(st.integers(0, 1)) if with_eps else 0
        c = draw(rationals)
        terms[(exps, e)] = c
    p = Polynomial.zero(names)
    for (exps, e), c in terms.items():
        p = p + Polynomial.monomial(names, exps, e, c)
    return p


def random_rational(r: random.Random, lo=-5, hi=5, den=4):
    return Fraction(r.randint(lo * den, hi * den), r.randint(1, den))


# ---- acceptance reporting --------------------------------------------------------

ACCEPTANCE_RESULTS: dict = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        title, ok, seconds, detail = ACCEPTANCE_RESULTS[number]
        status = "PASS" if ok else "FAIL"
        line = f"criterion {number}: {status}  {title}  ({seconds:.2f} s)"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)

import random
from fractions import Fraction

import sympy
from sympy.polys.subresultants_qq_zz import sylvester
from hypothesis import example, given, settings
from hypothesis import strategies as st

from slowfast import univariate as U

t = sympy.Symbol("t")


def to_sym(p):
    return sum(sympy.Rational(c.numerator, c.denominator) * t ** k for k, c in enumerate(p))


coeff_lists = st.lists(st.fractions(-6, 6, max_denominator=4), min_size=1, max_size=7)


@given(coeff_lists, coeff_lists)
def test_division_identity(a, b):
    a, b = U.strip(a), U.strip(b)
    if not b:
        return
    q, r = U.divmod_(a, b)
    assert U.add(U.mul(q, b), r) == a
    assert U.deg(r) < U.deg(b)


@given(coeff_lists, coeff_lists)
@settings(max_examples=60)
def test_gcd_against_sympy(a, b):
    a, b = U.strip(a), U.strip(b)
    if not a or not b:
        return
    g = U.gcd(a, b)
    want = sympy.Poly(sympy.gcd(to_sym(a), to_sym(b)), t).monic()
    assert sympy.Poly(to_sym(g), t).monic() == want


def sylvester_det(a, b):
    # sympy.resultant gets the sign wrong for some inputs, e.g. (t + 2, t^3)
    return sylvester(to_sym(a), to_sym(b), t).det()


@given(coeff_lists, coeff_lists)
@example([Fraction(1), Fraction(1)], [Fraction(0), Fraction(0), Fraction(0), Fraction(1)])
@settings(max_examples=60)
def test_resultant_against_sympy(a, b):
    a, b = U.strip(a), U.strip(b)
    if U.deg(a) < 1 or U.deg(b) < 1:
        return
    assert U.resultant(a, b) == sylvester_det(a, b)


def test_resultant_product_formula():
    # Res(t + c, b) = b(-c) for monic linear first argument
    for c in (1, 2, -3):
        for b in ([0, 0, 0, 1], [0, 1, 0, 1], [5, -1, 2]):
            b = [Fraction(x) for x in b]
            want = sum(bk * Fraction(-c) ** k for k, bk in enumerate(b))
            assert U.resultant([Fraction(c), Fraction(1)], b) == want


def _random_with_roots(r):
    """Product of rational linear factors, a quadratic and a repeated factor."""
    p = [Fraction(1)]
    roots = []
    for _ in range(r.randint(1, 4)):
        q = Fraction(r.randint(-20, 20), r.randint(1, 5))
        p = U.mul(p, [-q, 1])
        roots.append(q)
    c = r.randint(-5, 5)
    p = U.mul(p, [c, 0, 1])                   # x^2 + c
    if c < 0:
        roots += [sympy.sqrt(-c), -sympy.sqrt(-c)]
    return p


def test_isolate_against_sympy():
    r = random.Random(2)
    for _ in range(60):
        p = _random_with_roots(r)
        ours = U.isolate_real_roots(U.squarefree_part(p))
        want = sorted(set(sympy.real_roots(sympy.Poly(to_sym(p), t))), key=float)
        assert len(ours) == len(want)
        for got, w in zip(sorted(ours, key=float), want):
            assert got.lo <= float(w) <= got.hi or abs(float(got) - float(w)) < 1e-10
            if w.is_Rational:
                assert got.exact == Fraction(int(w.p), int(w.q))


def test_multiplicities():
    p = U.mul(U.mul([-1, 1], [-1, 1]), [2, 1])      # (x-1)^2 (x+2)
    got = [(r.exact, m) for r, m in U.real_roots_with_multiplicity(p)]
    assert got == [(-2, 1), (1, 2)]


def test_irrational_root_signs():
    (r1, r2) = sorted(U.isolate_real_roots([-2, 0, 1]), key=float)  # ±sqrt(2)
    assert r1.exact is None
    assert abs(float(r2) - 2 ** 0.5) < 1e-12
    # sign of x^2 - 2 at sqrt(2) is exactly zero, sign of x - 1 is positive
    assert r2.sign_of([-2, 0, 1]) == 0
    assert r2.sign_of([-1, 1]) == 1
    assert r1.sign_of([-1, 1]) == -1
    # 3/2 is a rational value close to sqrt(2)
    assert r2.sign_of([Fraction(-3, 2), 1]) == -1


def test_sturm_counts_match_bound():
    p = [-6, 11, -6, 1]                                # (x-1)(x-2)(x-3)
    seq = U.sturm_sequence(p)
    assert U.count_roots(seq, "-inf", "+inf") == 3
    assert U.count_roots(seq, Fraction(3, 2), 5) == 2
    assert U.root_bound(p) >= 3


def test_interpolate_round_trip():
    p = [Fraction(1, 3), -2, 0, 5]
    xs = [0, 1, 2, 3]
    assert U.interpolate(xs, [U.evaluate(p, x) for x in xs]) == U.strip(p)


def test_determinant():
    assert U.determinant([[1, 2], [3, 4]]) == -2
    assert U.determinant([[0, 1, 0], [1, 0, 0], [0, 0, 5]]) == -5

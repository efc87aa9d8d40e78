"""Exact sparse multivariate (Laurent) polynomials over the rationals.

A polynomial lives in a ring with named spatial variables ``x_1, ..., x_n``
plus the perturbation parameter ``eps``.  Terms are stored as a map from
:class:`Monomial` to :class:`fractions.Fraction`; zero coefficients are never
stored.  Spatial exponents may be negative (Laurent monomials appear while
substituting chart coordinates), the ``eps`` exponent may not.

Quasi-homogeneous structure is always with respect to the spatial variables
only: ``eps`` carries weight zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

EPS = "eps"

Scalar = Union[int, Fraction]


class PolynomialError(ValueError):
    """Raised on ill-formed polynomial operations."""


class DimensionError(PolynomialError):
    pass


class Monomial(NamedTuple):
    spatial: tuple
    eps: int = 0

    @property
    def degree(self) -> int:
        return sum(self.spatial) + self.eps

    def __mul__(self, other):  # type: ignore[override]
        return Monomial(tuple(a + b for a, b in zip(self.spatial, other.spatial)),
                        self.eps + other.eps)


@dataclass(frozen=True)
class WeightVector:
    """Positive integer weights, fast variable first."""

    weights: tuple

    def __post_init__(self):
        w = tuple(int(a) for a in self.weights)
        if not w:
            raise ValueError("weight vector is empty")
        if any(a < 1 for a in w):
            raise ValueError(f"weights must be positive integers, got {w}")
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return len(self.weights)

    def __getitem__(self, i):
        return self.weights[i]

    def __iter__(self):
        return iter(self.weights)


def as_weights(w) -> WeightVector:
    return w if isinstance(w, WeightVector) else WeightVector(tuple(w))


def _fraction(c) -> Fraction:
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"exact rational coefficient required, got {type(c).__name__}")


def _sort_key(m: Monomial):
    return (m.degree, m.spatial, m.eps)


class Polynomial:
    """Immutable sparse polynomial in ``names`` and ``eps``."""

    __slots__ = ("names", "_terms", "_hash")

    def __init__(self, names: Sequence[str], terms: Mapping | None = None):
        self.names = tuple(names)
        n = len(self.names)
        clean = {}
        for m, c in (terms or {}).items():
            if not isinstance(m, Monomial):
                m = Monomial(tuple(m[0]), int(m[1]))
            if len(m.spatial) != n:
                raise DimensionError(
                    f"monomial {m.spatial} does not match {n} variables")
            if m.eps < 0:
                raise PolynomialError("negative exponent of eps")
            c = _fraction(c)
            if c:
                clean[m] = clean.get(m, 0) + c
                if not clean[m]:
                    del clean[m]
        self._terms = clean
        self._hash = None

    # construction -----------------------------------------------------------------

    @classmethod
    def zero(cls, names):
        return cls(names)

    @classmethod
    def constant(cls, names, c):
        return cls(names, {Monomial((0,) * len(names), 0): c})

    @classmethod
    def var(cls, names, name):
        names = tuple(names)
        if name == EPS:
            return cls(names, {Monomial((0,) * len(names), 1): 1})
        if name not in names:
            raise PolynomialError(f"unknown variable {name}")
        e = [0] * len(names)
        e[names.index(name)] = 1
        return cls(names, {Monomial(tuple(e), 0): 1})

    @classmethod
    def monomial(cls, names, spatial, eps=0, coeff=1):
        return cls(names, {Monomial(tuple(spatial), eps): coeff})

    # queries ----------------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def items(self):
        """Terms in canonical (graded-lex descending) order."""
        return sorted(self._terms.items(), key=lambda t: _sort_key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(m.spatial) and m.eps == 0 for m in self._terms)

    def constant_term(self) -> Fraction:
        return self._terms.get(Monomial((0,) * self.n, 0), Fraction(0))

    def is_laurent(self) -> bool:
        return any(a < 0 for m in self._terms for a in m.spatial)

    def coefficient(self, spatial, eps=0) -> Fraction:
        return self._terms.get(Monomial(tuple(spatial), eps), Fraction(0))

    def index(self, var: str) -> int:
        """Position of a spatial variable; ``eps`` maps to ``n``."""
        if var == EPS:
            return self.n
        try:
            return self.names.index(var)
        except ValueError:
            raise PolynomialError(f"unknown variable {var}") from None

    def degree_in(self, var: str) -> int:
        i = self.index(var)
        if not self._terms:
            return -1
        if i == self.n:
            return max(m.eps for m in self._terms)
        return max(m.spatial[i] for m in self._terms)

    def variables(self) -> set:
        used = set()
        for m in self._terms:
            used.update(self.names[i] for i, a in enumerate(m.spatial) if a)
            if m.eps:
                used.add(EPS)
        return used

    # arithmetic -------------------------------------------------------------------

    def _check(self, other: "Polynomial"):
        if self.names != other.names:
            raise DimensionError(f"ring mismatch: {self.names} vs {other.names}")

    def _lift(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(self.names, _fraction(other))

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(self.names, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.names, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = _fraction(other)
            return Polynomial(self.names, {m: c * v for m, v in self._terms.items()})
        self._check(other)
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                out[m] = out.get(m, 0) + c1 * c2
        return Polynomial(self.names, out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _fraction(other)
        if not c:
            raise ZeroDivisionError("division of a polynomial by zero")
        return self * (1 / c)

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise PolynomialError("polynomial powers must be nonnegative integers")
        if len(self._terms) == 1:
            (m, c), = self._terms.items()
            return Polynomial(self.names, {
                Monomial(tuple(a * k for a in m.spatial), m.eps * k): c ** k})
        result = Polynomial.constant(self.names, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.names == other.names and self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self == Polynomial.constant(self.names, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.names, frozenset(self._terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self._terms)

    def __str__(self):
        return canonical_string(self)

    def __repr__(self):
        return f"Polynomial({canonical_string(self)!r}, names={self.names})"

    # structure --------------------------------------------------------------------

    def rename(self, names: Sequence[str]) -> "Polynomial":
        if len(names) != self.n:
            raise DimensionError("rename must keep the number of variables")
        return Polynomial(names, self._terms)

    def permute(self, order: Sequence[int], names: Sequence[str] | None = None):
        """Reorder spatial slots: new slot k holds old variable ``order[k]``."""
        names = tuple(names) if names is not None else tuple(self.names[i] for i in order)
        return Polynomial(names, {
            Monomial(tuple(m.spatial[i] for i in order), m.eps): c
            for m, c in self._terms.items()})

    def shift(self, var: str, k: int) -> "Polynomial":
        """Multiply by ``var**k`` (``k`` may be negative)."""
        i = self.index(var)
        out = {}
        for m, c in self._terms.items():
            if i == self.n:
                if m.eps + k < 0:
                    raise PolynomialError("negative exponent of eps")
                out[Monomial(m.spatial, m.eps + k)] = c
            else:
                e = list(m.spatial)
                e[i] += k
                out[Monomial(tuple(e), m.eps)] = c
        return Polynomial(self.names, out)

    def min_exponent(self, var: str) -> int:
        i = self.index(var)
        if not self._terms:
            return 0
        if i == self.n:
            return min(m.eps for m in self._terms)
        return min(m.spatial[i] for m in self._terms)

    def divisible_by(self, var: str) -> bool:
        return self.is_zero() or self.min_exponent(var) >= 1

    def collect(self, var: str) -> dict:
        """Split into ``{k: coefficient polynomial}`` with ``self = sum var**k * c_k``."""
        i = self.index(var)
        out: dict = {}
        for m, c in self._terms.items():
            if i == self.n:
                k, rest = m.eps, Monomial(m.spatial, 0)
            else:
                e = list(m.spatial)
                k, e[i] = e[i], 0
                rest = Monomial(tuple(e), m.eps)
            out.setdefault(k, {})[rest] = c
        return {k: Polynomial(self.names, t) for k, t in out.items()}


# ----------------------------------------------------------------------------------
# operations
# ----------------------------------------------------------------------------------

def add(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p + q


def mul(p: Polynomial, q: Polynomial) -> Polynomial:
    p._check(q)
    return p * q


def partial(p: Polynomial, var: str) -> Polynomial:
    """Formal partial derivative; negative exponents follow the power rule."""
    i = p.index(var)
    out = {}
    for m, c in p.terms.items():
        if i == p.n:
            if m.eps:
                out[Monomial(m.spatial, m.eps - 1)] = c * m.eps
            continue
        a = m.spatial[i]
        if a:
            e = list(m.spatial)
            e[i] -= 1
            out[Monomial(tuple(e), m.eps)] = c * a
    return Polynomial(p.names, out)


def evaluate(p: Polynomial, point: Sequence) -> Fraction:
    """Exact value at ``point = (x_1, ..., x_n, eps)``."""
    if len(point) != p.n + 1:
        raise DimensionError(f"expected {p.n + 1} coordinates (including eps), "
                             f"got {len(point)}")
    pt = [_fraction(v) for v in point]
    total = Fraction(0)
    for m, c in p.terms.items():
        term = c
        for v, a in zip(pt, m.spatial):
            if a < 0 and v == 0:
                raise ZeroDivisionError("zero raised to a negative power")
            if a:
                term *= v ** a
        if m.eps:
            term *= pt[-1] ** m.eps
        total += term
    return total


def evaluate_float(p: Polynomial, point: Sequence[float]) -> float:
    total = 0.0
    for m, c in p.terms.items():
        term = float(c)
        for v, a in zip(point, m.spatial):
            if a:
                term *= v ** a
        if m.eps:
            term *= point[-1] ** m.eps
        total += term
    return total


def substitute(p: Polynomial, images: Mapping[str, object], names: Sequence[str]) -> Polynomial:
    """Compose ``p`` with ``images`` (variable -> Polynomial over ``names`` or scalar).

    Variables of ``p`` missing from ``images`` must also exist in ``names`` and are
    carried over.  Negative powers are allowed only for monomial images.
    """
    names = tuple(names)
    cache: dict = {}

    def image(var):
        if var in images:
            img = images[var]
        elif var == EPS:
            img = Polynomial.var(names, EPS)
        else:
            img = Polynomial.var(names, var)
        if not isinstance(img, Polynomial):
            img = Polynomial.constant(names, img)
        if img.names != names:
            raise DimensionError(f"image of {var} lives in {img.names}, expected {names}")
        return img

    def power(var, k):
        key = (var, k)
        if key not in cache:
            img = image(var)
            if k >= 0:
                cache[key] = img ** k
            else:
                if len(img.terms) != 1:
                    raise PolynomialError(
                        f"cannot invert non-monomial image of {var}")
                (m, c), = img.terms.items()
                if m.eps:
                    raise PolynomialError("cannot invert a power of eps")
                cache[key] = Polynomial(names, {
                    Monomial(tuple(a * k for a in m.spatial), 0): (1 / c) ** (-k)})
        return cache[key]

    total = Polynomial.zero(names)
    for m, c in p.terms.items():
        term = Polynomial.constant(names, c)
        for var, a in zip(p.names, m.spatial):
            if a:
                term = term * power(var, a)
        if m.eps:
            term = term * power(EPS, m.eps)
        total = total + term
    return total


def specialize(p: Polynomial, values: Mapping[str, object]) -> Polynomial:
    """Fix some variables to rational constants, staying in the same ring."""
    return substitute(p, {k: _fraction(v) for k, v in values.items()}, p.names)


def to_univariate(p: Polynomial, var: str) -> list:
    """Dense coefficient list (low to high) of a polynomial in ``var`` only."""
    i = p.index(var)
    coeffs: dict = {}
    for m, c in p.terms.items():
        exps = list(m.spatial) + [m.eps]
        k = exps[i]
        exps[i] = 0
        if any(exps):
            raise PolynomialError(f"{p} depends on variables other than {var}")
        if k < 0:
            raise PolynomialError("Laurent polynomial cannot be made univariate")
        coeffs[k] = c
    if not coeffs:
        return []
    return [coeffs.get(k, Fraction(0)) for k in range(max(coeffs) + 1)]


def from_univariate(coeffs: Sequence, var: str, names: Sequence[str]) -> Polynomial:
    x = Polynomial.var(names, var)
    return sum((Fraction(c) * x ** k for k, c in enumerate(coeffs) if c),
               Polynomial.zero(names))


# ----------------------------------------------------------------------------------
# quasi-homogeneous structure
# ----------------------------------------------------------------------------------

def quasi_degree(m, weights) -> int:
    """Weighted degree of a monomial; the eps exponent counts zero."""
    spatial = m.spatial if isinstance(m, Monomial) else tuple(m)
    w = as_weights(weights)
    if len(spatial) != len(w):
        raise DimensionError("monomial and weight vector differ in length")
    return sum(a * b for a, b in zip(w, spatial))


@dataclass(frozen=True)
class Decomposition:
    components: dict
    delta: int | None
    component_weight: int

    def top(self) -> Polynomial | None:
        return None if self.delta is None else self.components[self.delta]

    def degree(self) -> int | None:
        """``deg_w`` of the decomposed polynomial (``delta + component_weight``)."""
        return None if self.delta is None else self.delta + self.component_weight

    def get(self, d: int, names) -> Polynomial:
        return self.components.get(d, Polynomial.zero(names))


def decompose(p: Polynomial, weights, component_weight: int) -> Decomposition:
    """Split ``p`` into quasi-homogeneous parts keyed by ``d = deg_w - component_weight``."""
    w = as_weights(weights)
    if len(w) != p.n:
        raise DimensionError("weight vector length differs from number of variables")
    if p.is_laurent():
        raise PolynomialError("decompose requires a genuine polynomial")
    parts: dict = {}
    for m, c in p.terms.items():
        d = quasi_degree(m, w) - component_weight
        parts.setdefault(d, {})[m] = c
    comps = {d: Polynomial(p.names, t) for d, t in parts.items()}
    return Decomposition(comps, max(comps) if comps else None, component_weight)


def is_quasi_homogeneous(p: Polynomial, weights) -> bool:
    return len({quasi_degree(m, weights) for m in p.terms}) <= 1


# ----------------------------------------------------------------------------------
# canonical string form
# ----------------------------------------------------------------------------------

def _format_coeff(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def _format_monomial(names, m: Monomial) -> str:
    parts = []
    for name, a in zip(names, m.spatial):
        if a == 1:
            parts.append(name)
        elif a:
            parts.append(f"{name}^{a}")
    if m.eps == 1:
        parts.append(EPS)
    elif m.eps:
        parts.append(f"{EPS}^{m.eps}")
    return "*".join(parts)


def canonical_string(p: Polynomial) -> str:
    """Graded-lex descending; e.g. ``-2/3*x^2*y + eps*z``."""
    if p.is_zero():
        return "0"
    out = []
    for i, (m, c) in enumerate(p.items()):
        mono = _format_monomial(p.names, m)
        mag = abs(c)
        if not mono:
            body = _format_coeff(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_format_coeff(mag)}*{mono}"
        if i == 0:
            out.append(("-" if c < 0 else "") + body)
        else:
            out.append((" - " if c < 0 else " + ") + body)
    return "".join(out)


def variables_used(polys: Iterable[Polynomial]) -> set:
    out: set = set()
    for p in polys:
        out |= p.variables()
    return out

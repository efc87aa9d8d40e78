"""Directional charts of the weighted (Poincare-Lyapunov) compactification.

Chart ``U_i`` (``V_i``) covers the part of the sphere where the ``i``-th
coordinate is positive (negative).  For ``i <= n`` the chart coordinates are
``x_i = s / v^{w_i}`` and ``x_j = u_k / v^{w_j}`` for ``j != i``, where
``s = +1`` on ``U_i`` and ``s = -1`` on ``V_i``; ``v = 0`` is infinity.  After
multiplying by ``v^delta`` the field becomes polynomial:

    u_k' = sum_d v^(delta-d) * (X_{j,d} - s*(w_j/w_i) * u_k * X_{i,d})
    v'   = -(s/w_i) * sum_d v^(delta+1-d) * X_{i,d}

with every ``X_{j,d}`` evaluated at ``x_i = s``, ``x_j = u_k``.  Chart
``U_{n+1}`` is the original field and ``V_{n+1}`` its negative.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import Polynomial, as_weights, decompose, substitute
from .system import SlowFastSystem


class DerivationError(RuntimeError):
    """A chart derivation produced something that cannot be right."""


@dataclass(frozen=True, order=True)
class ChartId:
    family: str
    index: int

    def __post_init__(self):
        if self.family not in ("U", "V"):
            raise ValueError(f"chart family must be U or V, got {self.family!r}")
        if self.index < 1:
            raise ValueError(f"chart index must be positive, got {self.index}")

    @classmethod
    def parse(cls, label: str) -> "ChartId":
        label = label.strip()
        if len(label) < 2 or label[0] not in "UV" or not label[1:].isdigit():
            raise ValueError(f"bad chart label {label!r}")
        return cls(label[0], int(label[1:]))

    @property
    def sign(self) -> int:
        return 1 if self.family == "U" else -1

    def __str__(self):
        return f"{self.family}{self.index}"


def chart_names(n: int) -> tuple:
    """Coordinate names of a directional chart; the last one is the infinity coordinate."""
    if n == 2:
        return ("u", "v")
    if n == 3:
        return ("u", "v", "w")
    return ("u",) + tuple(f"v{k}" for k in range(2, n + 1))


def other_slots(n: int, i: int) -> list:
    """Original variable slots carried by ``u, v_2, ...`` in the chart of slot ``i``."""
    return [j for j in range(n) if j != i]


@dataclass(frozen=True)
class ChartField:
    chart: ChartId
    names: tuple
    equations: tuple
    rescale_power: int
    direction: str                  # "fast", "slow" or "identity"
    weights: tuple = ()
    source_names: tuple = ()

    @property
    def n(self) -> int:
        return len(self.names)

    @property
    def slow_index(self) -> int | None:
        return self.chart.index if self.direction == "slow" else None

    def strings(self) -> list:
        return [str(e) for e in self.equations]

    def labelled(self) -> list:
        return [f"{name}' = {eq}" for name, eq in zip(self.names, self.equations)]

    def restrict(self, values: dict) -> "ChartField":
        """Set some coordinates to constants (e.g. ``{"w": 0}``) and drop their equations."""
        keep = [k for k, name in enumerate(self.names) if name not in values]
        names = tuple(self.names[k] for k in keep)
        images = {name: Fraction(c) for name, c in values.items()}
        eqs = []
        for k in keep:
            p = substitute(self.equations[k], images, self.names)
            p = p.permute(keep, names)
            eqs.append(p)
        weights = tuple(self.weights[k] for k in keep) if self.weights else ()
        return ChartField(self.chart, names, tuple(eqs), self.rescale_power,
                          self.direction, weights, self.source_names)


def _check_chart(sys: SlowFastSystem, chart: ChartId):
    if not 1 <= chart.index <= sys.n + 1:
        raise ValueError(f"chart {chart} out of range for n = {sys.n}")


def compactify_chart(sys: SlowFastSystem, weights, chart: ChartId) -> ChartField:
    w = as_weights(weights)
    _check_chart(sys, chart)
    n = sys.n
    if len(w) != n:
        raise ValueError(f"weight vector has {len(w)} entries for {n} variables")
    field_ = sys.vector_field()
    s = chart.sign

    if chart.index == n + 1:
        eqs = tuple(field_) if s == 1 else tuple(-p for p in field_)
        return ChartField(chart, sys.names, eqs, 0, "identity", tuple(w), sys.names)

    i = chart.index - 1
    names = chart_names(n)
    slots = other_slots(n, i)
    images = {sys.names[i]: Fraction(s)}
    for k, j in enumerate(slots):
        images[sys.names[j]] = Polynomial.var(names, names[k])
    decs = [decompose(p, w, w[j]) for j, p in enumerate(field_)]
    deltas = [d.delta for d in decs if d.delta is not None]
    if not deltas:
        raise DerivationError("the vector field vanishes identically")
    delta = max(deltas)
    v = names[-1]

    def evaluated(j):
        return {d: substitute(c, images, names) for d, c in decs[j].components.items()}

    parts = [evaluated(j) for j in range(n)]

    def sweep(j, extra):
        total = Polynomial.zero(names)
        for d, c in parts[j].items():
            total = total + c.shift(v, delta + extra - d)
        return total

    Xi = sweep(i, 0)
    eqs = []
    for k, j in enumerate(slots):
        uk = Polynomial.var(names, names[k])
        eqs.append(sweep(j, 0) - Fraction(s * w[j], w[i]) * uk * Xi)
    eqs.append(sweep(i, 1) * Fraction(-s, w[i]))

    for p in eqs:
        if p.is_laurent():
            raise DerivationError(f"chart {chart}: negative exponent survived in {p}")
    if not eqs[-1].divisible_by(v):
        raise DerivationError(f"chart {chart}: infinity is not invariant")
    direction = "fast" if chart.index == 1 else "slow"
    cw = tuple(w[j] for j in slots) + (w[i],)
    return ChartField(chart, names, tuple(eqs), delta, direction, cw, sys.names)


def compactify_direct(sys: SlowFastSystem, weights, chart: ChartId) -> ChartField:
    """Same chart field by brute-force Laurent substitution and the chain rule.

    Independent of the quasi-homogeneous decomposition; used to cross-check it.
    """
    w = as_weights(weights)
    _check_chart(sys, chart)
    n = sys.n
    if chart.index == n + 1:
        return compactify_chart(sys, w, chart)
    s = chart.sign
    i = chart.index - 1
    names = chart_names(n)
    slots = other_slots(n, i)
    v = names[-1]
    vpoly = Polynomial.var(names, v)
    images = {sys.names[i]: Polynomial.monomial(names, _unit(n, n - 1, -w[i]), coeff=s)}
    for k, j in enumerate(slots):
        e = _unit(n, n - 1, -w[j])
        e[k] = 1
        images[sys.names[j]] = Polynomial.monomial(names, e)
    X = [substitute(p, images, names) for p in sys.vector_field()]
    # 1/x_i = s * v^{w_i}
    inv_xi = Polynomial.monomial(names, _unit(n, n - 1, w[i]), coeff=s)
    vdot = Fraction(-1, w[i]) * vpoly * X[i] * inv_xi
    eqs = []
    for k, j in enumerate(slots):
        uk = Polynomial.var(names, names[k])
        vw = Polynomial.monomial(names, _unit(n, n - 1, w[j]))
        # u_k = x_j v^{w_j}: u_k' = v^{w_j} X_j + w_j u_k v' / v
        eqs.append(vw * X[j] + w[j] * uk * vdot.shift(v, -1))
    eqs.append(vdot)
    delta = max(d for d in sys.deltas(w) if d is not None)
    eqs = [p.shift(v, delta) for p in eqs]
    for p in eqs:
        if p.is_laurent():
            raise DerivationError(f"chart {chart}: negative exponent survived in {p}")
    direction = "fast" if chart.index == 1 else "slow"
    cw = tuple(w[j] for j in slots) + (w[i],)
    return ChartField(chart, names, tuple(eqs), delta, direction, cw, sys.names)


def _unit(n, slot, value):
    e = [0] * n
    e[slot] = value
    return e


def all_charts(sys: SlowFastSystem, weights) -> list:
    """``U_1, V_1, ..., U_{n+1}, V_{n+1}``."""
    out = []
    for idx in range(1, sys.n + 2):
        for fam in "UV":
            out.append(compactify_chart(sys, weights, ChartId(fam, idx)))
    return out


# ----------------------------------------------------------------------------------
# structural dichotomies
# ----------------------------------------------------------------------------------

@dataclass
class StructureReport:
    delta: int
    delta_1: int | None
    delta_j: list
    u1_is_slow_fast: bool = False
    infinity_filled_with_equilibria: bool = False
    Q_irrelevant_at_infinity: bool = False
    infinity_dynamics_is_slow_fast: bool = False

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "delta_1": self.delta_1,
            "delta_j": list(self.delta_j),
            "u1_is_slow_fast": self.u1_is_slow_fast,
            "infinity_filled_with_equilibria": self.infinity_filled_with_equilibria,
            "Q_irrelevant_at_infinity": self.Q_irrelevant_at_infinity,
            "infinity_dynamics_is_slow_fast": self.infinity_dynamics_is_slow_fast,
        }


def structure_report(sys: SlowFastSystem, weights) -> StructureReport:
    ds = sys.deltas(weights)
    d1, dj = ds[0], ds[1:]
    present = [d for d in dj if d is not None]
    delta = sys.delta(weights)
    filled = bool(present) and (d1 is None or d1 < max(present))
    irrelevant = d1 is not None and all(d1 > d for d in present)
    sf = sys.n >= 3 and d1 == delta and any(d == delta for d in present)
    return StructureReport(delta, d1, list(dj), False, filled, irrelevant, sf)


# ----------------------------------------------------------------------------------
# numeric transition maps
# ----------------------------------------------------------------------------------

def to_chart(x, weights, chart: ChartId, n: int | None = None) -> np.ndarray:
    """Original point -> chart coordinates (requires the chart's sign on ``x_i``)."""
    x = np.asarray(x, dtype=float)
    n = len(x) if n is None else n
    if chart.index == n + 1:
        return x.copy()
    w = as_weights(weights)
    i = chart.index - 1
    xi = chart.sign * x[i]
    if xi <= 0:
        raise ValueError(f"point {x} is not in chart {chart}")
    v = xi ** (-1.0 / w[i])
    out = [x[j] * v ** w[j] for j in other_slots(n, i)]
    out.append(v)
    return np.array(out)


def from_chart(c, weights, chart: ChartId) -> np.ndarray:
    """Chart coordinates (with ``v > 0``) -> original point."""
    c = np.asarray(c, dtype=float)
    n = len(c)
    if chart.index == n + 1:
        return c.copy()
    w = as_weights(weights)
    i = chart.index - 1
    v = c[-1]
    if v <= 0:
        raise ValueError("infinity (v <= 0) has no finite preimage")
    x = np.empty(n)
    x[i] = chart.sign * v ** (-w[i])
    for k, j in enumerate(other_slots(n, i)):
        x[j] = c[k] * v ** (-w[j])
    return x


def transition(c, weights, src: ChartId, dst: ChartId) -> np.ndarray:
    return to_chart(from_chart(c, weights, src), weights, dst)


def chart_jacobian(x, weights, chart: ChartId) -> np.ndarray:
    """Analytic Jacobian of ``to_chart`` at an original point ``x``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if chart.index == n + 1:
        return np.eye(n)
    w = as_weights(weights)
    i = chart.index - 1
    c = to_chart(x, w, chart)
    v = c[-1]
    J = np.zeros((n, n))
    J[n - 1, i] = -v / (w[i] * x[i])
    for k, j in enumerate(other_slots(n, i)):
        J[k, j] = v ** w[j]
        J[k, i] = -(w[j] / w[i]) * c[k] / x[i]
    return J

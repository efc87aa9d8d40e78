"""Polynomial slow-fast systems ``x' = P``, ``y_j' = eps * Q^j``."""

from __future__ import annotations

from dataclasses import dataclass

from .poly import Decomposition, Polynomial, as_weights, decompose


@dataclass(frozen=True)
class SlowFastSystem:
    """Fast equation ``P`` and slow equations ``Q[0..n-2]`` over one ring.

    ``names[0]`` is the fast variable.  In fast time the vector field is
    ``(P, eps*Q^2, ..., eps*Q^n)``.
    """

    names: tuple
    P: Polynomial
    Q: tuple

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "Q", tuple(self.Q))
        if len(self.names) < 2:
            raise ValueError("a slow-fast system needs at least two variables")
        if len(self.Q) != len(self.names) - 1:
            raise ValueError(f"expected {len(self.names) - 1} slow equations, "
                             f"got {len(self.Q)}")
        for p in (self.P, *self.Q):
            if p.names != self.names:
                raise ValueError(f"equation ring {p.names} differs from {self.names}")
            if p.is_laurent():
                raise ValueError("system equations must be polynomial")

    @classmethod
    def from_polys(cls, P: Polynomial, *Q: Polynomial):
        return cls(P.names, P, Q)

    @property
    def n(self) -> int:
        return len(self.names)

    def vector_field(self) -> tuple:
        """Fast-time components ``(P, eps*Q^2, ...)``."""
        eps = Polynomial.var(self.names, "eps")
        return (self.P,) + tuple(eps * q for q in self.Q)

    def equations(self) -> tuple:
        """``(P, Q^2, ..., Q^n)`` without the eps factor on the slow side."""
        return (self.P,) + self.Q

    def decompositions(self, weights) -> list:
        """Quasi-homogeneous splitting of every equation (component weight ``w_i``)."""
        w = as_weights(weights)
        if len(w) != self.n:
            raise ValueError(f"weight vector has {len(w)} entries for {self.n} variables")
        return [decompose(p, w, w[i]) for i, p in enumerate(self.equations())]

    def deltas(self, weights) -> list:
        """``[delta_1, delta_2, ..., delta_n]``; ``None`` for a vanishing equation."""
        return [d.delta for d in self.decompositions(weights)]

    def delta(self, weights) -> int:
        ds = [d for d in self.deltas(weights) if d is not None]
        if not ds:
            raise ValueError("the vector field vanishes identically")
        return max(ds)

    def top_fast_component(self, weights) -> Polynomial:
        """``P_delta`` where ``delta`` is the degree of the whole field (zero if lower)."""
        dec: Decomposition = self.decompositions(weights)[0]
        return dec.get(self.delta(weights), self.names)

    def permute_slow(self, order) -> "SlowFastSystem":
        """Reorder slow variables; ``order`` lists old slow indices (1-based positions)."""
        full = (0,) + tuple(order)
        names = tuple(self.names[i] for i in full)
        P = self.P.permute(full, names)
        Q = tuple(self.Q[i - 1].permute(full, names) for i in order)
        return SlowFastSystem(names, P, Q)

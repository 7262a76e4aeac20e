"""Univariate Laurent polynomials over exact rationals.

The oracle substitutes curves into polynomial functions of matrix entries, so
the entries of translated curve points live in Q[t, t^-1].  The t-adic order
of a nonzero element is the smallest exponent with nonzero coefficient.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


class NegativeExponentError(ValueError):
    """A limit at t=0 was requested but negative powers of t remain."""


class LaurentPoly:
    """Immutable Laurent polynomial in one variable t with Fraction coefficients."""

    __slots__ = ("_coeffs",)

    def __init__(self, coeffs=None):
        clean = {}
        if coeffs:
            for e, c in coeffs.items():
                c = Fraction(c)
                if c != 0:
                    clean[int(e)] = c
        object.__setattr__(self, "_coeffs", clean)

    @classmethod
    def constant(cls, c) -> "LaurentPoly":
        return cls({0: Fraction(c)})

    @classmethod
    def t_power(cls, k: int) -> "LaurentPoly":
        return cls({k: Fraction(1)})

    @classmethod
    def _coerce(cls, other):
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, Rational):
            return cls.constant(other)
        return NotImplemented

    def items(self):
        return self._coeffs.items()

    @property
    def is_zero(self) -> bool:
        return not self._coeffs

    def order(self) -> int | None:
        """Smallest exponent with nonzero coefficient; None for the zero polynomial."""
        if not self._coeffs:
            return None
        return min(self._coeffs)

    @property
    def has_negative_exponents(self) -> bool:
        return any(e < 0 for e in self._coeffs)

    def value_at_zero(self) -> Fraction:
        if self.has_negative_exponents:
            raise NegativeExponentError("no limit at t=0: negative powers of t present")
        return self._coeffs.get(0, Fraction(0))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            out[e] = out.get(e, Fraction(0)) + c
        return LaurentPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict[int, Fraction] = {}
        for e1, c1 in self._coeffs.items():
            for e2, c2 in other._coeffs.items():
                e = e1 + e2
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return LaurentPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Rational):
            return LaurentPoly({e: c / Fraction(other) for e, c in self._coeffs.items()})
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers only via explicit t_power")
        out = LaurentPoly.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._coeffs == other._coeffs

    def __hash__(self):
        return hash(frozenset(self._coeffs.items()))

    def __repr__(self):
        if not self._coeffs:
            return "LaurentPoly(0)"
        terms = " + ".join(f"{c}*t^{e}" for e, c in sorted(self._coeffs.items()))
        return f"LaurentPoly({terms})"


T = LaurentPoly.t_power(1)

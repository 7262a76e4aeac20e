"""Character and cocharacter lattices, simple roots, and coroot pairings.

Characters are integer vectors against a labelled lattice basis; covectors
act on them by exact rational dot product.  Family constructors store the
fully composed pairing functionals, so no sign juggling happens at
computation time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable


class LatticeMismatchError(ValueError):
    """Two operands live on different lattices."""


@dataclass(frozen=True)
class TorusLattice:
    """A free abelian group of finite rank with labelled basis elements."""

    rank: int
    labels: tuple[str, ...]

    def __post_init__(self):
        if len(self.labels) != self.rank:
            raise ValueError("label count does not match rank")
        if len(set(self.labels)) != self.rank:
            raise ValueError("basis labels must be distinct")

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise KeyError(f"unknown basis label {label!r}") from None

    def character(self, coords: Iterable[int]) -> "Character":
        return Character(self, tuple(int(c) for c in coords))

    def basis_character(self, label: str) -> "Character":
        i = self.index(label)
        return Character(self, tuple(1 if k == i else 0 for k in range(self.rank)))

    def zero_character(self) -> "Character":
        return Character(self, (0,) * self.rank)

    def covector(self, coords: Iterable) -> "Covector":
        return Covector(self, tuple(Fraction(c) for c in coords))


@dataclass(frozen=True)
class Character:
    """Element of a TorusLattice, written in its basis."""

    lattice: TorusLattice
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise ValueError("coordinate length does not match lattice rank")

    def _check(self, other: "Character"):
        if self.lattice != other.lattice:
            raise LatticeMismatchError("characters on different lattices")

    def __add__(self, other: "Character") -> "Character":
        self._check(other)
        return Character(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Character") -> "Character":
        self._check(other)
        return Character(self.lattice, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Character":
        return Character(self.lattice, tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> "Character":
        return Character(self.lattice, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)


@dataclass(frozen=True)
class Covector:
    """Rational linear functional on a TorusLattice (acts by dot product)."""

    lattice: TorusLattice
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.coords) != self.lattice.rank:
            raise ValueError("coordinate length does not match lattice rank")
        object.__setattr__(self, "coords", tuple(Fraction(c) for c in self.coords))

    def __add__(self, other: "Covector") -> "Covector":
        if self.lattice != other.lattice:
            raise LatticeMismatchError("covectors on different lattices")
        return Covector(self.lattice, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Covector":
        return Covector(self.lattice, tuple(-a for a in self.coords))

    @property
    def is_integral(self) -> bool:
        return all(c.denominator == 1 for c in self.coords)


def pair(chi: Character, f: Covector) -> Fraction:
    """Exact pairing <chi, f>; integral whenever f is integral on the lattice."""
    if chi.lattice != f.lattice:
        raise LatticeMismatchError("character and covector on different lattices")
    return sum((Fraction(c) * x for c, x in zip(chi.coords, f.coords)), Fraction(0))


@dataclass(frozen=True)
class SimpleRootSet:
    """Simple roots with index-aligned coroot functionals, <alpha_i, alpha_i^v> = 2."""

    roots: tuple[tuple[str, Character], ...]
    coroots: tuple[tuple[str, Covector], ...]

    def __post_init__(self):
        if len(self.roots) != len(self.coroots):
            raise ValueError("roots and coroots must be index-aligned")
        for (_, alpha), (_, alpha_v) in zip(self.roots, self.coroots):
            if pair(alpha, alpha_v) != 2:
                raise ValueError("coroot normalization <alpha, alpha^v> = 2 violated")

    def __len__(self):
        return len(self.roots)


def is_antidominant(v: Covector, roots: SimpleRootSet) -> bool:
    """True iff <alpha, v> <= 0 for every simple root alpha."""
    return all(pair(alpha, v) <= 0 for _, alpha in roots.roots)

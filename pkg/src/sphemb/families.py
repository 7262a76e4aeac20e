"""Model and matrix-realization constructors for the example families.

Four families are provided:

* ``monoid``: the dilation monoid of matrix pairs (A, B) with
  A^T B = A B^T = d(A,B) I, embedded blockwise; its divisor model and a
  matrix realization with boundary curves and semi-invariants.
* ``circular``: pairs (A, B) with AB = 0, BA = 0 and rank bounds.
* ``determinantal``: single matrices of bounded rank; the divisor model's
  boundary list is provisional until confirmed by the oracle.
* ``complexes``: pairs (A, B) with AB = 0 and rank bounds; matrix
  realization only.

Divisor functionals are transcribed tables; every constructor re-derives
them from the ambient weight map and coroots and asserts agreement, so a
transcription slip cannot survive construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .divisor_model import (
    BOUNDARY,
    COLOR,
    BoundarySpec,
    ColorSpec,
    DivisorLabel,
    SphericalDivisorModel,
    WonderfulModel,
    with_boundaries,
)
from .lattice import IntegerMatrix, determinant, mat_mul, rational_inverse, rational_rank
from .laurent import LaurentPoly
from .rootdata import Character, Covector, SimpleRootSet, TorusLattice, pair


class FamilyParameterError(ValueError):
    """Family parameters outside the admissible range."""


Matrix = tuple[tuple, ...]
Point = tuple[Matrix, ...]
GroupElement = tuple[Matrix, ...]


def _freeze(rows) -> Matrix:
    return tuple(tuple(e for e in r) for r in rows)


def _frac(rows) -> Matrix:
    return tuple(tuple(Fraction(e) for e in r) for r in rows)


def _identity(n: int) -> Matrix:
    return _frac([[1 if i == j else 0 for j in range(n)] for i in range(n)])


def _zeros(r: int, c: int) -> Matrix:
    return _frac([[0] * c for _ in range(r)])


def _transpose(m: Matrix) -> Matrix:
    return tuple(tuple(m[i][j] for i in range(len(m))) for j in range(len(m[0]) if m else 0))


def _det_generic(rows):
    n = len(rows)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return rows[0][0]
    total = 0
    for j in range(n):
        if rows[0][j] == 0:
            continue
        minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
        term = rows[0][j] * _det_generic(minor)
        total = total + (term if j % 2 == 0 else -term)
    return total


def leading_minor(m: Matrix, k: int):
    return _det_generic([list(m[i][:k]) for i in range(k)])


def trailing_minor(m: Matrix, k: int):
    n = len(m)
    return _det_generic([list(m[i][n - k :]) for i in range(n - k, n)])


# Group samplers draw from a wide integer range: translated-curve orders are
# read off coefficient polynomials in the sampled entries, and a wide range
# keeps accidental zeros of those polynomials rare.  Structured samplers
# (Borel, stabilizer shapes) need no genericity and stay small.
_GENERIC_RANGE = 999


def _rand_int_matrix(rng: random.Random, rows: int, cols: int, lo: int = -4, hi: int = 4):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def _rand_invertible(rng: random.Random, n: int, lo: int = -4, hi: int = 4) -> Matrix:
    while True:
        m = _rand_int_matrix(rng, n, n, lo, hi)
        if determinant(IntegerMatrix.from_rows(m, cols=n)) != 0:
            return _frac(m)


def _rand_generic(rng: random.Random, n: int) -> Matrix:
    return _rand_invertible(rng, n, -_GENERIC_RANGE, _GENERIC_RANGE)


def _rand_triangular(rng: random.Random, n: int, lower: bool) -> Matrix:
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = rng.choice([-3, -2, -1, 1, 2, 3])
        for j in range(n):
            if (j < i) if lower else (j > i):
                m[i][j] = rng.randint(-3, 3)
    return _frac(m)


def _rank(m: Matrix) -> int:
    return rational_rank([list(r) for r in m])


@dataclass(eq=False)
class SemiInvariantSpec:
    """A polynomial function of the matrix entries with a claimed weight."""

    name: str
    evaluate: Callable[[Point], object]
    claimed_weight: Character


@dataclass(eq=False)
class BoundaryCandidate:
    """An orbit closure that may or may not be a boundary divisor."""

    label: str
    curve_label: str
    idempotent: Point


@dataclass(eq=False)
class MatrixRealization:
    """Concrete matrix avatar of a family member, for oracle-level checks."""

    family: str
    params: dict
    ambient_shape: tuple[tuple[int, int], ...]
    base_point: Point
    membership: Callable[[Point], bool]
    act: Callable[[GroupElement, Point], Point]
    group_sampler: Callable[[random.Random], GroupElement]
    borel_sampler: Callable[[random.Random], GroupElement]
    weight_value: Callable[[Character, GroupElement], Fraction]
    lie_algebra_rows: Callable[[Point], list[list[Fraction]]]
    semi_invariants: tuple[SemiInvariantSpec, ...] = ()
    cocharacter_curves: tuple[tuple[str, Point], ...] = ()
    boundary_curves: tuple[tuple[str, str], ...] = ()
    expected_limit_ranks: tuple[tuple[str, tuple[int, ...]], ...] = ()
    expected_orbit_dimension: int | None = None
    stabilizer_sampler: Callable[[random.Random], GroupElement] | None = None
    boundary_candidates: tuple[BoundaryCandidate, ...] = ()

    def __post_init__(self):
        if not self.membership(self.base_point):
            raise ValueError("base point fails the membership predicate")
        for label, pt in self.cocharacter_curves:
            at_one = _substitute_curve(pt, Fraction(1))
            if at_one != self.base_point:
                raise ValueError(f"curve {label} does not pass through the base point at t=1")

    def curve(self, label: str) -> Point:
        for lab, pt in self.cocharacter_curves:
            if lab == label:
                return pt
        raise KeyError(f"unknown curve {label!r}")


def _substitute_curve(point: Point, value: Fraction) -> Point:
    out = []
    for m in point:
        rows = []
        for r in m:
            row = []
            for e in r:
                if isinstance(e, LaurentPoly):
                    row.append(sum((c * value**k for k, c in e.items()), Fraction(0)))
                else:
                    row.append(Fraction(e))
            rows.append(tuple(row))
        out.append(tuple(rows))
    return tuple(out)


def _apply_pair(g_left: Matrix, x: Matrix, g_right_inv: Matrix) -> Matrix:
    return _freeze(mat_mul(mat_mul([list(r) for r in g_left], [list(r) for r in x]), g_right_inv))


def _inv(m: Matrix):
    return rational_inverse([list(r) for r in m])


# ---------------------------------------------------------------------------
# The dilation monoid.


def monoid_model(m: int) -> tuple[SphericalDivisorModel, MatrixRealization]:
    """Divisor model and matrix realization of the rank-m dilation monoid."""
    if m < 1:
        raise FamilyParameterError("monoid requires m >= 1")

    labels = tuple(f"eps_{k}" for k in range(1, m + 2))
    lattice = TorusLattice(rank=m + 1, labels=labels)
    basis = tuple(lattice.basis_character(lab) for lab in labels)

    def coroot_coords(i: int) -> list[int]:
        c = [0] * (m + 1)
        c[i - 1] = 1
        c[i] = -1
        if i == 1:
            c[m] = -1
        return c

    roots = []
    coroots = []
    colors = []
    for i in range(1, m):
        root = [0] * (m + 1)
        root[i - 1] = 1
        root[i] = -1
        alpha = lattice.character(root)
        alpha_v = lattice.covector(coroot_coords(i))
        roots.append((f"alpha_{i}", alpha))
        coroots.append((f"alpha_{i}", alpha_v))
        colors.append(ColorSpec(DivisorLabel(COLOR, f"D_{i}"), alpha_v, canonical_coefficient=-2))

    boundaries = []
    for r in range(m + 1):
        coords = [0 if k <= r else 1 for k in range(1, m + 1)]
        coords.append(1 if r >= 1 else 0)
        boundaries.append(BoundarySpec(DivisorLabel(BOUNDARY, f"X_{r}"), lattice.covector(coords)))

    char_aliases = tuple(
        (f"eps_{m + k}", basis[0] + basis[m] - basis[k - 1]) for k in range(2, m + 1)
    )

    model = SphericalDivisorModel(
        weight_lattice=lattice,
        simple_roots=SimpleRootSet(tuple(roots), tuple(coroots)),
        colors=tuple(colors),
        boundaries=tuple(boundaries),
        basis_characters=basis,
        character_aliases=char_aliases,
    )
    _crosscheck_monoid(model, m)
    return model, _monoid_realization(m, model)


def _crosscheck_monoid(model: SphericalDivisorModel, m: int):
    # Re-derive the functional tables from the ambient 2m-torus: a character
    # sum(c_k eps_k) has ambient coordinate vector (c_1..c_m, c_{m+1}, 0...).
    def ambient(chi: Character) -> list[int]:
        v = [0] * (2 * m)
        for k in range(m):
            v[k] = chi.coords[k]
        v[m] = chi.coords[m]
        return v

    for i, spec in enumerate(model.colors, start=1):
        cor = [0] * (2 * m)
        cor[i - 1] += 1
        cor[i] -= 1
        cor[m + i - 1] -= 1
        cor[m + i] += 1
        for b in model.basis_characters:
            amb = ambient(b)
            derived = sum(a * c for a, c in zip(amb, cor))
            assert pair(b, spec.functional) == derived, "colour table disagrees with ambient coroot"
    for r, spec in enumerate(model.boundaries):
        expo = [0] * r + [1] * (m - r) + [1] * r + [0] * (m - r)
        for b in model.basis_characters:
            amb = ambient(b)
            derived = sum(a * e for a, e in zip(amb, expo))
            assert pair(b, spec.valuation) == derived, "boundary table disagrees with curve exponents"


def _monoid_membership(point: Point) -> bool:
    a, b = point
    m = len(a)
    at_b = mat_mul([list(r) for r in _transpose(a)], [list(r) for r in b])
    a_bt = mat_mul([list(r) for r in a], [list(r) for r in _transpose(b)])
    d = at_b[0][0]
    for i in range(m):
        for j in range(m):
            want = d if i == j else 0
            if at_b[i][j] != want or a_bt[i][j] != want:
                return False
    return True


def _sample_monoid_element(rng: random.Random, m: int, triangular: str | None = None) -> tuple[Matrix, Matrix]:
    if triangular == "lower":
        a = _rand_triangular(rng, m, lower=True)
    elif triangular == "upper":
        a = _rand_triangular(rng, m, lower=False)
    else:
        a = _rand_generic(rng, m)
    d = Fraction(rng.choice([-3, -2, -1, 1, 2, 3]))
    a_inv_t = _transpose(_freeze(_inv(a)))
    b = tuple(tuple(d * e for e in row) for row in a_inv_t)
    return a, b


def _monoid_realization(m: int, model: SphericalDivisorModel) -> MatrixRealization:
    base = (_identity(m), _identity(m))

    def act(g: GroupElement, x: Point) -> Point:
        a1, b1, a2, b2 = g
        return (
            _apply_pair(a1, x[0], _inv(a2)),
            _apply_pair(b1, x[1], _inv(b2)),
        )

    def group_sampler(rng: random.Random) -> GroupElement:
        g1 = _sample_monoid_element(rng, m)
        g2 = _sample_monoid_element(rng, m)
        return (*g1, *g2)

    def borel_sampler(rng: random.Random) -> GroupElement:
        g1 = _sample_monoid_element(rng, m, triangular="lower")
        g2 = _sample_monoid_element(rng, m, triangular="upper")
        return (*g1, *g2)

    def char_value(chi: Character, a: Matrix, b: Matrix) -> Fraction:
        v = Fraction(1)
        for k in range(m):
            v *= Fraction(a[k][k]) ** chi.coords[k]
        v *= Fraction(b[0][0]) ** chi.coords[m]
        return v

    def weight_value(chi: Character, g: GroupElement) -> Fraction:
        a1, b1, a2, b2 = g
        return char_value(chi, a1, b1) / char_value(chi, a2, b2)

    def dilation(point: Point):
        a, b = point
        total = 0
        for i in range(m):
            for j in range(m):
                total = total + a[i][j] * b[i][j]
        return total / m

    lattice = model.weight_lattice
    semi = [
        SemiInvariantSpec("d", dilation, lattice.basis_character("eps_1") + lattice.basis_character(f"eps_{m + 1}")),
    ]
    for i in range(1, m + 1):
        chi = lattice.character([1 if k < i else 0 for k in range(m)] + [0])
        semi.append(SemiInvariantSpec(f"Delta_{i}", (lambda pt, i=i: leading_minor(pt[0], i)), chi))
    for i in range(1, m):
        chi = lattice.character([1 if k >= m - i else 0 for k in range(m)] + [0])
        semi.append(SemiInvariantSpec(f"Delta_trail_{i}", (lambda pt, i=i: trailing_minor(pt[0], i)), chi))

    t = LaurentPoly.t_power(1)
    curves = []
    ranks = []
    for r in range(m + 1):
        a = [[(1 if k <= r else t) if k == l else 0 for l in range(1, m + 1)] for k in range(1, m + 1)]
        b = [[(t if k <= r else 1) if k == l else 0 for l in range(1, m + 1)] for k in range(1, m + 1)]
        curves.append((f"lambda_{r}", (_freeze(a), _freeze(b))))
        ranks.append((f"lambda_{r}", (r, m - r)))

    def lie_rows(point: Point) -> list[list[Fraction]]:
        x, y = point
        rows = []

        def tangent(a: Matrix, c: Matrix, side: str) -> list[Fraction]:
            if side == "left":
                ta = mat_mul([list(r) for r in a], [list(r) for r in x])
                tb = mat_mul([list(r) for r in c], [list(r) for r in y])
            else:
                ta = mat_mul([list(r) for r in x], [list(r) for r in a])
                tb = mat_mul([list(r) for r in y], [list(r) for r in c])
                ta = [[-e for e in row] for row in ta]
                tb = [[-e for e in row] for row in tb]
            return [Fraction(e) for row in ta for e in row] + [Fraction(e) for row in tb for e in row]

        # Lie algebra of the unit group: pairs (a, delta*I - a^T).
        for side in ("left", "right"):
            for i in range(m):
                for j in range(m):
                    a = [[Fraction(ii == i and jj == j) for jj in range(m)] for ii in range(m)]
                    c = [[-Fraction(ii == j and jj == i) for jj in range(m)] for ii in range(m)]
                    rows.append(tangent(_freeze(a), _freeze(c), side))
            rows.append(tangent(_zeros(m, m), _identity(m), side))
        return rows

    def stabilizer_sampler(rng: random.Random) -> GroupElement:
        g = _sample_monoid_element(rng, m)
        return (*g, *g)

    return MatrixRealization(
        family="monoid",
        params={"m": m},
        ambient_shape=((m, m), (m, m)),
        base_point=base,
        membership=_monoid_membership,
        act=act,
        group_sampler=group_sampler,
        borel_sampler=borel_sampler,
        weight_value=weight_value,
        lie_algebra_rows=lie_rows,
        semi_invariants=tuple(semi),
        cocharacter_curves=tuple(curves),
        boundary_curves=tuple((f"X_{r}", f"lambda_{r}") for r in range(m + 1)),
        expected_limit_ranks=tuple(ranks),
        expected_orbit_dimension=m * m + 1,
        stabilizer_sampler=stabilizer_sampler,
    )


# ---------------------------------------------------------------------------
# Circular complexes.


def _standard_er(rows: int, cols: int, r: int) -> Matrix:
    return _frac([[1 if i == j and i < r else 0 for j in range(cols)] for i in range(rows)])


def _standard_fs(rows: int, cols: int, s: int) -> Matrix:
    return _frac(
        [[1 if (i >= rows - s and j >= cols - s and i - (rows - s) == j - (cols - s)) else 0 for j in range(cols)] for i in range(rows)]
    )


def circular_complexes_model(m: int, n: int, r: int, s: int) -> tuple[SphericalDivisorModel, MatrixRealization]:
    """Divisor model and realization for pairs (A, B) with AB = BA = 0 and rank bounds."""
    if m > n:
        return circular_complexes_model(n, m, s, r)
    if r < 0 or s < 0:
        raise FamilyParameterError("rank bounds must be nonnegative")
    if r + s > m:
        raise FamilyParameterError("need r + s <= min(m, n)")
    if (r, s) in {(0, 0), (m, 0), (0, m)}:
        raise FamilyParameterError(f"(r, s) = {(r, s)} is a degenerate case with no model")

    labels = tuple(f"eps_{i}" for i in range(1, r + 1)) + tuple(f"delta_{j}" for j in range(1, s + 1))
    lattice = TorusLattice(rank=r + s, labels=labels)
    basis = tuple(lattice.basis_character(lab) for lab in labels)

    def eps_vec(mapping) -> list:
        v = [0] * (r + s)
        for idx, c in mapping.items():
            v[idx] = c
        return v

    roots = []
    coroots = []
    colors = []
    for i in range(1, r):
        alpha = lattice.character(eps_vec({i - 1: 1, i: -1}))
        alpha_v = lattice.covector(eps_vec({i - 1: 1, i: -1}))
        roots.append((f"alpha_{i}", alpha))
        coroots.append((f"alpha_{i}", alpha_v))
        colors.append(ColorSpec(DivisorLabel(COLOR, f"D_{i}"), alpha_v, canonical_coefficient=-2))
    for j in range(1, s):
        beta = lattice.character(eps_vec({r + j - 1: -1, r + j: 1}))
        beta_v = lattice.covector(eps_vec({r + j - 1: -1, r + j: 1}))
        roots.append((f"beta_{j}", beta))
        coroots.append((f"beta_{j}", beta_v))
        colors.append(ColorSpec(DivisorLabel(COLOR, f"E_{j}"), beta_v, canonical_coefficient=-2))

    # Exterior colours, with the omission and merging rules.
    coeff_1 = -(m - (r + s) + 1)
    coeff_2 = -(n - (r + s) + 1)
    phi_r = eps_vec({r - 1: 1}) if r > 0 else None
    phi_s = eps_vec({r: 1}) if s > 0 else None
    aliases = []
    merged_1 = r > 0 and s > 0 and r + s == m
    merged_2 = r > 0 and s > 0 and r + s == n
    exterior: list[tuple[str, list, int]] = []
    if r > 0:
        f1 = list(phi_r)
        c1 = coeff_1
        if merged_1:
            f1 = [a + b for a, b in zip(f1, phi_s)]
            c1 += coeff_1
            aliases.append(("D_s1", "D_r1"))
        exterior.append(("D_r1", f1, c1))
        f2 = list(phi_r)
        c2 = coeff_2
        if merged_2:
            f2 = [a + b for a, b in zip(f2, phi_s)]
            c2 += coeff_2
            aliases.append(("D_s2", "D_r2"))
        exterior.append(("D_r2", f2, c2))
    if s > 0 and not merged_1:
        exterior.append(("D_s1", list(phi_s), coeff_1))
    if s > 0 and not merged_2:
        exterior.append(("D_s2", list(phi_s), coeff_2))
    # Keep the documented colour order D_r1, D_r2, D_s1, D_s2.
    order = {"D_r1": 0, "D_r2": 1, "D_s1": 2, "D_s2": 3}
    exterior.sort(key=lambda item: order[item[0]])
    for lab, fun, coeff in exterior:
        colors.append(ColorSpec(DivisorLabel(COLOR, lab), lattice.covector(fun), canonical_coefficient=coeff))

    boundaries = []
    if m == n and r + s == m:
        boundaries.append(
            BoundarySpec(DivisorLabel(BOUNDARY, f"X_{{{r - 1},{m - r}}}"), lattice.covector(eps_vec({r - 1: 1})))
        )
        boundaries.append(
            BoundarySpec(DivisorLabel(BOUNDARY, f"X_{{{r},{m - r - 1}}}"), lattice.covector(eps_vec({r: 1})))
        )

    model = SphericalDivisorModel(
        weight_lattice=lattice,
        simple_roots=SimpleRootSet(tuple(roots), tuple(coroots)),
        colors=tuple(colors),
        boundaries=tuple(boundaries),
        basis_characters=basis,
        label_aliases=tuple(aliases),
    )
    _crosscheck_circular(model, m, n, r, s)
    return model, _circular_realization(m, n, r, s, model)


def _circular_weight_map(m: int, n: int, r: int, s: int):
    # Ambient coordinates: the m left-torus coordinates then the n right ones.
    def ambient(chi: Character) -> list[int]:
        v = [0] * (m + n)
        for i in range(r):
            v[i] -= chi.coords[i]
            v[m + i] += chi.coords[i]
        for j in range(s):
            v[m - s + j] += chi.coords[r + j]
            v[m + n - s + j] -= chi.coords[r + j]
        return v

    return ambient


def _crosscheck_circular(model: SphericalDivisorModel, m: int, n: int, r: int, s: int):
    ambient = _circular_weight_map(m, n, r, s)

    def cor_left(i: int) -> dict[int, int]:
        # coroot of -eps_{i,1} + eps_{i+1,1}  (1-based i)
        return {i - 1: -1, i: 1}

    def cor_right(i: int) -> dict[int, int]:
        # coroot of eps_{i,2} - eps_{i+1,2}
        return {m + i - 1: 1, m + i: -1}

    def pairing(chi: Character, cor: dict[int, int]) -> int:
        amb = ambient(chi)
        return sum(amb[k] * c for k, c in cor.items())

    table = {}
    for i in range(1, r):
        table[f"D_{i}"] = [cor_left(i), cor_right(i)]
    for j in range(1, s):
        table[f"E_{j}"] = [cor_left(m - s + j), cor_right(n - s + j)]
    if r > 0:
        table["D_r1"] = [cor_left(r)]
        table["D_r2"] = [cor_right(r)]
    if s > 0 and not (r > 0 and r + s == m):
        table["D_s1"] = [cor_left(m - s)]
    if s > 0 and not (r > 0 and r + s == n):
        table["D_s2"] = [cor_right(n - s)]

    for spec in model.colors:
        for cor in table[spec.label.id]:
            for b in model.basis_characters:
                assert pair(b, spec.functional) == pairing(b, cor), (
                    f"colour table for {spec.label.id} disagrees with ambient coroot pairing"
                )

    # Boundary valuations against the negated limit-cocharacter exponents.
    if model.boundaries:
        lam = {r - 1: 1}  # left factor, position r scaled by t
        mu = {m + r: 1}  # right factor, position r+1 scaled by t
        for spec, expo in zip(model.boundaries, (lam, mu)):
            for b in model.basis_characters:
                derived = -sum(ambient(b)[k] * e for k, e in expo.items())
                assert pair(b, spec.valuation) == derived, (
                    f"boundary valuation {spec.label.id} disagrees with its limit cocharacter"
                )


def _sandwich_act_factory(left: int, right: int):
    def act(g: GroupElement, x: Point) -> Point:
        g1, g2 = g
        g1i, g2i = _inv(g1), _inv(g2)
        return (_apply_pair(g1, x[0], g2i), _apply_pair(g2, x[1], g1i))

    return act


def _circular_realization(m: int, n: int, r: int, s: int, model: SphericalDivisorModel) -> MatrixRealization:
    er = _standard_er(m, n, r)
    fs = _standard_fs(n, m, s)
    base = (er, fs)

    def membership(point: Point) -> bool:
        a, b = point
        if _rank(a) > r or _rank(b) > s:
            return False
        ab = mat_mul([list(x) for x in a], [list(x) for x in b])
        ba = mat_mul([list(x) for x in b], [list(x) for x in a])
        return all(e == 0 for row in ab for e in row) and all(e == 0 for row in ba for e in row)

    act = _sandwich_act_factory(m, n)

    def group_sampler(rng: random.Random) -> GroupElement:
        return (_rand_generic(rng, m), _rand_generic(rng, n))

    def borel_sampler(rng: random.Random) -> GroupElement:
        return (_rand_triangular(rng, m, lower=True), _rand_triangular(rng, n, lower=False))

    def weight_value(chi: Character, g: GroupElement) -> Fraction:
        g1, g2 = g
        v = Fraction(1)
        for i in range(r):
            v *= (Fraction(g1[i][i]) / Fraction(g2[i][i])) ** chi.coords[i]
        for j in range(s):
            v *= (Fraction(g2[n - s + j][n - s + j]) / Fraction(g1[m - s + j][m - s + j])) ** chi.coords[r + j]
        return v

    t = LaurentPoly.t_power(1)
    curves = []
    ranks = []
    if r >= 1:
        a = [list(row) for row in er]
        a[r - 1][r - 1] = t
        curves.append((f"lambda_{r}", (_freeze(a), fs)))
        ranks.append((f"lambda_{r}", (r - 1, s)))
    if s >= 1:
        b = [list(row) for row in fs]
        if r + s == n:
            b[r][m - s] = t
            ranks.append((f"mu_{r}", (r, s - 1)))
        else:
            ranks.append((f"mu_{r}", (r, s)))
        curves.append((f"mu_{r}", (er, _freeze(b))))

    boundary_curves = ()
    if model.boundaries:
        boundary_curves = (
            (model.boundaries[0].label.id, f"lambda_{r}"),
            (model.boundaries[1].label.id, f"mu_{r}"),
        )

    def lie_rows(point: Point) -> list[list[Fraction]]:
        a, b = point
        rows = []
        for i in range(m):
            for j in range(m):
                e = [[Fraction(ii == i and jj == j) for jj in range(m)] for ii in range(m)]
                ta = mat_mul(e, [list(x) for x in a])
                tb = mat_mul([list(x) for x in b], e)
                rows.append([Fraction(x) for row in ta for x in row] + [-Fraction(x) for row in tb for x in row])
        for i in range(n):
            for j in range(n):
                e = [[Fraction(ii == i and jj == j) for jj in range(n)] for ii in range(n)]
                ta = mat_mul([list(x) for x in a], e)
                tb = mat_mul(e, [list(x) for x in b])
                rows.append([-Fraction(x) for row in ta for x in row] + [Fraction(x) for row in tb for x in row])
        return rows

    def stabilizer_sampler(rng: random.Random) -> GroupElement:
        return sample_circular_stabilizer(rng, m, n, r, s)

    return MatrixRealization(
        family="circular",
        params={"m": m, "n": n, "r": r, "s": s},
        ambient_shape=((m, n), (n, m)),
        base_point=base,
        membership=membership,
        act=act,
        group_sampler=group_sampler,
        borel_sampler=borel_sampler,
        weight_value=weight_value,
        lie_algebra_rows=lie_rows,
        cocharacter_curves=tuple(curves),
        boundary_curves=boundary_curves,
        expected_limit_ranks=tuple(ranks),
        expected_orbit_dimension=(r + s) * (m + n - (r + s)),
        stabilizer_sampler=stabilizer_sampler,
    )


def _block_matrix(blocks: Sequence[Sequence[Matrix | None]], row_sizes: Sequence[int], col_sizes: Sequence[int]) -> Matrix:
    rows = []
    for bi, rsize in enumerate(row_sizes):
        for i in range(rsize):
            row = []
            for bj, csize in enumerate(col_sizes):
                blk = blocks[bi][bj]
                if blk is None:
                    row.extend([Fraction(0)] * csize)
                else:
                    row.extend(blk[i])
            rows.append(tuple(row))
    return tuple(rows)


def _rand_block(rng: random.Random, rows: int, cols: int) -> Matrix:
    return _frac(_rand_int_matrix(rng, rows, cols, -2, 2))


def sample_circular_stabilizer(rng: random.Random, m: int, n: int, r: int, s: int) -> GroupElement:
    """A random element of the block-shaped stabilizer of the base idempotent."""
    shared_11 = _rand_invertible(rng, r) if r else _zeros(0, 0)
    shared_33 = _rand_invertible(rng, s) if s else _zeros(0, 0)
    a22 = _rand_invertible(rng, m - r - s) if m - r - s else _zeros(0, 0)
    b22 = _rand_invertible(rng, n - r - s) if n - r - s else _zeros(0, 0)
    a = _block_matrix(
        [
            [shared_11, _rand_block(rng, r, m - r - s), _rand_block(rng, r, s)],
            [None, a22, _rand_block(rng, m - r - s, s)],
            [None, None, shared_33],
        ],
        (r, m - r - s, s),
        (r, m - r - s, s),
    )
    b = _block_matrix(
        [
            [shared_11, None, None],
            [_rand_block(rng, n - r - s, r), b22, None],
            [_rand_block(rng, s, r), _rand_block(rng, s, n - r - s), shared_33],
        ],
        (r, n - r - s, s),
        (r, n - r - s, s),
    )
    return (a, b)


# ---------------------------------------------------------------------------
# Determinantal varieties.


def determinantal_realization(m: int, n: int, r: int) -> tuple[MatrixRealization, SphericalDivisorModel]:
    """Matrix realization plus a provisional divisor model for rank <= r matrices.

    The boundary-divisor data is not transcribed from anywhere: the returned
    model is provisional and must be finalized through the oracle before
    class-group queries are allowed (``finalize_determinantal_model``).
    """
    if not 0 < r < min(m, n):
        raise FamilyParameterError("determinantal requires 0 < r < min(m, n)")

    labels = tuple(f"eps_{i}" for i in range(1, r + 1))
    lattice = TorusLattice(rank=r, labels=labels)
    basis = tuple(lattice.basis_character(lab) for lab in labels)

    roots = []
    coroots = []
    colors = []
    for i in range(1, r):
        vec = [0] * r
        vec[i - 1] = 1
        vec[i] = -1
        roots.append((f"alpha_{i}", lattice.character(vec)))
        coroots.append((f"alpha_{i}", lattice.covector(vec)))
        colors.append(ColorSpec(DivisorLabel(COLOR, f"D_{i}"), lattice.covector(vec), canonical_coefficient=-2))
    phi = [0] * r
    phi[r - 1] = 1
    colors.append(ColorSpec(DivisorLabel(COLOR, "D_r1"), lattice.covector(phi), canonical_coefficient=-(m - r + 1)))
    colors.append(ColorSpec(DivisorLabel(COLOR, "D_r2"), lattice.covector(phi), canonical_coefficient=-(n - r + 1)))

    model = SphericalDivisorModel(
        weight_lattice=lattice,
        simple_roots=SimpleRootSet(tuple(roots), tuple(coroots)),
        colors=tuple(colors),
        boundaries=(),
        basis_characters=basis,
        provisional=True,
    )

    er = _standard_er(m, n, r)

    def membership(point: Point) -> bool:
        return _rank(point[0]) <= r

    def act(g: GroupElement, x: Point) -> Point:
        g1, g2 = g
        return (_apply_pair(g1, x[0], _inv(g2)),)

    def group_sampler(rng: random.Random) -> GroupElement:
        return (_rand_generic(rng, m), _rand_generic(rng, n))

    def borel_sampler(rng: random.Random) -> GroupElement:
        return (_rand_triangular(rng, m, lower=True), _rand_triangular(rng, n, lower=False))

    def weight_value(chi: Character, g: GroupElement) -> Fraction:
        g1, g2 = g
        v = Fraction(1)
        for i in range(r):
            v *= (Fraction(g1[i][i]) / Fraction(g2[i][i])) ** chi.coords[i]
        return v

    semi = []
    for i in range(1, r + 1):
        chi = lattice.character([1 if k < i else 0 for k in range(r)])
        semi.append(
            SemiInvariantSpec(
                f"Delta_{i}",
                (lambda pt, i=i: _det_generic([list(pt[0][a][:i]) for a in range(i)])),
                chi,
            )
        )

    t = LaurentPoly.t_power(1)
    a = [list(row) for row in er]
    a[r - 1][r - 1] = t
    curves = ((f"lambda_{r}", (_freeze(a),)),)

    def lie_rows(point: Point) -> list[list[Fraction]]:
        x = point[0]
        rows = []
        for i in range(m):
            for j in range(m):
                e = [[Fraction(ii == i and jj == j) for jj in range(m)] for ii in range(m)]
                rows.append([Fraction(v) for row in mat_mul(e, [list(q) for q in x]) for v in row])
        for i in range(n):
            for j in range(n):
                e = [[Fraction(ii == i and jj == j) for jj in range(n)] for ii in range(n)]
                rows.append([-Fraction(v) for row in mat_mul([list(q) for q in x], e) for v in row])
        return rows

    def stabilizer_sampler(rng: random.Random) -> GroupElement:
        shared = _rand_invertible(rng, r)
        a22 = _rand_invertible(rng, m - r)
        b22 = _rand_invertible(rng, n - r)
        a_full = _block_matrix(
            [[shared, _rand_block(rng, r, m - r)], [None, a22]], (r, m - r), (r, m - r)
        )
        b_full = _block_matrix(
            [[shared, None], [_rand_block(rng, n - r, r), b22]], (r, n - r), (r, n - r)
        )
        return (a_full, b_full)

    realization = MatrixRealization(
        family="determinantal",
        params={"m": m, "n": n, "r": r},
        ambient_shape=((m, n),),
        base_point=(er,),
        membership=membership,
        act=act,
        group_sampler=group_sampler,
        borel_sampler=borel_sampler,
        weight_value=weight_value,
        lie_algebra_rows=lie_rows,
        semi_invariants=tuple(semi),
        cocharacter_curves=curves,
        expected_limit_ranks=((f"lambda_{r}", (r - 1,)),),
        expected_orbit_dimension=r * (m + n - r),
        stabilizer_sampler=stabilizer_sampler,
        boundary_candidates=(BoundaryCandidate(f"X_{r - 1}", f"lambda_{r}", (_standard_er(m, n, r - 1),)),),
    )
    return realization, model


def finalize_determinantal_model(
    model: SphericalDivisorModel, realization: MatrixRealization, trials: int = 8, seed: int = 0
) -> SphericalDivisorModel:
    """Confirm the boundary data of a provisional determinantal model.

    Every candidate orbit closure is measured with the Jacobian-rank oracle;
    only codimension-one candidates become boundary divisors, with their
    valuation solved from t-adic orders of the verified semi-invariants.
    """
    from . import oracle

    base_dim = oracle.orbit_dimension(realization)
    confirmed = []
    for cand in realization.boundary_candidates:
        cand_dim = oracle.orbit_dimension(realization, point=cand.idempotent)
        if base_dim - cand_dim != 1:
            continue
        verified = oracle.select_semi_invariants(realization, trials=trials, seed=seed)
        valuation = oracle.infer_boundary_valuation(
            realization, cand.curve_label, verified, model.weight_lattice, trials=trials, seed=seed
        )
        confirmed.append(BoundarySpec(DivisorLabel(BOUNDARY, cand.label), valuation))
    return with_boundaries(model, confirmed, final=True)


# ---------------------------------------------------------------------------
# Varieties of complexes (realization only).


def complexes_realization(l: int, m: int, n: int, r: int, s: int) -> MatrixRealization:
    """Pairs (A, B) in Mat(l,m) x Mat(m,n) with rk A <= r, rk B <= s, AB = 0."""
    if not (0 <= r <= l and 0 <= s <= n and r + s <= m):
        raise FamilyParameterError("complexes requires 0 <= r <= l, 0 <= s <= n, r + s <= m")

    er = _standard_er(l, m, r)
    fs = _standard_fs(m, n, s)

    def membership(point: Point) -> bool:
        a, b = point
        if _rank(a) > r or _rank(b) > s:
            return False
        ab = mat_mul([list(x) for x in a], [list(x) for x in b])
        return all(e == 0 for row in ab for e in row)

    def act(g: GroupElement, x: Point) -> Point:
        g1, g2, g3 = g
        return (_apply_pair(g1, x[0], _inv(g2)), _apply_pair(g2, x[1], _inv(g3)))

    def group_sampler(rng: random.Random) -> GroupElement:
        return (_rand_generic(rng, l), _rand_generic(rng, m), _rand_generic(rng, n))

    def borel_sampler(rng: random.Random) -> GroupElement:
        return (
            _rand_triangular(rng, l, lower=True),
            _rand_triangular(rng, m, lower=False),
            _rand_triangular(rng, n, lower=True),
        )

    def weight_value(chi: Character, g: GroupElement) -> Fraction:
        raise NotImplementedError("the complexes realization carries no semi-invariants")

    def lie_rows(point: Point) -> list[list[Fraction]]:
        a, b = point
        rows = []
        for i in range(l):
            for j in range(l):
                e = [[Fraction(ii == i and jj == j) for jj in range(l)] for ii in range(l)]
                ta = mat_mul(e, [list(x) for x in a])
                rows.append([Fraction(x) for row in ta for x in row] + [Fraction(0)] * (m * n))
        for i in range(m):
            for j in range(m):
                e = [[Fraction(ii == i and jj == j) for jj in range(m)] for ii in range(m)]
                ta = mat_mul([list(x) for x in a], e)
                tb = mat_mul(e, [list(x) for x in b])
                rows.append([-Fraction(x) for row in ta for x in row] + [Fraction(x) for row in tb for x in row])
        for i in range(n):
            for j in range(n):
                e = [[Fraction(ii == i and jj == j) for jj in range(n)] for ii in range(n)]
                tb = mat_mul([list(x) for x in b], e)
                rows.append([Fraction(0)] * (l * m) + [-Fraction(x) for row in tb for x in row])
        return rows

    def stabilizer_sampler(rng: random.Random) -> GroupElement:
        a11 = _rand_invertible(rng, r) if r else _zeros(0, 0)
        c22 = _rand_invertible(rng, s) if s else _zeros(0, 0)
        a_full = _block_matrix(
            [[a11, _rand_block(rng, r, l - r)], [None, _rand_invertible(rng, l - r) if l - r else _zeros(0, 0)]],
            (r, l - r),
            (r, l - r),
        )
        b_full = _block_matrix(
            [
                [a11, None, None],
                [_rand_block(rng, m - r - s, r), _rand_invertible(rng, m - r - s) if m - r - s else _zeros(0, 0), None],
                [_rand_block(rng, s, r), _rand_block(rng, s, m - r - s), c22],
            ],
            (r, m - r - s, s),
            (r, m - r - s, s),
        )
        c_full = _block_matrix(
            [[_rand_invertible(rng, n - s) if n - s else _zeros(0, 0), _rand_block(rng, n - s, s)], [None, c22]],
            (n - s, s),
            (n - s, s),
        )
        return (a_full, b_full, c_full)

    # dim of the block-shaped stabilizer, counting each shared block once.
    dim_h = (
        r * r
        + r * (l - r)
        + (l - r) ** 2
        + (m - r - s) * r
        + (m - r - s) ** 2
        + s * r
        + s * (m - r - s)
        + s * s
        + (n - s) ** 2
        + (n - s) * s
    )
    expected_dim = l * l + m * m + n * n - dim_h

    return MatrixRealization(
        family="complexes",
        params={"l": l, "m": m, "n": n, "r": r, "s": s},
        ambient_shape=((l, m), (m, n)),
        base_point=(er, fs),
        membership=membership,
        act=act,
        group_sampler=group_sampler,
        borel_sampler=borel_sampler,
        weight_value=weight_value,
        lie_algebra_rows=lie_rows,
        expected_orbit_dimension=expected_dim,
        stabilizer_sampler=stabilizer_sampler,
    )


# ---------------------------------------------------------------------------
# Wonderful-compactification coroot data for the families.


def monoid_wonderful(m: int) -> WonderfulModel:
    if m < 1:
        raise FamilyParameterError("monoid requires m >= 1")
    labels = tuple(f"eps_{k}_1" for k in range(1, m + 2)) + tuple(f"eps_{k}_2" for k in range(1, m + 2))
    lattice = TorusLattice(rank=2 * (m + 1), labels=labels)
    paired = []
    for i in range(1, m):
        left = [0] * (2 * (m + 1))
        left[i - 1] = -1
        left[i] = 1
        if i == 1:
            left[m] = 1
        right = [0] * (2 * (m + 1))
        right[m + 1 + i - 1] = 1
        right[m + 1 + i] = -1
        if i == 1:
            right[2 * m + 1] = -1
        paired.append((f"D_{i}", lattice.covector(left), lattice.covector(right)))
    return WonderfulModel(lattice=lattice, paired_colors=tuple(paired), extra_colors=())


def circular_wonderful(m: int, n: int, r: int, s: int) -> WonderfulModel:
    if m > n:
        return circular_wonderful(n, m, s, r)
    if r < 0 or s < 0 or r + s > m or (r, s) in {(0, 0), (m, 0), (0, m)}:
        raise FamilyParameterError("parameters outside the admissible circular range")
    labels = tuple(f"eps_{i}_1" for i in range(1, m + 1)) + tuple(f"eps_{j}_2" for j in range(1, n + 1))
    lattice = TorusLattice(rank=m + n, labels=labels)

    def cov(mapping) -> Covector:
        v = [0] * (m + n)
        for k, c in mapping.items():
            v[k] = c
        return lattice.covector(v)

    paired = []
    for i in range(1, r):
        paired.append((f"D_{i}", cov({i - 1: -1, i: 1}), cov({m + i - 1: 1, m + i: -1})))
    for j in range(1, s):
        paired.append(
            (f"E_{j}", cov({m - s + j - 1: -1, m - s + j: 1}), cov({m + n - s + j - 1: 1, m + n - s + j: -1}))
        )
    extra = []
    if r > 0:
        extra.append(("D_r1", cov({r - 1: -1, r: 1})))
        extra.append(("D_r2", cov({m + r - 1: 1, m + r: -1})))
    if s > 0 and not (r > 0 and r + s == m):
        extra.append(("D_s1", cov({m - s - 1: -1, m - s: 1})))
    if s > 0 and not (r > 0 and r + s == n):
        extra.append(("D_s2", cov({m + n - s - 1: 1, m + n - s: -1})))
    return WonderfulModel(lattice=lattice, paired_colors=tuple(paired), extra_colors=tuple(extra))


def determinantal_wonderful(m: int, n: int, r: int) -> WonderfulModel:
    if not 0 < r < min(m, n):
        raise FamilyParameterError("determinantal requires 0 < r < min(m, n)")
    wm = circular_wonderful(m, n, r, 0)
    return wm


# ---------------------------------------------------------------------------
# Family specifier grammar:  monoid:m=3  circular:m=2,n=3,r=1,s=1
#                            determinantal:m,n,r  complexes:l,m,n,r,s


_FAMILY_PARAMS = {
    "monoid": ("m",),
    "circular": ("m", "n", "r", "s"),
    "determinantal": ("m", "n", "r"),
    "complexes": ("l", "m", "n", "r", "s"),
}


def parse_family_spec(text: str) -> tuple[str, dict[str, int]]:
    name, sep, rest = text.partition(":")
    name = name.strip()
    if name not in _FAMILY_PARAMS:
        raise FamilyParameterError(f"unknown family {name!r}")
    wanted = _FAMILY_PARAMS[name]
    if not sep or not rest.strip():
        raise FamilyParameterError(f"family {name} requires parameters {','.join(wanted)}")
    params: dict[str, int] = {}
    tokens = [tok.strip() for tok in rest.split(",") if tok.strip()]
    positional: list[int] = []
    for tok in tokens:
        if "=" in tok:
            key, _, val = tok.partition("=")
            key = key.strip()
            if key not in wanted:
                raise FamilyParameterError(f"unknown parameter {key!r} for family {name}")
            if key in params:
                raise FamilyParameterError(f"duplicate parameter {key!r}")
            params[key] = _parse_int(val)
        else:
            positional.append(_parse_int(tok))
    if positional:
        if params or len(positional) != len(wanted):
            raise FamilyParameterError(f"family {name} takes parameters {','.join(wanted)}")
        params = dict(zip(wanted, positional))
    missing = [k for k in wanted if k not in params]
    if missing:
        raise FamilyParameterError(f"missing parameters for {name}: {','.join(missing)}")
    return name, params


def _parse_int(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise FamilyParameterError(f"parameter value {text.strip()!r} is not an integer") from None


@dataclass(eq=False)
class FamilyBundle:
    name: str
    params: dict[str, int]
    realization: MatrixRealization
    model: SphericalDivisorModel | None = None
    wonderful: WonderfulModel | None = None


def build_family(spec: str, trials: int = 8, seed: int = 0) -> FamilyBundle:
    """Construct the model/realization bundle for a family specifier string.

    Determinantal models are finalized through the oracle here, so the bundle
    always carries a model ready for class-group queries when one exists.
    """
    name, params = parse_family_spec(spec)
    if name == "monoid":
        model, real = monoid_model(**params)
        return FamilyBundle(name, params, real, model=model, wonderful=monoid_wonderful(**params))
    if name == "circular":
        model, real = circular_complexes_model(**params)
        return FamilyBundle(name, params, real, model=model, wonderful=circular_wonderful(**params))
    if name == "determinantal":
        real, provisional = determinantal_realization(**params)
        model = finalize_determinantal_model(provisional, real, trials=trials, seed=seed)
        return FamilyBundle(name, params, real, model=model, wonderful=determinantal_wonderful(**params))
    real = complexes_realization(**params)
    return FamilyBundle(name, params, real)


def admissible_circular_parameters(max_m: int, max_n: int):
    """All (m, n, r, s) with m <= n within bounds that carry a divisor model."""
    out = []
    for m in range(1, max_m + 1):
        for n in range(m, max_n + 1):
            for r in range(0, m + 1):
                for s in range(0, m - r + 1):
                    if (r, s) in {(0, 0), (m, 0), (0, m)}:
                        continue
                    out.append((m, n, r, s))
    return out

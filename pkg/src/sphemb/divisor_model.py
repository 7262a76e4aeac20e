"""Divisor calculus on a combinatorial model of a spherical embedding.

A model carries the weight lattice, the simple roots restricted to it, one
pairing functional per colour, one invariant-valuation functional per
boundary divisor, and the canonical-divisor coefficient of every colour.
From that data this module computes principal divisors of semi-invariant
functions, the divisor class group as a Smith-normal-form cokernel, divisor
classes, principality witnesses, the Gorenstein determination, and section
divisors on a wonderful-compactification model.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from .lattice import (
    AbelianGroupPresentation,
    IntegerMatrix,
    SmithDecomposition,
    cokernel,
    rational_inverse,
    smith_normal_form,
    solve_integer,
)
from .rootdata import Character, Covector, SimpleRootSet, TorusLattice, is_antidominant, pair

BOUNDARY = "boundary"
COLOR = "color"


class ForeignLabelError(ValueError):
    """A divisor refers to a label that does not belong to the model."""


class NonIntegralPairingError(ValueError):
    """A pairing that must be integral came out fractional (malformed model)."""


class ProvisionalModelError(ValueError):
    """Class-group queries on a model whose boundary data is not yet confirmed."""


class PicardMembershipError(ValueError):
    """A character outside the Picard sublattice of a wonderful model."""


@dataclass(frozen=True)
class DivisorLabel:
    kind: str
    id: str

    def __post_init__(self):
        if self.kind not in (BOUNDARY, COLOR):
            raise ValueError(f"unknown divisor kind {self.kind!r}")


@dataclass(frozen=True)
class Divisor:
    """Formal integer combination of labelled prime divisors (zeros dropped)."""

    coefficients: tuple[tuple[str, int], ...]

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, int]) -> "Divisor":
        items = tuple(sorted((k, int(v)) for k, v in mapping.items() if int(v) != 0))
        return cls(items)

    @classmethod
    def zero(cls) -> "Divisor":
        return cls(())

    def coefficient(self, label: str) -> int:
        for k, v in self.coefficients:
            if k == label:
                return v
        return 0

    def as_dict(self) -> dict[str, int]:
        return dict(self.coefficients)

    @property
    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other: "Divisor") -> "Divisor":
        out = self.as_dict()
        for k, v in other.coefficients:
            out[k] = out.get(k, 0) + v
        return Divisor.from_mapping(out)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((k, -v) for k, v in self.coefficients))

    def __sub__(self, other: "Divisor") -> "Divisor":
        return self + (-other)

    def __mul__(self, k: int) -> "Divisor":
        return Divisor.from_mapping({lab: k * v for lab, v in self.coefficients})

    __rmul__ = __mul__


@dataclass(frozen=True)
class ColorSpec:
    label: DivisorLabel
    functional: Covector
    canonical_coefficient: int

    def __post_init__(self):
        if self.label.kind != COLOR:
            raise ValueError("ColorSpec label must have kind 'color'")


@dataclass(frozen=True)
class BoundarySpec:
    label: DivisorLabel
    valuation: Covector

    def __post_init__(self):
        if self.label.kind != BOUNDARY:
            raise ValueError("BoundarySpec label must have kind 'boundary'")


@dataclass(frozen=True)
class SphericalDivisorModel:
    """Combinatorial avatar of one spherical embedding.

    ``label_aliases`` lets merged colour names resolve to their canonical
    label; ``character_aliases`` names non-basis lattice characters (such as
    the redundant torus coordinates of the dilation monoid).
    """

    weight_lattice: TorusLattice
    simple_roots: SimpleRootSet
    colors: tuple[ColorSpec, ...]
    boundaries: tuple[BoundarySpec, ...]
    basis_characters: tuple[Character, ...]
    label_aliases: tuple[tuple[str, str], ...] = ()
    character_aliases: tuple[tuple[str, Character], ...] = ()
    provisional: bool = False

    @property
    def label_order(self) -> tuple[str, ...]:
        return tuple(b.label.id for b in self.boundaries) + tuple(c.label.id for c in self.colors)

    @property
    def boundary_ids(self) -> tuple[str, ...]:
        return tuple(b.label.id for b in self.boundaries)

    @property
    def color_ids(self) -> tuple[str, ...]:
        return tuple(c.label.id for c in self.colors)

    def resolve_label(self, name: str) -> str:
        for alias, target in self.label_aliases:
            if name == alias:
                return target
        if name in self.label_order:
            return name
        raise ForeignLabelError(f"label {name!r} does not belong to this model")

    def divisor(self, mapping: Mapping[str, int]) -> Divisor:
        out: dict[str, int] = {}
        for name, coeff in mapping.items():
            canon = self.resolve_label(name)
            out[canon] = out.get(canon, 0) + int(coeff)
        return Divisor.from_mapping(out)

    def character(self, name: str) -> Character:
        if name in self.weight_lattice.labels:
            return self.weight_lattice.basis_character(name)
        for alias, chi in self.character_aliases:
            if name == alias:
                return chi
        raise KeyError(f"unknown character label {name!r}")

    def character_from_mapping(self, mapping: Mapping[str, int]) -> Character:
        chi = self.weight_lattice.zero_character()
        for name, coeff in mapping.items():
            chi = chi + int(coeff) * self.character(name)
        return chi


@dataclass(frozen=True)
class ValidationReport:
    failures: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def validate_model(model: SphericalDivisorModel) -> ValidationReport:
    """Check lattice generation, integrality, antidominance and label uniqueness."""
    failures: list[str] = []

    ids = list(model.label_order)
    if len(set(ids)) != len(ids):
        failures.append("divisor labels are not unique")
    for alias, target in model.label_aliases:
        if alias in ids:
            failures.append(f"alias {alias!r} collides with a primary label")
        if target not in ids:
            failures.append(f"alias {alias!r} points at unknown label {target!r}")

    rank = model.weight_lattice.rank
    basis = IntegerMatrix.from_rows([list(b.coords) for b in model.basis_characters], cols=rank)
    diag = smith_normal_form(basis).D.diagonal()
    if sum(1 for d in diag if d != 0) != rank or any(d not in (0, 1) for d in diag):
        failures.append("basis characters do not generate the full weight lattice")

    for spec in model.colors:
        for b in model.basis_characters:
            if pair(b, spec.functional).denominator != 1:
                failures.append(f"colour functional {spec.label.id} is not integral on the lattice")
                break
    for spec in model.boundaries:
        for b in model.basis_characters:
            if pair(b, spec.valuation).denominator != 1:
                failures.append(f"boundary valuation {spec.label.id} is not integral on the lattice")
                break
        if not is_antidominant(spec.valuation, model.simple_roots):
            failures.append(f"boundary valuation {spec.label.id} is not antidominant")

    return ValidationReport(tuple(failures))


def principal_divisor(model: SphericalDivisorModel, chi: Character) -> Divisor:
    """Divisor of the semi-invariant extending ``chi``: one pairing per label."""
    coeffs: dict[str, int] = {}
    for spec in model.boundaries:
        v = pair(chi, spec.valuation)
        if v.denominator != 1:
            raise NonIntegralPairingError(f"non-integral boundary pairing at {spec.label.id}")
        coeffs[spec.label.id] = v.numerator
    for spec in model.colors:
        v = pair(chi, spec.functional)
        if v.denominator != 1:
            raise NonIntegralPairingError(f"non-integral colour pairing at {spec.label.id}")
        coeffs[spec.label.id] = v.numerator
    return Divisor.from_mapping(coeffs)


def canonical_divisor(model: SphericalDivisorModel) -> Divisor:
    """The fixed representative: -1 on every boundary, the stored coefficient on every colour."""
    coeffs = {b.label.id: -1 for b in model.boundaries}
    coeffs.update({c.label.id: c.canonical_coefficient for c in model.colors})
    return Divisor.from_mapping(coeffs)


@dataclass(frozen=True)
class ClassGroupData:
    presentation: AbelianGroupPresentation
    label_order: tuple[str, ...]
    relation_matrix: IntegerMatrix
    snf: SmithDecomposition
    free_indices: tuple[int, ...]
    torsion: tuple[tuple[int, int], ...]
    generators: tuple[str, ...] | None
    # Rows of V^T restricted to free coordinates, one row per label, plus the
    # inverse of the chosen generator matrix (both integral).
    _free_rows: tuple[tuple[int, ...], ...]
    _gen_inverse: tuple[tuple[int, ...], ...] | None


@dataclass(frozen=True)
class ClassCoordinates:
    """Coordinates of a divisor class: free part plus torsion residues.

    When the model's class group admits a basis of prime-divisor classes the
    free part is written against those named generators; otherwise it is
    given in the Smith-normal-form coordinate system.
    """

    free: tuple[int, ...]
    torsion: tuple[int, ...]
    generators: tuple[str, ...] | None

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.free) and all(c == 0 for c in self.torsion)


def _require_final(model: SphericalDivisorModel):
    if model.provisional:
        raise ProvisionalModelError(
            "model boundary data is provisional; confirm it with the oracle before class-group queries"
        )


def _relation_matrix(model: SphericalDivisorModel) -> IntegerMatrix:
    order = model.label_order
    rows = []
    for b in model.basis_characters:
        d = principal_divisor(model, b)
        rows.append([d.coefficient(lab) for lab in order])
    return IntegerMatrix.from_rows(rows, cols=len(order))


def _is_primitive_rowset(rows: list[tuple[int, ...]], width: int) -> bool:
    m = IntegerMatrix.from_rows([list(r) for r in rows], cols=width)
    diag = smith_normal_form(m).D.diagonal()
    return sum(1 for d in diag if d != 0) == len(rows) and all(d in (0, 1) for d in diag)


@lru_cache(maxsize=None)
def class_group_data(model: SphericalDivisorModel) -> ClassGroupData:
    _require_final(model)
    order = model.label_order
    rel = _relation_matrix(model)
    snf = smith_normal_form(rel)
    n = rel.cols
    k = min(rel.rows, n)
    diag = snf.D.diagonal()
    free_indices = tuple(i for i in range(n) if i >= k or diag[i] == 0)
    torsion = tuple((i, diag[i]) for i in range(k) if diag[i] > 1)
    presentation = cokernel(rel)

    # Free-part coordinates of the label basis vectors: (V^T e_l)[free] = V[l][free].
    free_rows = tuple(
        tuple(snf.V.entry(l, i) for i in free_indices) for l in range(n)
    )

    generators: tuple[str, ...] | None
    gen_inverse = None
    f = len(free_indices)
    if torsion:
        generators = None
    elif f == 0:
        generators = ()
        gen_inverse = ()
    else:
        preference = list(model.color_ids) + list(model.boundary_ids)
        chosen: list[str] = []
        vectors: list[tuple[int, ...]] = []
        for lab in preference:
            if len(chosen) == f:
                break
            vec = free_rows[order.index(lab)]
            if _is_primitive_rowset(vectors + [vec], f):
                chosen.append(lab)
                vectors.append(vec)
        if len(chosen) == f:
            generators = tuple(chosen)
            cols = [[Fraction(vectors[j][i]) for j in range(f)] for i in range(f)]
            inv = rational_inverse(cols)
            gen_inverse = tuple(tuple(int(e) for e in row) for row in inv)
        else:
            generators = None

    return ClassGroupData(
        presentation=presentation,
        label_order=order,
        relation_matrix=rel,
        snf=snf,
        free_indices=free_indices,
        torsion=torsion,
        generators=generators,
        _free_rows=free_rows,
        _gen_inverse=gen_inverse,
    )


def class_group(model: SphericalDivisorModel) -> AbelianGroupPresentation:
    """Divisor class group: cokernel of the semi-invariant relation matrix."""
    return class_group_data(model).presentation


def class_group_generators(model: SphericalDivisorModel) -> tuple[str, ...] | None:
    """Named prime-divisor classes freely generating the class group, if such exist."""
    return class_group_data(model).generators


def _coefficient_vector(model: SphericalDivisorModel, d: Divisor) -> list[int]:
    order = model.label_order
    known = set(order)
    for lab, _ in d.coefficients:
        if lab not in known:
            raise ForeignLabelError(f"label {lab!r} does not belong to this model")
    return [d.coefficient(lab) for lab in order]


def class_of(model: SphericalDivisorModel, d: Divisor) -> ClassCoordinates:
    """Coordinates of [d] in the class group; equal iff divisors are linearly equivalent."""
    data = class_group_data(model)
    v = _coefficient_vector(model, d)
    w = data.snf.V.transpose().apply(v)
    free = [w[i] for i in data.free_indices]
    torsion = tuple(w[i] % f for i, f in data.torsion)
    if data.generators is not None and data._gen_inverse is not None:
        free = [sum(row[j] * free[j] for j in range(len(free))) for row in data._gen_inverse]
    return ClassCoordinates(free=tuple(free), torsion=torsion, generators=data.generators)


def is_principal(model: SphericalDivisorModel, d: Divisor) -> tuple[bool, Character | None]:
    """Whether some lattice character has divisor exactly ``d``; witness when so."""
    data = class_group_data(model)
    v = _coefficient_vector(model, d)
    x = solve_integer(data.relation_matrix.transpose(), v)
    if x is None:
        return False, None
    chi = model.weight_lattice.zero_character()
    for coeff, b in zip(x, model.basis_characters):
        chi = chi + coeff * b
    return True, chi


def is_gorenstein(model: SphericalDivisorModel) -> bool:
    """Whether the canonical class is trivial in the class group.

    For the affine-cone families handled here the Picard group is trivial and
    the varieties are Cohen-Macaulay, so triviality of the canonical class is
    the Gorenstein property.
    """
    principal, _ = is_principal(model, canonical_divisor(model))
    return principal


# ---------------------------------------------------------------------------
# Wonderful compactification: Picard basis and section divisors.


@dataclass(frozen=True)
class WonderfulModel:
    """Coroot data of a wonderful compactification.

    ``paired_colors`` carries one colour per pair of simple roots identified
    on the Picard group (their two coroot functionals must agree on a section
    weight); ``extra_colors`` carries the unpaired simple roots.
    """

    lattice: TorusLattice
    paired_colors: tuple[tuple[str, Covector, Covector], ...]
    extra_colors: tuple[tuple[str, Covector], ...]

    @property
    def color_ids(self) -> tuple[str, ...]:
        return tuple(lab for lab, _, _ in self.paired_colors) + tuple(lab for lab, _ in self.extra_colors)


def wonderful_section_divisor(model: WonderfulModel, chi: Character) -> Divisor:
    """Divisor of the canonical section attached to a Picard-lattice character."""
    coeffs: dict[str, int] = {}
    for lab, f1, f2 in model.paired_colors:
        a = pair(chi, f1)
        b = pair(chi, f2)
        if a != b:
            raise PicardMembershipError(
                f"character pairs unequally ({a} vs {b}) against the coroot pair at {lab}"
            )
        if a.denominator != 1:
            raise NonIntegralPairingError(f"non-integral pairing at {lab}")
        coeffs[lab] = a.numerator
    for lab, f in model.extra_colors:
        a = pair(chi, f)
        if a.denominator != 1:
            raise NonIntegralPairingError(f"non-integral pairing at {lab}")
        coeffs[lab] = a.numerator
    return Divisor.from_mapping(coeffs)


# ---------------------------------------------------------------------------
# Serialization.  Rationals are written as "p/q" strings ("p" when q == 1).


def _frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def model_to_json_dict(model: SphericalDivisorModel) -> dict:
    doc: dict = {
        "lattice": {"rank": model.weight_lattice.rank, "labels": list(model.weight_lattice.labels)},
        "basis_characters": [list(b.coords) for b in model.basis_characters],
        "simple_roots": [
            {"label": rlab, "root": list(root.coords), "coroot": [_frac_str(c) for c in coroot.coords]}
            for (rlab, root), (_, coroot) in zip(model.simple_roots.roots, model.simple_roots.coroots)
        ],
        "colors": [
            {
                "id": c.label.id,
                "functional": [_frac_str(x) for x in c.functional.coords],
                "canonical_coefficient": c.canonical_coefficient,
            }
            for c in model.colors
        ],
        "boundaries": [
            {"id": b.label.id, "valuation": [_frac_str(x) for x in b.valuation.coords]}
            for b in model.boundaries
        ],
    }
    if model.label_aliases:
        doc["aliases"] = {a: t for a, t in model.label_aliases}
    if model.character_aliases:
        doc["character_aliases"] = {a: list(chi.coords) for a, chi in model.character_aliases}
    if model.provisional:
        doc["provisional"] = True
    return doc


def model_to_json(model: SphericalDivisorModel) -> str:
    return json.dumps(model_to_json_dict(model), separators=(",", ":"))


def model_from_json(doc) -> SphericalDivisorModel:
    if isinstance(doc, str):
        doc = json.loads(doc)
    lattice = TorusLattice(rank=doc["lattice"]["rank"], labels=tuple(doc["lattice"]["labels"]))
    basis = tuple(lattice.character(c) for c in doc["basis_characters"])
    roots = []
    coroots = []
    for item in doc["simple_roots"]:
        roots.append((item["label"], lattice.character(item["root"])))
        coroots.append((item["label"], lattice.covector([Fraction(s) for s in item["coroot"]])))
    simple_roots = SimpleRootSet(roots=tuple(roots), coroots=tuple(coroots))
    colors = tuple(
        ColorSpec(
            label=DivisorLabel(COLOR, item["id"]),
            functional=lattice.covector([Fraction(s) for s in item["functional"]]),
            canonical_coefficient=item["canonical_coefficient"],
        )
        for item in doc["colors"]
    )
    boundaries = tuple(
        BoundarySpec(
            label=DivisorLabel(BOUNDARY, item["id"]),
            valuation=lattice.covector([Fraction(s) for s in item["valuation"]]),
        )
        for item in doc["boundaries"]
    )
    aliases = tuple(sorted((a, t) for a, t in doc.get("aliases", {}).items()))
    char_aliases = tuple(
        sorted((a, lattice.character(c)) for a, c in doc.get("character_aliases", {}).items())
    )
    return SphericalDivisorModel(
        weight_lattice=lattice,
        simple_roots=simple_roots,
        colors=colors,
        boundaries=boundaries,
        basis_characters=basis,
        label_aliases=aliases,
        character_aliases=char_aliases,
        provisional=doc.get("provisional", False),
    )


def with_boundaries(model: SphericalDivisorModel, boundaries: Iterable[BoundarySpec], final: bool) -> SphericalDivisorModel:
    """Copy of the model with replaced boundary list (used by oracle-gated constructors)."""
    return replace(model, boundaries=tuple(boundaries), provisional=not final)

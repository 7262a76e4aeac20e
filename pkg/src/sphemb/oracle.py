"""Randomized exact verification at the matrix level.

Every check here works over the rationals with exact arithmetic: t-adic
orders of semi-invariants along generically translated boundary curves,
cocharacter limits, Jacobian-rank orbit dimensions, Borel semi-invariance of
claimed weights, and stabilizer membership.  Randomness is only used to pick
Zariski-generic group elements; identical seeds give identical reports, and
disagreement between trials is reported as instability, never averaged away.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from .laurent import LaurentPoly
from .lattice import rational_rank, rational_solve
from .rootdata import Character, Covector, TorusLattice, pair


class IdenticallyZeroError(ValueError):
    """The translated composite vanished on every trial."""


class SemiInvarianceError(ValueError):
    """The function is not semi-invariant with the claimed weight."""


class OracleInstabilityError(RuntimeError):
    """Trials disagreed where the generic-translate guarantee demands agreement."""


@dataclass(frozen=True)
class TOrderResult:
    """t-adic order of a semi-invariant along a translated curve."""

    order: int
    trials: int
    stable: bool


@dataclass(frozen=True)
class LimitSignature:
    limit_point: tuple
    rank_profile: tuple[int, ...]


@dataclass(frozen=True)
class CheckRecord:
    check: str
    inputs: dict
    model_value: object
    oracle_value: object
    match: bool
    trials: int
    stable: bool

    def to_json_dict(self) -> dict:
        return {
            "check": self.check,
            "inputs": self.inputs,
            "model_value": self.model_value,
            "oracle_value": self.oracle_value,
            "match": self.match,
            "trials": self.trials,
            "stable": self.stable,
        }


@dataclass(frozen=True)
class VerificationReport:
    records: tuple[CheckRecord, ...]

    @property
    def passed(self) -> bool:
        return all(rec.match for rec in self.records)

    @property
    def stable(self) -> bool:
        return all(rec.stable for rec in self.records)

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "stable": self.stable,
            "checks": [rec.to_json_dict() for rec in self.records],
        }


def _as_poly(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    return LaurentPoly.constant(value)


def t_order(real, f, curve_label: str, trials: int = 8, seed: int = 0) -> TOrderResult:
    """Generic t-adic order of ``f`` along the labelled curve.

    The curve is translated by seeded random group elements and ``f`` is
    evaluated as an exact polynomial in t; the generic order is the minimum
    over trials, with ``stable`` recording all-trials agreement.
    """
    curve = real.curve(curve_label)
    rng = random.Random(seed)
    orders: list[int | None] = []
    for _ in range(trials):
        g = real.group_sampler(rng)
        value = _as_poly(f.evaluate(real.act(g, curve)))
        orders.append(value.order())
    finite = [o for o in orders if o is not None]
    if not finite:
        raise IdenticallyZeroError(
            f"{f.name} vanished identically along {curve_label} on all {trials} trials"
        )
    return TOrderResult(order=min(finite), trials=trials, stable=len(set(orders)) == 1 and None not in orders)


def limit_signature(real, curve_label: str) -> LimitSignature:
    """Limit of the curve at t=0 with per-block ranks; negative powers are an error."""
    curve = real.curve(curve_label)
    blocks = []
    ranks = []
    for m in curve:
        rows = []
        for r in m:
            rows.append(tuple(_as_poly(e).value_at_zero() for e in r))
        blocks.append(tuple(rows))
        ranks.append(rational_rank([list(r) for r in rows]))
    return LimitSignature(limit_point=tuple(blocks), rank_profile=tuple(ranks))


def orbit_dimension(real, seed: int = 0, point=None) -> int:
    """Rank of the infinitesimal group action at a point (default: base point).

    Exact over the rationals; the seed is accepted for interface uniformity
    but the computation is deterministic.
    """
    at = real.base_point if point is None else point
    return rational_rank(real.lie_algebra_rows(at))


def _sample_orbit_point(real, rng: random.Random):
    return real.act(real.group_sampler(rng), real.base_point)


def semiinvariance_check(real, f, trials: int = 8, seed: int = 0) -> Character:
    """Confirm that ``f`` rescales by its claimed weight under Borel translation.

    For each trial a Borel element b and orbit points x are sampled and
    f(b . x) == weight_value(chi, b) * f(x) is required exactly; the claimed
    weight is returned once every trial agrees.
    """
    rng = random.Random(seed)
    chi = f.claimed_weight
    saw_nonzero = False
    for _ in range(trials):
        b = real.borel_sampler(rng)
        factor = real.weight_value(chi, b)
        for _ in range(2):
            x = _sample_orbit_point(real, rng)
            fx = f.evaluate(x)
            if fx == 0:
                continue
            saw_nonzero = True
            if f.evaluate(real.act(b, x)) != factor * fx:
                raise SemiInvarianceError(
                    f"{f.name} does not rescale by its claimed weight under the Borel action"
                )
    if not saw_nonzero:
        raise SemiInvarianceError(f"{f.name} vanished at every sampled point")
    return chi


def select_semi_invariants(real, trials: int = 8, seed: int = 0):
    """The candidate semi-invariants whose claimed weights survive the check."""
    selected = []
    for f in real.semi_invariants:
        try:
            semiinvariance_check(real, f, trials=trials, seed=seed)
        except SemiInvarianceError:
            continue
        selected.append(f)
    return tuple(selected)


def verify_boundary_valuations(
    model, real, semi_invariants=None, trials: int = 8, seed: int = 0
) -> VerificationReport:
    """Cross-check every model boundary pairing against oracle t-adic orders.

    For each boundary divisor with a curve and each verified semi-invariant,
    the model value <chi, nu> is compared with the generic order of the
    function along the translated curve.
    """
    if semi_invariants is None:
        semi_invariants = select_semi_invariants(real, trials=trials, seed=seed)
    curve_of = dict(real.boundary_curves)
    records = []
    for spec in model.boundaries:
        curve_label = curve_of[spec.label.id]
        for f in semi_invariants:
            expected = pair(f.claimed_weight, spec.valuation)
            model_value = expected.numerator if expected.denominator == 1 else str(expected)
            try:
                result = t_order(real, f, curve_label, trials=trials, seed=seed)
                oracle_value: object = result.order
                stable = result.stable
            except IdenticallyZeroError:
                oracle_value = None
                stable = False
            records.append(
                CheckRecord(
                    check="boundary_valuation",
                    inputs={"boundary": spec.label.id, "semi_invariant": f.name, "curve": curve_label},
                    model_value=model_value,
                    oracle_value=oracle_value,
                    match=oracle_value == model_value,
                    trials=trials,
                    stable=stable,
                )
            )
    return VerificationReport(tuple(records))


def infer_boundary_valuation(
    real,
    curve_label: str,
    semi_invariants,
    lattice: TorusLattice,
    trials: int = 8,
    seed: int = 0,
) -> Covector:
    """Solve the boundary valuation functional from oracle t-adic orders.

    Requires the claimed weights of the given semi-invariants to span the
    lattice; the functional is the unique solution of <weight_i, nu> = order_i.
    """
    chosen = []
    rows: list[list[Fraction]] = []
    for f in semi_invariants:
        candidate = rows + [[Fraction(c) for c in f.claimed_weight.coords]]
        if rational_rank(candidate) == len(candidate):
            chosen.append(f)
            rows = candidate
        if len(rows) == lattice.rank:
            break
    if len(rows) != lattice.rank:
        raise ValueError("semi-invariant weights do not span the character lattice")
    orders = []
    for f in chosen:
        result = t_order(real, f, curve_label, trials=trials, seed=seed)
        if not result.stable:
            raise OracleInstabilityError(f"unstable order for {f.name} along {curve_label}")
        orders.append(result.order)
    solution = rational_solve(rows, orders)
    return Covector(lattice, tuple(solution))


def stabilizer_check(real, element, trials: int = 1) -> bool:
    """Whether the group element fixes the base point (exact; trials ignored)."""
    return real.act(element, real.base_point) == real.base_point


def _perturbed_nonstabilizer(real, element):
    # Deterministically bump one entry until the element stops fixing the base point.
    for fi, factor in enumerate(element):
        for i in range(len(factor)):
            for j in range(len(factor[0])):
                rows = [list(r) for r in factor]
                rows[i][j] = rows[i][j] + 1
                candidate = tuple(
                    tuple(tuple(r) for r in rows) if k == fi else element[k] for k in range(len(element))
                )
                try:
                    if not stabilizer_check(real, candidate):
                        return candidate
                except ZeroDivisionError:
                    continue
    return None


def verification_report(model, real, trials: int = 8, seed: int = 0) -> VerificationReport:
    """Full oracle suite for one family member, as flat check records."""
    records: list[CheckRecord] = []
    rng = random.Random(seed)

    verified = select_semi_invariants(real, trials=trials, seed=seed)
    for f in verified:
        records.append(
            CheckRecord(
                check="semi_invariant_weight",
                inputs={"semi_invariant": f.name},
                model_value=list(f.claimed_weight.coords),
                oracle_value=list(f.claimed_weight.coords),
                match=True,
                trials=trials,
                stable=True,
            )
        )

    if model is not None and model.boundaries and verified:
        records.extend(
            verify_boundary_valuations(model, real, verified, trials=trials, seed=seed).records
        )

    for curve_label, expected in real.expected_limit_ranks:
        sig = limit_signature(real, curve_label)
        records.append(
            CheckRecord(
                check="limit_rank_profile",
                inputs={"curve": curve_label},
                model_value=list(expected),
                oracle_value=list(sig.rank_profile),
                match=tuple(expected) == sig.rank_profile,
                trials=1,
                stable=True,
            )
        )

    if real.expected_orbit_dimension is not None:
        dim = orbit_dimension(real)
        records.append(
            CheckRecord(
                check="orbit_dimension",
                inputs={"point": "base"},
                model_value=real.expected_orbit_dimension,
                oracle_value=dim,
                match=dim == real.expected_orbit_dimension,
                trials=1,
                stable=True,
            )
        )

    if real.stabilizer_sampler is not None:
        element = real.stabilizer_sampler(rng)
        fixed = stabilizer_check(real, element)
        records.append(
            CheckRecord(
                check="stabilizer_fixes_base_point",
                inputs={"element": "sampled stabilizer shape"},
                model_value=True,
                oracle_value=fixed,
                match=fixed,
                trials=1,
                stable=True,
            )
        )
        broken = _perturbed_nonstabilizer(real, element)
        if broken is not None:
            moved = not stabilizer_check(real, broken)
            records.append(
                CheckRecord(
                    check="stabilizer_negative_control",
                    inputs={"element": "perturbed stabilizer shape"},
                    model_value=False,
                    oracle_value=not moved,
                    match=moved,
                    trials=1,
                    stable=True,
                )
            )

    return VerificationReport(tuple(records))

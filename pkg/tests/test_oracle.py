import dataclasses
import random
from fractions import Fraction

import pytest

from sphemb.families import (
    MatrixRealization,
    SemiInvariantSpec,
    circular_complexes_model,
    complexes_realization,
    determinantal_realization,
    monoid_model,
)
from sphemb.laurent import LaurentPoly, NegativeExponentError
from sphemb.oracle import (
    IdenticallyZeroError,
    SemiInvarianceError,
    infer_boundary_valuation,
    limit_signature,
    orbit_dimension,
    select_semi_invariants,
    semiinvariance_check,
    stabilizer_check,
    t_order,
    verification_report,
    verify_boundary_valuations,
)


def _find(semis, name):
    return next(f for f in semis if f.name == name)


def test_t_order_examples():
    model, real = monoid_model(3)
    d = _find(real.semi_invariants, "d")
    res = t_order(real, d, "lambda_1")
    assert res.order == 1 and res.stable

    const = SemiInvariantSpec("one", lambda pt: Fraction(1), model.weight_lattice.zero_character())
    assert t_order(real, const, "lambda_2").order == 0

    delta2 = _find(real.semi_invariants, "Delta_2")
    assert t_order(real, delta2, "lambda_0").order == 2

    zero = SemiInvariantSpec("zero", lambda pt: Fraction(0), model.weight_lattice.zero_character())
    with pytest.raises(IdenticallyZeroError):
        t_order(real, zero, "lambda_0")


def test_t_order_is_a_valuation():
    # Multiplicative on products, invariant under nonzero scaling.
    _, real = monoid_model(3)
    d = _find(real.semi_invariants, "d")
    delta1 = _find(real.semi_invariants, "Delta_1")
    product = SemiInvariantSpec(
        "d*Delta_1", lambda pt: d.evaluate(pt) * delta1.evaluate(pt), d.claimed_weight + delta1.claimed_weight
    )
    scaled = SemiInvariantSpec("7d", lambda pt: 7 * d.evaluate(pt), d.claimed_weight)
    for r in range(4):
        lab = f"lambda_{r}"
        od = t_order(real, d, lab).order
        o1 = t_order(real, delta1, lab).order
        assert t_order(real, product, lab).order == od + o1
        assert t_order(real, scaled, lab).order == od


def test_monoid_limit_signatures():
    for m in range(1, 6):
        _, real = monoid_model(m)
        for r in range(m + 1):
            sig = limit_signature(real, f"lambda_{r}")
            assert sig.rank_profile == (r, m - r)
            # the limit is the pair of complementary standard idempotents
            a, b = sig.limit_point
            assert all(a[i][i] == (1 if i < r else 0) for i in range(m))
            assert all(b[i][i] == (0 if i < r else 1) for i in range(m))


def test_determinantal_limit_signature():
    real, _ = determinantal_realization(2, 2, 1)
    assert real.membership(real.base_point)
    sig = limit_signature(real, "lambda_1")
    assert sig.rank_profile == (0,)  # the scaled idempotent degenerates to zero


def test_circular_limit_signature():
    _, real = circular_complexes_model(2, 2, 1, 1)
    sig = limit_signature(real, "lambda_1")
    assert sig.rank_profile == (0, 1)
    sig = limit_signature(real, "mu_1")
    assert sig.rank_profile == (1, 0)
    # a curve without t degenerates nowhere: limit is the base point
    _, real23 = circular_complexes_model(2, 3, 1, 1)
    sig = limit_signature(real23, "mu_1")
    assert sig.limit_point == real23.base_point
    assert sig.rank_profile == (1, 1)


def test_limit_negative_powers_rejected():
    base = (((Fraction(1),),),)  # one 1x1 matrix
    curve = (((LaurentPoly.t_power(-1),),),)
    real = MatrixRealization(
        family="synthetic",
        params={},
        ambient_shape=((1, 1),),
        base_point=base,
        membership=lambda pt: True,
        act=lambda g, x: x,
        group_sampler=lambda rng: (),
        borel_sampler=lambda rng: (),
        weight_value=lambda chi, g: Fraction(1),
        lie_algebra_rows=lambda pt: [],
        cocharacter_curves=(("pole", curve),),
    )
    with pytest.raises(NegativeExponentError):
        limit_signature(real, "pole")


def test_orbit_dimensions():
    assert orbit_dimension(circular_complexes_model(2, 2, 1, 1)[1]) == 4
    assert orbit_dimension(circular_complexes_model(3, 3, 1, 1)[1]) == 8
    assert orbit_dimension(determinantal_realization(3, 3, 2)[0]) == 8
    assert orbit_dimension(monoid_model(2)[1]) == 5
    real = complexes_realization(2, 3, 2, 1, 1)
    assert orbit_dimension(real) == real.expected_orbit_dimension == 7


def test_semiinvariance_weights():
    for m in range(1, 6):
        model, real = monoid_model(m)
        d = _find(real.semi_invariants, "d")
        weight = semiinvariance_check(real, d)
        expected = model.character("eps_1") + model.character(f"eps_{m + 1}")
        assert weight == expected

    model, real = monoid_model(3)
    delta1 = _find(real.semi_invariants, "Delta_1")
    assert semiinvariance_check(real, delta1, trials=20) == model.character("eps_1")

    const = SemiInvariantSpec("one", lambda pt: Fraction(1), model.weight_lattice.zero_character())
    assert semiinvariance_check(real, const) == model.weight_lattice.zero_character()


def test_semiinvariance_rejects_wrong_claims():
    model, real = monoid_model(3)
    # trailing principal minors are not semi-invariant for this Borel choice
    trailing = _find(real.semi_invariants, "Delta_trail_1")
    with pytest.raises(SemiInvarianceError):
        semiinvariance_check(real, trailing)
    # right function, wrong weight
    d = _find(real.semi_invariants, "d")
    wrong = SemiInvariantSpec("d", d.evaluate, model.character("eps_1"))
    with pytest.raises(SemiInvarianceError):
        semiinvariance_check(real, wrong)


def test_select_semi_invariants_keeps_leading_minors():
    _, real = monoid_model(3)
    names = [f.name for f in select_semi_invariants(real)]
    assert names == ["d", "Delta_1", "Delta_2", "Delta_3"]


def test_verify_boundary_valuations_monoid():
    model, real = monoid_model(3)
    report = verify_boundary_valuations(model, real)
    assert report.passed and report.stable
    # model value <chi, nu_r> appears in every record
    for rec in report.records:
        assert rec.check == "boundary_valuation"
        assert rec.match


def test_verify_boundary_valuations_negative_control():
    model, real = monoid_model(3)
    doubled = model.weight_lattice.covector([2 * c for c in model.boundaries[1].valuation.coords])
    corrupted = dataclasses.replace(
        model,
        boundaries=(
            model.boundaries[0],
            dataclasses.replace(model.boundaries[1], valuation=doubled),
        )
        + model.boundaries[2:],
    )
    report = verify_boundary_valuations(corrupted, real)
    assert not report.passed
    bad = [rec for rec in report.records if not rec.match]
    assert bad
    assert all(rec.inputs["boundary"] == "X_1" for rec in bad)
    good = [rec for rec in report.records if rec.inputs["boundary"] != "X_1"]
    assert all(rec.match for rec in good)


def test_reports_are_deterministic():
    model, real = monoid_model(2)
    a = verify_boundary_valuations(model, real, trials=8, seed=42)
    b = verify_boundary_valuations(model, real, trials=8, seed=42)
    assert a == b
    r1 = verification_report(model, real, trials=4, seed=9)
    r2 = verification_report(model, real, trials=4, seed=9)
    assert r1 == r2


def test_infer_boundary_valuation_matches_model():
    model, real = monoid_model(3)
    verified = select_semi_invariants(real)
    for spec in model.boundaries:
        curve = dict(real.boundary_curves)[spec.label.id]
        nu = infer_boundary_valuation(real, curve, verified, model.weight_lattice)
        assert nu == spec.valuation


def test_stabilizer_check_examples():
    _, real = circular_complexes_model(2, 2, 1, 1)
    identity = (
        tuple(tuple(Fraction(i == j) for j in range(2)) for i in range(2)),
        tuple(tuple(Fraction(i == j) for j in range(2)) for i in range(2)),
    )
    assert stabilizer_check(real, identity)
    rng = random.Random(2)
    g = real.stabilizer_sampler(rng)
    assert stabilizer_check(real, g)
    moved = real.group_sampler(rng)
    # a generic element does not fix the base idempotent
    assert not stabilizer_check(real, moved)


def test_verification_report_families():
    model, real = monoid_model(2)
    report = verification_report(model, real)
    checks = {rec.check for rec in report.records}
    assert {"semi_invariant_weight", "boundary_valuation", "limit_rank_profile", "orbit_dimension"} <= checks
    assert report.passed and report.stable

    creal = complexes_realization(2, 3, 2, 1, 1)
    report = verification_report(None, creal)
    assert report.passed
    assert {"orbit_dimension", "stabilizer_fixes_base_point", "stabilizer_negative_control"} <= {
        rec.check for rec in report.records
    }

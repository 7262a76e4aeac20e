"""Exact divisor calculus for spherical embeddings with a randomized matrix oracle."""

from .lattice import (
    AbelianGroupPresentation,
    IntegerMatrix,
    SmithDecomposition,
    cokernel,
    smith_normal_form,
    solve_integer,
)
from .rootdata import Character, Covector, SimpleRootSet, TorusLattice, is_antidominant, pair
from .divisor_model import (
    BoundarySpec,
    ColorSpec,
    Divisor,
    DivisorLabel,
    SphericalDivisorModel,
    WonderfulModel,
    canonical_divisor,
    class_group,
    class_group_generators,
    class_of,
    is_gorenstein,
    is_principal,
    model_from_json,
    model_to_json,
    principal_divisor,
    validate_model,
    wonderful_section_divisor,
)
from .families import (
    MatrixRealization,
    SemiInvariantSpec,
    build_family,
    circular_complexes_model,
    complexes_realization,
    determinantal_realization,
    finalize_determinantal_model,
    monoid_model,
)
from .oracle import (
    LimitSignature,
    TOrderResult,
    limit_signature,
    orbit_dimension,
    semiinvariance_check,
    stabilizer_check,
    t_order,
    verify_boundary_valuations,
)

__all__ = [name for name in dir() if not name.startswith("_")]

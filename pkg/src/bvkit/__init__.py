"""Hardy-Krause and set-family variation, star discrepancy and Koksma-Hlawka certificates."""

from .approximation import (
    DVariationBound,
    MonotoneApproximation,
    banach_norm,
    dvar_upper,
    chain_check,
    chain_terms,
    monotone_approximate,
    monotone_approximation,
    sup_norm,
)
from .certify import (
    KHCertificate,
    ReferenceIntegral,
    certify,
    empirical_error,
    reference_integral,
    reference_quadrature,
    variation_for,
)
from .discrepancy import (
    PointSet,
    generate,
    star_discrepancy,
    star_discrepancy_exact,
    star_discrepancy_grid_bound,
)
from .errors import (
    BVKitError,
    CertifiedInequalityViolation,
    FamilyMismatch,
    InvalidArgument,
    NotFound,
    PreconditionViolation,
    ResourceLimit,
    UnsupportedInput,
    UnsupportedOperation,
)
from .grid import BoxV, Ladder, TabulatedFunction, delta, delta_u, face_ladder, successor
from .sets import AnchoredBoxes, Ball, ConvexSet, ConvexSets, HalfSpace
from .simple import SimpleFunction, harman_complexity_upper, multiply, vs_upper
from .variation import (
    CMCheck,
    MonotoneDecomposition,
    VariationReport,
    hk_on_ladder,
    hk_refined,
    is_completely_monotone,
    leonov_decompose,
    vitali_on_ladder,
)

__version__ = "0.1.0"

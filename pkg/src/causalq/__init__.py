"""Desk-scale simulator for quantum measurements on finite causal sites.

Builds finite discretized spacetimes as strict partial orders, runs
Kraus/POVM measurements slice by slice along foliations, and numerically
verifies order-independence of spacelike measurements, commutation of the
derived effects, no-signalling for non-selective operations, and the
mediated signalling chain with its invertibility dichotomy.
"""

from .errors import (
    BadCausalPlacement,
    CausalqError,
    DimensionMismatch,
    FoliationMismatch,
    LayoutMismatch,
    NoFoliationFound,
    NonIsometry,
    NotPSD,
    NotSpacelike,
    SchemaError,
    SiteMismatch,
    UnknownOutcome,
    ZeroProbabilityBranch,
    ZeroProduct,
)
from .foliation import (
    Foliation,
    TwoFoliations,
    build_flat_foliation,
    build_two_foliations,
    order_predicates,
    two_foliation_report,
)
from .harness import (
    Assignment,
    FoliationRun,
    Scenario,
    check_sorkin_dichotomy,
    detect_signalling,
    enumerate_branches,
    run_foliation,
    run_sorkin,
    verify_no_signalling,
    verify_povm_commutation,
    verify_spacelike_commutation,
)
from .quantum import (
    CommutationClass,
    DensityOperator,
    LocalOperatorSpec,
    MeasurementFamily,
    PhaseFit,
    Povm,
    PureState,
    Unitary,
    anyonic_commutator,
    born_probability,
    classify_commutation,
    conjugate_measurement,
    embed,
    embed_local,
    extract_phase,
    haar_unitary,
    hermitian_sqrt,
    measurement_from_povm,
    nonselective_update,
    povm_from_measurement,
    proportionality_fit,
    random_family,
    selective_update,
    validate_measurement,
)
from .reports import VerificationReport
from .site import (
    CausalSite,
    Event,
    Isometry,
    Region,
    Slice,
    boundaries_overlap,
    build_diamond_lattice,
    build_random_site,
    build_random_sublattice,
    causal_future,
    causal_past,
    chronological_future,
    chronological_past,
    domain_of_dependence,
    future_boundary,
    is_acausal,
    is_cauchy_slice,
    is_spacelike_separated,
    past_boundary,
    spatial_reflection,
    strict_causal_future,
    strict_causal_past,
    verify_boundary_covariance,
    verify_boundary_properties,
)

__version__ = "0.1.0"

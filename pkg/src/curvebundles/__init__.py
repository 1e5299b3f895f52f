"""Exact splitting types and first-order deformation data for rational curves.

Everything is computed over the rationals with exact arithmetic: no
floats, no Groebner bases, no randomized verification.  The public
surface below covers the full pipeline from a parametrized curve and a
hypersurface containing it to splitting types, obstruction counts,
lifting verdicts, and replayable certificates.
"""

__version__ = "0.1.0"

from .bundles import (
    Cohomology,
    KernelResult,
    QuotientResult,
    SheafMap,
    SplitBundle,
    cohomology,
    factor_map,
    graded_solve,
    kernel_splitting,
    quotient_splitting,
)
from .errors import (
    CurveBundlesError,
    DegreeError,
    FactorError,
    GeometryError,
    GradedSystemError,
    InstanceError,
    NotInjectiveError,
    PreconditionError,
    WindowBoundError,
)
from .family import (
    LiftResult,
    SurjectivityVerdict,
    UniversalFamily,
    build_family,
    check_tangent_sections,
    family_lifts_surjective,
    full_space_lifts_surjective,
    lift_direction,
    verify_lift,
)
from .forms import BinaryForm, MultiForm, partials, pullback_form
from .geometry import (
    BundleSuite,
    Hypersurface,
    PairDiagnostics,
    RationalCurve,
    RestrictedTangent,
    certify_injectivity,
    compute_suite,
    normal_hyp,
    normal_pn,
    pullback_tangent_pn,
    random_instance,
    restricted_tangent,
    validate_pair,
)
from .instancefile import InstanceFile, emit_instance, load_instance, parse_instance_text
from .obstruction import (
    BoundResults,
    NumericProfile,
    ObstructionReport,
    QuinticBound,
    SigmaTerms,
    evaluate_obstruction,
    genus_degree_bound,
    hypersurface_degree_bound,
    jacobian_image_dim,
    obstruction_h1,
    quintic_max_twist_bound,
    riemann_roch_check,
    sigma,
)
from .report import envelope_json, run_report, verify_envelope

__all__ = [
    "__version__",
    "BinaryForm",
    "BoundResults",
    "BundleSuite",
    "Cohomology",
    "CurveBundlesError",
    "DegreeError",
    "FactorError",
    "GeometryError",
    "GradedSystemError",
    "Hypersurface",
    "InstanceError",
    "InstanceFile",
    "KernelResult",
    "LiftResult",
    "MultiForm",
    "NotInjectiveError",
    "NumericProfile",
    "ObstructionReport",
    "PairDiagnostics",
    "PreconditionError",
    "QuinticBound",
    "QuotientResult",
    "RationalCurve",
    "RestrictedTangent",
    "SheafMap",
    "SigmaTerms",
    "SplitBundle",
    "SurjectivityVerdict",
    "UniversalFamily",
    "WindowBoundError",
    "build_family",
    "certify_injectivity",
    "check_tangent_sections",
    "cohomology",
    "compute_suite",
    "emit_instance",
    "envelope_json",
    "evaluate_obstruction",
    "factor_map",
    "family_lifts_surjective",
    "full_space_lifts_surjective",
    "genus_degree_bound",
    "graded_solve",
    "hypersurface_degree_bound",
    "jacobian_image_dim",
    "kernel_splitting",
    "lift_direction",
    "load_instance",
    "normal_hyp",
    "normal_pn",
    "obstruction_h1",
    "parse_instance_text",
    "partials",
    "pullback_form",
    "pullback_tangent_pn",
    "quintic_max_twist_bound",
    "quotient_splitting",
    "random_instance",
    "restricted_tangent",
    "riemann_roch_check",
    "run_report",
    "sigma",
    "validate_pair",
    "verify_envelope",
    "verify_lift",
]

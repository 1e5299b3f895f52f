"""First-order obstruction quantities, hypothesis checks, and numeric bounds.

Everything here consumes the computed splittings of a BundleSuite (genus
zero, exact arithmetic) or, for positive genus, evaluates the defect
formula from caller-supplied cohomology dimensions without touching the
P^1-specific engine.
"""

from dataclasses import dataclass
from fractions import Fraction as Q
from typing import Dict, List, Optional, Sequence, Tuple

from .bundles import cohomology, graded_matrix
from .errors import GeometryError
from .forms import MultiForm, bf_gcd, pullback_form
from .geometry import BundleSuite
from .linalg import rank

VERDICT_OBSTRUCTED = "obstructed"
VERDICT_UNOBSTRUCTED = "unobstructed-necessary-condition-passes"
VERDICT_HYPOTHESES_NOT_MET = "hypotheses-not-met"


@dataclass(frozen=True)
class NumericProfile:
    """The numeric shape of an instance: ambient n, surface degree h, curve degree d, genus g."""

    n: int
    h: int
    d: int
    g: int

    def __init__(self, n: int, h: int, d: int, g: int = 0):
        if n < 3:
            raise GeometryError(f"ambient dimension {n} below 3")
        if h < 1:
            raise GeometryError(f"hypersurface degree {h} below 1")
        if d < 1:
            raise GeometryError(f"curve degree {d} below 1")
        if g < 0:
            raise GeometryError(f"negative genus {g}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "g", g)


@dataclass(frozen=True)
class SigmaTerms:
    """Caller-supplied cohomology dimensions for the positive-genus formula."""

    h0_hyperplane: int
    h0_hyperplane_power: int
    h1_tangent_hyp_twisted: int
    h1_tangent_ambient_twisted: int
    h1_hyperplane_power: int


@dataclass(frozen=True)
class QuinticBound:
    """Max normal twist k and the k < d predicate, for n = 4, h = 5."""

    k: int
    holds: bool


@dataclass(frozen=True)
class BoundResults:
    quintic_max_twist: Optional[QuinticBound]
    hypersurface_degree: bool
    genus_degree: Tuple[bool, bool]


@dataclass(frozen=True)
class ObstructionReport:
    profile: NumericProfile
    splittings: Dict[str, Tuple[int, ...]]
    h1_normal_twisted: int
    sigma: int
    lines_disjoint_on_curve: Optional[bool]
    section_count_inequality: bool
    jacobian_image_dim: int
    bounds: BoundResults
    riemann_roch_ok: bool
    obstructed_first_order: str


def profile_of(suite: BundleSuite) -> NumericProfile:
    return NumericProfile(
        n=suite.curve.n, h=suite.hypersurface.h, d=suite.curve.d, g=0
    )


def obstruction_h1(suite: BundleSuite) -> int:
    """h^1 of the twisted normal bundle, the first-order obstruction count.

    The twist is one hyperplane unit, i.e. +d on P^1.  The same number
    computed through the restricted tangent bundle must agree (the
    connecting piece is h^1 of O(d+2), which vanishes); disagreement
    would mean a pipeline bug, not bad input.
    """
    d = suite.curve.d
    via_normal = cohomology(suite.normal_surface.splitting, d).h1
    via_tangent = cohomology(suite.restricted.splitting, d).h1
    assert via_normal == via_tangent
    return via_normal


def sigma(
    profile: NumericProfile,
    suite: Optional[BundleSuite] = None,
    terms: Optional[SigmaTerms] = None,
) -> int:
    """The deformation defect count.

    Genus zero: all terms come from the computed suite and the result
    must equal obstruction_h1 (the polynomial terms cancel exactly).
    Positive genus: pure formula evaluation over caller-supplied
    cohomology dimensions.
    """
    h = profile.h
    if profile.g == 0:
        if suite is None:
            raise GeometryError("genus-zero evaluation needs a computed suite")
        d = profile.d
        h0_line = d + 1
        h0_power = (h + 1) * d + 1
        h1_power = 0
        h1_tangent_hyp = cohomology(suite.restricted.splitting, d).h1
        h1_tangent_ambient = cohomology(suite.tangent_ambient.splitting, d).h1
        value = (
            (h + 1) * h0_line
            - h
            - h0_power
            + h1_tangent_hyp
            - h1_tangent_ambient
            + h1_power
        )
        assert value == obstruction_h1(suite)
        return value
    if terms is None:
        raise GeometryError("positive-genus evaluation needs caller-supplied terms")
    return (
        (h + 1) * terms.h0_hyperplane
        - h
        - terms.h0_hyperplane_power
        + terms.h1_tangent_hyp_twisted
        - terms.h1_tangent_ambient_twisted
        + terms.h1_hyperplane_power
    )


def _proportional(a: MultiForm, b: MultiForm) -> bool:
    if set(a.terms) != set(b.terms):
        return False
    ratio = None
    for e, c in a.terms.items():
        r = c / b.terms[e]
        if ratio is None:
            ratio = r
        elif r != ratio:
            return False
    return True


def check_lines(hyp_degree: int, num_vars: int, lines: Sequence[MultiForm]):
    """Validate a family of linear forms: count, degree, distinct divisors."""
    if len(lines) != hyp_degree + 1:
        raise GeometryError(
            f"need {hyp_degree + 1} linear forms, got {len(lines)}"
        )
    for i, line in enumerate(lines):
        if line.num_vars != num_vars or line.degree != 1 or line.is_zero:
            raise GeometryError(f"entry {i} is not a linear form in {num_vars} variables")
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            if _proportional(lines[i], lines[j]):
                raise GeometryError(f"linear forms {i} and {j} cut the same divisor")


def hypothesis_check(
    suite: BundleSuite, lines: Optional[Sequence[MultiForm]] = None
) -> Tuple[Optional[bool], bool]:
    """The two hypotheses gating an "obstructed" verdict.

    First value: the chosen hyperplane sections meet the curve in
    pairwise disjoint points (None when no family of lines is supplied;
    False as soon as any line vanishes on the whole curve).  Second
    value: the section-count inequality
    (h+1) h^0(O(d)) - h >= h^0 of the twisted ambient tangent bundle.
    """
    curve = suite.curve
    h, d = suite.hypersurface.h, curve.d
    disjoint: Optional[bool] = None
    if lines is not None:
        check_lines(h, curve.n + 1, lines)
        pulled = [pullback_form(line, curve.coords) for line in lines]
        if any(p.is_zero for p in pulled):
            disjoint = False
        else:
            disjoint = all(
                bf_gcd(pulled[i], pulled[j]).degree == 0
                for i in range(len(pulled))
                for j in range(i + 1, len(pulled))
            )
    sections_needed = cohomology(suite.tangent_ambient.splitting, d).h0
    inequality = (h + 1) * (d + 1) - h >= sections_needed
    return disjoint, inequality


def jacobian_image_dim(suite: BundleSuite) -> int:
    """Rank of the Jacobian pairing on twisted global sections.

    Sections of the twisted ambient tangent bundle are tuples of
    degree-2d forms modulo the Euler relations; the relations map to
    zero (they hit a multiple of the vanishing pullback), so the image
    dimension is the plain rank of the graded Jacobian matrix in
    degree 2d.
    """
    jac = suite.restricted.jacobian_kernel.map
    return rank(graded_matrix(jac, suite.curve.d))


def quintic_max_twist_bound(suite: BundleSuite) -> QuinticBound:
    """Max twist k of the normal bundle and the k < d predicate.

    Only meaningful for curves on quintic threefolds, where the normal
    bundle has rank 2 and degree -2, so its type is {k, -2-k}.
    """
    if suite.curve.n != 4 or suite.hypersurface.h != 5:
        raise GeometryError("max-twist bound applies to quintic threefolds only")
    k = suite.normal_surface.splitting.max_twist
    return QuinticBound(k=k, holds=k < suite.curve.d)


def hypersurface_degree_bound(n: int, h: int) -> bool:
    """The degree window h <= 2n - 2."""
    if n < 3:
        raise GeometryError(f"ambient dimension {n} below 3")
    return h <= 2 * n - 2


def genus_degree_bound(profile: NumericProfile) -> Tuple[bool, bool]:
    """Both disjuncts of the genus/degree bound, exactly.

    First: g(h - n + 1) >= (h - 2n)d - n + 1.  Second: g >= d/2 + 1,
    compared as rationals.
    """
    n, h, d, g = profile.n, profile.h, profile.d, profile.g
    first = g * (h - n + 1) >= (h - 2 * n) * d - n + 1
    second = Q(g) >= Q(d, 2) + 1
    return first, second


def riemann_roch_check(suite: BundleSuite) -> bool:
    """Two unconditional section-count identities on the computed splittings.

    The Euler characteristic of the twisted restricted tangent bundle
    must equal (2n-h)d + n - 1, and its h^0 must decompose as h^0 of the
    twisted normal bundle plus the d+3 sections of the twisted tangent
    line (both exact for immersed rational curves; the connecting h^1
    vanishes).
    """
    n, h, d = suite.curve.n, suite.hypersurface.h, suite.curve.d
    tangent = cohomology(suite.restricted.splitting, d)
    normal = cohomology(suite.normal_surface.splitting, d)
    chi_ok = tangent.chi == (2 * n - h) * d + n - 1
    decomposition_ok = tangent.h0 == normal.h0 + d + 3
    return chi_ok and decomposition_ok


def derive_verdict(
    h1_normal_twisted: int,
    lines_disjoint: Optional[bool],
    inequality: bool,
) -> str:
    """Tri-state first-order verdict.

    A vanishing obstruction space passes the necessary condition
    outright.  A nonzero one certifies obstructedness only when both
    gating hypotheses are established; otherwise the honest answer is
    that the hypotheses were not met.
    """
    if h1_normal_twisted == 0:
        return VERDICT_UNOBSTRUCTED
    if lines_disjoint and inequality:
        return VERDICT_OBSTRUCTED
    return VERDICT_HYPOTHESES_NOT_MET


def evaluate_obstruction(
    suite: BundleSuite, lines: Optional[Sequence[MultiForm]] = None
) -> ObstructionReport:
    """Assemble every obstruction quantity for one computed suite."""
    profile = profile_of(suite)
    h1 = obstruction_h1(suite)
    sig = sigma(profile, suite=suite)
    disjoint, inequality = hypothesis_check(suite, lines)
    quintic = (
        quintic_max_twist_bound(suite)
        if profile.n == 4 and profile.h == 5
        else None
    )
    bounds = BoundResults(
        quintic_max_twist=quintic,
        hypersurface_degree=hypersurface_degree_bound(profile.n, profile.h),
        genus_degree=genus_degree_bound(profile),
    )
    return ObstructionReport(
        profile=profile,
        splittings=suite.splittings(),
        h1_normal_twisted=h1,
        sigma=sig,
        lines_disjoint_on_curve=disjoint,
        section_count_inequality=inequality,
        jacobian_image_dim=jacobian_image_dim(suite),
        bounds=bounds,
        riemann_roch_ok=riemann_roch_check(suite),
        obstructed_first_order=derive_verdict(h1, disjoint, inequality),
    )

"""Obstruction quantities, hypothesis checks, numeric bounds, verdicts."""

import random

import pytest

from curvebundles.bundles import cohomology
from curvebundles.errors import GeometryError
from curvebundles.forms import BinaryForm, MultiForm
from curvebundles.geometry import (
    Hypersurface,
    RationalCurve,
    compute_suite,
    random_instance,
)
from curvebundles.obstruction import (
    NumericProfile,
    SigmaTerms,
    VERDICT_HYPOTHESES_NOT_MET,
    VERDICT_OBSTRUCTED,
    VERDICT_UNOBSTRUCTED,
    derive_verdict,
    evaluate_obstruction,
    genus_degree_bound,
    hypersurface_degree_bound,
    hypothesis_check,
    jacobian_image_dim,
    obstruction_h1,
    quintic_max_twist_bound,
    riemann_roch_check,
    sigma,
)

S = BinaryForm([1, 0])
T = BinaryForm([0, 1])
Z = BinaryForm.zero()

X5 = [MultiForm.variable(i, 5) for i in range(5)]


def fermat_suite():
    curve = RationalCurve(4, 1, [S, -1 * S, T, -1 * T, Z])
    terms = {tuple(5 if j == i else 0 for j in range(5)): 1 for i in range(5)}
    return compute_suite(curve, Hypersurface(4, 5, MultiForm(5, 5, terms)))


def conic_suite():
    curve = RationalCurve(4, 2, [S * S, S * T, T * T, Z, Z])
    l = X5[3]
    q = X5[0] * X5[2] - X5[1] * X5[1] + X5[4] * X5[4]
    g1 = X5[0] ** 4 + X5[1] ** 4 + X5[2] ** 4 + X5[3] ** 4 + X5[4] ** 4
    g2 = X5[0] ** 3 + X5[1] ** 3 + X5[2] ** 3 + X5[3] ** 3 + X5[4] ** 3
    return compute_suite(curve, Hypersurface(4, 5, l * g1 + q * g2))


def octic_line_suite():
    """A line on an octic surface in P^3, where both gating hypotheses hold."""
    x = [MultiForm.variable(i, 4) for i in range(4)]
    f = Hypersurface(3, 8, x[2] * x[0] ** 7 + x[3] * x[1] ** 7)
    return compute_suite(RationalCurve(3, 1, [S, T, Z, Z]), f)


def quadric_line_suite():
    f = Hypersurface(4, 2, X5[0] * X5[3] - X5[1] * X5[2] + X5[4] ** 2)
    return compute_suite(RationalCurve(4, 1, [S, T, Z, Z, Z]), f)


class TestNumericProfile:
    """Shape validation."""

    def test_accepts_quintic_line(self):
        p = NumericProfile(4, 5, 1)
        assert (p.n, p.h, p.d, p.g) == (4, 5, 1, 0)

    def test_rejects_bad_values(self):
        with pytest.raises(GeometryError):
            NumericProfile(2, 5, 1)
        with pytest.raises(GeometryError):
            NumericProfile(4, 0, 1)
        with pytest.raises(GeometryError):
            NumericProfile(4, 5, 0)
        with pytest.raises(GeometryError):
            NumericProfile(4, 5, 1, g=-1)


class TestObstructionH1:
    """The twisted-normal obstruction count."""

    def test_fermat_line(self):
        assert obstruction_h1(fermat_suite()) == 1

    def test_conic_instance(self):
        assert obstruction_h1(conic_suite()) == 1

    def test_vanishes_on_quadric_line(self):
        assert obstruction_h1(quadric_line_suite()) == 0

    def test_matches_direct_cohomology(self):
        suite = fermat_suite()
        direct = cohomology(suite.normal_surface.splitting, suite.curve.d).h1
        assert obstruction_h1(suite) == direct


class TestSigma:
    """Defect count: computed mode and formula mode."""

    def test_fermat_line(self):
        suite = fermat_suite()
        assert sigma(NumericProfile(4, 5, 1), suite=suite) == 1

    def test_conic_instance(self):
        suite = conic_suite()
        assert sigma(NumericProfile(4, 5, 2), suite=suite) == 1

    def test_equals_h1_on_samples(self):
        for seed in (3, 14):
            curve, hyp = random_instance(4, 2, 5, seed=seed)
            suite = compute_suite(curve, hyp)
            profile = NumericProfile(4, 5, 2)
            assert sigma(profile, suite=suite) == obstruction_h1(suite)

    def test_genus_zero_needs_suite(self):
        with pytest.raises(GeometryError):
            sigma(NumericProfile(4, 5, 1))

    def test_formula_mode(self):
        profile = NumericProfile(3, 9, 6, g=2)
        terms = SigmaTerms(
            h0_hyperplane=5,
            h0_hyperplane_power=53,
            h1_tangent_hyp_twisted=4,
            h1_tangent_ambient_twisted=1,
            h1_hyperplane_power=0,
        )
        assert sigma(profile, terms=terms) == 10 * 5 - 9 - 53 + 4 - 1

    def test_formula_mode_needs_terms(self):
        with pytest.raises(GeometryError):
            sigma(NumericProfile(3, 9, 6, g=2))


class TestHypothesisCheck:
    """Disjoint hyperplane sections and the section-count inequality."""

    def test_coordinate_lines_fail_on_fermat_line(self):
        # x0 and x1 pull back to s and -s (shared zero); x4 pulls back to 0
        suite = fermat_suite()
        lines = X5 + [X5[0] + X5[1] + X5[2] + X5[3] + X5[4]]
        disjoint, inequality = hypothesis_check(suite, lines)
        assert disjoint is False
        assert inequality is False

    def test_good_lines_pass_on_fermat_line(self):
        suite = fermat_suite()
        lines = [X5[0] + i * X5[2] for i in range(6)]
        disjoint, _ = hypothesis_check(suite, lines)
        assert disjoint is True

    def test_zero_pullback_alone_fails(self):
        suite = fermat_suite()
        lines = [X5[0] + i * X5[2] for i in range(5)] + [X5[4]]
        disjoint, _ = hypothesis_check(suite, lines)
        assert disjoint is False

    def test_no_lines_gives_none(self):
        disjoint, inequality = hypothesis_check(fermat_suite())
        assert disjoint is None
        assert inequality is False

    def test_inequality_holds_for_octic_line(self):
        _, inequality = hypothesis_check(octic_line_suite())
        assert inequality is True

    def test_duplicate_divisors_rejected(self):
        suite = fermat_suite()
        lines = [X5[0] + i * X5[2] for i in range(5)] + [2 * (X5[0] + 4 * X5[2])]
        with pytest.raises(GeometryError, match="same divisor"):
            hypothesis_check(suite, lines)

    def test_wrong_count_rejected(self):
        with pytest.raises(GeometryError, match="linear forms"):
            hypothesis_check(fermat_suite(), [X5[0], X5[1]])

    def test_non_linear_rejected(self):
        suite = fermat_suite()
        lines = [X5[0] + i * X5[2] for i in range(5)] + [X5[0] * X5[0]]
        with pytest.raises(GeometryError):
            hypothesis_check(suite, lines)

    def test_random_lines_disjoint_with_overwhelming_probability(self):
        suite = fermat_suite()
        rng = random.Random(97)
        hits = 0
        for _ in range(5):
            lines = [
                MultiForm(
                    5, 1, {tuple(1 if j == i else 0 for j in range(5)): rng.randint(1, 40)
                           for i in range(5)}
                )
                for _ in range(6)
            ]
            disjoint, _ = hypothesis_check(suite, lines)
            hits += bool(disjoint)
        assert hits == 5


class TestJacobianImageDim:
    """Rank of the Jacobian pairing on twisted sections."""

    def test_fermat_line(self):
        assert jacobian_image_dim(fermat_suite()) == 6

    def test_conic_instance(self):
        assert jacobian_image_dim(conic_suite()) == 12

    def test_codimension_identity(self):
        for suite in (fermat_suite(), conic_suite(), octic_line_suite()):
            d, h = suite.curve.d, suite.hypersurface.h
            code = (h + 1) * d + 1 - jacobian_image_dim(suite)
            expected = cohomology(suite.restricted.splitting, d).h1
            assert code == expected


class TestBounds:
    """Numeric bound predicates."""

    def test_quintic_max_twist_fermat(self):
        b = quintic_max_twist_bound(fermat_suite())
        assert (b.k, b.holds) == (1, False)

    def test_quintic_max_twist_conic(self):
        b = quintic_max_twist_bound(conic_suite())
        assert (b.k, b.holds) == (2, False)

    def test_quintic_bound_needs_quintic_threefold(self):
        with pytest.raises(GeometryError):
            quintic_max_twist_bound(octic_line_suite())

    def test_hypersurface_degree_window(self):
        assert hypersurface_degree_bound(4, 5) is True
        assert hypersurface_degree_bound(4, 7) is False
        assert hypersurface_degree_bound(3, 4) is True
        with pytest.raises(GeometryError):
            hypersurface_degree_bound(2, 1)

    def test_genus_degree_disjuncts(self):
        assert genus_degree_bound(NumericProfile(4, 5, 3, g=0)) == (True, False)
        assert genus_degree_bound(NumericProfile(3, 9, 6, g=2)) == (False, False)
        assert genus_degree_bound(NumericProfile(3, 9, 6, g=4)) == (True, True)


class TestRiemannRoch:
    """Unconditional section-count identities."""

    def test_holds_on_flagship_instances(self):
        assert riemann_roch_check(fermat_suite())
        assert riemann_roch_check(conic_suite())
        assert riemann_roch_check(octic_line_suite())
        assert riemann_roch_check(quadric_line_suite())

    def test_holds_on_random_instances(self):
        for seed in (21, 22):
            curve, hyp = random_instance(4, 1, 5, seed=seed)
            assert riemann_roch_check(compute_suite(curve, hyp))


class TestVerdict:
    """Tri-state first-order verdict."""

    def test_rules(self):
        assert derive_verdict(0, None, False) == VERDICT_UNOBSTRUCTED
        assert derive_verdict(2, True, True) == VERDICT_OBSTRUCTED
        assert derive_verdict(2, True, False) == VERDICT_HYPOTHESES_NOT_MET
        assert derive_verdict(2, False, True) == VERDICT_HYPOTHESES_NOT_MET
        assert derive_verdict(2, None, True) == VERDICT_HYPOTHESES_NOT_MET

    def test_obstructed_instance(self):
        x = [MultiForm.variable(i, 4) for i in range(4)]
        rep = evaluate_obstruction(
            octic_line_suite(), [x[0] + i * x[1] for i in range(9)]
        )
        assert rep.obstructed_first_order == VERDICT_OBSTRUCTED
        assert rep.h1_normal_twisted == 4
        assert rep.sigma == 4

    def test_unobstructed_instance(self):
        rep = evaluate_obstruction(quadric_line_suite())
        assert rep.obstructed_first_order == VERDICT_UNOBSTRUCTED
        assert rep.h1_normal_twisted == 0

    def test_hypotheses_not_met_instance(self):
        lines = [X5[0] + i * X5[2] for i in range(6)]
        rep = evaluate_obstruction(fermat_suite(), lines)
        assert rep.lines_disjoint_on_curve is True
        assert rep.section_count_inequality is False
        assert rep.obstructed_first_order == VERDICT_HYPOTHESES_NOT_MET


class TestEvaluateObstruction:
    """Full report assembly."""

    def test_fermat_report_fields(self):
        rep = evaluate_obstruction(fermat_suite())
        assert rep.profile == NumericProfile(4, 5, 1)
        assert rep.splittings["normal_hyp"] == (1, -3)
        assert rep.h1_normal_twisted == 1
        assert rep.sigma == 1
        assert rep.lines_disjoint_on_curve is None
        assert rep.jacobian_image_dim == 6
        assert rep.bounds.quintic_max_twist.k == 1
        assert rep.bounds.hypersurface_degree is True
        assert rep.bounds.genus_degree[0] is True
        assert rep.riemann_roch_ok is True

    def test_non_quintic_has_no_max_twist_bound(self):
        rep = evaluate_obstruction(octic_line_suite())
        assert rep.bounds.quintic_max_twist is None
        assert rep.bounds.hypersurface_degree is False

"""Exact form arithmetic: binary forms, gcds, multivariate forms, pullbacks."""

import random
from fractions import Fraction

import pytest

from curvebundles.errors import DegreeError
from curvebundles.forms import (
    BinaryForm,
    MultiForm,
    bf_gcd,
    bf_gcd_many,
    partials,
    pullback_form,
)


def rand_form(rng, degree):
    return BinaryForm([rng.randint(-4, 4) for _ in range(degree + 1)])


def rand_nonzero_form(rng, degree):
    while True:
        f = rand_form(rng, degree)
        if not f.is_zero:
            return f


class TestBinaryForm:
    def test_zero_canonicalization(self):
        """All-zero coefficient lists collapse to the degreeless zero form."""
        z = BinaryForm([0, 0, 0])
        assert z.is_zero
        assert z.degree is None
        assert z == BinaryForm.zero()

    def test_degree_and_coeff_layout(self):
        """coeffs[i] is the coefficient of s^(d-i) t^i."""
        f = BinaryForm([1, 0, -2])
        assert f.degree == 2
        assert f.coeff(0) == 1
        assert f.coeff(2) == -2
        assert f.evaluate(1, 0) == 1
        assert f.evaluate(0, 1) == -2

    def test_monomial_constructor(self):
        s = BinaryForm.monomial(1, 0)
        t = BinaryForm.monomial(1, 1)
        assert (s * t).coeffs == (0, 1, 0)
        with pytest.raises(DegreeError):
            BinaryForm.monomial(2, 3)

    def test_addition_requires_equal_degrees(self):
        with pytest.raises(DegreeError):
            BinaryForm([1, 0]) + BinaryForm([1, 0, 0])

    def test_zero_is_additive_identity_any_degree(self):
        f = BinaryForm([2, 3, 5])
        assert f + BinaryForm.zero() == f
        assert BinaryForm.zero() + f == f

    def test_product(self):
        s_plus_t = BinaryForm([1, 1])
        s_minus_t = BinaryForm([1, -1])
        assert s_plus_t * s_minus_t == BinaryForm([1, 0, -1])

    def test_scalar_multiplication(self):
        f = BinaryForm([1, 2])
        assert f * Fraction(1, 2) == BinaryForm([Fraction(1, 2), 1])
        assert 0 * f == BinaryForm.zero()

    def test_evaluate_matches_expansion(self):
        rng = random.Random(11)
        for _ in range(25):
            d = rng.randint(0, 5)
            f, g = rand_form(rng, d), rand_form(rng, d)
            s0, t0 = rng.randint(-3, 3), rng.randint(-3, 3)
            assert (f + g).evaluate(s0, t0) == f.evaluate(s0, t0) + g.evaluate(s0, t0)

    def test_euler_identity_for_derivatives(self):
        """s f_s + t f_t = deg(f) f for every homogeneous f."""
        rng = random.Random(7)
        s = BinaryForm.monomial(1, 0)
        t = BinaryForm.monomial(1, 1)
        for _ in range(20):
            d = rng.randint(1, 6)
            f = rand_nonzero_form(rng, d)
            assert s * f.derivative_s() + t * f.derivative_t() == d * f

    def test_monic_scales_leading_coefficient(self):
        f = BinaryForm([0, 3, 6])
        assert f.monic() == BinaryForm([0, 1, 2])
        assert BinaryForm.zero().monic().is_zero


class TestGcd:
    def test_plain_common_factor(self):
        s = BinaryForm.monomial(1, 0)
        t = BinaryForm.monomial(1, 1)
        assert bf_gcd(s * s * t, s * t * t) == s * t

    def test_rejects_two_zero_forms(self):
        with pytest.raises(DegreeError):
            bf_gcd(BinaryForm.zero(), BinaryForm.zero())

    def test_zero_against_form_normalizes(self):
        f = BinaryForm([2, 4])
        assert bf_gcd(f, BinaryForm.zero()) == BinaryForm([1, 2])
        assert bf_gcd(BinaryForm.zero(), f) == BinaryForm([1, 2])

    def test_coprime_forms_give_constant(self):
        g = bf_gcd(BinaryForm([1, 0, 1]), BinaryForm([1, 1]))
        assert g.degree == 0

    def test_pure_t_powers(self):
        t3 = BinaryForm.monomial(3, 3)
        st = BinaryForm.monomial(2, 1)
        assert bf_gcd(t3, st) == BinaryForm.monomial(1, 1)

    def test_random_planted_factor(self):
        """gcd of g*a and g*b recovers g whenever a, b are coprime."""
        rng = random.Random(23)
        for _ in range(20):
            g = rand_nonzero_form(rng, rng.randint(1, 3))
            a = rand_nonzero_form(rng, rng.randint(1, 3))
            b = rand_nonzero_form(rng, rng.randint(1, 3))
            got = bf_gcd(g * a, g * b)
            inner = bf_gcd(a, b)
            assert got == (g.monic() * inner).monic()

    def test_many_forms_short_circuit(self):
        s = BinaryForm.monomial(1, 0)
        t = BinaryForm.monomial(1, 1)
        fam = [s * s, s * t, t * t]
        assert bf_gcd_many(fam).degree == 0
        assert bf_gcd_many([s * s, s * t]) == s


class TestMultiForm:
    def test_homogeneity_enforced(self):
        with pytest.raises(DegreeError):
            MultiForm(2, 2, {(1, 0): 1})

    def test_add_and_cancel(self):
        f = MultiForm.monomial((1, 1, 0))
        g = MultiForm.monomial((1, 1, 0), -1)
        assert (f + g).is_zero

    def test_product_degrees(self):
        x0 = MultiForm.variable(0, 2)
        x1 = MultiForm.variable(1, 2)
        p = (x0 + x1) * (x0 - x1)
        assert p.degree == 2
        assert p == x0 * x0 - x1 * x1

    def test_partials_basic(self):
        x0 = MultiForm.variable(0, 3)
        x1 = MultiForm.variable(1, 3)
        f = x0 * x0 * x1
        dx0, dx1, dx2 = partials(f)
        assert dx0 == 2 * (x0 * x1)
        assert dx1 == x0 * x0
        assert dx2.is_zero

    def test_partials_of_constant_rejected(self):
        with pytest.raises(DegreeError):
            partials(MultiForm(2, 0, {(0, 0): 1}))

    def test_euler_identity(self):
        """sum_i x_i d_i f = deg(f) f, exercised on random sparse forms."""
        rng = random.Random(5)
        for _ in range(15):
            n, d = rng.randint(2, 4), rng.randint(1, 4)
            terms = {}
            for _ in range(rng.randint(1, 5)):
                exps = [0] * n
                for _ in range(d):
                    exps[rng.randrange(n)] += 1
                terms[tuple(exps)] = rng.randint(-3, 3)
            f = MultiForm(n, d, terms)
            if f.is_zero:
                continue
            acc = MultiForm.zero(n, d)
            for i, df in enumerate(partials(f)):
                acc = acc + MultiForm.variable(i, n) * df
            assert acc == f.scale(d)


class TestPullback:
    def test_vanishing_on_curve(self):
        """x0 x2 - x1^2 pulls back to zero along (s^2, st, t^2)."""
        conic = [BinaryForm([1, 0, 0]), BinaryForm([0, 1, 0]), BinaryForm([0, 0, 1])]
        f = MultiForm(3, 2, {(1, 0, 1): 1, (0, 2, 0): -1})
        assert pullback_form(f, conic).is_zero

    def test_fermat_on_line(self):
        line = [
            BinaryForm([1, 0]),
            BinaryForm([0, 1]),
            BinaryForm.zero(),
        ]
        f = MultiForm(3, 5, {(5, 0, 0): 1, (0, 5, 0): 1, (0, 0, 5): 1})
        assert pullback_form(f, line) == BinaryForm([1, 0, 0, 0, 0, 1])

    def test_variable_count_checked(self):
        f = MultiForm(3, 1, {(1, 0, 0): 1})
        with pytest.raises(DegreeError):
            pullback_form(f, [BinaryForm([1, 0])])

    def test_mixed_coordinate_degrees_rejected(self):
        f = MultiForm(2, 1, {(1, 0): 1})
        with pytest.raises(DegreeError):
            pullback_form(f, [BinaryForm([1, 0]), BinaryForm([1, 0, 0])])

    def test_random_pullback_is_evaluation_compatible(self):
        """Substituting then evaluating equals evaluating then substituting."""
        rng = random.Random(31)
        for _ in range(10):
            d = rng.randint(1, 3)
            coords = [rand_nonzero_form(rng, d) for _ in range(3)]
            exps = [0, 0, 0]
            for _ in range(rng.randint(1, 3)):
                exps[rng.randrange(3)] += 1
            f = MultiForm(3, sum(exps), {tuple(exps): rng.randint(1, 3)})
            pulled = pullback_form(f, coords)
            s0, t0 = rng.randint(-2, 2), rng.randint(1, 3)
            pt = [c.evaluate(s0, t0) for c in coords]
            direct = Fraction(0)
            for e, c in f.terms.items():
                term = Fraction(c)
                for xi, ei in zip(pt, e):
                    term *= xi ** ei
                direct += term
            assert pulled.evaluate(s0, t0) == direct

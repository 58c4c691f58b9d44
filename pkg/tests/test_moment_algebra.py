"""Moment containers, t-polynomials, and the convolution compositions."""
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st
from mpmath import mpf

from momentlab.exceptions import BackendError
from momentlab.moment_algebra import (
    BooleanCumulantSequence,
    CumulantSequence,
    MomentSequence,
    TPolynomial,
    boolean_convolve,
    boolean_cumulants_from_moments,
    boolean_power_t,
    classical_convolve,
    cumulants_from_moments,
    levy_moments_at_t,
    mb_compose_at,
    mb_compose_integer,
    mb_compose_t,
    moments_from_boolean_cumulants,
    moments_from_cumulants,
)

from conftest import random_moment_prefix

F = Fraction

rationals = st.fractions(min_value=-20, max_value=20, max_denominator=12)
positive_rationals = st.fractions(min_value=F(1, 12), max_value=20,
                                  max_denominator=12)


def seq(*vals):
    return MomentSequence.from_exact([F(v) for v in vals])


class TestMomentSequence:
    def test_mu0_must_be_one(self):
        with pytest.raises(ValueError):
            MomentSequence.from_exact([2, 1])

    def test_exact_coercion(self):
        m = seq(1, "3/2", 4)
        assert all(isinstance(v, Fraction) for v in m.values)
        assert m.exact and m.precision_bits is None

    def test_approx_needs_precision(self):
        with pytest.raises(ValueError):
            MomentSequence.from_approx([mpf(1), mpf(2)], 32)

    def test_require_exact(self):
        m = MomentSequence.from_approx([mpf(1), mpf(2)], 128)
        with pytest.raises(BackendError):
            m.require_exact("test")

    def test_strictly_positive(self):
        assert seq(1, 2, 3).strictly_positive
        assert not seq(1, 0, 3).strictly_positive
        with pytest.raises(ValueError):
            seq(1, -1).require_positive()


class TestTPolynomial:
    def test_eval_matches_expansion(self):
        p = TPolynomial((F(1), F(-3), F(2)))
        for t in (F(0), F(1), F(1, 2), F(-2, 3)):
            assert p(t) == 1 - 3 * t + 2 * t * t

    def test_arithmetic(self):
        p = TPolynomial((F(1), F(2)))
        q = TPolynomial((F(0), F(1), F(1)))
        assert (p + q).coeffs == (F(1), F(3), F(1))
        assert (p * q).coeffs == (F(0), F(1), F(3), F(2))
        # the zero polynomial keeps a single zero coefficient
        assert (p - p).coeffs == (F(0),)

    def test_trailing_zeros_normalized(self):
        assert TPolynomial((F(1), F(0), F(0))).coeffs == (F(1),)
        assert TPolynomial((F(1), F(0))) == TPolynomial((F(1),))


class TestClassicalConvolve:
    def test_binomial_formula_small(self):
        a = seq(1, 1, 2)
        b = seq(1, 3, 10)
        c = classical_convolve(a, b, 2)
        assert c.values == (F(1), F(4), F(18))

    def test_mixed_backends_refused(self):
        a = seq(1, 1)
        b = MomentSequence.from_approx([mpf(1), mpf(1)], 128)
        with pytest.raises(BackendError):
            classical_convolve(a, b, 1)


class TestMaxwellBoltzmannComposition:
    def test_half_formulas(self, rng):
        """At t = 1/2 the second and third composed moments are
        mu2/2 - mu1^2/4 and mu3/2 - 3 mu2 mu1/4 + 3 mu1^3/8."""
        for _ in range(10):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 3))
            got = mb_compose_at(m, F(1, 2), 3)
            mu1, mu2, mu3 = m[1], m[2], m[3]
            assert got[1] == mu1 / 2
            assert got[2] == mu2 / 2 - mu1 ** 2 / 4
            assert got[3] == mu3 / 2 - F(3, 4) * mu2 * mu1 + F(3, 8) * mu1 ** 3

    def test_third_moment_at_one_third(self, rng):
        """The derived t = 1/3 third moment: mu3/3 - 2 mu2 mu1/3
        + 10 mu1^3/27 (the multinomial expansion fixes these weights)."""
        for _ in range(10):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 3))
            got = mb_compose_at(m, F(1, 3), 3)
            mu1, mu2, mu3 = m[1], m[2], m[3]
            assert got[3] == (mu3 / 3 - F(2, 3) * mu2 * mu1
                             + F(10, 27) * mu1 ** 3)

    def test_integer_two_is_self_convolution(self, rng):
        for _ in range(5):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 5))
            assert (mb_compose_integer(m, 2, 5).values
                    == classical_convolve(m, m, 5).values)

    def test_integer_matches_polynomial(self, rng):
        m = MomentSequence.from_exact(random_moment_prefix(rng, 4))
        for k in range(5):
            assert mb_compose_integer(m, k, 4).values == mb_compose_at(m, k, 4).values

    def test_t_one_is_identity(self, rng):
        m = MomentSequence.from_exact(random_moment_prefix(rng, 5))
        assert mb_compose_at(m, 1, 5).values == m.values

    def test_degree_bound(self, rng):
        m = MomentSequence.from_exact(random_moment_prefix(rng, 6))
        for n, p in enumerate(mb_compose_t(m, 6)):
            assert len(p.coeffs) <= n + 1

    def test_exact_backend_required(self):
        m = MomentSequence.from_approx([mpf(1), mpf(2), mpf(5)], 128)
        with pytest.raises(BackendError):
            mb_compose_t(m, 2)


class TestCumulants:
    def test_poisson_cumulants_give_touchard_moments(self):
        # all cumulants equal to 1 produce the Bell numbers
        k = CumulantSequence((F(1),) * 6)
        m = moments_from_cumulants(k)
        assert m.values == (1, 1, 2, 5, 15, 52, 203)

    def test_round_trip_fixed(self, rng):
        for _ in range(10):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 6))
            back = moments_from_cumulants(cumulants_from_moments(m))
            assert back.values == m.values

    @settings(max_examples=40, deadline=None)
    @given(st.lists(rationals, min_size=1, max_size=6))
    def test_round_trip_property(self, kappas):
        k = CumulantSequence(tuple(F(x) for x in kappas))
        assert cumulants_from_moments(moments_from_cumulants(k)).values == k.values

    def test_levy_matches_composition(self, rng):
        """Scaling cumulants by t agrees with the t-composition of the
        moments, entry by entry, for rational t."""
        for _ in range(10):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 6))
            t = F(rng.randint(1, 30), rng.randint(1, 30))
            k = cumulants_from_moments(m)
            assert levy_moments_at_t(k, t).values == mb_compose_at(m, t, 6).values


class TestBoolean:
    def test_third_boolean_cumulant_formula(self, rng):
        for _ in range(10):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 3))
            b = boolean_cumulants_from_moments(m)
            m1, m2, m3 = m[1], m[2], m[3]
            assert b[1] == m1
            assert b[2] == m2 - m1 ** 2
            assert b[3] == m3 - 2 * m1 * m2 + m1 ** 3

    def test_round_trip(self, rng):
        for _ in range(10):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 6))
            b = boolean_cumulants_from_moments(m)
            assert moments_from_boolean_cumulants(b).values == m.values

    @settings(max_examples=40, deadline=None)
    @given(st.lists(rationals, min_size=1, max_size=6))
    def test_round_trip_property(self, bs):
        b = BooleanCumulantSequence(tuple(F(x) for x in bs))
        got = boolean_cumulants_from_moments(moments_from_boolean_cumulants(b))
        assert got.values == b.values

    def test_convolve_third_moment(self, rng):
        for _ in range(10):
            a = MomentSequence.from_exact(random_moment_prefix(rng, 3))
            c = MomentSequence.from_exact(random_moment_prefix(rng, 3))
            got = boolean_convolve(a, c, 3)
            m1, m2, m3 = a[1], a[2], a[3]
            n1, n2, n3 = c[1], c[2], c[3]
            assert got[1] == m1 + n1
            assert got[2] == m2 + 2 * m1 * n1 + n2
            assert got[3] == (m3 + 2 * m2 * n1 + 2 * n2 * m1
                             + m1 ** 2 * n1 + n1 ** 2 * m1 + n3)

    def test_power_two_is_self_convolution(self, rng):
        m = MomentSequence.from_exact(random_moment_prefix(rng, 5))
        assert boolean_power_t(m, 2, 5).values == boolean_convolve(m, m, 5).values

    def test_power_semigroup(self, rng):
        for _ in range(5):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 5))
            s = F(rng.randint(0, 20), rng.randint(1, 10))
            t = F(rng.randint(0, 20), rng.randint(1, 10))
            lhs = boolean_convolve(boolean_power_t(m, s, 5),
                                   boolean_power_t(m, t, 5), 5)
            assert lhs.values == boolean_power_t(m, s + t, 5).values

    def test_negative_t_rejected(self, rng):
        m = MomentSequence.from_exact(random_moment_prefix(rng, 3))
        with pytest.raises(ValueError):
            boolean_power_t(m, F(-1, 2), 3)

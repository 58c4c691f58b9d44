"""Semigroup identity, alternation structure, envelope, threshold scan."""
from fractions import Fraction

import pytest

from momentlab.exceptions import BackendError
from momentlab.moment_algebra import (
    MomentSequence,
    classical_convolve,
    mb_compose_at,
)
from momentlab.semigroup import (
    DEFAULT_T_GRID,
    DEFAULT_THETA_GRID,
    alternation_check,
    envelope_bounds_check,
    lattice_family,
    mb_semigroup_identity,
    theta_threshold_scan,
)

from conftest import random_moment_prefix

F = Fraction


def constant_theta_family(theta: Fraction, upto: int) -> MomentSequence:
    """mu_{n+1} = mu_n^2 / (theta mu_{n-1}): constant log-convexity ratio
    exactly theta, from the seed mu_0 = mu_1 = 1. Works for any rational
    theta, unlike the q**(n^2) form which needs theta = 1/q^2."""
    vals = [F(1), F(1)]
    while len(vals) < upto + 1:
        vals.append(vals[-1] ** 2 / (theta * vals[-2]))
    return MomentSequence.from_exact(vals[:upto + 1])


class TestSemigroupIdentity:
    def test_holds_on_random_prefixes(self, rng):
        for _ in range(8):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 6))
            rep = mb_semigroup_identity(m, 6)
            assert rep.holds, f"failed at n={rep.first_failure}"

    def test_spot_evaluation_agrees(self, rng):
        """Independent of the bivariate expansion: evaluate both sides at
        random rational (s, t) and compare the convolved sequences."""
        for _ in range(6):
            m = MomentSequence.from_exact(random_moment_prefix(rng, 5))
            s = F(rng.randint(1, 9), rng.randint(1, 9))
            t = F(rng.randint(1, 9), rng.randint(1, 9))
            lhs = classical_convolve(mb_compose_at(m, s, 5),
                                     mb_compose_at(m, t, 5), 5)
            rhs = mb_compose_at(m, s + t, 5)
            assert lhs.values == rhs.values

    def test_depth_one_is_linearity(self, rng):
        m = MomentSequence.from_exact(random_moment_prefix(rng, 1))
        assert mb_semigroup_identity(m, 1).holds

    def test_exact_backend_required(self):
        from mpmath import mpf
        m = MomentSequence.from_approx([mpf(1), mpf(2)], 128)
        with pytest.raises(BackendError):
            mb_semigroup_identity(m, 1)

    def test_depth_validated(self, rng):
        m = MomentSequence.from_exact(random_moment_prefix(rng, 3))
        with pytest.raises(ValueError):
            mb_semigroup_identity(m, 4)


class TestAlternation:
    def test_fast_growth_example(self):
        # mu_n = 10**(n^2), t = 1/2, n = 3: terms 10^9/2, -75000, +375
        rep = alternation_check(lattice_family(10, 4), F(1, 2), 3)
        assert rep.terms == (F(500000000), F(-75000), F(375))
        assert rep.leading_matches
        assert rep.holds
        assert rep.preconditions == {"t_in_unit_interval": True,
                                     "strictly_log_convex": True}

    def test_two_term_case(self):
        # n = 2, t = 1/2: (mu2/2, -mu1^2/4); decrease needs mu2 > mu1^2/2
        m = MomentSequence.from_exact([1, 2, 30])
        rep = alternation_check(m, F(1, 2), 2)
        assert rep.terms == (F(15), F(-1))
        assert rep.holds

    def test_slow_growth_informative_failure(self):
        """Near the log-convexity boundary the moduli stop decreasing:
        q = 9/8 at t = 1/4 has |T_2| > T_1. Reported, not an error."""
        rep = alternation_check(lattice_family(F(9, 8), 4), F(1, 4), 3)
        assert rep.signs_alternate
        assert not rep.moduli_nonincreasing
        assert not rep.holds
        assert rep.preconditions["strictly_log_convex"]

    def test_t_outside_unit_interval_reported(self):
        rep = alternation_check(lattice_family(10, 4), F(3, 2), 3)
        assert rep.preconditions["t_in_unit_interval"] is False
        # C(3/2, 2) < 0 so alternation happens to survive here; the point
        # is that the check ran and reported rather than raised
        assert len(rep.terms) == 3


class TestEnvelopeBounds:
    def test_fast_family_holds(self):
        rep = envelope_bounds_check(lattice_family(10, 6), F(1, 100), F(1, 2), 6)
        assert rep.holds
        # upper bound is an equality at n = 1
        n, lower, value, upper = rep.rows[0]
        assert n == 1 and value == upper and lower < value

    def test_theta_one_seventh_family(self):
        m = constant_theta_family(F(1, 7), 6)
        for t in (F(1, 4), F(1, 2), F(3, 4)):
            assert envelope_bounds_check(m, F(1, 7), t, 6).holds

    def test_precondition_reported(self):
        bell = MomentSequence.from_exact([1, 1, 2, 5, 15, 52, 203])
        rep = envelope_bounds_check(bell, F(1, 100), F(1, 2), 6)
        assert rep.kind == "precondition-failed"
        assert rep.witness[0] == "log-convexity ratio exceeds theta"

    def test_t_outside_interval(self):
        rep = envelope_bounds_check(lattice_family(10, 4), F(1, 100), F(3, 2), 4)
        assert rep.kind == "precondition-failed"


class TestThetaThresholdScan:
    def test_default_grid_depth_four(self):
        res = theta_threshold_scan(depth=4)
        assert res.theta_grid == DEFAULT_THETA_GRID
        assert res.t_grid == DEFAULT_T_GRID
        assert all(cell.passed for row in res.pass_matrix for cell in row)
        assert res.empirical_theta_max == F(1, 4)
        assert res.reference_threshold == F(1, 6)
        assert res.monotone_in_theta

    def test_reproducible(self):
        a = theta_threshold_scan(theta_grid=[F(1, 16), F(1, 4)],
                                 t_grid=[F(1, 2)], depth=3)
        b = theta_threshold_scan(theta_grid=[F(1, 16), F(1, 4)],
                                 t_grid=[F(1, 2)], depth=3)
        assert a == b

    def test_irrational_sqrt_rejected(self):
        with pytest.raises(ValueError):
            theta_threshold_scan(theta_grid=[F(1, 3)], t_grid=[F(1, 2)], depth=2)

    def test_delta_flags(self):
        res = theta_threshold_scan(depth=3, delta=F(1, 5))
        flags = {th: ok for th, _, ok in res.ratio_bounds}
        assert flags[F(1, 9)] is True
        assert flags[F(1, 4)] is False

    def test_ratio_bound_values(self):
        res = theta_threshold_scan(theta_grid=[F(1, 4)], t_grid=[F(1, 2)],
                                   depth=2)
        (_, ratio, flag), = res.ratio_bounds
        assert ratio == F(4, 9)
        assert flag is None

    def test_grid_validation(self):
        with pytest.raises(ValueError):
            theta_threshold_scan(theta_grid=[F(2)], t_grid=[F(1, 2)], depth=2)
        with pytest.raises(ValueError):
            theta_threshold_scan(theta_grid=[F(1, 4)], t_grid=[F(2)], depth=2)

from fractions import Fraction

import pytest

from torusflow.errors import DiophantineConditionError, DomainError
from torusflow.ergodization import (
    DensityStatus,
    OrbitSegment,
    constructive_hit,
    diophantine_bound,
    distance_to_orbit,
    ergodization_time_bracket,
    is_delta_dense,
    rational_power_interval,
    theorem1_bound,
)
from torusflow.resonance import analyze
from torusflow.scalars import enclose

from conftest import ONE_S, scalar


class TestDistanceToOrbit:
    def test_origin_is_on_orbit(self, data_sqrt2):
        box = distance_to_orbit(data_sqrt2, 3, (Fraction(0), Fraction(0)), Fraction(1, 100))
        assert box.lower == 0
        assert box.upper <= Fraction(1, 100)

    def test_closest_approach_before_horizon(self, data_sqrt2):
        # at t = 6/(1+sqrt2) both coordinates balance: distance 8.5 - 6 sqrt2
        target = (Fraction(1, 2), Fraction(1, 2))
        box = distance_to_orbit(data_sqrt2, Fraction(5, 2), target, Fraction(1, 10**5))
        exact = enclose(scalar(Fraction(17, 2), sqrt2=-6), Fraction(1, 10**7))
        assert box.lower <= exact.upper and exact.lower <= box.upper
        # the orbit point at t = 2.5 gives the coarser bound from the docs
        assert box.upper <= Fraction(356, 10**4)

    def test_leaf_midpoint_at_time_zero(self, data_half):
        box = distance_to_orbit(data_half, 0, (Fraction(1, 2),), Fraction(1, 100))
        assert box.contains(1)

    def test_rejects_bad_point_length(self, data_half):
        with pytest.raises(DomainError):
            distance_to_orbit(data_half, 1, (Fraction(1, 2), Fraction(0)), Fraction(1, 10))


class TestIsDeltaDense:
    def test_single_point_not_dense(self, data_sqrt2):
        verdict = is_delta_dense(data_sqrt2, 0, Fraction(1, 4))
        assert verdict.status is DensityStatus.NOT_DENSE
        assert verdict.witness is not None
        assert verdict.witness_lower > Fraction(1, 4)

    def test_rational_loop_closes(self, data_half):
        for delta in (Fraction(1, 2), Fraction(1, 10), Fraction(1, 50)):
            verdict = is_delta_dense(data_half, 2, delta)
            assert verdict.status is DensityStatus.DENSE, (delta, verdict)

    def test_dense_at_proven_bound(self, data_sqrt2):
        bound = theorem1_bound(data_sqrt2, Fraction(1, 2))
        horizon = Fraction(int(bound.interval().upper) + 1)
        verdict = is_delta_dense(data_sqrt2, horizon, Fraction(1, 2))
        assert verdict.status is DensityStatus.DENSE

    def test_unknown_at_exact_covering_radius(self, data_sqrt2):
        # the point orbit has covering radius exactly 1/2: neither side is
        # certifiable at delta = 1/2
        verdict = is_delta_dense(data_sqrt2, 0, Fraction(1, 2))
        assert verdict.status is DensityStatus.UNKNOWN

    def test_orbit_segment_wrapper(self, data_half):
        segment = OrbitSegment(data_half, Fraction(2))
        assert segment.is_delta_dense(Fraction(1, 10)).status is DensityStatus.DENSE
        assert segment.distance_to((Fraction(1, 2),), Fraction(1, 10)).upper <= Fraction(1, 10)

    def test_preconditions(self, data_half):
        with pytest.raises(DomainError):
            is_delta_dense(data_half, -1, Fraction(1, 2))
        with pytest.raises(DomainError):
            is_delta_dense(data_half, 1, Fraction(0))


class TestBracket:
    def test_rational_line_bracket(self, data_half):
        bracket = ergodization_time_bracket(
            data_half, Fraction(1, 10), tol=Fraction(1, 20)
        )
        # the loop closes at T = 2 and a segment of length T leaves a gap
        # 2 - T, delta-dense iff 2 - T <= 2 delta, so the true time is 1.8
        assert bracket.t_hi <= 2
        assert bracket.t_lo >= Fraction(7, 4)
        assert bracket.t_lo <= Fraction(9, 5) <= bracket.t_hi

    def test_trivially_dense_delta(self, data_sqrt2):
        bracket = ergodization_time_bracket(data_sqrt2, Fraction(9, 10))
        assert bracket.t_lo == 0 and bracket.t_hi == 0

    def test_bound_dominates_bracket(self, data_sqrt2):
        delta = Fraction(1, 2)
        bracket = ergodization_time_bracket(data_sqrt2, delta)
        bound = theorem1_bound(data_sqrt2, delta)
        assert bound.dominates(bracket.t_hi)

    def test_soundness_reproducible(self, data_half):
        bracket = ergodization_time_bracket(data_half, Fraction(1, 8), tol=Fraction(1, 16))
        final = is_delta_dense(
            data_half, bracket.t_hi, Fraction(1, 8), epsilon=bracket.covering
        )
        assert final.status is DensityStatus.DENSE
        for verdict in bracket.trail:
            if verdict.status is DensityStatus.NOT_DENSE:
                again = is_delta_dense(
                    data_half, verdict.horizon, Fraction(1, 8), epsilon=verdict.covering
                )
                assert again.status is DensityStatus.NOT_DENSE

    def test_monotone_in_delta(self, data_sqrt2):
        small = ergodization_time_bracket(data_sqrt2, Fraction(1, 4))
        large = ergodization_time_bracket(data_sqrt2, Fraction(1, 2))
        assert small.t_hi >= large.t_lo - small.tol

    def test_scale_consistency(self, data_half):
        # (2, 1) flows twice as fast as (1, 1/2) along the same leaf
        doubled = analyze((scalar(2), ONE_S))
        delta = Fraction(1, 10)
        fast = ergodization_time_bracket(doubled, delta, tol=Fraction(1, 40))
        slow = ergodization_time_bracket(data_half, delta, tol=Fraction(1, 40))
        assert fast.t_lo <= slow.t_hi / 2 + fast.tol
        assert fast.t_hi >= slow.t_lo / 2 - fast.tol


class TestTheorem1Bound:
    def test_unit_delta(self, data_sqrt2):
        bound = theorem1_bound(data_sqrt2, Fraction(1))
        assert bound.c_d_alpha == 8
        # 8 * Psi(16) with Psi(16) = 7 + 5 sqrt2 inside the box of radius 16
        exact = enclose(scalar(56, sqrt2=40), Fraction(1, 10**6))
        box = bound.interval(Fraction(1, 10**6))
        assert box.lower <= exact.upper and exact.lower <= box.upper
        assert bound.dominates(Fraction(112))
        assert not bound.dominates(Fraction(113))

    def test_half_delta(self, data_sqrt2):
        bound = theorem1_bound(data_sqrt2, Fraction(1, 2))
        assert bound.profile.radius == 32
        # 8 * Psi(32) with Psi(32) = 17 + 12 sqrt2
        assert float(bound) == pytest.approx(8 * (17 + 12 * 2**0.5), rel=1e-9)

    def test_constant_assembly_skewed(self, data_sqrt2_sum):
        bound = theorem1_bound(data_sqrt2_sum, Fraction(1, 10))
        assert bound.c_d_alpha == 24  # d^2 d! C = 4 * 2 * 3
        assert bound.profile.radius == 480

    def test_hypothesis_gate(self, data_sqrt2_sum):
        with pytest.raises(DomainError):
            theorem1_bound(data_sqrt2_sum, Fraction(9, 10))  # above 4/5
        with pytest.raises(DomainError):
            theorem1_bound(data_sqrt2_sum, Fraction(0))


class TestConstructiveHit:
    def test_center_target(self, data_sqrt2):
        hit = constructive_hit(data_sqrt2, Fraction(1, 2), (Fraction(1, 2), Fraction(1, 2)))
        assert hit.t_star == Fraction(5, 2)
        assert hit.within_delta and hit.within_bound
        # residual is (5 sqrt2 - 7)/2 in the second coordinate
        assert float(hit.residual.upper) == pytest.approx(0.0355339, abs=1e-4)
        assert hit.residual.upper <= Fraction(356, 10**4)

    def test_origin_target(self, data_sqrt2):
        hit = constructive_hit(data_sqrt2, Fraction(1, 2), (Fraction(0), Fraction(0)))
        assert hit.t_star == 0
        assert hit.residual.upper == 0

    def test_rational_line_exact(self, data_half):
        hit = constructive_hit(data_half, Fraction(1, 8), (Fraction(1, 2),))
        assert hit.t_star == 1  # half of the loop period 2
        assert hit.residual.upper == 0
        assert hit.within_delta and hit.within_bound

    def test_random_targets(self, data_sqrt2, data_sqrt2_sum):
        import random

        rng = random.Random(99)
        for data, delta in ((data_sqrt2, Fraction(1, 2)), (data_sqrt2_sum, Fraction(2, 5))):
            for _ in range(10):
                point = tuple(
                    Fraction(rng.randint(0, 63), 64) for _ in range(data.d)
                )
                hit = constructive_hit(data, delta, point)
                assert hit.within_delta, point
                assert hit.within_bound, point
                assert 0 <= hit.t_star

    def test_hypothesis_gate(self, data_half):
        with pytest.raises(DomainError):
            constructive_hit(data_half, Fraction(1, 4), (Fraction(1, 2),))


class TestDiophantine:
    def test_rejects_falsified_gamma(self, data_sqrt2):
        # gamma = 1 fails already at k = (-1, 1): |k.alpha| |k| = sqrt2 - 1
        with pytest.raises(DiophantineConditionError):
            diophantine_bound(data_sqrt2, Fraction(1), Fraction(1), Fraction(1))

    def test_valid_pair_majorizes(self, data_sqrt2):
        report = diophantine_bound(data_sqrt2, Fraction(2, 5), Fraction(1), Fraction(1))
        bound = theorem1_bound(data_sqrt2, Fraction(1))
        # gamma^-1 Q^tau >= Psi(Q) pointwise, so the bound can only grow
        assert report.bound_interval.lower >= bound.interval().upper
        # empirical minimum is sqrt2 - 1, attained at (-1, 1)
        exact = enclose(scalar(-1, sqrt2=1), Fraction(1, 10**6))
        assert report.gamma_hat_interval.lower <= exact.upper
        assert report.gamma_hat_interval.upper >= exact.lower

    def test_integer_tau_bound_value(self, data_sqrt2):
        report = diophantine_bound(data_sqrt2, Fraction(2, 5), Fraction(1), Fraction(1))
        # 8 * (5/2) * 16 = 320 exactly
        assert report.bound_interval.contains(320)

    def test_preconditions(self, data_sqrt2, data_sqrt2_sum):
        with pytest.raises(DomainError):
            diophantine_bound(data_sqrt2, Fraction(0), Fraction(1), Fraction(1))
        with pytest.raises(DomainError):
            diophantine_bound(data_sqrt2_sum, Fraction(1, 10), Fraction(1), Fraction(1, 10))

    def test_monotone_as_delta_shrinks(self, data_sqrt2):
        small = diophantine_bound(data_sqrt2, Fraction(2, 5), Fraction(1), Fraction(1, 4))
        large = diophantine_bound(data_sqrt2, Fraction(2, 5), Fraction(1), Fraction(1))
        assert small.bound_interval.lower > large.bound_interval.upper


class TestRationalPower:
    def test_integer_exponent_exact(self):
        lo, hi = rational_power_interval(Fraction(3, 2), Fraction(2), Fraction(1, 100))
        assert lo == hi == Fraction(9, 4)

    def test_square_root(self):
        lo, hi = rational_power_interval(Fraction(2), Fraction(3, 2), Fraction(1, 10**6))
        assert hi - lo <= Fraction(1, 10**6)
        assert float((lo + hi) / 2) == pytest.approx(2**1.5, abs=1e-5)

    def test_rejects_nonpositive_base(self):
        with pytest.raises(ValueError):
            rational_power_interval(Fraction(0), Fraction(1, 2), Fraction(1, 4))

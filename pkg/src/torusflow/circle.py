"""Exact delta-ergodization of circle rotations (the two-frequency case).

A finite rotation orbit {0, a, 2a, ...} mod 1 is delta-dense iff its largest
circular gap is at most 2*delta, so the step count N(delta) is computed
exactly by sorting fractional parts with certified comparisons.  The number
of distinct gap lengths is exact (structural equality of scalars), which
makes the three-distance property directly observable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cmp_to_key

from .errors import DomainError
from .resonance import ResonanceData, analyze, psi
from .scalars import (
    RealScalar,
    compare,
    floor_int,
    rational_enclosure,
    scalar_interval,
    constant_snapshot,
    sign,
)


@dataclass(frozen=True)
class RotationNumber:
    """Rotation angle reduced to [0, 1); `rational` is set iff exact."""

    value: RealScalar
    rational: Fraction | None

    @staticmethod
    def from_scalar(x: RealScalar) -> "RotationNumber":
        reduced = x - floor_int(x)
        return RotationNumber(
            value=reduced,
            rational=reduced.as_fraction() if reduced.is_rational else None,
        )

    @staticmethod
    def from_fraction(x: Fraction) -> "RotationNumber":
        return RotationNumber.from_scalar(RealScalar.from_rational(x))

    @property
    def is_rational(self) -> bool:
        return self.rational is not None


def _fractional_parts(rotation: RotationNumber, count: int) -> list[RealScalar]:
    """Exact distinct fractional parts of {0, a, ..., count*a}."""
    if rotation.rational is not None:
        a = rotation.rational
        seen = sorted({(i * a) % 1 for i in range(count + 1)})
        return [RealScalar.from_rational(f) for f in seen]
    snapshot = constant_snapshot([rotation.value], Fraction(1, 1 << 96))
    vlo, vhi = scalar_interval(rotation.value, snapshot)
    parts: list[tuple[float, RealScalar]] = []
    for i in range(count + 1):
        lo, hi = i * vlo, i * vhi
        m = math.floor(lo)
        if math.floor(hi) != m:
            m = floor_int(i * rotation.value)  # enclosure straddles an integer
        part = i * rotation.value - m
        parts.append((float(lo - m), part))
    parts.sort(key=lambda item: item[0])
    ordered = [p for _, p in parts]
    for a, b in zip(ordered, ordered[1:]):
        if sign(b - a) < 0:
            # float keys misordered a near-tie; fall back to certified sorting
            ordered.sort(key=cmp_to_key(compare))
            break
    return ordered


@dataclass(frozen=True)
class GapProfile:
    """Circular gaps of a finite rotation orbit, with exact multiplicities."""

    count: int
    points: int
    gaps: tuple[tuple[RealScalar, int], ...]  # sorted ascending, (value, multiplicity)

    @property
    def distinct(self) -> int:
        return len(self.gaps)

    @property
    def max_gap(self) -> RealScalar:
        return self.gaps[-1][0]

    def gap_floats(self) -> tuple[tuple[float, int], ...]:
        out = []
        for value, mult in self.gaps:
            lo, hi = rational_enclosure(value, Fraction(1, 1 << 48))
            out.append((float((lo + hi) / 2), mult))
        return tuple(out)


def gap_profile(rotation: RotationNumber, count: int) -> GapProfile:
    """Sorted circular gaps of {0, a, ..., count*a} mod 1."""
    if count < 0:
        raise DomainError("orbit length must be nonnegative")
    points = _fractional_parts(rotation, count)
    gaps: list[RealScalar] = []
    for a, b in zip(points, points[1:]):
        gaps.append(b - a)
    gaps.append(RealScalar.from_rational(1) - points[-1] + points[0])

    grouped: dict[RealScalar, int] = {}
    for gap in gaps:
        grouped[gap] = grouped.get(gap, 0) + 1
    ordered = sorted(grouped.items(), key=cmp_to_key(lambda x, y: compare(x[0], y[0])))

    total = RealScalar.zero()
    for value, mult in ordered:
        total = total + mult * value
    assert (total - 1).is_zero, "circular gaps must sum to one"
    return GapProfile(count=count, points=len(points), gaps=tuple(ordered))


def _max_gap_at_most(rotation: RotationNumber, count: int, bound: Fraction) -> bool:
    profile = gap_profile(rotation, count)
    return sign(profile.max_gap - bound) <= 0


def ergodization_steps(
    rotation: RotationNumber, delta: Fraction
) -> int | None:
    """Smallest N making the orbit delta-dense; None when no N works.

    The orbit is delta-dense iff the largest circular gap is at most
    2*delta.  For a rational rotation p/q this is possible iff delta >=
    1/q.  The largest gap is nonincreasing in N (new points split gaps), so
    the minimum is found by bisection with certified gap profiles.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    bound = 2 * delta
    if rotation.rational is not None:
        q = rotation.rational.denominator
        if delta < Fraction(1, q):
            return None
        cap = max(q - 1, 0)
    else:
        data = analyze((RealScalar.from_rational(1), rotation.value))
        cap = psi(data, 2 / delta).floor_value() - 1
    if _max_gap_at_most(rotation, 0, bound):
        return 0
    if not _max_gap_at_most(rotation, cap, bound):
        raise RuntimeError(
            "no admissible step count up to the guaranteed cap; implementation bug"
        )
    lo, hi = 0, cap  # lo fails, hi passes
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _max_gap_at_most(rotation, mid, bound):
            hi = mid
        else:
            lo = mid
    return hi


def dirichlet_pair(rotation: RotationNumber, radius: Fraction | int) -> tuple[int, int]:
    """Smallest denominator q <= radius with |q a - p| <= 1/radius, p coprime.

    For a rational rotation with denominator inside the range the exact pair
    is returned (residual zero).
    """
    radius = Fraction(radius)
    if radius < 1:
        raise DomainError("radius must be at least 1")
    limit = math.floor(radius)
    if rotation.rational is not None:
        frac = rotation.rational
        if frac.denominator <= limit:
            return frac.denominator, frac.numerator
    threshold = 1 / radius
    for q in range(1, limit + 1):
        target = q * rotation.value
        base = floor_int(target)
        for p in (base, base + 1):
            diff = target - p
            if sign(diff - threshold) <= 0 and sign(diff + threshold) >= 0:
                assert math.gcd(q, p) == 1, "a smaller denominator was skipped"
                return q, p
    raise RuntimeError(
        "the box principle guarantees a pair below the radius; implementation bug"
    )


@dataclass(frozen=True)
class Theorem2Report:
    delta: Fraction
    steps: int
    profile_floor: int
    bound: int

    @property
    def ok(self) -> bool:
        return self.steps <= self.bound


def theorem2_check(rotation: RotationNumber, delta: Fraction) -> Theorem2Report:
    """Check N(delta) <= [profile(2/delta)] - 1 for an irrational rotation."""
    delta = Fraction(delta)
    if rotation.is_rational:
        raise DomainError("the step-count bound is stated for irrational rotations")
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    data = analyze((RealScalar.from_rational(1), rotation.value))
    value_floor = psi(data, 2 / delta).floor_value()
    steps = ergodization_steps(rotation, delta)
    assert steps is not None
    return Theorem2Report(
        delta=delta,
        steps=steps,
        profile_floor=value_floor,
        bound=value_floor - 1,
    )


def rotation_resonance(rotation: RotationNumber) -> ResonanceData:
    """Resonance data of the suspension direction (1, a)."""
    return analyze((RealScalar.from_rational(1), rotation.value))

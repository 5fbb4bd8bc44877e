"""Exact real scalars as rational combinations of declared irrational constants.

A scalar is a finitely supported Q-linear combination of `BasisConstant`s
(the rational unit plus user-declared irrationals such as ``sqrt(2)`` or an
algebraic root).  The declared constants are trusted to be linearly
independent over Q, which makes the zero test exact: a combination vanishes
iff every coefficient vanishes.  Strict comparisons are decided by refining
certified dyadic enclosures until zero is excluded.

Division of scalars is deliberately not provided; callers that need
reciprocals work with interval enclosures instead.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

#: Default number of interval bisections a single sign query may spend before
#: the independence declaration is considered suspect.
DEFAULT_SIGN_BISECTION_CAP = 10**6

RationalLike = int | Fraction


class IndependenceSuspectError(RuntimeError):
    """A sign query exhausted its refinement budget.

    A nonzero combination of truly Q-independent constants is bounded away
    from zero, so refinement must terminate.  Hitting the cap almost always
    means the declared constant set is not actually independent.
    """


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _is_square_free(m: int) -> bool:
    if m < 2:
        return False
    p = 2
    while p * p <= m:
        if m % (p * p) == 0:
            return False
        p += 1
    return True


@dataclass(frozen=True)
class BasisConstant:
    """One generator of the scalar space.

    kind "one" is the rational unit, kind "sqrt" is sqrt(radicand) for a
    square-free radicand >= 2, and kind "root" is the unique real root of an
    integer polynomial inside a rational isolating interval (ascending
    coefficients; the endpoints must give opposite polynomial signs).
    """

    symbol: str
    kind: str
    radicand: int | None = None
    poly: tuple[int, ...] | None = None
    isolation: tuple[Fraction, Fraction] | None = None

    def __post_init__(self) -> None:
        if self.kind == "one":
            if self.radicand is not None or self.poly is not None:
                raise ValueError("'one' takes no parameters")
        elif self.kind == "sqrt":
            if self.radicand is None or not _is_square_free(self.radicand):
                raise ValueError(
                    f"sqrt radicand must be a square-free integer >= 2, got {self.radicand!r}"
                )
        elif self.kind == "root":
            if not self.poly or len(self.poly) < 2 or self.poly[-1] == 0:
                raise ValueError("root polynomial must have degree >= 1")
            if self.isolation is None:
                raise ValueError("root constant needs an isolating interval")
            lo, hi = self.isolation
            if not lo < hi:
                raise ValueError("isolating interval must have positive width")
            if _poly_eval(self.poly, lo) * _poly_eval(self.poly, hi) >= 0:
                raise ValueError(
                    "polynomial must change sign across the isolating interval"
                )
        else:
            raise ValueError(f"unknown constant kind {self.kind!r}")

    @staticmethod
    def one() -> "BasisConstant":
        return ONE

    @staticmethod
    def sqrt(radicand: int, symbol: str | None = None) -> "BasisConstant":
        return BasisConstant(symbol or f"sqrt{radicand}", "sqrt", radicand=radicand)

    @staticmethod
    def root(
        symbol: str,
        poly: Sequence[int],
        lo: RationalLike,
        hi: RationalLike,
    ) -> "BasisConstant":
        return BasisConstant(
            symbol,
            "root",
            poly=tuple(int(c) for c in poly),
            isolation=(_as_fraction(lo), _as_fraction(hi)),
        )

    def _initial_interval(self) -> tuple[Fraction, Fraction]:
        if self.kind == "one":
            return Fraction(1), Fraction(1)
        if self.kind == "sqrt":
            a = math.isqrt(self.radicand)
            return Fraction(a), Fraction(a + 1)
        assert self.isolation is not None
        return self.isolation

    def _defining_poly(self) -> tuple[int, ...]:
        if self.kind == "sqrt":
            return (-self.radicand, 0, 1)
        assert self.poly is not None
        return self.poly


ONE = BasisConstant("one", "one")


def _poly_eval(coeffs: Sequence[int], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


class _Budget:
    """Mutable bisection counter shared across refinements of one query."""

    __slots__ = ("remaining",)

    def __init__(self, cap: int) -> None:
        self.remaining = cap

    def spend(self) -> None:
        if self.remaining <= 0:
            raise IndependenceSuspectError(
                "sign refinement exhausted its bisection budget; the declared "
                "Q-linear independence of the constant set is suspect"
            )
        self.remaining -= 1


# Best known enclosure per constant; intervals only ever shrink, so every
# combination built from them is automatically nested across calls.
_CACHE: dict[BasisConstant, tuple[Fraction, Fraction]] = {}
_CACHE_LOCK = threading.Lock()


def refine_constant(
    constant: BasisConstant,
    width: Fraction,
    budget: _Budget | None = None,
) -> tuple[Fraction, Fraction]:
    """Return a rational enclosure of the constant no wider than `width`."""
    if constant.kind == "one":
        return Fraction(1), Fraction(1)
    with _CACHE_LOCK:
        lo, hi = _CACHE.get(constant) or constant._initial_interval()
        if hi - lo > width:
            poly = constant._defining_poly()
            sign_lo = _poly_eval(poly, lo)
            while hi - lo > width:
                if budget is not None:
                    budget.spend()
                mid = (lo + hi) / 2
                val = _poly_eval(poly, mid)
                if val == 0:
                    lo = hi = mid
                    break
                if (val < 0) == (sign_lo < 0):
                    lo = mid
                else:
                    hi = mid
            _CACHE[constant] = (lo, hi)
        return lo, hi


def _dyadic_floor(x: Fraction, scale: int) -> Fraction:
    return Fraction(math.floor(x * scale), scale)


def _dyadic_ceil(x: Fraction, scale: int) -> Fraction:
    return Fraction(math.ceil(x * scale), scale)


@dataclass(frozen=True)
class DyadicInterval:
    """Closed interval with dyadic-rational endpoints enclosing a real value."""

    lower: Fraction
    upper: Fraction

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValueError("interval endpoints out of order")
        for end in (self.lower, self.upper):
            d = end.denominator
            if d & (d - 1):
                raise ValueError(f"endpoint {end} is not dyadic")

    @property
    def width(self) -> Fraction:
        return self.upper - self.lower

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    def contains(self, value: RationalLike) -> bool:
        return self.lower <= value <= self.upper

    def encloses(self, other: "DyadicInterval") -> bool:
        return self.lower <= other.lower and other.upper <= self.upper

    def __float__(self) -> float:
        return float(self.midpoint)

    @staticmethod
    def outward(lo: Fraction, hi: Fraction, grid_exponent: int) -> "DyadicInterval":
        scale = 1 << grid_exponent
        return DyadicInterval(_dyadic_floor(lo, scale), _dyadic_ceil(hi, scale))


@dataclass(frozen=True)
class RealScalar:
    """Finitely supported rational combination of basis constants.

    Terms are kept sorted by constant symbol with zero coefficients dropped,
    so structural equality coincides with equality of the represented number
    (under the independence assumption).
    """

    terms: tuple[tuple[BasisConstant, Fraction], ...] = ()

    @staticmethod
    def from_terms(coeffs: Mapping[BasisConstant, RationalLike]) -> "RealScalar":
        cleaned = []
        for constant, value in coeffs.items():
            q = _as_fraction(value)
            if q:
                cleaned.append((constant, q))
        cleaned.sort(key=lambda item: item[0].symbol)
        return RealScalar(tuple(cleaned))

    @staticmethod
    def from_rational(value: RationalLike) -> "RealScalar":
        return RealScalar.from_terms({ONE: value})

    @staticmethod
    def from_constant(constant: BasisConstant, coeff: RationalLike = 1) -> "RealScalar":
        return RealScalar.from_terms({constant: coeff})

    @staticmethod
    def zero() -> "RealScalar":
        return RealScalar()

    def coefficient(self, constant: BasisConstant) -> Fraction:
        for c, q in self.terms:
            if c == constant:
                return q
        return Fraction(0)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_rational(self) -> bool:
        return all(c.kind == "one" for c, _ in self.terms)

    def as_fraction(self) -> Fraction:
        if not self.terms:
            return Fraction(0)
        if not self.is_rational:
            raise ValueError(f"{self} has an irrational part")
        return self.terms[0][1]

    def constants(self) -> tuple[BasisConstant, ...]:
        return tuple(c for c, _ in self.terms)

    def _combine(self, other: "RealScalar", flip: bool) -> "RealScalar":
        acc: dict[BasisConstant, Fraction] = {c: q for c, q in self.terms}
        for c, q in other.terms:
            acc[c] = acc.get(c, Fraction(0)) + (-q if flip else q)
        return RealScalar.from_terms(acc)

    def __add__(self, other: "RealScalar | RationalLike") -> "RealScalar":
        if not isinstance(other, RealScalar):
            other = RealScalar.from_rational(other)
        return self._combine(other, flip=False)

    __radd__ = __add__

    def __sub__(self, other: "RealScalar | RationalLike") -> "RealScalar":
        if not isinstance(other, RealScalar):
            other = RealScalar.from_rational(other)
        return self._combine(other, flip=True)

    def __rsub__(self, other: RationalLike) -> "RealScalar":
        return RealScalar.from_rational(other) - self

    def __neg__(self) -> "RealScalar":
        return RealScalar(tuple((c, -q) for c, q in self.terms))

    def __mul__(self, factor: RationalLike) -> "RealScalar":
        q = _as_fraction(factor)
        if not q:
            return RealScalar()
        return RealScalar(tuple((c, coeff * q) for c, coeff in self.terms))

    __rmul__ = __mul__

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for c, q in self.terms:
            if c.kind == "one":
                parts.append(str(q))
            elif q == 1:
                parts.append(c.symbol)
            else:
                parts.append(f"{q}*{c.symbol}")
        return " + ".join(parts)


def dot(k: Sequence[int], alpha: Sequence[RealScalar]) -> RealScalar:
    """Exact inner product of an integer vector with a scalar vector."""
    if len(k) != len(alpha):
        raise ValueError(f"dimension mismatch: {len(k)} versus {len(alpha)}")
    acc: dict[BasisConstant, Fraction] = {}
    for coeff, entry in zip(k, alpha):
        if not coeff:
            continue
        for constant, q in entry.terms:
            acc[constant] = acc.get(constant, Fraction(0)) + coeff * q
    return RealScalar.from_terms(acc)


def rational_enclosure(
    x: RealScalar,
    width: Fraction,
    budget: _Budget | None = None,
) -> tuple[Fraction, Fraction]:
    """Enclose `x` in a rational interval no wider than `width`."""
    if width <= 0:
        raise ValueError("width must be positive")
    lo = hi = Fraction(0)
    irrational = [(c, q) for c, q in x.terms if c.kind != "one"]
    for c, q in x.terms:
        if c.kind == "one":
            lo += q
            hi += q
    if irrational:
        per_term = width / len(irrational)
        for c, q in irrational:
            clo, chi = refine_constant(c, per_term / abs(q), budget)
            if q >= 0:
                lo += q * clo
                hi += q * chi
            else:
                lo += q * chi
                hi += q * clo
    return lo, hi


def _grid_exponent(width: Fraction) -> int:
    # Smallest k with 2^-k <= width/8; monotone in width so that finer
    # requests always round on a refinement of the coarser grid (this is what
    # makes repeated enclosures of the same scalar nested).
    target = 8 / width
    k = math.ceil(target).bit_length()
    while (1 << k) < target:
        k += 1
    while k > 0 and (1 << (k - 1)) >= target:
        k -= 1
    return k


def enclose(x: RealScalar, width: RationalLike) -> DyadicInterval:
    """Certified dyadic enclosure of `x` of width at most `width`."""
    w = _as_fraction(width)
    if w <= 0:
        raise ValueError("width must be positive")
    lo, hi = rational_enclosure(x, w / 2)
    return DyadicInterval.outward(lo, hi, _grid_exponent(w))


def enclose_reciprocal(x: RealScalar, width: RationalLike) -> DyadicInterval:
    """Certified dyadic enclosure of 1/x for a provably positive scalar."""
    target = _as_fraction(width)
    if target <= 0:
        raise ValueError("width must be positive")
    request = target
    while True:
        lo, hi = rational_enclosure(x, request)
        if lo > 0 and (hi - lo) / (lo * lo) <= target:
            return DyadicInterval.outward(1 / hi, 1 / lo, _grid_exponent(target))
        if hi <= 0:
            raise ValueError("reciprocal enclosure requires a positive scalar")
        request /= 4


def sign(x: RealScalar, max_bisections: int | None = None) -> int:
    """Exact sign of a scalar: 0 iff all coefficients vanish.

    For nonzero scalars the enclosure is refined until zero is excluded; the
    bisection budget (default 10**6) turns a violated independence
    declaration into a loud `IndependenceSuspectError` instead of a hang.
    """
    if x.is_zero:
        return 0
    if x.is_rational:
        return 1 if x.as_fraction() > 0 else -1
    budget = _Budget(DEFAULT_SIGN_BISECTION_CAP if max_bisections is None else max_bisections)
    width = Fraction(1)
    while True:
        lo, hi = rational_enclosure(x, width, budget)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        width /= 16


def compare(x: RealScalar, y: RealScalar | RationalLike) -> int:
    if not isinstance(y, RealScalar):
        y = RealScalar.from_rational(y)
    return sign(x - y)


def abs_scalar(x: RealScalar) -> RealScalar:
    return -x if sign(x) < 0 else x


def floor_int(x: RealScalar) -> int:
    """Certified integer part (largest integer <= x)."""
    if x.is_rational:
        return math.floor(x.as_fraction())
    width = Fraction(1, 4)
    while True:
        lo, hi = rational_enclosure(x, width)
        if math.floor(lo) == math.floor(hi):
            return math.floor(lo)
        candidate = math.floor(hi)
        # x may sit arbitrarily close to the integer `candidate`; decide the
        # side exactly instead of refining forever.
        s = sign(x - RealScalar.from_rational(candidate))
        if s >= 0:
            return candidate
        return candidate - 1


def nearest_int(x: RealScalar) -> int:
    """Closest integer to x; exact half-integers round up."""
    return floor_int(x + Fraction(1, 2))


def approx_float(x: RealScalar) -> float:
    """Float approximation for heuristics; never used for certified decisions."""
    lo, hi = rational_enclosure(x, Fraction(1, 1 << 60))
    return float((lo + hi) / 2)


def constant_snapshot(
    scalars: Iterable[RealScalar],
    width: Fraction,
) -> dict[BasisConstant, tuple[Fraction, Fraction]]:
    """Pre-refined enclosures of every constant appearing in `scalars`.

    Hot loops (grid certification, orbit interval arithmetic) combine these
    fixed rational intervals directly instead of re-entering the cache.
    """
    snapshot: dict[BasisConstant, tuple[Fraction, Fraction]] = {}
    for scalar in scalars:
        for constant, _ in scalar.terms:
            if constant not in snapshot:
                snapshot[constant] = refine_constant(constant, width)
    return snapshot


def scalar_interval(
    x: RealScalar,
    snapshot: Mapping[BasisConstant, tuple[Fraction, Fraction]],
) -> tuple[Fraction, Fraction]:
    """Enclosure of `x` using pre-refined constant intervals from a snapshot."""
    lo = hi = Fraction(0)
    for constant, q in x.terms:
        if constant.kind == "one":
            lo += q
            hi += q
            continue
        clo, chi = snapshot[constant]
        if q >= 0:
            lo += q * clo
            hi += q * chi
        else:
            lo += q * chi
            hi += q * clo
    return lo, hi

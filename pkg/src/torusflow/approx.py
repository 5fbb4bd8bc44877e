"""Periodic approximations whose numerators form a resonance-lattice basis.

For a query radius Q this finds d rational vectors omega_j = p_j / q_j with
|alpha - omega_j| <= d / (q_j Q) such that the integer vectors p_j = q_j
omega_j are a basis of the resonance lattice.  Existence below the
denominator bound d * d! * C_alpha * Psi(2 d! C_alpha Q) is guaranteed, so
the scan is terminating; every output carries exact certificates that are
re-checkable independently of the search order.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import BasisSearchExhaustedError, DomainError
from .lattice import IntLattice, IntVec, hnf, rational_rank
from .resonance import PsiValue, ResonanceData, psi
from .scalars import (
    DyadicInterval,
    RealScalar,
    enclose_reciprocal,
    nearest_int,
    sign,
)

# Exhaustive-subset fallback cap when greedy selection misses the lattice.
_SUBSET_CAP = 10**6


@dataclass(frozen=True)
class PeriodicApproximation:
    """d pairs (q_j, p_j) with certified closeness and basis certificates."""

    radius: Fraction
    pairs: tuple[tuple[int, IntVec], ...]
    q_limit_scale: int
    profile: PsiValue

    def omegas(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(
            tuple(Fraction(x, q) for x in p) for q, p in self.pairs
        )

    def q_limit_interval(self, width: Fraction = Fraction(1, 1 << 30)) -> DyadicInterval:
        box = enclose_reciprocal(self.profile.gap, width / self.q_limit_scale)
        return DyadicInterval(
            self.q_limit_scale * box.lower, self.q_limit_scale * box.upper
        )

    def q_within_limit(self, q: int) -> bool:
        """Exact test q <= q_limit_scale / gap."""
        return sign(RealScalar.from_rational(self.q_limit_scale) - q * self.profile.gap) >= 0


def _close_enough(
    q: int, p: Sequence[int], data: ResonanceData, threshold: Fraction
) -> bool:
    """Exact test |q alpha - p| <= threshold in the sup norm."""
    for a, pi in zip(data.alpha, p):
        diff = q * a - Fraction(pi)
        if sign(diff - threshold) > 0 or sign(diff + threshold) < 0:
            return False
    return True


def _pair_for_denominator(
    data: ResonanceData, q: int, threshold: Fraction
) -> IntVec | None:
    """Lattice vector nearest to q*alpha if it passes the closeness test.

    Rounds the exact leaf coordinates of q*alpha and scans the +-1
    coefficient neighbourhood; among passing candidates the lexicographically
    smallest wins (determinism only; any passing candidate certifies).
    """
    basis = data.lattice.basis
    rounded = [nearest_int(q * c) for c in data.coords]
    best: IntVec | None = None
    for shifts in itertools.product((-1, 0, 1), repeat=data.d):
        coeffs = [r + s for r, s in zip(rounded, shifts)]
        p = tuple(
            sum(c * basis[i][j] for i, c in enumerate(coeffs))
            for j in range(data.n)
        )
        if (best is None or p < best) and _close_enough(q, p, data, threshold):
            best = p
    return best


def _spans_lattice(pairs: Sequence[tuple[int, IntVec]], lattice: IntLattice) -> bool:
    stacked = hnf([list(p) for _, p in pairs])
    return tuple(r for r in stacked if any(r)) == lattice.basis


def _select_basis(
    collected: list[tuple[int, IntVec]], lattice: IntLattice
) -> tuple[tuple[int, IntVec], ...] | None:
    d = lattice.rank
    chosen: list[tuple[int, IntVec]] = []
    rows: list[IntVec] = []
    for q, p in collected:
        if rational_rank(rows + [p]) > len(rows):
            chosen.append((q, p))
            rows.append(p)
        if len(chosen) == d:
            break
    if len(chosen) == d and _spans_lattice(chosen, lattice):
        return tuple(chosen)
    if len(collected) >= d:
        count = math.comb(len(collected), d)
        if count <= _SUBSET_CAP:
            for combo in itertools.combinations(collected, d):
                if _spans_lattice(combo, lattice):
                    return tuple(combo)
    return None


def find_periodic_basis(data: ResonanceData, radius: Fraction | int) -> PeriodicApproximation:
    """Scan denominators q = 1, 2, ... and certify a basis of approximations.

    Raises BasisSearchExhaustedError if the certified denominator bound is
    passed without success, which existence makes an implementation bug.
    """
    q_query = Fraction(radius)
    floor_needed = (data.n + 2) * data.q_alpha
    if q_query < floor_needed:
        raise DomainError(
            f"periodic basis needs radius >= (n+2) Q_alpha = {floor_needed}, got {q_query}"
        )
    d = data.d
    dfact = math.factorial(d)
    profile = psi(data, 2 * dfact * data.c_alpha * q_query)
    limit_scale = d * dfact * data.c_alpha
    threshold = Fraction(d) / q_query

    approximation = PeriodicApproximation(
        radius=q_query, pairs=(), q_limit_scale=limit_scale, profile=profile
    )
    collected: list[tuple[int, IntVec]] = []
    q = 0
    while True:
        q += 1
        if not approximation.q_within_limit(q):
            raise BasisSearchExhaustedError(
                f"no spanning set of periodic approximations with denominators "
                f"below the certified bound at radius {q_query}; this is a bug"
            )
        p = _pair_for_denominator(data, q, threshold)
        if p is None:
            continue
        collected.append((q, p))
        if len(collected) >= d:
            selection = _select_basis(collected, data.lattice)
            if selection is not None:
                return PeriodicApproximation(
                    radius=q_query,
                    pairs=selection,
                    q_limit_scale=limit_scale,
                    profile=profile,
                )


@dataclass(frozen=True)
class PairCertificate:
    q: int
    p: IntVec
    in_lattice: bool
    close: bool
    within_q_limit: bool

    @property
    def ok(self) -> bool:
        return self.in_lattice and self.close and self.within_q_limit


@dataclass(frozen=True)
class CertificateReport:
    radius: Fraction
    pair_checks: tuple[PairCertificate, ...]
    spans_lattice: bool
    count_matches_rank: bool

    @property
    def ok(self) -> bool:
        return (
            self.count_matches_rank
            and self.spans_lattice
            and all(c.ok for c in self.pair_checks)
        )


def certify(data: ResonanceData, approximation: PeriodicApproximation) -> CertificateReport:
    """Re-verify every certificate with exact arithmetic; failures are reported."""
    threshold = Fraction(data.d) / approximation.radius
    checks = []
    for q, p in approximation.pairs:
        in_lattice = all(
            sum(k * x for k, x in zip(row, p)) == 0 for row in data.kernel.basis
        ) and data.lattice.contains(p)
        checks.append(
            PairCertificate(
                q=q,
                p=p,
                in_lattice=in_lattice,
                close=_close_enough(q, p, data, threshold),
                within_q_limit=approximation.q_within_limit(q),
            )
        )
    return CertificateReport(
        radius=approximation.radius,
        pair_checks=tuple(checks),
        spans_lattice=bool(approximation.pairs)
        and _spans_lattice(approximation.pairs, data.lattice),
        count_matches_rank=len(approximation.pairs) == data.d,
    )

"""Resonance analysis of a direction vector on the torus.

For a nonzero vector alpha of exact scalars this module computes the integer
vectors orthogonal to alpha (the kernel lattice K), the resonance lattice
(the integer points of the smallest rational subspace containing alpha), its
two constants (shortest-vector length and squared covolume), and the
resonance profile: the largest reciprocal |k . alpha|^-1 over nonzero
resonance-lattice vectors in a sup-norm box.

Zero tests against alpha are exact because k . alpha = 0 holds iff k
annihilates the rational coefficient vector of every declared constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError
from .lattice import (
    IntLattice,
    IntVec,
    gram_det,
    gram_matrix,
    integer_kernel,
    orthogonal_integer_complement,
    rational_inverse,
    shortest_vector,
)
from .scalars import (
    DyadicInterval,
    RealScalar,
    approx_float,
    compare,
    dot,
    enclose,
    enclose_reciprocal,
    sign,
)

# Full coefficient boxes up to this size are enumerated outright; beyond it
# the pivot-rounding strategy (full-rank lattices only) takes over.
_FULL_BOX_LIMIT = 4_000_000
# Float gaps within this of the float minimum enter the exact comparison
# round.  Double rounding noise for desk-scale boxes is below 1e-10, so the
# shortlist provably contains the true minimizer.
_SHORTLIST_MARGIN = 1e-7


@dataclass(frozen=True)
class ResonanceData:
    """Resonance structure of a direction vector.

    `scale` is the certified sup-norm of alpha (the time-unit factor: reports
    for the raw vector divide by it to match the unit-sup-norm convention).
    `normalized` is the exactly rescaled vector when the sup-norm is
    rational, and None otherwise (general scalar division is not available).
    """

    n: int
    alpha: tuple[RealScalar, ...]
    d: int
    kernel: IntLattice
    lattice: IntLattice
    q_alpha: int
    c_alpha: int
    scale: RealScalar
    normalized: tuple[RealScalar, ...] | None
    coords: tuple[RealScalar, ...]

    def alpha_floats(self) -> tuple[float, ...]:
        return tuple(approx_float(a) for a in self.alpha)

    def coord_floats(self) -> tuple[float, ...]:
        return tuple(approx_float(c) for c in self.coords)

    def sup_norm_interval(self, width: Fraction) -> DyadicInterval:
        return enclose(self.scale, width)


def _coefficient_rows(alpha: Sequence[RealScalar]) -> list[list[int]]:
    constants = sorted(
        {c for entry in alpha for c, _ in entry.terms}, key=lambda c: c.symbol
    )
    rows = []
    for constant in constants:
        row = [entry.coefficient(constant) for entry in alpha]
        scale = math.lcm(*(q.denominator for q in row))
        rows.append([int(q * scale) for q in row])
    return rows


def analyze(alpha: Sequence[RealScalar]) -> ResonanceData:
    """Full resonance analysis; exact throughout."""
    entries = tuple(alpha)
    n = len(entries)
    if n == 0 or all(a.is_zero for a in entries):
        raise DomainError("alpha must be a nonzero vector")
    kernel = integer_kernel(_coefficient_rows(entries), ambient=n)
    lattice = orthogonal_integer_complement(kernel)
    d = lattice.rank
    assert d + kernel.rank == n
    q_alpha = shortest_vector(lattice, "sup")[1]
    c_alpha = gram_det(lattice)

    # certified sup norm: tournament on |alpha_i|, first maximal index wins
    magnitudes = [(-a if sign(a) < 0 else a) for a in entries]
    best = 0
    for i in range(1, n):
        if compare(magnitudes[i], magnitudes[best]) > 0:
            best = i
    scale = magnitudes[best]

    normalized: tuple[RealScalar, ...] | None = None
    if scale.is_rational:
        factor = 1 / scale.as_fraction()
        flip = sign(entries[best])
        normalized = tuple((flip * factor) * a for a in entries)

    coords = _leaf_coordinates(entries, lattice)
    return ResonanceData(
        n=n,
        alpha=entries,
        d=d,
        kernel=kernel,
        lattice=lattice,
        q_alpha=q_alpha,
        c_alpha=c_alpha,
        scale=scale,
        normalized=normalized,
        coords=coords,
    )


def _leaf_coordinates(
    alpha: Sequence[RealScalar], lattice: IntLattice
) -> tuple[RealScalar, ...]:
    """alpha written in the resonance-lattice basis (exact, verified)."""
    basis = lattice.basis
    ginv = rational_inverse(gram_matrix(lattice))
    d, n = len(basis), lattice.ambient
    projections = [
        sum((a * b for a, b in zip(alpha, row) if b), RealScalar.zero())
        for row in basis
    ]
    coords = tuple(
        sum((ginv[k][j] * projections[k] for k in range(d)), RealScalar.zero())
        for j in range(d)
    )
    for j in range(n):
        recovered = sum(
            (c * basis[i][j] for i, c in enumerate(coords) if basis[i][j]),
            RealScalar.zero(),
        )
        assert (recovered - alpha[j]).is_zero, "alpha must lie in its rational span"
    return coords


@dataclass(frozen=True)
class PsiValue:
    """Optimal resonance within a box: witness and exact gap |k* . alpha|.

    The profile value is the reciprocal of the gap; it is handled through
    certified enclosures and exact cross-multiplied comparisons, never by
    dividing scalars.
    """

    radius: Fraction
    witness: IntVec
    gap: RealScalar

    def value_interval(self, width: Fraction = Fraction(1, 1 << 40)) -> DyadicInterval:
        return enclose_reciprocal(self.gap, width)

    def value_float(self) -> float:
        return 1.0 / approx_float(self.gap)

    def value_at_least(self, threshold: Fraction) -> bool:
        """Exact test 1/gap >= threshold."""
        return sign(RealScalar.from_rational(1) - threshold * self.gap) >= 0

    def floor_value(self) -> int:
        """Certified integer part of the profile value 1/gap."""
        approx = self.value_float()
        m = math.floor(approx)
        for candidate in (m - 1, m, m + 1, m + 2):
            # candidate <= 1/gap < candidate + 1
            if candidate >= 0 and self.value_at_least(Fraction(candidate)) and not self.value_at_least(
                Fraction(candidate + 1)
            ):
                return candidate
        raise AssertionError("float seed missed the integer part by more than one")


def _box_size_estimate(lattice: IntLattice, radius: int) -> int:
    from .lattice import _coefficient_bounds, _reduced_basis

    size = 1
    for bound in _coefficient_bounds(_reduced_basis(lattice), radius):
        size *= 2 * bound + 1
    return size


def _shortlist_pivot(
    alpha_f: np.ndarray, radius: int, pivot: int
) -> np.ndarray:
    """Float shortlist for the full lattice Z^n by pivot rounding.

    For each choice of the non-pivot coordinates the pivot coordinate that
    minimizes |k . alpha| is the rounded ratio; convexity in the pivot
    coordinate means the clipped rounded value and its neighbours cover the
    in-box optimum.  Only rows within the exact-comparison margin of the
    float minimum are materialized.
    """
    n = alpha_f.shape[0]
    others = [i for i in range(n) if i != pivot]
    grids = np.meshgrid(
        *[np.arange(-radius, radius + 1, dtype=np.int64) for _ in others],
        indexing="ij",
    )
    tails = np.stack([g.reshape(-1) for g in grids], axis=1)
    residual = tails @ alpha_f[others]
    zero_tail = np.flatnonzero(np.all(tails == 0, axis=1))
    opt = np.rint(-residual / alpha_f[pivot]).astype(np.int64)
    shift_values = []
    best = np.inf
    for shift in (-1, 0, 1):
        piv = np.clip(opt + shift, -radius, radius)
        vals = np.abs(piv * alpha_f[pivot] + residual)
        if shift == 0:
            vals[zero_tail] = np.inf  # excludes only the zero vector
        shift_values.append((piv, vals))
        best = min(best, float(vals.min()))
    cutoff = best + _SHORTLIST_MARGIN * (1.0 + best)
    rows = []
    for piv, vals in shift_values:
        idx = np.flatnonzero(vals <= cutoff)
        full = np.empty((idx.shape[0], n), dtype=np.int64)
        full[:, others] = tails[idx]
        full[:, pivot] = piv[idx]
        rows.append(full)
    return np.concatenate(rows, axis=0)


def psi(data: ResonanceData, radius: Fraction | int) -> PsiValue:
    """Resonance profile at box radius `radius` (exact argmin of |k . alpha|).

    The witness is reported with k . alpha > 0; its negation achieves the
    same gap.  Raises DomainError when the box cannot contain a lattice
    vector (radius below the shortest-vector length).
    """
    q = Fraction(radius)
    if q < data.q_alpha:
        raise DomainError(
            f"profile undefined for radius {q}: the resonance lattice has no "
            f"nonzero vector of sup norm below Q_alpha = {data.q_alpha}"
        )
    box = math.floor(q)
    alpha_f = np.array(data.alpha_floats(), dtype=np.float64)

    from .lattice import box_vector_array

    box_size = _box_size_estimate(data.lattice, box)
    if box_size <= _FULL_BOX_LIMIT:
        vectors = box_vector_array(data.lattice, box)
        values = np.abs(vectors @ alpha_f)
        best = float(values.min())
        shortlist = vectors[values <= best + _SHORTLIST_MARGIN * (1.0 + best)]
    elif data.lattice == IntLattice.standard(data.n):
        pivot = int(np.argmax(np.abs(alpha_f)))
        shortlist = _shortlist_pivot(alpha_f, box, pivot)
    else:
        raise ValueError(
            f"profile query radius {q} needs a coefficient box of {box_size} "
            "points; beyond desk scale for a proper sublattice"
        )
    if shortlist.shape[0] > 5000:
        order = np.argsort(np.abs(shortlist @ alpha_f))[:5000]
        shortlist = shortlist[order]

    best_witness: IntVec | None = None
    best_gap: RealScalar | None = None
    for row in shortlist:
        k = tuple(int(x) for x in row)
        value = dot(k, data.alpha)
        s = sign(value)
        assert s != 0, "nonzero resonance-lattice vectors never annihilate alpha"
        witness = k if s > 0 else tuple(-x for x in k)
        gap = value if s > 0 else -value
        if best_gap is None:
            best_witness, best_gap = witness, gap
            continue
        c = compare(gap, best_gap)
        if c < 0 or (c == 0 and witness < best_witness):
            best_witness, best_gap = witness, gap
    assert best_witness is not None and best_gap is not None
    return PsiValue(radius=q, witness=best_witness, gap=best_gap)


def theorem1_delta_max(data: ResonanceData) -> Fraction:
    """Largest delta admitted by the main inequality's hypothesis."""
    return Fraction(data.d * data.d, (data.n + 2) * data.q_alpha)

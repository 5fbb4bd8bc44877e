"""Independent brute-force oracles used to cross-check the fast paths.

These deliberately avoid the library's enumeration and pruning machinery:
candidate sets come from raw ambient boxes, membership is tested by integer
orthogonality against the kernel basis, and minima are settled by certified
sign comparisons only.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from torusflow.resonance import ResonanceData
from torusflow.scalars import RealScalar, compare, dot, sign


def kernel_membership(data: ResonanceData, k: tuple[int, ...]) -> bool:
    """k lies in the resonance lattice iff it annihilates the kernel basis."""
    return all(sum(a * b for a, b in zip(row, k)) == 0 for row in data.kernel.basis)


def ambient_box_profiles(
    data: ResonanceData, radius_max: int
) -> dict[int, tuple[tuple[int, ...], RealScalar]]:
    """Profile witness and gap for every radius 1..radius_max by raw search.

    One pass over the full ambient box, candidates ordered by sup norm; the
    running best at radius Q is the exact optimum over the box of radius Q.
    """
    candidates: list[tuple[int, tuple[int, ...]]] = []
    for k in itertools.product(range(-radius_max, radius_max + 1), repeat=data.n):
        if any(k) and kernel_membership(data, k):
            candidates.append((max(abs(x) for x in k), k))
    candidates.sort()
    results: dict[int, tuple[tuple[int, ...], RealScalar]] = {}
    best_witness: tuple[int, ...] | None = None
    best_gap: RealScalar | None = None
    index = 0
    for radius in range(1, radius_max + 1):
        while index < len(candidates) and candidates[index][0] <= radius:
            _, k = candidates[index]
            index += 1
            value = dot(k, data.alpha)
            s = sign(value)
            assert s != 0
            witness = k if s > 0 else tuple(-x for x in k)
            gap = value if s > 0 else -value
            if best_gap is None:
                best_witness, best_gap = witness, gap
                continue
            c = compare(gap, best_gap)
            if c < 0 or (c == 0 and witness < best_witness):
                best_witness, best_gap = witness, gap
        if best_gap is not None:
            results[radius] = (best_witness, best_gap)
    return results


def brute_force_kernel(data: ResonanceData, radius: int) -> list[tuple[int, ...]]:
    """All integer vectors in the box that annihilate alpha exactly."""
    out = []
    for k in itertools.product(range(-radius, radius + 1), repeat=data.n):
        if any(k) and sign(dot(k, data.alpha)) == 0:
            out.append(k)
    return out


def circle_gaps(points: list[Fraction]) -> list[Fraction]:
    """Circular gaps of sorted rational fractional parts."""
    ordered = sorted(set(points))
    gaps = [b - a for a, b in zip(ordered, ordered[1:])]
    gaps.append(1 - ordered[-1] + ordered[0])
    return gaps

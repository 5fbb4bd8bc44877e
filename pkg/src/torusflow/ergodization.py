"""Certified orbit geometry on the resonance leaf torus.

The leaf torus is the span of the resonance lattice modulo the lattice, with
the quotient sup metric of the ambient space.  Work happens in lattice
coordinates (the lattice becomes Z^d, the flow direction becomes the exact
coordinate vector of alpha), where the metric is the polyhedral norm
|c B|_sup for the basis matrix B.

Density checking is grid-certified and three-valued.  Floating point only
nominates candidate orbit times and witnesses; every verdict is backed by
exact rational interval arithmetic over snapshot enclosures of the declared
constants.
"""

from __future__ import annotations

import enum
import heapq
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DiophantineConditionError, DomainError
from .lattice import (
    IntLattice,
    enumerate_in_box,
    gram_matrix,
    rational_inverse,
    solve_left,
)
from .resonance import PsiValue, ResonanceData, psi, theorem1_delta_max
from .scalars import (
    DyadicInterval,
    RealScalar,
    _grid_exponent,
    constant_snapshot,
    dot,
    enclose_reciprocal,
    rational_enclosure,
    scalar_interval,
    sign,
)
from .approx import PeriodicApproximation, find_periodic_basis

_SNAPSHOT_WIDTH = Fraction(1, 1 << 96)
_GRID_CAP = 400_000
_SAMPLE_CHUNK = 1024
_GRID_CHUNK = 2048

Interval = tuple[Fraction, Fraction]


def _dyadic_at_most(x: Fraction) -> Fraction:
    """Largest power of two <= x (x > 0)."""
    if x <= 0:
        raise ValueError("need a positive value")
    k = 0
    while Fraction(1, 1 << k) > x:
        k += 1
    value = Fraction(1, 1 << k)
    while value * 2 <= x:
        value *= 2
    return value


def _round_to_step(x: Fraction, step: Fraction) -> Fraction:
    return Fraction(round(x / step)) * step


def _imul_point(t: Fraction, iv: Interval) -> Interval:
    a, b = t * iv[0], t * iv[1]
    return (a, b) if a <= b else (b, a)


def _imul_range(t1: Fraction, t2: Fraction, iv: Interval) -> Interval:
    corners = (t1 * iv[0], t1 * iv[1], t2 * iv[0], t2 * iv[1])
    return min(corners), max(corners)


def _iabs_lower(iv: Interval) -> Fraction:
    if iv[0] <= 0 <= iv[1]:
        return Fraction(0)
    return min(abs(iv[0]), abs(iv[1]))


def _iabs_upper(iv: Interval) -> Fraction:
    return max(abs(iv[0]), abs(iv[1]))


class _LeafGeometry:
    """Coordinate-space view of the leaf torus with exact and float layers."""

    def __init__(self, data: ResonanceData) -> None:
        self.data = data
        self.d = data.d
        self.n = data.n
        self.basis = data.lattice.basis
        self.snapshot = constant_snapshot(data.coords, _SNAPSHOT_WIDTH)
        self.coord_iv: list[Interval] = [
            scalar_interval(c, self.snapshot) for c in data.coords
        ]
        self.coord_f = np.array(
            [float((lo + hi) / 2) for lo, hi in self.coord_iv], dtype=np.float64
        )
        self.basis_f = np.array(self.basis, dtype=np.float64)
        self.identity = data.lattice == IntLattice.standard(data.n)
        # covering constant: |u B|_sup <= c_net * |u|_sup
        self.c_net = max(
            sum(abs(self.basis[i][j]) for i in range(self.d)) for j in range(self.n)
        )
        # |c|_sup <= rho * |c B|_sup (column l1 norms of the pseudo-inverse)
        ginv = rational_inverse(gram_matrix(data.lattice))
        self.rho = max(
            sum(
                abs(
                    sum(Fraction(self.basis[k][j]) * ginv[k][i] for k in range(self.d))
                )
                for j in range(self.n)
            )
            for i in range(self.d)
        )
        # Lipschitz constant of t -> t alpha in the ambient sup norm
        self.speed_upper = rational_enclosure(data.scale, Fraction(1, 64))[1]
        self.offsets = (
            None
            if self.identity
            else [
                tuple(bits)
                for bits in np.ndindex(*([2] * self.d))
            ]
        )
        # The float layer is exact-input: sample times are dyadic, grid sides
        # are powers of two, and the flow coordinates are snapshot midpoints
        # rounded to floats (error <= |a| 2^-52).  Products and sums then
        # carry at most a handful of half-ulp roundings each, so per-distance
        # the total float error is below speed*(T+2)*(c_net+1)*2^-48; scan
        # verdicts stay certified by comparing against thresholds shifted by
        # this slack, with exact fallbacks inside the band.
        self._slack_unit = 2.0**-48 * (self.c_net + 1) * 4.0

    def float_slack(self, horizon: Fraction) -> float:
        return (float(horizon) * float(self.speed_upper) + 2.0) * self._slack_unit

    # -- float layer -------------------------------------------------------

    def _offset_ring(self, claim_limit: Fraction) -> list[tuple[int, ...]] | None:
        """Integer translate offsets making block values true distances.

        With offsets covering every translate within coordinate slack
        rho*claim_limit of the unit cell, a block value v satisfies: v is the
        exact torus distance whenever v <= claim_limit, and the true distance
        also exceeds claim_limit whenever v does.  Lower-bound claims up to
        claim_limit are then sound.
        """
        if self.identity:
            return None
        reach = math.floor(self.rho * claim_limit)
        span = range(-reach, reach + 2)
        return [tuple(z) for z in itertools.product(span, repeat=self.d)]

    def _distance_block(
        self,
        times: np.ndarray,
        grid: np.ndarray,
        offsets: list[tuple[int, ...]] | None,
    ) -> np.ndarray:
        """Torus distances (times x grid) in exact-input float arithmetic."""
        fracs = []
        for i in range(self.d):
            ti = times[:, None] * self.coord_f[i] - grid[None, :, i]
            np.subtract(ti, np.floor(ti), out=ti)
            fracs.append(ti)
        if self.identity:
            acc = np.minimum(fracs[0], 1.0 - fracs[0])
            for i in range(1, self.d):
                np.maximum(acc, np.minimum(fracs[i], 1.0 - fracs[i]), out=acc)
            return acc
        best = None
        for z in offsets:
            val = None
            for j in range(self.n):
                wj = None
                for i in range(self.d):
                    term = (fracs[i] - z[i]) * float(self.basis[i][j])
                    wj = term if wj is None else wj + term
                np.abs(wj, out=wj)
                val = wj if val is None else np.maximum(val, wj)
            best = val if best is None else np.minimum(best, val)
        return best

    def scan(
        self,
        horizon: Fraction,
        step: Fraction,
        grid: np.ndarray,
        target: float,
        offsets: list[tuple[int, ...]] | None,
    ) -> tuple[list[Fraction], np.ndarray, np.ndarray, np.ndarray]:
        """Per grid point: first sample below `target`, float min, and argmin."""
        count = math.floor(horizon / step)
        times = [k * step for k in range(count + 1)]
        if times[-1] < horizon:
            times.append(horizon)
        times_f = np.array([float(t) for t in times], dtype=np.float64)
        total = len(times)
        points = grid.shape[0]
        hit = np.full(points, -1, dtype=np.int64)
        min_dist = np.full(points, np.inf, dtype=np.float64)
        argmin = np.zeros(points, dtype=np.int64)
        for g0 in range(0, points, _GRID_CHUNK):
            gslice = slice(g0, min(g0 + _GRID_CHUNK, points))
            gchunk = grid[gslice]
            pending = np.ones(gchunk.shape[0], dtype=bool)
            dchunk = min_dist[gslice]
            achunk = argmin[gslice]
            hchunk = hit[gslice]
            for s0 in range(0, total, _SAMPLE_CHUNK):
                block = self._distance_block(
                    times_f[s0 : s0 + _SAMPLE_CHUNK], gchunk, offsets
                )
                block_min = block.min(axis=0)
                better = block_min < dchunk
                if better.any():
                    achunk[better] = s0 + block.argmin(axis=0)[better]
                    dchunk[better] = block_min[better]
                mask = block <= target
                fresh = mask.any(axis=0) & pending
                if fresh.any():
                    hchunk[fresh] = s0 + mask[:, fresh].argmax(axis=0)
                    pending &= ~fresh
                if not pending.any():
                    break  # min/argmin stay partial only for hit points
        return times, hit, min_dist, argmin

    # -- exact layer ---------------------------------------------------------

    def _coord_intervals_at(self, t: Fraction, u: Sequence[Fraction]) -> list[Interval]:
        out = []
        for i in range(self.d):
            lo, hi = _imul_point(t, self.coord_iv[i])
            out.append((lo - u[i], hi - u[i]))
        return out

    def _ambient_upper(self, c: Sequence[Interval], z: Sequence[int]) -> Fraction:
        worst = Fraction(0)
        for j in range(self.n):
            lo = hi = Fraction(0)
            for i in range(self.d):
                b = self.basis[i][j]
                if not b:
                    continue
                if b > 0:
                    lo += (c[i][0] - z[i]) * b
                    hi += (c[i][1] - z[i]) * b
                else:
                    lo += (c[i][1] - z[i]) * b
                    hi += (c[i][0] - z[i]) * b
            worst = max(worst, _iabs_upper((lo, hi)))
        return worst

    def _ambient_lower(self, c: Sequence[Interval], z: Sequence[int]) -> Fraction:
        worst = Fraction(0)
        for j in range(self.n):
            lo = hi = Fraction(0)
            for i in range(self.d):
                b = self.basis[i][j]
                if not b:
                    continue
                if b > 0:
                    lo += (c[i][0] - z[i]) * b
                    hi += (c[i][1] - z[i]) * b
                else:
                    lo += (c[i][1] - z[i]) * b
                    hi += (c[i][0] - z[i]) * b
            worst = max(worst, _iabs_lower((lo, hi)))
        return worst

    def point_upper(self, t: Fraction, u: Sequence[Fraction]) -> Fraction:
        """Certified upper bound for the torus distance from u to the orbit point at t."""
        c = self._coord_intervals_at(t, u)
        rounded = [round((lo + hi) / 2) for lo, hi in c]
        if self.identity:
            return self._ambient_upper(c, rounded)
        best = None
        for shifts in np.ndindex(*([3] * self.d)):
            z = [r + s - 1 for r, s in zip(rounded, shifts)]
            value = self._ambient_upper(c, z)
            if best is None or value < best:
                best = value
        return best

    def segment_lower(
        self, t1: Fraction, t2: Fraction, u: Sequence[Fraction], radius: Fraction
    ) -> Fraction | None:
        """Certified lower bound for the distance over the whole time segment.

        Lattice translates outside the coordinate slack rho*radius sit
        strictly farther than `radius` by the norm comparison, so only
        translates inside it are evaluated; the result is min(evaluated,
        radius).  None means the segment is too wide to bound (caller
        splits).
        """
        c = []
        for i in range(self.d):
            lo, hi = _imul_range(t1, t2, self.coord_iv[i])
            c.append((lo - u[i], hi - u[i]))
        slack = self.rho * radius
        ranges = []
        combos = 1
        for i in range(self.d):
            z_lo = math.ceil(c[i][0] - slack)
            z_hi = math.floor(c[i][1] + slack)
            ranges.append(range(z_lo, z_hi + 1))
            combos *= max(0, z_hi - z_lo + 1)
            if combos > 512:
                return None
        best = radius
        for z in itertools.product(*ranges):
            value = self._ambient_lower(c, z)
            if value < best:
                best = value
                if best == 0:
                    break
        return best



# ---------------------------------------------------------------------------
# density verdicts


class DensityStatus(enum.Enum):
    DENSE = "dense"
    NOT_DENSE = "not_dense"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class DensityVerdict:
    status: DensityStatus
    horizon: Fraction
    delta: Fraction
    covering: Fraction
    grid_side: int
    witness: tuple[Fraction, ...] | None = None
    witness_lower: Fraction | None = None
    note: str = ""


@dataclass(frozen=True)
class OrbitSegment:
    """Finite orbit piece from the origin up to a time horizon."""

    data: ResonanceData
    horizon: Fraction

    def distance_to(self, point: Sequence[Fraction], width: Fraction) -> DyadicInterval:
        return distance_to_orbit(self.data, self.horizon, point, width)

    def is_delta_dense(self, delta: Fraction, epsilon: Fraction | None = None) -> DensityVerdict:
        return is_delta_dense(self.data, self.horizon, delta, epsilon)


def _grid_side(c_net: int, covering_target: Fraction) -> int:
    """Power-of-two grid side whose covering radius is at most the target.

    Power-of-two sides make every grid coordinate an exact float, keeping
    the float layer's inputs exact.
    """
    needed = Fraction(c_net) / (2 * covering_target)
    side = 1
    while side < needed:
        side *= 2
    return side


def _grid_arrays(geometry: _LeafGeometry, side: int) -> np.ndarray:
    axes = [np.arange(side, dtype=np.float64) / side for _ in range(geometry.d)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _grid_point(side: int, flat_index: int, d: int) -> tuple[Fraction, ...]:
    # row-major decode (last axis fastest), matching the meshgrid stacking
    coords = []
    idx = flat_index
    for axis in range(d):
        stride = side ** (d - 1 - axis)
        coords.append(Fraction(idx // stride, side))
        idx %= stride
    return tuple(coords)


def _density_verdict(
    geometry: _LeafGeometry,
    horizon: Fraction,
    delta: Fraction,
    covering_target: Fraction,
) -> DensityVerdict:
    side = _grid_side(geometry.c_net, covering_target)
    if side**geometry.d > _GRID_CAP:
        raise ValueError(
            f"certification grid {side}^{geometry.d} exceeds the desk-scale cap"
        )
    covering = Fraction(geometry.c_net, 2 * side)
    threshold = delta - covering
    if threshold <= 0:
        return DensityVerdict(
            DensityStatus.UNKNOWN,
            horizon,
            delta,
            covering,
            side,
            note="grid margin at least delta; refine epsilon",
        )
    step = _dyadic_at_most(covering / (2 * geometry.speed_upper))
    grid = _grid_arrays(geometry, side)
    slack = geometry.float_slack(horizon)
    slack_fr = Fraction(slack)
    # Lower-bound claims never exceed delta; the translate ring must stay
    # sound a little past that (Lipschitz and slack corrections).
    claim_limit = delta + covering
    offsets = geometry._offset_ring(claim_limit)
    # A float value below threshold - slack is already certified (the scan's
    # inputs are exact floats and its rounding error stays below `slack`);
    # only points inside the slack band need exact interval evaluation.
    target = float(threshold) - 2 * slack

    # Coarse-to-fine sampling: most points hit long before the Lipschitz
    # step is needed; only the leftovers pay for the fine pass.
    total = grid.shape[0]
    pending = np.arange(total)
    min_dist = np.full(total, np.inf)
    best_time: dict[int, Fraction] = {}
    for tier_step in (step * 16, step):
        if tier_step != step and tier_step * 4 > max(horizon, step):
            continue
        times, hit, tier_min, tier_arg = geometry.scan(
            horizon, tier_step, grid[pending], target, offsets
        )
        better = tier_min < min_dist[pending]
        idx_better = pending[better]
        min_dist[idx_better] = tier_min[better]
        for local in np.flatnonzero(better):
            best_time[int(pending[local])] = times[int(tier_arg[local])]
        pending = pending[hit < 0]
        if pending.size == 0:
            break

    if pending.size <= max(64, total // 16):
        failed = False
        for flat in pending:
            u = _grid_point(side, int(flat), geometry.d)
            t_hat = best_time[int(flat)]
            ok = geometry.point_upper(t_hat, u) <= threshold
            if not ok:
                for wiggle in (step / 2, -step / 2, step / 4, -step / 4):
                    t_try = t_hat + wiggle
                    if 0 <= t_try <= horizon and geometry.point_upper(t_try, u) <= threshold:
                        ok = True
                        break
            if not ok:
                failed = True
                break
        if not failed:
            return DensityVerdict(
                DensityStatus.DENSE, horizon, delta, covering, side
            )

    if pending.size:
        # The orbit map t -> t*alpha is speed-Lipschitz in the quotient
        # metric and the fine samples are step-dense in [0, horizon], so the
        # true distance of a non-hit point is at least its sampled minimum
        # (capped at the translate ring's soundness limit) minus float slack
        # minus speed*step/2.
        worst = int(pending[np.argmax(min_dist[pending])])
        lipschitz = geometry.speed_upper * step / 2
        sampled = min(Fraction(float(min_dist[worst])), claim_limit)
        lower = sampled - slack_fr - lipschitz
        if lower > delta:
            return DensityVerdict(
                DensityStatus.NOT_DENSE,
                horizon,
                delta,
                covering,
                side,
                witness=_grid_point(side, worst, geometry.d),
                witness_lower=lower,
            )
    return DensityVerdict(
        DensityStatus.UNKNOWN,
        horizon,
        delta,
        covering,
        side,
        note="between certification margins; refine epsilon",
    )


def is_delta_dense(
    data: ResonanceData,
    horizon: Fraction | int,
    delta: Fraction,
    epsilon: Fraction | None = None,
) -> DensityVerdict:
    """Three-valued certified density check of the orbit segment [0, horizon].

    `epsilon` is the target grid covering radius in the ambient sup metric
    (default delta / 8).  DENSE and NOT_DENSE verdicts are certified with
    explicit margins; UNKNOWN asks for a finer epsilon.
    """
    horizon = Fraction(horizon)
    delta = Fraction(delta)
    if horizon < 0:
        raise DomainError("horizon must be nonnegative")
    if delta <= 0:
        raise DomainError("delta must be positive")
    eps = Fraction(epsilon) if epsilon is not None else delta / 8
    if eps <= 0:
        raise DomainError("epsilon must be positive")
    return _density_verdict(_LeafGeometry(data), horizon, delta, eps)


# ---------------------------------------------------------------------------
# distance to an orbit segment


def distance_to_orbit(
    data: ResonanceData,
    horizon: Fraction | int,
    point: Sequence[Fraction],
    width: Fraction,
) -> DyadicInterval:
    """Certified enclosure of the torus distance from `point` to the segment.

    `point` is given in lattice-basis coordinates.  Branch-and-bound over
    time with exact interval evaluation; terminates once the enclosure is
    narrower than `width`.
    """
    horizon = Fraction(horizon)
    width = Fraction(width)
    if horizon < 0:
        raise DomainError("horizon must be nonnegative")
    if width <= 0:
        raise ValueError("width must be positive")
    geometry = _LeafGeometry(data)
    u = tuple(Fraction(x) for x in point)
    if len(u) != geometry.d:
        raise DomainError(f"point must have {geometry.d} leaf coordinates")

    upper = geometry.point_upper(Fraction(0), u)
    probes = 8
    for k in range(1, probes + 1):
        upper = min(upper, geometry.point_upper(horizon * k / probes, u))

    if horizon == 0:
        lb = geometry.segment_lower(Fraction(0), Fraction(0), u, upper)
        lower = min(lb if lb is not None else Fraction(0), upper)
        return DyadicInterval.outward(max(lower, Fraction(0)), upper, _grid_exponent(width))

    # Invariant: the true minimum lies in [min(heap lbs + stuck lbs), upper].
    heap: list[tuple[Fraction, Fraction, Fraction]] = [(Fraction(0), Fraction(0), horizon)]
    stuck: list[Fraction] = []
    min_width = _dyadic_at_most(
        width / (16 * geometry.speed_upper * max(1, geometry.c_net))
    )
    nodes = 0
    lower = Fraction(0)
    while heap:
        lb, t1, t2 = heapq.heappop(heap)
        lower = min([lb] + stuck)
        if upper - lower <= width:
            break
        if t2 - t1 <= min_width:
            stuck.append(lb)
            continue
        mid = (t1 + t2) / 2
        upper = min(upper, geometry.point_upper(mid, u))
        for a, b in ((t1, mid), (mid, t2)):
            child = geometry.segment_lower(a, b, u, upper)
            if child is None:
                child = lb
            heapq.heappush(heap, (max(child, lb), a, b))
        nodes += 1
        if nodes > 200_000:
            raise RuntimeError("distance refinement did not converge")
    else:
        lower = min(stuck) if stuck else upper
    lower = max(min(lower, upper), Fraction(0))
    if upper - lower > width:
        raise RuntimeError(
            "certified enclosure stalled above the requested width; "
            "the time subdivision floor was reached"
        )
    return DyadicInterval.outward(lower, upper, _grid_exponent(width))


# ---------------------------------------------------------------------------
# ergodization brackets


@dataclass(frozen=True)
class ErgodizationBracket:
    delta: Fraction
    t_lo: Fraction
    t_hi: Fraction
    tol: Fraction
    covering: Fraction
    trail: tuple[DensityVerdict, ...]

    @property
    def width(self) -> Fraction:
        return self.t_hi - self.t_lo


def ergodization_time_bracket(
    data: ResonanceData,
    delta: Fraction,
    tol: Fraction | None = None,
    epsilon: Fraction | None = None,
    refine_cap: int = 3,
) -> ErgodizationBracket:
    """Certified bracket [T-, T+] around the delta-ergodization time.

    The segment at T+ is certified dense and the one at T- certified not
    dense (or T- = 0).  The search doubles the horizon from 1 until a dense
    probe appears (the main inequality's bound caps the doubling when delta
    satisfies its hypothesis), then bisects; UNKNOWN probes trigger grid
    refinement and, failing that, off-center probe points.
    """
    delta = Fraction(delta)
    if delta <= 0:
        raise DomainError("delta must be positive")
    geometry = _LeafGeometry(data)
    base_eps = Fraction(epsilon) if epsilon is not None else delta / 8
    trail: list[DensityVerdict] = []

    def probe(T: Fraction) -> DensityVerdict:
        # refinement is probe-local: an UNKNOWN band at one horizon must not
        # saddle every later probe with a needlessly fine grid
        eps = base_eps
        verdict = None
        for _ in range(refine_cap + 1):
            side = _grid_side(geometry.c_net, eps)
            if verdict is not None and side**geometry.d > _GRID_CAP:
                break
            verdict = _density_verdict(geometry, T, delta, eps)
            trail.append(verdict)
            if verdict.status is not DensityStatus.UNKNOWN:
                return verdict
            eps /= 2
        return verdict

    v0 = probe(Fraction(0))
    if v0.status is DensityStatus.DENSE:
        return ErgodizationBracket(
            delta, Fraction(0), Fraction(0), tol or Fraction(0), v0.covering, tuple(trail)
        )

    cap: Fraction | None = None
    if delta <= theorem1_delta_max(data):
        cap = theorem1_bound(data, delta).interval(Fraction(1, 1024)).upper

    lo = Fraction(0)
    horizon = Fraction(1)
    hi: Fraction | None = None
    hi_verdict: DensityVerdict | None = None
    while hi is None:
        at_cap = cap is not None and horizon >= cap
        target = cap if at_cap else horizon
        verdict = probe(target)
        if verdict.status is DensityStatus.DENSE:
            hi = target
            hi_verdict = verdict
        elif verdict.status is DensityStatus.NOT_DENSE:
            if at_cap:
                raise RuntimeError(
                    "orbit certified not dense at the proven bound; implementation bug"
                )
            lo = target
            horizon *= 2
        else:
            # unknown even after refinement: a longer orbit is denser and
            # easier to certify (the bound is no longer a useful cap then)
            if at_cap:
                cap = None
            horizon *= 2
        if horizon > Fraction(1 << 40):
            raise RuntimeError("ergodization horizon search ran away")

    if tol is None:
        tol = hi / 100 if hi else Fraction(1, 100)
    tol = Fraction(tol)
    if tol <= 0:
        raise DomainError("tol must be positive")

    while hi - lo > tol:
        step = _dyadic_at_most(tol / 8)
        mid = _round_to_step(lo + (hi - lo) / 2, step)
        if not lo < mid < hi:
            mid = lo + (hi - lo) / 2
        verdict = probe(mid)
        if verdict.status is DensityStatus.DENSE:
            hi, hi_verdict = mid, verdict
            continue
        if verdict.status is DensityStatus.NOT_DENSE:
            lo = mid
            continue
        for shift in (Fraction(3, 7), Fraction(4, 7), Fraction(2, 5), Fraction(3, 5)):
            other = lo + (hi - lo) * shift
            verdict = probe(other)
            if verdict.status is DensityStatus.DENSE:
                hi, hi_verdict = other, verdict
                break
            if verdict.status is DensityStatus.NOT_DENSE:
                lo = other
                break
        else:
            break  # stuck inside the uncertainty band; return what is certified
    assert hi_verdict is not None
    return ErgodizationBracket(delta, lo, hi, tol, hi_verdict.covering, tuple(trail))


# ---------------------------------------------------------------------------
# the main inequality and its constructive form


@dataclass(frozen=True)
class Theorem1Bound:
    """Upper bound C * Psi(2 C / delta) with C = d^2 d! C_alpha."""

    c_d_alpha: int
    delta: Fraction
    profile: PsiValue

    def interval(self, width: Fraction = Fraction(1, 1 << 30)) -> DyadicInterval:
        box = enclose_reciprocal(self.profile.gap, width / self.c_d_alpha)
        return DyadicInterval(self.c_d_alpha * box.lower, self.c_d_alpha * box.upper)

    def dominates(self, t: Fraction) -> bool:
        """Exact test t <= C / gap."""
        return sign(RealScalar.from_rational(self.c_d_alpha) - Fraction(t) * self.profile.gap) >= 0

    def __float__(self) -> float:
        return float(self.interval().midpoint)


def theorem1_bound(data: ResonanceData, delta: Fraction) -> Theorem1Bound:
    delta = Fraction(delta)
    delta_max = theorem1_delta_max(data)
    if not 0 < delta <= delta_max:
        raise DomainError(
            f"delta={delta} violates the hypothesis 0 < delta <= "
            f"d^2/((n+2) Q_alpha) = {delta_max}"
        )
    c_d_alpha = data.d**2 * math.factorial(data.d) * data.c_alpha
    profile = psi(data, 2 * c_d_alpha / delta)
    return Theorem1Bound(c_d_alpha=c_d_alpha, delta=delta, profile=profile)


@dataclass(frozen=True)
class HitResult:
    t_star: Fraction
    coefficients: tuple[Fraction, ...]
    residual: DyadicInterval
    within_delta: bool
    within_bound: bool
    bound: Theorem1Bound
    approximation: PeriodicApproximation


def constructive_hit(
    data: ResonanceData,
    delta: Fraction,
    point: Sequence[Fraction],
) -> HitResult:
    """Reach `point` (leaf coordinates) within delta along the flow.

    Follows the constructive argument: express the target in the basis of
    periodic-approximation numerators at radius d^2/delta, reduce the
    coefficients to [0,1), and certify the residual exactly.
    """
    delta = Fraction(delta)
    bound = theorem1_bound(data, delta)  # validates the hypothesis
    u = tuple(Fraction(x) for x in point)
    if len(u) != data.d:
        raise DomainError(f"point must have {data.d} leaf coordinates")
    radius = Fraction(data.d**2) / delta
    approximation = find_periodic_basis(data, radius)
    pairs = approximation.pairs
    numerators = [list(p) for _, p in pairs]

    ambient = [
        sum(u[i] * data.lattice.basis[i][j] for i in range(data.d))
        for j in range(data.n)
    ]
    t_raw = solve_left(numerators, ambient)
    t_frac = tuple(t - math.floor(t) for t in t_raw)
    t_star = sum(tf * q for tf, (q, _) in zip(t_frac, pairs))

    residual_vec: list[RealScalar] = []
    for j in range(data.n):
        acc = RealScalar.zero()
        for tf, (q, p) in zip(t_frac, pairs):
            acc = acc + tf * (q * data.alpha[j] - Fraction(p[j]))
        residual_vec.append(acc)

    within = True
    lo_all = Fraction(0)
    hi_all = Fraction(0)
    for component in residual_vec:
        if sign(component - delta) > 0 or sign(component + delta) < 0:
            within = False
        lo, hi = rational_enclosure(component, Fraction(1, 1 << 40))
        lo_all = max(lo_all, _iabs_lower((lo, hi)))
        hi_all = max(hi_all, _iabs_upper((lo, hi)))

    residual = DyadicInterval.outward(lo_all, hi_all, _grid_exponent(Fraction(1, 1 << 38)))
    return HitResult(
        t_star=t_star,
        coefficients=t_frac,
        residual=residual,
        within_delta=within,
        within_bound=bound.dominates(t_star),
        bound=bound,
        approximation=approximation,
    )


# ---------------------------------------------------------------------------
# Diophantine majorant


def rational_power_interval(
    base: Fraction, exponent: Fraction, width: Fraction
) -> Interval:
    """Enclosure of base**exponent for positive rational base."""
    if base <= 0:
        raise ValueError("base must be positive")
    a, b = exponent.numerator, exponent.denominator
    power = base**a
    if b == 1:
        return power, power
    lo, hi = (power, Fraction(1)) if power < 1 else (Fraction(1), power)
    while hi - lo > width:
        mid = (lo + hi) / 2
        if mid**b <= power:
            lo = mid
        else:
            hi = mid
    return lo, hi


@dataclass(frozen=True)
class DiophantineReport:
    gamma: Fraction
    tau: Fraction
    delta: Fraction
    check_radius: int
    bound_interval: DyadicInterval
    gamma_hat_interval: DyadicInterval


def _product_interval(
    gap_scalar: RealScalar, norm_power: Interval, width: Fraction
) -> Interval:
    request = width
    while True:
        lo, hi = rational_enclosure(gap_scalar, request)
        lo = max(lo, Fraction(0))
        plo = lo * norm_power[0]
        phi = hi * norm_power[1]
        if phi - plo <= width:
            return plo, phi
        request /= 4


def diophantine_bound(
    data: ResonanceData,
    gamma: Fraction,
    tau: Fraction,
    delta: Fraction,
    check_radius: int | None = None,
    width: Fraction = Fraction(1, 1 << 24),
) -> DiophantineReport:
    """Main-inequality bound with the profile replaced by its majorant gamma^-1 Q^tau.

    The claimed pair (gamma, tau) is tested against enumeration: gamma_hat(Q)
    = min |k . alpha| |k|^tau over nonzero resonance vectors with |k| <= Q.
    Pairs falsified on the enumerated range are rejected.
    """
    gamma = Fraction(gamma)
    tau = Fraction(tau)
    delta = Fraction(delta)
    if gamma <= 0:
        raise DomainError("gamma must be positive")
    if tau < data.n - 1:
        raise DomainError(f"tau must be at least n - 1 = {data.n - 1}")
    bound = theorem1_bound(data, delta)  # validates delta hypothesis
    formula_radius = 2 * bound.c_d_alpha / delta
    if check_radius is None:
        check_radius = min(math.floor(formula_radius), 64)
    check_radius = max(check_radius, data.q_alpha)

    vectors = enumerate_in_box(data.lattice, check_radius)
    arr = np.array(vectors, dtype=np.float64)
    alpha_f = np.array(data.alpha_floats())
    norms = np.abs(arr).max(axis=1)
    products = np.abs(arr @ alpha_f) * norms ** float(tau)
    best = float(products.min())
    shortlist_idx = np.flatnonzero(products <= best * (1.0 + 1e-6) + 1e-12)

    gamma_hat: Interval | None = None
    for idx in shortlist_idx[:256]:
        k = vectors[int(idx)]
        gap = dot(k, data.alpha)
        if sign(gap) < 0:
            gap = -gap
        norm_pow = rational_power_interval(
            Fraction(int(max(abs(x) for x in k))), tau, width / 4
        )
        prod = _product_interval(gap, norm_pow, width / 2)
        if gamma_hat is None:
            gamma_hat = prod
        else:
            gamma_hat = (min(gamma_hat[0], prod[0]), min(gamma_hat[1], prod[1]))
    assert gamma_hat is not None

    # falsification: some enumerated vector has |k.alpha| |k|^tau < gamma
    if gamma_hat[1] < gamma:
        raise DiophantineConditionError(
            f"gamma={gamma} is falsified by enumeration up to |k| <= {check_radius}: "
            f"gamma_hat <= {float(gamma_hat[1]):.6g}",
            gamma_hat_upper=gamma_hat[1],
        )

    power = rational_power_interval(2 * bound.c_d_alpha / delta, tau, width)
    factor = Fraction(bound.c_d_alpha) / gamma
    grid = _grid_exponent(width)
    return DiophantineReport(
        gamma=gamma,
        tau=tau,
        delta=delta,
        check_radius=check_radius,
        bound_interval=DyadicInterval.outward(factor * power[0], factor * power[1], grid),
        gamma_hat_interval=DyadicInterval.outward(gamma_hat[0], gamma_hat[1], grid),
    )

"""Exact integer lattice linear algebra.

Everything here is computed over arbitrary-precision integers or rationals:
row Hermite normal form as the canonical basis (two lattices are equal iff
their HNF bases agree), integer kernels (always saturated), orthogonal
integer complements, Gram determinants, box enumeration, successive minima
for the sup and l1 norms, dual bases, and the transference inequality check
pairing the sup-norm box with its polar body.

numpy is used only to speed up exhaustive integer enumeration (int64, with
an explicit overflow guard); all decisions stay exact.
"""

from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

IntVec = tuple[int, ...]
IntRows = tuple[IntVec, ...]

# Coefficient boxes larger than this are refused rather than enumerated.
_ENUM_LIMIT = 30_000_000


def _as_rows(matrix: Sequence[Sequence[int]]) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in matrix]
    if rows:
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise ValueError("ragged matrix")
    return rows


def hnf(matrix: Sequence[Sequence[int]]) -> IntRows:
    """Row Hermite normal form (row space preserved, canonical).

    Pivots are positive, entries above a pivot are reduced into [0, pivot),
    and zero rows sink to the bottom.
    """
    rows = _as_rows(matrix)
    if not rows:
        return ()
    m, n = len(rows), len(rows[0])
    row = 0
    for col in range(n):
        if row == m:
            break
        while True:
            nonzero = [i for i in range(row, m) if rows[i][col] != 0]
            if not nonzero:
                break
            best = min(nonzero, key=lambda i: (abs(rows[i][col]), i))
            rows[row], rows[best] = rows[best], rows[row]
            pivot = rows[row][col]
            done = True
            for i in range(row + 1, m):
                if rows[i][col]:
                    q = rows[i][col] // pivot
                    rows[i] = [a - q * b for a, b in zip(rows[i], rows[row])]
                    if rows[i][col]:
                        done = False
            if done:
                break
        if rows[row][col] == 0:
            continue
        if rows[row][col] < 0:
            rows[row] = [-a for a in rows[row]]
        pivot = rows[row][col]
        for i in range(row):
            q = rows[i][col] // pivot
            if q:
                rows[i] = [a - q * b for a, b in zip(rows[i], rows[row])]
        row += 1
    return tuple(tuple(r) for r in rows)


def _nonzero_rows(rows: IntRows) -> IntRows:
    return tuple(r for r in rows if any(r))


@dataclass(frozen=True)
class IntLattice:
    """Sublattice of Z^ambient with a canonical HNF row basis."""

    ambient: int
    basis: IntRows

    def __post_init__(self) -> None:
        if self.ambient < 1:
            raise ValueError("ambient dimension must be >= 1")
        for row in self.basis:
            if len(row) != self.ambient:
                raise ValueError("basis row of wrong length")
            if not any(row):
                raise ValueError("basis contains a zero row")

    @staticmethod
    def from_rows(ambient: int, rows: Sequence[Sequence[int]]) -> "IntLattice":
        reduced = _nonzero_rows(hnf(rows)) if rows else ()
        return IntLattice(ambient, reduced)

    @staticmethod
    def standard(ambient: int) -> "IntLattice":
        eye = tuple(
            tuple(1 if i == j else 0 for j in range(ambient)) for i in range(ambient)
        )
        return IntLattice(ambient, eye)

    @staticmethod
    def zero(ambient: int) -> "IntLattice":
        return IntLattice(ambient, ())

    @property
    def rank(self) -> int:
        return len(self.basis)

    def contains(self, vector: Sequence[int]) -> bool:
        """Exact membership via back-substitution against the HNF basis."""
        if len(vector) != self.ambient:
            raise ValueError("vector of wrong length")
        rem = [int(x) for x in vector]
        for row in self.basis:
            col = next(j for j, x in enumerate(row) if x)
            q, r = divmod(rem[col], row[col])
            if r:
                return False
            if q:
                rem = [a - q * b for a, b in zip(rem, row)]
        return not any(rem)

    def __str__(self) -> str:
        return f"IntLattice(Z^{self.ambient}, rank {self.rank})"


def integer_kernel(matrix: Sequence[Sequence[int]], ambient: int | None = None) -> IntLattice:
    """All integer vectors k with (matrix) @ k = 0, as a saturated lattice.

    `ambient` (the length of k) is needed explicitly when the matrix has no
    rows, in which case the kernel is all of Z^ambient.
    """
    rows = _as_rows(matrix)
    if not rows:
        if ambient is None:
            raise ValueError("ambient dimension required for an empty matrix")
        return IntLattice.standard(ambient)
    r = len(rows)
    n = len(rows[0])
    if ambient is not None and ambient != n:
        raise ValueError("ambient dimension disagrees with matrix width")
    # Row-reduce [M^T | I]; rows whose M^T part vanishes carry a kernel basis
    # in the identity part (their row of the unimodular transform).
    augmented = [
        [rows[j][i] for j in range(r)] + [1 if k == i else 0 for k in range(n)]
        for i in range(n)
    ]
    reduced = hnf(augmented)
    kernel_rows = [row[r:] for row in reduced if not any(row[:r])]
    return IntLattice.from_rows(n, kernel_rows)


def orthogonal_integer_complement(lattice: IntLattice) -> IntLattice:
    """{m in Z^n : m.k = 0 for every k in the lattice}, always saturated."""
    if lattice.rank == 0:
        return IntLattice.standard(lattice.ambient)
    return integer_kernel(lattice.basis, lattice.ambient)


def _det_bareiss(matrix: Sequence[Sequence[int]]) -> int:
    rows = [list(r) for r in matrix]
    n = len(rows)
    if n == 0:
        return 1
    sign_acc = 1
    prev = 1
    for k in range(n - 1):
        if rows[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if rows[i][k]), None)
            if swap is None:
                return 0
            rows[k], rows[swap] = rows[swap], rows[k]
            sign_acc = -sign_acc
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                rows[i][j] = (rows[i][j] * rows[k][k] - rows[i][k] * rows[k][j]) // prev
            rows[i][k] = 0
        prev = rows[k][k]
    return sign_acc * rows[n - 1][n - 1]


def gram_matrix(lattice: IntLattice) -> IntRows:
    b = lattice.basis
    return tuple(tuple(sum(x * y for x, y in zip(u, v)) for v in b) for u in b)


def gram_det(lattice: IntLattice) -> int:
    """Determinant of the basis Gram matrix (squared covolume, an integer)."""
    if lattice.rank == 0:
        raise ValueError("gram_det undefined for the zero lattice")
    value = _det_bareiss(gram_matrix(lattice))
    assert value > 0
    return value


# ---------------------------------------------------------------------------
# rational linear algebra helpers (exact, Fraction based)


def rational_rank(rows: Sequence[Sequence[Fraction | int]]) -> int:
    work = [[Fraction(x) for x in row] for row in rows]
    rank = 0
    cols = len(work[0]) if work else 0
    for col in range(cols):
        pivot = next((i for i in range(rank, len(work)) if work[i][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        inv = 1 / work[rank][col]
        work[rank] = [x * inv for x in work[rank]]
        for i in range(len(work)):
            if i != rank and work[i][col]:
                factor = work[i][col]
                work[i] = [x - factor * y for x, y in zip(work[i], work[rank])]
        rank += 1
    return rank


def rational_inverse(matrix: Sequence[Sequence[Fraction | int]]) -> list[list[Fraction]]:
    n = len(matrix)
    work = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
            for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((i for i in range(col, n) if work[i][col]), None)
        if pivot is None:
            raise ValueError("matrix is singular")
        work[col], work[pivot] = work[pivot], work[col]
        inv = 1 / work[col][col]
        work[col] = [x * inv for x in work[col]]
        for i in range(n):
            if i != col and work[i][col]:
                factor = work[i][col]
                work[i] = [x - factor * y for x, y in zip(work[i], work[col])]
    return [row[n:] for row in work]


def solve_left(
    matrix: Sequence[Sequence[int]],
    target: Sequence[Fraction | int],
) -> list[Fraction]:
    """Solve x @ matrix = target exactly for a full-row-rank integer matrix."""
    rows = [[Fraction(v) for v in row] for row in matrix]
    gram = [[sum(a * b for a, b in zip(u, v)) for v in rows] for u in rows]
    ginv = rational_inverse(gram)
    proj = [
        sum(Fraction(t) * v for t, v in zip(target, row)) for row in rows
    ]
    # x = target . B^T . (B B^T)^-1; verify because target may be off-span.
    x = [sum(proj[k] * ginv[k][i] for k in range(len(rows))) for i in range(len(rows))]
    for j in range(len(matrix[0])):
        if sum(x[i] * rows[i][j] for i in range(len(rows))) != Fraction(target[j]):
            raise ValueError("target is not in the row span")
    return x


def dual_basis(lattice: IntLattice) -> tuple[tuple[Fraction, ...], ...]:
    """Rows spanning the dual lattice inside span(L): (B B^T)^-1 B."""
    if lattice.rank == 0:
        raise ValueError("dual basis undefined for the zero lattice")
    ginv = rational_inverse(gram_matrix(lattice))
    b = lattice.basis
    r, n = len(b), lattice.ambient
    return tuple(
        tuple(sum(ginv[i][k] * b[k][j] for k in range(r)) for j in range(n))
        for i in range(r)
    )


# ---------------------------------------------------------------------------
# enumeration

# The canonical HNF basis can have very large entries, which would blow up
# enumeration boxes; candidate generation therefore runs over an internally
# LLL-reduced basis of the same lattice (exact rational arithmetic, tiny
# dimensions).  The reduction never leaks into canonical forms or reports.


def _gso(basis: Sequence[Sequence[int]]):
    d = len(basis)
    star: list[list[Fraction]] = []
    mu = [[Fraction(0)] * d for _ in range(d)]
    norms: list[Fraction] = []
    for i in range(d):
        v = [Fraction(x) for x in basis[i]]
        for j in range(i):
            mu[i][j] = sum(Fraction(x) * y for x, y in zip(basis[i], star[j])) / norms[j]
            v = [a - mu[i][j] * b for a, b in zip(v, star[j])]
        star.append(v)
        norms.append(sum(x * x for x in v))
    return mu, norms


@functools.lru_cache(maxsize=512)
def _reduced_basis(lattice: IntLattice) -> IntRows:
    """LLL-reduced basis (delta = 3/4) of the lattice, exact arithmetic."""
    basis = [list(r) for r in lattice.basis]
    d = len(basis)
    if d <= 1:
        return tuple(tuple(r) for r in basis)
    k = 1
    while k < d:
        mu, _ = _gso(basis)
        for j in range(k - 1, -1, -1):
            q = math.floor(mu[k][j] + Fraction(1, 2))
            if q:
                basis[k] = [a - q * b for a, b in zip(basis[k], basis[j])]
                mu, _ = _gso(basis)
        mu, norms = _gso(basis)
        if norms[k] >= (Fraction(3, 4) - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            basis[k], basis[k - 1] = basis[k - 1], basis[k]
            k = max(k - 1, 1)
    return tuple(tuple(r) for r in basis)


def _coefficient_bounds(basis: IntRows, radius: int) -> list[int]:
    """Per-coefficient bounds covering every lattice vector of sup norm <= radius."""
    r, n = len(basis), len(basis[0])
    gram = [
        [sum(x * y for x, y in zip(u, v)) for v in basis] for u in basis
    ]
    ginv = rational_inverse(gram)
    # pseudo-inverse column sums: |c_i| <= radius * sum_j |(B^T G^-1)_{j i}|
    bounds = []
    for i in range(r):
        col = Fraction(0)
        for j in range(n):
            col += abs(sum(Fraction(basis[k][j]) * ginv[k][i] for k in range(r)))
        bounds.append(math.floor(radius * col))
    return bounds


def _coefficient_grid(bounds: Sequence[int]) -> np.ndarray:
    total = 1
    for bound in bounds:
        total *= 2 * bound + 1
    if total > _ENUM_LIMIT:
        raise ValueError(f"enumeration box of size {total} exceeds the desk-scale limit")
    axes = [np.arange(-bound, bound + 1, dtype=np.int64) for bound in bounds]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def box_vector_array(lattice: IntLattice, radius: int) -> np.ndarray:
    """Nonzero lattice vectors with sup norm <= radius as an int64 array."""
    if radius < 1 or lattice.rank == 0:
        return np.empty((0, lattice.ambient), dtype=np.int64)
    basis = _reduced_basis(lattice)
    bounds = _coefficient_bounds(basis, radius)
    basis_arr = np.array(basis, dtype=np.int64)
    max_entry = int(np.abs(basis_arr).max())
    if (max(bounds, default=0) + 1) * max_entry * lattice.rank >= 2**62:
        raise ValueError("enumeration would overflow int64")
    coeffs = _coefficient_grid(bounds)
    vectors = coeffs @ basis_arr
    keep = (np.abs(vectors).max(axis=1) <= radius) & np.any(vectors != 0, axis=1)
    return vectors[keep]


def enumerate_in_box(lattice: IntLattice, radius: Fraction | int) -> IntRows:
    """All nonzero lattice vectors with sup norm <= radius, lexicographic order."""
    radius = math.floor(Fraction(radius))
    if radius < 1 or lattice.rank == 0:
        return ()
    vectors = box_vector_array(lattice, radius)
    order = np.lexsort(vectors.T[::-1])
    return tuple(tuple(int(x) for x in row) for row in vectors[order])


def _sign_normalized(vector: IntVec) -> IntVec:
    for x in vector:
        if x:
            return vector if x > 0 else tuple(-y for y in vector)
    return vector


def _norm_value(vector: IntVec, norm: str) -> int:
    if norm == "sup":
        return max(abs(x) for x in vector)
    if norm == "l1":
        return sum(abs(x) for x in vector)
    raise ValueError(f"unknown norm {norm!r}")


def shortest_vector(lattice: IntLattice, norm: str = "sup") -> tuple[IntVec, int]:
    """Nonzero lattice vector of minimal norm with deterministic tie-break."""
    if lattice.rank == 0:
        raise ValueError("shortest vector undefined for the zero lattice")
    radius = 1
    while True:
        vectors = enumerate_in_box(lattice, radius)
        if vectors:
            best = min(
                (_norm_value(v, norm), _sign_normalized(v)) for v in vectors
            )
            # sup: the box already holds every vector of smaller norm.
            # l1: vectors of l1 norm <= best also have sup norm <= best.
            if norm == "sup" or best[0] <= radius:
                return best[1], best[0]
            radius = best[0]
        else:
            radius *= 2


@dataclass(frozen=True)
class SuccessiveMinima:
    """Exact successive minima of a polyhedral norm with witnesses."""

    norm: str
    values: tuple[Fraction, ...]
    witnesses: IntRows

    def __post_init__(self) -> None:
        if any(a > b for a, b in zip(self.values, self.values[1:])):
            raise ValueError("minima must be nondecreasing")


def _greedy_independent(
    candidates: list[tuple[Fraction, IntVec]],
    rank_needed: int,
) -> tuple[list[Fraction], list[IntVec]]:
    values: list[Fraction] = []
    witnesses: list[IntVec] = []
    chosen: list[IntVec] = []
    for value, vec in sorted(candidates):
        if len(witnesses) == rank_needed:
            break
        if rational_rank(chosen + [vec]) > len(chosen):
            chosen.append(vec)
            values.append(value)
            witnesses.append(vec)
    return values, witnesses


def successive_minima(lattice: IntLattice, norm: str = "sup") -> SuccessiveMinima:
    """Exact minima by growing-radius enumeration (sup or l1 norm)."""
    if lattice.rank == 0:
        raise ValueError("successive minima undefined for the zero lattice")
    d = lattice.rank
    radius = 1
    while True:
        candidates = [
            (Fraction(_norm_value(v, norm)), _sign_normalized(v))
            for v in enumerate_in_box(lattice, radius)
        ]
        candidates = [c for c in set(candidates) if c[0] <= radius]
        values, witnesses = _greedy_independent(candidates, d)
        if len(witnesses) == d:
            return SuccessiveMinima(norm, tuple(values), tuple(witnesses))
        radius *= 2


# ---------------------------------------------------------------------------
# transference: sup-norm box against its polar body

# The primal pair is (sup-norm unit box, L), computed in ambient coordinates.
# In lattice coordinates c (v = c B) the primal body is C = {c : |c B|_sup <= 1}
# and the lattice is Z^d, which is self-dual; the dual body is the polar
# C* = conv{+-columns of B}, whose gauge is the support function of C:
# gauge(y) = max{c . y : c in C}, attained at a vertex of C.  This is the
# quotient l1 norm induced by the ambient coordinates, and it is what makes
# the rank-1 product come out exactly 1.


def _polytope_vertices(basis: IntRows) -> tuple[tuple[Fraction, ...], ...]:
    """Vertices of {c in R^d : |c . m_j| <= 1} for the columns m_j of the basis."""
    d = len(basis)
    n = len(basis[0])
    columns = [tuple(basis[i][j] for i in range(d)) for j in range(n)]
    vertices: set[tuple[Fraction, ...]] = set()
    for subset in itertools.combinations(range(n), d):
        rows = [columns[j] for j in subset]
        if rational_rank(rows) < d:
            continue
        inv = rational_inverse(rows)
        for signs in itertools.product((1, -1), repeat=d):
            vertex = tuple(
                sum(inv[i][k] * signs[k] for k in range(d)) for i in range(d)
            )
            if all(abs(sum(v * m for v, m in zip(vertex, col))) <= 1 for col in columns):
                vertices.add(max(vertex, tuple(-x for x in vertex)))
    return tuple(sorted(vertices))


def _gauge(y: Sequence[int], vertices: Sequence[Sequence[Fraction]]) -> Fraction:
    return max(abs(sum(Fraction(a) * b for a, b in zip(y, v))) for v in vertices)


def _gauge_ball_points(
    vertices: Sequence[Sequence[Fraction]],
    boxes: Sequence[int],
    limit: Fraction,
) -> Iterator[IntVec]:
    """Integer points y != 0 with gauge(y) <= limit, by DFS with pruning."""
    d = len(boxes)
    y = [0] * d
    partials = [Fraction(0)] * len(vertices)

    def rest_bound(index: int, vertex: Sequence[Fraction]) -> Fraction:
        return sum(boxes[k] * abs(vertex[k]) for k in range(index + 1, d))

    def rec(i: int) -> Iterator[IntVec]:
        lo, hi = Fraction(-boxes[i]), Fraction(boxes[i])
        for vertex, partial in zip(vertices, partials):
            if not vertex[i]:
                continue
            slack = limit + rest_bound(i, vertex)
            a = (-slack - partial) / vertex[i]
            b = (slack - partial) / vertex[i]
            lo = max(lo, min(a, b))
            hi = min(hi, max(a, b))
        if lo > hi:
            return
        for value in range(math.ceil(lo), math.floor(hi) + 1):
            y[i] = value
            saved = partials.copy()
            for t, vertex in enumerate(vertices):
                partials[t] += value * vertex[i]
            if i + 1 == d:
                if any(y) and max(abs(p) for p in partials) <= limit:
                    yield tuple(y)
            else:
                yield from rec(i + 1)
            partials[:] = saved
        y[i] = 0

    yield from rec(0)


@dataclass(frozen=True)
class TransferenceReport:
    rank: int
    primal: SuccessiveMinima
    dual_values: tuple[Fraction, ...]
    dual_witnesses: tuple[tuple[Fraction, ...], ...]
    products: tuple[Fraction, ...]
    upper: int

    @property
    def ok(self) -> bool:
        return all(1 <= p <= self.upper for p in self.products)


def _dual_minima(
    lattice: IntLattice,
) -> tuple[tuple[Fraction, ...], tuple[tuple[Fraction, ...], ...]]:
    """Dual-side minima and witnesses (ambient vectors of the dual lattice).

    Computed in coordinates of the reduced basis, where the lattice is Z^d
    and the dual gauge is the support function of the primal coordinate
    body; the minima are basis-independent.
    """
    basis = _reduced_basis(lattice)
    vertices = _polytope_vertices(basis)
    d = lattice.rank
    row_max = [max(abs(x) for x in row) for row in basis]
    limit = Fraction(1)
    while True:
        boxes = [math.floor(limit * m) for m in row_max]
        candidates = [
            (_gauge(y, vertices), _sign_normalized(y))
            for y in _gauge_ball_points(vertices, boxes, limit)
        ]
        candidates = [c for c in set(candidates) if c[0] <= limit]
        values, witnesses = _greedy_independent(candidates, d)
        if len(witnesses) == d:
            break
        limit *= 2
    gram = [[sum(x * y for x, y in zip(u, v)) for v in basis] for u in basis]
    ginv = rational_inverse(gram)
    dual_rows = [
        [sum(ginv[i][k] * basis[k][j] for k in range(d)) for j in range(lattice.ambient)]
        for i in range(d)
    ]
    ambient = tuple(
        tuple(
            sum(Fraction(y[i]) * dual_rows[i][j] for i in range(d))
            for j in range(lattice.ambient)
        )
        for y in witnesses
    )
    return tuple(values), ambient


def transference_check(lattice: IntLattice) -> TransferenceReport:
    """Products lambda_k * lambda*_{d+1-k} with the [1, d!] verdict.

    Dual witnesses are reported as ambient rational vectors of the dual
    lattice inside span(L).
    """
    if lattice.rank == 0:
        raise ValueError("transference undefined for the zero lattice")
    d = lattice.rank
    primal = successive_minima(lattice, "sup")
    dual_values, dual_witnesses = _dual_minima(lattice)
    products = tuple(
        primal.values[k] * dual_values[d - 1 - k] for k in range(d)
    )
    return TransferenceReport(
        rank=d,
        primal=primal,
        dual_values=dual_values,
        dual_witnesses=dual_witnesses,
        products=products,
        upper=math.factorial(d),
    )

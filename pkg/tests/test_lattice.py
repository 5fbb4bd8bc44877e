import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusflow.lattice import (
    IntLattice,
    box_vector_array,
    dual_basis,
    enumerate_in_box,
    gram_det,
    hnf,
    integer_kernel,
    orthogonal_integer_complement,
    shortest_vector,
    successive_minima,
    transference_check,
)

small_matrices = st.lists(
    st.lists(st.integers(min_value=-6, max_value=6), min_size=3, max_size=3),
    min_size=1,
    max_size=4,
)


def random_unimodular(rng: random.Random, n: int) -> list[list[int]]:
    m = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(6):
        i, j = rng.sample(range(n), 2)
        c = rng.randint(-2, 2)
        m[i] = [a + c * b for a, b in zip(m[i], m[j])]
    return m


class TestHnf:
    def test_row_swap(self):
        assert hnf([[0, 1, 1], [1, 0, 1]]) == ((1, 0, 1), (0, 1, 1))

    def test_identity(self):
        eye = [[1, 0], [0, 1]]
        assert hnf(eye) == ((1, 0), (0, 1))

    def test_reduction(self):
        assert hnf([[2, 4], [1, 3]]) == ((1, 1), (0, 2))

    @settings(max_examples=80, deadline=None)
    @given(rows=small_matrices)
    def test_idempotent_and_row_space_preserved(self, rows):
        first = hnf(rows)
        assert hnf(first) == first
        # mutual membership of the nonzero rows
        a = IntLattice.from_rows(3, rows)
        b = IntLattice.from_rows(3, [r for r in first if any(r)])
        assert a == b

    def test_unimodular_invariance(self):
        rng = random.Random(5)
        for _ in range(30):
            rows = [[rng.randint(-5, 5) for _ in range(4)] for _ in range(3)]
            lat = IntLattice.from_rows(4, rows)
            u = random_unimodular(rng, 3)
            mixed = [
                [sum(u[i][k] * rows[k][j] for k in range(3)) for j in range(4)]
                for i in range(3)
            ]
            assert IntLattice.from_rows(4, mixed) == lat


class TestKernel:
    def test_plane_kernel(self):
        k = integer_kernel([[1, 0, 1], [0, 1, 1]])
        assert k.basis == ((1, 1, -1),)

    def test_identity_kernel_trivial(self):
        assert integer_kernel([[1, 0], [0, 1]]).rank == 0

    def test_zero_row_full_kernel(self):
        assert integer_kernel([[0, 0, 0]]) == IntLattice.standard(3)

    def test_saturation(self):
        # 2x + 4y = 0 has primitive solution (2, -1)
        k = integer_kernel([[2, 4]])
        assert k.basis == ((2, -1),)


class TestComplement:
    def test_line_complement(self):
        line = IntLattice.from_rows(3, [(1, 1, -1)])
        assert orthogonal_integer_complement(line).basis == ((1, 0, 1), (0, 1, 1))

    def test_full_lattice(self):
        assert orthogonal_integer_complement(IntLattice.standard(3)).rank == 0

    def test_zero_lattice(self):
        assert orthogonal_integer_complement(IntLattice.zero(3)) == IntLattice.standard(3)

    def test_double_complement_is_saturation(self):
        sparse = IntLattice.from_rows(2, [(2, 0)])
        once = orthogonal_integer_complement(sparse)
        twice = orthogonal_integer_complement(once)
        assert twice.basis == ((1, 0),)
        # already saturated lattices are fixpoints
        sat = IntLattice.from_rows(3, [(1, 0, 1), (0, 1, 1)])
        assert orthogonal_integer_complement(orthogonal_integer_complement(sat)) == sat


class TestGram:
    def test_plane(self):
        lat = IntLattice.from_rows(3, [(1, 0, 1), (0, 1, 1)])
        assert gram_det(lat) == 3

    def test_identity(self):
        assert gram_det(IntLattice.standard(4)) == 1

    def test_line(self):
        assert gram_det(IntLattice.from_rows(2, [(2, 1)])) == 5

    def test_zero_rank_errors(self):
        with pytest.raises(ValueError):
            gram_det(IntLattice.zero(2))

    def test_unimodular_invariance(self):
        rng = random.Random(11)
        for _ in range(25):
            rows = [[rng.randint(-4, 4) for _ in range(4)] for _ in range(2)]
            lat = IntLattice.from_rows(4, rows)
            if lat.rank != 2:
                continue
            u = random_unimodular(rng, 2)
            mixed = [
                [sum(u[i][k] * lat.basis[k][j] for k in range(2)) for j in range(4)]
                for i in range(2)
            ]
            assert gram_det(IntLattice.from_rows(4, mixed)) == gram_det(lat)


class TestEnumeration:
    def test_z2_unit_box(self):
        vectors = enumerate_in_box(IntLattice.standard(2), 1)
        assert len(vectors) == 8
        assert vectors == tuple(sorted(vectors))

    def test_plane_unit_box(self):
        lat = IntLattice.from_rows(3, [(1, 0, 1), (0, 1, 1)])
        found = set(enumerate_in_box(lat, 1))
        assert found == {
            (1, 0, 1), (-1, 0, -1), (0, 1, 1), (0, -1, -1), (1, -1, 0), (-1, 1, 0),
        }

    def test_sparse_line_empty(self):
        assert enumerate_in_box(IntLattice.from_rows(2, [(2, 1)]), 1) == ()

    def test_rational_radius_floors(self):
        lat = IntLattice.standard(2)
        assert enumerate_in_box(lat, Fraction(3, 2)) == enumerate_in_box(lat, 1)

    def test_against_ambient_brute_force(self):
        rng = random.Random(23)
        for _ in range(12):
            n = rng.randint(2, 4)
            d = rng.randint(1, n)
            rows = [[rng.randint(-3, 3) for _ in range(n)] for _ in range(d)]
            lat = IntLattice.from_rows(n, rows)
            if lat.rank == 0:
                continue
            radius = rng.randint(1, 4 if n == 4 else 6)
            import itertools

            expected = sorted(
                v
                for v in itertools.product(range(-radius, radius + 1), repeat=n)
                if any(v) and lat.contains(v)
            )
            assert list(enumerate_in_box(lat, radius)) == expected


class TestShortestVector:
    def test_standard(self):
        vec, value = shortest_vector(IntLattice.standard(3))
        assert value == 1

    def test_multiples(self):
        assert shortest_vector(IntLattice.from_rows(2, [(2, 1)])) == ((2, 1), 2)

    def test_plane(self):
        vec, value = shortest_vector(IntLattice.from_rows(3, [(1, 0, 1), (0, 1, 1)]))
        assert value == 1
        assert vec == (0, 1, 1)  # sign-normalized lexicographic tie-break

    def test_l1(self):
        vec, value = shortest_vector(IntLattice.from_rows(2, [(2, 1)]), "l1")
        assert value == 3


class TestSuccessiveMinima:
    def test_standard(self):
        minima = successive_minima(IntLattice.standard(3))
        assert minima.values == (1, 1, 1)

    def test_axis_aligned(self):
        minima = successive_minima(IntLattice.from_rows(2, [(1, 0), (0, 2)]))
        assert minima.values == (1, 2)

    def test_unimodular_pair_is_standard(self):
        lat = IntLattice.from_rows(2, [(2, 3), (5, 7)])
        assert lat == IntLattice.standard(2)
        minima = successive_minima(lat)
        assert minima.values == (1, 1)

    def test_lambda1_matches_shortest(self):
        rng = random.Random(31)
        for _ in range(15):
            rows = [[rng.randint(-4, 4) for _ in range(3)] for _ in range(2)]
            lat = IntLattice.from_rows(3, rows)
            if lat.rank == 0:
                continue
            for norm in ("sup", "l1"):
                minima = successive_minima(lat, norm)
                assert minima.values[0] == shortest_vector(lat, norm)[1]
                assert all(a <= b for a, b in zip(minima.values, minima.values[1:]))


class TestDualBasis:
    def test_self_dual(self):
        assert dual_basis(IntLattice.standard(2)) == (
            (Fraction(1), Fraction(0)),
            (Fraction(0), Fraction(1)),
        )

    def test_line(self):
        assert dual_basis(IntLattice.from_rows(2, [(2, 1)])) == (
            (Fraction(2, 5), Fraction(1, 5)),
        )

    def test_plane(self):
        rows = dual_basis(IntLattice.from_rows(3, [(1, 0, 1), (0, 1, 1)]))
        assert rows == (
            (Fraction(2, 3), Fraction(-1, 3), Fraction(1, 3)),
            (Fraction(-1, 3), Fraction(2, 3), Fraction(1, 3)),
        )

    def test_pairing_is_identity(self):
        lat = IntLattice.from_rows(3, [(1, 2, 0), (0, 3, 5)])
        dual = dual_basis(lat)
        for i, row in enumerate(lat.basis):
            for j, drow in enumerate(dual):
                assert sum(Fraction(a) * b for a, b in zip(row, drow)) == int(i == j)


class TestTransference:
    def test_standard_all_ones(self):
        for d in (1, 2, 3, 4):
            report = transference_check(IntLattice.standard(d))
            assert report.products == tuple([Fraction(1)] * d)
            assert report.ok

    def test_rank_one_product_exactly_one(self):
        for rows in ([(2, 1)], [(3, -4)], [(1, 1, 1)], [(5, 0, 2, -1)]):
            report = transference_check(IntLattice.from_rows(len(rows[0]), rows))
            assert report.products == (Fraction(1),)

    def test_rank_one_norm_pairing(self):
        report = transference_check(IntLattice.from_rows(2, [(2, 1)]))
        assert report.primal.values == (Fraction(2),)
        assert report.dual_values == (Fraction(1, 2),)
        assert report.dual_witnesses == ((Fraction(2, 5), Fraction(1, 5)),)

    def test_random_sweep(self):
        rng = random.Random(47)
        from torusflow.lattice import rational_rank

        checked = 0
        while checked < 15:
            d = rng.randint(1, 4)
            n = rng.randint(d, 5)
            rows = [[rng.randint(-5, 5) for _ in range(n)] for _ in range(d)]
            if rational_rank(rows) < d:
                continue
            lat = IntLattice.from_rows(n, rows)
            report = transference_check(lat)
            assert report.ok, (rows, report.products)
            assert len(report.products) == d
            assert report.upper == math.factorial(d)
            checked += 1

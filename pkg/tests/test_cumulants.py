import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowsnr.cumulants import (
    CumulantTable,
    Partition,
    cumulant_coefficients,
    cumulant_from_moments,
    partitions_with_max_part,
)
from lowsnr.exceptions import ResourceLimitError

from _oracles import count_partitions, fd_cumulant

TABLE8 = cumulant_coefficients(8)


def discrete_moments(values, probs, m):
    return [float(np.sum(probs * values**k)) for k in range(1, m + 1)]


class TestCoefficients:
    def test_order_two(self):
        # kappa_2 = mu_2 - mu_1^2
        assert TABLE8.coefficient((2,)) == 1
        assert TABLE8.coefficient((1, 1)) == -1

    def test_paired_coefficients(self):
        assert TABLE8.coefficient((2, 2)) == -3
        assert TABLE8.coefficient((3, 3)) == -10

    def test_full_order_four_table(self):
        expected = {(4,): 1, (3, 1): -4, (2, 2): -3, (2, 1, 1): 12, (1, 1, 1, 1): -6}
        got = {p.parts: c for p, c in TABLE8.coeffs[4].items()}
        assert got == {k: Fraction(v) for k, v in expected.items()}

    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_top_and_paired_coefficients_exact(self, k):
        # c_{2k} = 1 and c_{k,k} = -binom(2k, k)/2, exactly
        assert TABLE8.coefficient((2 * k,)) == 1
        assert TABLE8.coefficient((k, k)) == Fraction(-math.comb(2 * k, k), 2)

    def test_coefficients_are_integers(self):
        for order, table in TABLE8.coeffs.items():
            for p, c in table.items():
                assert c.denominator == 1, (order, p, c)

    @pytest.mark.parametrize("m", range(1, 9))
    def test_absolute_sum_bound(self, m):
        total = sum(abs(c) for c in TABLE8.coeffs[m].values())
        assert total <= m**m

    def test_guard(self):
        with pytest.raises(ResourceLimitError):
            cumulant_coefficients(21)


class TestEvaluation:
    def test_gaussian_fourth_cumulant_vanishes(self):
        assert cumulant_from_moments([0.0, 1.0, 0.0, 3.0], 4, TABLE8) == pytest.approx(0.0, abs=1e-12)

    def test_point_mass_cumulants_vanish(self):
        a = 0.7
        moments = [a**k for k in range(1, 7)]
        assert cumulant_from_moments(moments, 1, TABLE8) == pytest.approx(a)
        for m in range(2, 7):
            assert abs(cumulant_from_moments(moments, m, TABLE8)) <= 1e-9

    def test_bernoulli_half(self):
        # kappa_4 of Bernoulli(1/2) = -1/8 (finite differences of log((1+e^t)/2))
        moments = [0.5] * 4
        assert cumulant_from_moments(moments, 4, TABLE8) == pytest.approx(-0.125, abs=1e-14)
        fd = fd_cumulant(np.array([0.0, 1.0]), np.array([0.5, 0.5]), 4)
        assert cumulant_from_moments(moments, 4, TABLE8) == pytest.approx(fd, rel=1e-4)

    def test_needs_enough_moments(self):
        with pytest.raises(ValueError, match="moments"):
            cumulant_from_moments([1.0, 2.0], 3, TABLE8)

    def test_matches_finite_differences_up_to_order_eight(self, rng):
        # 50 random bounded discrete variables, orders 1..8
        for trial in range(50):
            n_atoms = int(rng.integers(2, 5))
            values = rng.uniform(-1.0, 1.0, size=n_atoms)
            probs = rng.uniform(0.2, 1.0, size=n_atoms)
            probs /= probs.sum()
            m = int(rng.integers(1, 9))
            got = cumulant_from_moments(discrete_moments(values, probs, m), m, TABLE8)
            want = fd_cumulant(values, probs, m)
            assert got == pytest.approx(want, rel=1e-4, abs=1e-9), (trial, m)


class TestPartitions:
    def test_require_max(self):
        got = {p.parts for p in partitions_with_max_part(4, 2, require_max=True)}
        assert got == {(2, 2), (2, 1, 1)}

    def test_all_up_to_max(self):
        got = {p.parts for p in partitions_with_max_part(3, 3)}
        assert got == {(3,), (2, 1), (1, 1, 1)}

    def test_counts_match_partition_function(self):
        expected = [1, 2, 3, 5, 7, 11, 15, 22, 30, 42]
        for total, count in zip(range(1, 11), expected):
            assert len(partitions_with_max_part(total, total)) == count
            assert count_partitions(total) == count

    @settings(max_examples=40, deadline=None)
    @given(total=st.integers(1, 12), max_part=st.integers(1, 12))
    def test_split_by_require_max_is_consistent(self, total, max_part):
        all_parts = partitions_with_max_part(total, max_part)
        exact = partitions_with_max_part(total, max_part, require_max=True)
        if max_part > 1:
            below = partitions_with_max_part(total, max_part - 1)
            assert len(all_parts) == len(exact) + len(below)
        for p in all_parts:
            assert p.total == total
            assert max(p.parts) <= max_part

    def test_partition_normalizes_order(self):
        assert Partition((1, 3, 2)).parts == (3, 2, 1)
        assert str(Partition((1, 3))) == "[3,1]"

    def test_partition_rejects_bad_parts(self):
        with pytest.raises(ValueError):
            Partition(())
        with pytest.raises(ValueError):
            Partition((0, 1))


class TestTableType:
    def test_table_lookup_missing_is_zero(self):
        # a partition absent from a covered order has coefficient 0
        table = CumulantTable(2, {1: {Partition((1,)): Fraction(1)}, 2: {}})
        assert table.coefficient((2,)) == 0

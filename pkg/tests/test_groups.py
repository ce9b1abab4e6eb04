import itertools

import numpy as np
import pytest

from lowsnr.core import moment_tensor, outer_power
from lowsnr.exceptions import PreconditionError
from lowsnr.groups import (
    FiniteGroupAction,
    check_haar_identity,
    cyclic_group,
    orbit_mixture,
    planar_rotation_group,
)


def orbit_rows(group, theta):
    return group.elements @ np.asarray(theta, dtype=float)


class TestCyclicGroup:
    def test_d1_is_identity(self):
        g = cyclic_group(1)
        np.testing.assert_array_equal(g.elements[0], np.eye(1))

    def test_d3_orbit_is_all_shifts(self):
        g = cyclic_group(3)
        theta = np.array([1.0, 2.0, 3.0])
        got = {tuple(row) for row in orbit_rows(g, theta)}
        assert got == {(1.0, 2.0, 3.0), (2.0, 3.0, 1.0), (3.0, 1.0, 2.0)}

    def test_composition_closure_d4(self):
        g = cyclic_group(4)
        for i, j in itertools.product(range(4), repeat=2):
            np.testing.assert_allclose(
                g.elements[i] @ g.elements[j], g.elements[(i + j) % 4], atol=1e-14
            )

    def test_orthogonality_enforced(self):
        bad = np.array([[[1.0, 0.0], [0.3, 1.0]]])
        with pytest.raises(ValueError, match="orthogonal"):
            FiniteGroupAction(bad, np.array([1.0]))


class TestPlanarRotationGroup:
    def test_quarter_turns(self):
        g = planar_rotation_group(4)
        got = np.round(orbit_rows(g, [1.0, 0.0]), 12)
        expected = {(1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0)}
        assert {tuple(r) for r in got} == expected

    def test_two_steps_is_plus_minus_identity(self):
        g = planar_rotation_group(2)
        np.testing.assert_allclose(g.elements[0], np.eye(2), atol=1e-15)
        np.testing.assert_allclose(g.elements[1], -np.eye(2), atol=1e-12)

    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_first_moment_vanishes(self, n, rng):
        g = planar_rotation_group(n)
        mix = orbit_mixture(g, [(rng.normal(size=2), 1.0)])
        assert np.abs(moment_tensor(mix, 1).entries).max() < 1e-12


class TestOrbitMixture:
    def test_trivial_group_singleton(self):
        g = FiniteGroupAction(np.eye(2)[None], np.array([1.0]))
        mix = orbit_mixture(g, [(np.array([0.3, 0.4]), 1.0)])
        np.testing.assert_array_equal(mix.centers, [[0.3, 0.4]])

    def test_cyclic_d3_mra_centers(self):
        g = cyclic_group(3)
        mix = orbit_mixture(g, [(np.array([1.0, 2.0, 3.0]), 1.0)])
        assert mix.n_components == 3
        got = {tuple(c) for c in mix.centers}
        assert got == {(1.0, 2.0, 3.0), (2.0, 3.0, 1.0), (3.0, 1.0, 2.0)}
        np.testing.assert_allclose(mix.weights, np.full(3, 1 / 3))

    def test_two_seeds_heterogeneous(self, rng):
        g = cyclic_group(3)
        seeds = [(rng.normal(size=3), 0.4), (rng.normal(size=3), 0.6)]
        mix = orbit_mixture(g, seeds)
        assert mix.n_components == 6
        assert mix.weights.sum() == pytest.approx(1.0, abs=1e-14)

    def test_moments_match_direct_enumeration(self, rng):
        g = cyclic_group(4)
        theta = rng.normal(size=4)
        mix = orbit_mixture(g, [(theta, 1.0)])
        for k in (1, 2, 3):
            direct = sum(
                w * outer_power(gmat @ theta, k).entries
                for gmat, w in zip(g.elements, g.weights)
            )
            np.testing.assert_array_equal(moment_tensor(mix, k).entries, direct)

    def test_first_moment_group_invariant(self, rng):
        for g in (cyclic_group(5), planar_rotation_group(6)):
            mix = orbit_mixture(g, [(rng.normal(size=g.dim), 1.0)])
            t1 = moment_tensor(mix, 1).entries
            for gmat in g.elements:
                np.testing.assert_allclose(gmat @ t1, t1, atol=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="dimension"):
            orbit_mixture(cyclic_group(3), [(np.zeros(2), 1.0)])


class TestHaarIdentity:
    def test_zero_seed_gives_zero_residual(self):
        g = cyclic_group(3)
        res = check_haar_identity(g, np.zeros(3), np.zeros(3), [1], [1])
        assert res == 0.0

    def test_order_two_cyclic_d3(self, rng):
        g = cyclic_group(3)
        res = check_haar_identity(g, rng.normal(size=3), rng.normal(size=3), [1], [1])
        assert res <= 1e-10

    def test_order_four_cyclic_d4(self, rng):
        g = cyclic_group(4)
        res = check_haar_identity(g, rng.normal(size=4), rng.normal(size=4), [2], [1, 1])
        assert res <= 1e-9

    def test_lhs_matches_independent_loop(self, rng):
        # independent recomputation of the k=2 case by explicit index loops
        g = cyclic_group(3)
        theta, theta_star = rng.normal(size=3), rng.normal(size=3)
        mix = orbit_mixture(g, [(theta, 1.0)])
        mix_star = orbit_mixture(g, [(theta_star, 1.0)])
        t1 = moment_tensor(mix, 1).entries
        t1s = moment_tensor(mix_star, 1).entries
        t2 = moment_tensor(mix, 2).entries
        lhs = sum(t2[a, b] * t1[a] * t1s[b] for a in range(3) for b in range(3))
        rhs = float(t1 @ t1) * float(t1 @ t1s)
        assert check_haar_identity(g, theta, theta_star, [1], [1]) == pytest.approx(
            abs(lhs - rhs), abs=1e-15
        )

    def test_sweep_small(self, rng):
        pairs = [([1], [1]), ([2], []), ([], [2]), ([1, 1], []), ([2], [1, 1]), ([1], [3]), ([4], [])]
        for d in (3, 4):
            g = cyclic_group(d)
            for _ in range(5):
                theta, theta_star = rng.normal(size=d), rng.normal(size=d)
                for I, J in pairs:
                    assert check_haar_identity(g, theta, theta_star, I, J) <= 1e-9

    def test_nonuniform_weights_rejected(self):
        g = cyclic_group(2)
        skewed = FiniteGroupAction(g.elements, np.array([0.7, 0.3]))
        with pytest.raises(PreconditionError, match="uniform"):
            check_haar_identity(skewed, np.ones(2), np.ones(2), [1], [1])

    def test_planar_rotations_satisfy_identity(self, rng):
        g = planar_rotation_group(8)
        res = check_haar_identity(g, rng.normal(size=2), rng.normal(size=2), [2], [2])
        assert res <= 1e-9

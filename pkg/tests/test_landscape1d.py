import numpy as np
import pytest

from lowsnr.exceptions import (
    DegenerateSolutionError,
    NotACriticalPointError,
    OnVarietyError,
    PreconditionError,
)
from lowsnr.landscape1d import (
    CriticalPoint1D,
    PowerSumSystem,
    classify_by_multiplicity,
    compositions,
    draw_generic_values,
    find_all_critical_points,
    find_critical_point,
    iter_assignments,
    power_sum,
    power_sum_problem,
    restricted_hessian_classify,
)

UNIFORM2 = PowerSumSystem(np.array([0.5, 0.5]), np.array([1.0, -1.0]))


class TestPowerSum:
    def test_zero_vector(self):
        for ell in range(1, 7):
            assert power_sum(UNIFORM2, np.zeros(2), ell) == 0.0

    def test_symmetric_pair(self):
        x = np.array([1.0, -1.0])
        assert power_sum(UNIFORM2, x, 2) == pytest.approx(1.0)
        assert power_sum(UNIFORM2, x, 3) == pytest.approx(0.0, abs=1e-15)

    def test_matches_direct_loop(self, rng):
        w = rng.uniform(0.1, 1.0, size=4)
        w /= w.sum()
        sys = PowerSumSystem(w, rng.normal(size=4))
        x = rng.normal(size=4)
        for ell in range(1, 7):
            direct = sum(wi * xi**ell for wi, xi in zip(w, x))
            assert power_sum(sys, x, ell) == pytest.approx(direct, rel=1e-12)

    def test_truth_power_sums_consistent(self, rng):
        w = rng.uniform(0.1, 1.0, size=3)
        w /= w.sum()
        vals = rng.normal(size=3)
        sys = PowerSumSystem(w, vals, p_max=5)
        ps = sys.truth_power_sums
        for ell in range(1, 6):
            assert ps[ell - 1] == pytest.approx(power_sum(sys, vals, ell), abs=1e-12)


class TestHelpers:
    def test_compositions_of_four_into_two(self):
        assert set(compositions(4, 2)) == {(3, 1), (2, 2), (1, 3)}

    def test_assignments_count(self):
        # ordered set partitions of 4 slots into groups of sizes (2, 1, 1)
        assigns = list(iter_assignments(4, (2, 1, 1)))
        assert len(assigns) == 12
        for a in assigns:
            assert sorted(a) == [0, 0, 1, 2]

    def test_generic_values_gap(self, rng):
        vals = draw_generic_values(5, rng)
        assert np.min(np.diff(np.sort(vals))) >= 1e-3


class TestFindCriticalPoint:
    def test_collapsed_point_for_uniform_pair(self):
        cp = find_critical_point(UNIFORM2, (2,))
        p1 = UNIFORM2.truth_power_sum(1)
        np.testing.assert_allclose(cp.values, [p1], atol=1e-12)
        assert cp.multiplicities == (2,)
        np.testing.assert_allclose(cp.full_point, [p1, p1], atol=1e-12)

    def test_k3_two_distinct_values_satisfy_constraints(self, rng):
        w = np.array([0.5, 0.3, 0.2])
        sys = PowerSumSystem(w, np.array([1.1, 0.2, -0.9]))
        for mults in [(2, 1), (1, 2)]:
            cp = find_critical_point(sys, mults, seed=4)
            x = cp.full_point
            for ell in (1, 2):
                assert power_sum(sys, x, ell) == pytest.approx(
                    sys.truth_power_sum(ell), abs=1e-10
                )
            assert cp.multiplicities == mults
            assert cp.values[0] > cp.values[1]

    def test_stage_k_returns_truth(self):
        w = np.array([0.2, 0.3, 0.5])
        vals = np.array([0.7, -0.1, -0.5])
        sys = PowerSumSystem(w, vals)
        cp = find_critical_point(sys, (1, 1, 1))
        np.testing.assert_allclose(np.sort(cp.full_point), np.sort(vals), atol=1e-9)

    def test_degenerate_truth_collides(self):
        sys = PowerSumSystem(np.array([0.5, 0.5]), np.array([0.5, 0.5 + 1e-12]))
        with pytest.raises(DegenerateSolutionError):
            find_critical_point(sys, (1, 1))

    def test_multiplicities_validated(self):
        with pytest.raises(ValueError):
            find_critical_point(UNIFORM2, (3,))
        with pytest.raises(ValueError):
            find_critical_point(UNIFORM2, (1, 0, 1))

    def test_explicit_assignment_roundtrip(self):
        w = np.array([0.5, 0.3, 0.2])
        sys = PowerSumSystem(w, np.array([1.1, 0.2, -0.9]))
        cp = find_critical_point(sys, (2, 1), assignment=(0, 0, 1), seed=2)
        assert sorted(cp.assignment) == [0, 0, 1]

    def test_stationarity_certificate(self, rng):
        # grad p_{n+1} lies in span{grad p_ell} at every returned point
        w = rng.uniform(0.2, 1.0, size=4)
        w /= w.sum()
        sys = PowerSumSystem(w, draw_generic_values(4, rng))
        for cp in find_all_critical_points(sys, 2, seed=3):
            x = cp.full_point
            n = cp.stage
            jac = np.stack([ell * w * x ** (ell - 1) for ell in range(1, n + 1)])
            target = (n + 1) * w * x**n
            coef, *_ = np.linalg.lstsq(jac.T, target, rcond=None)
            resid = np.linalg.norm(jac.T @ coef - target) / (1 + np.linalg.norm(target))
            assert resid <= 1e-8
            svals = np.linalg.svd(jac, compute_uv=False)
            assert svals.min() > 1e-8  # Vandermonde nondegeneracy


class TestClassification:
    def test_collapsed_point_is_local_max(self):
        # p_2(x) = (p_1*)^2 < p_2* so the collapsed point is a maximum
        cp = find_critical_point(UNIFORM2, (2,))
        assert classify_by_multiplicity(cp, UNIFORM2) == "local-max"
        f, cons = power_sum_problem(UNIFORM2, 1)
        assert restricted_hessian_classify(f, cons, cp.full_point) == "local-max"

    def test_on_variety_guard(self):
        cp = CriticalPoint1D(
            values=np.array([0.0]),
            multiplicities=(2,),
            assignment=(0, 0),
            stage=1,
            p_next=UNIFORM2.truth_power_sum(2),
        )
        with pytest.raises(OnVarietyError):
            classify_by_multiplicity(cp, UNIFORM2)

    def test_all_ones_pattern_rejected(self):
        cp = CriticalPoint1D(
            values=np.array([1.0, -1.0]),
            multiplicities=(1, 1),
            assignment=(0, 1),
            stage=2,
            p_next=123.0,
        )
        with pytest.raises(PreconditionError):
            classify_by_multiplicity(cp, UNIFORM2)

    def test_uniform_weights_produce_no_minima(self, rng):
        for K in (3, 4):
            sys = PowerSumSystem(np.full(K, 1.0 / K), draw_generic_values(K, rng))
            for n in range(1, K):
                for cp in find_all_critical_points(sys, n, seed=7):
                    try:
                        label = classify_by_multiplicity(cp, sys)
                    except OnVarietyError:
                        continue
                    assert label != "local-min"

    def test_pattern_2_1_1_agreement_on_random_truths(self, rng):
        # K=4 non-uniform, multiplicity (2,1,1): multiplicity rule must match
        # the projected-Hessian oracle on every conclusive case
        checked = 0
        for trial in range(50):
            w = rng.uniform(0.2, 1.0, size=4)
            w /= w.sum()
            sys = PowerSumSystem(w, draw_generic_values(4, rng))
            try:
                cp = find_critical_point(sys, (2, 1, 1), seed=trial)
            except Exception:
                continue
            try:
                label = classify_by_multiplicity(cp, sys)
            except OnVarietyError:
                continue
            f, cons = power_sum_problem(sys, cp.stage)
            oracle = restricted_hessian_classify(f, cons, cp.full_point)
            if oracle == "inconclusive":
                continue
            assert label == oracle, (w, sys.truth_values, cp)
            checked += 1
        assert checked >= 40


class TestRestrictedHessian:
    def test_sphere_height_north_pole(self):
        def f(x):
            return x[2], np.array([0.0, 0.0, 1.0]), np.zeros((3, 3))

        def g(x):
            return float(x @ x - 1.0), 2 * x, 2 * np.eye(3)

        assert restricted_hessian_classify(f, [g], np.array([0.0, 0.0, 1.0])) == "local-max"
        assert restricted_hessian_classify(f, [g], np.array([0.0, 0.0, -1.0])) == "local-min"

    def test_saddle(self):
        # f = x^2 - y^2 on the plane z = 0 in R^3
        def f(x):
            h = np.diag([2.0, -2.0, 0.0])
            return x[0] ** 2 - x[1] ** 2, h @ x, h

        def g(x):
            return x[2], np.array([0.0, 0.0, 1.0]), np.zeros((3, 3))

        assert restricted_hessian_classify(f, [g], np.zeros(3)) == "saddle"

    def test_inconclusive_flat_direction(self):
        def f(x):
            return x[0] ** 3 + x[1], np.array([3 * x[0] ** 2, 1.0]), np.diag([6 * x[0], 0.0])

        def g(x):
            return x[1], np.array([0.0, 1.0]), np.zeros((2, 2))

        assert restricted_hessian_classify(f, [g], np.zeros(2)) == "inconclusive"

    def test_not_a_critical_point(self):
        def f(x):
            return x[0], np.array([1.0, 0.0, 0.0]), np.zeros((3, 3))

        def g(x):
            return x[2], np.array([0.0, 0.0, 1.0]), np.zeros((3, 3))

        with pytest.raises(NotACriticalPointError):
            restricted_hessian_classify(f, [g], np.zeros(3))

    def test_constraint_violation_rejected(self):
        def f(x):
            return x[2], np.array([0.0, 0.0, 1.0]), np.zeros((3, 3))

        def g(x):
            return float(x @ x - 1.0), 2 * x, 2 * np.eye(3)

        with pytest.raises(PreconditionError, match="residual"):
            restricted_hessian_classify(f, [g], np.array([0.0, 0.0, 1.5]))

    def test_agreement_random_suite(self, rng):
        # every conclusive multiplicity classification matches the oracle
        mismatches = 0
        conclusive = 0
        for trial in range(10):
            K = int(rng.integers(3, 6))
            w = rng.uniform(0.2, 1.0, size=K)
            w /= w.sum()
            sys = PowerSumSystem(w, draw_generic_values(K, rng))
            for n in range(1, K):
                f, cons = power_sum_problem(sys, n)
                for cp in find_all_critical_points(sys, n, seed=100 + trial):
                    try:
                        label = classify_by_multiplicity(cp, sys)
                    except OnVarietyError:
                        continue
                    oracle = restricted_hessian_classify(f, cons, cp.full_point)
                    if oracle == "inconclusive":
                        continue
                    conclusive += 1
                    mismatches += label != oracle
        assert conclusive > 100
        assert mismatches == 0

import math

import numpy as np
import pytest

from farsplit.bessel import KRASIKOV_BOUND, bessel_j_grid
from farsplit.bounds import (
    BoundData,
    BoundGeometry,
    TheoremId,
    evaluate_all,
    evaluate_bound,
    krasikov_check,
    verify_uncertainty,
)

SQRT_2PI = math.sqrt(2.0 * math.pi)


def full_geometry(k=1.0, scale=1.0):
    """Geometry carrying every field any theorem needs (three components)."""
    centers = tuple(
        (scale * x, scale * y)
        for x, y in ((0.0, 0.0), (180.0, 10.0), (-40.0, 170.0))
    )
    return BoundGeometry(
        k=k,
        centers=centers,
        orders=(1, 2, 1),
        sparsities=(2, 3, 2),
        omega_measure=0.05,
    )


class TestPlugIns:
    def test_ls_two_boundary_constant(self):
        geometry = BoundGeometry(
            k=1.0, centers=((0.0, 0.0), (2.0, 0.0)), orders=(0, 0)
        )
        report = evaluate_bound(TheoremId.LS_TWO, geometry)
        assert report.constant == pytest.approx(2.0, rel=1e-15)
        # the separation requirement |c| > 2(N1+N2+1) = 2 fails at equality
        assert not report.hypotheses_ok
        assert report.hypotheses["smallness"]
        assert not report.hypotheses["separation"]

    def test_ls_two_feasible(self):
        geometry = BoundGeometry(
            k=1.0, centers=((0.0, 0.0), (10.0, 0.0)), orders=(0, 1)
        )
        report = evaluate_bound(
            TheoremId.LS_TWO, geometry, BoundData(gamma_diff=0.5)
        )
        assert report.hypotheses_ok
        assert report.constant == pytest.approx(1.0 / (1.0 - 0.3), rel=1e-15)
        assert report.rhs == pytest.approx(report.constant * 0.25, rel=1e-15)

    def test_ls_two_infeasible_at_smallness_boundary(self):
        geometry = BoundGeometry(
            k=1.0, centers=((0.0, 0.0), (9.0, 0.0)), orders=(1, 1)
        )
        report = evaluate_bound(TheoremId.LS_TWO, geometry)
        assert not report.hypotheses_ok
        assert report.constant == math.inf
        assert report.rhs == math.inf

    def test_ls_complete(self):
        geometry = BoundGeometry(
            k=1.0, centers=((0.0, 0.0),), orders=(2,), omega_measure=0.4
        )
        report = evaluate_bound(TheoremId.LS_COMPLETE, geometry)
        q = 5 * 0.4 / (2 * math.pi)
        assert report.constant == pytest.approx(1.0 / (1.0 - q), rel=1e-14)

    def test_l1_complete_unknown_omega_constants(self):
        geometry = BoundGeometry(
            k=1.0, centers=((0.0, 0.0),), sparsities=(1,), omega_measure=0.1
        )
        report = evaluate_bound(
            TheoremId.L1_COMPLETE_UNKNOWN_OMEGA, geometry, BoundData(tau=2.0)
        )
        q_alpha = 4.0 / SQRT_2PI / 4.0
        q_beta = 4.0 / SQRT_2PI * 4.0 * 0.1
        assert report.per_component[0] == pytest.approx(
            1.0 / (1.0 - q_alpha), rel=1e-14
        )
        assert report.beta_constant == pytest.approx(1.0 / (1.0 - q_beta), rel=1e-14)

    def test_cond_music_improves_with_distance(self):
        constants = []
        for dist in (2.0, 10.0, 1e4, 1e9):
            geometry = BoundGeometry(k=1.0, centers=((0.0, 0.0), (dist, 0.0)))
            constants.append(
                evaluate_bound(TheoremId.COND_MUSIC, geometry).constant
            )
        assert constants == sorted(constants, reverse=True)
        assert constants[-1] == pytest.approx(1.0, abs=1e-8)

    def test_cond_reductions(self):
        geometry = BoundGeometry(
            k=1.0, centers=((0.0, 0.0), (8.0, 0.0)), orders=(0, 0)
        )
        music = evaluate_bound(TheoremId.COND_MUSIC, geometry)
        two = evaluate_bound(TheoremId.COND_TWO, geometry)
        point = evaluate_bound(TheoremId.COND_POINT, geometry)
        expected = 1.0 / math.sqrt(1.0 - 1.0 / 8.0)
        for report in (music, two, point):
            assert report.constant == pytest.approx(expected, rel=1e-14)

    def test_cond_point_uses_extended_order(self):
        geometry = BoundGeometry(
            k=1.0, centers=((0.0, 0.0), (30.0, 0.0)), orders=(0, 4)
        )
        report = evaluate_bound(TheoremId.COND_POINT, geometry)
        assert report.constant == pytest.approx(
            1.0 / math.sqrt(1.0 - 9.0 / 30.0), rel=1e-14
        )

    def test_missing_fields_rejected(self):
        with pytest.raises(ValueError):
            evaluate_bound(TheoremId.LS_TWO, BoundGeometry(k=1.0))
        with pytest.raises(ValueError):
            evaluate_bound(
                TheoremId.L1_COMPLETE_UNKNOWN_OMEGA,
                BoundGeometry(
                    k=1.0, centers=((0.0, 0.0),), sparsities=(1,), omega_measure=0.1
                ),
            )


class TestMultiComponent:
    def test_ls_multi_per_component(self):
        geometry = BoundGeometry(
            k=1.0,
            centers=((0.0, 0.0), (100.0, 0.0), (0.0, 90.0)),
            orders=(1, 1, 1),
        )
        report = evaluate_bound(TheoremId.LS_MULTI, geometry)
        assert report.hypotheses_ok
        assert len(report.per_component) == 3
        q0 = math.sqrt(3) * (
            math.sqrt(3 / 100.0) + math.sqrt(3 / 90.0)
        )
        assert report.per_component[0] == pytest.approx(1 / (1 - q0), rel=1e-12)
        assert report.constant == max(report.per_component)

    def test_ls_complete_multi_uses_printed_inner_order(self):
        geometry = BoundGeometry(
            k=1.0,
            centers=((0.0, 0.0), (200.0, 0.0)),
            orders=(0, 2),
            omega_measure=0.05,
        )
        report = evaluate_bound(TheoremId.LS_COMPLETE_MULTI, geometry)
        root = math.sqrt(0.05 / (2 * math.pi))
        # component 2 sums sqrt((2 N_2 + 1) / D), with its own order inside
        q2 = math.sqrt(5.0) * (root + math.sqrt(5.0 / 200.0))
        assert report.per_component[1] == pytest.approx(1 / (1 - q2), rel=1e-12)
        assert "non-symmetric" in report.notes

    def test_weighted_completion_sign_variants(self):
        geometry = BoundGeometry(
            k=1.0,
            centers=((0.0, 0.0), (4000.0, 0.0), (8000.0, 0.0)),
            sparsities=(1, 1, 1),
            omega_measure=0.01,
        )
        printed = evaluate_bound(
            TheoremId.L1_COMPLETE_MULTI_WEIGHTED, geometry
        )
        conservative = evaluate_bound(
            TheoremId.L1_COMPLETE_MULTI_WEIGHTED, geometry, conservative=True
        )
        assert printed.hypotheses_ok and conservative.hypotheses_ok
        # the non-conservative form adds the arc term back, so its alpha
        # constants sit
        # below the conservative ones (and can drop below 1)
        for p, c in zip(printed.per_component, conservative.per_component):
            assert p <= c
            assert c >= 1.0
        assert conservative.beta_constant == printed.beta_constant

    def test_weight_variant_recorded(self):
        geometry = BoundGeometry(
            k=1.0,
            centers=((0.0, 0.0), (4000.0, 0.0), (9000.0, 0.0)),
            sparsities=(1, 1, 1),
        )
        pairwise = evaluate_bound(TheoremId.L1_MULTI_WEIGHTED, geometry)
        triangle = evaluate_bound(
            TheoremId.L1_MULTI_WEIGHTED, geometry, weight_variant="triangle"
        )
        assert "pairwise" in pairwise.notes
        assert "triangle" in triangle.notes
        assert pairwise.per_component != triangle.per_component


class TestWavenumberScaling:
    @pytest.mark.parametrize("theorem", list(TheoremId))
    def test_scaling_invariance(self, theorem):
        k = 1.7
        data = BoundData(delta=0.3, gamma_diff=0.4, tau=1.5)
        scaled = evaluate_bound(theorem, full_geometry(k=k, scale=1.0), data)
        unit = evaluate_bound(theorem, full_geometry(k=1.0, scale=k), data)
        assert scaled.hypotheses == unit.hypotheses
        if math.isfinite(scaled.constant):
            assert scaled.constant == pytest.approx(unit.constant, rel=1e-13)
        else:
            assert not math.isfinite(unit.constant)

    def test_feasibility_monotone_in_distance(self):
        previous_ok = False
        previous_constant = math.inf
        for dist in np.linspace(8.0, 300.0, 80):
            geometry = BoundGeometry(
                k=1.0, centers=((0.0, 0.0), (float(dist), 0.0)), orders=(1, 1)
            )
            report = evaluate_bound(TheoremId.LS_TWO, geometry)
            if previous_ok:
                assert report.hypotheses_ok
                assert report.constant <= previous_constant * (1 + 1e-12)
            previous_ok = report.hypotheses_ok
            if report.hypotheses_ok:
                previous_constant = report.constant


class TestEvaluateAll:
    def test_every_theorem_covered_once(self):
        data = BoundData(delta=0.1, gamma_diff=0.1, tau=1.0)
        reports = evaluate_all(full_geometry(), data)
        names = [report.theorem for report in reports]
        assert len(names) == len(set(names))
        assert set(names) == set(TheoremId)


class TestUncertaintySuites:
    @pytest.mark.parametrize(
        "theorem", [TheoremId.U_L0, TheoremId.U_BAND, TheoremId.U_MIXED]
    )
    def test_no_violations(self, theorem):
        stats = verify_uncertainty(theorem, trials=150, seed=5)
        assert stats.violations == 0
        assert 0.0 < stats.max_ratio <= 1.0

    def test_reproducible(self):
        a = verify_uncertainty(TheoremId.U_L0, trials=25, seed=1)
        b = verify_uncertainty(TheoremId.U_L0, trials=25, seed=1)
        assert a.max_ratio == b.max_ratio

    def test_band_anchor_near_minimal_separation(self, rng):
        # M = N = 1 with |c| just above 6 anchors the amplitude constant
        from farsplit.farfield import AngularGrid, FarField, inner, translate

        grid = AngularGrid(512)
        for _ in range(200):
            vals_a = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            vals_b = rng.standard_normal(3) + 1j * rng.standard_normal(3)
            alpha = FarField.from_window(grid, vals_a, order=1)
            beta = FarField.from_window(grid, vals_b, order=1)
            phi = rng.uniform(0, 2 * math.pi)
            dist = 6.0 * rng.uniform(1.001, 1.2)
            c = (dist * math.cos(phi), dist * math.sin(phi))
            lhs = abs(inner(alpha, translate(beta, c)))
            rhs = 3.0 / math.sqrt(dist) * alpha.norm() * beta.norm()
            assert lhs <= rhs * (1 + 1e-9)

    def test_rejects_non_uncertainty_theorems(self):
        with pytest.raises(ValueError):
            verify_uncertainty(TheoremId.LS_TWO, trials=5)


class TestKrasikov:
    def test_dense_sweep_m1_n1(self):
        r = np.arange(6.01, 100.0, 0.01)
        assert krasikov_check(1, 1, r) <= KRASIKOV_BOUND

    def test_zero_order_classical_amplitude(self):
        r = np.linspace(50.0, 200.0, 20000)
        j0 = bessel_j_grid(0, r)[0]
        peak = float((r * j0**2).max())
        assert 0.6 <= peak <= 0.65  # oscillates just below 2/pi

    def test_growing_band_limits(self):
        for m_ord, n_ord in ((1, 2), (3, 3), (6, 5)):
            floor = 2 * (m_ord + n_ord + 1)
            r = np.arange(floor + 0.01, floor + 80.0, 0.02)
            assert krasikov_check(m_ord, n_ord, r) <= KRASIKOV_BOUND

    def test_domain_validation(self):
        with pytest.raises(ValueError):
            krasikov_check(1, 1, np.array([5.0]))
        with pytest.raises(ValueError):
            krasikov_check(0, 1, np.array([10.0]))

import math

import numpy as np
import pytest

from farsplit.bessel import bessel_j
from farsplit.farfield import AngularGrid, ArcMask, FarField, inner
from farsplit.split_ls import (
    SingularSystemError,
    SplitGeometry,
    assemble,
    completed_farfield,
    project_component,
    project_mask,
    solve,
    subspace_conditioning,
)
from farsplit.synth import Scene, random_modal_component, scene_farfield

from conftest import band_limited_field


def two_component_geometry(grid, n1=2, n2=3, dist=60.0, k=1.0):
    return SplitGeometry(
        centers=((0.0, 0.0), (dist / k, 0.0)),
        orders=(n1, n2),
        grid=grid,
        k=k,
    )


class TestProjections:
    def test_component_projection_fixes_subspace(self, grid, rng):
        vals = rng.standard_normal(7) + 1j * rng.standard_normal(7)
        member = FarField.from_window(grid, vals, order=3)
        from farsplit.farfield import translate

        member = translate(member, (-5.0, 2.0), 1.0)
        proj = project_component(member, (5.0, -2.0), 3, 1.0)
        assert (proj - member).norm() <= 1e-10 * member.norm()

    def test_idempotence(self, grid, rng):
        alpha = band_limited_field(rng, grid, band=40)
        once = project_component(alpha, (3.0, 1.0), 4, 1.0)
        twice = project_component(once, (3.0, 1.0), 4, 1.0)
        assert (twice - once).norm() <= 1e-10 * max(once.norm(), 1e-30)

    def test_self_adjoint(self, grid, rng):
        a = band_limited_field(rng, grid, band=30)
        b = band_limited_field(rng, grid, band=30)
        pa = project_component(a, (2.0, 7.0), 5, 1.0)
        pb = project_component(b, (2.0, 7.0), 5, 1.0)
        assert inner(pa, b) == pytest.approx(inner(a, pb), rel=1e-10)

    def test_mask_projection(self, grid, rng):
        alpha = band_limited_field(rng, grid)
        full = project_mask(alpha, ArcMask.full_circle())
        assert np.array_equal(full.samples, alpha.samples)
        omega = ArcMask(((0.2, 1.7),))
        once = project_mask(alpha, omega)
        twice = project_mask(once, omega)
        assert np.array_equal(once.samples, twice.samples)
        assert once.norm() <= alpha.norm()
        pa = project_mask(alpha, omega)
        beta = band_limited_field(rng, grid)
        assert inner(pa, beta) == pytest.approx(
            inner(alpha, project_mask(beta, omega)), rel=1e-10
        )


class TestAssemble:
    def test_single_component_no_mask_is_identity(self, grid):
        geometry = SplitGeometry(
            centers=((4.0, 4.0),), orders=(5,), grid=grid, k=1.0
        )
        system = assemble(geometry)
        assert np.allclose(system.matrix, np.eye(11), atol=1e-12)

    def test_two_component_cross_block(self, grid):
        n1, n2, dist = 2, 3, 60.0
        geometry = two_component_geometry(grid, n1, n2, dist)
        system = assemble(geometry)
        block = system.matrix[: 2 * n1 + 1, 2 * n1 + 1:]
        # entries have translation-kernel magnitude |J_{n-m}(k |c1-c2|)|
        for i, n in enumerate(range(-n1, n1 + 1)):
            for j, m in enumerate(range(-n2, n2 + 1)):
                assert abs(block[i, j]) == pytest.approx(
                    abs(bessel_j(n - m, dist)), abs=1e-12
                )
        opnorm = np.linalg.svd(block, compute_uv=False)[0]
        q = (2 * n1 + 1) * (2 * n2 + 1) / dist
        assert q < 1.0
        assert opnorm < 1.0
        assert opnorm <= math.sqrt(q) + 1e-12

    def test_duplicate_centers_rejected(self, grid):
        with pytest.raises(ValueError):
            SplitGeometry(
                centers=((1.0, 1.0), (1.0, 1.0)), orders=(2, 2), grid=grid
            )

    def test_order_too_large_for_grid(self):
        grid = AngularGrid(64)
        geometry = SplitGeometry(centers=((0.0, 0.0),), orders=(20,), grid=grid)
        with pytest.raises(ValueError):
            assemble(geometry)

    def test_arc_without_grid_points_rejected(self, grid):
        # a positive-measure arc squeezed between two grid nodes
        lo = 2.0 * math.pi * 3.25 / grid.size
        hi = 2.0 * math.pi * 3.75 / grid.size
        geometry = SplitGeometry(
            centers=((0.0, 0.0),), orders=(2,), grid=grid,
            omega=ArcMask(((lo, hi),)),
        )
        with pytest.raises(ValueError):
            assemble(geometry)

    def test_reference_condition_number(self, grid):
        geometry = SplitGeometry(
            centers=((24.0, -4.0), (-22.0, 23.0), (-15.0, -20.0)),
            orders=(7, 9, 6),
            grid=grid,
            k=1.0,
            omega=ArcMask(((math.pi / 2, math.pi / 2 + math.pi / 3),)),
        )
        system = assemble(geometry)
        assert system.dimension == 86 + 15 + 19 + 13
        assert 5.4e4 / 2 <= system.condition_number <= 5.4e4 * 2


class TestSolve:
    def test_exact_recovery_of_subspace_member(self, grid, rng):
        geometry = two_component_geometry(grid)
        vals = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        member = FarField.from_window(grid, vals, order=2)
        solution = solve(assemble(geometry), member)
        assert np.allclose(solution.alphas[0].values, vals, atol=1e-8)
        assert solution.alphas[1].norm() <= 1e-8
        assert solution.beta.norm() == 0.0
        assert solution.residual <= 1e-8

    def test_masked_scene_consistent_recovery(self, grid, rng):
        comp = random_modal_component(rng, (20.0, 5.0), 2.0)
        omega = ArcMask(((1.0, 1.4),))
        scene = Scene(k=1.0, components=(comp,), grid=grid, omega=omega)
        data = scene_farfield(scene)
        geometry = SplitGeometry(
            centers=(comp.center,),
            orders=(comp.effective_order(1.0),),
            grid=grid,
            k=1.0,
            omega=omega,
        )
        solution = solve(assemble(geometry), data.gamma)
        assert np.allclose(
            solution.alphas[0].values, data.truth[0].values, atol=1e-7
        )
        # the Galerkin beta approximates -(field on the arc)
        assert (solution.beta - data.beta_truth).norm() <= 1e-7
        completed = completed_farfield(solution, data.gamma, omega)
        total = data.gamma - data.beta_truth
        assert (completed - total).norm() <= 1e-7

    def test_mask_free_system_matches_stacked_least_squares(self, grid, rng):
        geometry = two_component_geometry(grid, n1=3, n2=2, dist=45.0)
        gamma = band_limited_field(rng, grid, band=60)
        solution = solve(assemble(geometry), gamma)
        system = assemble(geometry)
        w = grid.quadrature_weight()
        stacked = math.sqrt(w) * system._basis.T
        x, *_ = np.linalg.lstsq(stacked, math.sqrt(w) * gamma.samples, rcond=None)
        split = np.concatenate([wdw.values for wdw in solution.alphas])
        assert np.allclose(split, x, atol=1e-9)

    def test_singular_geometry_reported(self, grid):
        geometry = SplitGeometry(
            centers=((0.0, 0.0), (1e-9, 0.0)), orders=(3, 3), grid=grid
        )
        system = assemble(geometry)
        with pytest.raises(SingularSystemError) as err:
            solve(system, FarField.zero(grid))
        assert err.value.condition_number > 1e12


class TestStabilityCertification:
    def test_two_component_bound_holds(self, grid, rng):
        # perturbation errors stay below (1 - (2N1+1)(2N2+1)/D)^{-1} ||e||^2
        for _ in range(10):
            n1, n2 = int(rng.integers(0, 4)), int(rng.integers(0, 4))
            q_target = rng.uniform(0.3, 0.9)
            dist = max(
                (2 * n1 + 1) * (2 * n2 + 1) / q_target,
                2.0 * (n1 + n2 + 1) * 1.05,
            )
            phi = rng.uniform(0, 2 * math.pi)
            geometry = SplitGeometry(
                centers=(
                    (0.0, 0.0),
                    (dist * math.cos(phi), dist * math.sin(phi)),
                ),
                orders=(n1, n2),
                grid=grid,
                k=1.0,
            )
            system = assemble(geometry)
            truth = [
                rng.standard_normal(2 * n + 1) + 1j * rng.standard_normal(2 * n + 1)
                for n in (n1, n2)
            ]
            from farsplit.farfield import translate

            gamma0 = FarField.zero(grid)
            for (cx, cy), vals, n in zip(geometry.centers, truth, (n1, n2)):
                own = FarField.from_window(grid, vals, order=n)
                gamma0 = gamma0 + translate(own, (-cx, -cy), 1.0)
            noise = rng.standard_normal(grid.size) + 1j * rng.standard_normal(
                grid.size
            )
            noise = noise / np.linalg.norm(noise) * rng.uniform(0.01, 1.0)
            gamma1 = FarField(grid, gamma0.samples + noise)
            e_norm = (gamma1 - gamma0).norm()
            solution = solve(system, gamma1)
            q = (2 * n1 + 1) * (2 * n2 + 1) / dist
            constant = 1.0 / (1.0 - q)
            for window, vals in zip(solution.alphas, truth):
                err2 = np.sum(np.abs(window.values - vals) ** 2)
                assert err2 <= constant * e_norm**2 * (1.0 + 1e-9)


class TestConditioning:
    def test_point_source_reductions(self, grid):
        report = subspace_conditioning((0.0, 0.0), 0, (8.0, 0.0), 0, 1.0, grid)
        assert report.bound_csc == pytest.approx(
            1.0 / math.sqrt(1.0 - 1.0 / 8.0), rel=1e-12
        )
        report = subspace_conditioning((0.0, 0.0), 0, (30.0, 0.0), 4, 1.0, grid)
        assert report.bound_csc == pytest.approx(
            1.0 / math.sqrt(1.0 - 9.0 / 30.0), rel=1e-12
        )

    def test_infeasible_bound_flagged(self, grid):
        report = subspace_conditioning((0.0, 0.0), 3, (5.0, 0.0), 3, 1.0, grid)
        assert report.bound_csc is None
        assert not report.bound_feasible
        assert report.csc_angle >= 1.0

    def test_csc_below_bound_random_sweep(self, grid, rng):
        # 200 feasible random geometries: computed csc never beats the bound
        checked = 0
        while checked < 200:
            n1, n2 = int(rng.integers(0, 5)), int(rng.integers(0, 5))
            dist = rng.uniform(1.0, 120.0)
            k = rng.uniform(0.5, 2.0)
            q = (2 * n1 + 1) * (2 * n2 + 1) / (k * dist)
            if q >= 1.0 or k * dist + n1 + n2 > 200:
                continue
            phi = rng.uniform(0, 2 * math.pi)
            report = subspace_conditioning(
                (0.0, 0.0),
                n1,
                (dist * math.cos(phi), dist * math.sin(phi)),
                n2,
                k,
                grid,
            )
            assert report.bound_feasible
            assert report.csc_angle <= report.bound_csc * (1.0 + 1e-9)
            checked += 1

    def test_solution_map_norm_below_multi_constants(self, grid, rng):
        # the solve map is linear; its per-block operator norm obeys the
        # multi-component constants whenever the hypotheses are feasible
        from farsplit.bounds import BoundGeometry, TheoremId, evaluate_bound

        trials = 0
        while trials < 5:
            centers = []
            orders = []
            for i in range(3):
                centers.append(
                    (rng.uniform(-250, 250), rng.uniform(-250, 250))
                )
                orders.append(int(rng.integers(0, 3)))
            omega = ArcMask(((0.0, rng.uniform(0.02, 0.12)),))
            geometry = SplitGeometry(
                centers=tuple(centers),
                orders=tuple(orders),
                grid=grid,
                k=1.0,
                omega=omega,
            )
            report = evaluate_bound(
                TheoremId.LS_COMPLETE_MULTI,
                BoundGeometry(
                    k=1.0,
                    centers=tuple(centers),
                    orders=tuple(orders),
                    omega_measure=omega.grid_measure(grid),
                ),
            )
            if not report.hypotheses_ok:
                continue
            if max(abs(c[0]) + abs(c[1]) for c in centers) > 170:
                continue
            trials += 1
            system = assemble(geometry)
            w = grid.quadrature_weight()
            solve_map = math.sqrt(w) * np.linalg.solve(
                system.matrix, system._basis.conj()
            )
            n_pulse = system.omega_indices.size
            beta_norm = np.linalg.svd(
                solve_map[:n_pulse], compute_uv=False
            )[0]
            assert beta_norm**2 <= report.beta_constant * (1.0 + 1e-6)
            for sl, const in zip(system.slices, report.per_component):
                block_norm = np.linalg.svd(solve_map[sl], compute_uv=False)[0]
                assert block_norm**2 <= const * (1.0 + 1e-6)

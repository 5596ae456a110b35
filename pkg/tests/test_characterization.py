"""Equilibrium search and linearized coefficient extraction tests."""

import dataclasses
import math

import numpy as np
import pytest

from rotorlube.characterization import (
    CharacterizationOptions, characterize_bearing, export_coefficients_csv,
    find_equilibrium, linearized_coefficients, load_coefficients_csv)
from rotorlube.errors import EquilibriumError, ValidationError
from rotorlube.lubrication import (BearingGeometry, ShaftState, SolverOptions,
                                   build_grid, film_thickness, solve_film)
from rotorlube.units import ml_min_to_si

SPEED = 2.0 * math.pi * 75.0
Q_FLOOD = ml_min_to_si(546.0)
LOAD = (0.0, -3272.8)

# Frozen from a 60x60 run of this solver (regression baseline).
GOLDEN_FLOODED_ECC = 1.5983036654278594e-05
GOLDEN_STARVED_ECC = 3.2966693127124776e-05


@pytest.fixture(scope="module")
def geometry():
    return BearingGeometry(
        radius=0.045, width=0.070, radial_clearance=120e-6,
        groove_angular_position=0.0, groove_circumferential_length=16.2e-3,
        groove_axial_width=35e-3, oil_viscosity=0.094)


@pytest.fixture(scope="module")
def grid(geometry):
    return build_grid(geometry, 30, 30)


@pytest.fixture(scope="module")
def flooded_equilibrium(geometry, grid):
    return find_equilibrium(geometry, grid, Q_FLOOD, SPEED, LOAD)


class TestFindEquilibrium:
    def test_force_balances_load(self, geometry, grid, flooded_equilibrium):
        ex, ey = flooded_equilibrium
        state = ShaftState(ex, ey, rotational_speed=SPEED)
        sol = solve_film(geometry, state, grid, Q_FLOOD,
                         SolverOptions(tolerance=1e-7))
        fx, fy = sol.hydrodynamic_force
        load_norm = math.hypot(*LOAD)
        assert abs(fx - 0.0) < 1e-3 * load_norm
        assert abs(fy - 3272.8) < 1e-3 * load_norm

    def test_fine_mesh_regression_baseline(self, geometry):
        fine = build_grid(geometry, 60, 60)
        ex, ey = find_equilibrium(geometry, fine, Q_FLOOD, SPEED, LOAD)
        assert math.hypot(ex, ey) == pytest.approx(GOLDEN_FLOODED_ECC,
                                                   rel=2e-3)

    def test_starvation_increases_eccentricity(self, geometry,
                                               flooded_equilibrium):
        fine = build_grid(geometry, 60, 60)
        ex, ey = find_equilibrium(geometry, fine, 0.5 * Q_FLOOD, SPEED, LOAD)
        assert math.hypot(ex, ey) == pytest.approx(GOLDEN_STARVED_ECC,
                                                   rel=2e-3)
        assert GOLDEN_STARVED_ECC > GOLDEN_FLOODED_ECC

    def test_monotone_starvation_below_threshold(self, geometry, grid):
        magnitudes = []
        guess = None
        for frac in (1.0, 0.75, 0.5, 0.25):
            ex, ey = find_equilibrium(geometry, grid, frac * Q_FLOOD, SPEED,
                                      LOAD, initial_guess=guess)
            guess = (ex, ey)
            magnitudes.append(math.hypot(ex, ey))
        assert all(a < b for a, b in zip(magnitudes, magnitudes[1:]))

    def test_lighter_load_smaller_eccentricity(self, geometry, grid):
        # With the groove source active the unloaded journal is pushed off
        # center by the feed pressure, so the load -> 0 limit approaches
        # that offset point rather than the geometric center; the trend
        # toward lighter load is still monotone.
        mags = []
        for w in (3272.8, 1000.0, 300.0):
            ex, ey = find_equilibrium(geometry, grid, 0.5 * Q_FLOOD, SPEED,
                                      (0.0, -w))
            mags.append(math.hypot(ex, ey))
        assert mags[0] > mags[1] > mags[2]

    def test_zero_load_rejected(self, geometry, grid):
        with pytest.raises(ValidationError):
            find_equilibrium(geometry, grid, Q_FLOOD, SPEED, (0.0, 0.0))

    def test_overload_reports_best_iterate(self, geometry, grid):
        with pytest.raises(EquilibriumError) as err:
            find_equilibrium(geometry, grid, 0.25 * Q_FLOOD, SPEED,
                             (0.0, -5.0e6))
        assert err.value.best_eccentricity is not None
        assert err.value.best_residual > 0.0


class TestLinearizedCoefficients:
    def test_gradient_reconstruction(self, geometry, grid,
                                     flooded_equilibrium):
        coeffs = linearized_coefficients(geometry, grid, Q_FLOOD, SPEED,
                                         flooded_equilibrium)
        e0 = np.array(flooded_equilibrium)
        opts = SolverOptions(tolerance=1e-8)
        base = solve_film(geometry, ShaftState(*e0, rotational_speed=SPEED),
                          grid, Q_FLOOD, opts)
        f0 = np.array(base.hydrodynamic_force)
        delta = 1e-3 * geometry.radial_clearance
        for direction in ((1.0, 0.0), (0.0, 1.0), (0.7071, 0.7071)):
            d = delta * np.array(direction)
            sol = solve_film(geometry,
                             ShaftState(*(e0 + d), rotational_speed=SPEED),
                             grid, Q_FLOOD, opts)
            actual = np.array(sol.hydrodynamic_force) - f0
            predicted = -coeffs.stiffness @ d
            assert np.linalg.norm(actual - predicted) < \
                0.02 * np.linalg.norm(predicted)

    def test_step_halving_robustness(self, geometry, grid,
                                     flooded_equilibrium):
        base = linearized_coefficients(geometry, grid, Q_FLOOD, SPEED,
                                       flooded_equilibrium)
        halved = linearized_coefficients(
            geometry, grid, Q_FLOOD, SPEED, flooded_equilibrium,
            CharacterizationOptions(displacement_step=5e-4,
                                    velocity_step=5e-4))
        for full, half in ((base.stiffness, halved.stiffness),
                           (base.damping, halved.damping)):
            scale = np.abs(full).max()
            assert np.max(np.abs(full - half)) < 0.01 * scale

    def test_coefficients_vary_with_supply(self, geometry, grid):
        flooded = characterize_bearing(geometry, grid, Q_FLOOD, SPEED, LOAD)
        starved = characterize_bearing(geometry, grid, 0.5 * Q_FLOOD, SPEED,
                                       LOAD)
        dk = np.abs(flooded.stiffness - starved.stiffness).max()
        dc = np.abs(flooded.damping - starved.damping).max()
        assert dk > 0.1 * np.abs(flooded.stiffness).max()
        assert dc > 0.1 * np.abs(flooded.damping).max()

    def test_no_symmetry_enforced(self, geometry, grid, flooded_equilibrium):
        coeffs = linearized_coefficients(geometry, grid, Q_FLOOD, SPEED,
                                         flooded_equilibrium)
        k = coeffs.stiffness
        assert abs(k[0, 1] - k[1, 0]) > 1e-3 * np.abs(k).max()

    def test_continuity_over_narrow_supply_window(self, geometry, grid):
        # 1% supply spacing around the flooding threshold must not produce
        # jumps beyond 25% step to step.
        fracs = np.arange(0.96, 1.045, 0.01)
        rows = []
        guess = None
        for frac in fracs:
            coeffs = characterize_bearing(geometry, grid, frac * Q_FLOOD,
                                          SPEED, LOAD, initial_guess=guess)
            guess = (coeffs.eccentricity_x, coeffs.eccentricity_y)
            rows.append(np.concatenate([coeffs.stiffness.ravel(),
                                        coeffs.damping.ravel()]))
        rows = np.array(rows)
        assert np.all(np.isfinite(rows))
        # Entries crossing zero make per-entry relative steps meaningless,
        # so measure each step against the scale of its matrix block.
        for a, b in zip(rows, rows[1:]):
            for sl in (slice(0, 4), slice(4, 8)):
                step = np.abs(b[sl] - a[sl])
                scale = np.maximum(np.abs(a[sl]), np.abs(b[sl])).max()
                assert np.all(step <= 0.25 * scale)

    def test_cavitation_confined_downstream_at_flooded_equilibrium(
            self, geometry, grid, flooded_equilibrium):
        ex, ey = flooded_equilibrium
        state = ShaftState(ex, ey, rotational_speed=SPEED)
        sol = solve_film(geometry, state, grid, Q_FLOOD)
        alpha = grid.alpha_centers
        h = film_thickness(geometry, state, alpha)
        alpha_min = alpha[np.argmin(h)]
        cav = sol.oil_fraction[:, grid.n_axial // 2] < 1.0 - 1e-6
        upstream_arc = (alpha_min - alpha) % (2 * math.pi)
        assert not np.any(cav[(upstream_arc > 0) & (upstream_arc <= 2.0)])
        downstream_arc = (alpha - alpha_min) % (2 * math.pi)
        assert np.any(cav[(downstream_arc > 0) & (downstream_arc <= 2.0)])


class TestCoefficientTable:
    def test_csv_round_trip(self, geometry, grid, tmp_path,
                            flooded_equilibrium):
        coeffs = linearized_coefficients(geometry, grid, Q_FLOOD, SPEED,
                                         flooded_equilibrium)
        path = tmp_path / "coeffs.csv"
        export_coefficients_csv(path, [coeffs])
        loaded = load_coefficients_csv(path)
        assert len(loaded) == 1
        got = loaded[0]
        assert got.supply_flowrate == coeffs.supply_flowrate
        assert got.rotational_speed == coeffs.rotational_speed
        np.testing.assert_array_equal(got.stiffness, coeffs.stiffness)
        np.testing.assert_array_equal(got.damping, coeffs.damping)

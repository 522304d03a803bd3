# Copyright (C) 2026 The clockforge authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License"); you may
# not use this file except in compliance with the License. You may obtain
# a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
# WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
# License for the specific language governing permissions and limitations
# under the License.
"""Tests for the Chebyshev propagator and the moving-well error analysis."""

# Built in Libraries
import math

# 3rd Party Libraries
import numpy as np

import pytest

from scipy import linalg

# Custom libraries
from clockforge.circuit_model import random_circuit
from clockforge.clock_hamiltonian import analytic_ground_state, success_probability
from clockforge.exceptions import ConfigError, NumericalError
from clockforge.evolution import (
    chebyshev_step,
    continuum_ground_state,
    default_dt,
    error_series,
    fourth_derivative_bound,
    galilean_reference,
    instantaneous_overlap,
    plan_steps,
    propagate,
    propagate_full,
    run_naive,
    run_stage2,
    run_three_stage,
    self_convergence_factor,
    spectral_window,
)
from clockforge.reduced_model import (
    Schedule,
    TridiagonalHamiltonian,
    build_HI_reduced,
    build_HP_reduced,
)
from clockforge.spectral import lowest_eigenpairs


@pytest.fixture(scope="module")
def well():
    """Continuum ground state of the eta=4 moving-frame well."""
    return continuum_ground_state(4.0)


def test_spectral_window_encloses_gershgorin_discs():
    center, half = spectral_window(build_HP_reduced(6, 4.0))
    assert center - half == pytest.approx(0.125 - 0.5)
    assert center + half == pytest.approx(2.125 + 1.0)


def test_chebyshev_step_matches_matrix_exponential(rng):
    h = TridiagonalHamiltonian(rng.normal(size=9), rng.normal(size=8))
    psi = rng.normal(size=9) + 1j * rng.normal(size=9)
    psi /= np.linalg.norm(psi)
    dt = 0.4 / spectral_window(h)[1]
    expected = linalg.expm(-1j * dt * h.to_dense()) @ psi
    np.testing.assert_allclose(chebyshev_step(h, psi, dt), expected, atol=1e-12)


def test_chebyshev_step_on_eigenstate_of_diagonal():
    h = TridiagonalHamiltonian([0.0, 1.0], [0.0])
    psi = np.array([1.0, 0.0], dtype=complex)
    for _ in range(50):
        psi = chebyshev_step(h, psi, 0.7)
    assert abs(psi[0]) == pytest.approx(1.0, abs=1e-12)
    assert abs(psi[1]) < 1e-12


def test_chebyshev_step_scalar_hamiltonian_is_a_phase():
    h = TridiagonalHamiltonian([2.0], [])
    out = chebyshev_step(h, np.array([1.0 + 0j]), 0.25)
    assert out[0] == pytest.approx(np.exp(-0.5j))


def test_chebyshev_series_must_converge():
    with pytest.raises(NumericalError):
        chebyshev_step(build_HP_reduced(4, 4.0), np.ones(5, dtype=complex), 1000.0)


def test_problem_ground_state_is_stationary():
    h = build_HP_reduced(10, 4.0)
    psi = analytic_ground_state(10, 4.0).astype(complex)
    dt = 0.45 / spectral_window(h)[1]
    for _ in range(int(100.0 / dt)):
        psi = chebyshev_step(h, psi, dt)
    assert instantaneous_overlap(psi, h) == pytest.approx(1.0, abs=1e-10)


def test_default_dt_is_clipped_by_window_bound():
    steps = default_dt(Schedule("composite_three_stage", 10, 4.0, tau=80.0))
    clip = 0.45 / (0.5 * 2.125 + 1.0)
    assert steps["stage1"] == pytest.approx(50.0 / 2000.0)
    assert steps["stage2_moving_well"] == pytest.approx(clip)
    assert steps["stage3"] == pytest.approx(50.0 / 2000.0)


def test_plan_lands_on_stage_bounds():
    schedule = Schedule("composite_three_stage", 4, 4.0, tau=3.0, T1=1.0, T3=2.0)
    plan = plan_steps(schedule, {"stage1": 0.3, "stage3": 0.7})
    assert plan[0].steps == 4
    assert plan[2].steps == 3
    assert plan[1].start == pytest.approx(1.0)
    assert plan[-1].end == pytest.approx(schedule.total_time)
    for stage in plan:
        assert stage.start + stage.steps * stage.h == pytest.approx(stage.end)


def test_plan_rejects_non_positive_step():
    with pytest.raises(ConfigError):
        plan_steps(Schedule("naive", 4, 4.0, T=10.0), 0.0)


def test_stability_guard():
    with pytest.raises(ConfigError, match="stability guard"):
        run_naive(4, 4.0, T=10.0, dt=2.0)


@pytest.mark.parametrize("psi0", [np.ones(3), np.array([1.0, 1.0, 0.0, 0.0, 0.0])])
def test_initial_state_is_validated(psi0):
    with pytest.raises(ConfigError):
        propagate(Schedule("naive", 4, 4.0, T=1.0), psi0)


def test_zero_duration_keeps_initial_state():
    result = run_naive(6, 4.0, T=0.0)
    assert result.steps == 0
    np.testing.assert_array_equal(result.final_state, np.eye(7)[0])
    assert result.success_probability_final == 0.0


def test_evolution_result_tables():
    result = run_naive(4, 4.0, T=5.0)
    frame = result.to_dataframe()
    assert list(frame.columns) == ["t", "overlap", "norm"]
    assert frame["t"].iloc[-1] == pytest.approx(5.0)
    assert result.max_norm_drift < 1e-10
    summary = result.summary()
    assert summary["steps"] == result.steps
    assert summary["params"]["kind"] == "naive"


def test_instantaneous_overlap():
    h = build_HI_reduced(8, 4.0, 40.0, 160.0)
    (_, g0), (_, g1) = lowest_eigenpairs(h, 2)
    assert instantaneous_overlap(g0, h) == pytest.approx(1.0)
    assert instantaneous_overlap(g1, h) == pytest.approx(0.0, abs=1e-10)
    hp = build_HP_reduced(8, 4.0)
    assert instantaneous_overlap(analytic_ground_state(8, 4.0), hp) == pytest.approx(
        1.0, abs=1e-8
    )
    with pytest.raises(ConfigError):
        instantaneous_overlap(np.ones(3), h)


def test_midpoint_integrator_is_second_order():
    schedule = Schedule("naive", 4, 4.0, T=10.0)
    psi0 = np.eye(5, dtype=complex)[0]
    factor = self_convergence_factor(schedule, psi0, 0.1)
    assert 3.6 <= factor <= 4.4


def test_full_space_run_stays_in_history_span(rng):
    circuit = random_circuit(2, 3, rng)
    schedule = Schedule("naive", 3, 4.0, T=4.0)
    psi0 = np.eye(4, dtype=complex)[0]
    full = propagate_full(schedule, circuit, psi0, dt=0.1)
    reduced = propagate(schedule, psi0, dt=0.1)
    assert full.max_leakage < 1e-10
    np.testing.assert_allclose(full.reduced_states[-1], reduced.final_state, atol=1e-8)


def test_stage2_initial_overlap_range():
    with pytest.raises(ConfigError):
        run_stage2(6, 4.0, initial_overlap=0.0)


def test_continuum_ground_energy_lies_inside_well(well):
    assert -0.875 < well.epsilon0 < 1.125
    assert well.refinement_shift <= 1e-6
    assert np.all(well.phi >= 0.0)
    assert np.sum(well.phi ** 2) * well.h == pytest.approx(1.0)


def test_continuum_tail_decays(well):
    right = well.phi[well.grid > 3.0]
    left = well.phi[well.grid < -3.0]
    assert np.all(np.diff(right) < 0)
    assert np.all(np.diff(left) > 0)


def test_continuum_table(well):
    frame = well.to_dataframe()
    assert list(frame.columns) == ["s", "phi", "potential", "d4phi"]
    assert frame["potential"].min() == pytest.approx(-0.875, abs=1e-5)


def test_coarse_continuum_grid_is_rejected():
    with pytest.raises(NumericalError):
        continuum_ground_state(4.0, h_grid=0.1)


@pytest.mark.parametrize(
    "kwargs", [{"eta": 1.0}, {"eta": 4.0, "S": 5.0}, {"eta": 4.0, "h_grid": 0.5}]
)
def test_continuum_arguments(kwargs):
    with pytest.raises(ConfigError):
        continuum_ground_state(**kwargs)


def test_reference_at_rest_is_real_and_centered(well):
    reference = galilean_reference(well, 0.0, 0.0, 20)
    np.testing.assert_array_equal(reference.imag, 0.0)
    assert np.all(reference.real >= -1e-12)
    assert int(np.argmax(reference.real)) == 0
    assert np.linalg.norm(reference) == pytest.approx(1.0)


def test_reference_translates_one_site_per_tau(well):
    tau = 40.0
    early = galilean_reference(well, 1.0 / tau, 15 * tau, 40)
    late = galilean_reference(well, 1.0 / tau, 16 * tau, 40)
    np.testing.assert_allclose(np.abs(late[1:]), np.abs(early[:-1]), atol=1e-12)


def test_reference_phase(well):
    velocity, t = 0.025, 300.0
    reference = galilean_reference(well, velocity, t, 20)
    sites = np.arange(21)
    expected = velocity * sites - 0.5 * velocity ** 2 * t - well.epsilon0 * t
    occupied = np.abs(reference) > 1e-8
    np.testing.assert_allclose(
        reference[occupied] / np.abs(reference[occupied]),
        np.exp(1j * expected[occupied]),
        atol=1e-9,
    )


def test_reference_outside_window(well):
    with pytest.raises(ConfigError):
        galilean_reference(well, 1.0, 100.0, 20)


def test_error_bound_is_linear_in_sites(well):
    small = fourth_derivative_bound(well, 100, 40.0)
    large = fourth_derivative_bound(well, 200, 40.0)
    assert large / small == pytest.approx(2.0, rel=0.05)
    assert small / 101 == pytest.approx(large / 201)
    with pytest.raises(ConfigError):
        fourth_derivative_bound(well, 10, 0.0)


def test_error_series_needs_moving_well_run(well):
    with pytest.raises(ConfigError):
        error_series(run_naive(4, 4.0, T=1.0), well, 40.0)


@pytest.fixture(scope="module")
def moving_well_runs():
    """Moving-well runs keyed by (L, initial overlap), computed on first use."""
    runs = {}

    def run(L, initial_overlap):
        key = (L, initial_overlap)
        if key not in runs:
            runs[key] = run_stage2(L, 4.0, tau=40.0, initial_overlap=initial_overlap)
        return runs[key]

    return run


@pytest.mark.slow
@pytest.mark.parametrize("L", [20, 100])
@pytest.mark.parametrize("initial_overlap", [0.9, 0.5])
def test_overlap_stays_flat_during_moving_well(
    well, moving_well_runs, L, initial_overlap
):
    result = moving_well_runs(L, initial_overlap)
    assert result.overlap_series[0] == pytest.approx(initial_overlap, abs=1e-8)
    assert np.ptp(result.overlap_series) <= 0.05
    assert result.max_norm_drift <= 1e-8

    series = error_series(result, well, 40.0)
    assert series.within_bound is True
    assert np.all(series.abs_error_sq <= series.bound)
    assert series.interior_rel_error_ptp <= 0.05
    assert list(series.to_dataframe().columns) == [
        "t",
        "abs_err_sq",
        "rel_err_sq",
        "reference_overlap",
    ]


@pytest.mark.slow
@pytest.mark.parametrize("initial_overlap", [0.9, 0.5])
def test_final_error_does_not_grow_with_sites(
    well, moving_well_runs, initial_overlap
):
    short = error_series(moving_well_runs(20, initial_overlap), well, 40.0)
    long = error_series(moving_well_runs(100, initial_overlap), well, 40.0)
    ratio = long.rel_error_sq[-1] / short.rel_error_sq[-1]
    assert 0.5 <= ratio <= 2.0


@pytest.mark.slow
def test_ground_state_start_tracks_reference(well, moving_well_runs):
    result = moving_well_runs(20, 1.0)
    assert np.min(result.overlap_series) > 0.999

    series = error_series(result, well, 40.0)
    # h=1 lattice against the continuum profile; see DESIGN.md
    assert np.max(series.rel_error_sq) < 0.05
    assert series.summary()["max_rel_error_sq"] == pytest.approx(
        np.max(series.rel_error_sq)
    )
    assert series.within_bound is True


def test_edge_records_are_excluded_from_the_spread(well):
    result = run_stage2(8, 4.0, tau=2.0)
    series = error_series(result, well, 2.0, with_bound=False)
    centers = series.times / 2.0
    np.testing.assert_array_equal(series.interior, (centers >= 3.0) & (centers <= 5.0))
    assert not series.interior[0] and not series.interior[-1]
    expected = np.ptp(series.rel_error_sq[series.interior])
    assert series.interior_rel_error_ptp == pytest.approx(expected)

    narrow = error_series(result, well, 2.0, with_bound=False, edge_margin=5.0)
    assert narrow.interior_rel_error_ptp is None
    assert narrow.summary()["interior_rel_error_ptp"] is None


@pytest.mark.slow
def test_three_stage_run_is_independent_of_length():
    results = {L: run_three_stage(L, 4.0, tau=40.0) for L in (20, 100)}
    for L, result in results.items():
        assert result.final_overlap >= 0.95
        assert result.success_probability_final > 0.9
        assert result.success_probability_final <= success_probability(L, 4.0) + 0.01
        assert result.max_norm_drift <= 1e-8
        assert result.config["total_time"] == pytest.approx(100.0 + 40.0 * L)
    assert results[100].success_probability_final == pytest.approx(
        results[20].success_probability_final, abs=0.02
    )


@pytest.mark.slow
def test_naive_run_fails_on_exponential_gap():
    result = run_naive(12, 4.0, T=1000.0)
    assert result.final_overlap < 0.1


@pytest.mark.slow
def test_naive_run_is_adiabatic_for_short_circuits():
    result = run_naive(2, 4.0, T=5000.0)
    assert result.final_overlap > 0.95
    assert result.success_probability_final == pytest.approx(
        success_probability(2, 4.0), abs=0.05
    )


def test_success_probability_formula_matches_ground_state():
    ground = analytic_ground_state(20, 4.0)
    assert ground[-1] ** 2 == pytest.approx(success_probability(20, 4.0))
    assert success_probability(20, 4.0) == pytest.approx(1 - 1 / 16, abs=1e-12)
    assert math.isclose(success_probability(1, 2.0), 0.8)

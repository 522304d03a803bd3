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
"""Tests for eigensolvers, gap scans and the analytic gap bounds."""

# Built in Libraries
import math

# 3rd Party Libraries
import numpy as np

import pytest

# Custom libraries
from clockforge.clock_hamiltonian import analytic_ground_state
from clockforge.exceptions import ConfigError, NumericalError
from clockforge.reduced_model import (
    TridiagonalHamiltonian,
    build_HB_reduced,
    build_HP_reduced,
    build_s_star_matrix,
    critical_point,
    interpolation_family,
)
from clockforge.spectral import (
    gap_scaling_fit,
    gap_scan,
    gershgorin_bounds,
    ground_state,
    lowest_eigenpairs,
    lowest_eigenvalues,
    lowest_gap,
    min_gap,
    scaled_stage1_gap_bound,
    secular_gap_scaling,
    secular_roots,
    stage1_gap_bound,
    sturm_count,
    type_two_count,
    weyl_gap_bound,
    weyl_ingredients,
)


def test_driver_spectrum_is_zero_then_one():
    values = lowest_eigenvalues(build_HB_reduced(6), 2)
    np.testing.assert_allclose(values, [0.0, 1.0], atol=1e-12)


def test_problem_ground_state_is_geometric():
    energy, vector = ground_state(build_HP_reduced(10, 4.0))
    assert abs(energy) < 1e-10
    np.testing.assert_allclose(vector, analytic_ground_state(10, 4.0), atol=1e-8)
    np.testing.assert_allclose(vector[1:] / vector[:-1], 4.0, rtol=1e-6)


def test_random_tridiagonal_matches_dense_solver(rng):
    h = TridiagonalHamiltonian(rng.normal(size=8), rng.normal(size=7))
    dense = np.linalg.eigvalsh(h.to_dense())
    pairs = lowest_eigenpairs(h, 8)
    np.testing.assert_allclose([value for value, _ in pairs], dense, atol=1e-10)
    for value, vector in pairs:
        np.testing.assert_allclose(h.matvec(vector), value * vector, atol=1e-9)
        assert vector[np.argmax(np.abs(vector))] > 0


def test_eigenvalues_only_skips_vectors():
    pairs = lowest_eigenpairs(build_HP_reduced(5, 4.0), 3, eigenvalues_only=True)
    assert [vector for _, vector in pairs] == [None, None, None]


@pytest.mark.parametrize("k", [0, 7])
def test_eigenpair_count_is_checked(k):
    with pytest.raises(ConfigError):
        lowest_eigenpairs(build_HB_reduced(5), k)


def test_sturm_count_matches_dense_spectrum(rng):
    h = TridiagonalHamiltonian(rng.normal(size=12), rng.normal(size=11))
    dense = np.linalg.eigvalsh(h.to_dense())
    probes = np.concatenate(
        [[dense[0] - 1.0], 0.5 * (dense[1:] + dense[:-1]), [dense[-1] + 1.0]]
    )
    for probe in probes:
        assert sturm_count(h, probe) == int(np.sum(dense < probe))


def test_gap_below_eigensolver_tolerance_is_resolved():
    eta, N = 4.0, 15
    s_star = critical_point(eta)
    h = build_s_star_matrix(N, eta) * s_star
    expected = s_star * secular_roots(eta, N).gap
    assert expected < 1e-8
    assert lowest_gap(h) == pytest.approx(expected, rel=1e-5)


def test_naive_scan_starts_with_unit_gap():
    scan = gap_scan(interpolation_family("naive", 8, 4.0), np.linspace(0, 1, 11))
    assert scan.gap[0] == pytest.approx(1.0, abs=1e-12)
    assert list(scan.to_dataframe().columns) == ["param", "e0", "e1", "gap"]
    assert scan.summary()["points"] == 11


def test_naive_scan_minimum_sits_at_critical_point():
    family = interpolation_family("naive", 12, 4.0)
    scan = gap_scan(family, np.linspace(0, 1, 201))
    assert scan.refined
    assert scan.min_location == pytest.approx(critical_point(4.0), abs=1e-3)
    assert scan.min_value < 1e-5
    assert scan.min_gap == (scan.min_location, scan.min_value)


def test_unrefined_scan_reports_grid_minimum():
    grid = np.linspace(0, 1, 21)
    scan = gap_scan(interpolation_family("naive", 6, 4.0), grid, refine=False)
    assert not scan.refined
    assert scan.min_location in grid


def test_scan_grid_must_increase():
    with pytest.raises(ConfigError):
        gap_scan(interpolation_family("naive", 4, 4.0), [0.5, 0.2])


def test_threaded_scan_matches_sequential():
    family = interpolation_family("stage1", 10, 5.0)
    grid = np.linspace(0, 1, 9)
    serial = gap_scan(family, grid, refine=False, workers=1)
    threaded = gap_scan(family, grid, refine=False, workers=3)
    np.testing.assert_allclose(serial.gap, threaded.gap)


def test_min_gap_ratio_approaches_inverse_bias():
    _, gap12 = min_gap(interpolation_family("naive", 12, 4.0), (0.0, 1.0))
    _, gap13 = min_gap(interpolation_family("naive", 13, 4.0), (0.0, 1.0))
    assert gap13 / gap12 == pytest.approx(0.25, rel=0.05)


def test_min_gap_rejects_endpoint_minimum():
    def family(s):
        return build_HB_reduced(4) * (1.0 + s)

    with pytest.raises(NumericalError):
        min_gap(family, (0.0, 1.0), points=11)


def test_min_gap_bracket_is_checked():
    with pytest.raises(ConfigError):
        min_gap(interpolation_family("naive", 4, 4.0), (1.0, 0.0))


def test_secular_roots_match_critical_point_matrix():
    solution = secular_roots(4.0, 10)
    assert solution.delta_at_eta == pytest.approx(4.0 ** -9 * 3.75)
    assert solution.z1 < 4.0 < solution.z2
    assert abs(solution.z1 - 4.0) < 2 * solution.delta_at_eta
    assert abs(solution.z2 - 4.0) < 2 * solution.delta_at_eta

    values = lowest_eigenvalues(build_s_star_matrix(10, 4.0), 2)
    assert solution.ground_energy == pytest.approx(values[0], abs=1e-8)
    assert solution.excited_energy == pytest.approx(values[1], abs=1e-8)
    assert solution.alpha2 == pytest.approx(math.log(solution.z2))


@pytest.mark.parametrize("eta", [4.0, 5.0, 8.0])
@pytest.mark.parametrize("N", range(8, 41))
def test_secular_roots_agree_with_eigensolver(eta, N):
    solution = secular_roots(eta, N)
    assert solution.delta1 < 0.0 < solution.delta2
    assert solution.eigenvalue_splitting < 0.5 * solution.root_separation

    values = lowest_eigenvalues(build_s_star_matrix(N, eta), 2)
    assert solution.ground_energy == pytest.approx(values[0], abs=1e-8)
    assert solution.excited_energy == pytest.approx(values[1], abs=1e-8)


@pytest.mark.parametrize(
    "eta, N", [(4.0, 5), (4.0, 12), (6.0, 8), (10.0, 8), (4.0, 40)]
)
def test_eigenvalue_splitting_is_below_root_splitting(eta, N):
    solution = secular_roots(eta, N)
    assert solution.gap < 0.5 * solution.root_separation
    assert solution.root_separation > 0.0


@pytest.mark.parametrize("eta, N", [(3.5, 10), (4.0, 4)])
def test_secular_roots_domain(eta, N):
    with pytest.raises(ConfigError):
        secular_roots(eta, N)


def test_secular_roots_underflow():
    with pytest.raises(NumericalError):
        secular_roots(4.0, 600)


def test_gershgorin_discs_of_problem_hamiltonian():
    discs = gershgorin_bounds(build_HP_reduced(8, 4.0))
    assert discs[0] == pytest.approx((2.0, 0.5))
    assert discs[3] == pytest.approx((2.125, 1.0))
    assert discs[-1] == pytest.approx((0.125, 0.5))


def test_gershgorin_discs_contain_spectrum(rng):
    h = TridiagonalHamiltonian(rng.normal(size=10), rng.normal(size=9))
    discs = gershgorin_bounds(h)
    for value in np.linalg.eigvalsh(h.to_dense()):
        assert any(abs(value - center) <= radius + 1e-12 for center, radius in discs)


@pytest.mark.parametrize("N", [5, 10, 40])
def test_two_levels_below_band(N):
    assert type_two_count(4.0, N) == 2


def test_weyl_bound_value_and_positivity():
    assert weyl_gap_bound(4.0) == pytest.approx(0.38924, abs=1e-5)
    assert all(weyl_gap_bound(eta) > 0 for eta in np.linspace(4.0, 64.0, 61))
    with pytest.raises(ConfigError):
        weyl_gap_bound(3.0)


def test_weyl_ingredients():
    ingredients = weyl_ingredients(20, 4.0)
    assert ingredients.max_eigenvalue == pytest.approx(4.0 / (2 * math.e), rel=1e-9)
    assert ingredients.min_eigenvalue == pytest.approx(-1.0 / 8.0, abs=1e-9)
    assert ingredients.kappa2 > 0.5 * (1 / 4.0 + 4.0) - 1.0 - 1e-9


@pytest.mark.parametrize("eta", [4.0, 8.0])
def test_final_stage_gap_exceeds_weyl_bound(eta):
    scan = gap_scan(interpolation_family("stage3", 20, eta), np.linspace(0, 1, 41))
    assert scan.min_value >= weyl_gap_bound(eta)


@pytest.mark.slow
@pytest.mark.parametrize(
    "family, eta, bound",
    [("stage1", 5.0, 0.5 * (1 - 1 / math.e) - 0.3), ("stage3", 4.0, 0.389)],
)
def test_finite_gaps_do_not_depend_on_length(family, eta, bound):
    grid = np.linspace(0, 1, 101)
    minima = []
    for L in (20, 100, 400):
        scan = gap_scan(interpolation_family(family, L, eta), grid, refine=False)
        assert scan.min_value >= bound
        minima.append(scan.min_value)
    assert (max(minima) - min(minima)) / min(minima) < 0.05


def test_stage1_bound_pieces():
    assert stage1_gap_bound(5.0, 0.5) == pytest.approx(
        0.5 * (1 - 1 / math.e) - 0.3
    )
    assert stage1_gap_bound(5.0, 0.1) == pytest.approx(0.5 * (3 - 1 / math.e - 1))
    assert stage1_gap_bound(5.0, 0.5) > 0.016
    assert scaled_stage1_gap_bound(5.0) == pytest.approx(
        2.5 * (1 - 1 / math.e) - 1.5
    )


def test_stage1_gap_exceeds_piecewise_bound():
    grid = np.linspace(0, 1, 41)
    scan = gap_scan(interpolation_family("stage1", 20, 5.0), grid, refine=False)
    bounds = np.array([stage1_gap_bound(5.0, s) for s in grid])
    assert np.all(scan.gap >= bounds)


def test_secular_scaling_slope():
    fit = secular_gap_scaling(4.0, range(10, 25, 2))
    assert fit.slope == pytest.approx(-math.log(4.0), abs=0.028)
    assert fit.residual < 0.1
    assert fit.to_json_dict()["mode"] == "secular"
    np.testing.assert_allclose(fit.to_dataframe()["s_min"], critical_point(4.0))


@pytest.mark.slow
def test_eigen_scaling_slope():
    fit = gap_scaling_fit(4.0, [6, 8, 10, 12], workers=1)
    assert fit.slope == pytest.approx(fit.expected_slope, rel=0.05)
    assert fit.residual < 0.1
    assert list(fit.to_dataframe().columns) == ["L", "s_min", "gap", "ln_gap"]


def test_scaling_fit_needs_four_lengths():
    with pytest.raises(ConfigError):
        gap_scaling_fit(4.0, [10, 12, 12, 14])


def test_scaling_fit_mode_is_checked():
    with pytest.raises(ConfigError):
        gap_scaling_fit(4.0, [6, 8, 10, 12], mode="dense")


@pytest.mark.slow
def test_eigen_scaling_over_the_reference_range():
    fit = gap_scaling_fit(4.0, range(10, 25, 2), workers=1)
    assert fit.slope == pytest.approx(-math.log(4.0), rel=0.02)
    assert fit.residual < 0.1
    np.testing.assert_allclose(fit.locations, critical_point(4.0), atol=1e-3)

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
"""
Spectra of tridiagonal Hamiltonians and the gap analysis built on them.

Eigenvalues come from LAPACK Sturm-sequence bisection (``stebz``) and
eigenvectors from inverse iteration (``stein``), both reached through
``scipy.linalg``. Gaps far below the matrix norm are resolved by a second
bisection on the shifted matrix; beyond that the secular equation of the
critical-point matrix gives them in closed form.
"""

# Built in Libraries
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

# 3rd Party Libraries
import numpy as np

import pandas as pd

from scipy import linalg, optimize

# Custom libraries
from clockforge.config_utilities import thread_count
from clockforge.exceptions import ConfigError, NumericalError
from clockforge.reduced_model import (
    Family,
    TridiagonalHamiltonian,
    build_HI_reduced,
    build_HP_reduced,
    build_s_star_matrix,
    critical_point,
    family_callable,
    interpolation_family,
)

logger = logging.getLogger(__name__)

EIGEN_TOL = 1e-13
MIN_GAP_XTOL = 1e-10
GAP_UNDERFLOW = 1e-300

Eigenpair = Tuple[float, Optional[np.ndarray]]


def _solver_tol(h: TridiagonalHamiltonian) -> float:
    return EIGEN_TOL * max(1.0, h.norm_inf())


def _fix_sign(vector: np.ndarray) -> np.ndarray:
    """Flip a real eigenvector so that its largest entry is positive."""
    if vector[np.argmax(np.abs(vector))] < 0:
        return -vector
    return vector


def lowest_eigenpairs(
    h: TridiagonalHamiltonian,
    k: int,
    eigenvalues_only: bool = False,
    tol: Optional[float] = None,
) -> List[Eigenpair]:
    """
    Compute the k smallest eigenvalues and, optionally, their eigenvectors.

    Parameters
    ----------
    h : TridiagonalHamiltonian
        Matrix of size L+1.
    k : int
        Number of eigenpairs, 1 <= k <= L+1.
    eigenvalues_only : bool
        Skip inverse iteration and return ``None`` in place of vectors.
    tol : float, optional
        Absolute bisection tolerance. Defaults to ``1e-13 * max(1, ||h||_inf)``.

    Returns
    -------
    List[Tuple[float, Optional[np.ndarray]]]
        Eigenvalues in ascending order with unit-norm eigenvectors whose
        largest entry is positive.

    Raises
    ------
    NumericalError
        If LAPACK bisection or inverse iteration fails.
    """
    if not 1 <= k <= h.size:
        raise ConfigError(f"Requested {k} eigenpairs of a {h.size}x{h.size} matrix.")

    if h.size == 1:
        vector = None if eigenvalues_only else np.ones(1)
        return [(float(h.diag[0]), vector)]

    tol = _solver_tol(h) if tol is None else tol
    options = dict(
        select="i", select_range=(0, k - 1), lapack_driver="stebz", tol=tol
    )
    try:
        if eigenvalues_only:
            values = linalg.eigvalsh_tridiagonal(h.diag, h.offdiag, **options)
            return [(float(value), None) for value in values]
        values, vectors = linalg.eigh_tridiagonal(h.diag, h.offdiag, **options)
    except (linalg.LinAlgError, ValueError) as err:
        err_str = f"Tridiagonal eigensolver failed on {h.label!r}: {err}"
        raise NumericalError(err_str) from err

    return [
        (float(values[i]), _fix_sign(vectors[:, i])) for i in range(values.size)
    ]


def lowest_eigenvalues(h: TridiagonalHamiltonian, k: int) -> np.ndarray:
    """Return the k smallest eigenvalues as an array."""
    return np.array([value for value, _ in lowest_eigenpairs(h, k, True)])


def ground_state(h: TridiagonalHamiltonian) -> Tuple[float, np.ndarray]:
    """Return the lowest eigenvalue and its positive-leading eigenvector."""
    return lowest_eigenpairs(h, 1)[0]


def sturm_count(h: TridiagonalHamiltonian, probe: float) -> int:
    """
    Count the eigenvalues of h below probe.

    Runs the LDL^T factorization of ``h - probe I`` and counts negative pivots.
    Zero pivots are nudged to ``-pivmin``.
    """
    pivmin = np.finfo(float).tiny * max(1.0, float(np.max(h.offdiag ** 2, initial=0.0)))
    count = 0
    for index in range(h.size):
        pivot = h.diag[index] - probe
        if index:
            pivot -= h.offdiag[index - 1] ** 2 / previous
        if abs(pivot) < pivmin:
            pivot = -pivmin
        if pivot < 0:
            count += 1
        previous = pivot
    return count


def _two_lowest(h: TridiagonalHamiltonian) -> Tuple[float, float, float]:
    """Return (e0, e1, gap) with the gap resolved below the solver tolerance."""
    e0, e1 = lowest_eigenvalues(h, 2)
    estimate = e1 - e0
    tol0 = _solver_tol(h)
    if estimate > 1e5 * tol0:
        return e0, e1, estimate

    shifted = TridiagonalHamiltonian(h.diag - e0, h.offdiag, h.eta, h.label)
    tol2 = max(min(1e-6 * max(estimate, 0.0), tol0), GAP_UNDERFLOW)
    s0, s1 = (value for value, _ in lowest_eigenpairs(shifted, 2, True, tol2))
    return e0 + s0, e0 + s1, s1 - s0


def lowest_gap(h: TridiagonalHamiltonian) -> float:
    """
    Return e1 - e0.

    When the first estimate is near the bisection tolerance, the matrix is
    shifted by e0 and bisected again with a tolerance tied to the gap, so
    gaps far below ``||h|| * eps`` are still resolved.
    """
    return _two_lowest(h)[2]


@dataclass
class GapScan:
    """
    The two lowest levels of a family sampled on a grid.

    Attributes
    ----------
    grid, e0, e1, gap : np.ndarray
        Parameter values and the level data at each of them.
    min_location, min_value : float
        Location and value of the smallest gap, refined by local search when
        the grid minimum is interior.
    refined : bool
        Whether local refinement was applied.
    """

    grid: np.ndarray
    e0: np.ndarray
    e1: np.ndarray
    gap: np.ndarray
    min_location: float
    min_value: float
    refined: bool = False

    @property
    def min_gap(self) -> Tuple[float, float]:
        """Getter for (location, value) of the smallest gap."""
        return self.min_location, self.min_value

    def to_dataframe(self) -> pd.DataFrame:
        """Tabulate the scan as ``param, e0, e1, gap``."""
        return pd.DataFrame(
            {"param": self.grid, "e0": self.e0, "e1": self.e1, "gap": self.gap}
        )

    def summary(self) -> dict:
        """Summarize the scan for JSON output."""
        return {
            "points": int(self.grid.size),
            "min_gap": self.min_value,
            "min_location": self.min_location,
            "refined": self.refined,
            "max_gap": float(np.max(self.gap)),
        }


def _evaluate_grid(
    evaluate: Callable[[float], TridiagonalHamiltonian],
    grid: Sequence[float],
    workers: Optional[int],
) -> np.ndarray:
    workers = thread_count() if workers is None else workers

    def point(param: float) -> Tuple[float, float, float]:
        return _two_lowest(evaluate(float(param)))

    if workers <= 1:
        rows = [point(param) for param in grid]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(point, grid))
    return np.array(rows, dtype=float).reshape(-1, 3)


def gap_scan(
    family: Family,
    grid: Sequence[float],
    refine: bool = True,
    workers: Optional[int] = None,
) -> GapScan:
    """
    Sample the two lowest levels of a family on a grid.

    Parameters
    ----------
    family : Schedule or callable
        A schedule (sampled in time) or any map from a parameter to a
        TridiagonalHamiltonian.
    grid : Sequence[float]
        Sorted parameter values.
    refine : bool
        Refine an interior grid minimum with ``refine_minimum``.
    workers : int, optional
        Thread count; defaults to ``CLOCKFORGE_THREADS``.

    Returns
    -------
    GapScan
        Level data in grid order.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 1:
        raise ConfigError("A gap scan needs at least one grid point.")
    if np.any(np.diff(grid) <= 0):
        raise ConfigError("Gap-scan grid must be strictly increasing.")

    evaluate = family_callable(family)
    levels = _evaluate_grid(evaluate, grid, workers)
    e0, e1, gaps = levels[:, 0], levels[:, 1], levels[:, 2]
    logger.debug("Scanned %d grid points", grid.size)

    index = int(np.argmin(gaps))
    location, value, refined = float(grid[index]), float(gaps[index]), False
    if refine and 0 < index < grid.size - 1:
        location, value = refine_minimum(
            evaluate, grid[index - 1], grid[index], grid[index + 1]
        )
        refined = True

    return GapScan(grid, e0, e1, gaps, location, value, refined)


def refine_minimum(
    evaluate: Callable[[float], TridiagonalHamiltonian],
    left: float,
    middle: float,
    right: float,
    xtol: float = MIN_GAP_XTOL,
) -> Tuple[float, float]:
    """
    Refine a bracketed gap minimum by golden-section search.

    The first pass runs to parameter tolerance xtol. Exponentially narrow
    avoided crossings are narrower than that, so the search is repeated on a
    bracket around the current best point with a tolerance 1000x tighter until
    the gap changes by less than 1% or the tolerance reaches double precision.
    """

    def gap_at(param: float) -> float:
        return lowest_gap(evaluate(float(param)))

    scale = max(abs(middle), 1e-300)
    tol = xtol / scale
    try:
        best, value, _ = optimize.golden(
            gap_at, brack=(left, middle, right), tol=tol, full_output=True
        )
    except ValueError:
        logger.warning("Grid minimum at %g is not strictly bracketed", middle)
        return float(middle), gap_at(middle)

    while tol * 1e-3 >= 1e-16:
        width = 8.0 * tol * max(abs(best), 1e-300)
        try:
            candidate, candidate_value, _ = optimize.golden(
                gap_at,
                brack=(best - width, best, best + width),
                tol=tol * 1e-3,
                full_output=True,
            )
        except ValueError:
            break
        tol *= 1e-3
        change = abs(candidate_value - value) / max(value, GAP_UNDERFLOW)
        if candidate_value < value:
            best, value = candidate, candidate_value
        logger.debug("Refined minimum to %.17g (gap %.6e)", best, value)
        if change < 0.01:
            break

    return float(best), float(value)


def min_gap(
    family: Family,
    bracket: Tuple[float, float],
    points: int = 401,
    workers: Optional[int] = None,
) -> Tuple[float, float]:
    """
    Locate the smallest gap of a family inside a bracket.

    Parameters
    ----------
    family : Schedule or callable
        The family to search.
    bracket : Tuple[float, float]
        Parameter interval expected to contain an interior minimum.
    points : int
        Size of the coarse grid.

    Returns
    -------
    Tuple[float, float]
        ``(s_min, gap_min)``.

    Raises
    ------
    NumericalError
        If the coarse minimum sits on an end of the bracket.
    """
    low, high = bracket
    if not high > low or points < 3:
        raise ConfigError(f"Invalid min-gap bracket {bracket} with {points} points.")

    grid = np.linspace(low, high, points)
    evaluate = family_callable(family)
    gaps = _evaluate_grid(evaluate, grid, workers)[:, 2]
    index = int(np.argmin(gaps))
    if index in (0, points - 1):
        err_str = (
            f"No interior gap minimum in [{low}, {high}] "
            f"(minimum at {grid[index]})."
        )
        raise NumericalError(err_str)
    return refine_minimum(evaluate, grid[index - 1], grid[index], grid[index + 1])


@dataclass(frozen=True)
class SecularSolution:
    """
    The two hyperbolic eigenvalues of the critical-point matrix.

    Roots z1 < eta < z2 of ``(z - eta)^2 = Delta(z)^2`` with
    ``Delta(z) = z^-(N-1) (eta - 1/z)``; each gives an eigenvalue
    ``eta - cosh(ln z)``. The larger root gives the lower eigenvalue.

    The roots are kept as offsets ``delta1 = z1 - eta < 0 < delta2 = z2 - eta``.
    For large N the offsets fall below the float spacing at eta, so ``z1`` and
    ``z2`` may round onto eta; splittings are computed from the offsets.
    """

    eta: float
    N: int
    z1: float
    z2: float
    lambda1: float
    lambda2: float
    gap: float
    delta_at_eta: float
    delta1: float
    delta2: float

    @property
    def root_separation(self) -> float:
        """Getter for z2 - z1, taken from the offsets."""
        return self.delta2 - self.delta1

    @property
    def eigenvalue_splitting(self) -> float:
        """Getter for |lambda1 - lambda2|, taken from the offsets."""
        return self.gap

    @property
    def alpha1(self) -> float:
        """Getter for ln z1."""
        return math.log(self.z1)

    @property
    def alpha2(self) -> float:
        """Getter for ln z2."""
        return math.log(self.z2)

    @property
    def ground_energy(self) -> float:
        """Getter for the lower of the two eigenvalues."""
        return min(self.lambda1, self.lambda2)

    @property
    def excited_energy(self) -> float:
        """Getter for the higher of the two eigenvalues."""
        return max(self.lambda1, self.lambda2)


def secular_roots(eta: float, N: int) -> SecularSolution:
    """
    Solve the secular equation of the N x N critical-point matrix.

    Parameters
    ----------
    eta : float
        Bias parameter, eta >= 4.
    N : int
        Matrix size, N >= 5.

    Returns
    -------
    SecularSolution
        Roots found by bisection on the offset delta = z - eta to relative
        tolerance 1e-14, with the gap evaluated without cancellation as
        ``(delta2 - delta1)(1 - 1/(z1 z2))/2``.

    Raises
    ------
    NumericalError
        If Delta(eta) underflows or a bisection bracket fails.
    """
    if eta < 4.0 or N < 5:
        raise ConfigError(f"Secular roots need eta >= 4 and N >= 5, got {eta}, {N}.")
    eta, N = float(eta), int(N)

    def big_delta(z: float) -> float:
        return z ** (-(N - 1)) * (eta - 1.0 / z)

    delta = big_delta(eta)
    if delta < GAP_UNDERFLOW:
        err_str = (
            f"Delta(eta) underflows for eta={eta}, N={N}; the gap is below "
            f"{GAP_UNDERFLOW:g}."
        )
        raise NumericalError(err_str)

    xtol = 1e-14 * 0.5 * delta
    try:
        upper = optimize.bisect(
            lambda d: d - big_delta(eta + d), 0.0, 2.0 * delta, xtol=xtol, rtol=1e-14
        )
        lower = optimize.bisect(
            lambda d: d + big_delta(eta + d), -2.0 * delta, 0.0, xtol=xtol, rtol=1e-14
        )
    except ValueError as err:
        err_str = f"Secular bisection failed for eta={eta}, N={N}: {err}"
        raise NumericalError(err_str) from err
    if not lower < 0.0 < upper:
        err_str = (
            f"Secular offsets out of order for eta={eta}, N={N}: "
            f"{lower:g}, {upper:g}."
        )
        raise NumericalError(err_str)

    z1, z2 = eta + lower, eta + upper
    lambda1 = eta - 0.5 * (z1 + 1.0 / z1)
    lambda2 = eta - 0.5 * (z2 + 1.0 / z2)
    # lambda1 - lambda2 = (d2 - d1)(1 - 1/(z1 z2))/2 with z1 z2 > 1
    gap = 0.5 * (upper - lower) * (1.0 - 1.0 / (z1 * z2))
    return SecularSolution(
        eta, N, z1, z2, lambda1, lambda2, gap, delta, lower, upper
    )


def gershgorin_bounds(h: TridiagonalHamiltonian) -> List[Tuple[float, float]]:
    """Return the Gershgorin disc (center, radius) of every row."""
    radii = np.zeros(h.size)
    radii[:-1] += np.abs(h.offdiag)
    radii[1:] += np.abs(h.offdiag)
    return [(float(c), float(r)) for c, r in zip(h.diag, radii)]


def _check_bias(eta: float, minimum: float) -> float:
    if not eta >= minimum:
        raise ConfigError(f"eta must be >= {minimum}, got {eta}.")
    return float(eta)


def weyl_gap_bound(eta: float) -> float:
    """
    Lower bound on the gap of the final-stage family, eta >= 4.

    Examples
    --------
    >>> round(weyl_gap_bound(4.0), 5)
    0.38924
    """
    eta = _check_bias(eta, 4.0)
    return 0.5 * (1.0 / eta + eta) - 1.0 - eta / (2.0 * math.e)


def stage1_gap_bound(eta: float, s: float) -> float:
    """
    Piecewise Gershgorin lower bound on the gap of the first-stage family.

    ``(1 - 1/e)/2 - 3/(2 eta)`` for s > 1/eta and ``(3 - 1/e - 5/eta)/2``
    otherwise. The bound is positive for eta >= 5.
    """
    eta = _check_bias(eta, 1.0 + np.finfo(float).eps)
    if s > 1.0 / eta:
        return 0.5 * (1.0 - 1.0 / math.e) - 1.5 / eta
    return 0.5 * (3.0 - 1.0 / math.e - 5.0 / eta)


def scaled_stage1_gap_bound(eta: float) -> float:
    """Gap bound ``eta (1 - 1/e)/2 - 3/2`` of the first-stage family divided by s."""
    eta = _check_bias(eta, 1.0 + np.finfo(float).eps)
    return 0.5 * eta * (1.0 - 1.0 / math.e) - 1.5


@dataclass(frozen=True)
class WeylIngredients:
    """Extreme eigenvalues of P - M_f and the second eigenvalue of P."""

    min_eigenvalue: float
    max_eigenvalue: float
    kappa2: float


def weyl_ingredients(L: int, eta: float) -> WeylIngredients:
    """
    Compute the numbers the final-stage gap bound rests on.

    P is the reduced problem Hamiltonian and M_f the moving well parked on
    the last site. Their difference is diagonal; its largest entry is
    eta/(2e), at site L-1.
    """
    problem = build_HP_reduced(L, eta)
    parked = build_HI_reduced(L, eta, 1.0, float(L))
    difference = problem + (-1.0) * parked
    smallest = lowest_eigenvalues(difference, 1)[0]
    largest = -lowest_eigenvalues((-1.0) * difference, 1)[0]
    kappa2 = lowest_eigenvalues(problem, 2)[1]
    return WeylIngredients(float(smallest), float(largest), float(kappa2))


def type_two_count(eta: float, N: int) -> int:
    """Count eigenvalues of the critical-point matrix below (eta+1)/2."""
    return sturm_count(build_s_star_matrix(N, eta), 0.5 * (eta + 1.0))


@dataclass
class ScalingFit:
    """
    Least-squares fit of ln(gap_min) against L.

    Attributes
    ----------
    eta : float
        Bias parameter.
    mode : str
        ``eigen`` (scanned minimum gaps) or ``secular`` (closed form).
    L_values, locations, gaps : np.ndarray
        Per-L minimum locations and gaps.
    slope, intercept, residual : float
        Fit parameters and the largest absolute fit error in ln units.
    """

    eta: float
    mode: str
    L_values: np.ndarray
    locations: np.ndarray
    gaps: np.ndarray
    slope: float
    intercept: float
    residual: float
    extras: dict = field(default_factory=dict)

    @property
    def expected_slope(self) -> float:
        """Getter for -ln(eta), the slope an eta^-L gap produces."""
        return -math.log(self.eta)

    def to_dataframe(self) -> pd.DataFrame:
        """Tabulate per-L results as ``L, s_min, gap, ln_gap``."""
        return pd.DataFrame(
            {
                "L": self.L_values,
                "s_min": self.locations,
                "gap": self.gaps,
                "ln_gap": np.log(self.gaps),
            }
        )

    def to_json_dict(self) -> dict:
        """Serialize the fit as a JSON-ready dictionary."""
        return {
            "eta": self.eta,
            "mode": self.mode,
            "L": [int(value) for value in self.L_values],
            "gap": [float(value) for value in self.gaps],
            "slope": self.slope,
            "intercept": self.intercept,
            "residual": self.residual,
            "expected_slope": self.expected_slope,
        }


def _linear(x: np.ndarray, slope: float, intercept: float) -> np.ndarray:
    return slope * x + intercept


def _naive_min_gap(eta: float, L: int) -> Tuple[float, float]:
    return min_gap(interpolation_family("naive", L, eta), (0.0, 1.0), workers=1)


def gap_scaling_fit(
    eta: float,
    L_values: Sequence[int],
    mode: str = "eigen",
    workers: Optional[int] = None,
) -> ScalingFit:
    """
    Fit the exponential collapse of the naive minimum gap.

    Parameters
    ----------
    eta : float
        Bias parameter.
    L_values : Sequence[int]
        At least four distinct clock lengths.
    mode : str
        ``eigen`` locates each minimum with ``min_gap``; ``secular`` uses
        s* times the secular gap of the (L+1)-site critical-point matrix.
    workers : int, optional
        Threads used across L values.

    Returns
    -------
    ScalingFit
        Slope expected near -ln(eta).

    Raises
    ------
    NumericalError
        If any gap underflows.
    """
    L_values = np.array(sorted(set(int(value) for value in L_values)))
    if L_values.size < 4:
        err_str = (
            f"A scaling fit needs at least 4 distinct L values, got {L_values.size}."
        )
        raise ConfigError(err_str)
    if L_values[0] < 1:
        raise ConfigError("Every L must be >= 1.")

    if mode == "eigen":
        workers = thread_count() if workers is None else workers
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results = list(pool.map(lambda L: _naive_min_gap(eta, L), L_values))
        locations = np.array([location for location, _ in results])
        gaps = np.array([gap for _, gap in results])
    elif mode == "secular":
        s_star = critical_point(eta)
        locations = np.full(L_values.size, s_star)
        gaps = np.array([s_star * secular_roots(eta, L + 1).gap for L in L_values])
    else:
        raise ConfigError(f"Unknown scaling mode '{mode}'; expected eigen or secular.")

    if np.any(gaps < GAP_UNDERFLOW):
        err_str = (
            "Minimum gap underflowed; restrict the L range"
            + (" or use the secular mode." if mode == "eigen" else ".")
        )
        raise NumericalError(err_str)

    log_gaps = np.log(gaps)
    (slope, intercept), _ = optimize.curve_fit(
        _linear, L_values.astype(float), log_gaps
    )
    residual = float(np.max(np.abs(log_gaps - _linear(L_values, slope, intercept))))
    logger.info("Scaling fit over %d L values: slope %.6f", L_values.size, slope)
    return ScalingFit(
        float(eta),
        mode,
        L_values,
        locations,
        gaps,
        float(slope),
        float(intercept),
        residual,
    )


def secular_gap_scaling(eta: float, L_values: Sequence[int]) -> ScalingFit:
    """Run ``gap_scaling_fit`` in secular mode."""
    return gap_scaling_fit(eta, L_values, mode="secular")

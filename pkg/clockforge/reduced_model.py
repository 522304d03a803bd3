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
Reduced (L+1)-dimensional Hamiltonians and the schedules that interpolate them.

Every Hamiltonian in this package is real symmetric tridiagonal once it is
restricted to the span of the circuit history states, so the reduced model is
the workhorse for spectra and dynamics. Site index m runs over 0...L.
"""

# Built in Libraries
import logging
import math
from collections import namedtuple
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, Union

# 3rd Party Libraries
import numpy as np

import pandas as pd

# Custom libraries
from clockforge.exceptions import ConfigError

logger = logging.getLogger(__name__)

COMPONENTS = ("HB", "HP", "HI")

SCHEDULE_KINDS = (
    "naive",
    "stage1",
    "stage2_moving_well",
    "stage3",
    "composite_three_stage",
)

Ramp = namedtuple("Ramp", ["func", "max_slope"])

RAMPS = {
    "linear": Ramp(lambda u: u, 1.0),
    "smoothstep": Ramp(lambda u: u * u * (3.0 - 2.0 * u), 1.5),
}

Term = Tuple[float, str, Optional[float]]


@dataclass(frozen=True, eq=False)
class TridiagonalHamiltonian:
    """
    A real symmetric tridiagonal matrix stored as its two distinct bands.

    Attributes
    ----------
    diag : np.ndarray
        Diagonal, length L+1.
    offdiag : np.ndarray
        Sub/super diagonal, length L.
    eta : float, optional
        Bias parameter the matrix was built with, if any.
    label : str
        Free-form provenance label such as ``"HP"`` or ``"HI(t=40)"``.
    """

    diag: np.ndarray
    offdiag: np.ndarray
    eta: Optional[float] = None
    label: str = ""

    def __post_init__(self) -> None:
        diag = np.array(self.diag, dtype=float).reshape(-1)
        offdiag = np.array(self.offdiag, dtype=float).reshape(-1)

        if diag.size < 1:
            raise ConfigError("A tridiagonal Hamiltonian needs at least one site.")
        if offdiag.size != diag.size - 1:
            err_str = (
                f"Off-diagonal length {offdiag.size} does not match "
                f"diagonal length {diag.size}."
            )
            raise ConfigError(err_str)
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(offdiag))):
            raise ConfigError(f"Hamiltonian {self.label!r} has non-finite entries.")

        diag.setflags(write=False)
        offdiag.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def size(self) -> int:
        """Getter for the matrix dimension L+1."""
        return self.diag.size

    @property
    def L(self) -> int:
        """Getter for the clock length L."""
        return self.diag.size - 1

    def to_dense(self) -> np.ndarray:
        """Return the full dense matrix."""
        return (
            np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)
        )

    def matvec(self, vector: np.ndarray) -> np.ndarray:
        """Multiply a (possibly complex) vector by the matrix in O(L)."""
        out = self.diag * vector
        out[:-1] += self.offdiag * vector[1:]
        out[1:] += self.offdiag * vector[:-1]
        return out

    def reversed(self) -> "TridiagonalHamiltonian":
        """Return the matrix with site m relabelled as L-m."""
        return TridiagonalHamiltonian(
            self.diag[::-1], self.offdiag[::-1], self.eta, f"reversed({self.label})"
        )

    def norm_inf(self) -> float:
        """Return the infinity norm (maximum absolute row sum)."""
        rows = np.abs(self.diag).copy()
        rows[:-1] += np.abs(self.offdiag)
        rows[1:] += np.abs(self.offdiag)
        return float(rows.max())

    def allclose(self, other: "TridiagonalHamiltonian", atol: float = 1e-12) -> bool:
        """Check entrywise agreement with another matrix of the same size."""
        return (
            self.size == other.size
            and np.allclose(self.diag, other.diag, rtol=0.0, atol=atol)
            and np.allclose(self.offdiag, other.offdiag, rtol=0.0, atol=atol)
        )

    def __add__(self, other: "TridiagonalHamiltonian") -> "TridiagonalHamiltonian":
        if not isinstance(other, TridiagonalHamiltonian):
            return NotImplemented
        if other.size != self.size:
            err_str = f"Cannot add Hamiltonians of size {self.size} and {other.size}."
            raise ConfigError(err_str)
        eta = self.eta if self.eta == other.eta else None
        return TridiagonalHamiltonian(
            self.diag + other.diag,
            self.offdiag + other.offdiag,
            eta,
            f"{self.label}+{other.label}",
        )

    def __mul__(self, scalar: float) -> "TridiagonalHamiltonian":
        if not isinstance(scalar, (int, float, np.floating, np.integer)):
            return NotImplemented
        return TridiagonalHamiltonian(
            scalar * self.diag,
            scalar * self.offdiag,
            self.eta,
            f"{float(scalar):g}*{self.label}",
        )

    __rmul__ = __mul__

    def to_dataframe(self) -> pd.DataFrame:
        """
        Tabulate the matrix as ``m, diag, offdiag_to_next``.

        The last row has no next site, so its off-diagonal cell is empty.
        """
        offdiag = np.append(self.offdiag, np.nan)
        return pd.DataFrame(
            {"m": np.arange(self.size), "diag": self.diag, "offdiag_to_next": offdiag}
        )

    def to_csv(self, path: str) -> None:
        """Write the matrix in the ``m,diag,offdiag_to_next`` CSV layout."""
        self.to_dataframe().to_csv(path, index=False, float_format="%.17g")

    @classmethod
    def from_csv(
        cls, path: str, eta: Optional[float] = None, label: str = ""
    ) -> "TridiagonalHamiltonian":
        """Read a matrix written by ``to_csv``."""
        df = pd.read_csv(path)
        missing = {"m", "diag", "offdiag_to_next"} - set(df.columns)
        if missing:
            raise ConfigError(f"{path} is missing column(s) {sorted(missing)}.")
        df = df.sort_values("m")
        return cls(
            df["diag"].to_numpy(), df["offdiag_to_next"].to_numpy()[:-1], eta, label
        )


def _check_L(L: int) -> int:
    if int(L) != L or L < 1:
        raise ConfigError(f"L must be an integer >= 1, got {L}.")
    return int(L)


def _check_eta(eta: float) -> float:
    if not eta > 1.0:
        raise ConfigError(f"eta must be greater than 1, got {eta}.")
    return float(eta)


def _check_tau(tau: float) -> float:
    if not tau > 0.0:
        raise ConfigError(f"tau must be positive, got {tau}.")
    return float(tau)


def build_HB_reduced(L: int) -> TridiagonalHamiltonian:
    """
    Build the reduced beginning Hamiltonian, diag(0, 1, ..., 1).

    Examples
    --------
    >>> build_HB_reduced(2).diag
    array([0., 1., 1.])
    """
    L = _check_L(L)
    diag = np.ones(L + 1)
    diag[0] = 0.0
    return TridiagonalHamiltonian(diag, np.zeros(L), None, "HB")


def build_HP_reduced(L: int, eta: float) -> TridiagonalHamiltonian:
    """
    Build the reduced problem Hamiltonian.

    The diagonal is ``(eta/2, (eta+1/eta)/2, ..., (eta+1/eta)/2, 1/(2 eta))``
    and every off-diagonal entry is -1/2. Its ground energy is exactly zero.

    Parameters
    ----------
    L : int
        Number of gates, L >= 1.
    eta : float
        Bias parameter, eta > 1.

    Returns
    -------
    TridiagonalHamiltonian
        The (L+1)x(L+1) matrix labelled ``"HP"``.
    """
    L = _check_L(L)
    eta = _check_eta(eta)
    diag = np.full(L + 1, 0.5 * (eta + 1.0 / eta))
    diag[0] = 0.5 * eta
    diag[-1] = 0.5 / eta
    return TridiagonalHamiltonian(diag, np.full(L, -0.5), eta, "HP")


def moving_well_diagonal(L: int, eta: float, tau: float, t: float) -> np.ndarray:
    """Return d_m(t) = 1/(2 eta) + (eta/2)(1 - exp(-(t/tau - m)^2)) for m = 0...L."""
    sites = np.arange(L + 1)
    well = np.exp(-((t / tau - sites) ** 2))
    return 0.5 / eta + 0.5 * eta * (1.0 - well)


def build_HI_reduced(
    L: int, eta: float, tau: float, t: float
) -> TridiagonalHamiltonian:
    """
    Build the moving-well Hamiltonian H_I(t).

    A Gaussian dip of depth eta/2 sits at site t/tau on top of the flat level
    ``1/(2 eta) + eta/2``; the hopping is -1/2 between neighbouring sites.

    Examples
    --------
    >>> round(build_HI_reduced(3, 4.0, 40.0, 0.0).diag[1], 3)
    1.389
    """
    L = _check_L(L)
    eta = _check_eta(eta)
    tau = _check_tau(tau)
    diag = moving_well_diagonal(L, eta, tau, float(t))
    return TridiagonalHamiltonian(diag, np.full(L, -0.5), eta, f"HI(t={t:g})")


def build_s_star_matrix(N: int, eta: float) -> TridiagonalHamiltonian:
    """
    Build the N x N matrix with diagonal (eta/2, eta, ..., eta, eta/2).

    Off-diagonal entries are -1/2. This is the naive interpolation at its
    critical point divided by the interpolation parameter, written in the
    index convention of the secular equation.
    """
    if int(N) != N or N < 2:
        raise ConfigError(f"N must be an integer >= 2, got {N}.")
    eta = _check_eta(eta)
    diag = np.full(int(N), eta)
    diag[0] = diag[-1] = 0.5 * eta
    return TridiagonalHamiltonian(diag, np.full(int(N) - 1, -0.5), eta, "Hs*")


def critical_point(eta: float) -> float:
    """Return s* = 2/(eta - 1/eta + 2), where the naive gap closes."""
    eta = _check_eta(eta)
    return 2.0 / (eta - 1.0 / eta + 2.0)


def potential_profile(h: TridiagonalHamiltonian) -> pd.DataFrame:
    """
    View the diagonal of a Hamiltonian as a potential on lattice sites.

    Returns
    -------
    pandas.DataFrame
        Columns ``m``, ``potential`` and ``depth``, the latter measured from
        the highest site so that wells show up as negative values.
    """
    return pd.DataFrame(
        {
            "m": np.arange(h.size),
            "potential": h.diag,
            "depth": h.diag - h.diag.max(),
        }
    )


@dataclass(frozen=True)
class Schedule:
    """
    A time-parameterized family of reduced Hamiltonians.

    Attributes
    ----------
    kind : str
        One of ``SCHEDULE_KINDS``.
    L : int
        Number of gates.
    eta : float
        Bias parameter.
    tau : float
        Time the moving well spends per site.
    T1, T3 : float
        Durations of the first and last interpolation stages.
    T : float
        Duration of the naive interpolation.
    ramp : str
        Interpolation shape for ramped stages, ``linear`` or ``smoothstep``.
    """

    kind: str
    L: int
    eta: float
    tau: float = 40.0
    T1: float = 50.0
    T3: float = 50.0
    T: float = 1000.0
    ramp: str = "linear"

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            err_str = (
                f"Unknown schedule kind '{self.kind}'; "
                f"expected one of {', '.join(SCHEDULE_KINDS)}."
            )
            raise ConfigError(err_str)
        if self.ramp not in RAMPS:
            err_str = f"Unknown ramp '{self.ramp}'; expected one of {', '.join(RAMPS)}."
            raise ConfigError(err_str)
        _check_L(self.L)
        _check_eta(self.eta)
        _check_tau(self.tau)
        for name in ("T1", "T3", "T"):
            if not getattr(self, name) >= 0.0:
                raise ConfigError(f"{name} must be non-negative.")

    @property
    def stages(self) -> List[str]:
        """Getter for the names of the stages in time order."""
        if self.kind == "composite_three_stage":
            return ["stage1", "stage2_moving_well", "stage3"]
        return [self.kind]

    def stage_duration(self, stage: str) -> float:
        """Return the duration of a single named stage."""
        return {
            "naive": self.T,
            "stage1": self.T1,
            "stage2_moving_well": self.L * self.tau,
            "stage3": self.T3,
        }[stage]

    @property
    def total_time(self) -> float:
        """Getter for the total schedule duration."""
        return float(sum(self.stage_duration(stage) for stage in self.stages))

    def stage_bounds(self) -> List[float]:
        """Return the stage boundary times, starting at 0 and ending at total_time."""
        bounds = [0.0]
        for stage in self.stages:
            bounds.append(bounds[-1] + self.stage_duration(stage))
        return bounds

    def locate(self, t: float) -> Tuple[str, float]:
        """
        Find the stage active at time t and the time elapsed inside it.

        A boundary time belongs to the earlier stage; both stages agree there.
        """
        total = self.total_time
        slack = 1e-12 * max(1.0, total)
        if t < -slack or t > total + slack:
            err_str = f"Time {t} lies outside the schedule range [0, {total}]."
            raise ConfigError(err_str)
        t = min(max(t, 0.0), total)

        bounds = self.stage_bounds()
        for index, stage in enumerate(self.stages):
            if t <= bounds[index + 1] or index == len(self.stages) - 1:
                return stage, t - bounds[index]
        raise AssertionError("unreachable")

    def _ramp(self, elapsed: float, duration: float) -> float:
        u = 1.0 if duration == 0.0 else min(max(elapsed / duration, 0.0), 1.0)
        return RAMPS[self.ramp].func(u)

    def terms_at(self, t: float) -> List[Term]:
        """
        Decompose H(t) into weighted building blocks.

        Returns
        -------
        List[Tuple[float, str, Optional[float]]]
            ``(weight, component, t_param)`` triples where component is one of
            ``HB``, ``HP`` or ``HI``; t_param is the moving-well time for ``HI``
            and None otherwise.
        """
        stage, elapsed = self.locate(t)
        duration = self.stage_duration(stage)

        if stage == "stage2_moving_well":
            return [(1.0, "HI", elapsed)]

        s = self._ramp(elapsed, duration)
        if stage == "naive":
            return [(1.0 - s, "HB", None), (s, "HP", None)]
        if stage == "stage1":
            return [(1.0 - s, "HB", None), (s, "HI", 0.0)]
        return [(1.0 - s, "HI", self.L * self.tau), (s, "HP", None)]


def component_reduced(
    schedule: Schedule, component: str, t_param: Optional[float]
) -> TridiagonalHamiltonian:
    """Build one building block of a schedule in the reduced space."""
    if component == "HB":
        return build_HB_reduced(schedule.L)
    if component == "HP":
        return build_HP_reduced(schedule.L, schedule.eta)
    if component == "HI":
        return build_HI_reduced(schedule.L, schedule.eta, schedule.tau, t_param)
    raise ConfigError(f"Unknown Hamiltonian component '{component}'.")


def hamiltonian_at(schedule: Schedule, t: float) -> TridiagonalHamiltonian:
    """
    Evaluate a schedule at time t.

    Parameters
    ----------
    schedule : Schedule
        The schedule to evaluate.
    t : float
        Time in ``[0, schedule.total_time]``.

    Returns
    -------
    TridiagonalHamiltonian
        The weighted sum of the schedule's components. Zero-weight components
        are skipped, so boundary values equal the endpoint Hamiltonians exactly.
    """
    diag = np.zeros(schedule.L + 1)
    offdiag = np.zeros(schedule.L)
    for weight, component, t_param in schedule.terms_at(t):
        if weight == 0.0:
            continue
        h = component_reduced(schedule, component, t_param)
        diag += weight * h.diag
        offdiag += weight * h.offdiag
    label = f"{schedule.kind}(t={t:g})"
    return TridiagonalHamiltonian(diag, offdiag, schedule.eta, label)


def interpolation_family(
    kind: str, L: int, eta: float, tau: float = 40.0
) -> Schedule:
    """
    Build a unit-duration linear schedule so that time equals the parameter s.

    Parameters
    ----------
    kind : str
        ``naive``, ``stage1`` or ``stage3``.
    """
    if kind not in ("naive", "stage1", "stage3"):
        err_str = f"Interpolation family must be naive, stage1 or stage3, got '{kind}'."
        raise ConfigError(err_str)
    return Schedule(kind=kind, L=L, eta=eta, tau=tau, T1=1.0, T3=1.0, T=1.0)


def lipschitz_constant(schedule: Schedule, stage: str) -> float:
    """
    Bound the time derivative of H(t) in the infinity norm on one stage.

    The moving well changes site m's diagonal at rate
    ``(eta/tau) x exp(-x^2)`` with ``x = t/tau - m``, whose maximum is
    ``(eta/tau)/sqrt(2e)``. Ramped stages change at ``s'(t)`` times the norm of
    the endpoint difference.
    """
    if stage not in schedule.stages:
        err_str = f"Schedule '{schedule.kind}' has no stage '{stage}'."
        raise ConfigError(err_str)

    if stage == "stage2_moving_well":
        return schedule.eta / schedule.tau / math.sqrt(2.0 * math.e)

    duration = schedule.stage_duration(stage)
    if duration == 0.0:
        return 0.0

    L, eta, tau = schedule.L, schedule.eta, schedule.tau
    if stage == "naive":
        start, end = build_HB_reduced(L), build_HP_reduced(L, eta)
    elif stage == "stage1":
        start, end = build_HB_reduced(L), build_HI_reduced(L, eta, tau, 0.0)
    else:
        start, end = build_HI_reduced(L, eta, tau, L * tau), build_HP_reduced(L, eta)
    delta = end + (-1.0) * start
    return delta.norm_inf() * RAMPS[schedule.ramp].max_slope / duration


Family = Union[Schedule, Callable[[float], TridiagonalHamiltonian]]


def family_callable(family: Family) -> Callable[[float], TridiagonalHamiltonian]:
    """Turn a Schedule or a plain callable into a parameter -> Hamiltonian map."""
    if isinstance(family, Schedule):
        return lambda t: hamiltonian_at(family, t)
    if callable(family):
        return family
    raise ConfigError(f"Cannot evaluate a family of type {type(family).__name__}.")

"""Spectral-quantity estimators operating on a trajectory of expectations.

Three readouts:
  * gap_from_ratio      -> E1 - E0 from the ratio of two commutator orders
  * sum_from_log_slope  -> E0 + E1 from the log-magnitude decay rate
  * second_gap          -> E2 - E1 from the decay of the ratio's residual
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .evolution import Trajectory

IMAG_FRACTION_WARN = 0.01


class PreAsymptoticError(ValueError):
    """Ratio has negative real part: tau too small or preconditions violated."""


@dataclass(frozen=True)
class FitWindow:
    tau_min: float
    tau_max: float

    def __post_init__(self):
        if not self.tau_min < self.tau_max:
            raise ValueError("need tau_min < tau_max")

    def mask(self, tau_grid: np.ndarray) -> np.ndarray:
        return (tau_grid >= self.tau_min) & (tau_grid <= self.tau_max)


@dataclass(frozen=True)
class GapEstimate:
    quantity: str  # gap | energy_sum | second_gap
    value: float
    method: str  # ratio | log_slope
    tau_used: float | None = None
    fit_window: FitWindow | None = None
    diagnostics: dict = field(default_factory=dict)


def fit_line(points):
    """Ordinary least squares through (x, y) points; returns (slope, intercept, r^2)."""
    points = list(points)
    if len(points) < 2:
        raise ValueError("need at least 2 points")
    x = np.array([p[0] for p in points], dtype=float)
    y = np.array([p[1] for p in points], dtype=float)
    if np.ptp(x) == 0:
        raise ValueError("degenerate abscissae")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r_squared = 1.0 if ss_tot == 0 else 1.0 - float(np.sum(resid**2)) / ss_tot
    return float(slope), float(intercept), r_squared


def ratio_at(traj: Trajectory, m: int, index: int) -> complex:
    """<[H,O]_{m+2}> / <[H,O]_m> at a grid index, via log-scaled division."""
    rec = traj.records[index]
    num, den = rec[m + 2], rec[m]
    if den.is_zero:
        raise ZeroDivisionError(f"<[H,O]_{m}> vanishes at tau={traj.tau_grid[index]}")
    return (num / den).to_complex()


def gap_from_ratio(traj: Trajectory, m: int, tau: float) -> GapEstimate:
    """Gap estimate sqrt(Re r) with r the order-(m+2)/order-m expectation ratio."""
    idx = traj.index_of(tau)
    r = ratio_at(traj, m, idx)
    imag_fraction = abs(r.imag) / abs(r) if r != 0 else 0.0
    if r.real < 0:
        raise PreAsymptoticError(
            f"ratio has negative real part ({r.real:.3g}) at tau={tau}; "
            "pre-asymptotic regime or invalid preconditions"
        )
    if imag_fraction > IMAG_FRACTION_WARN:
        warnings.warn(
            f"ratio imaginary fraction {imag_fraction:.3g} exceeds "
            f"{IMAG_FRACTION_WARN} at tau={tau}",
            stacklevel=2,
        )
    return GapEstimate(
        quantity="gap",
        value=math.sqrt(r.real),
        method="ratio",
        tau_used=float(traj.tau_grid[idx]),
        diagnostics={"imag_fraction": imag_fraction, "ratio": r},
    )


def select_tau(traj: Trajectory, m: int, mode: str = "min_slope",
               window: FitWindow | None = None) -> float:
    """Pick the tau at which to read off the ratio estimate.

    'largest_tau' takes the last valid grid point; 'min_slope' takes the point
    where |d(Re r)/d tau| is smallest, a proxy for the residual error term.
    Points with nonpositive Re r are excluded in both modes.
    """
    tau_grid = traj.tau_grid
    mask = window.mask(tau_grid) if window else np.ones(len(tau_grid), dtype=bool)
    values = np.full(len(tau_grid), np.nan)
    for i in np.flatnonzero(mask):
        try:
            r = ratio_at(traj, m, i)
        except ZeroDivisionError:
            continue
        if r.real > 0:
            values[i] = r.real
    valid = np.flatnonzero(np.isfinite(values))
    if len(valid) == 0:
        raise PreAsymptoticError("no grid point yields a positive ratio")
    if mode == "largest_tau":
        return float(tau_grid[valid[-1]])
    if mode != "min_slope":
        raise ValueError(f"unknown tau-selection mode {mode!r}")
    if len(valid) == 1:
        return float(tau_grid[valid[0]])
    best, best_slope = valid[0], math.inf
    for a, b in zip(valid[:-1], valid[1:]):
        slope = abs(values[b] - values[a]) / (tau_grid[b] - tau_grid[a])
        if slope < best_slope:
            best, best_slope = b, slope
    return float(tau_grid[best])


def sum_from_log_slope(traj: Trajectory, m: int, window: FitWindow) -> GapEstimate:
    """E0 + E1 = -slope of ln|<[H,O]_m>| vs tau, fitted inside the window."""
    mask = window.mask(traj.tau_grid)
    points = []
    for i in np.flatnonzero(mask):
        value = traj.records[i][m]
        if value.is_zero:
            raise ValueError(f"zero expectation at tau={traj.tau_grid[i]} in fit window")
        points.append((float(traj.tau_grid[i]), value.log_abs))
    if len(points) < 3:
        raise ValueError(f"need >= 3 points in window, got {len(points)}")
    slope, _, r_squared = fit_line(points)
    return GapEstimate(
        quantity="energy_sum",
        value=-slope,
        method="log_slope",
        fit_window=window,
        diagnostics={"r_squared": r_squared, "point_count": len(points)},
    )


def second_gap(
    traj: Trajectory, m: int, delta_e: float, window: FitWindow
) -> GapEstimate:
    """E2 - E1 = -slope of ln|r(tau) - delta_e^2| vs tau inside the window."""
    mask = window.mask(traj.tau_grid)
    target = delta_e**2
    points = []
    for i in np.flatnonzero(mask):
        try:
            r = ratio_at(traj, m, i)
        except ZeroDivisionError:
            continue
        resid = abs(r - target)
        if resid == 0.0:
            continue
        points.append((float(traj.tau_grid[i]), math.log(resid)))
    if len(points) < 3:
        raise ValueError(f"need >= 3 surviving points in window, got {len(points)}")
    slope, _, r_squared = fit_line(points)
    return GapEstimate(
        quantity="second_gap",
        value=-slope,
        method="log_slope",
        fit_window=window,
        diagnostics={"r_squared": r_squared, "point_count": len(points)},
    )


def relative_error(exact: float, estimate: float) -> float:
    """|exact - estimate| / exact, keeping the sign convention of the exact value."""
    if exact == 0:
        raise ValueError("exact value must be nonzero")
    return abs(exact - estimate) / exact

"""Post-processing: battery demagnetization, scaling fits, regime labels, fidelity.

Scaling fits are unweighted least squares in log space; comparing the
power-law and exponential log-space residuals is the model-selection device
for the regime classification.  Currents below ``CURRENT_FLOOR`` are dropped
from log fits (truncation noise dominates that regime) and the surviving
point count is reported.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import DimensionMismatchError
from .mps import ReducedDensityMatrix
from .record import TrajectoryRecord

__all__ = [
    "AnalysisWindow",
    "FitModel",
    "FitResult",
    "RegimeLabel",
    "CURRENT_FLOOR",
    "battery_magnetization",
    "battery_magnetization_summed",
    "quasi_steady_current",
    "fit_power_law",
    "fit_exponential",
    "fit_time_decay",
    "classify_regime",
    "state_fidelity",
    "nonmonotonicity_witness",
]

CURRENT_FLOOR = 1e-8
REVIVAL_THRESHOLD = 1e-6


@dataclass(frozen=True)
class AnalysisWindow:
    """Times framing the transient analysis, all in units of 1/J.

    ``tau1`` ends the single-light-cone transient (0.1 N/J), ``tau2`` starts
    the quasi-steady readout, ``T`` ends it.  Defaults put the readout at
    tau2 = 0.5 N/J and the current-averaging window at [0.35, 0.5] N/J.
    """

    tau1: float
    tau2: float
    T: float

    def __post_init__(self):
        if not 0 < self.tau1 < self.tau2 <= self.T:
            raise ValueError(
                f"window must satisfy 0 < tau1 < tau2 <= T, got "
                f"({self.tau1}, {self.tau2}, {self.T})"
            )

    @staticmethod
    def for_system(N: int, J: float = 1.0, tau2_factor: float = 0.5) -> "AnalysisWindow":
        return AnalysisWindow(0.1 * N / J, tau2_factor * N / J, 0.5 * N / J)

    @staticmethod
    def fit_window(N: int, J: float = 1.0) -> "AnalysisWindow":
        """Current-averaging window [0.35, 0.5] N/J."""
        return AnalysisWindow(0.1 * N / J, 0.35 * N / J, 0.5 * N / J)


class FitModel(enum.Enum):
    POWER_LAW = "power_law"        # Q = A * N^(-alpha)
    EXPONENTIAL = "exponential"    # Q = B * exp(-beta * N)
    TIME_DECAY = "time_decay"      # Q(t) = A * t^(-delta)


class RegimeLabel(enum.Enum):
    BALLISTIC = "ballistic"
    SUPER_DIFFUSIVE = "super_diffusive"
    DIFFUSIVE = "diffusive"
    SUB_DIFFUSIVE = "sub_diffusive"
    INSULATING = "insulating"


@dataclass(frozen=True)
class FitResult:
    model: FitModel
    amplitude: float
    exponent: float
    residual: float  # RMS misfit of log Q
    n_points: int


def battery_magnetization(record: TrajectoryRecord, N_b: int) -> np.ndarray:
    """Lead demagnetization z(t) = 1 - (1/N_b) * integral of the junction current."""
    q = record.junction_current
    integral = cumulative_trapezoid(q, record.times, initial=0.0)
    return 1.0 - integral / N_b


def battery_magnetization_summed(record: TrajectoryRecord, N_b: int) -> np.ndarray:
    """Directly summed left-lead magnetization, the integral's cross-check."""
    return record.z_profile[:, :N_b].sum(axis=1) / N_b


def quasi_steady_current(record: TrajectoryRecord, window: AnalysisWindow) -> float:
    """Trapezoidal time average of the junction current over [tau2, T]."""
    t = record.times
    if window.tau2 < t[0] - 1e-12 or window.T > t[-1] + 1e-12:
        raise ValueError(
            f"window [{window.tau2}, {window.T}] lies outside the record "
            f"[{t[0]}, {t[-1]}]"
        )
    lo = max(window.tau2, t[0])
    hi = min(window.T, t[-1])
    if hi <= lo:
        raise ValueError("empty averaging window")
    q = record.junction_current
    inside = (t > lo) & (t < hi)
    ts = np.concatenate([[lo], t[inside], [hi]])
    qs = np.concatenate([[np.interp(lo, t, q)], q[inside], [np.interp(hi, t, q)]])
    return float(trapezoid(qs, ts) / (hi - lo))


def _log_least_squares(x, logy):
    slope, intercept = np.polyfit(x, logy, 1)
    fitted = slope * x + intercept
    rms = float(np.sqrt(np.mean((logy - fitted) ** 2)))
    return slope, intercept, rms


def _positive_filter(sizes, currents):
    sizes = np.asarray(sizes, dtype=float)
    currents = np.asarray(currents, dtype=float)
    if np.any(currents <= 0):
        raise ValueError("log fits need positive currents; filter or floor the data first")
    keep = currents > CURRENT_FLOOR
    return sizes[keep], currents[keep]


def fit_power_law(sizes, currents) -> FitResult:
    """Least squares of log Q against log N: Q = A * N^(-alpha)."""
    sizes, currents = _positive_filter(sizes, currents)
    if sizes.size < 3:
        raise ValueError(f"need at least 3 points above the current floor, got {sizes.size}")
    slope, intercept, rms = _log_least_squares(np.log(sizes), np.log(currents))
    return FitResult(FitModel.POWER_LAW, math.exp(intercept), -slope, rms, int(sizes.size))


def fit_exponential(sizes, currents) -> FitResult:
    """Least squares of log Q against N: Q = B * exp(-beta N)."""
    sizes, currents = _positive_filter(sizes, currents)
    if sizes.size < 3:
        raise ValueError(f"need at least 3 points above the current floor, got {sizes.size}")
    slope, intercept, rms = _log_least_squares(sizes, np.log(currents))
    return FitResult(FitModel.EXPONENTIAL, math.exp(intercept), -slope, rms, int(sizes.size))


def fit_time_decay(record: TrajectoryRecord, t_min: float, t_max: float) -> FitResult:
    """Log-log fit Q(t) = A * t^(-delta) of the junction current over a window."""
    t = record.times
    keep = (t >= t_min) & (t <= t_max) & (t > 0)
    q = record.junction_current[keep]
    ts = t[keep]
    pos = q > CURRENT_FLOOR
    ts, q = ts[pos], q[pos]
    if np.any(record.junction_current[keep] <= 0):
        raise ValueError("time-decay fit window contains non-positive currents")
    if ts.size < 3:
        raise ValueError(f"need at least 3 points above the current floor, got {ts.size}")
    slope, intercept, rms = _log_least_squares(np.log(ts), np.log(q))
    return FitResult(FitModel.TIME_DECAY, math.exp(intercept), -slope, rms, int(ts.size))


def classify_regime(power: FitResult, exponential: FitResult,
                    alpha_ballistic_tol: float = 0.05) -> RegimeLabel:
    """Label the transport regime from the two size-scaling fits.

    Insulating wins when the exponential model both fits better and has a
    positive rate; otherwise the power-law exponent decides, with
    |alpha| <= tol meaning ballistic and |alpha - 1| <= tol diffusive.
    """
    if exponential.residual < power.residual and exponential.exponent > 0:
        return RegimeLabel.INSULATING
    alpha = power.exponent
    if abs(alpha) <= alpha_ballistic_tol:
        return RegimeLabel.BALLISTIC
    if abs(alpha - 1.0) <= alpha_ballistic_tol:
        return RegimeLabel.DIFFUSIVE
    if 0 < alpha < 1:
        return RegimeLabel.SUPER_DIFFUSIVE
    if alpha > 1:
        return RegimeLabel.SUB_DIFFUSIVE
    # negative alpha beyond tolerance: currents grow with size; call it ballistic
    return RegimeLabel.BALLISTIC


def state_fidelity(a: ReducedDensityMatrix, b: ReducedDensityMatrix) -> float:
    """Normalized Hilbert-Schmidt overlap tr(a b) / sqrt(tr(a a) tr(b b))."""
    ma, mb = a.matrix, b.matrix
    if ma.shape != mb.shape:
        raise DimensionMismatchError(f"density matrix shapes differ: {ma.shape} vs {mb.shape}")
    num = np.trace(ma.conj().T @ mb)
    pa = np.trace(ma.conj().T @ ma).real
    pb = np.trace(mb.conj().T @ mb).real
    val = num.real / math.sqrt(pa * pb)
    return float(min(max(val, 0.0), 1.0))


def nonmonotonicity_witness(times, series, threshold: float = REVIVAL_THRESHOLD):
    """Revival events: times where the series turns upward after a decline.

    Moves smaller than ``threshold`` are ignored.  Returns (time, increment)
    pairs, one per decline-to-rise turning point.
    """
    series = np.asarray(series, dtype=float)
    times = np.asarray(times, dtype=float)
    if series.shape != times.shape:
        raise ValueError("times and series must have equal lengths")
    if series.size < 2:
        raise ValueError("need at least 2 points")
    revivals = []
    declining = False
    for k in range(1, series.size):
        step = series[k] - series[k - 1]
        if step < -threshold:
            declining = True
        elif step > threshold:
            if declining:
                revivals.append((float(times[k]), float(step)))
            declining = False
    return revivals

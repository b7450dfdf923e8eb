"""Time-series record shared by the MPS engine and the exact oracle.

Both engines emit the same schema so analysis and figure tooling consume
either interchangeably (CSV columns: t, z_1..z_L, q_1..q_{L-1}, max_D,
err_budget).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["TrajectoryRecord"]


@dataclass
class TrajectoryRecord:
    """Observable time series of one evolution run.

    ``junction_current`` is the current on the left lead-system bond.
    ``error_budget`` accumulates per-gate discarded weights plus compression
    infidelities; the oracle reports zeros.  ``compression_infidelity`` holds
    (time, infidelity) pairs, one per compression.
    """

    times: np.ndarray
    z_profile: np.ndarray
    q_profile: np.ndarray
    junction_current: np.ndarray
    max_bond_dim: np.ndarray
    cumulative_discarded_weight: np.ndarray
    total_magnetization: np.ndarray
    error_budget: np.ndarray
    compression_infidelity: list = field(default_factory=list)
    alarms: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def n_sites(self) -> int:
        return self.z_profile.shape[1]

    @property
    def n_times(self) -> int:
        return self.times.shape[0]

    def magnetization_drift(self) -> float:
        """Largest deviation of the total magnetization from its initial value."""
        ref = self.metadata.get("total_magnetization_t0", self.total_magnetization[0])
        return float(np.max(np.abs(self.total_magnetization - ref)))

    @staticmethod
    def from_rows(times, z_rows, q_rows, junction, max_d, discarded, total_z,
                  budget, compressions=None, alarms=None, metadata=None) -> "TrajectoryRecord":
        times = np.asarray(times, dtype=float)
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("recorded times must be strictly increasing")
        return TrajectoryRecord(
            times=times,
            z_profile=np.asarray(z_rows, dtype=float),
            q_profile=np.asarray(q_rows, dtype=float),
            junction_current=np.asarray(junction, dtype=float),
            max_bond_dim=np.asarray(max_d, dtype=int),
            cumulative_discarded_weight=np.asarray(discarded, dtype=float),
            total_magnetization=np.asarray(total_z, dtype=float),
            error_budget=np.asarray(budget, dtype=float),
            compression_infidelity=list(compressions or []),
            alarms=list(alarms or []),
            metadata=dict(metadata or {}),
        )

"""Finite-time-stable smoother for noisy output measurements.

The filter keeps an output estimate y_hat and corrects each new measurement
by the sigmoid-gained previous innovation:

    y_hat_{k+1} = y^m_{k+1} + gain(e) * e,   e = y_hat_k - y^m_k.

Only measured outputs are available in closed loop, so measurements stand in
for true outputs on both sides; the innovation e then obeys the ideal
sigmoid-gain contraction and the filter tracks the measurement stream with a
decaying correction from its configured initial estimate.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .fts_core import DomainError, HolderGainParams, holder_gain


@dataclass(frozen=True)
class OutputFilterState:
    """Current output estimate, gain parameters, and the last seen measurement."""

    y_hat: np.ndarray
    params: HolderGainParams
    last_meas: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "y_hat", np.asarray(self.y_hat, dtype=float))
        if self.last_meas is not None:
            object.__setattr__(self, "last_meas", np.asarray(self.last_meas, dtype=float))

    @property
    def innovation(self) -> Optional[np.ndarray]:
        """Estimate-minus-measurement error at the current step, if a measurement was seen."""
        if self.last_meas is None:
            return None
        return self.y_hat - self.last_meas


def filter_update(state: OutputFilterState, y_meas_next) -> OutputFilterState:
    """Advance the filter by one measurement.

    The first call only absorbs the measurement and keeps the configured
    initial estimate; subsequent calls apply the sigmoid-gained innovation
    correction to the new measurement.
    """
    y = np.asarray(y_meas_next, dtype=float)
    if not np.all(np.isfinite(y)):
        raise DomainError("filter_update: measurement has non-finite components")
    if state.last_meas is None:
        return replace(state, last_meas=y)
    e = state.y_hat - state.last_meas
    y_hat_next = y + holder_gain(e, state.params) * e
    return OutputFilterState(y_hat=y_hat_next, params=state.params, last_meas=y)

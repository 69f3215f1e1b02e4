"""Unit tests for the output measurement smoother."""

import numpy as np
import pytest

from ftsmfc.fts_core import DomainError, HolderGainParams, holder_gain
from ftsmfc.output_filter import OutputFilterState, filter_update
from ftsmfc.plant_models import NoiseConfig, noise_sample

FILT = HolderGainParams(exponent=7 / 5, scale=2.0, weight=2.1)


class TestFilterUpdate:
    def test_first_call_absorbs_measurement_only(self):
        state = OutputFilterState(y_hat=np.array([0.0, 0.102]), params=FILT)
        assert state.innovation is None
        y0 = np.array([0.45, -0.14])
        state = filter_update(state, y0)
        np.testing.assert_array_equal(state.y_hat, [0.0, 0.102])
        np.testing.assert_array_equal(state.last_meas, y0)
        np.testing.assert_allclose(state.innovation, state.y_hat - y0)

    def test_update_formula(self):
        state = OutputFilterState(y_hat=np.array([1.0, 0.0]), params=FILT)
        state = filter_update(state, np.zeros(2))  # absorb
        y1 = np.array([0.2, -0.1])
        e = state.y_hat - state.last_meas
        expected = y1 + holder_gain(e, FILT) * e
        state = filter_update(state, y1)
        np.testing.assert_allclose(state.y_hat, expected, atol=1e-15)

    def test_exact_estimate_tracks_exactly(self):
        state = OutputFilterState(y_hat=np.array([0.3, 0.3]), params=FILT)
        state = filter_update(state, np.array([0.3, 0.3]))
        for y in ([0.4, 0.2], [0.5, 0.1], [-1.0, 2.0]):
            state = filter_update(state, y)
            np.testing.assert_array_equal(state.y_hat, y)

    def test_innovation_contracts_on_constant_stream(self):
        state = OutputFilterState(y_hat=np.array([5.0, -3.0]), params=FILT)
        y = np.array([0.1, 0.2])
        state = filter_update(state, y)
        prev = np.inf
        for _ in range(300):
            state = filter_update(state, y)
            norm = np.linalg.norm(state.innovation)
            assert norm < prev
            prev = norm

    def test_innovation_converges_below_tolerance(self):
        # the innovation tail slows as the gain approaches -1 near the
        # origin; 1e-7 is reachable in a 25k budget for these gains
        state = OutputFilterState(y_hat=np.array([5.0, -3.0]), params=FILT)
        y = np.array([0.1, 0.2])
        state = filter_update(state, y)
        for _ in range(25_000):
            state = filter_update(state, y)
            if np.linalg.norm(state.innovation) < 1e-7:
                break
        assert np.linalg.norm(state.innovation) < 1e-7

    def test_filtered_output_stays_within_noise_band_after_transient(self):
        # bounded measurement noise produces a bounded filtered deviation
        cfg = NoiseConfig()
        truth = np.array([0.05, -0.02])
        state = OutputFilterState(y_hat=np.array([1.0, 1.0]), params=FILT)
        dev = []
        for k in range(4000):
            y_meas = truth + noise_sample(0.01 * k, cfg)
            state = filter_update(state, y_meas)
            if k > 2000:
                dev.append(np.abs(state.y_hat - truth).max())
        assert max(dev) < 5 * cfg.amplitudes.max()

    def test_nonfinite_measurement_rejected(self):
        state = OutputFilterState(y_hat=np.zeros(2), params=FILT)
        with pytest.raises(DomainError):
            filter_update(state, [np.inf, 0.0])

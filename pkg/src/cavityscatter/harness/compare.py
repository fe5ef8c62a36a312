"""Waveform comparison metrics between two seismogram sets."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class MisfitReport:
    receiver_ids: list
    rel_l2: np.ndarray
    amp_ratio: np.ndarray
    lag: np.ndarray          # [s], positive = second trace delayed

    def summary(self):
        return {
            "median_rel_l2": float(np.median(self.rel_l2)),
            "max_rel_l2": float(np.max(self.rel_l2)),
            "median_amp_ratio": float(np.median(self.amp_ratio)),
            "max_abs_lag": float(np.max(np.abs(self.lag))),
        }


def _xcorr_lag(a, b, dt):
    """Lag (seconds) of b relative to a by full cross-correlation with
    parabolic sub-sample refinement."""
    n = len(a)
    c = np.correlate(b, a, mode="full")
    k = int(np.argmax(c))
    if 0 < k < len(c) - 1:
        denom = c[k - 1] - 2 * c[k] + c[k + 1]
        if denom != 0:
            k = k + 0.5 * (c[k - 1] - c[k + 1]) / denom
    return (k - (n - 1)) * dt


def compare_seismograms(ref, test, dt, window=None, receiver_ids=None):
    """Per-receiver relative L2 misfit, peak-amplitude ratio and
    cross-correlation lag.  ref/test: (n_receivers, n_samples) on a common
    time grid; window = (t_lo, t_hi) restricts the L2/amplitude metrics."""
    ref = np.atleast_2d(np.asarray(ref, dtype=float))
    test = np.atleast_2d(np.asarray(test, dtype=float))
    if ref.shape != test.shape:
        raise ValueError("seismogram sets must share shape")
    n_r, n_s = ref.shape
    t = dt * np.arange(n_s)
    mask = np.ones(n_s, dtype=bool)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
    rel = np.empty(n_r)
    amp = np.empty(n_r)
    lag = np.empty(n_r)
    for i in range(n_r):
        a, b = ref[i, mask], test[i, mask]
        denom = np.linalg.norm(a)
        rel[i] = np.linalg.norm(b - a) / denom if denom > 0 else np.linalg.norm(b)
        pa = np.max(np.abs(a))
        amp[i] = np.max(np.abs(b)) / pa if pa > 0 else np.inf
        lag[i] = _xcorr_lag(a, b, dt)
    ids = receiver_ids or [f"rx{i:03d}" for i in range(n_r)]
    return MisfitReport(receiver_ids=list(ids), rel_l2=rel, amp_ratio=amp, lag=lag)


def write_misfit_csv(report: MisfitReport, path):
    with open(path, "w") as f:
        f.write("receiver,rel_l2,amp_ratio,lag\n")
        for i, rid in enumerate(report.receiver_ids):
            f.write(f"{rid},{report.rel_l2[i]:.9g},{report.amp_ratio[i]:.9g},"
                    f"{report.lag[i]:.9g}\n")
        s = report.summary()
        f.write(f"SUMMARY,{s['median_rel_l2']:.9g},{s['median_amp_ratio']:.9g},"
                f"{s['max_abs_lag']:.9g}\n")

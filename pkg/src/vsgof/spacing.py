"""Spacing (Vasicek-type) estimation of Shannon entropy.

For an ordered sample ``x_(1) <= ... <= x_(n)`` and a window ``m`` with
``1 <= m < n/2`` the estimator averages log-spacings::

    V = (1/n) * sum_i log( (n / (2m)) * (x_(i+m) - x_(i-m)) )

with the convention that order statistics below the first (above the last)
are clamped to the first (last) value.  A zero spacing makes the estimate
undefined for that window: ties denser than the window are the one data
pathology this estimator cannot absorb.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParameterError, TiesError
from .sample import Sample, as_sample

__all__ = [
    "WindowScan",
    "max_valid_window",
    "vasicek_estimate",
    "window_scan",
    "best_window",
]


def max_valid_window(n: int) -> int:
    """Largest window m satisfying 1 <= m < n/2, i.e. (n - 1) // 2.

    Returns 0 when no window is valid (n < 3).
    """
    return max((int(n) - 1) // 2, 0)


def _validate_window(m: int, n: int) -> int:
    if m != int(m):
        raise ParameterError(f"window must be an integer, got {m!r}")
    m = int(m)
    if m < 1 or 2 * m >= n:
        raise ParameterError(
            f"window m={m} outside the valid range 1 <= m < n/2 for n={n}"
        )
    return m


def batch_window_values(sorted_rows: np.ndarray, windows: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Spacing entropy estimates for many samples and windows at once.

    Parameters
    ----------
    sorted_rows : (B, n) array, each row ascending.
    windows : 1-D int array of window sizes, each in [1, (n-1)//2].

    Returns
    -------
    values : (B, len(windows)) float array; NaN where not computable.
    computable : matching bool array, False where some spacing is zero.
    """
    S = np.asarray(sorted_rows, dtype=float)
    if S.ndim == 1:
        S = S[None, :]
    B, n = S.shape
    ms = np.asarray(windows, dtype=int)
    values = np.full((B, ms.shape[0]), np.nan)
    computable = np.zeros((B, ms.shape[0]), dtype=bool)
    idx = np.arange(n)
    for j, m in enumerate(ms):
        hi = S[:, np.minimum(idx + m, n - 1)]
        lo = S[:, np.maximum(idx - m, 0)]
        gaps = hi - lo
        ok = np.all(gaps > 0.0, axis=1)
        computable[:, j] = ok
        if np.any(ok):
            with np.errstate(divide="ignore"):
                logs = np.log(gaps[ok])
            values[ok, j] = np.log(n / (2.0 * m)) + logs.mean(axis=1)
    return values, computable


def vasicek_estimate(x: "Sample | np.ndarray", m: int) -> float:
    """Spacing entropy estimate for one sample and one window.

    Raises
    ------
    ParameterError
        if m is outside 1 <= m < n/2.
    TiesError
        if some m-spacing is zero (tied values denser than the window).
    """
    s = as_sample(x)
    m = _validate_window(m, s.n)
    values, computable = batch_window_values(s.sorted_values[None, :], np.array([m]))
    if not computable[0, 0]:
        raise TiesError(
            f"zero spacing at window m={m}: the sample has runs of tied values "
            f"(longest run {s.max_tie_run}); increase the window"
        )
    return float(values[0, 0])


@dataclass(frozen=True)
class WindowScan:
    """Spacing estimates over a contiguous window range ``1..m_max``.

    ``values[j]`` is the estimate at window ``windows[j]`` (NaN when not
    computable), ``computable[j]`` flags usable entries.
    """

    windows: np.ndarray
    values: np.ndarray
    computable: np.ndarray

    @property
    def m_min(self) -> int:
        return int(self.windows[0])

    @property
    def m_max(self) -> int:
        return int(self.windows[-1])

    def value_at(self, m: int) -> float:
        j = int(m) - self.m_min
        if j < 0 or j >= self.windows.shape[0]:
            raise ParameterError(f"window m={m} not in scanned range "
                                 f"[{self.m_min}, {self.m_max}]")
        return float(self.values[j])


def window_scan(x: "Sample | np.ndarray", m_max: int | None = None) -> WindowScan:
    """Compute spacing estimates for every window 1..m_max.

    ``m_max`` defaults to the largest valid window (n - 1) // 2.  Cost is
    O(n * m_max); entries whose spacings vanish are flagged, not errors.
    """
    s = as_sample(x)
    top = max_valid_window(s.n)
    if top < 1:
        raise DataError(f"no valid window exists for n={s.n} (need n >= 3)")
    if m_max is None:
        m_max = top
    else:
        m_max = _validate_window(m_max, s.n)
    ms = np.arange(1, m_max + 1)
    values, computable = batch_window_values(s.sorted_values[None, :], ms)
    return WindowScan(windows=ms, values=values[0], computable=computable[0])


def best_window(x: "Sample | np.ndarray", m_max: int | None = None) -> tuple[int, WindowScan]:
    """Standalone window choice for plain entropy estimation.

    Scans 1..m_max and returns the smallest window attaining the maximal
    estimate (no null-model constraint involved), along with the scan.
    """
    scan = window_scan(x, m_max)
    if not np.any(scan.computable):
        raise TiesError(
            "no window in range produces positive spacings; too many ties "
            "to estimate entropy from spacings"
        )
    vals = np.where(scan.computable, scan.values, -np.inf)
    j = int(np.argmax(vals))  # argmax returns the first (smallest window) maximizer
    return int(scan.windows[j]), scan

"""Series comparison and exponential-rate fitting."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np


@dataclass
class RateFit:
    """Least-squares fit of ``log|n - n_eq|`` against ``t``.

    ``rate`` is the decay constant (minus the slope) and ``residual`` the RMS
    of the log-residuals. When the fit is undefined both are ``None`` and
    ``reason`` says why.
    """

    rate: Optional[float]
    residual: Optional[float]
    window: tuple[float, float]
    samples: int
    reason: Optional[str] = None

    @property
    def defined(self) -> bool:
        return self.rate is not None


@dataclass
class ComparisonMetrics:
    max_abs: float
    rms: float
    window: tuple[float, float]
    fit: Optional[RateFit] = None

    def as_dict(self) -> dict:
        return asdict(self)


def fit_decay_rate(t, n, n_eq: float, t_min: float, t_max: float, floor: float = 1e-14) -> RateFit:
    t = np.asarray(t, dtype=float)
    n = np.asarray(n, dtype=float)
    sel = (t >= t_min) & (t <= t_max)
    window = (float(t_min), float(t_max))
    if np.count_nonzero(sel) < 3:
        return RateFit(None, None, window, int(np.count_nonzero(sel)), "fewer than 3 samples in window")
    dev = np.abs(n[sel] - n_eq)
    if np.any(dev <= floor):
        return RateFit(None, None, window, int(sel.sum()), "series reaches the fixed point; log undefined")
    ts = t[sel]
    y = np.log(dev)
    A = np.vstack([ts, np.ones_like(ts)]).T
    coef, *_ = np.linalg.lstsq(A, y, rcond=None)
    resid = y - A @ coef
    return RateFit(float(-coef[0]), float(np.sqrt(np.mean(resid**2))), window, int(ts.size))


def compare(series_a, series_b, t_min: float, t_max: Optional[float] = None) -> ComparisonMetrics:
    """Deviation between two ``(t, values)`` series for ``t >= t_min``.

    The finer series is linearly interpolated onto the coarser grid (the one
    with fewer samples inside the overlap).
    """
    ta, ya = (np.asarray(x, dtype=float) for x in series_a)
    tb, yb = (np.asarray(x, dtype=float) for x in series_b)
    if t_min < ta[0] or t_min < tb[0]:
        raise ValueError("t_min precedes the start of a series")
    lo = max(t_min, ta[0], tb[0])
    hi = min(ta[-1], tb[-1])
    if t_max is not None:
        hi = min(hi, t_max)
    if hi < lo:
        raise ValueError("series do not overlap after t_min")
    ina = (ta >= lo) & (ta <= hi)
    inb = (tb >= lo) & (tb <= hi)
    if not ina.any() or not inb.any():
        raise ValueError("empty overlap")
    if ina.sum() <= inb.sum():
        ref, other = ya[ina], np.interp(ta[ina], tb, yb)
    else:
        ref, other = yb[inb], np.interp(tb[inb], ta, ya)
    diff = np.abs(ref - other)
    return ComparisonMetrics(float(diff.max()), float(np.sqrt(np.mean(diff**2))), (float(lo), float(hi)))

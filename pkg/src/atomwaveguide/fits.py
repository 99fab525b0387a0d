"""Least-squares fitting helpers used by the scenario post-processing:
Lorentzian lineshapes and log-log power laws."""

from __future__ import annotations

import numpy as np
from scipy import optimize


class FitError(RuntimeError):
    """Nonlinear fit failed to converge or data are unusable."""


def fit_lorentzian(x, y):
    """Fit y = offset + amplitude * (fwhm/2)^2 / ((x-center)^2 + (fwhm/2)^2).

    A dip is fit with negative amplitude. Returns
    (center, fwhm, amplitude, offset, residual) with residual the rms misfit.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 5:
        raise FitError("need at least 5 points for a Lorentzian fit")
    offset0 = 0.5 * (y[0] + y[-1])
    i_ext = int(np.argmax(np.abs(y - offset0)))
    amp0 = y[i_ext] - offset0
    center0 = x[i_ext]
    # half-maximum crossing estimate for the width
    half = offset0 + 0.5 * amp0
    above = (y - half) * np.sign(amp0) > 0
    if above.any():
        span = x[above]
        fwhm0 = max(span.max() - span.min(), 2.0 * np.min(np.diff(np.sort(x))))
    else:
        fwhm0 = 0.1 * (x.max() - x.min())

    def model(p):
        center, fwhm, amp, off = p
        hw2 = (0.5 * fwhm) ** 2
        return off + amp * hw2 / ((x - center) ** 2 + hw2)

    res = optimize.least_squares(
        lambda p: model(p) - y,
        x0=[center0, fwhm0, amp0, offset0],
        xtol=1e-14,
        ftol=1e-14,
        max_nfev=20000,
    )
    if not res.success:
        raise FitError(f"Lorentzian fit did not converge: {res.message}")
    center, fwhm, amp, off = res.x
    residual = float(np.sqrt(np.mean(res.fun**2)))
    return float(center), float(abs(fwhm)), float(amp), float(off), residual


def fit_power_law(x, y):
    """Fit y = A * x^B by linear least squares in log-log space.

    Requires strictly positive data. Returns (A, B, residual) with residual
    the rms misfit of log y.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise FitError("need at least 2 points for a power-law fit")
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("power-law fit requires positive x and y")
    lx, ly = np.log(x), np.log(y)
    coef, rss = np.polyfit(lx, ly, 1, full=True)[:2]
    b, log_a = coef
    residual = float(np.sqrt(rss[0] / lx.size)) if len(rss) else 0.0
    return float(np.exp(log_a)), float(b), residual

"""Complex special functions: polylogarithms on the closed unit disk and
Hankel functions of the first kind for real and evanescent arguments.

Only the low orders needed by the dispersion relation and mode functions are
provided (Li_1..Li_3, H_0^(1), H_1^(1)). Accuracy targets are ~1e-12 absolute
for the polylogarithms and 1e-10 relative for the Hankel functions, so that
downstream residue formulas retain at least 8 significant digits.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy import special as _sp


class SingularityError(ValueError):
    """Evaluation requested exactly at a non-removable singularity."""


# zeta(n) for integer n <= 3, indexed by n. Negative arguments come from
# zeta(-m) = -B_{m+1}/(m+1); even negative integers are trivial zeros.
_B = _sp.bernoulli(62)  # B_0 .. B_62 (B_1 = -1/2 convention; only even used)


def _zeta_int(n: int) -> float:
    if n >= 2:
        return float(_sp.zeta(n))
    if n == 1:
        raise SingularityError("zeta(1) diverges")
    if n == 0:
        return -0.5
    m = -n
    if m % 2 == 0:
        return 0.0
    return -float(_B[m + 1]) / (m + 1)


# harmonic number H_{n-1} entering the log term of the w-expansion, keyed by n
_HARMONIC = {2: 1.0, 3: 1.5}

# switch from direct series to the w = log(z) expansion when |z| is large;
# at 0.75 the series still needs < 120 terms and the w-expansion has
# |w| <= sqrt(log(1/0.75)^2 + pi^2) < 3.16 < 2*pi.
_SERIES_RADIUS = 0.75


def _polylog_series(s: int, z: complex) -> complex:
    total = 0.0 + 0.0j
    term = 1.0 + 0.0j
    for ell in range(1, 2000):
        term *= z
        contrib = term / ell**s
        total += contrib
        if abs(contrib) < 1e-17 * max(1.0, abs(total)):
            break
    return total


def _polylog_log_expansion(n: int, z: complex) -> complex:
    # Li_n(e^w) = w^(n-1)/(n-1)! * (H_{n-1} - log(-w)) + sum_{k>=0, k != n-1}
    #             zeta(n-k) w^k / k!,  valid for |w| < 2*pi.
    w = cmath.log(z)
    if abs(w) < 1e-30:
        return complex(_zeta_int(n))
    log_term = w ** (n - 1) / math.factorial(n - 1) * (_HARMONIC[n] - cmath.log(-w))
    total = log_term
    wk = 1.0 + 0.0j  # w^k / k!
    small_streak = 0  # zeta trivial zeros give zero terms; require two in a row
    for k in range(0, 80):
        if k != n - 1:
            contrib = _zeta_int(n - k) * wk
            total += contrib
            if k > 4 and abs(contrib) < 1e-17 * max(1.0, abs(total)):
                small_streak += 1
                if small_streak >= 2:
                    break
            else:
                small_streak = 0
        wk *= w / (k + 1)
    return total


def polylog(s: int, z: complex) -> complex:
    """Polylogarithm Li_s(z) for s in {1, 2, 3} on the closed unit disk.

    Direct summation away from the unit circle; near |z| = 1 the series in
    w = log(z) (with its log(-w) branch term) is used instead, which keeps
    absolute accuracy at the 1e-12 level everywhere on the disk.
    """
    if s not in (1, 2, 3):
        raise ValueError(f"polylog order must be 1, 2 or 3, got {s}")
    z = complex(z)
    if abs(z) > 1.0 + 1e-12:
        raise ValueError(f"polylog requires |z| <= 1, got |z| = {abs(z)}")
    if s == 1:
        if abs(z - 1.0) < 1e-300:
            raise SingularityError("Li_1(z) diverges at z = 1")
        return -cmath.log(1.0 - z)
    if abs(z) <= _SERIES_RADIUS:
        return _polylog_series(s, z)
    return _polylog_log_expansion(s, z)


def hankel1(m: int, x: complex) -> complex:
    """Hankel function of the first kind H_m^(1)(x) for m in {0, 1}.

    Supports the two argument classes arising from the transverse wave-vector
    branch Im k_perp >= 0: positive real x (radiative) and positive imaginary
    x = i*t (evanescent). For the latter the modified-Bessel identities
    H_0^(1)(i t) = (2/(i pi)) K_0(t) and H_1^(1)(i t) = -(2/pi) K_1(t)
    are used, so guided-mode fields decay exponentially without cancellation.
    """
    if m not in (0, 1):
        raise ValueError(f"hankel1 order must be 0 or 1, got {m}")
    x = complex(x)
    if x == 0:
        raise SingularityError("H_m^(1) diverges at the origin")
    if x.real == 0.0 and x.imag > 0.0:
        t = x.imag
        if m == 0:
            return -2j / math.pi * float(_sp.kv(0, t))
        return -2.0 / math.pi * float(_sp.kv(1, t))
    return complex(_sp.hankel1(m, x))


def bessel_j(m: int, x: float) -> float:
    """Bessel function J_m for real argument (convenience wrapper)."""
    return float(_sp.jv(m, x))


def bessel_y(m: int, x: float) -> float:
    """Bessel function Y_m for real positive argument."""
    return float(_sp.yv(m, x))


def polylog_grid(s: int, z: np.ndarray) -> np.ndarray:
    """Vectorized polylog over an array of points on the closed unit disk."""
    out = np.empty(np.shape(z), dtype=complex)
    flat = out.reshape(-1)
    for i, zi in enumerate(np.asarray(z, dtype=complex).reshape(-1)):
        flat[i] = polylog(s, zi)
    return out

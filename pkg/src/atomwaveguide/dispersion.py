"""Bloch-mode dispersion of the infinite longitudinally polarized chain:
complex mode frequency, group velocity, band edges, and the inverse map
from detuning to guided wave-vector.

All detunings are (omega_{k_z} - omega_0) in units of Gamma_0; wave-vectors
are in 1/lambda_0. The closed form is the polylogarithm expression for atoms
polarized along the chain axis; the lattice-sum oracle accepts any
polarization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import K0, ZHAT, greens_free
from .specfun import polylog


class OutOfBandError(ValueError):
    """Requested detuning lies outside the guided band (bandgap regime)."""


@dataclass(frozen=True)
class GuidedModePoint:
    k_z: float
    delta: complex
    v_g: float


def _check_kz(k_z: float, d: float) -> None:
    if not (0.0 < d < 0.5):
        raise ValueError(f"spacing d must lie in (0, 0.5) lambda_0, got {d}")
    if abs(k_z) > np.pi / d + 1e-12:
        raise ValueError(f"|k_z| must not exceed pi/d = {np.pi/d}, got {k_z}")


def omega_of_kz(k_z: float, d: float, k: float = K0) -> complex:
    """Complex Bloch-mode detuning of the infinite chain, closed form.

    omega_{k_z} - omega_0 =
        -(3/(2 k^3 d^3)) [ Li3(e^{i(k+k_z)d}) + Li3(e^{i(k-k_z)d})
                           - i k d ( Li2(e^{i(k+k_z)d}) + Li2(e^{i(k-k_z)d}) ) ]
        - i/2,
    where the -i/2 is the on-site imaginary part, which exactly cancels the
    polylog imaginary part beyond the light line (guided modes are lossless).
    """
    _check_kz(k_z, d)
    ap = np.exp(1j * (k + k_z) * d)
    am = np.exp(1j * (k - k_z) * d)
    bracket = (
        polylog(3, ap)
        + polylog(3, am)
        - 1j * k * d * (polylog(2, ap) + polylog(2, am))
    )
    return -(3.0 / (2.0 * k**3 * d**3)) * bracket - 0.5j


def omega_of_kz_sum(
    k_z: float,
    d: float,
    n_terms: int = 10**6,
    polarization: np.ndarray = ZHAT,
    k: float = K0,
) -> complex:
    """Real-space lattice-sum oracle for the Bloch-mode detuning.

    omega_{k_z} - omega_0 = -(3 pi / k) sum_{j != 0} e^{-i k_z z_j}
                             (dhat* . G0(z_j zhat) . dhat)  - i/2.
    Summed symmetrically to +-n_terms; converges absolutely like 1/R^2.
    """
    if n_terms < 10**3:
        raise ValueError("n_terms must be at least 1e3 for a trustworthy sum")
    _check_kz(k_z, d)
    dip = np.asarray(polarization, dtype=complex)
    j = np.arange(1, n_terms + 1)
    dist = j * d
    # dipole sandwich of G0 for on-axis separation R zhat
    x = k * dist
    a = 1.0 + (1j * x - 1.0) / x**2
    b = -1.0 + (3.0 - 3j * x) / x**2
    ddag = dip.conj()
    sand_id = np.vdot(dip, dip).real  # = 1 for unit dipole
    sand_zz = (ddag[2] * dip[2])
    g_sand = np.exp(1j * x) / (4.0 * np.pi * dist) * (a * sand_id + b * sand_zz)
    phase = 2.0 * np.cos(k_z * dist)  # e^{-i kz z} + e^{+i kz z}
    total = np.sum(phase * g_sand)
    return -(3.0 * np.pi / k) * total - 0.5j


def group_velocity(k_z: float, d: float, k: float = K0) -> float:
    """Analytic group velocity d omega / d k_z on the real guided branch.

    Uses d/dk_z Li3(e^{i(k +- k_z)d}) = +-i d Li2(...) and the analogous
    Li2 -> Li1 recurrence; valid only beyond the light line where the
    dispersion is real. Units of lambda_0 * Gamma_0.
    """
    _check_kz(k_z, d)
    if abs(k_z) <= k:
        raise OutOfBandError(
            "group velocity is defined on the real branch |k_z| > k only"
        )
    ap = np.exp(1j * (k + k_z) * d)
    am = np.exp(1j * (k - k_z) * d)
    bracket = 1j * d * (polylog(2, ap) - polylog(2, am)) + k * d**2 * (
        polylog(1, ap) - polylog(1, am)
    )
    return float((-(3.0 / (2.0 * k**3 * d**3)) * bracket).real)


def _guided_kz_grid(d: float, n: int, k: float = K0) -> np.ndarray:
    return np.linspace(k * (1.0 + 1e-9), np.pi / d, n)


def band_edges(d: float, n_scan: int = 4000, k: float = K0):
    """Detunings of the guided branch at the light line and zone edge, plus
    its extrema, from a dense scan."""
    grid = _guided_kz_grid(d, n_scan, k)
    vals = np.array([omega_of_kz(kz, d, k).real for kz in grid])
    return float(vals[0]), float(vals[-1]), float(vals.min()), float(vals.max())


def find_k1d(
    delta: float, d: float, n_scan: int = 2000, k: float = K0
) -> tuple[float, int]:
    """Positive guided wave-vector k_1D with Re omega(k_1D) = delta.

    Dense scan over the guided branch followed by bisection. If several roots
    exist, the one with the largest |k_1D| is returned together with the root
    multiplicity found on the scan.
    """
    grid = _guided_kz_grid(d, max(n_scan, 1000), k)
    vals = np.array([omega_of_kz(kz, d, k).real for kz in grid]) - delta
    sign = np.sign(vals)
    crossings = np.nonzero(sign[:-1] * sign[1:] < 0)[0]
    exact = np.nonzero(vals == 0.0)[0]
    n_roots = len(crossings) + len(exact)
    if n_roots == 0:
        raise OutOfBandError(
            f"detuning {delta} lies outside the guided band of d = {d}"
        )
    if len(exact):
        best = float(grid[exact[-1]])
        return best, n_roots
    i = crossings[-1]  # largest-|k| bracket
    lo, hi = grid[i], grid[i + 1]
    flo = vals[i]
    tol = 1e-12 / d
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = omega_of_kz(mid, d, k).real - delta
        if fm == 0.0:
            return float(mid), n_roots
        if flo * fm < 0:
            hi = mid
        else:
            lo, flo = mid, fm
    return float(0.5 * (lo + hi)), n_roots


def dispersion_table(d: float, n_points: int = 200, k: float = K0):
    """(k_z d / pi, Re delta, Im delta, v_g) arrays over the Brillouin zone.

    v_g is reported as NaN inside the light line, where the branch is complex.
    """
    grid = np.linspace(1e-6, np.pi / d, n_points)
    deltas = np.array([omega_of_kz(kz, d, k) for kz in grid])
    vg = np.array(
        [
            group_velocity(kz, d, k) if abs(kz) > k else np.nan
            for kz in grid
        ]
    )
    return grid * d / np.pi, deltas.real, deltas.imag, vg

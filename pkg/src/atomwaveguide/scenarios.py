"""Scenario registry: each registered scenario reproduces one of the
figure-level numerical experiments (dispersion curves, decay-rate maps,
transport spectra, bandgap Rabi oscillations, time-delayed interactions,
bound-state revivals, chirality maps, photon collisions, trajectory
ensembles) and emits a single ResultTable.

Every scenario function takes a flat parameter dict (merged over registered
defaults) plus a seed and returns (columns, extra_metadata). Lengths are in
lambda_0, rates in Gamma_0, and "*_frac" parameters are fractions of the
lattice constant d (for rho/z) or of pi/d (for wave-vectors).
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import special as _sp

from .dispersion import (
    band_edges,
    dispersion_table,
    find_k1d,
    group_velocity,
    omega_of_kz,
)
from .dynamics import (
    PureState1,
    PureState2,
    build_model,
    ensemble_average,
    chirality,
    propagate_no_jump,
)
from .fits import fit_lorentzian, fit_power_law
from .geometry import ChainGeometry, ImpurityQubit
from .guided import (
    coherent_shift,
    find_magic_point,
    gamma_free_space,
    gamma_guided,
    scan_decay_rates,
)
from .results import ResultTable

try:  # package version for result metadata
    from importlib.metadata import version as _pkg_version

    _VERSION = _pkg_version("atomwaveguide")
except Exception:  # pragma: no cover - not installed
    _VERSION = "0.0.0"


class ScenarioError(ValueError):
    """Configuration or dispatch error; .category is machine-readable."""

    def __init__(self, message: str, category: str = "config"):
        super().__init__(message)
        self.category = category


class EdgeTruncationWarning(UserWarning):
    """A wavepacket envelope loses more than 1% weight to the chain edges."""


# ---------------------------------------------------------------------------
# initial states


def init_spin_wave(
    chain: ChainGeometry,
    k1d: float,
    zeta: float,
    center_z: float,
    n_extra: int = 0,
) -> PureState1:
    """Normalized guided-mode wavepacket c_j ~ e^{-i k1d zbar} e^{-zbar^2/zeta^2}
    with zbar = z_j - center_z; the phase -k1d makes it propagate toward -z.

    n_extra zero amplitudes (qubits) are appended. Warns when more than 1% of
    the envelope weight falls outside the chain.
    """
    z = chain.atom_positions[:, 2]
    zbar = z - center_z
    amps = np.exp(-1j * k1d * zbar) * np.exp(-(zbar**2) / zeta**2)
    # |c|^2 ~ e^{-2 zbar^2 / zeta^2}: weight beyond the chain ends by erfc
    s = zeta / np.sqrt(2.0)
    lost = 0.5 * (
        _sp.erfc((z.max() - center_z) / s) + _sp.erfc((center_z - z.min()) / s)
    )
    if lost > 0.01:
        warnings.warn(
            f"spin wave truncated at the chain edges: {lost:.1%} weight lost",
            EdgeTruncationWarning,
        )
    amps = np.concatenate([amps, np.zeros(n_extra, dtype=complex)])
    return PureState1(amps).normalized()


def init_two_photon(
    chain: ChainGeometry,
    k1d: float,
    zeta: float,
    centers: tuple[float, float],
    n_extra: int = 0,
) -> PureState2:
    """Normalized counter-propagating two-photon state on the hard-core pair
    basis: c_ij ~ e^{i k1d (zbarA_i - zbarB_j)} e^{-(zbarA_i^2 + zbarB_j^2)/zeta^2}
    symmetrized over i <-> j, where zbarA/zbarB are measured from the two
    packet centers. The left packet (centers[0]) moves toward +z and the right
    one toward -z, so they collide midway.
    """
    z = chain.atom_positions[:, 2]
    za, zb = sorted(centers)
    f = np.exp(1j * k1d * (z - za)) * np.exp(-((z - za) ** 2) / zeta**2)
    g = np.exp(-1j * k1d * (z - zb)) * np.exp(-((z - zb) ** 2) / zeta**2)
    for env, center in ((f, za), (g, zb)):
        s = zeta / np.sqrt(2.0)
        lost = 0.5 * (
            _sp.erfc((z.max() - center) / s) + _sp.erfc((center - z.min()) / s)
        )
        if lost > 0.01:
            warnings.warn(
                f"two-photon packet at z = {center} truncated: {lost:.1%} lost",
                EdgeTruncationWarning,
            )
    m = len(z) + n_extra
    c = np.zeros((m, m), dtype=complex)
    block = np.outer(f, g)
    c[: len(z), : len(z)] = block + block.T
    return PureState2(c).normalized()


# ---------------------------------------------------------------------------
# shared helpers


def _k1d(frac: float, d: float) -> float:
    return frac * np.pi / d


def _guided_point(frac: float, d: float):
    """(k1d, Re delta, v_g) of the guided branch point at k_z = frac*pi/d."""
    k1d = _k1d(frac, d)
    delta = omega_of_kz(k1d, d).real
    return k1d, delta, abs(group_velocity(k1d, d))


def _site_qubit(
    site_z: float,
    rho: float,
    gamma0_q: float,
    detuning_q: float,
    dipole=None,
    phi: float = 0.0,
) -> ImpurityQubit:
    kwargs = {} if dipole is None else {"dipole": np.asarray(dipole)}
    return ImpurityQubit(
        rho_q=rho,
        phi_q=phi,
        z_q=site_z,
        gamma0_q=gamma0_q,
        detuning_q=detuning_q,
        **kwargs,
    )


_CHIRAL_DIPOLE = [
    (-1.0 / np.sqrt(2.0), 0.0),
    (0.0, 0.0),
    (0.0, 1.0 / np.sqrt(2.0)),
]  # -(xhat - i zhat)/sqrt(2), stored as (re, im) pairs for JSON round-trips


def _dipole_from_param(spec_val) -> np.ndarray:
    arr = np.array([complex(re, im) for re, im in spec_val])
    return arr


# ---------------------------------------------------------------------------
# scenarios


def _scn_dispersion_curve(p: dict, seed: int):
    frac, re_d, im_d, vg = dispersion_table(p["d"], p["n_points"])
    return (
        {"kz_d_over_pi": frac, "re_delta": re_d, "im_delta": im_d, "v_g": vg},
        {},
    )


def _scn_decay_map(p: dict, seed: int):
    d = p["d"]
    _, delta, _ = _guided_point(p["k1d_frac"], d)
    rho_grid = np.linspace(p["rho_min_frac"] * d, p["rho_max_frac"] * d, p["n_rho"])
    z_grid = np.linspace(0.0, 0.5 * d, p["n_z"])
    cols = scan_decay_rates(d, delta, rho_grid, z_grid)
    return cols, {"delta": delta}


def _scn_magic_point(p: dict, seed: int):
    d = p["d"]
    _, delta, _ = _guided_point(p["k1d_frac"], d)
    rho_star, z_star, gf_star, od_star = find_magic_point(d, delta)
    qb0 = ImpurityQubit(rho_q=rho_star, phi_q=0.0, z_q=0.0)
    gf_onsite = gamma_free_space(qb0, d, delta)
    cols = {
        "rho_star": np.array([rho_star]),
        "z_star": np.array([z_star]),
        "gamma_free_min": np.array([gf_star]),
        "optical_depth": np.array([od_star]),
        "suppression_vs_onsite": np.array([gf_onsite / gf_star]),
    }
    return cols, {"delta": delta}


def _scn_subradiance_scaling(p: dict, seed: int):
    d = p["d"]
    n_values = np.array(p["n_values"], dtype=int)
    rates = []
    for n in n_values:
        model = build_model(ChainGeometry(int(n), d))
        w, _, _ = model.eigen()
        rates.append(float(np.min(-2.0 * w.imag)))
    rates = np.array(rates)
    a_fit, b_fit, resid = fit_power_law(n_values, rates)
    return (
        {"n_atoms": n_values.astype(float), "gamma_subradiant": rates},
        {"power_law": {"A": a_fit, "B": b_fit, "residual": resid}},
    )


def _transport_core(p: dict, n_qubits: int):
    """Shared machinery of the transmission scenario: geometry, analytic
    rates, and the propagation endpoint for one qubit-detuning offset."""
    d = p["d"]
    n = p["n_atoms"]
    zeta = p["zeta_sites"] * d
    k1d, delta_res, v_g = _guided_point(p["k1d_frac"], d)

    c0_site = n - 1 - int(np.ceil(2.5 * p["zeta_sites"]))
    top_site = c0_site - p["launch_sites"]
    sites = [top_site - i * p["qubit_spacing_sites"] for i in range(n_qubits)]
    if min(sites) - 3 * p["zeta_sites"] < 0:
        raise ScenarioError(
            "chain too short for the requested launch distance and packet size",
            category="config",
        )

    rho = p["rho_q_frac"] * d
    probe = ImpurityQubit(rho_q=rho, phi_q=0.0, z_q=sites[0] * d)
    g1d = gamma_guided(probe, d, delta_res)
    gfree = gamma_free_space(probe, d, delta_res)
    shift = coherent_shift(probe, d, delta_res) if p["compensate_shift"] else 0.0

    t_meas = ((c0_site - min(sites)) + 3.0 * p["zeta_sites"]) * d / v_g

    chain = ChainGeometry(n, d)
    packet = init_spin_wave(chain, k1d, zeta, c0_site * d, n_extra=n_qubits)
    z_chain = chain.atom_positions[:, 2]
    z_lo, z_hi = min(sites) * d, max(sites) * d

    def run_point(delta_rel: float):
        # delta_rel is the offset from the (shift-compensated) resonance, Gamma_0
        det = delta_res + delta_rel - shift * p["gamma0_q"]
        qubits = [
            _site_qubit(s * d, rho, p["gamma0_q"], det) for s in sites
        ]
        model = build_model(chain, qubits)
        rec = propagate_no_jump(packet, model, np.array([0.0, t_meas]))
        pops = rec.observables["site_population"][-1]
        chain_pops = pops[:n]
        trans = float(np.sum(chain_pops[z_chain < z_lo - 1e-12]))
        refl = float(np.sum(chain_pops[z_chain > z_hi + 1e-12]))
        norm = rec.observables["norm_sq"][-1]
        loss = 1.0 - float(norm)
        residual = float(norm) - trans - refl
        return trans, refl, loss, residual

    meta = {
        "gamma_1d": g1d.total,
        "gamma_free": gfree,
        "coherent_shift": shift,
        "delta_resonance": delta_res,
        "v_g": v_g,
        "t_meas": t_meas,
        "qubit_sites": sites,
    }
    return run_point, (g1d.total, gfree), meta


def _scn_transmission(p: dict, seed: int):
    n_qubits = p["n_qubits"]
    run_point, (g1d, gfree), meta = _transport_core(p, n_qubits)
    width = (n_qubits * g1d + gfree) * p["gamma0_q"]
    span = p["span_linewidths"] * width
    delta_rel = np.linspace(-span, span, p["n_detunings"])
    rows = np.array([run_point(off) for off in delta_rel])
    cols = {
        "delta_rel": delta_rel,
        "transmission": rows[:, 0],
        "reflection": rows[:, 1],
        "loss": rows[:, 2],
        "residual": rows[:, 3],
    }
    meta = dict(meta)
    meta["expected_fwhm"] = width
    try:
        center, fwhm, amp, off, resid = fit_lorentzian(delta_rel, rows[:, 0])
        meta["lorentzian_fit"] = {
            "center": center,
            "fwhm": fwhm,
            "amplitude": amp,
            "offset": off,
            "residual": resid,
        }
    except Exception as exc:  # keep the raw table even if the fit fails
        meta["lorentzian_fit"] = {"error": str(exc)}
    return cols, meta


def spectral_transmission(p: dict) -> dict:
    """Frequency-resolved transmission/reflection from a single propagation.

    A broadband probe convolves the lineshape with its own spectrum; instead,
    the final-state chain amplitudes are windowed into transmitted/reflected
    regions and Fourier transformed, and each momentum bin is normalized to
    the incident spectrum: T(k) = |A_T(k)/A_in(k)|^2 (resolvent-free
    scattering coefficients, exact for a completed scattering event). Uses
    the same parameter dict as the transmission scenario; the qubit sits at
    the (shift-compensated) resonance.

    Returns arrays over the probe band: delta (detuning from the qubit
    resonance, Gamma_0), transmission, reflection, loss.
    """
    d = p["d"]
    n = p["n_atoms"]
    n_qubits = p["n_qubits"]
    zeta = p["zeta_sites"] * d
    k1d, delta_res, v_g = _guided_point(p["k1d_frac"], d)

    c0_site = n - 1 - int(np.ceil(2.5 * p["zeta_sites"]))
    top_site = c0_site - p["launch_sites"]
    sites = [top_site - i * p["qubit_spacing_sites"] for i in range(n_qubits)]
    rho = p["rho_q_frac"] * d
    probe = ImpurityQubit(rho_q=rho, phi_q=0.0, z_q=sites[0] * d)
    shift = coherent_shift(probe, d, delta_res) if p["compensate_shift"] else 0.0
    det = delta_res - shift * p["gamma0_q"]
    qubits = [_site_qubit(s * d, rho, p["gamma0_q"], det) for s in sites]
    chain = ChainGeometry(n, d)
    model = build_model(chain, qubits)
    packet = init_spin_wave(chain, k1d, zeta, c0_site * d, n_extra=n_qubits)
    t_meas = ((c0_site - min(sites)) + 3.0 * p["zeta_sites"]) * d / v_g

    w, v, vinv = model.eigen()
    coef = vinv @ packet.amplitudes
    final = v @ (np.exp(-1j * w * t_meas) * coef)

    z_sites = np.arange(n)
    mask_t = z_sites < min(sites)
    mask_r = z_sites > max(sites)
    a_in = np.fft.fft(packet.amplitudes[:n])
    a_t = np.fft.fft(np.where(mask_t, final[:n], 0.0))
    a_r = np.fft.fft(np.where(mask_r, final[:n], 0.0))
    k_bins = 2.0 * np.pi * np.fft.fftfreq(n, d)

    # the incident packet lives at k ~ -k1d; keep bins with real weight
    power_in = np.abs(a_in) ** 2
    keep = np.nonzero(power_in > 0.01 * power_in.max())[0]
    keep = keep[k_bins[keep] < 0]
    trans, refl, deltas = [], [], []
    for m in keep:
        mirror = (-m) % n  # bin at +|k|: the reflected counterpart
        t_coef = np.abs(a_t[m] / a_in[m]) ** 2
        r_coef = np.abs(a_r[mirror] / a_in[m]) ** 2
        deltas.append(omega_of_kz(abs(k_bins[m]), d).real - det - shift * p["gamma0_q"])
        trans.append(t_coef)
        refl.append(r_coef)
    order = np.argsort(deltas)
    deltas = np.array(deltas)[order]
    trans = np.array(trans)[order]
    refl = np.array(refl)[order]
    return {
        "delta": deltas,
        "transmission": trans,
        "reflection": refl,
        "loss": 1.0 - trans - refl,
        "gamma_1d": gamma_guided(probe, d, delta_res).total,
        "gamma_free": gamma_free_space(probe, d, delta_res),
        "v_g": v_g,
    }


def _scn_bandgap_rabi(p: dict, seed: int):
    d = p["d"]
    n = p["n_atoms"]
    _, _, _, band_max = band_edges(d)
    det = band_max + p["detuning_beyond_gap"]
    rho = p["rho_q_frac"] * d
    m0 = (n - 1) // 2
    half = p["separation_sites"] // 2
    z1 = (m0 - half + 0.5) * d  # mid-cell magic longitudinal positions
    z2 = (m0 + half + 0.5) * d
    qubits = [
        _site_qubit(z1, rho, p["gamma0_q"], det),
        _site_qubit(z2, rho, p["gamma0_q"], det),
    ]
    model = build_model(ChainGeometry(n, d), qubits)
    amps = np.zeros(n + 2, dtype=complex)
    amps[n] = 1.0
    t_grid = np.linspace(0.0, p["t_end"], p["n_out"])
    rec = propagate_no_jump(PureState1(amps), model, t_grid)
    pops = rec.observables["site_population"]
    cols = {
        "t": t_grid,
        "pop_q1": pops[:, n],
        "pop_q2": pops[:, n + 1],
        "pop_array": pops[:, :n].sum(axis=1),
        "norm_sq": rec.observables["norm_sq"],
    }
    return cols, {"detuning_q": det, "band_max": band_max}


def _scn_time_delay(p: dict, seed: int):
    d = p["d"]
    n = p["n_atoms"]
    zeta = p["zeta_sites"] * d
    k1d, delta_pk, v_g = _guided_point(p["k1d_frac"], d)
    det = delta_pk + p["detune_above"] * p["gamma0_q"]

    c0_site = n - 1 - int(np.ceil(2.5 * p["zeta_sites"]))
    sites = [
        c0_site - p["launch_sites"] - i * p["qubit_separation_sites"]
        for i in range(p["n_qubits"])
    ]
    if min(sites) < 0:
        raise ScenarioError("chain too short for the qubit layout", "config")
    rho = p["rho_q_frac"] * d
    qubits = [_site_qubit(s * d, rho, p["gamma0_q"], det) for s in sites]
    chain = ChainGeometry(n, d)
    model = build_model(chain, qubits)
    packet = init_spin_wave(chain, k1d, zeta, c0_site * d, n_extra=len(qubits))
    t_grid = np.linspace(0.0, p["t_end"], p["n_out"])
    rec = propagate_no_jump(packet, model, t_grid)
    pops = rec.observables["site_population"]
    cols = {"t": t_grid, "norm_sq": rec.observables["norm_sq"]}
    for i in range(len(qubits)):
        cols[f"pop_q{i+1}"] = pops[:, n + i]
    cols["pop_array"] = pops[:, :n].sum(axis=1)
    meta = {
        "v_g": v_g,
        "detuning_q": det,
        "qubit_sites": sites,
        "transit_time": p["qubit_separation_sites"] * d / v_g,
    }
    return cols, meta


def _scn_bic(p: dict, seed: int):
    d = p["d"]
    n = p["n_atoms"]
    rho = p["rho_q_frac"] * d
    z_q = ((n - 1) // 2) * d  # aligned with the central atom
    qubit = _site_qubit(z_q, rho, p["gamma0_q"], p["delta_q"])
    model = build_model(ChainGeometry(n, d), [qubit])
    amps = np.zeros(n + 1, dtype=complex)
    amps[n] = 1.0
    t_grid = np.linspace(0.0, p["t_end"], p["n_out"])
    rec = propagate_no_jump(PureState1(amps), model, t_grid)
    pops = rec.observables["site_population"]
    cols = {
        "t": t_grid,
        "pop_qubit": pops[:, n],
        "pop_array": pops[:, :n].sum(axis=1),
        "norm_sq": rec.observables["norm_sq"],
    }
    return cols, {"z_q": z_q}


def _scn_chirality_map(p: dict, seed: int):
    d = p["d"]
    n = p["n_atoms"]
    _, delta, _ = _guided_point(p["k1d_frac"], d)
    rho = p["rho_q_frac"] * d
    dipole = _dipole_from_param(p["dipole"])
    chain = ChainGeometry(n, d)
    z_chain = chain.atom_positions[:, 2]
    m0 = (n - 1) // 2
    z_fracs = np.linspace(0.0, 1.0, p["n_z"], endpoint=False)
    phis = np.linspace(-np.pi, np.pi, p["n_phi"])
    t_grid = np.array([0.0, p["t_snapshot"]])
    out = {"z_frac": [], "phi_q": [], "chirality": []}
    for zf in z_fracs:
        z_q = (m0 + zf) * d
        for phi in phis:
            qubit = _site_qubit(
                z_q, rho, p["gamma0_q"], delta, dipole=dipole, phi=phi
            )
            model = build_model(chain, [qubit])
            amps = np.zeros(n + 1, dtype=complex)
            amps[n] = 1.0
            rec = propagate_no_jump(PureState1(amps), model, t_grid)
            pops = rec.observables["site_population"][-1][:n]
            out["z_frac"].append(zf)
            out["phi_q"].append(phi)
            out["chirality"].append(chirality(pops, z_chain, z_q))
    return {k: np.array(v) for k, v in out.items()}, {"delta": delta}


def _collision_run(
    n: int,
    d: float,
    k1d_frac: float,
    zeta_sites: float,
    separation_sites: float,
    t_factor: float,
    n_out: int,
):
    k1d, _, v_g = _guided_point(k1d_frac, d)
    chain = ChainGeometry(n, d)
    center = 0.5 * (n - 1) * d
    half = 0.5 * separation_sites * d
    state = init_two_photon(
        chain, k1d, zeta_sites * d, (center - half, center + half)
    )
    t_c = half / v_g
    t_f = t_factor * t_c
    t_grid = np.linspace(0.0, t_f, n_out)
    rec = propagate_no_jump(state, build_model(chain), t_grid, method="rk4")
    norm = rec.observables["norm_sq"]
    excited = 2.0 * norm  # each pair state carries two excitations
    gamma_loss = 1.0 - excited[-1] / excited[0]
    return t_grid, excited, norm, rec, {"t_c": t_c, "t_f": t_f, "v_g": v_g,
                                        "gamma_loss": float(gamma_loss)}


def _scn_collision(p: dict, seed: int):
    t_grid, excited, norm, rec, meta = _collision_run(
        p["n_atoms"],
        p["d"],
        p["k1d_frac"],
        p["zeta_sites"],
        p["separation_sites"],
        p["t_factor"],
        p["n_out"],
    )
    pops = rec.observables["site_population"]
    cols = {
        "t": t_grid,
        "excited_population": excited,
        "norm_sq": norm,
        "centroid": pops @ np.arange(p["n_atoms"]) / np.maximum(
            pops.sum(axis=1), 1e-300
        ),
    }
    return cols, meta


def _scn_collision_sweep(p: dict, seed: int):
    rows = {"k1d_frac": [], "d": [], "gamma_loss": []}
    fits = {}
    for frac in p["k1d_fracs"]:
        gammas = []
        for d in p["d_values"]:
            *_, meta = _collision_run(
                p["n_atoms"],
                d,
                frac,
                p["zeta_sites"],
                p["separation_sites"],
                p["t_factor"],
                2,
            )
            rows["k1d_frac"].append(frac)
            rows["d"].append(d)
            rows["gamma_loss"].append(meta["gamma_loss"])
            gammas.append(meta["gamma_loss"])
        try:
            a_fit, b_fit, resid = fit_power_law(np.array(p["d_values"]), gammas)
            fits[str(frac)] = {"A": a_fit, "B": b_fit, "residual": resid}
        except Exception as exc:
            fits[str(frac)] = {"error": str(exc)}
    return {k: np.array(v) for k, v in rows.items()}, {"power_laws": fits}


def _scn_two_qubit_multiphoton(p: dict, seed: int):
    d = p["d"]
    n = p["n_atoms"]
    _, delta, _ = _guided_point(p["k1d_frac"], d)
    rho = p["rho_q_frac"] * d
    chain = ChainGeometry(n, d)
    z_ends = (0.0, (n - 1) * d)  # in line with the end atoms
    qubits = [_site_qubit(z, rho, p["gamma0_q"], delta) for z in z_ends]
    model = build_model(chain, qubits)
    if p["initial"] == "both":
        c = np.zeros((n + 2, n + 2), dtype=complex)
        c[n, n + 1] = c[n + 1, n] = 1.0
        initial = PureState2(c)
    elif p["initial"] == "one":
        amps = np.zeros(n + 2, dtype=complex)
        amps[n] = 1.0
        initial = PureState1(amps)
    else:
        raise ScenarioError(
            f"initial must be 'both' or 'one', got {p['initial']!r}", "config"
        )
    t_grid = np.linspace(0.0, p["t_end"], p["n_out"])
    rec = ensemble_average(
        initial, model, t_grid, p["n_trajectories"], seed, p["n_workers"]
    )
    pops = rec.observables["site_population"]
    cols = {
        "t": t_grid,
        "pop_q1": pops[:, n],
        "pop_q2": pops[:, n + 1],
        "pop_array": pops[:, :n].sum(axis=1),
        "total_excited": rec.observables["total_excited_population"],
        "total_excited_stderr": rec.observables["total_excited_stderr"],
    }
    return cols, {"detuning_q": delta}


# ---------------------------------------------------------------------------
# registry


@dataclass(frozen=True)
class Scenario:
    name: str
    func: Callable
    defaults: dict
    description: str


SCENARIOS: dict[str, Scenario] = {}


def _register(name, func, defaults, description):
    SCENARIOS[name] = Scenario(name, func, defaults, description)


_register(
    "dispersion_curve",
    _scn_dispersion_curve,
    {"d": 0.1, "n_points": 200},
    "Guided-branch dispersion and group velocity over the Brillouin zone.",
)
_register(
    "decay_map",
    _scn_decay_map,
    {
        "d": 0.1,
        "k1d_frac": 0.7,
        "rho_min_frac": 0.3,
        "rho_max_frac": 1.5,
        "n_rho": 12,
        "n_z": 3,
    },
    "Guided and free-space decay rates over transverse/longitudinal position.",
)
_register(
    "magic_point",
    _scn_magic_point,
    {"d": 0.1, "k1d_frac": 0.7},
    "Minimum of the free-space rate over the unit cell and its suppression.",
)
_register(
    "transmission",
    _scn_transmission,
    {
        "n_atoms": 1500,
        "d": 0.1,
        "gamma0_q": 0.02,
        "rho_q_frac": 1.0,
        "n_qubits": 1,
        "qubit_spacing_sites": 20,
        "k1d_frac": 0.7,
        "zeta_sites": 120,
        "launch_sites": 400,
        "span_linewidths": 4.0,
        "n_detunings": 21,
        "compensate_shift": True,
    },
    "Transmission/reflection/loss spectra of a guided packet past qubits.",
)
_register(
    "bandgap_rabi",
    _scn_bandgap_rabi,
    {
        "n_atoms": 199,
        "d": 0.05,
        "gamma0_q": 0.001,
        "rho_q_frac": 0.4,
        "separation_sites": 8,
        "detuning_beyond_gap": 4.5,
        "t_end": 30000.0,
        "n_out": 1200,
    },
    "Rabi oscillations of two bandgap qubits coupled by photonic bound states.",
)
_register(
    "time_delay",
    _scn_time_delay,
    {
        "n_atoms": 2000,
        "d": 0.1,
        "gamma0_q": 0.02,
        "rho_q_frac": 1.0,
        "k1d_frac": 0.95,
        "n_qubits": 2,
        "qubit_separation_sites": 800,
        "detune_above": 14.5,
        "zeta_sites": 150,
        "launch_sites": 300,
        "t_end": 1300.0,
        "n_out": 650,
    },
    "Retarded qubit-qubit excitation exchange through a slow guided packet.",
)
_register(
    "bic",
    _scn_bic,
    {
        "n_atoms": 500,
        "d": 0.1,
        "delta_q": 8.5,
        "gamma0_q": 1.0,
        "rho_q_frac": 0.5,
        "t_end": 30.0,
        "n_out": 600,
    },
    "Fractional decay and revivals of an inverted qubit bound to the array.",
)
_register(
    "chirality_map",
    _scn_chirality_map,
    {
        "n_atoms": 500,
        "d": 0.1,
        "gamma0_q": 0.002,
        "k1d_frac": 0.7,
        "rho_q_frac": 0.4,
        "t_snapshot": 2.0,
        "n_z": 5,
        "n_phi": 9,
        "dipole": _CHIRAL_DIPOLE,
    },
    "Directionality of guided emission vs qubit longitudinal/azimuthal position.",
)
_register(
    "collision",
    _scn_collision,
    {
        "n_atoms": 200,
        "d": 0.1,
        "k1d_frac": 0.7,
        "zeta_sites": 15.0,
        "separation_sites": 60.0,
        "t_factor": 2.0,
        "n_out": 120,
    },
    "Counter-propagating two-photon collision and its nonlinear loss.",
)
_register(
    "collision_sweep",
    _scn_collision_sweep,
    {
        "n_atoms": 120,
        "k1d_fracs": [0.6, 0.7, 0.8, 0.9],
        "d_values": [0.1, 0.15, 0.2, 0.25, 0.3],
        "zeta_sites": 10.0,
        "separation_sites": 40.0,
        "t_factor": 2.0,
    },
    "Collision loss vs lattice constant with per-wave-vector power-law fits.",
)
_register(
    "two_qubit_multiphoton",
    _scn_two_qubit_multiphoton,
    {
        "n_atoms": 120,
        "d": 0.1,
        "k1d_frac": 0.7,
        "gamma0_q": 0.002,
        "rho_q_frac": 0.4,
        "initial": "both",
        "n_trajectories": 100,
        "t_end": 100.0,
        "n_out": 100,
        "n_workers": 1,
    },
    "Trajectory ensemble of end-coupled qubits with one or two excitations.",
)
_register(
    "subradiance_scaling",
    _scn_subradiance_scaling,
    {"d": 0.1, "n_values": [50, 100, 200, 400]},
    "Most-subradiant collective eigenrate vs atom number with power-law fit.",
)


def scenario_names() -> list[str]:
    return sorted(SCENARIOS)


def validate_config(config: dict) -> tuple[Scenario, dict, int]:
    """Check a config dict against the registry; returns (scenario, merged
    params, seed). Raises ScenarioError with a machine-readable category."""
    if not isinstance(config, dict):
        raise ScenarioError("config must be a mapping", "config")
    name = config.get("scenario")
    if name not in SCENARIOS:
        raise ScenarioError(
            f"unknown scenario {name!r}; registered: {', '.join(scenario_names())}",
            "unknown-scenario",
        )
    scn = SCENARIOS[name]
    params = dict(scn.defaults)
    overrides = config.get("params", {}) or {}
    if not isinstance(overrides, dict):
        raise ScenarioError("params must be a mapping", "config")
    unknown = set(overrides) - set(params)
    if unknown:
        raise ScenarioError(
            f"unknown parameter(s) {sorted(unknown)} for scenario {name}; "
            f"valid: {sorted(params)}",
            "config",
        )
    params.update(overrides)
    seed = config.get("seed", 0)
    if not isinstance(seed, int):
        raise ScenarioError("seed must be an integer", "config")
    needs_seed = "n_trajectories" in params
    if needs_seed and "seed" not in config:
        raise ScenarioError(
            f"scenario {name} is stochastic; a seed is required", "config"
        )
    return scn, params, seed


def run_scenario(config: dict) -> ResultTable:
    """Dispatch a config to its registered scenario and package the result
    with full reproducibility metadata."""
    scn, params, seed = validate_config(config)
    t0 = time.time()
    cols, extra = scn.func(params, seed)
    meta = {
        "scenario": scn.name,
        "params": params,
        "seed": seed,
        "version": _VERSION,
        "wall_time_s": time.time() - t0,
    }
    meta.update(extra)
    return ResultTable(columns=cols, metadata=meta)

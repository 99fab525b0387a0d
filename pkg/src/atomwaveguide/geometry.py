"""Unit system, geometry and emitter types, vacuum dyadic Green's tensor, and
pairwise dipole-dipole interaction matrices.

Natural units throughout: Gamma_0 = 1, lambda_0 = 1, hbar = 1. All frequencies
are stored as detunings from the chain resonance, and every Green's function
is evaluated at k = K0 = 2*pi.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

K0 = 2.0 * np.pi  # wavenumber of the chain transition, 2*pi/lambda_0

ZHAT = np.array([0.0, 0.0, 1.0])

_UNIT_TOL = 1e-12


class CoincidentEmittersError(ValueError):
    """Two emitters share a position; the Green's tensor diverges there."""


def _check_unit(vec: np.ndarray, name: str) -> np.ndarray:
    vec = np.asarray(vec, dtype=complex)
    if vec.shape != (3,):
        raise ValueError(f"{name} must be a 3-vector")
    norm = np.sqrt(np.vdot(vec, vec).real)
    if abs(norm - 1.0) > _UNIT_TOL:
        raise ValueError(f"{name} must be a unit vector, |{name}| = {norm}")
    return vec


@dataclass(frozen=True)
class ChainGeometry:
    """Equally spaced collinear array of identical atoms on the z axis.

    spacing_d is in units of lambda_0 and must be subwavelength (d < 0.5) for
    the chain to support guided modes.
    """

    n_atoms: int
    spacing_d: float
    polarization: np.ndarray = field(default_factory=lambda: ZHAT.copy())

    def __post_init__(self):
        if self.n_atoms < 1:
            raise ValueError("n_atoms must be a positive integer")
        if not (0.0 < self.spacing_d < 0.5):
            raise ValueError(
                f"spacing_d must lie in (0, 0.5) lambda_0, got {self.spacing_d}"
            )
        object.__setattr__(
            self, "polarization", _check_unit(self.polarization, "polarization")
        )

    @property
    def atom_positions(self) -> np.ndarray:
        """(N, 3) Cartesian positions, z_j = j*d with rho_j = 0."""
        pos = np.zeros((self.n_atoms, 3))
        pos[:, 2] = np.arange(self.n_atoms) * self.spacing_d
        return pos


@dataclass(frozen=True)
class ImpurityQubit:
    """Additional two-level emitter at cylindrical position (rho, phi, z).

    gamma0_q is the bare linewidth in units of Gamma_0 and detuning_q is
    (omega_q - omega_0) in units of Gamma_0. The dipole may be complex
    (chiral transitions).
    """

    rho_q: float
    phi_q: float
    z_q: float
    dipole: np.ndarray = field(default_factory=lambda: ZHAT.copy())
    gamma0_q: float = 1.0
    detuning_q: float = 0.0

    def __post_init__(self):
        if self.rho_q <= 0:
            raise ValueError("rho_q must be positive (qubit off the chain axis)")
        if self.gamma0_q <= 0:
            raise ValueError("gamma0_q must be positive")
        object.__setattr__(self, "dipole", _check_unit(self.dipole, "dipole"))

    @property
    def position(self) -> np.ndarray:
        """Cartesian position."""
        return np.array(
            [
                self.rho_q * np.cos(self.phi_q),
                self.rho_q * np.sin(self.phi_q),
                self.z_q,
            ]
        )


def _greens_scalars(x: np.ndarray):
    """Scalar coefficients A, B of G0 = e^{ix}/(4 pi R) [A*Id + B*RhatRhat]
    with x = k R. Returned without the e^{ix}/(4 pi R) prefactor."""
    a = 1.0 + (1j * x - 1.0) / x**2
    b = -1.0 + (3.0 - 3j * x) / x**2
    return a, b


def greens_free(r_a: np.ndarray, r_b: np.ndarray, k: float = K0) -> np.ndarray:
    """Vacuum dyadic Green's tensor between two distinct points.

    Closed form of the operator expression (Id + grad grad / k^2) e^{ikR}/4piR:
        G0 = e^{ix}/(4 pi R) [ (1 + (ix-1)/x^2) Id + (-1 + (3-3ix)/x^2) RR ]
    with x = kR and RR the outer product of the unit separation vector.
    """
    if k <= 0:
        raise ValueError("wavenumber k must be positive")
    r_a = np.asarray(r_a, dtype=float)
    r_b = np.asarray(r_b, dtype=float)
    sep = r_a - r_b
    dist = float(np.linalg.norm(sep))
    if dist == 0.0:
        raise CoincidentEmittersError(
            "greens_free requires distinct points; use coincident_greens_imag "
            "for the regular imaginary part at r_a = r_b"
        )
    x = k * dist
    rhat = sep / dist
    a, b = _greens_scalars(x)
    pref = np.exp(1j * x) / (4.0 * np.pi * dist)
    return pref * (a * np.eye(3) + b * np.outer(rhat, rhat))


def coincident_greens_imag(k: float = K0) -> np.ndarray:
    """Finite coincident-point limit Im G0(r, r) = (k / 6 pi) Id."""
    if k <= 0:
        raise ValueError("wavenumber k must be positive")
    return (k / (6.0 * np.pi)) * np.eye(3)


@dataclass(frozen=True)
class Emitter:
    """Generic two-level emitter used to assemble interaction matrices."""

    position: np.ndarray
    dipole: np.ndarray
    gamma0: float = 1.0
    detuning: float = 0.0


def chain_emitters(chain: ChainGeometry) -> list[Emitter]:
    pol = chain.polarization
    return [Emitter(p, pol, 1.0, 0.0) for p in chain.atom_positions]


def qubit_emitter(qubit: ImpurityQubit) -> Emitter:
    return Emitter(qubit.position, qubit.dipole, qubit.gamma0_q, qubit.detuning_q)


def interaction_matrices(emitters: list[Emitter], k: float = K0):
    """Coherent (J) and dissipative (Gamma) interaction matrices in Gamma_0.

    Off-diagonal elements are the dipole sandwiches of Re G0 and Im G0 with
    the geometric-mean linewidth scaling sqrt(gamma0_i gamma0_j); the J
    diagonal holds the per-emitter detunings (local shifts renormalize the
    resonance) and the Gamma diagonal is gamma0_i via the coincident limit.
    Both matrices are Hermitian; they are real symmetric whenever all dipoles
    are real.
    """
    n = len(emitters)
    pos = np.array([np.asarray(e.position, dtype=float) for e in emitters])
    dip = np.array([np.asarray(e.dipole, dtype=complex) for e in emitters])
    gam = np.array([float(e.gamma0) for e in emitters])
    det = np.array([float(e.detuning) for e in emitters])
    if np.any(gam <= 0):
        raise ValueError("all gamma0 must be positive")

    sep = pos[:, None, :] - pos[None, :, :]  # (n, n, 3)
    dist = np.linalg.norm(sep, axis=2)
    off = ~np.eye(n, dtype=bool)
    if np.any(dist[off] == 0.0):
        raise CoincidentEmittersError("emitters must occupy distinct positions")

    np.fill_diagonal(dist, 1.0)  # placeholder, diagonal handled separately
    x = k * dist
    a, b = _greens_scalars(x)
    pref = np.exp(1j * x) / (4.0 * np.pi * dist)

    rhat = sep / dist[:, :, None]
    dd = np.einsum("ia,ja->ij", dip.conj(), dip)  # d_i* . d_j
    d_r = np.einsum("ia,ija->ij", dip.conj(), rhat)  # d_i* . Rhat_ij
    r_d = np.einsum("ija,ja->ij", rhat, dip)  # Rhat_ij . d_j

    # d_i* . Re G0 . d_j and d_i* . Im G0 . d_j via the scalar decomposition
    # (Re G0 = Re(pref*a) Id + Re(pref*b) RR since Id, RR are real).
    ca = pref * a
    cb = pref * b
    re_sand = ca.real * dd + cb.real * d_r * r_d
    im_sand = ca.imag * dd + cb.imag * d_r * r_d

    scale = np.sqrt(np.outer(gam, gam))
    j_mat = -(3.0 * np.pi / k) * scale * re_sand
    g_mat = (6.0 * np.pi / k) * scale * im_sand
    j_mat[np.eye(n, dtype=bool)] = det
    g_mat[np.eye(n, dtype=bool)] = gam  # coincident_greens_imag limit

    if np.max(np.abs(j_mat.imag)) < 1e-12 and np.max(np.abs(g_mat.imag)) < 1e-12:
        return j_mat.real, g_mat.real
    return j_mat, g_mat

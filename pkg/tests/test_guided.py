import numpy as np
import pytest

from atomwaveguide.dispersion import omega_of_kz
from atomwaveguide.geometry import K0, ImpurityQubit
from atomwaveguide.guided import (
    GuidedRates,
    coherent_shift,
    gamma_free_space,
    gamma_guided,
    mode_u,
    mode_v,
)

D = 0.1
K1D = 0.7 * np.pi / D
DELTA = omega_of_kz(K1D, D).real


def test_mode_u_structure():
    u = mode_u(K1D, (0.05, 0.0, 0.033), D)
    assert u.shape == (3,)
    assert u[1] == 0.0  # no azimuthal component for longitudinal polarization


def test_mode_u_bloch_periodicity():
    pos = (0.06, 0.0, 0.021)
    shifted = (0.06, 0.0, 0.021 + D)
    u0 = mode_u(K1D, pos, D)
    u1 = mode_u(K1D, shifted, D)
    assert np.allclose(u1, np.exp(1j * K1D * D) * u0, rtol=1e-8)


def test_mode_v_conjugate_relation_guided():
    # beyond the light line v = -conj(u)
    pos = (0.04, 0.0, 0.05)
    u = mode_u(K1D, pos, D)
    v = mode_v(K1D, pos, D)
    assert np.max(np.abs(v + np.conj(u))) < 1e-12 * np.max(np.abs(u))


def test_mode_v_radiative_branch_differs():
    pos = (0.04, 0.0, 0.05)
    kz = 0.5 * K0  # inside the light line
    u = mode_u(kz, pos, D)
    v = mode_v(kz, pos, D)
    assert np.max(np.abs(v + np.conj(u))) > 1e-3 * np.max(np.abs(u))


def test_mode_u_axis_error():
    with pytest.raises(ValueError):
        mode_u(K1D, (0.0, 0.0, 0.05), D)


def test_gamma_guided_frozen():
    qb = ImpurityQubit(rho_q=D, phi_q=0.0, z_q=0.0)
    rates = gamma_guided(qb, D, DELTA)
    assert isinstance(rates, GuidedRates)
    assert rates.in_band
    assert abs(rates.total - 3.5311031053074533) < 1e-6
    # a linear (real) dipole emits symmetrically
    assert abs(rates.left - rates.right) < 1e-10 * rates.total


def test_gamma_guided_out_of_band():
    qb = ImpurityQubit(rho_q=D, phi_q=0.0, z_q=0.0)
    rates = gamma_guided(qb, D, 100.0)
    assert not rates.in_band
    assert rates.total == 0.0


def test_gamma_free_space_frozen():
    qb = ImpurityQubit(rho_q=D, phi_q=0.0, z_q=0.0)
    assert abs(gamma_free_space(qb, D, DELTA) - 0.9467398758601723) < 1e-5


def test_gamma_free_space_far_away_limit():
    # far from the chain the qubit decays at its bare rate
    qb = ImpurityQubit(rho_q=5.0, phi_q=0.0, z_q=0.0)
    assert abs(gamma_free_space(qb, D, DELTA) - 1.0) < 0.05


def test_chirality_of_rates_with_complex_dipole():
    dip = np.array([-1.0, 0.0, 1j]) / np.sqrt(2)
    qb = ImpurityQubit(rho_q=0.4 * D, phi_q=0.0, z_q=0.5 * D, dipole=dip)
    rates = gamma_guided(qb, D, DELTA)
    assert rates.left > 2.0 * rates.right  # predominantly left-propagating


def test_coherent_shift_richardson_stability():
    qb = ImpurityQubit(rho_q=D, phi_q=0.0, z_q=0.0)
    s1 = coherent_shift(qb, D, DELTA)
    s2 = coherent_shift(qb, D, DELTA, eps=0.5e-6 / D)
    assert abs(s1 - s2) < 1e-3 * max(1.0, abs(s1))


def test_rates_scale_invariance_phi():
    # for z-polarized chain the rates cannot depend on phi_q
    a = gamma_free_space(
        ImpurityQubit(rho_q=0.07, phi_q=0.0, z_q=0.02), D, DELTA
    )
    b = gamma_free_space(
        ImpurityQubit(rho_q=0.07, phi_q=1.3, z_q=0.02), D, DELTA
    )
    assert abs(a - b) < 1e-8

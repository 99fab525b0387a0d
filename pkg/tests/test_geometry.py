import numpy as np
import pytest

from atomwaveguide.geometry import (
    K0,
    ChainGeometry,
    CoincidentEmittersError,
    Emitter,
    ImpurityQubit,
    chain_emitters,
    coincident_greens_imag,
    greens_free,
    interaction_matrices,
    qubit_emitter,
)


def test_chain_positions():
    chain = ChainGeometry(5, 0.1)
    pos = chain.atom_positions
    assert pos.shape == (5, 3)
    assert np.allclose(pos[:, :2], 0.0)
    assert np.allclose(np.diff(pos[:, 2]), 0.1)


def test_chain_validation():
    with pytest.raises(ValueError):
        ChainGeometry(0, 0.1)
    with pytest.raises(ValueError):
        ChainGeometry(5, 0.6)  # not subwavelength
    with pytest.raises(ValueError):
        ChainGeometry(5, 0.1, polarization=np.array([0, 0, 2.0]))


def test_qubit_validation():
    with pytest.raises(ValueError):
        ImpurityQubit(rho_q=0.0, phi_q=0.0, z_q=0.0)
    with pytest.raises(ValueError):
        ImpurityQubit(rho_q=0.1, phi_q=0.0, z_q=0.0, gamma0_q=-1.0)
    q = ImpurityQubit(rho_q=0.05, phi_q=np.pi / 3, z_q=0.2)
    assert abs(np.linalg.norm(q.position[:2]) - 0.05) < 1e-14
    assert q.position[2] == 0.2


def test_greens_reciprocity_and_symmetry():
    rng = np.random.default_rng(3)
    for _ in range(5):
        ra, rb = rng.normal(size=3), rng.normal(size=3)
        g_ab = greens_free(ra, rb)
        g_ba = greens_free(rb, ra)
        assert np.allclose(g_ab, g_ab.T, atol=1e-14)  # symmetric tensor
        assert np.allclose(g_ab, g_ba.T, atol=1e-14)  # reciprocity


def test_greens_far_field_transverse():
    # far field: transverse projector times spherical wave
    r = np.array([500.0, 0.0, 0.0])
    g = greens_free(r, np.zeros(3))
    pref = np.exp(1j * K0 * 500.0) / (4 * np.pi * 500.0)
    expected = pref * np.diag([0.0, 1.0, 1.0])
    # near-field corrections enter at order 1/(kR) ~ 3e-4
    assert np.allclose(g, expected, atol=abs(pref) * 2e-3)


def test_greens_coincident():
    with pytest.raises(CoincidentEmittersError):
        greens_free(np.zeros(3), np.zeros(3))
    assert np.allclose(coincident_greens_imag(), K0 / (6 * np.pi) * np.eye(3))


def test_interaction_matrices_chain():
    chain = ChainGeometry(6, 0.1)
    j_mat, g_mat = interaction_matrices(chain_emitters(chain))
    # real dipoles: real symmetric matrices
    assert j_mat.dtype.kind == "f" and g_mat.dtype.kind == "f"
    assert np.allclose(j_mat, j_mat.T)
    assert np.allclose(g_mat, g_mat.T)
    assert np.allclose(np.diag(j_mat), 0.0)
    assert np.allclose(np.diag(g_mat), 1.0)


def test_interaction_single_pair_closed_form():
    # explicit sandwich against the dyadic closed form for one pair
    e1 = Emitter(np.zeros(3), np.array([0, 0, 1.0]))
    e2 = Emitter(np.array([0.0, 0.0, 0.13]), np.array([0, 0, 1.0]))
    j_mat, g_mat = interaction_matrices([e1, e2])
    g = greens_free(e1.position, e2.position)
    sand = g[2, 2]
    assert abs(j_mat[0, 1] - (-3 * np.pi / K0) * sand.real) < 1e-14
    assert abs(g_mat[0, 1] - (6 * np.pi / K0) * sand.imag) < 1e-14


def test_interaction_chiral_dipole_hermitian():
    dip = np.array([-1.0, 0.0, 1j]) / np.sqrt(2)
    q = ImpurityQubit(rho_q=0.04, phi_q=0.0, z_q=0.05, dipole=dip, gamma0_q=0.01)
    chain = ChainGeometry(4, 0.1)
    ems = chain_emitters(chain) + [qubit_emitter(q)]
    j_mat, g_mat = interaction_matrices(ems)
    assert np.iscomplexobj(j_mat)
    assert np.allclose(j_mat, j_mat.conj().T, atol=1e-13)
    assert np.allclose(g_mat, g_mat.conj().T, atol=1e-13)
    # the chiral coupling must break the transpose symmetry
    assert not np.allclose(j_mat, j_mat.T)


def test_interaction_gamma_mean_scaling():
    e1 = Emitter(np.zeros(3), np.array([0, 0, 1.0]), gamma0=1.0)
    e2 = Emitter(np.array([0.2, 0, 0]), np.array([0, 0, 1.0]), gamma0=0.04)
    _, g_mat = interaction_matrices([e1, e2])
    _, g_ref = interaction_matrices(
        [e1, Emitter(e2.position, e2.dipole, gamma0=1.0)]
    )
    assert abs(g_mat[0, 1] - 0.2 * g_ref[0, 1]) < 1e-14
    assert g_mat[1, 1] == 0.04


def test_interaction_coincident_error():
    e = Emitter(np.zeros(3), np.array([0, 0, 1.0]))
    with pytest.raises(CoincidentEmittersError):
        interaction_matrices([e, e])

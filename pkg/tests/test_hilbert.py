import numpy as np
import pytest

from sdsqueeze import hilbert as hb
from sdsqueeze.errors import DimensionMismatch, TruncationError


def test_destroy_matrix_elements():
    mode = hb.ModeSpace(8)
    a = hb.destroy(mode)
    for n in range(1, 8):
        assert a[n - 1, n] == pytest.approx(np.sqrt(n))
    # only the first superdiagonal is populated
    mask = np.ones_like(a, dtype=bool)
    mask[np.arange(7), np.arange(1, 8)] = False
    assert np.all(a[mask] == 0)


def test_vacuum_annihilation_and_number():
    mode = hb.ModeSpace(6)
    a = hb.destroy(mode)
    vac = np.zeros(6); vac[0] = 1
    assert np.allclose(a @ vac, 0)
    one = np.zeros(6); one[1] = 1
    assert np.allclose(a @ one, vac)
    n_op = a.conj().T @ a
    assert np.allclose(np.diag(n_op).real, np.arange(6))


def test_quadrature_vacuum_moments():
    mode = hb.ModeSpace(24)
    x, p = hb.quadratures(mode)
    vac = np.zeros(24, dtype=complex); vac[0] = 1
    assert np.vdot(vac, x @ vac) == pytest.approx(0.0)
    assert np.vdot(vac, x @ x @ vac).real == pytest.approx(1.0)
    assert np.vdot(vac, p @ p @ vac).real == pytest.approx(1.0)


def test_quadrature_commutator_interior():
    mode = hb.ModeSpace(16)
    x, p = hb.quadratures(mode)
    comm = x @ p - p @ x
    expect = 2j * np.eye(16)
    # corner deviation at the last level is a truncation artifact
    assert np.allclose(comm[:14, :14], expect[:14, :14], atol=1e-12)
    assert abs(comm[15, 15] - 2j) > 1


@pytest.mark.parametrize("n_spins", [1, 2, 3, 4, 5, 6])
def test_su2_algebra(n_spins):
    spin = hb.SpinSpace(n_spins)
    jx = hb.collective_spin(spin, "x")
    jy = hb.collective_spin(spin, "y")
    jz = hb.collective_spin(spin, "z")
    assert np.allclose(jx @ jy - jy @ jx, 1j * jz, atol=1e-12)
    assert np.allclose(np.diag(jz), spin.m_values())


def test_single_spin_is_half_pauli():
    spin = hb.SpinSpace(1)
    jx = hb.collective_spin(spin, "x")
    jz = hb.collective_spin(spin, "z")
    assert np.allclose(jx, np.array([[0, 0.5], [0.5, 0]]))
    assert np.allclose(jz, np.diag([-0.5, 0.5]))


def test_highest_weight():
    spin = hb.SpinSpace(5)
    jz = hb.collective_spin(spin, "z")
    top = np.zeros(6); top[-1] = 1
    assert np.allclose(jz @ top, 2.5 * top)


def test_displacement_identity_and_occupation():
    mode = hb.ModeSpace(48)
    assert np.allclose(hb.displacement(mode, 0.0), np.eye(48), atol=1e-13)
    beta = 0.7 - 0.4j
    vac = np.zeros(48, dtype=complex); vac[0] = 1
    state = hb.displacement(mode, beta) @ vac
    n_op = np.diag(np.arange(48)).astype(complex)
    assert np.vdot(state, n_op @ state).real == pytest.approx(abs(beta) ** 2, rel=1e-10)
    # Poisson amplitudes |beta|^n e^{-|beta|^2/2}/sqrt(n!)
    from math import factorial
    expected = np.array([beta**n / np.sqrt(factorial(n)) for n in range(20)]) * np.exp(-abs(beta)**2 / 2)
    phase = state[0] / expected[0]
    assert np.allclose(state[:20], expected * phase, atol=1e-10)


def test_displacement_braiding_phase():
    # D(a) D(b) D(-a) = exp(2i Im(a conj(b))) D(b)
    mode = hb.ModeSpace(64)
    a_amp, b_amp = 0.3 + 0.2j, -0.25 + 0.4j
    left = hb.displacement(mode, a_amp) @ hb.displacement(mode, b_amp) @ hb.displacement(mode, -a_amp)
    right = np.exp(2j * np.imag(a_amp * np.conj(b_amp))) * hb.displacement(mode, b_amp)
    keep = 32
    assert np.allclose(left[:keep, :keep], right[:keep, :keep], atol=1e-10)


def test_squeeze_identity_occupation_variances():
    mode = hb.ModeSpace(64)
    assert np.allclose(hb.squeeze(mode, 0.0), np.eye(64), atol=1e-13)
    zeta = 0.8
    state = hb.squeezed_vacuum(mode, zeta)
    n_op = np.diag(np.arange(64)).astype(complex)
    assert np.vdot(state, n_op @ state).real == pytest.approx(np.sinh(zeta) ** 2, rel=1e-10)
    x, p = hb.quadratures(mode)
    var_x = np.vdot(state, x @ x @ state).real
    var_p = np.vdot(state, p @ p @ state).real
    assert var_x == pytest.approx(np.exp(-2 * zeta), rel=1e-9)
    assert var_p == pytest.approx(np.exp(2 * zeta), rel=1e-9)


@pytest.mark.parametrize("n_spins", [1, 2, 3, 4])
def test_spin_dependent_squeeze_blocks(n_spins):
    space = hb.hybrid(n_spins, 24)
    zeta = 0.35
    op = hb.spin_dependent_squeeze(space, zeta)
    mat = op.to_dense()
    for k, m in enumerate(space.spin.m_values()):
        block = mat[k * 24:(k + 1) * 24, k * 24:(k + 1) * 24]
        assert np.allclose(block, hb.squeeze(space.mode, zeta * m), atol=1e-12)
    # off-diagonal blocks vanish
    mat2 = mat.copy()
    for k in range(n_spins + 1):
        mat2[k * 24:(k + 1) * 24, k * 24:(k + 1) * 24] = 0
    assert np.max(np.abs(mat2)) == 0


def test_sds_identity_at_zero():
    space = hb.hybrid(2, 12)
    assert np.allclose(hb.spin_dependent_squeeze(space, 0.0).to_dense(), np.eye(space.dim), atol=1e-13)


def test_sds_on_single_spin_superposition():
    # N=1: S(zeta Jz)|0>(|-1/2>+|1/2>)/sqrt2 -> squeezed states +-zeta/2 per sector
    space = hb.hybrid(1, 32)
    zeta = 0.9
    ket = hb.vacuum_ket(space, np.array([1, 1]) / np.sqrt(2))
    out = (hb.spin_dependent_squeeze(space, zeta) @ ket).reshaped()
    assert np.allclose(out[0], hb.squeezed_vacuum(space.mode, -zeta / 2) / np.sqrt(2), atol=1e-12)
    assert np.allclose(out[1], hb.squeezed_vacuum(space.mode, zeta / 2) / np.sqrt(2), atol=1e-12)


@pytest.mark.parametrize("n_spins,zeta", [(1, 1.5), (2, 0.9), (3, 0.9), (4, 0.5)])
def test_braiding_identity_per_block(n_spins, zeta):
    # S(zeta m) D(beta) S(-zeta m) = D(beta cosh(zeta m) - conj(beta) sinh(zeta m))
    n_max = 512
    keep = 12
    mode = hb.ModeSpace(n_max)
    beta = 0.11 - 0.07j
    for m in (np.arange(n_spins + 1) - n_spins / 2):
        left = hb.squeeze(mode, zeta * m) @ hb.displacement(mode, beta) @ hb.squeeze(mode, -zeta * m)
        braided = beta * np.cosh(zeta * m) - np.conj(beta) * np.sinh(zeta * m)
        right = hb.displacement(mode, braided)
        # residual is the truncation-edge tail; far below any physical scale
        assert np.max(np.abs(left[:, :keep] - right[:, :keep])) < 1e-7


def test_mode_occupation_of_sds_state():
    # <n> = 2 sum_{m>0} |c_m|^2 sinh^2(zeta m) for symmetric weights
    from sdsqueeze.metrology import spin_states, mode_occupation_sds
    space = hb.hybrid(3, 128)
    zeta = 0.6
    w = spin_states("coherent_x", 3)
    ket = hb.spin_dependent_squeeze(space, zeta) @ hb.vacuum_ket(space, w.weights)
    assert hb.mode_occupation(ket) == pytest.approx(mode_occupation_sds(w, zeta), rel=1e-10)


def test_unitarity_on_populated_levels():
    mode = hb.ModeSpace(96)
    for gen_unitary in (hb.displacement(mode, 0.5 + 0.2j), hb.squeeze(mode, 0.6)):
        prod = gen_unitary.conj().T @ gen_unitary
        keep = 48
        assert np.linalg.norm(prod[:keep, :keep] - np.eye(keep)) < 1e-9


def test_fidelity_properties():
    space = hb.hybrid(1, 32)
    v = hb.vacuum_ket(space, np.array([0.6, 0.8]))
    assert hb.fidelity(v, v) == pytest.approx(1.0)
    a = hb.vacuum_ket(space, np.array([1, 0]))
    b = hb.vacuum_ket(space, np.array([0, 1]))
    assert hb.fidelity(a, b) == pytest.approx(0.0, abs=1e-14)
    # global phase invariance
    c = hb.Ket(space, np.exp(0.3j) * v.amplitudes)
    assert hb.fidelity(v, c) == pytest.approx(1.0)


def test_fidelity_coherent_vacuum_overlap():
    space = hb.hybrid(1, 64)
    beta = 0.8 + 0.3j
    vac = hb.vacuum_ket(space, np.array([1, 0]))
    amps = vac.reshaped().copy()
    amps[0] = hb.displacement(space.mode, beta) @ amps[0]
    disp = hb.Ket(space, amps.ravel())
    assert hb.fidelity(vac, disp) == pytest.approx(np.exp(-abs(beta) ** 2), rel=1e-10)


def test_fidelity_dimension_mismatch():
    a = hb.vacuum_ket(hb.hybrid(1, 16))
    b = hb.vacuum_ket(hb.hybrid(1, 17))
    with pytest.raises(DimensionMismatch):
        hb.fidelity(a, b)


def test_truncation_error_raised():
    space = hb.hybrid(1, 16)
    amps = np.ones(space.dim, dtype=complex)
    ket = hb.Ket(space, amps / np.linalg.norm(amps))
    with pytest.raises(TruncationError):
        ket.check_truncation()


def test_linop_flag_verification():
    space = hb.hybrid(1, 8)
    mat = np.random.default_rng(0).normal(size=(space.dim, space.dim))
    with pytest.raises(ValueError):
        hb.LinOp(space, mat, hermitian=True)
    hb.LinOp(space, mat + mat.T, hermitian=True)  # symmetric real is fine


def test_hybrid_space_dimensions():
    space = hb.hybrid(3, 10, ancillas=2)
    assert space.dim == 4 * 10 * 4
    assert space.shape == (4, 10, 2, 2)


def test_ket_json_roundtrip():
    space = hb.hybrid(2, 8, ancillas=1)
    rng = np.random.default_rng(7)
    amps = rng.normal(size=space.dim) + 1j * rng.normal(size=space.dim)
    ket = hb.Ket(space, amps / np.linalg.norm(amps))
    back = hb.ket_from_json(hb.ket_to_json(ket))
    assert back.space == space
    assert np.allclose(back.amplitudes, ket.amplitudes)


def test_recommended_n_max():
    assert hb.recommended_n_max(0.0) == 32
    assert hb.recommended_n_max(1.0) == int(np.ceil(8 * np.e ** 2))
    assert hb.recommended_n_max(2.5) >= 8 * np.exp(5) - 1

"""Measurement-sequence simulation and classical Fisher information.

Every protocol here follows the same pattern: a full state-vector
simulation on the truncated hybrid space, paired with an independent
closed-form (Gaussian-overlap) route used to cross-check it.  The braided
displacement amplitude that both routes share is

    beta_m = beta cosh(zeta m) - conj(beta) sinh(zeta m)

for Dicke sector m after the squeeze / displace / unsqueeze sandwich.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import lgamma

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import expm_multiply

from . import hilbert as hb
from .errors import IllConditioned, UnsupportedParity
from .metrology import DickeWeights, spin_states


@dataclass
class OutcomeDistribution:
    """Labelled probability vector of one measurement setting."""

    labels: list
    probabilities: np.ndarray

    def __post_init__(self):
        self.probabilities = np.asarray(self.probabilities, dtype=float)
        if np.any(self.probabilities < -1e-12):
            raise ValueError("negative probability")
        total = self.probabilities.sum()
        if abs(total - 1.0) > 1e-10:
            raise ValueError(f"probabilities sum to {total}")

    def __getitem__(self, label):
        return float(self.probabilities[self.labels.index(label)])


@dataclass
class CfiResult:
    setting: str
    value: object  # scalar CFI or 2x2 matrix
    beta: float
    step: float

    def __post_init__(self):
        v = np.asarray(self.value, dtype=float)
        if v.ndim == 0:
            if v < -1e-9:
                raise ValueError("scalar CFI must be nonnegative")
        else:
            if np.min(np.linalg.eigvalsh((v + v.T) / 2)) < -1e-6 * max(1.0, np.max(np.abs(v))):
                raise ValueError("matrix CFI must be positive semi-definite")


def braided_amplitudes(zeta: float, beta: complex, m_values: np.ndarray) -> np.ndarray:
    """Spin-dependent displacement amplitudes after the time-reversal sandwich."""
    return beta * np.cosh(zeta * m_values) - np.conj(beta) * np.sinh(zeta * m_values)


def displaced_vacuum_overlap(a: complex, b: complex) -> complex:
    """<0| D(a)^dag D(b) |0> = exp(-|b-a|^2/2) exp(i Im(conj(a) b))."""
    return np.exp(-abs(b - a) ** 2 / 2 + 1j * np.imag(np.conj(a) * b))


# ---------------------------------------------------------------------------
# time-reversal sequence
# ---------------------------------------------------------------------------

def time_reversal_state(zeta: float, beta: complex, spin_init: DickeWeights,
                        space: hb.HybridSpace, check_tail: bool = True) -> hb.Ket:
    """Apply S(-zeta Jz), then D(beta), then S(zeta Jz) to |0>_b |spin_init>."""
    if space.spin.n_spins != spin_init.n_spins:
        raise ValueError("spin_init does not match the space")
    m_vals = space.spin.m_values()
    amps = np.zeros((space.spin.dim, space.mode.n_max), dtype=complex)
    amps[:, 0] = spin_init.weights
    for k, m in enumerate(m_vals):
        if amps[k, 0] == 0:
            continue
        amps[k] = hb.squeeze(space.mode, -zeta * m) @ amps[k]
    d = hb.displacement(space.mode, beta)
    amps = amps @ d.T
    for k, m in enumerate(m_vals):
        amps[k] = hb.squeeze(space.mode, zeta * m) @ amps[k]
    ket = hb.Ket(space, amps.ravel())
    if check_tail:
        ket.check_truncation()
    return ket


def _dicke_distribution(ket: hb.Ket) -> OutcomeDistribution:
    probs = np.abs(ket.reshaped()) ** 2
    per_m = probs.sum(axis=tuple(range(1, probs.ndim)))
    return OutcomeDistribution(list(ket.space.spin.m_values()), per_m)


def _rotate_spin(ket: hb.Ket, rotation: np.ndarray) -> hb.Ket:
    shaped = ket.reshaped().reshape(ket.space.spin.dim, -1)
    return hb.Ket(ket.space, (rotation @ shaped).ravel())


def spin_rotation_y(n_spins: int, angle: float) -> np.ndarray:
    """exp(i angle Jy) on the Dicke basis."""
    jy = hb.collective_spin(hb.SpinSpace(n_spins), "y")
    return hb.unitary_from_generator(1j * angle * jy)


# ---------------------------------------------------------------------------
# single spin readout
# ---------------------------------------------------------------------------

def single_spin_probability(zeta: float, beta: complex) -> OutcomeDistribution:
    """Closed-form outcome distribution of the single-spin time-reversal readout.

    P(+1/2) = (1/2)[1 + exp(-|b|^2 (cosh z - 1)) cos(2 Re(b) Im(b) sinh z)].
    """
    decay = np.exp(-abs(beta) ** 2 * (np.cosh(zeta) - 1.0))
    osc = np.cos(2.0 * beta.real * beta.imag * np.sinh(zeta))
    p_up = 0.5 * (1.0 + decay * osc)
    return OutcomeDistribution([-0.5, 0.5], np.array([1.0 - p_up, p_up]))


def simulate_single_spin(zeta: float, beta: complex, n_max: int | None = None) -> OutcomeDistribution:
    """Full hybrid-space simulation of the single-spin readout."""
    if n_max is None:
        n_max = 2 * hb.recommended_n_max(abs(zeta) / 2)
    space = hb.hybrid(1, n_max)
    ket = time_reversal_state(zeta, beta, spin_states("ghz", 1), space)
    ket = _rotate_spin(ket, spin_rotation_y(1, np.pi / 2))
    return _dicke_distribution(ket)


# ---------------------------------------------------------------------------
# GHZ readout (rotated one-axis twisting), even N
# ---------------------------------------------------------------------------

def rotated_oat_unitary(n_spins: int) -> np.ndarray:
    """exp(-i phi Jz) exp(-i pi/2 Jx^2) exp(i phi Jz), phi = (-1)^(N/2) pi / (2N)."""
    if n_spins % 2:
        raise UnsupportedParity("GHZ readout is defined for even N only")
    spin = hb.SpinSpace(n_spins)
    jz = hb.collective_spin(spin, "z")
    jx = hb.collective_spin(spin, "x")
    phi = (-1) ** (n_spins // 2) * np.pi / (2 * n_spins)
    r_minus = hb.unitary_from_generator(-1j * phi * jz)
    twist = hb.unitary_from_generator(-1j * (np.pi / 2) * (jx @ jx))
    r_plus = hb.unitary_from_generator(1j * phi * jz)
    return r_minus @ twist @ r_plus


def ghz_protocol_probability(n_spins: int, zeta: float, beta: complex,
                             n_max: int | None = None) -> OutcomeDistribution:
    """Simulated GHZ time-reversal readout; support only on m = +-N/2."""
    if n_spins % 2:
        raise UnsupportedParity("GHZ readout is defined for even N only")
    if n_max is None:
        n_max = 2 * hb.recommended_n_max(abs(zeta) * n_spins / 2)
    space = hb.hybrid(n_spins, n_max)
    ket = time_reversal_state(zeta, beta, spin_states("ghz", n_spins), space)
    ket = _rotate_spin(ket, rotated_oat_unitary(n_spins))
    return _dicke_distribution(ket)


def ghz_probability_closed_form(n_spins: int, zeta: float, beta: complex) -> float:
    """P(N/2) from the Gaussian overlap of the two braided branches."""
    big = n_spins * zeta
    decay = np.exp(-abs(beta) ** 2 * (np.cosh(big) - 1.0))
    osc = np.cos(2.0 * beta.real * beta.imag * np.sinh(big))
    return 0.5 * (1.0 + decay * osc)


# ---------------------------------------------------------------------------
# coherent spin state readout
# ---------------------------------------------------------------------------

def wigner_d_half_pi(n_spins: int) -> np.ndarray:
    """Rotation matrix elements d^{N/2}_{m',m}(pi/2) via the factorial sum.

    Log-factorials keep the sum stable for large N.  Basis order matches
    the Dicke convention used everywhere else (m ascending).
    """
    j = n_spins / 2
    ms = np.arange(n_spins + 1) - j
    d = np.zeros((n_spins + 1, n_spins + 1))
    for i, mp in enumerate(ms):
        for l, m in enumerate(ms):
            k_min = int(max(0, mp - m))
            k_max = int(min(j + mp, j - m))
            total = 0.0
            for k in range(k_min, k_max + 1):
                ln = 0.5 * (lgamma(j + m + 1) + lgamma(j - m + 1)
                            + lgamma(j + mp + 1) + lgamma(j - mp + 1)) \
                    - (lgamma(j + mp - k + 1) + lgamma(k + 1)
                       + lgamma(j - m - k + 1) + lgamma(k - mp + m + 1))
                total += (-1) ** (k - m + mp) * np.exp(ln)
            d[i, l] = 2.0 ** (-j) * total
    return d


def coherent_protocol_distribution(n_spins: int, zeta: float, beta: complex) -> OutcomeDistribution:
    """Outcome distribution of the coherent-spin-state readout, via exact overlaps.

    The rotated state is sum_{m} R_{m'm} c_m D(beta_m)|0>; projecting on
    Dicke state m' leaves a quadratic form in Gaussian overlaps, evaluated
    here without any Fock truncation.
    """
    w = spin_states("coherent_x", n_spins)
    m_vals = w.m_values()
    rot = spin_rotation_y(n_spins, np.pi / 2)
    if np.max(np.abs(rot.imag)) > 1e-12:
        raise AssertionError("Jy rotation should be real in the Dicke basis")
    rot = rot.real
    bm = braided_amplitudes(zeta, beta, m_vals)
    ov = np.array([[displaced_vacuum_overlap(bi, bj) for bj in bm] for bi in bm])
    amps = rot * w.weights.real[None, :]
    probs = np.einsum("im,in,mn->i", amps, amps, ov).real
    probs = np.clip(probs, 0.0, None)
    return OutcomeDistribution(list(m_vals), probs / probs.sum())


def simulate_coherent_protocol(n_spins: int, zeta: float, beta: complex,
                               n_max: int | None = None) -> OutcomeDistribution:
    """Hybrid-space simulation of the coherent-spin-state readout."""
    if n_max is None:
        n_max = 2 * hb.recommended_n_max(abs(zeta) * n_spins / 2)
    space = hb.hybrid(n_spins, n_max)
    ket = time_reversal_state(zeta, beta, spin_states("coherent_x", n_spins), space)
    ket = _rotate_spin(ket, spin_rotation_y(n_spins, np.pi / 2))
    return _dicke_distribution(ket)


# ---------------------------------------------------------------------------
# classical Fisher information
# ---------------------------------------------------------------------------

def cfi_of_distribution(dist_fn, at: float, fd_step: float | None = None) -> float:
    """Scalar CFI sum_k (dp_k/dtheta)^2 / p_k by central difference at `at`."""
    h = fd_step if fd_step is not None else max(1e-7, 1e-3 * at)
    p0 = np.asarray(dist_fn(at).probabilities)
    dp = (np.asarray(dist_fn(at + h).probabilities)
          - np.asarray(dist_fn(at - h).probabilities)) / (2.0 * h)
    total = 0.0
    for pk, dk in zip(p0, dp):
        if pk < 1e-12:
            if abs(dk) > 1e-8:
                raise IllConditioned(f"probability {pk:.1e} with derivative {dk:.1e}")
            continue
        total += dk * dk / pk
    return total


def richardson_limit(values: list) -> float:
    """Extrapolate f(b), f(b/2), ... to b -> 0 assuming an even error series."""
    vals = list(values)
    factor = 4.0
    while len(vals) > 1:
        vals = [(factor * vals[i + 1] - vals[i]) / (factor - 1.0) for i in range(len(vals) - 1)]
        factor *= 4.0
    return vals[0]


def cfi_abs_beta(dist_fn, betas=(1e-2, 5e-3, 2.5e-3, 1.25e-3), phase: float = 0.0,
                 setting: str = "abs") -> CfiResult:
    """CFI for |beta| -> 0, Richardson-extrapolated over a halving ladder.

    `dist_fn` maps a magnitude |beta| (at fixed phase) to an
    OutcomeDistribution.  The probabilities are even in |beta| around zero
    up to the quadratic leading order, so the CFI carries an even error
    series in |beta| and the halving ladder removes it order by order.
    """
    e = np.exp(1j * phase)
    series = [cfi_of_distribution(lambda b: dist_fn(b * e), b) for b in betas]
    value = richardson_limit(series)
    return CfiResult(setting, value, min(betas), max(1e-7, 1e-3 * min(betas)))


_COHERENT_CFI_COEFFS = {
    1: (4.0,),
    3: (4.5, 4.0, 3.5),
    5: (165 / 32, 204 / 32, 188 / 32, 52 / 32, 31 / 32),
    7: (2954 / 512, 4192 / 512, 3953 / 512, 1712 / 512, 1158 / 512, 240 / 512, 127 / 512),
}


def cfi_closed_form_coherent(n_spins: int, zeta: float) -> float:
    """Exact beta -> 0 CFI of the coherent-spin-state readout, odd N <= 7.

    F = sinh^2(zeta/2) * sum_i a_i cosh(i zeta); for N = 1 this reduces to
    2 (cosh zeta - 1).
    """
    if n_spins not in _COHERENT_CFI_COEFFS:
        raise ValueError("closed form available for N in {1, 3, 5, 7} only")
    coeffs = _COHERENT_CFI_COEFFS[n_spins]
    series = sum(a * np.cosh(i * zeta) for i, a in enumerate(coeffs))
    return float(np.sinh(zeta / 2.0) ** 2 * series)


# ---------------------------------------------------------------------------
# two-ancilla joint readout (N = 1 system spin)
# ---------------------------------------------------------------------------

_HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def ancilla_recommended_n_max(zeta: float) -> int:
    """Truncation for the joint readout: squeeze sectors reach exp(+-zeta)."""
    return int(np.ceil(1.25 * hb.recommended_n_max(abs(zeta))))


def _mode_generator(n_max: int, beta: complex):
    a = sparse.csr_matrix(
        (np.sqrt(np.arange(1, n_max)), (np.arange(n_max - 1), np.arange(1, n_max))),
        shape=(n_max, n_max), dtype=complex)
    return beta * a.getH() - np.conj(beta) * a


def _squeeze_generator(n_max: int, zeta: complex):
    a = sparse.csr_matrix(
        (np.sqrt(np.arange(1, n_max)), (np.arange(n_max - 1), np.arange(1, n_max))),
        shape=(n_max, n_max), dtype=complex)
    a2 = a @ a
    return 0.5 * (np.conj(zeta) * a2 - zeta * a2.getH())


@lru_cache(maxsize=8)
def _dense_squeeze(zeta: float, n_max: int) -> np.ndarray:
    # reused across every evaluation point of a Fisher-matrix sweep
    return hb.squeeze(hb.ModeSpace(n_max), zeta)


def _apply_mode(gen, array, mode_axis=1):
    """exp(gen) acting along the mode axis of a state array."""
    moved = np.moveaxis(array, mode_axis, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = expm_multiply(gen, flat)
    return np.moveaxis(out.reshape(moved.shape), 0, mode_axis)


def _apply_mode_dense(mat, array, mode_axis=1):
    moved = np.moveaxis(array, mode_axis, 0)
    flat = moved.reshape(moved.shape[0], -1)
    out = mat @ flat
    return np.moveaxis(out.reshape(moved.shape), 0, mode_axis)


def _apply_hadamard(array, axis):
    return np.moveaxis(np.tensordot(_HADAMARD, array, axes=(1, axis)), 0, axis)


def _conditional_displacement_z(array, amplitude, ancilla_axis, n_max):
    """Mode displacement by amplitude * (sigma_z eigenvalue of one ancilla)."""
    plus = [slice(None)] * array.ndim
    minus = [slice(None)] * array.ndim
    plus[ancilla_axis] = 0
    minus[ancilla_axis] = 1
    out = array.copy()
    out[tuple(plus)] = _apply_mode(_mode_generator(n_max, amplitude), out[tuple(plus)], 1)
    out[tuple(minus)] = _apply_mode(_mode_generator(n_max, -amplitude), out[tuple(minus)], 1)
    return out


def _conditional_displacement(array, amplitude, ancilla_axis, n_max):
    """Mode displacement by amplitude * (sigma_x eigenvalue of one ancilla).

    Realized as the sigma_z-conditioned displacement conjugated by the
    Hadamard basis change; the two conditioning conventions differ by
    exactly this rotation on each ancilla.
    """
    arr = _apply_hadamard(array, ancilla_axis)
    arr = _conditional_displacement_z(arr, amplitude, ancilla_axis, n_max)
    return _apply_hadamard(arr, ancilla_axis)


def _ancilla_sequence_state(zeta: float, g: float, beta: complex | None, n_max: int,
                            conditioning: str = "x") -> np.ndarray:
    """State array (spin, mode, anc1, anc2) after the joint-readout sequence.

    With beta=None, stops after reference-state preparation (before the
    signal and the un-doing half of the sandwich).  The system spin enters
    as exp(+-zeta) amplification, i.e. the squeeze argument per sigma_z
    sector is +-zeta.

    conditioning="x": ancillas start in the up state and the displacements
    condition on sigma_x.  conditioning="z": the Hadamard-rotated image
    (ancillas start in |+>, displacements condition on sigma_z, readout in
    the sigma_x basis); both give identical outcome statistics.
    """
    if conditioning not in ("x", "z"):
        raise ValueError(f"unknown conditioning {conditioning!r}")
    psi = np.zeros((2, n_max, 2, 2), dtype=complex)
    psi[0, 0, 0, 0] = 1 / np.sqrt(2)   # (|-1/2> + |+1/2>) |0>_b |up up>
    psi[1, 0, 0, 0] = 1 / np.sqrt(2)
    if conditioning == "z":
        psi = _apply_hadamard(_apply_hadamard(psi, 2), 3)   # ancillas to |+>
        displace = _conditional_displacement_z
    else:
        displace = _conditional_displacement
    psi = displace(psi, -g, 3, n_max)
    psi = displace(psi, -1j * g, 2, n_max)
    for sector, sign in ((0, -1.0), (1, 1.0)):   # sigma_z eigenvalue per spin sector
        psi[sector] = _apply_mode_dense(_dense_squeeze(-zeta * sign, n_max), psi[sector], 0)
    if beta is None:
        return psi
    psi = _apply_mode(_mode_generator(n_max, beta), psi, 1)
    for sector, sign in ((0, -1.0), (1, 1.0)):
        psi[sector] = _apply_mode_dense(_dense_squeeze(zeta * sign, n_max), psi[sector], 0)
    psi = displace(psi, 1j * g, 2, n_max)
    psi = displace(psi, g, 3, n_max)
    if conditioning == "z":
        psi = _apply_hadamard(_apply_hadamard(psi, 2), 3)   # sigma_x readout basis
    return psi


def ancilla_multiparam_distribution(zeta: float, g: float, beta: complex,
                                    n_max: int | None = None,
                                    conditioning: str = "x") -> tuple:
    """Simulated (P_up ancilla 1, P_up ancilla 2) of the joint readout."""
    if n_max is None:
        n_max = ancilla_recommended_n_max(zeta)
    psi = _ancilla_sequence_state(zeta, g, beta, n_max, conditioning)
    space = hb.hybrid(1, n_max, ancillas=2)
    hb.Ket(space, psi.ravel()).check_truncation()
    probs = np.abs(psi) ** 2
    p1 = float(probs[:, :, 0, :].sum())
    p2 = float(probs[:, :, :, 0].sum())
    return p1, p2


def ancilla_probabilities_exact(zeta: float, g: float, beta: complex) -> tuple:
    """Braided closed form, exact at any zeta:

    P_up^(1) = 1/2 [cos^2(2 g Re(beta) e^{-z}) + cos^2(2 g Re(beta) e^{+z})]
    and the Im(beta) analogue for ancilla 2.
    """
    p1 = 0.5 * (np.cos(2 * g * beta.real * np.exp(-zeta)) ** 2
                + np.cos(2 * g * beta.real * np.exp(zeta)) ** 2)
    p2 = 0.5 * (np.cos(2 * g * beta.imag * np.exp(zeta)) ** 2
                + np.cos(2 * g * beta.imag * np.exp(-zeta)) ** 2)
    return float(p1), float(p2)


def ancilla_probabilities_asymptotic(zeta: float, g: float, beta: complex) -> tuple:
    """Large-squeezing limit P_up^(i) = 1/2 [1 + cos^2(phi_i)]."""
    phi1 = 2.0 * g * np.exp(zeta) * beta.real
    phi2 = -2.0 * g * np.exp(zeta) * beta.imag
    return 0.5 * (1 + np.cos(phi1) ** 2), 0.5 * (1 + np.cos(phi2) ** 2)


def ancilla_cfim(zeta: float, g: float, betas=None,
                 method: str = "simulate", n_max: int | None = None) -> CfiResult:
    """CFIM of the two independent binary ancilla readouts, beta -> 0.

    Adds the Fisher matrices of the two marginals and Richardson-extrapolates
    the evaluation point to zero along beta = b (1 + i)/sqrt(2).  Default
    evaluation magnitudes scale with the protocol gain 2 g e^z so the binary
    outcomes stay safely away from saturation.
    """
    if betas is None:
        scale = 1.0 / (2.0 * g * np.exp(zeta))
        betas = (0.2 * scale, 0.1 * scale, 0.05 * scale)
    if method == "simulate":
        prob_fn = lambda b: ancilla_multiparam_distribution(zeta, g, b, n_max=n_max)
    elif method == "exact":
        prob_fn = lambda b: ancilla_probabilities_exact(zeta, g, b)
    else:
        raise ValueError(f"unknown method {method!r}")

    def cfim_at(b):
        point = b * (1 + 1j) / np.sqrt(2)
        h = 1e-2 * b
        f = np.zeros((2, 2))
        grads = []
        p0 = prob_fn(point)
        for i, dv in enumerate((h, 1j * h)):
            pp = prob_fn(point + dv)
            pm = prob_fn(point - dv)
            grads.append([(pp[k] - pm[k]) / (2 * h) for k in range(2)])
        for k in range(2):
            pk = p0[k]
            if pk * (1 - pk) < 1e-14:
                raise IllConditioned("binary outcome saturated; move evaluation point")
            w = 1.0 / pk + 1.0 / (1.0 - pk)
            for i in range(2):
                for j in range(2):
                    f[i, j] += w * grads[i][k] * grads[j][k]
        return f

    mats = [cfim_at(b) for b in betas]
    vals = mats[0].copy()
    stack = np.array(mats)
    for i in range(2):
        for j in range(2):
            vals[i, j] = richardson_limit(list(stack[:, i, j]))
    return CfiResult("multi", vals, min(betas), 1e-3 * min(betas))


def reference_state_occupation_mp(zeta: float, g: float, n_max: int | None = None) -> float:
    """<n> of the prepared (pre-signal) reference state of the joint readout."""
    if n_max is None:
        n_max = ancilla_recommended_n_max(zeta)
    psi = _ancilla_sequence_state(zeta, g, None, n_max)
    per_level = (np.abs(psi) ** 2).sum(axis=(0, 2, 3))
    return float(per_level @ np.arange(n_max))


# ---------------------------------------------------------------------------
# Wigner function
# ---------------------------------------------------------------------------

def hermite_functions(n_levels: int, x: np.ndarray) -> np.ndarray:
    """Oscillator eigenfunctions phi_n(x) in x = a^dag + a units, rows n."""
    out = np.zeros((n_levels, x.size))
    out[0] = (2.0 * np.pi) ** (-0.25) * np.exp(-x**2 / 4.0)
    if n_levels > 1:
        out[1] = x * out[0]
    for n in range(1, n_levels - 1):
        out[n + 1] = (x * out[n] - np.sqrt(n) * out[n - 1]) / np.sqrt(n + 1)
    return out


def wigner(amplitudes: np.ndarray, xs: np.ndarray, ps: np.ndarray,
           oversample: int = 4) -> np.ndarray:
    """W(x, p) of a pure mode state, normalized so the grid integral is 1.

    Axes are the x = a^dag + a and p = i(a^dag - a) expectation values, so
    the vacuum is the isotropic Gaussian exp(-(x^2+p^2)/2)/(2 pi).  Rows of
    the result index x, columns index p.
    """
    amplitudes = np.asarray(amplitudes, dtype=complex).ravel()
    n_levels = amplitudes.size
    support = 2.0 * np.sqrt(2.0 * n_levels + 1.0)
    x_max = float(np.max(np.abs(xs)))
    p_max = float(max(np.max(np.abs(ps)), np.sqrt(2.0 * n_levels + 1.0)))
    half_y = 2.0 * (x_max + support) / 2.0 + support
    dy = np.pi / (oversample * max(p_max / 2.0, 1.0)) / 2.0
    ys = np.arange(-half_y, half_y + dy, dy)
    w = np.zeros((xs.size, ps.size))
    phase = np.exp(-0.5j * np.outer(ps, ys))
    for i, x in enumerate(xs):
        up = hermite_functions(n_levels, x + ys / 2.0)
        dn = hermite_functions(n_levels, x - ys / 2.0)
        f = (amplitudes @ up) * np.conj(amplitudes @ dn)
        w[i] = (phase @ f).real * dy / (4.0 * np.pi)
    return w


def bosonic_analogue_state(w: DickeWeights, zeta: float, n_max: int) -> np.ndarray:
    """Normalized sum_m c_m S(zeta m)|0> as a pure mode state."""
    mode = hb.ModeSpace(n_max)
    vec = np.zeros(n_max, dtype=complex)
    for c, m in zip(w.weights, w.m_values()):
        if c != 0:
            vec += c * hb.squeezed_vacuum(mode, zeta * m)
    return vec / np.linalg.norm(vec)


def diagonal_sign_changes(w: np.ndarray) -> int:
    """Count sign flips of W along the p = x diagonal (square grid)."""
    diag = np.diagonal(w)
    signs = np.sign(diag[np.abs(diag) > 1e-12 * np.max(np.abs(w))])
    return int(np.sum(signs[1:] != signs[:-1]))

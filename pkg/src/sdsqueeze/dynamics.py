"""First-sideband drive, stroboscopic schedule, and Magnus-term verification.

The interaction Hamiltonian of the four-tone drive is

    H(t) = g a [Jx e^{-i t Delta} + Jy e^{+i t Delta} e^{-i phi}] + h.c.

with piecewise-constant (Delta, phi, sign of g) over four segments per
repetition: (+Delta, phi1, +), (-Delta, phi2, +), (+Delta, phi1, -),
(-Delta, phi2, -), each lasting tau = 2 pi ell / |Delta| (an integer
number of phase-space loops).  Over one loop the first Magnus term
vanishes and the second produces spin-dependent squeezing plus a two-axis
twisting error that the phi2 = phi1 - pi choice cancels; the sign flip of
g echoes away odd orders.  All angular frequencies are rad/s.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp

from . import hilbert as hb
from .errors import ToleranceNotMet


@dataclass(frozen=True)
class DriveParams:
    """Drive configuration; g and Delta in rad/s."""

    g: float
    delta: float
    phi1: float = np.pi
    phi2: float = 0.0
    ell: int = 1
    reps: int = 1

    def __post_init__(self):
        if self.ell < 1 or self.reps < 1:
            raise ValueError("ell and reps must be positive integers")
        if self.delta == 0:
            raise ValueError("delta must be nonzero")

    @property
    def tau(self) -> float:
        return 2.0 * np.pi * self.ell / abs(self.delta)

    @property
    def total_duration(self) -> float:
        return 8.0 * np.pi * self.ell * self.reps / abs(self.delta)


@dataclass(frozen=True)
class Segment:
    delta: float
    phi: float          # phase of the second tone pair (Jy coupling)
    sign: float         # sign of the coupling g
    duration: float
    g: float
    ell: int
    chi: float = 0.0    # phase of the first tone pair (Jx coupling)


@dataclass
class DriveSchedule:
    segments: list

    @property
    def total_duration(self) -> float:
        return sum(s.duration for s in self.segments)

    @classmethod
    def stroboscopic(cls, params: DriveParams) -> "DriveSchedule":
        """Four segments per repetition with the echo sign pattern."""
        tau = params.tau
        base = [
            (params.delta, params.phi1, +1.0),
            (-params.delta, params.phi2, +1.0),
            (params.delta, params.phi1, -1.0),
            (-params.delta, params.phi2, -1.0),
        ]
        segs = [Segment(d, p, s, tau, params.g, params.ell)
                for _ in range(params.reps) for (d, p, s) in base]
        return cls(segs)

    @classmethod
    def stroboscopic_phase_flip(cls, params: DriveParams) -> "DriveSchedule":
        """Sequence with g -> -g realized by advancing both tone-pair phases by pi."""
        tau = params.tau
        base = [
            (params.delta, params.phi1, 0.0),
            (-params.delta, params.phi2, 0.0),
            (params.delta, params.phi1, np.pi),
            (-params.delta, params.phi2, np.pi),
        ]
        segs = [Segment(d, p + shift, +1.0, tau, params.g, params.ell, chi=shift)
                for _ in range(params.reps) for (d, p, shift) in base]
        return cls(segs)

    def mirrored(self) -> "DriveSchedule":
        """The g -> -g image of this schedule."""
        return DriveSchedule([Segment(s.delta, s.phi, -s.sign, s.duration, s.g, s.ell, s.chi)
                              for s in self.segments])


@dataclass
class PropagationConfig:
    rtol: float = 1e-9
    atol: float = 1e-11
    method: str = "DOP853"
    norm_tolerance: float = 1e-9
    max_step: float = np.inf


@dataclass
class PropagationReport:
    norm_error: float = 0.0
    steps: int = 0
    error_estimate: float | None = None


class _Couplings:
    """Cached kron-lifted coupling operators for one hybrid space."""

    def __init__(self, space: hb.HybridSpace):
        if space.ancillas:
            raise ValueError("drive acts on spin x mode spaces without ancillas")
        a = hb.destroy(space.mode)
        jx = hb.collective_spin(space.spin, "x")
        jy = hb.collective_spin(space.spin, "y")
        self.ax = np.kron(jx, a)
        self.ay = np.kron(jy, a)
        self.axd = self.ax.conj().T
        self.ayd = self.ay.conj().T

    def hamiltonian(self, t, seg: Segment):
        c1 = seg.sign * seg.g * np.exp(-1j * t * seg.delta) * np.exp(-1j * seg.chi)
        c2 = seg.sign * seg.g * np.exp(1j * t * seg.delta) * np.exp(-1j * seg.phi)
        return (c1 * self.ax + np.conj(c1) * self.axd
                + c2 * self.ay + np.conj(c2) * self.ayd)

    def apply(self, t, seg: Segment, psi):
        c1 = seg.sign * seg.g * np.exp(-1j * t * seg.delta) * np.exp(-1j * seg.chi)
        c2 = seg.sign * seg.g * np.exp(1j * t * seg.delta) * np.exp(-1j * seg.phi)
        return (c1 * (self.ax @ psi) + np.conj(c1) * (self.axd @ psi)
                + c2 * (self.ay @ psi) + np.conj(c2) * (self.ayd @ psi))


_coupling_cache: dict = {}


def _couplings(space: hb.HybridSpace) -> _Couplings:
    key = (space.spin.n_spins, space.mode.n_max)
    if key not in _coupling_cache:
        _coupling_cache[key] = _Couplings(space)
    return _coupling_cache[key]


def hamiltonian_at(t: float, segment: Segment, space: hb.HybridSpace) -> np.ndarray:
    """Drive Hamiltonian matrix at global time t within the given segment."""
    return _couplings(space).hamiltonian(t, segment)


def propagate(ket: hb.Ket, schedule: DriveSchedule, config: PropagationConfig | None = None,
              report: PropagationReport | None = None) -> hb.Ket:
    """Integrate the Schroedinger equation over the schedule.

    Segment boundaries are hard breakpoints of the integration; norm drift
    beyond config.norm_tolerance raises ToleranceNotMet.
    """
    cfg = config or PropagationConfig()
    coup = _couplings(ket.space)
    psi = ket.amplitudes.astype(complex)
    t0 = 0.0
    steps = 0
    for seg in schedule.segments:
        def rhs(t, y, seg=seg):
            return -1j * coup.apply(t, seg, y)
        sol = solve_ivp(rhs, (t0, t0 + seg.duration), psi, method=cfg.method,
                        rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step)
        if not sol.success:
            raise ToleranceNotMet(f"integrator failed in segment at t={t0}: {sol.message}")
        psi = sol.y[:, -1]
        steps += sol.t.size
        t0 += seg.duration
    norm_err = abs(np.linalg.norm(psi) - 1.0)
    if norm_err > cfg.norm_tolerance:
        raise ToleranceNotMet(f"norm drifted by {norm_err:.2e} (> {cfg.norm_tolerance:.1e})")
    if report is not None:
        report.norm_error = norm_err
        report.steps = steps
    return hb.Ket(ket.space, psi)


def propagation_error_estimate(ket: hb.Ket, schedule: DriveSchedule,
                               config: PropagationConfig | None = None) -> float:
    """Infidelity between runs at rtol and rtol/10; bound on integration error."""
    cfg = config or PropagationConfig()
    tight = PropagationConfig(rtol=cfg.rtol / 10.0, atol=cfg.atol / 10.0,
                              method=cfg.method, norm_tolerance=cfg.norm_tolerance)
    loose_out = propagate(ket, schedule, cfg)
    tight_out = propagate(ket, schedule, tight)
    return 1.0 - hb.fidelity(loose_out.normalized(), tight_out.normalized())


# ---------------------------------------------------------------------------
# Magnus terms
# ---------------------------------------------------------------------------

def magnus_second_order(segment: Segment, space: hb.HybridSpace) -> np.ndarray:
    """Closed-form second Magnus term Theta2 of one complete-loop segment.

    sgn(Delta) (4 pi g^2 ell / Delta^2) [(e^{-i phi} a^2 - h.c.) Jz
                                         - i (Jx^2 - Jy^2)]
    The result is anti-Hermitian; the propagator factor is exp(-Theta2/2).
    """
    a = hb.destroy(space.mode)
    ad = a.conj().T
    jz = hb.collective_spin(space.spin, "z")
    jx = hb.collective_spin(space.spin, "x")
    jy = hb.collective_spin(space.spin, "y")
    pref = np.sign(segment.delta) * 4.0 * np.pi * segment.g**2 * segment.ell / segment.delta**2
    angle = segment.phi + segment.chi
    squeeze_part = np.kron(jz, np.exp(-1j * angle) * (a @ a)
                           - np.exp(1j * angle) * (ad @ ad))
    twist_part = -1j * np.kron(jx @ jx - jy @ jy, np.eye(space.mode.n_max))
    return pref * (squeeze_part + twist_part)


def magnus_second_order_quadrature(segment: Segment, space: hb.HybridSpace,
                                   t_start: float = 0.0, npts: int = 80) -> np.ndarray:
    """Nested Gauss-Legendre evaluation of the double commutator integral."""
    coup = _couplings(space)
    x, wts = np.polynomial.legendre.leggauss(npts)
    dim = space.dim
    acc = np.zeros((dim, dim), dtype=complex)
    t1s = t_start + 0.5 * segment.duration * (x + 1.0)
    w1 = 0.5 * segment.duration * wts
    for t1, wa in zip(t1s, w1):
        h1 = coup.hamiltonian(t1, segment)
        span = t1 - t_start
        t2s = t_start + 0.5 * span * (x + 1.0)
        w2 = 0.5 * span * wts
        inner = np.zeros_like(acc)
        for t2, wb in zip(t2s, w2):
            h2 = coup.hamiltonian(t2, segment)
            inner += wb * (h1 @ h2 - h2 @ h1)
        acc += wa * inner
    return acc


def magnus_first_order_quadrature(segment: Segment, space: hb.HybridSpace,
                                  t_start: float = 0.0, npts: int = 200) -> np.ndarray:
    """int H dt over the segment; vanishes over complete phase-space loops."""
    coup = _couplings(space)
    x, wts = np.polynomial.legendre.leggauss(npts)
    ts = t_start + 0.5 * segment.duration * (x + 1.0)
    acc = np.zeros((space.dim, space.dim), dtype=complex)
    for t, w in zip(ts, 0.5 * segment.duration * wts):
        acc += w * coup.hamiltonian(t, segment)
    return acc


def magnus_third_order_quadrature(segment: Segment, space: hb.HybridSpace,
                                  t_start: float = 0.0, npts: int = 40) -> np.ndarray:
    """Triple nested-commutator integral

    int_{t0}^{t} dt1 int_{t0}^{t1} dt2 int_{t0}^{t2} dt3
        ([H1,[H2,H3]] + [H3,[H2,H1]])
    evaluated by nested Gauss-Legendre; odd in the coupling sign.
    """
    coup = _couplings(space)
    x, wts = np.polynomial.legendre.leggauss(npts)
    dim = space.dim
    acc = np.zeros((dim, dim), dtype=complex)
    t1s = t_start + 0.5 * segment.duration * (x + 1.0)
    w1 = 0.5 * segment.duration * wts
    for t1, wa in zip(t1s, w1):
        h1 = coup.hamiltonian(t1, segment)
        span2 = t1 - t_start
        for t2, wb in zip(t_start + 0.5 * span2 * (x + 1.0), 0.5 * span2 * wts):
            h2 = coup.hamiltonian(t2, segment)
            span3 = t2 - t_start
            inner = np.zeros_like(acc)
            for t3, wc in zip(t_start + 0.5 * span3 * (x + 1.0), 0.5 * span3 * wts):
                h3 = coup.hamiltonian(t3, segment)
                inner += wc * ((h2 @ h3 - h3 @ h2))
            acc += wa * wb * ((h1 @ inner - inner @ h1)
                              + _bracket_reversed(h1, h2, coup, segment, t_start, t2, x, wts, span3))
    return acc


def _bracket_reversed(h1, h2, coup, segment, t_start, t2, x, wts, span3):
    # [H3, [H2, H1]] contribution accumulated over the same t3 nodes
    comm21 = h2 @ h1 - h1 @ h2
    out = np.zeros_like(h1)
    for t3, wc in zip(t_start + 0.5 * span3 * (x + 1.0), 0.5 * span3 * wts):
        h3 = coup.hamiltonian(t3, segment)
        out += wc * (h3 @ comm21 - comm21 @ h3)
    return out


def tat_projection(u: np.ndarray, space: hb.HybridSpace) -> float:
    """|coefficient| of the log-propagator along the (Jx^2 - Jy^2) direction.

    Valid while ||log U|| < pi; keep g/Delta small when using this.
    """
    from scipy.linalg import logm

    jx = hb.collective_spin(space.spin, "x")
    jy = hb.collective_spin(space.spin, "y")
    direction = -1j * np.kron(jx @ jx - jy @ jy, np.eye(space.mode.n_max))
    log_u = logm(u)
    return float(abs(np.vdot(direction, log_u)) / np.vdot(direction, direction).real)


def propagator_matrix(schedule: DriveSchedule, space: hb.HybridSpace,
                      config: PropagationConfig | None = None) -> np.ndarray:
    """Full propagator by integrating the matrix Schroedinger equation."""
    cfg = config or PropagationConfig()
    coup = _couplings(space)
    dim = space.dim
    u = np.eye(dim, dtype=complex).ravel()
    t0 = 0.0
    for seg in schedule.segments:
        def rhs(t, y, seg=seg):
            m = y.reshape(dim, dim)
            return (-1j * coup.hamiltonian(t, seg) @ m).ravel()
        sol = solve_ivp(rhs, (t0, t0 + seg.duration), u, method=cfg.method,
                        rtol=cfg.rtol, atol=cfg.atol)
        if not sol.success:
            raise ToleranceNotMet(sol.message)
        u = sol.y[:, -1]
        t0 += seg.duration
    return u.reshape(dim, dim)


# ---------------------------------------------------------------------------
# schedule files and trajectories
# ---------------------------------------------------------------------------

def drive_setup_to_json(params: DriveParams, n_spins: int, n_max: int) -> dict:
    """Schedule-file payload; frequencies in Hz (cycles), not rad/s."""
    return {
        "g_Hz": params.g / (2.0 * np.pi),
        "Delta_Hz": params.delta / (2.0 * np.pi),
        "phi1": params.phi1,
        "phi2": params.phi2,
        "ell": params.ell,
        "P": params.reps,
        "N": n_spins,
        "n_max": n_max,
    }


def drive_setup_from_json(data: dict) -> tuple:
    """(DriveParams, n_spins, n_max) from a schedule-file payload."""
    params = DriveParams(
        g=2.0 * np.pi * data["g_Hz"],
        delta=2.0 * np.pi * data["Delta_Hz"],
        phi1=data.get("phi1", np.pi),
        phi2=data.get("phi2", data.get("phi1", np.pi) - np.pi),
        ell=int(data.get("ell", 1)),
        reps=int(data.get("P", 1)),
    )
    return params, int(data["N"]), int(data["n_max"])


def simulate_trajectory(ket: hb.Ket, schedule: DriveSchedule, target: hb.Ket,
                        config: PropagationConfig | None = None,
                        samples_per_segment: int = 4) -> list:
    """Sampled rows (t, fidelity-to-target, mode occupation, norm error)."""
    cfg = config or PropagationConfig()
    coup = _couplings(ket.space)
    psi = ket.amplitudes.astype(complex)
    rows = [[0.0, hb.fidelity(ket, target), hb.mode_occupation(ket), 0.0]]
    t0 = 0.0
    for seg in schedule.segments:
        def rhs(t, y, seg=seg):
            return -1j * coup.apply(t, seg, y)
        t_eval = t0 + seg.duration * np.arange(1, samples_per_segment + 1) / samples_per_segment
        sol = solve_ivp(rhs, (t0, t0 + seg.duration), psi, method=cfg.method,
                        rtol=cfg.rtol, atol=cfg.atol, t_eval=t_eval)
        if not sol.success:
            raise ToleranceNotMet(sol.message)
        for k, t in enumerate(sol.t):
            state = hb.Ket(ket.space, sol.y[:, k])
            rows.append([float(t), hb.fidelity(state.normalized(), target),
                         hb.mode_occupation(state), abs(state.norm - 1.0)])
        psi = sol.y[:, -1]
        t0 += seg.duration
    return rows


TRAJECTORY_COLUMNS = ["t_s", "fidelity", "n_avg", "norm_error"]


# ---------------------------------------------------------------------------
# effective squeezing, durations, reference rates
# ---------------------------------------------------------------------------

def effective_zeta(params: DriveParams) -> complex:
    """Squeezing parameter accumulated by the full schedule:

    zeta = -8 pi g^2 ell P (e^{i phi1} - e^{i phi2}) / Delta^2.
    """
    return (-8.0 * np.pi * params.g**2 * params.ell * params.reps
            * (np.exp(1j * params.phi1) - np.exp(1j * params.phi2)) / params.delta**2)


def detuning_for_zeta(g: float, ell: int, reps: int, zeta_target: float) -> float:
    """Detuning that yields |zeta_target| with antipodal phases phi2 = phi1 - pi."""
    if zeta_target <= 0:
        raise ValueError("zeta_target must be positive")
    return float(np.sqrt(16.0 * np.pi * g**2 * ell * reps / zeta_target))


def speed_limit(z: float, g: float, n_spins: int) -> float:
    """Fastest schedule duration reaching bosonic squeezing z = |zeta| N / 2.

    This is the single-repetition, single-loop duration with the detuning
    fixed by the accumulated-squeezing relation: t = 2 sqrt(pi |zeta|) / g
    = sqrt(8 pi z / N) / g.  With g proportional to 1/sqrt(N) at fixed
    sideband drive strength it is independent of N.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    zeta = 2.0 * z / n_spins
    return 8.0 * np.pi / detuning_for_zeta(g, 1, 1, zeta)


def second_sideband_duration(z: float, eta: float, omega: float) -> float:
    """Duration to reach squeezing z when driving the second-order sidebands:
    t = 4 z / (eta^2 Omega)."""
    if z <= 0 or eta <= 0 or omega <= 0:
        raise ValueError("z, eta and omega must be positive")
    return 4.0 * z / (eta**2 * omega)


def squeezing_db(z: float) -> float:
    """Quadrature noise reduction in dB: -10 log10(e^{-2z})."""
    if z < 0:
        raise ValueError("z must be nonnegative")
    return -10.0 * np.log10(np.exp(-2.0 * z))


# ---------------------------------------------------------------------------
# scaling of higher-order spin matrix elements
# ---------------------------------------------------------------------------

HIGHER_ORDER_TERMS = (
    # (label, order in g, spin operator factors, Fock ladder word)
    ("a3_Jx", 3, ("x",), "aaa"),
    ("a_JxJz", 3, ("x", "z"), "a"),
    ("a4_Jz", 4, ("z",), "aaaa"),
    ("a2_Jx2", 4, ("x", "x"), "aa"),
    ("a2_Jz", 4, ("z",), "aa"),
    ("a2_JzJx", 4, ("z", "x"), "aa"),
    ("Jx2", 4, ("x", "x"), ""),
    ("JzJxJy", 4, ("z", "x", "y"), ""),
)


def magnus_transition_amplitudes(n_values, g_of_n=None) -> dict:
    """Largest transition element out of |N/2> for each higher-order term.

    Returns {label: array over n_values} of g^order * max_k |<N/2-k|Op|N/2>|
    with g_of_n defaulting to 1/sqrt(N) (fixed sideband drive strength).
    The cubic/quartic-in-a entries decrease as 1/N under this scaling.
    """
    if g_of_n is None:
        g_of_n = lambda n: 1.0 / np.sqrt(n)
    out = {label: [] for (label, _, _, _) in HIGHER_ORDER_TERMS}
    for n in n_values:
        spin = hb.SpinSpace(n)
        ops = {ax: hb.collective_spin(spin, ax) for ax in ("x", "y", "z")}
        for label, order, factors, _ in HIGHER_ORDER_TERMS:
            op = np.eye(spin.dim, dtype=complex)
            for ax in factors:
                op = op @ ops[ax]
            col = np.abs(op[:, -1])      # transitions out of m = +N/2
            col[-1] = 0.0                # drop the diagonal element
            out[label].append(g_of_n(n) ** order * float(col.max()))
    return {k: np.array(v) for k, v in out.items()}

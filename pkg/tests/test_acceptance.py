"""Acceptance gate: one test per criterion, each printing a pass/fail line.

Run with `pytest tests/test_acceptance.py -v -s`.  Criteria 1-6 and 8-9 are
exact-formula, oracle-equivalence and small-scale dynamical checks; 7 is the
desk-scale minimum-time study (the slow one, tens of minutes at worst).
"""

import numpy as np
import pytest

from sdsqueeze import dynamics as dyn
from sdsqueeze import hilbert as hb
from sdsqueeze import metrology as met
from sdsqueeze import optimize as opt
from sdsqueeze import protocols as proto

G1 = 2 * np.pi * 5e3  # rad/s


def report(num, ok, detail=""):
    print(f"\n[criterion {num}] {'PASS' if ok else 'FAIL'} {detail}")


def random_symmetric_weights(n_spins, rng):
    half = (n_spins + 1) // 2
    mags = rng.uniform(0.1, 1.0, size=half)
    full = np.zeros(n_spins + 1)
    full[:half] = mags
    full[n_spins + 1 - half:] = mags[::-1]
    if (n_spins + 1) % 2:
        full[half] = rng.uniform(0.1, 1.0)
    w = full * np.exp(1j * rng.uniform(0, 2 * np.pi, size=n_spins + 1))
    return met.DickeWeights(n_spins, w / np.linalg.norm(w))


def test_criterion_1_qfi_identity():
    """QFI equals 8<n> + 4 for 200 random symmetric weight vectors."""
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for _ in range(200):
        n_spins = int(rng.integers(1, 13))
        zeta = rng.uniform(0.0, 2.0)
        w = random_symmetric_weights(n_spins, rng)
        q = met.qfi_abs_beta(w, zeta)
        ident = 8.0 * met.mode_occupation_sds(w, zeta) + 4.0
        worst = max(worst, abs(q - ident) / ident)
    ok = worst < 1e-10
    report(1, ok, f"max relative deviation {worst:.2e}")
    assert ok


def test_criterion_2_qfim_oracle_equivalence():
    """Finite-difference QFIM of the simulated family matches the closed form."""
    worst = 0.0
    for n_spins in (1, 2, 3):
        for zeta in (0.3, 0.8):
            space = hb.hybrid(n_spins, 128)
            w = met.spin_states("coherent_x", n_spins)
            ref = hb.spin_dependent_squeeze(space, zeta) @ hb.vacuum_ket(space, w.weights)
            shaped = ref.reshaped()

            def family(theta):
                d = hb.displacement(space.mode, theta[0] + 1j * theta[1])
                return (shaped @ d.T).ravel()

            q = met.qfim_numeric(family, (0.02, -0.015))
            expected = met.qfim_multiparam_sds(w, zeta)
            worst = max(worst, np.max(np.abs(q - expected)) / np.max(expected))
    ok = worst < 1e-6
    report(2, ok, f"max relative deviation {worst:.2e}")
    assert ok


def test_criterion_3_single_spin_protocol():
    """Simulation matches the closed form at 1e-10; CFI limit is 4 sinh^2(z/2)."""
    worst_p = 0.0
    for zeta in np.linspace(0.0, 2.0, 5):
        for b in np.linspace(0.05, 0.3, 5):
            for phase in np.linspace(0, 2 * np.pi, 4, endpoint=False):
                beta = b * np.exp(1j * phase)
                sim = proto.simulate_single_spin(zeta, beta)
                closed = proto.single_spin_probability(zeta, beta)
                worst_p = max(worst_p, np.max(np.abs(sim.probabilities
                                                     - closed.probabilities)))
    worst_f = 0.0
    for zeta in (0.5, 1.0, 2.0):
        res = proto.cfi_abs_beta(lambda b, z=zeta: proto.single_spin_probability(z, b))
        target = 4.0 * np.sinh(zeta / 2.0) ** 2
        worst_f = max(worst_f, abs(res.value - target) / target)
    ok = worst_p < 1e-10 and worst_f < 1e-4
    report(3, ok, f"max probability deviation {worst_p:.2e}, max CFI deviation {worst_f:.2e}")
    assert ok


def test_criterion_4_coherent_closed_form_cfi():
    """Numerical CFI reproduces the N = 1,3,5,7 closed forms and the QFI ratio."""
    worst = 0.0
    for n_spins in (1, 3, 5, 7):
        for zeta in (0.5, 1.0):
            res = proto.cfi_abs_beta(
                lambda b, n=n_spins, z=zeta: proto.coherent_protocol_distribution(n, z, b))
            closed = proto.cfi_closed_form_coherent(n_spins, zeta)
            worst = max(worst, abs(res.value - closed) / closed)
    worst_ratio = 0.0
    for n_spins in (1, 3, 5):
        w = met.spin_states("coherent_x", n_spins)
        ratio = met.qfi_abs_beta(w, 10.0) / proto.cfi_closed_form_coherent(n_spins, 10.0)
        target = 2**n_spins / (2**n_spins - 1)
        worst_ratio = max(worst_ratio, abs(ratio - target))
    ok = worst < 1e-5 and worst_ratio < 1e-3
    report(4, ok, f"max CFI deviation {worst:.2e}, max ratio deviation {worst_ratio:.2e}")
    assert ok


def test_criterion_5_ancilla_protocol():
    """Simulated CFIM hits 8 g^2 e^{2z} within 5 percent; agreement improves with z."""
    zeta, g = 2.5, 0.05
    res = proto.ancilla_cfim(zeta, g, method="simulate")
    target = 8.0 * g**2 * np.exp(2.0 * zeta)
    diag_dev = max(abs(res.value[0, 0] - target), abs(res.value[1, 1] - target)) / target
    off = max(abs(res.value[0, 1]), abs(res.value[1, 0]))
    off_ok = off < 1e-6 * min(res.value[0, 0], res.value[1, 1])
    devs = []
    for z in (1.0, 1.5, 2.0, 2.5):
        cfim = proto.ancilla_cfim(z, g, method="simulate").value
        ccrb = float(np.trace(np.linalg.inv(cfim)))
        analytic = 1.0 / (4.0 * g**2 * np.exp(2.0 * z))
        devs.append(abs(ccrb - analytic) / analytic)
    monotone = all(b < a for a, b in zip(devs, devs[1:]))
    ok = diag_dev < 0.05 and off_ok and monotone
    report(5, ok, f"diag deviation {diag_dev:.3%}, off/diag {off / target:.2e}, "
                  f"ccrb deviations {['%.2e' % d for d in devs]}")
    assert ok


def test_criterion_6_magnus_verification():
    """Second-order exponential, twist suppression and the sign-flip echo."""
    failures = []
    for n_spins in (1, 2, 3):
        space = hb.hybrid(n_spins, 24)
        params = dyn.DriveParams(g=0.01, delta=1.0)
        seg = dyn.DriveSchedule.stroboscopic(params).segments[0]
        w = met.spin_states("coherent_x", n_spins)
        start = hb.vacuum_ket(space, w.weights)
        exact = dyn.propagate(start, dyn.DriveSchedule([seg]),
                              dyn.PropagationConfig(rtol=1e-11, atol=1e-13))
        approx = hb.unitary_from_generator(-0.5 * dyn.magnus_second_order(seg, space))
        fid = abs(np.vdot(exact.amplitudes, approx @ start.amplitudes)) ** 2
        if fid < 1 - 1e-4:
            failures.append(f"N={n_spins} segment fidelity {fid:.6f}")

    space = hb.hybrid(2, 12)
    params = dyn.DriveParams(g=0.01, delta=1.0)
    segs = dyn.DriveSchedule.stroboscopic(params).segments
    cfg = dyn.PropagationConfig(rtol=1e-11, atol=1e-13)
    tat1 = dyn.tat_projection(dyn.propagator_matrix(dyn.DriveSchedule(segs[:1]), space, cfg), space)
    tat2 = dyn.tat_projection(dyn.propagator_matrix(dyn.DriveSchedule(segs[:2]), space, cfg), space)
    if tat1 / tat2 < 10:
        failures.append(f"twist suppression {tat1 / tat2:.1f}x")

    echo_params = dyn.DriveParams(g=1e-3, delta=1.0)
    sched = dyn.DriveSchedule.stroboscopic(echo_params)
    start = hb.vacuum_ket(space, met.spin_states("ghz", 2).weights)
    fwd = dyn.propagate(start, sched, cfg)
    mir = dyn.propagate(start, sched.mirrored(), cfg)
    echo = float(np.linalg.norm(fwd.amplitudes - mir.amplitudes))
    if echo > 1e-6:
        failures.append(f"echo mirror distance {echo:.2e}")

    report(6, not failures,
           f"twist suppression {tat1 / tat2:.0f}x, echo distance {echo:.1e}"
           + ("; " + "; ".join(failures) if failures else ""))
    assert not failures, failures


@pytest.mark.slow
def test_criterion_7_min_time_study():
    """Desk-scale minimum-time search against the schedule floor and 2SB."""
    failures = []
    for z in (0.1, 0.3, 0.5):
        res = opt.min_time_search(opt.SearchSpec(n_spins=1, z=z, g=G1))
        floor = dyn.speed_limit(z, G1, 1)
        if res.reps != 1:
            failures.append(f"z={z}: P={res.reps} != 1")
        if not res.fidelity > 0.99:
            failures.append(f"z={z}: F={res.fidelity:.4f}")
        if abs(res.t_min - floor) / floor > 0.10:
            failures.append(f"z={z}: t_min off floor by {abs(res.t_min - floor) / floor:.1%}")

    eta = 0.05
    omega = G1 / eta
    # fixed coupling g for every N; the schedule floor then shrinks as 1/sqrt(N)
    t_mins = {}
    for n_spins in (1, 2, 4):
        res = opt.min_time_search(opt.SearchSpec(n_spins=n_spins, z=1.0, g=G1))
        t_mins[n_spins] = res.t_min
    t_2sb = dyn.second_sideband_duration(1.0, eta, omega)
    speedup = t_2sb / t_mins[1]
    if speedup < 5.0:
        failures.append(f"2SB speedup {speedup:.2f} < 5")

    if abs(dyn.squeezing_db(1.0) - 8.69) > 0.01:
        failures.append(f"squeezing_db(1) = {dyn.squeezing_db(1.0):.4f}")

    if not (t_mins[1] > t_mins[2] > t_mins[4]):
        failures.append(f"t_min not strictly decreasing over N=1,2,4: {t_mins}")

    report(7, not failures,
           f"2SB speedup {speedup:.1f}x, t_min {t_mins}"
           + ("; " + "; ".join(failures) if failures else ""))
    assert not failures, failures


def test_criterion_8_bounds_dataset_ratio():
    """CCRB/QCRB for one spin approaches 2 from above; CCRB beats the SQL."""
    import json
    import tempfile
    from pathlib import Path

    from sdsqueeze import cli, tableio

    with tempfile.TemporaryDirectory() as tmp:
        cfg = Path(tmp) / "cfg.json"
        cfg.write_text(json.dumps({
            "N_list": [1, 2, 3, 5, 7],
            "navg_grid": [1.5, 3.0, 5.0, 7.0, 10.0],
            "g_list": [],
            "zeta_grid_multi": [],
        }))
        assert cli.main(["bounds", "--config", str(cfg), "--out", tmp,
                         "--timestamp", "T0"]) == 0
        table = tableio.read_table(Path(tmp) / "bounds.csv")

    failures = []
    ratios = {}
    for row in table.rows:
        d = dict(zip(table.columns, row))
        if d["setting"] != "abs":
            continue
        if d["n_avg"] >= 1.5 and not d["ccrb"] < d["sql"]:
            failures.append(f"N={d['N']} n={d['n_avg']}: CCRB {d['ccrb']:.4f} >= SQL")
        if d["N"] == 1:
            ratios[d["n_avg"]] = d["ccrb"] / d["qcrb"]
    window = [ratios[k] for k in sorted(ratios) if 3.0 <= k <= 10.0]
    if not all(b < a for a, b in zip(window, window[1:])):
        failures.append("ratio not decreasing toward 2")
    if not all(r > 2.0 for r in window):
        failures.append("ratio fell below 2")
    final = window[-1]
    # the endpoint sits exactly at the 5% boundary (ratio = 2 + 1/n at n = 10)
    if abs(final - 2.0) > 0.05 * 2.0 + 1e-9:
        failures.append(f"ratio at window end {final:.4f} not within 5% of 2")
    report(8, not failures, f"ratio over window {['%.3f' % r for r in window]}"
           + ("; " + "; ".join(failures) if failures else ""))
    assert not failures, failures


def test_criterion_9_incompatibility():
    """R = 1/(2<n> + 1) from the closed form and the numeric curvature matrix."""
    w = met.spin_states("ghz", 1)
    worst_closed = 0.0
    for zeta in np.linspace(0.1, 2.0, 8):
        n_avg = met.mode_occupation_sds(w, zeta)
        worst_closed = max(worst_closed,
                           abs(met.incompatibility_sds(w, zeta) - 1 / (2 * n_avg + 1)))
    zeta = 0.8
    space = hb.hybrid(1, 96)
    ref = hb.spin_dependent_squeeze(space, zeta) @ hb.vacuum_ket(space, w.weights)
    shaped = ref.reshaped()

    def family(theta):
        d = hb.displacement(space.mode, theta[0] + 1j * theta[1])
        return (shaped @ d.T).ravel()

    q_num = met.qfim_numeric(family, (0.01, 0.005))
    d_num = met.uhlmann_numeric(family, (0.01, 0.005))
    r_num = met.incompatibility_from_matrices(q_num, d_num)
    r_closed = met.incompatibility_sds(w, zeta)
    dev = abs(r_num - r_closed) / r_closed
    ok = worst_closed == 0.0 and dev < 1e-6
    report(9, ok, f"closed-form residual {worst_closed:.1e}, numeric deviation {dev:.2e}")
    assert ok

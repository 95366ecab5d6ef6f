import numpy as np
import pytest

from sdsqueeze import dynamics as dyn
from sdsqueeze import optimize as opt
from sdsqueeze.errors import NoFeasibleP


G1 = 2 * np.pi * 5e3   # rad/s at N = 1


def test_weak_drive_first_candidate_feasible():
    spec = opt.SearchSpec(n_spins=1, z=0.05, g=G1)
    res = opt.min_time_search(spec)
    assert res.reps == 1
    assert res.fidelity > 0.99
    assert res.t_min == pytest.approx(dyn.speed_limit(0.05, G1, 1), rel=1e-12)


def test_result_consistent_with_effective_zeta():
    spec = opt.SearchSpec(n_spins=2, z=0.2, g=G1 / np.sqrt(2))
    res = opt.min_time_search(spec)
    params = dyn.DriveParams(g=spec.g, delta=res.delta, phi1=spec.phi1,
                             phi2=spec.phi1 - np.pi, ell=spec.ell, reps=res.reps)
    assert abs(dyn.effective_zeta(params)) == pytest.approx(2 * spec.z / spec.n_spins, rel=1e-12)
    assert res.t_min == pytest.approx(params.total_duration, rel=1e-12)


def test_feasibility_certificate():
    spec = opt.SearchSpec(n_spins=1, z=0.3, g=G1)
    res = opt.min_time_search(spec)
    fid, t_f, delta = opt.evaluate_candidate(spec, res.reps, res.n_max)
    assert fid == pytest.approx(res.fidelity, abs=1e-6)
    assert t_f == pytest.approx(res.t_min, rel=1e-12)


def test_speed_limit_floor():
    for z in (0.1, 0.4):
        spec = opt.SearchSpec(n_spins=1, z=z, g=G1)
        res = opt.min_time_search(spec)
        assert res.t_min >= dyn.speed_limit(z, G1, 1) * (1 - 1e-9)


def test_no_feasible_p():
    spec = opt.SearchSpec(n_spins=1, z=1.0, g=G1, p_max=1, threshold=0.999)
    with pytest.raises(NoFeasibleP) as err:
        opt.min_time_search(spec)
    assert err.value.best_fidelity is not None
    assert 0 < err.value.best_fidelity < 0.999


def test_polarized_initial_state():
    spec = opt.SearchSpec(n_spins=2, z=0.2, g=G1 / np.sqrt(2), initial="polarized")
    res = opt.min_time_search(spec)
    assert res.fidelity > 0.99


def test_sweep_empty_grid():
    template = opt.SearchSpec(n_spins=1, z=0.1, g=G1)
    assert opt.sweep([], [], template) == []


def test_sweep_single_point_matches_search():
    template = opt.SearchSpec(n_spins=1, z=0.1, g=G1)
    rows = opt.sweep([1], [0.1], template)
    res = opt.min_time_search(template)
    assert len(rows) == 1
    assert rows[0]["t_min_s"] == pytest.approx(res.t_min, rel=1e-9)
    assert rows[0]["status"] == "ok"


def test_sweep_skips_completed():
    template = opt.SearchSpec(n_spins=1, z=0.1, g=G1)
    rows = opt.sweep([1], [0.1, 0.2], template, completed={(1, 0.1)})
    assert [r["z"] for r in rows] == [0.2]


def test_sweep_worker_count_invariance():
    template = opt.SearchSpec(n_spins=1, z=0.1, g=G1)
    seq = opt.sweep([1], [0.05, 0.1], template, workers=1)
    par = opt.sweep([1], [0.05, 0.1], template, workers=2)
    assert [r["t_min_s"] for r in seq] == [r["t_min_s"] for r in par]
    assert [r["fidelity"] for r in seq] == pytest.approx([r["fidelity"] for r in par], abs=1e-12)


def test_sweep_flags_partial_failure():
    template = opt.SearchSpec(n_spins=1, z=0.1, g=G1, p_max=1, threshold=0.999999)
    rows = opt.sweep([1], [0.05, 1.0], template)
    statuses = {r["z"]: r["status"] for r in rows}
    assert statuses[1.0] == "no_feasible_P"
    assert set(statuses.values()) <= {"ok", "no_feasible_P"}


@pytest.mark.slow
def test_sweep_desk_scale_monotone_in_z():
    template = opt.SearchSpec(n_spins=1, z=1.0, g=G1, p_max=16)
    z_grid = [round(z, 6) for z in np.linspace(0.1, 1.0, 10)]
    rows = opt.sweep([1, 2, 4], z_grid, template)
    assert all(r["status"] == "ok" for r in rows)
    for n in (1, 2, 4):
        t = [r["t_min_s"] for r in rows if r["N"] == n]
        assert all(b >= a for a, b in zip(t, t[1:]))

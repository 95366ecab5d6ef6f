"""Minimum-time protocol search and parameter sweeps.

For a fixed coupling, phase choice and loop count, the only free knobs of
the stroboscopic schedule are the repetition count P and the detuning,
and the detuning is pinned by the accumulated-squeezing relation once P
is chosen.  Since the total duration grows like sqrt(P) at fixed target,
the first feasible P is time-optimal, so the search ascends P and stops
at the first schedule whose fidelity clears the threshold.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import dynamics as dyn
from . import hilbert as hb
from .errors import NoFeasibleP, TruncationError
from .metrology import spin_states


@dataclass(frozen=True)
class SearchSpec:
    n_spins: int
    z: float
    g: float
    phi1: float = np.pi
    ell: int = 1
    threshold: float = 0.99
    p_max: int = 512
    initial: str = "ghz"           # or "polarized"
    n_max: int | None = None
    rtol: float = 1e-9
    atol: float = 1e-11

    def __post_init__(self):
        if not (0.0 < self.threshold < 1.0):
            raise ValueError("threshold must lie in (0, 1)")
        if self.z <= 0:
            raise ValueError("z must be positive")


@dataclass(frozen=True)
class SearchResult:
    n_spins: int
    z: float
    g: float
    ell: int
    reps: int
    delta: float
    t_min: float
    fidelity: float
    n_max: int

    def as_row(self) -> dict:
        return {
            "N": self.n_spins, "z": self.z, "g_rad_s": self.g, "ell": self.ell,
            "P": self.reps, "Delta_rad_s": self.delta, "t_min_s": self.t_min,
            "fidelity": self.fidelity, "n_max": self.n_max,
        }


def _initial_weights(spec: SearchSpec):
    if spec.initial == "ghz":
        return spin_states("ghz", spec.n_spins)
    if spec.initial == "polarized":
        w = np.zeros(spec.n_spins + 1)
        w[-1] = 1.0
        from .metrology import DickeWeights
        return DickeWeights(spec.n_spins, w)
    raise ValueError(f"unknown initial state {spec.initial!r}")


def _target_ket(spec: SearchSpec, space: hb.HybridSpace) -> hb.Ket:
    """S(zeta Jz)|0>_b|initial>, zeta = 2 z / N."""
    zeta = 2.0 * spec.z / spec.n_spins
    weights = _initial_weights(spec)
    amps = np.zeros((space.spin.dim, space.mode.n_max), dtype=complex)
    for k, (c, m) in enumerate(zip(weights.weights, space.spin.m_values())):
        if c != 0:
            amps[k] = c * hb.squeezed_vacuum(space.mode, zeta * m)
    return hb.Ket(space, amps.ravel())


def evaluate_candidate(spec: SearchSpec, reps: int, n_max: int) -> tuple:
    """(fidelity, t_f, delta) of the P = reps schedule at the derived detuning."""
    zeta = 2.0 * spec.z / spec.n_spins
    delta = dyn.detuning_for_zeta(spec.g, spec.ell, reps, zeta)
    params = dyn.DriveParams(g=spec.g, delta=delta, phi1=spec.phi1,
                             phi2=spec.phi1 - np.pi, ell=spec.ell, reps=reps)
    schedule = dyn.DriveSchedule.stroboscopic(params)
    space = hb.hybrid(spec.n_spins, n_max)
    start = hb.vacuum_ket(space, _initial_weights(spec).weights)
    config = dyn.PropagationConfig(rtol=spec.rtol, atol=spec.atol)
    final = dyn.propagate(start, schedule, config)
    final.check_truncation()
    target = _target_ket(spec, space)
    return hb.fidelity(target, final), params.total_duration, delta


def min_time_search(spec: SearchSpec) -> SearchResult:
    """Smallest-duration stroboscopic schedule reaching the fidelity threshold.

    Ascends P from 1 (duration increases with P at fixed target, so the
    first hit is optimal); the truncation is grown by half on tail
    violations before giving up on a candidate.
    """
    n_max = spec.n_max or hb.recommended_n_max(spec.z)
    best_f = 0.0
    reps = 1
    while reps <= spec.p_max:
        try:
            fid, t_f, delta = evaluate_candidate(spec, reps, n_max)
        except TruncationError:
            n_max = int(np.ceil(n_max * 1.5))
            continue
        best_f = max(best_f, fid)
        if fid >= spec.threshold:
            return SearchResult(spec.n_spins, spec.z, spec.g, spec.ell, reps,
                                delta, t_f, fid, n_max)
        reps += 1
    raise NoFeasibleP(
        f"no P <= {spec.p_max} reached fidelity {spec.threshold} (best {best_f:.6f})",
        best_fidelity=best_f,
    )


def _sweep_point(args):
    spec, n, z = args
    point = replace(spec, n_spins=n, z=z, g=spec.g / np.sqrt(n) * np.sqrt(spec.n_spins))
    try:
        res = min_time_search(point)
        row = res.as_row()
        row["status"] = "ok"
    except NoFeasibleP as exc:
        row = {"N": n, "z": z, "g_rad_s": point.g, "ell": point.ell, "P": -1,
               "Delta_rad_s": float("nan"), "t_min_s": float("nan"),
               "fidelity": exc.best_fidelity or float("nan"),
               "n_max": point.n_max or hb.recommended_n_max(z), "status": "no_feasible_P"}
    return row


def sweep(n_values, z_values, template: SearchSpec, workers: int = 1,
          completed: set | None = None) -> list:
    """One search per (N, z) grid point; completed (N, z) keys are skipped.

    The template's g is interpreted at the template's N and rescaled by
    1/sqrt(N) across the grid, matching a fixed physical drive strength.
    Rows come back sorted by (N, z) regardless of worker count.
    """
    completed = completed or set()
    points = [(template, n, z) for n in n_values for z in z_values
              if (n, round(float(z), 12)) not in completed]
    if not points:
        return []
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_point, points))
    else:
        rows = [_sweep_point(p) for p in points]
    rows.sort(key=lambda r: (r["N"], r["z"]))
    return rows

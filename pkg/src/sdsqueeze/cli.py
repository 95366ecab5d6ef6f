"""Headless dataset generation for every result class of the toolkit.

Subcommands write CSV files with a provenance header into --out:

  bounds        Fisher bounds vs mode occupation for the magnitude and
                joint-estimation settings.
  protocol      outcome distributions and extrapolated CFIs of the
                implemented readout sequences.
  fig4          minimum-time dataset of the stroboscopic search, with
                speed-limit and second-sideband overlay columns.
  wigner        phase-space grids of the squeezed superposition states.
  magnus-check  closed-form vs quadrature residuals and echo diagnostics.
  sds-table     variance-bound comparison table at a chosen occupation.

Exit codes: 0 success, 2 config error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import dynamics as dyn
from . import hilbert as hb
from . import metrology as met
from . import optimize as opt
from . import protocols as proto
from . import tableio
from .errors import NoFeasibleP, SdsError


class ConfigError(Exception):
    pass


DEFAULTS = {
    "bounds": {
        "N_list": [1, 2, 3, 5, 7],
        "navg_grid": [round(x, 6) for x in np.geomspace(0.2, 10.0, 13)] + [1.5, 3.0, 10.0],
        "g_list": [0.2, 0.4, 0.6],
        "zeta_grid_multi": [round(x, 6) for x in np.arange(0.2, 1.4001, 0.2)],
        "simulate_multi": True,
    },
    "protocol": {
        "zeta_grid": [0.5, 1.0, 1.5],
        "beta_abs": 0.05,
        "beta_phases": [0.0, 0.7853981633974483, 1.5707963267948966],
        "N_single": 1,
        "N_ghz": 2,
        "N_coherent": 3,
        "ancilla": {"zeta": 1.0, "g": 0.2},
    },
    "fig4": {
        "N_list": [1, 2, 4],
        "z_grid": [round(z, 6) for z in np.linspace(0.1, 1.0, 10)],
        "g_kHz": 5.0,
        "ell": 1,
        "threshold": 0.99,
        "initial": "ghz",
        "eta": 0.05,
        "p_max": 64,
    },
    "wigner": {
        "N": 10,
        "zeta": 0.3,
        "kinds": ["ghz", "coherent_x"],
        "half_width": 14.0,
        "resolution": 121,
    },
    "magnus-check": {
        "N": 2,
        "n_max": 16,
        "g_over_delta": 0.01,
        "ell": 1,
        "phi1": 3.141592653589793,
        "echo_g_over_delta": 0.001,
    },
    "sds-table": {"navg": 1.0},
}


def load_config(command: str, path: str | None, tol: float | None) -> dict:
    config = json.loads(json.dumps(DEFAULTS[command]))  # deep copy
    if path:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}")
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        unknown = set(user) - set(config)
        if unknown:
            raise ConfigError(f"unknown config keys for {command}: {sorted(unknown)}")
        config.update(user)
    if tol is not None:
        config["tol"] = tol
    return config


def _write(out_dir: Path, name: str, command: str, config: dict, columns, rows,
           timestamp: str | None):
    meta = tableio.provenance_lines(command, config, __version__, timestamp)
    table = tableio.Table(columns, rows, meta)
    path = out_dir / name
    tableio.write_table(path, table)
    return path


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------

def cmd_bounds(config: dict, out_dir: Path, workers: int, timestamp=None) -> list:
    columns = ["setting", "N", "zeta", "n_avg", "qcrb", "ccrb", "sql", "hl", "R", "g"]
    rows = []
    for n_spins in config["N_list"]:
        w = met.spin_states("coherent_x", n_spins)
        for n_avg in sorted(set(config["navg_grid"])):
            zeta = met.zeta_for_occupation(w, n_avg)
            sql, hl = met.reference_limits("abs", n_avg)
            if zeta == 0.0:
                ccrb = float("inf")
            elif n_spins in (1, 3, 5, 7):
                ccrb = 1.0 / proto.cfi_closed_form_coherent(n_spins, zeta)
            else:
                res = proto.cfi_abs_beta(
                    lambda b, z=zeta, n=n_spins: proto.coherent_protocol_distribution(n, z, b))
                ccrb = 1.0 / res.value
            rows.append(["abs", n_spins, zeta, n_avg, 1.0 / met.qfi_abs_beta(w, zeta),
                         ccrb, sql, hl, met.incompatibility_sds(w, zeta), 0.0])
    for g in config["g_list"]:
        for zeta in config["zeta_grid_multi"]:
            n_avg = proto.reference_state_occupation_mp(zeta, g)
            sql, hl = met.reference_limits("multi", n_avg)
            if config.get("simulate_multi", True):
                cfim = proto.ancilla_cfim(zeta, g).value
                ccrb = float(np.trace(np.linalg.inv(cfim)))
            else:
                ccrb = 1.0 / (4.0 * g**2 * np.exp(2.0 * zeta))
            rows.append(["multi", 1, zeta, n_avg, hl, ccrb, sql, hl,
                         1.0 / (2.0 * n_avg + 1.0), g])
    return [_write(out_dir, "bounds.csv", "bounds", config, columns, rows, timestamp)]


# ---------------------------------------------------------------------------
# protocol
# ---------------------------------------------------------------------------

def cmd_protocol(config: dict, out_dir: Path, workers: int, timestamp=None) -> list:
    dist_cols = ["protocol", "N", "zeta", "g", "beta_re", "beta_im", "label", "probability"]
    dist_rows = []
    cfi_cols = ["setting", "N", "zeta", "n_avg", "cfi", "ccrb"]
    cfi_rows = []
    b = config["beta_abs"]
    for zeta in config["zeta_grid"]:
        for phase in config["beta_phases"]:
            beta = b * np.exp(1j * phase)
            n1 = config["N_single"]
            dist = proto.simulate_single_spin(zeta, beta)
            for lab, p in zip(dist.labels, dist.probabilities):
                dist_rows.append(["single_spin", n1, zeta, 0.0, beta.real, beta.imag,
                                  lab, float(p)])
            ng = config["N_ghz"]
            dist = proto.ghz_protocol_probability(ng, zeta, beta)
            for lab, p in zip(dist.labels, dist.probabilities):
                dist_rows.append(["ghz", ng, zeta, 0.0, beta.real, beta.imag, lab, float(p)])
            nc = config["N_coherent"]
            dist = proto.coherent_protocol_distribution(nc, zeta, beta)
            for lab, p in zip(dist.labels, dist.probabilities):
                dist_rows.append(["coherent", nc, zeta, 0.0, beta.real, beta.imag,
                                  lab, float(p)])
        w1 = met.spin_states("ghz", config["N_single"])
        n_avg = met.mode_occupation_sds(w1, zeta)
        res = proto.cfi_abs_beta(lambda bb, z=zeta: proto.single_spin_probability(z, bb))
        cfi_rows.append(["abs", config["N_single"], zeta, n_avg, res.value, 1.0 / res.value])
        wc = met.spin_states("coherent_x", config["N_coherent"])
        n_avg = met.mode_occupation_sds(wc, zeta)
        res = proto.cfi_abs_beta(
            lambda bb, z=zeta: proto.coherent_protocol_distribution(config["N_coherent"], z, bb))
        cfi_rows.append(["abs", config["N_coherent"], zeta, n_avg, res.value, 1.0 / res.value])
    anc = config["ancilla"]
    p1, p2 = proto.ancilla_multiparam_distribution(anc["zeta"], anc["g"], b + 1j * b)
    dist_rows.append(["ancilla_1", 1, anc["zeta"], anc["g"], b, b, "up", p1])
    dist_rows.append(["ancilla_1", 1, anc["zeta"], anc["g"], b, b, "down", 1.0 - p1])
    dist_rows.append(["ancilla_2", 1, anc["zeta"], anc["g"], b, b, "up", p2])
    dist_rows.append(["ancilla_2", 1, anc["zeta"], anc["g"], b, b, "down", 1.0 - p2])
    cfim = proto.ancilla_cfim(anc["zeta"], anc["g"]).value
    n_avg = proto.reference_state_occupation_mp(anc["zeta"], anc["g"])
    cfi_rows.append(["multi", 1, anc["zeta"], n_avg, float(cfim[0, 0]),
                     float(np.trace(np.linalg.inv(cfim)))])
    return [
        _write(out_dir, "distributions.csv", "protocol", config, dist_cols, dist_rows, timestamp),
        _write(out_dir, "cfi.csv", "protocol", config, cfi_cols, cfi_rows, timestamp),
    ]


# ---------------------------------------------------------------------------
# fig4
# ---------------------------------------------------------------------------

def cmd_fig4(config: dict, out_dir: Path, workers: int, timestamp=None) -> list:
    columns = ["N", "z", "g_Hz", "ell", "P", "Delta_Hz", "t_min_s", "fidelity",
               "n_max", "t_speed_limit_s", "t_second_sideband_s", "status"]
    out_path = out_dir / "fig4.csv"
    completed = set()
    existing_rows = []
    if out_path.exists():
        prior = tableio.read_table(out_path)
        if prior.columns == columns:
            existing_rows = prior.rows
            for r in prior.rows:
                if r[columns.index("status")] == "ok":
                    completed.add((r[0], round(float(r[1]), 12)))
    g1 = 2.0 * np.pi * config["g_kHz"] * 1e3
    rtol = config.get("tol") or 1e-9
    template = opt.SearchSpec(n_spins=1, z=1.0, g=g1, ell=config["ell"],
                              threshold=config["threshold"], initial=config["initial"],
                              p_max=config["p_max"], rtol=rtol, atol=rtol / 100.0)
    rows_dicts = opt.sweep(config["N_list"], config["z_grid"], template,
                           workers=workers, completed=completed)
    eta = config["eta"]
    omega = g1 / eta  # g = eta Omega / sqrt(N) at N = 1
    rows = list(existing_rows)
    for d in rows_dicts:
        rows.append([
            d["N"], d["z"], d["g_rad_s"] / (2 * np.pi), d["ell"], d["P"],
            (d["Delta_rad_s"] / (2 * np.pi)) if np.isfinite(d["Delta_rad_s"]) else float("nan"),
            d["t_min_s"], d["fidelity"], d["n_max"],
            dyn.speed_limit(d["z"], d["g_rad_s"], d["N"]),
            dyn.second_sideband_duration(d["z"], eta, omega),
            d["status"],
        ])
    rows.sort(key=lambda r: (r[0], r[1]))
    failed = [r for r in rows if r[-1] != "ok"]
    paths = [_write(out_dir, "fig4.csv", "fig4", config, columns, rows, timestamp)]
    if rows and len(failed) == len(rows):
        raise NoFeasibleP("every grid point failed")
    return paths


# ---------------------------------------------------------------------------
# wigner
# ---------------------------------------------------------------------------

def cmd_wigner(config: dict, out_dir: Path, workers: int, timestamp=None) -> list:
    half = config["half_width"]
    res = config["resolution"]
    xs = np.linspace(-half, half, res)
    ps = np.linspace(-half, half, res)
    paths = []
    for kind in config["kinds"]:
        w = met.spin_states(kind, config["N"])
        n_max = hb.recommended_n_max(abs(config["zeta"]) * config["N"] / 2)
        state = proto.bosonic_analogue_state(w, config["zeta"], n_max)
        grid = proto.wigner(state, xs, ps)
        rows = []
        for i, x in enumerate(xs):
            for k, p in enumerate(ps):
                rows.append([float(x), float(p), float(grid[i, k])])
        paths.append(_write(out_dir, f"wigner_{kind}.csv", "wigner",
                            {**config, "kind": kind}, ["x", "p", "W"], rows, timestamp))
    return paths


# ---------------------------------------------------------------------------
# magnus-check
# ---------------------------------------------------------------------------

def cmd_magnus_check(config: dict, out_dir: Path, workers: int, timestamp=None) -> list:
    n_spins, n_max = config["N"], config["n_max"]
    space = hb.hybrid(n_spins, n_max)
    g_over = config["g_over_delta"]
    delta = 1.0
    g = g_over * delta
    params = dyn.DriveParams(g=g, delta=delta, phi1=config["phi1"],
                             phi2=config["phi1"] - np.pi, ell=config["ell"])
    seg = dyn.DriveSchedule.stroboscopic(params).segments[0]

    closed = dyn.magnus_second_order(seg, space)
    quad = dyn.magnus_second_order_quadrature(seg, space)
    keep = hb.interior_mask(space, guard_levels=2)
    sub = np.ix_(keep, keep)
    resid = np.linalg.norm(quad[sub] - closed[sub]) / np.linalg.norm(closed[sub])

    theta1 = dyn.magnus_first_order_quadrature(seg, space)
    theta1_ratio = np.linalg.norm(theta1) / (g * seg.duration)

    u1 = dyn.propagator_matrix(dyn.DriveSchedule([seg]), space)
    two = dyn.DriveSchedule.stroboscopic(params).segments[:2]
    u2 = dyn.propagator_matrix(dyn.DriveSchedule(two), space)
    tat1 = dyn.tat_projection(u1, space)
    tat2 = dyn.tat_projection(u2, space)

    echo_params = dyn.DriveParams(g=config["echo_g_over_delta"] * delta, delta=delta,
                                  phi1=config["phi1"], phi2=config["phi1"] - np.pi,
                                  ell=config["ell"])
    sched = dyn.DriveSchedule.stroboscopic(echo_params)
    start = hb.vacuum_ket(space)
    cfg = dyn.PropagationConfig(rtol=1e-11, atol=1e-13)
    fwd = dyn.propagate(start, sched, cfg)
    mir = dyn.propagate(start, sched.mirrored(), cfg)
    echo_dist = float(np.linalg.norm(fwd.amplitudes - mir.amplitudes))

    rows = [
        ["theta2_interior_residual", resid],
        ["theta1_norm_over_g_tau", theta1_ratio],
        ["tat_projection_one_segment", tat1],
        ["tat_projection_two_segments", tat2],
        ["tat_suppression_factor", tat1 / tat2 if tat2 > 0 else float("inf")],
        ["echo_mirror_distance", echo_dist],
    ]
    return [_write(out_dir, "magnus_check.csv", "magnus-check", config,
                   ["quantity", "value"], rows, timestamp)]


# ---------------------------------------------------------------------------
# sds-table
# ---------------------------------------------------------------------------

def cmd_sds_table(config: dict, out_dir: Path, workers: int, timestamp=None) -> list:
    columns = ["state", "resources", "n_avg", "v_re", "v_abs", "v_sum", "measurement"]
    rows = []
    for state, res, v_re, v_abs, v_sum, meas in met.reference_state_table(config["navg"]):
        rows.append([state, res, config["navg"], v_re,
                     "" if v_abs is None else v_abs, v_sum, meas])
    return [_write(out_dir, "sds_table.csv", "sds-table", config, columns, rows, timestamp)]


COMMANDS = {
    "bounds": cmd_bounds,
    "protocol": cmd_protocol,
    "fig4": cmd_fig4,
    "wigner": cmd_wigner,
    "magnus-check": cmd_magnus_check,
    "sds-table": cmd_sds_table,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sdsqueeze", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON parameter file")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--tol", type=float, default=None, help="tolerance override")
        p.add_argument("--timestamp", default=None,
                       help="fix the header timestamp (reproducible output)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.command, args.config, args.tol)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        paths = COMMANDS[args.command](config, out_dir, args.workers, args.timestamp)
    except (SdsError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    for p in paths:
        print(p)
    return 0


if __name__ == "__main__":
    sys.exit(main())

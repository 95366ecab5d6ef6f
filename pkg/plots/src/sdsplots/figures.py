"""Render the toolkit's CSV datasets into publication-style figures.

Figure classes:

  bounds  log-log Cramer-Rao curves vs mode occupation, with the SQL as a
          dashed guide line and the QCRB / Heisenberg limit solid.
  fig4    minimum preparation time vs target squeezing, with the speed-limit
          and second-sideband overlays taken from their CSV columns.
  wigner  phase-space heatmap on a symmetric diverging scale centred at 0.
  sweep   step plots of the repetition count and detuning vs target squeezing.

Overlay curves are always read from columns of the input dataset, never
recomputed from physics inside this package.
"""

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .datasets import Dataset, load

FIGURE_CLASSES = ("bounds", "fig4", "wigner", "sweep")


@dataclass
class FigureSpec:
    figure: str
    datasets: list
    output: str
    format: str = "png"
    scales: dict = field(default_factory=dict)
    title: str = ""

    def __post_init__(self):
        if self.figure not in FIGURE_CLASSES:
            raise ValueError(f"unknown figure class {self.figure!r}")
        if self.format not in ("png", "svg", "pdf"):
            raise ValueError(f"unsupported format {self.format!r}")
        if not self.datasets:
            raise ValueError("at least one dataset is required")

    @classmethod
    def from_json(cls, path) -> "FigureSpec":
        import json

        with open(path) as fh:
            raw = json.load(fh)
        base = Path(path).parent
        raw["datasets"] = [str((base / p)) if not Path(p).is_absolute() else p
                           for p in raw["datasets"]]
        out = raw.get("output", "figure.png")
        raw["output"] = str(base / out) if not Path(out).is_absolute() else out
        return cls(**raw)


def render_bounds(ax, ds: Dataset, scales: dict):
    abs_rows = ds.select(setting="abs")
    for n_spins in sorted(set(abs_rows.column("N"))):
        sub = abs_rows.select(N=n_spins)
        ax.plot(sub.column("n_avg"), sub.column("ccrb"), marker="o",
                label=f"CCRB N={n_spins}")
    ref = abs_rows if abs_rows.rows else ds
    order = np.argsort(ref.column("n_avg"))
    n_avg = ref.column("n_avg")[order]
    ax.plot(n_avg, ref.column("sql")[order], "k--", label="SQL")
    ax.plot(n_avg, ref.column("qcrb")[order], "k-", label="QCRB")
    ax.plot(n_avg, ref.column("hl")[order], color="0.5", linestyle="-", label="HL")
    multi = ds.select(setting="multi")
    for g in sorted(set(multi.column("g"))):
        sub = multi.select(g=g)
        ax.plot(sub.column("n_avg"), sub.column("ccrb"), marker="s",
                linestyle=":", label=f"CCRB joint g={g}")
    ax.set_xscale(scales.get("x", "log"))
    ax.set_yscale(scales.get("y", "log"))
    ax.set_xlabel("mode occupation")
    ax.set_ylabel("variance bound")
    ax.legend(fontsize=7)


def render_fig4(ax, ds: Dataset, scales: dict):
    ok = Dataset(ds.path, ds.columns,
                 [r for r in ds.rows if r[ds.columns.index("status")] == "ok"],
                 ds.meta_lines)
    for n_spins in sorted(set(ok.column("N"))):
        sub = ok.select(N=n_spins)
        order = np.argsort(sub.column("z"))
        ax.plot(sub.column("z")[order], sub.column("t_min_s")[order], marker="o",
                label=f"t_min N={n_spins}")
    order = np.argsort(ok.column("z"))
    z = ok.column("z")[order]
    ax.plot(z, ok.column("t_speed_limit_s")[order], color="0.6", linestyle="-",
            label="speed limit")
    ax.plot(z, ok.column("t_second_sideband_s")[order], "k--", label="second sideband")
    ax.set_xscale(scales.get("x", "linear"))
    ax.set_yscale(scales.get("y", "log"))
    ax.set_xlabel("target squeezing z")
    ax.set_ylabel("duration [s]")
    ax.legend(fontsize=7)


def render_wigner(ax, ds: Dataset, scales: dict):
    xs = np.unique(ds.column("x"))
    ps = np.unique(ds.column("p"))
    w = ds.column("W").reshape(xs.size, ps.size)
    bound = float(np.max(np.abs(w)))
    mesh = ax.pcolormesh(xs, ps, w.T, cmap="RdBu_r", vmin=-bound, vmax=bound,
                         shading="nearest")
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("p")
    plt.colorbar(mesh, ax=ax, label="W(x, p)")


def render_sweep(ax, ds: Dataset, scales: dict):
    ok = Dataset(ds.path, ds.columns,
                 [r for r in ds.rows if r[ds.columns.index("status")] == "ok"],
                 ds.meta_lines)
    twin = ax.twinx()
    for n_spins in sorted(set(ok.column("N"))):
        sub = ok.select(N=n_spins)
        order = np.argsort(sub.column("z"))
        ax.step(sub.column("z")[order], sub.column("P")[order], where="mid",
                label=f"P N={n_spins}")
        twin.plot(sub.column("z")[order], sub.column("Delta_Hz")[order],
                  linestyle=":", marker=".", label=f"Delta N={n_spins}")
    ax.set_xlabel("target squeezing z")
    ax.set_ylabel("repetitions P")
    twin.set_ylabel("detuning [Hz]")
    ax.legend(loc="upper left", fontsize=7)
    twin.legend(loc="lower right", fontsize=7)


_RENDERERS = {
    "bounds": render_bounds,
    "fig4": render_fig4,
    "wigner": render_wigner,
    "sweep": render_sweep,
}


def render(spec: FigureSpec) -> str:
    """Render one figure; writes the image plus a .provenance.txt sidecar."""
    datasets = [load(p) for p in spec.datasets]
    fig, axes = plt.subplots(1, len(datasets),
                             figsize=(5.0 * len(datasets), 4.0), squeeze=False)
    for ax, ds in zip(axes[0], datasets):
        _RENDERERS[spec.figure](ax, ds, spec.scales)
        if spec.title:
            ax.set_title(spec.title)
    fig.tight_layout()
    out = Path(spec.output).with_suffix("." + spec.format)
    meta_text = "\n".join(line for ds in datasets for line in ds.meta_lines)
    save_kwargs = {}
    if spec.format == "png":
        save_kwargs["metadata"] = {"provenance": meta_text}
    fig.savefig(out, dpi=150, **save_kwargs)
    plt.close(fig)
    sidecar = out.with_suffix(out.suffix + ".provenance.txt")
    sidecar.write_text(meta_text + "\n")
    return str(out)

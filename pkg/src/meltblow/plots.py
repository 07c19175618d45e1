"""Static SVG figures rendered alongside the CSV reports.

CSV stays the authoritative output; these are line/heatmap summaries in the
style of the usual spinning diagnostics (spectrum curves, field slices,
trajectory components, step-size monitor, elongation densities).  Figures
are written deterministically (fixed hash salt, no timestamps).
"""

import math

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "meltblow"

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_META = {"Date": None}


def _save(fig, path):
    fig.savefig(path, format="svg", metadata=_META)
    plt.close(fig)


def spectrum_figure(curves, path):
    """Log-log energy spectrum curves; `curves` maps label -> (kappa, E)."""
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for label, (kappa, vals) in curves.items():
        mask = (kappa > 0) & (vals > 0)
        ax.loglog(kappa[mask], vals[mask], label=label, lw=1.2)
    ax.set_xlabel(r"$\kappa$")
    ax.set_ylabel(r"$E(\kappa)$")
    ax.legend(fontsize=8)
    ax.grid(True, which="both", alpha=0.25)
    fig.tight_layout()
    _save(fig, path)


def field_slice_figure(x1, x2, panels, path):
    """Heatmaps of a field component over a 2D slice; `panels` maps title -> (n2, n1) array."""
    n = len(panels)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.6), squeeze=False)
    vmax = max(np.abs(v).max() for v in panels.values())
    for ax, (title, vals) in zip(axes[0], panels.items()):
        im = ax.pcolormesh(x1, x2, vals, cmap="RdBu_r", vmin=-vmax, vmax=vmax, shading="auto")
        ax.set_title(title, fontsize=9)
        ax.set_xlabel(r"$x_1$")
        ax.set_ylabel(r"$x_2$")
    fig.colorbar(im, ax=axes[0], shrink=0.85)
    _save(fig, path)


def trajectory_figure(rec, path):
    """Position components and velocity-vs-air-velocity traces over time."""
    fig, axes = plt.subplots(2, 2, figsize=(9, 6))
    ax = axes[0, 0]
    for i, lbl in enumerate(("$r_1$", "$r_2$", "$r_3$")):
        ax.plot(rec.t, rec.r[:, i], lw=0.9, label=lbl)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("position [m]")
    ax.legend(fontsize=8)
    for k, (ax, i) in enumerate(zip(axes.flat[1:], range(3))):
        ax.plot(rec.t, rec.u[:, i], lw=0.7, alpha=0.7, label=f"$u_{i + 1}$")
        ax.plot(rec.t, rec.v[:, i], lw=1.1, label=f"$v_{i + 1}$")
        ax.set_xlabel("t [s]")
        ax.set_ylabel("velocity [m/s]")
        ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def elongation_figure(rec, path):
    """Elongation growth over time (log scale)."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(rec.t, rec.e, lw=1.1)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("elongation e")
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    _save(fig, path)


def stepsize_figure(rec, path):
    """Accepted step sizes against the turbulent resolution scales."""
    fig, ax = plt.subplots(figsize=(6.5, 4.2))
    ax.semilogy(rec.t, rec.dt, lw=0.8, label=r"$\Delta t$")
    ax.semilogy(rec.t, rec.t_turb, lw=1.0, label=r"$t_T$")
    finite = np.isfinite(rec.l_over_vrel)
    ax.semilogy(rec.t[finite], rec.l_over_vrel[finite], lw=1.0, label=r"$l_T/v_{rel}$")
    ax.set_xlabel("t [s]")
    ax.set_ylabel("[s]")
    ax.legend(fontsize=8)
    ax.grid(True, alpha=0.25)
    fig.tight_layout()
    _save(fig, path)


def density_figure(grids, path):
    """Elongation probability densities per height; `grids` maps label -> (e, pdf)."""
    n = len(grids)
    fig, axes = plt.subplots(1, n, figsize=(3.8 * n, 3.4), squeeze=False)
    for ax, (label, (grid, dens)) in zip(axes[0], grids.items()):
        ax.plot(grid, dens, lw=1.1)
        ax.set_title(label, fontsize=9)
        ax.set_xlabel("elongation e")
        ax.set_ylabel("density")
    fig.tight_layout()
    _save(fig, path)

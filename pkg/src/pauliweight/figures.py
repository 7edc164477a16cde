"""Figure rendering for command results.

Each renderer takes a CommandResult and writes PNG files next to the CSV
output.  Rendering is strictly a view of the already-computed tables; no
numerics happen here.  Uses the Agg backend so it works headless.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _column(table, name):
    _, cols, rows = table
    idx = cols.index(name)
    return np.array([row[idx] for row in rows], dtype=float)


def _save(fig, outdir, name):
    path = os.path.join(outdir, name)
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def render_evolve(result, outdir):
    occ = result.table("occupation")
    t = _column(occ, "t").astype(int)
    x = _column(occ, "x").astype(int)
    rho = _column(occ, "rho")
    depth, n = t.max(), x.max()
    grid = np.full((depth + 1, n), np.nan)
    grid[t, x - 1] = rho
    fig, ax = plt.subplots(figsize=(6, 4))
    im = ax.imshow(grid, origin="lower", aspect="auto", vmin=0, vmax=1,
                   extent=(0.5, n + 0.5, -0.5, depth + 0.5), cmap="viridis")
    ax.set_xlabel("site x")
    ax.set_ylabel("depth t")
    fig.colorbar(im, ax=ax, label="occupation")
    paths = [_save(fig, outdir, "evolve_occupation.png")]

    weights = result.table("weights")
    ts = _column(weights, "t")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogy(ts, _column(weights, "shadow_norm"), "o-", label="shadow norm")
    ax.set_xlabel("depth t")
    ax.set_ylabel("shadow norm")
    ax2 = ax.twinx()
    ax2.plot(ts, _column(weights, "beta"), "s--", color="tab:red", label="beta")
    ax2.set_ylabel("beta")
    ax.legend(loc="upper left")
    ax2.legend(loc="upper right")
    paths.append(_save(fig, outdir, "evolve_weights.png"))
    return paths


def render_beta_scan(result, outdir):
    table = result.table("beta")
    alphas = _column(table, "alpha")
    ts = _column(table, "t")
    betas = _column(table, "beta")
    baseline = _column(table, "beta_clifford")
    fig, ax = plt.subplots(figsize=(6, 4))
    for alpha in np.unique(alphas):
        sel = alphas == alpha
        ax.plot(ts[sel], betas[sel], "o-", label=f"alpha = {alpha:g}")
    order = np.argsort(ts)
    ax.plot(ts[order], baseline[order], "k--", label="Clifford")
    ax.set_xlabel("depth t")
    ax.set_ylabel("beta")
    ax.legend()
    return [_save(fig, outdir, "beta_scan.png")]


def render_opt_depth(result, outdir):
    table = result.table("t_star")
    alphas = _column(table, "alpha")
    ks = _column(table, "k")
    t_stars = _column(table, "t_star")
    fig, ax = plt.subplots(figsize=(6, 4))
    for alpha in np.unique(alphas):
        sel = alphas == alpha
        ax.semilogx(ks[sel], t_stars[sel], "o-", label=f"alpha = {alpha:g}")
    ax.set_xlabel("operator size k")
    ax.set_ylabel("optimal depth t*")
    ax.legend()
    paths = [_save(fig, outdir, "opt_depth.png")]

    fit = result.table("fit")
    fa = _column(fit, "alpha")
    fv = _column(fit, "a")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.loglog(fa, fv, "o", label="fitted slope a(alpha)")
    c, b = result.summary["c"], result.summary["b"]
    xs = np.linspace(fa.min(), fa.max(), 100)
    ax.loglog(xs, c * xs**b, "-", label=f"{c:.3g} alpha^{b:.3g}")
    ax.set_xlabel("alpha")
    ax.set_ylabel("slope a")
    ax.legend()
    paths.append(_save(fig, outdir, "opt_depth_fit.png"))
    return paths


def render_boundary(result, outdir):
    table = result.table("deviation")
    xs = _column(table, "x")
    ts = _column(table, "t").astype(int)
    dual = _column(table, "dev_dual")
    cliff = _column(table, "dev_clifford")
    depths = np.unique(ts)
    fig, axes = plt.subplots(1, len(depths), figsize=(4 * len(depths), 3.2),
                             sharey=True)
    axes = np.atleast_1d(axes)
    for ax, t in zip(axes, depths):
        sel = ts == t
        ax.plot(xs[sel], dual[sel], "o-", label="dual-unitary")
        ax.plot(xs[sel], cliff[sel], "s--", label="Clifford")
        ax.axhline(0.0, color="gray", lw=0.5)
        ax.set_title(f"t = {t}")
        ax.set_xlabel("site x")
    axes[0].set_ylabel("rho - 3/4")
    axes[0].legend()
    return [_save(fig, outdir, "boundary.png")]


def render_appendix(result, outdir):
    table = result.table("bounds")
    ts = _column(table, "t")
    fig, axes = plt.subplots(1, 2, figsize=(9, 3.5))
    axes[0].semilogy(ts, _column(table, "beta_inv"), "o-", label="beta^-1")
    axes[0].semilogy(ts, _column(table, "bound"), "s--", label="1 - 2 rho/3")
    axes[0].set_xlabel("depth t")
    axes[0].legend()
    axes[1].plot(ts, _column(table, "sigma2"), "o-")
    axes[1].set_xlabel("depth t")
    axes[1].set_ylabel("sigma^2")
    return [_save(fig, outdir, "appendix.png")]


def render_compare(result, outdir):
    table = result.table("compare")
    _, cols, rows = table
    names = [row[0] for row in rows]
    values = _column(table, "value")
    tols = _column(table, "tolerance")
    fig, ax = plt.subplots(figsize=(6, 0.8 + 0.6 * len(names)))
    y = np.arange(len(names))
    ax.barh(y, values, color="tab:blue", label="value")
    ax.plot(tols, y, "r|", markersize=14, label="tolerance")
    ax.set_yticks(y)
    ax.set_yticklabels(names)
    ax.set_xscale("log")
    ax.legend()
    return [_save(fig, outdir, "compare.png")]


RENDERERS = {
    "evolve": render_evolve,
    "beta-scan": render_beta_scan,
    "opt-depth": render_opt_depth,
    "boundary": render_boundary,
    "appendix": render_appendix,
    "compare": render_compare,
}


def render(command: str, result, outdir) -> list:
    """Write the PNGs for one command's result; returns the file paths."""
    renderer = RENDERERS.get(command)
    if renderer is None:
        return []
    return renderer(result, outdir)

"""Figures written next to the CSV reports of the command-line tool."""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_grid(rows, path, title=""):
    """Density against y, one curve per t."""
    fig, ax = plt.subplots(figsize=(6, 4))
    ts = sorted({r["t"] for r in rows})
    for t in ts:
        sel = [r for r in rows if r["t"] == t]
        ax.plot([r["y"] for r in sel], [r["density"] for r in sel], label=f"t = {t:g}")
    ax.set_xlabel("y")
    ax.set_ylabel("density")
    ax.set_yscale("log")
    if len(ts) <= 10:
        ax.legend(fontsize="small")
    ax.set_title(title)
    return _save(fig, path)


def plot_table(rows, path, title=""):
    """log10 of the maximum relative error as a (t, d) heat map; flagged cells are marked."""
    ts = sorted({r["t"] for r in rows})
    ds = sorted({r["d"] for r in rows})
    img = np.full((len(ts), len(ds)), np.nan)
    fig, ax = plt.subplots(figsize=(max(5.0, 2.0 + 0.8 * len(ds)), max(3.5, 1.0 + 0.4 * len(ts))))
    for r in rows:
        i, j = ts.index(r["t"]), ds.index(r["d"])
        img[i, j] = np.log10(max(r["max_rel_error"], 1e-17))
        if r["flagged"]:
            ax.text(j, i, "x", ha="center", va="center", color="red")
    im = ax.imshow(img, aspect="auto", cmap="viridis", origin="upper")
    ax.set_xticks(range(len(ds)), [str(d) for d in ds])
    ax.set_yticks(range(len(ts)), [f"{t:g}" for t in ts])
    ax.set_xlabel("d")
    ax.set_ylabel("t")
    fig.colorbar(im, ax=ax, label="log10 max relative error")
    ax.set_title(title)
    return _save(fig, path)


def plot_window_study(rows, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    M = [r[0] for r in rows]
    ax.semilogy(M, [max(r[1], 1e-17) for r in rows], "o-", label="hard cutoff")
    ax.semilogy(M, [max(r[2], 1e-17) for r in rows], "s-", label="windowed")
    ax.set_xlabel("M")
    ax.set_ylabel("absolute error")
    ax.legend()
    return _save(fig, path)


def plot_bench(rows, path):
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot([r["d"] for r in rows], [1e3 * r["mean_seconds"] for r in rows], "o-")
    ax.set_xlabel("d")
    ax.set_ylabel("mean time per evaluation [ms]")
    return _save(fig, path)

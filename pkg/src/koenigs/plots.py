"""Self-contained SVG figures: the unit disc with boundary features, T(y) curves."""
from __future__ import annotations

import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

# fixed ids in the SVG so identical runs give identical files
matplotlib.rcParams["svg.hashsalt"] = "koenigs"
matplotlib.rcParams["svg.fonttype"] = "path"

CLASS_COLORS = {
    "denjoy-wolff": "#d62728",
    "regular-bfp": "#1f77b4",
    "super-repelling-1": "#9467bd",
    "super-repelling-2": "#8c564b",
    "super-repelling-3": "#e377c2",
    "plain": "#7f7f7f",
    "contact-not-fixed": "#2ca02c",
    "exceptional": "#ff7f0e",
    "non-exceptional": "#17becf",
}


def disc_axes(title: str = ""):
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    th = np.linspace(0, 2 * np.pi, 721)
    ax.plot(np.cos(th), np.sin(th), color="black", lw=0.8)
    ax.set_aspect("equal")
    ax.set_xlim(-1.12, 1.12)
    ax.set_ylim(-1.12, 1.12)
    ax.set_xticks([-1, 0, 1])
    ax.set_yticks([-1, 0, 1])
    if title:
        ax.set_title(title, fontsize=10)
    return fig, ax


def draw_points(ax, pts, label, color=None, marker="o", size=30):
    pts = np.atleast_1d(np.asarray(pts, dtype=complex))
    pts = pts[np.isfinite(pts)]
    if pts.size:
        ax.scatter(pts.real, pts.imag, s=size, marker=marker, color=color, label=label, zorder=4)


def draw_curve(ax, pts, label, color=None, lw=1.2, ls="-"):
    pts = np.atleast_1d(np.asarray(pts, dtype=complex))
    pts = pts[np.isfinite(pts)]
    if pts.size:
        ax.plot(pts.real, pts.imag, color=color, lw=lw, ls=ls, label=label)


def finish(fig, ax, path, legend=True):
    if legend and ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7, loc="upper left", bbox_to_anchor=(1.01, 1.0), frameon=False)
    fig.savefig(path, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)


def lifetime_figure(curves, path):
    """curves: list of (label, y, T) with finite T."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, y, T in curves:
        ax.plot(y, T, lw=1.4, label=label)
    ax.set_xlabel("height y on the arc")
    ax.set_ylabel("life time T (flow time)")
    ax.grid(alpha=0.3)
    finish(fig, ax, path)


def layers_figure(layers, path, title=""):
    """Draw reproduction layers (curves and markers) on the disc."""
    fig, ax = disc_axes(title)
    cycle = plt.rcParams["axes.prop_cycle"].by_key()["color"]
    for k, layer in enumerate(layers):
        color = cycle[k % len(cycle)]
        if layer.style == "curve":
            draw_curve(ax, layer.points, layer.label, color)
        else:
            draw_points(ax, layer.points, layer.label, color, size=40)
    finish(fig, ax, path)

"""Static figures for reports: singular sets in the parameter plane and surface meshes.

Figures are drawn on the Agg canvas without touching pyplot's global state.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from .mesh import SurfaceMesh
from .rational import is_inf

_METADATA = {"Software": None}  # keep the PNG free of version strings


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=120, metadata=_METADATA)
    return path


def plot_singular_set(curves, window, path, punctures=(), title: str = "") -> Path:
    """Draw singular polylines over the parameter window.

    Parameters
    ----------
    curves : list of Polyline
        Output of :func:`afl.affine_front.singular_curves`.
    window : tuple
        ``(x0, x1, y0, y1)``.
    punctures : sequence of sphere points
        Finite ones inside the window are marked.
    """
    fig = Figure(figsize=(5, 5))
    ax = fig.add_subplot(111)
    for c in curves:
        pts = np.append(c.points, c.points[:1]) if c.closed else c.points
        ax.plot(pts.real, pts.imag, color="C3", lw=1.2)
    finite = np.array([complex(p) for p in punctures if not is_inf(p)])
    if finite.size:
        ax.plot(finite.real, finite.imag, "kx", ms=7, label="puncture")
        ax.legend(loc="upper right", fontsize=8)
    x0, x1, y0, y1 = window
    ax.set_xlim(x0, x1)
    ax.set_ylim(y0, y1)
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    ax.set_title(title or f"singular set ({len(curves)} curves)")
    ax.grid(alpha=0.3)
    return _save(fig, path)


def plot_mesh(mesh: SurfaceMesh, path, title: str = "", labels=("x1", "x2", "x3")) -> Path:
    """Shaded triangle mesh with singular vertices highlighted."""
    fig = Figure(figsize=(6, 5))
    ax = fig.add_subplot(111, projection="3d", computed_zorder=False)
    v = mesh.vertices
    if len(mesh.faces):
        ax.plot_trisurf(v[:, 0], v[:, 1], v[:, 2], triangles=mesh.faces, cmap="viridis", linewidth=0,
                        antialiased=False, alpha=0.85, zorder=1)
    s = mesh.singular
    if np.any(s):
        ax.scatter(v[s, 0], v[s, 1], v[s, 2], color="C3", s=3, depthshade=False, label="singular", zorder=2)
        ax.legend(loc="upper left", fontsize=8)
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    ax.set_zlabel(labels[2])
    ax.set_title(title or f"{mesh.n_vertices} vertices, {len(mesh.faces)} faces")
    return _save(fig, path)

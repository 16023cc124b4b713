"""Zero level set of a scalar field on a rectangular grid (marching squares).

Crossings are keyed by the grid edge they lie on, so two cells sharing an
edge produce the same key and polylines are assembled by exact matching
rather than by comparing floating-point positions. Saddle cells are
disambiguated by the sign of the bilinear centre value.
"""
from __future__ import annotations

from collections import defaultdict

import numpy as np

# edge keys: ("h", i, j) joins node (i, j) to (i, j+1); ("v", i, j) joins (i, j) to (i+1, j)


def _cell_segments(i, j, s, centre_pos):
    """Segments (pairs of edge keys) for cell (i, j) given corner signs."""
    b0, b1, b2, b3 = s  # (i,j) (i,j+1) (i+1,j+1) (i+1,j)
    bottom, right, top, left = ("h", i, j), ("v", i, j + 1), ("h", i + 1, j), ("v", i, j)
    cross = [e for e, a, b in ((bottom, b0, b1), (right, b1, b2), (top, b2, b3), (left, b3, b0)) if a != b]
    if len(cross) == 2:
        return [tuple(cross)]
    if len(cross) == 4:
        if centre_pos == b0:
            return [(bottom, right), (top, left)]
        return [(bottom, left), (right, top)]
    return []


def trace(values: np.ndarray, skip: np.ndarray | None = None) -> list[tuple[list, bool]]:
    """Trace the zero set of ``values`` (shape ``(ny, nx)``, rows along y).

    Parameters
    ----------
    values : ndarray
        Field sampled on grid nodes. Non-finite nodes mask their cells.
    skip : ndarray of bool, optional
        Shape ``(ny-1, nx-1)``; cells to ignore.

    Returns
    -------
    list of (edge keys, closed)
        One entry per polyline, in traversal order.
    """
    v = np.asarray(values, dtype=float)
    ny, nx = v.shape
    pos = v > 0
    finite = np.isfinite(v)
    ok = finite[:-1, :-1] & finite[:-1, 1:] & finite[1:, :-1] & finite[1:, 1:]
    if skip is not None:
        ok &= ~skip
    mixed = ok & ~((pos[:-1, :-1] == pos[:-1, 1:]) & (pos[:-1, 1:] == pos[1:, 1:]) & (pos[1:, 1:] == pos[1:, :-1]))
    adj = defaultdict(list)
    for i, j in zip(*np.nonzero(mixed)):
        s = (pos[i, j], pos[i, j + 1], pos[i + 1, j + 1], pos[i + 1, j])
        centre = 0.25 * (v[i, j] + v[i, j + 1] + v[i + 1, j + 1] + v[i + 1, j]) > 0
        for a, b in _cell_segments(int(i), int(j), s, centre):
            adj[a].append(b)
            adj[b].append(a)
    seen = set()
    lines = []

    def walk(start):
        path = [start]
        seen.add(start)
        prev, cur = None, start
        while True:
            nxt = [e for e in adj[cur] if e != prev and (e not in seen or (e == start and len(path) > 2))]
            if not nxt:
                return path, False
            e = nxt[0]
            if e == start:
                return path, True
            path.append(e)
            seen.add(e)
            prev, cur = cur, e

    # open polylines start at ends of degree 1, the rest are loops
    for e in sorted(adj):
        if len(adj[e]) == 1 and e not in seen:
            lines.append(walk(e))
    for e in sorted(adj):
        if e not in seen:
            lines.append(walk(e))
    return lines


def edge_endpoints(key, xs: np.ndarray, ys: np.ndarray) -> tuple[complex, complex]:
    kind, i, j = key
    a = complex(xs[j], ys[i])
    b = complex(xs[j + 1], ys[i]) if kind == "h" else complex(xs[j], ys[i + 1])
    return a, b


def locate(f, a: np.ndarray, b: np.ndarray, fa: np.ndarray, fb: np.ndarray, iters: int = 40) -> np.ndarray:
    """Vectorised bisection for a sign change of ``f`` on segments ``[a, b]``."""
    lo, hi = a.copy(), b.copy()
    flo = fa.copy()
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(left, mid, lo)
        flo = np.where(left, fm, flo)
        hi = np.where(left, hi, mid)
    return 0.5 * (lo + hi)

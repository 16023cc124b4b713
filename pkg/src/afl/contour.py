"""Residues of meromorphic one-forms by trapezoidal quadrature on circles.

The trapezoid rule on a circle is spectrally accurate for functions analytic
in an annulus around it, so doubling the node count until two estimates
agree converges geometrically once the circle keeps away from the other
singularities.
"""
from __future__ import annotations

import numpy as np

from .errors import ContourTooClose, NonConvergence
from .rational import RationalMap, SpherePoint, form_at_infinity, is_inf

EPS_RES = 1e-10
MIN_RADIUS = 1e-9


def chart(h: RationalMap, center: SpherePoint) -> tuple[RationalMap, complex]:
    """Form coefficient and centre in a chart where ``center`` is finite."""
    if is_inf(center):
        return form_at_infinity(h), 0j
    return h, complex(center)


def contour_radius(center: SpherePoint, others) -> float:
    """Half the distance from ``center`` to the nearest other singular point.

    Distances are measured in the chart used by :func:`residue` (``w = 1/z``
    around infinity). Returns 1 when there is no other singular point.
    """
    c = 0j if is_inf(center) else complex(center)
    dists = []
    for p in others:
        if is_inf(p):
            if is_inf(center):
                continue
            continue  # infinity is never inside a finite chart disk
        q = complex(p)
        if is_inf(center):
            if q == 0:
                continue
            q = 1 / q
        dists.append(abs(q - c))
    r = 0.5 * min(dists) if dists else 1.0
    if r < MIN_RADIUS:
        raise ContourTooClose(f"no contour fits around {center!r} (radius {r:.3g})")
    return r


def residue(h: RationalMap, center: SpherePoint, radius: float, tol: float = EPS_RES,
            max_nodes: int = 1 << 16) -> complex:
    """Residue of ``h(z) dz`` at ``center`` by adaptive trapezoid on a circle.

    The node count starts at 16 and doubles until successive estimates
    agree to ``tol`` (relative to ``max(1, |estimate|)``).
    """
    g, c = chart(h, center)
    n = 16
    prev = None
    while n <= max_nodes:
        e = radius * np.exp(2j * np.pi * np.arange(n) / n)
        est = complex(np.mean(g(c + e) * e))
        if prev is not None and abs(est - prev) <= tol * max(1.0, abs(est)):
            return est
        prev = est
        n *= 2
    raise NonConvergence(f"trapezoid residue at {center!r} did not settle")

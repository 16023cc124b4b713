"""Batched Dormand-Prince 5(4) integration of the Legendrian lift equation.

Each segment ``a -> b`` is parametrised by ``s in [0, 1]``, ``z = a + s (b - a)``,
so that ``dE/ds = E [[0, t(z)], [w(z), 0]] (b - a)``. All segments of a
batch share one adaptive step sequence driven by the worst error estimate,
which lets a whole layer of a spanning tree advance in a single loop.
"""
from __future__ import annotations

import contextlib

import numpy as np

from .errors import ToleranceNotMet

RTOL = 1e-11
ATOL = 1e-14

_rtol = [RTOL]


@contextlib.contextmanager
def tolerance(rtol: float):
    """Temporarily change the default relative tolerance of :func:`integrate_segments`."""
    if not (np.isfinite(rtol) and 0 < rtol < 1):
        raise ValueError(f"rtol must lie in (0, 1), got {rtol!r}")
    _rtol.append(float(rtol))
    try:
        yield
    finally:
        _rtol.pop()

# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


def sl2_normalize(E: np.ndarray) -> np.ndarray:
    """Project onto ``SL(2, C)`` by ``E / sqrt(det E)``."""
    det = E[..., 0, 0] * E[..., 1, 1] - E[..., 0, 1] * E[..., 1, 0]
    return E / np.sqrt(det)[..., None, None]


def _rhs(coef, E, z, dz):
    t, w = coef(z)
    out = np.empty_like(E)
    out[..., :, 0] = E[..., :, 1] * (w * dz)[..., None]
    out[..., :, 1] = E[..., :, 0] * (t * dz)[..., None]
    return out


def integrate_segments(coef, E0: np.ndarray, a: np.ndarray, b: np.ndarray, rtol: float | None = None,
                       atol: float = ATOL, max_steps: int = 100_000) -> np.ndarray:
    """Integrate ``dE/dz = E [[0, t], [w, 0]]`` along straight segments.

    Parameters
    ----------
    coef : callable
        ``coef(z) -> (t(z), w(z))``, vectorised over ``z``.
    E0 : ndarray, shape (B, 2, 2)
        Initial frames.
    a, b : ndarray, shape (B,)
        Segment endpoints.
    rtol : float, optional
        Relative tolerance; defaults to the innermost :func:`tolerance` setting.

    Returns
    -------
    ndarray, shape (B, 2, 2)
        Frames at ``b``, renormalised to determinant 1 after every step.

    Raises
    ------
    ToleranceNotMet
        If the step size collapses or ``max_steps`` is exceeded.
    """
    rtol = _rtol[-1] if rtol is None else rtol
    E = np.array(E0, dtype=complex, copy=True)
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if E.shape[0] == 0:
        return E
    dz = b - a
    # overflow shows up as a non-finite error ratio and ends in ToleranceNotMet
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        s, h = 0.0, 0.05
        steps = 0
        while s < 1.0:
            h = min(h, 1.0 - s)
            k = []
            for i in range(7):
                Ei = E + h * sum(c * ki for c, ki in zip(_A[i], k)) if i else E
                k.append(_rhs(coef, Ei, a + (s + _C[i] * h) * dz, dz))
            E5 = E + h * sum(c * ki for c, ki in zip(_B5, k) if c)
            err = h * sum(c * ki for c, ki in zip(_E, k))
            scale = atol + rtol * np.maximum(np.abs(E), np.abs(E5))
            ratio = float(np.max(np.abs(err) / scale))
            if not np.isfinite(ratio):
                ratio = np.inf
            if ratio <= 1.0:
                s += h
                E = sl2_normalize(E5)
            fac = 0.9 * ratio ** -0.2 if ratio > 0 else 5.0
            h *= min(5.0, max(0.2, fac))
            steps += 1
            if h < 1e-13 or steps > max_steps:
                raise ToleranceNotMet(f"lift integration stalled at s = {s:.6g} (step {h:.3g})")
    return E

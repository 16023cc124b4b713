"""Built-in example jobs with fixed parameters.

Each entry is a plain job document, so a gallery run and the same document
passed to ``afl mesh`` produce identical reports.
"""
from __future__ import annotations

from .errors import ValidationError

NAMES = ("paraboloid", "rotational", "zn:<n>", "voss", "horosphere", "cylinder")
ZN_MAX = 24


def _poly(*coeffs):
    return [[float(c), 0.0] for c in coeffs]


def _paraboloid() -> dict:
    # (F, G) = (z / 2, z): constant Lagrangian Gauss map 1/2
    return {
        "kind": "affine",
        "name": "paraboloid",
        "weierstrass": {"mode": "explicit", "F": _poly(0, 0.5), "G": _poly(0, 1), "punctures": ["inf"]},
        "domain": {"type": "disk", "center": [0, 0], "r_max": 2.0},
        "window": [-2.0, 2.0, -2.0, 2.0],
    }


def _rotational() -> dict:
    # (F, G) = (z, r^2 / z) with r = 1: nu = -z^2 omits 0 and infinity
    return {
        "kind": "affine",
        "name": "rotational",
        "weierstrass": {
            "mode": "explicit",
            "F": _poly(0, 1),
            "G": {"num": _poly(1), "den": _poly(0, 1)},
            "punctures": [[0.0, 0.0], "inf"],
        },
        "domain": {"type": "annulus", "center": [0, 0], "r_min": 0.4, "r_max": 2.0},
        "window": [-2.0, 2.0, -2.0, 2.0],
    }


def _zn(n: int) -> dict:
    # (z^{n+1} / (n+1), z): nu = z^n, totally ramified over 0
    return {
        "kind": "affine",
        "name": f"zn{n}",
        "weierstrass": {
            "mode": "explicit",
            "F": _poly(*([0] * (n + 1) + [1 / (n + 1)])),
            "G": _poly(0, 1),
            "punctures": ["inf"],
        },
        "domain": {"type": "disk", "center": [0, 0], "r_max": 1.5},
        "window": [-1.5, 1.5, -1.5, 1.5],
    }


def _voss() -> dict:
    # nu = z, dG = dz / ((z - 1)(z + 1)); lives on the universal cover only
    return {
        "kind": "affine",
        "name": "voss",
        "weierstrass": {
            "mode": "differential",
            "nu": _poly(0, 1),
            "dG": {"num": _poly(1), "den": _poly(-1, 0, 1)},
            "punctures": [[1.0, 0.0], [-1.0, 0.0], "inf"],
        },
        "domain": {"type": "disk", "center": [0, 0], "r_max": 2.0},
        "window": [-2.0, 2.0, -2.0, 2.0],
    }


def _horosphere() -> dict:
    return {
        "kind": "h3",
        "name": "horosphere",
        "forms": {"w_hat": _poly(1), "t_hat": _poly(0), "punctures": []},
        "domain": {"type": "disk", "center": [0, 0], "r_max": 1.0},
    }


def _cylinder() -> dict:
    # w = 1/z, t = 1/(2z): rho = 1/2 constant
    return {
        "kind": "h3",
        "name": "cylinder",
        "forms": {
            "w_hat": {"num": _poly(1), "den": _poly(0, 1)},
            "t_hat": {"num": _poly(0.5), "den": _poly(0, 1)},
            "punctures": [[0.0, 0.0], "inf"],
        },
        "domain": {"type": "annulus", "center": [0, 0], "r_min": 0.5, "r_max": 2.0},
    }


_FIXED = {
    "paraboloid": _paraboloid,
    "rotational": _rotational,
    "voss": _voss,
    "horosphere": _horosphere,
    "cylinder": _cylinder,
}


def gallery_job(name: str) -> dict:
    """Job document for a built-in example.

    Raises
    ------
    ValidationError
        For unknown names or a bad ``zn:<n>`` exponent.
    """
    if not isinstance(name, str):
        raise ValidationError("gallery name must be a string")
    if name in _FIXED:
        return _FIXED[name]()
    if name.startswith("zn:"):
        try:
            n = int(name[3:])
        except ValueError:
            raise ValidationError(f"zn exponent must be an integer, got {name[3:]!r}") from None
        if not 1 <= n <= ZN_MAX:
            raise ValidationError(f"zn exponent must lie in 1..{ZN_MAX}")
        return _zn(n)
    raise ValidationError(f"unknown gallery example {name!r}; choose from {', '.join(NAMES)}")

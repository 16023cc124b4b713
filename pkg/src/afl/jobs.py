"""Job documents: parsing and validation ahead of any computation."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

from .affine_front import WeierstrassData
from .errors import ValidationError
from .flat_front import CanonicalForms
from .gallery import gallery_job
from .mesh import Domain

KINDS = ("affine", "h3", "analyze", "gallery")
DEFAULT_GRID = 64
DEFAULT_SINGULAR_GRID = 256

_COMMON = {"kind", "name", "domain", "grid", "tolerance"}
_KEYS = {
    "affine": _COMMON | {"weierstrass", "window", "singular_grid", "base"},
    "h3": _COMMON | {"forms", "t", "base", "schwarzian_grid"},
    "gallery": {"kind", "example"},
}


@dataclass(frozen=True)
class Job:
    """A validated job.

    ``kind`` is ``"affine"`` or ``"h3"`` after resolution; ``analysis_only``
    records that the document asked for analysis without a mesh.
    """

    kind: str
    name: str
    payload: object  # WeierstrassData | CanonicalForms
    domain: Domain
    grid: int
    window: tuple | None = None
    singular_grid: int = DEFAULT_SINGULAR_GRID
    schwarzian_grid: int = 41
    t: float = 0.0
    base: complex | None = None
    rtol: float | None = None
    analysis_only: bool = False

    def to_json(self) -> dict:
        out = {"kind": self.kind, "name": self.name, "domain": self.domain.to_json(), "grid": self.grid}
        if self.kind == "affine":
            out["weierstrass"] = self.payload.to_json()
            out["window"] = list(self.window)
            out["singular_grid"] = self.singular_grid
        else:
            out["forms"] = self.payload.to_json()
            out["t"] = self.t
            out["schwarzian_grid"] = self.schwarzian_grid
        if self.base is not None:
            out["base"] = [self.base.real, self.base.imag]
        if self.rtol is not None:
            out["tolerance"] = {"ode_rtol": self.rtol}
        if self.analysis_only:
            out["analysis_only"] = True
        return out


def _int(obj, key, lo=2, hi=4096):
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int) or not lo <= v <= hi:
        raise ValidationError(f"{key} must be an integer in [{lo}, {hi}]")
    return v


def _float(v, key):
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ValidationError(f"{key} must be a finite number")
    return float(v)


def _complex(v, key):
    if not isinstance(v, (list, tuple)) or len(v) != 2:
        raise ValidationError(f"{key} must be [re, im]")
    return complex(_float(v[0], key), _float(v[1], key))


def _window(v, domain: Domain):
    if v is None:
        if domain.kind == "rect":
            return (*domain.x, *domain.y)
        c, r = domain.center, domain.r_max
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)
    if not isinstance(v, (list, tuple)) or len(v) != 4:
        raise ValidationError("window must be [x0, x1, y0, y1]")
    x0, x1, y0, y1 = (_float(a, "window") for a in v)
    if not (x0 < x1 and y0 < y1):
        raise ValidationError("window must satisfy x0 < x1 and y0 < y1")
    return (x0, x1, y0, y1)


def _payload_kind(obj) -> str:
    has_w, has_f = "weierstrass" in obj, "forms" in obj
    if has_w == has_f:
        raise ValidationError("analyze jobs carry exactly one of 'weierstrass' or 'forms'")
    return "affine" if has_w else "h3"


def parse_job(obj, grid: int | None = None) -> Job:
    """Validate a job document.

    Parameters
    ----------
    obj : dict
        Decoded JSON.
    grid : int, optional
        Resolution override (``--grid``).

    Raises
    ------
    ValidationError
        On any schema violation. No computation happens before this returns.
    """
    if not isinstance(obj, dict):
        raise ValidationError("job must be a JSON object")
    kind = obj.get("kind")
    if kind not in KINDS:
        raise ValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    if kind == "gallery":
        extra = set(obj) - _KEYS["gallery"]
        if extra:
            raise ValidationError(f"unknown keys for gallery job: {sorted(extra)}")
        return parse_job(gallery_job(obj.get("example")), grid)
    analysis_only = kind == "analyze"
    if analysis_only:
        kind = _payload_kind(obj)
    extra = set(obj) - _KEYS[kind]
    if extra:
        raise ValidationError(f"unknown keys for {kind} job: {sorted(extra)}")

    name = obj.get("name", kind)
    if not isinstance(name, str) or not name or any(c in name for c in "/\\\0") or name.startswith("."):
        raise ValidationError("name must be a plain file stem")
    default_domain = {"type": "disk", "r_max": 2.0 if kind == "affine" else 1.0}
    domain = Domain.from_json(obj.get("domain", default_domain))
    res = grid if grid is not None else obj.get("grid", DEFAULT_GRID)
    res = _int({"grid": res}, "grid")
    rtol = None
    if "tolerance" in obj:
        tol = obj["tolerance"]
        if not isinstance(tol, dict) or set(tol) - {"ode_rtol"}:
            raise ValidationError("tolerance must be an object with key 'ode_rtol'")
        if "ode_rtol" in tol:
            rtol = _float(tol["ode_rtol"], "ode_rtol")
            if not 0 < rtol < 1:
                raise ValidationError("ode_rtol must lie in (0, 1)")
    base = _complex(obj["base"], "base") if "base" in obj else None

    if kind == "affine":
        data = WeierstrassData.from_json(obj["weierstrass"]) if "weierstrass" in obj else None
        if data is None:
            raise ValidationError("affine jobs need 'weierstrass'")
        sg = _int(obj, "singular_grid") if "singular_grid" in obj else DEFAULT_SINGULAR_GRID
        return Job("affine", name, data, domain, res, _window(obj.get("window"), domain), singular_grid=sg,
                   base=base, rtol=rtol, analysis_only=analysis_only)
    if "forms" not in obj:
        raise ValidationError("h3 jobs need 'forms'")
    forms = CanonicalForms.from_json(obj["forms"])
    t = _float(obj.get("t", 0.0), "t")
    sg = _int(obj, "schwarzian_grid", 5, 401) if "schwarzian_grid" in obj else 41
    return Job("h3", name, forms, domain, res, schwarzian_grid=sg, t=t, base=base, rtol=rtol,
               analysis_only=analysis_only)


def load_job(path, grid: int | None = None) -> Job:
    """Read and validate a job file; malformed JSON is a :class:`ValidationError`."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read job file: {exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed JSON: {exc}") from None
    return parse_job(obj, grid)

"""Improper affine fronts in R^3 from rational Weierstrass data.

A front is built from a pair of meromorphic functions ``(F, G)`` on a
punctured sphere,

    x   = G + conj(F)
    phi = (|G|^2 - |F|^2)/2 + Re(G F - 2 int F dG)

with conormal ``n = conj(F) - G``, so that ``d phi = -<n, dx>``. The Lagrangian Gauss map is
``nu = dF/dG`` and the front is singular exactly where ``|nu| = 1``.
Data may be given explicitly as ``(F, G)`` or through the differentials
``(nu, dG)``, in which case ``F`` and ``G`` exist on the punctured sphere
only when every residue of ``dF`` and ``dG`` vanishes.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import marching
from .contour import EPS_RES, chart, contour_radius, residue
from .errors import (
    DegenerateData,
    EvaluationAtSingularity,
    NotWellDefined,
    ValidationError,
)
from .mesh import Domain, SurfaceMesh, build_mesh, make_grid
from .partfrac import Antiderivative, antiderivative
from .rational import (
    INF,
    RationalMap,
    SpherePoint,
    form_order_at,
    is_inf,
    point_to_json,
    roots,
    same_point,
)
from .valdist import PuncturedSphere

EPS_SING = 1e-6
MODES = ("explicit", "differential")


def _function_poles(h: RationalMap) -> list:
    out = list(roots(h.den).points) if h.den.degree > 0 else []
    if h.num.degree > h.den.degree:
        out.append(INF)
    return out


def _form_poles(h: RationalMap) -> list:
    if h.is_zero:
        return []
    out = list(roots(h.den).points) if h.den.degree > 0 else []
    if form_order_at(h, INF) < 0:
        out.append(INF)
    return out


@dataclass(frozen=True)
class WeierstrassData:
    """Weierstrass data of an improper affine front on a punctured sphere.

    Use :meth:`explicit` or :meth:`differential` to construct.
    """

    mode: str
    dom: PuncturedSphere
    F: RationalMap | None = None
    G: RationalMap | None = None
    nu: RationalMap | None = None
    dG: RationalMap | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}")
        if self.mode == "explicit":
            if self.F is None or self.G is None:
                raise ValidationError("explicit data needs F and G")
            if self.F.is_constant and self.G.is_constant:
                raise DegenerateData("dF and dG both vanish identically")
            for name, h in (("F", self.F), ("G", self.G)):
                for p in _function_poles(h):
                    if not self.dom.is_puncture(p):
                        raise ValidationError(f"pole of {name} at {point_to_json(p)} is not a puncture")
        else:
            if self.nu is None or self.dG is None:
                raise ValidationError("differential data needs nu and dG")
            if self.dG.is_zero:
                raise DegenerateData("dG vanishes identically")
            for name, h in (("dG", self.dG), ("dF", self.dF)):
                for p in _form_poles(h):
                    if not self.dom.is_puncture(p):
                        raise ValidationError(f"pole of {name} at {point_to_json(p)} is not a puncture")

    @classmethod
    def explicit(cls, F: RationalMap, G: RationalMap, punctures=()) -> "WeierstrassData":
        return cls("explicit", PuncturedSphere(tuple(punctures)), F=F, G=G)

    @classmethod
    def differential(cls, nu: RationalMap, dG: RationalMap, punctures=()) -> "WeierstrassData":
        return cls("differential", PuncturedSphere(tuple(punctures)), nu=nu, dG=dG)

    @cached_property
    def dF(self) -> RationalMap:
        """Coefficient of ``dF`` in ``dz``."""
        return self.F.derivative() if self.mode == "explicit" else self.nu * self.dG

    @cached_property
    def dG_coef(self) -> RationalMap:
        return self.G.derivative() if self.mode == "explicit" else self.dG

    def singular_points(self) -> list:
        """Punctures together with every pole of the data."""
        pts = list(self.dom.punctures)
        for h in (self.dF, self.dG_coef):
            for p in _form_poles(h):
                if not any(same_point(p, q) for q in pts):
                    pts.append(p)
        return pts

    def to_json(self) -> dict:
        out = {"mode": self.mode, "punctures": self.dom.to_json()}
        if self.mode == "explicit":
            out.update(F=self.F.to_json(), G=self.G.to_json())
        else:
            out.update(nu=self.nu.to_json(), dG=self.dG.to_json())
        return out

    @classmethod
    def from_json(cls, obj) -> "WeierstrassData":
        if not isinstance(obj, dict):
            raise ValidationError("weierstrass must be an object")
        mode = obj.get("mode", "explicit")
        dom = PuncturedSphere.from_json(obj.get("punctures", []))
        try:
            if mode == "explicit":
                return cls(mode, dom, F=RationalMap.from_json(obj["F"]), G=RationalMap.from_json(obj["G"]))
            if mode == "differential":
                return cls(mode, dom, nu=RationalMap.from_json(obj["nu"]), dG=RationalMap.from_json(obj["dG"]))
        except KeyError as exc:
            raise ValidationError(f"missing field {exc} for mode {mode!r}") from None
        raise ValidationError(f"mode must be one of {MODES}")


@dataclass(frozen=True)
class AffinePoint:
    x: complex
    phi: float

    def as_xyz(self) -> tuple[float, float, float]:
        return (self.x.real, self.x.imag, self.phi)


@dataclass(frozen=True)
class PunctureRecord:
    puncture: SpherePoint
    radius: float
    res_dG: complex
    res_dF: complex
    res_FdG: complex | None  # None when F is not single valued
    single_valued_F: bool
    single_valued_G: bool
    re_period_zero: bool | None

    def to_json(self) -> dict:
        c = lambda w: None if w is None else [w.real, w.imag]  # noqa: E731
        return {
            "puncture": point_to_json(self.puncture),
            "radius": self.radius,
            "res_dG": c(self.res_dG),
            "res_dF": c(self.res_dF),
            "res_FdG": c(self.res_FdG),
            "single_valued_F": self.single_valued_F,
            "single_valued_G": self.single_valued_G,
            "re_period_zero": self.re_period_zero,
        }


@dataclass(frozen=True)
class PeriodCertificate:
    records: tuple
    verdict: str  # "well_defined" | "universal_cover_only"

    @property
    def well_defined(self) -> bool:
        return self.verdict == "well_defined"

    def record(self, p: SpherePoint) -> PunctureRecord:
        for r in self.records:
            if same_point(r.puncture, p):
                return r
        raise KeyError(point_to_json(p))

    def to_json(self) -> dict:
        return {"verdict": self.verdict, "punctures": [r.to_json() for r in self.records]}


@dataclass(frozen=True)
class MetricSample:
    z: complex
    nu_val: complex
    dtau_factor: float
    g_factor: float
    ds2_hol_part: complex
    singular: bool


def lagrangian_gauss(data: WeierstrassData) -> RationalMap:
    """``nu = dF/dG`` as a reduced rational map.

    Raises
    ------
    DegenerateData
        If ``dG`` vanishes identically.
    """
    if data.mode == "differential":
        return data.nu
    if data.dG_coef.is_zero:
        raise DegenerateData("dG vanishes identically, nu is undefined")
    return data.dF / data.dG_coef


def _synthesize(h: RationalMap) -> RationalMap:
    """Single-valued primitive of ``h dz`` (residues are assumed to vanish)."""
    return antiderivative(h).rational_part()


def _tolerance(h: RationalMap, center: SpherePoint, radius: float) -> float:
    # absolute residue tolerance scaled by the size of the integrand on the circle
    g, c = chart(h, center)
    e = radius * np.exp(2j * np.pi * np.arange(64) / 64)
    return EPS_RES * max(1.0, float(np.max(np.abs(g(c + e) * e))))


def period_check(data: WeierstrassData) -> PeriodCertificate:
    """Residues of ``dF``, ``dG`` and ``F dG`` at every puncture.

    Loops around the punctures generate the homology of a punctured sphere,
    so vanishing residues of ``dF`` and ``dG`` make ``F`` and ``G`` single
    valued and ``Im Res(F dG) = 0`` makes ``Re int F dG`` single valued.

    Raises
    ------
    ContourTooClose
        If two singular points are too close for a separating circle.
    """
    sing = data.singular_points()
    pending = []
    for p in data.dom.punctures:
        r = contour_radius(p, [q for q in sing if not same_point(p, q)])
        rG = residue(data.dG_coef, p, r)
        rF = residue(data.dF, p, r)
        pending.append((p, r, rG, rF, abs(rG) <= _tolerance(data.dG_coef, p, r), abs(rF) <= _tolerance(data.dF, p, r)))
    F = None
    if data.mode == "explicit":
        F = data.F
    elif all(sf for *_, sf in pending):
        F = _synthesize(data.dF)
    records = []
    for p, r, rG, rF, sg, sf in pending:
        rFG, zero = None, None
        if F is not None:
            h = F * data.dG_coef
            rFG = residue(h, p, r) if not h.is_zero else 0j
            zero = abs(rFG.imag) <= (_tolerance(h, p, r) if not h.is_zero else EPS_RES)
        records.append(PunctureRecord(p, r, rG, rF, rFG, sf, sg, zero))
    ok = all(rec.single_valued_F and rec.single_valued_G and rec.re_period_zero for rec in records)
    return PeriodCertificate(tuple(records), "well_defined" if ok else "universal_cover_only")


def primitives(data: WeierstrassData) -> tuple[RationalMap, RationalMap]:
    """Single-valued ``(F, G)``; differential data is integrated in closed form.

    Raises
    ------
    NotWellDefined
        If a residue of ``dF`` or ``dG`` does not vanish.
    """
    if data.mode == "explicit":
        return data.F, data.G
    for h in (data.dF, data.dG_coef):
        if not antiderivative(h).is_rational(1e-8):
            raise NotWellDefined("a residue of dF or dG is nonzero: F, G live on the universal cover only")
    return _synthesize(data.dF), _synthesize(data.dG_coef)


_BASE_CANDIDATES = (0j, 1 + 0j, -1 + 0j, 1j, -1j, 2 + 0j, 0.5 + 0.5j)


class AffineFront:
    """Evaluator for a well-defined front with the constant of ``int F dG`` fixed at a base point.

    Parameters
    ----------
    data : WeierstrassData
    base : complex, optional
        Point where ``int F dG`` vanishes. Defaults to 0, or the first
        regular point among 1, -1, i, ... when 0 is singular.
    certificate : PeriodCertificate, optional
        Reused instead of recomputing the residues.

    Raises
    ------
    NotWellDefined
        If the period certificate is not ``well_defined``.
    """

    def __init__(self, data: WeierstrassData, base: complex | None = None, certificate: PeriodCertificate | None = None):
        self.data = data
        self.certificate = certificate or period_check(data)
        if not self.certificate.well_defined:
            raise NotWellDefined("front is defined on the universal cover only; immersion refused")
        self.F, self.G = primitives(data)
        self._sing = [p for p in data.singular_points() if not is_inf(p)]
        self.integral: Antiderivative = antiderivative(self.F * data.dG_coef)
        if base is None:
            base = next(b for b in _BASE_CANDIDATES if not self.is_singular(b))
        elif self.is_singular(base):
            raise EvaluationAtSingularity(f"base point {base} is singular")
        self.base = complex(base)
        self._I0 = complex(self.integral(self.base))

    def is_singular(self, z: complex, tol: float = 1e-12) -> bool:
        return any(abs(z - p) <= tol * (1 + abs(p)) for p in self._sing)

    def evaluate(self, z) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised ``(x, phi)``; no singularity check."""
        z = np.asarray(z, dtype=complex)
        F, G = self.F(z), self.G(z)
        I = self.integral(z) - self._I0
        phi = 0.5 * (np.abs(G) ** 2 - np.abs(F) ** 2) + np.real(G * F - 2 * I)
        return G + np.conj(F), phi

    def __call__(self, z: complex) -> AffinePoint:
        if is_inf(z) or self.is_singular(complex(z)):
            raise EvaluationAtSingularity(f"{point_to_json(z)} is a puncture or a pole")
        x, phi = self.evaluate(complex(z))
        return AffinePoint(complex(x), float(phi))


def immerse(data: WeierstrassData, z: complex, base: complex | None = None) -> AffinePoint:
    """The point ``psi(z) = (x, phi)`` of the front.

    Raises
    ------
    NotWellDefined
        If the data fails the period certificate.
    EvaluationAtSingularity
        If ``z`` is a puncture or a pole of ``F`` or ``G``.
    """
    return AffineFront(data, base)(z)


def conormal(data: WeierstrassData, z: complex) -> tuple[complex, float]:
    """Conormal ``(conj(F) - G, 1)`` at a regular point."""
    F, G = primitives(data)
    if is_inf(z) or any(same_point(z, p, 1e-12) for p in data.singular_points()):
        raise EvaluationAtSingularity(f"{point_to_json(z)} is a puncture or a pole")
    return complex(np.conj(F(z)) - G(z)), 1.0


def metric_factors(data: WeierstrassData, z) -> dict:
    """Vectorised metric coefficients at the points ``z``.

    ``dtau`` is ``2(|F'|^2 + |G'|^2)`` and ``dtau_nu`` the same factor
    written as ``2(1 + |nu|^2)|G'|^2``; both are returned so callers can
    compare the two forms.
    """
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        return _metric_factors(data, z)


def _metric_factors(data, z):
    dF, dG = data.dF(z), data.dG_coef(z)
    nu = lagrangian_gauss(data)(z)
    return {
        "nu": nu,
        "dtau": 2 * (np.abs(dF) ** 2 + np.abs(dG) ** 2),
        "dtau_nu": 2 * (1 + np.abs(nu) ** 2) * np.abs(dG) ** 2,
        "g": np.abs(dG) ** 2 - np.abs(dF) ** 2,
        "ds2_hol": dF * dG,
        "singular": np.abs(np.abs(nu) - 1) <= EPS_SING,
    }


def metric_sample(data: WeierstrassData, z: complex) -> MetricSample:
    m = metric_factors(data, complex(z))
    return MetricSample(
        z=complex(z),
        nu_val=complex(m["nu"]),
        dtau_factor=float(m["dtau"]),
        g_factor=float(m["g"]),
        ds2_hol_part=complex(m["ds2_hol"]),
        singular=bool(m["singular"]),
    )


@dataclass(frozen=True)
class Polyline:
    points: np.ndarray  # complex parameters along the curve
    closed: bool

    def to_json(self) -> dict:
        return {"closed": self.closed, "points": [[p.real, p.imag] for p in self.points]}


def _log_abs(r: RationalMap):
    def f(z):
        with np.errstate(divide="ignore", invalid="ignore"):
            v = np.log(np.abs(r.num(z))) - np.log(np.abs(r.den(z)))
        return np.clip(np.nan_to_num(v, nan=np.nan, posinf=1e3, neginf=-1e3), -1e3, 1e3)

    return f


def singular_curves(data: WeierstrassData, window=(-2.0, 2.0, -2.0, 2.0), n: int = 256) -> list[Polyline]:
    """Curves where ``|nu| = 1`` inside a rectangular window.

    ``log|nu|`` is sampled on an ``n x n`` grid, its zero set traced by
    marching squares with cells touching a puncture masked, and each
    crossing located on its grid edge by bisection.
    """
    nu = lagrangian_gauss(data)
    if nu.is_constant:
        return []
    x0, x1, y0, y1 = window
    xs, ys = np.linspace(x0, x1, n), np.linspace(y0, y1, n)
    Z = xs[None, :] + 1j * ys[:, None]
    f = _log_abs(nu)
    vals = f(Z)
    skip = np.zeros((n - 1, n - 1), dtype=bool)
    hx, hy = xs[1] - xs[0], ys[1] - ys[0]
    for p in data.dom.finite_punctures:
        j, i = int(np.floor((p.real - x0) / hx)), int(np.floor((p.imag - y0) / hy))
        skip[max(i - 1, 0): i + 2, max(j - 1, 0): j + 2] = True
    lines = marching.trace(vals, skip)
    keys = [k for path, _ in lines for k in path]
    if not keys:
        return []
    ends = np.array([marching.edge_endpoints(k, xs, ys) for k in keys])
    a, b = ends[:, 0], ends[:, 1]
    pts = marching.locate(f, a, b, f(a), f(b))
    out, at = [], 0
    for path, closed in lines:
        out.append(Polyline(pts[at: at + len(path)], closed))
        at += len(path)
    return out


@dataclass(frozen=True)
class EndRecord:
    puncture: SpherePoint
    ord_dG: int | None
    ord_dF: int | None
    ord_dtau2: int
    completeness_necessary: bool

    def to_json(self) -> dict:
        return {
            "puncture": point_to_json(self.puncture),
            "ord_dG": self.ord_dG,
            "ord_dF": self.ord_dF,
            "ord_dtau2": self.ord_dtau2,
            "completeness_necessary": self.completeness_necessary,
        }


def end_orders(data: WeierstrassData) -> list[EndRecord]:
    """Orders of ``dG``, ``dF`` and ``dtau^2`` at every puncture.

    ``ord_dtau2`` is ``min(ord dF, ord dG)``, the order of the conformal
    factor of ``dtau^2`` counted as a one-form. A complete end needs a pole
    of ``dtau^2``; a simple pole would carry a residue, so single-valued
    data needs ``ord_dtau2 <= -2``.
    """
    out = []
    for p in data.dom.punctures:
        oG = None if data.dG_coef.is_zero else form_order_at(data.dG_coef, p)
        oF = None if data.dF.is_zero else form_order_at(data.dF, p)
        o = min(v for v in (oF, oG) if v is not None)
        out.append(EndRecord(p, oG, oF, o, o <= -2))
    return out


def completeness_necessary(data: WeierstrassData) -> bool:
    return all(r.completeness_necessary for r in end_orders(data))


CLASSES = ("elliptic_paraboloid", "degenerate_line", "generic")


def classify(data: WeierstrassData, tol: float = 1e-9) -> str:
    nu = lagrangian_gauss(data)
    if not nu.is_constant:
        return "generic"
    c = complex(nu.num.coeffs[0]) if not nu.is_zero else 0j
    return "degenerate_line" if abs(abs(c) - 1) <= tol else "elliptic_paraboloid"


def crossing_flags(grid, level: np.ndarray) -> np.ndarray:
    """Mark, for every grid edge where ``level`` changes sign, the endpoint nearer zero."""
    v = level.ravel()
    e = grid.edges()
    a, b = v[e[:, 0]], v[e[:, 1]]
    hit = np.isfinite(a) & np.isfinite(b) & ((a > 0) != (b > 0))
    pick = np.where(np.abs(a) <= np.abs(b), e[:, 0], e[:, 1])[hit]
    out = np.zeros(v.shape, dtype=bool)
    out[pick] = True
    return out.reshape(level.shape)


def mesh(data: WeierstrassData, domain: Domain, resolution: int, guard: float | None = None,
         base: complex | None = None) -> SurfaceMesh:
    """Triangle mesh of the front over a parameter domain.

    Vertices are ``(Re x, Im x, phi)``. Grid nodes within ``guard`` of a
    finite puncture are dropped (default: 2% of the domain diameter). A
    vertex is flagged singular when ``||nu| - 1| <= EPS_SING`` or when it is
    the grid node nearest a crossing of ``|nu| = 1`` on one of its edges.

    Raises
    ------
    NotWellDefined
        If the data fails the period certificate.
    """
    front = AffineFront(data, base)
    grid = make_grid(domain, resolution)
    z = grid.z
    guard = 0.02 * domain.diameter if guard is None else guard
    keep = np.ones(z.shape, dtype=bool)
    for p in data.singular_points():
        if not is_inf(p):
            keep &= np.abs(z - p) > guard
    with np.errstate(all="ignore"):
        x, phi = front.evaluate(z)
        sing = metric_factors(data, z)["singular"] | crossing_flags(grid, _log_abs(lagrangian_gauss(data))(z))
    pos = np.stack([x.real, x.imag, phi], -1)
    pos[~keep] = np.nan
    return build_mesh(grid, keep, pos, sing, {"kind": "affine", "base": [front.base.real, front.base.imag]})


__all__ = [
    "AffineFront",
    "AffinePoint",
    "EndRecord",
    "MetricSample",
    "PeriodCertificate",
    "Polyline",
    "PunctureRecord",
    "WeierstrassData",
    "classify",
    "completeness_necessary",
    "conormal",
    "end_orders",
    "immerse",
    "lagrangian_gauss",
    "mesh",
    "metric_factors",
    "metric_sample",
    "period_check",
    "primitives",
    "singular_curves",
]

"""Flat fronts in hyperbolic 3-space from rational canonical forms.

A flat front is the projection ``f = E E*`` of a holomorphic Legendrian
lift ``E: universal cover -> SL(2, C)`` solving

    E^{-1} dE = [[0, theta], [omega, 0]],   omega = w dz,  theta = t dz.

Points of H^3 are Hermitian matrices ``[[x0 + x3, x1 + i x2], [x1 - i x2, x0 - x3]]``
with determinant 1 and positive trace; the unit normal is ``n = E e3 E*``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contour import contour_radius
from .errors import DegenerateData, PathHitsSingularity, ValidationError
from .mesh import Domain, SurfaceMesh, build_mesh, make_grid
from .ode import integrate_segments, sl2_normalize
from .rational import INF, RationalMap, SpherePoint, form_order_at, is_inf, point_to_json, roots, same_point
from .valdist import PuncturedSphere

EPS_DET = 1e-9
EPS_SING = 1e-6
EPS_GAUSS = 1e-12
GUARD = 1e-6
E21_MASK = 0.1
_E3 = np.diag([1.0, -1.0]).astype(complex)
_DUAL = np.array([[0, 1j], [1j, 0]])


@dataclass(frozen=True)
class CanonicalForms:
    """``omega = w_hat dz`` and ``theta = t_hat dz`` on a punctured sphere."""

    w_hat: RationalMap
    t_hat: RationalMap
    dom: PuncturedSphere = PuncturedSphere()

    def __post_init__(self):
        if self.w_hat.is_zero and self.t_hat.is_zero:
            raise DegenerateData("omega and theta both vanish identically")
        for name, h in (("w_hat", self.w_hat), ("t_hat", self.t_hat)):
            for p in self.poles(h):
                if not self.dom.is_puncture(p):
                    raise ValidationError(f"pole of {name} at {point_to_json(p)} is not a puncture")

    @staticmethod
    def poles(h: RationalMap) -> list:
        out = list(roots(h.den).points) if h.den.degree > 0 else []
        if h.num.degree > h.den.degree:
            out.append(INF)
        return out

    @classmethod
    def make(cls, w_hat: RationalMap, t_hat: RationalMap, punctures=()) -> "CanonicalForms":
        return cls(w_hat, t_hat, PuncturedSphere(tuple(punctures)))

    def finite_singular(self) -> list[complex]:
        pts = [p for p in self.dom.punctures if not is_inf(p)]
        for h in (self.w_hat, self.t_hat):
            pts += [p for p in self.poles(h) if not is_inf(p) and not any(same_point(p, q) for q in pts)]
        return pts

    def coef(self, z):
        """``(t_hat(z), w_hat(z))`` as arrays, the layout used by the integrator."""
        z = np.asarray(z, dtype=complex)
        return np.broadcast_to(self.t_hat(z), z.shape), np.broadcast_to(self.w_hat(z), z.shape)

    def to_json(self) -> dict:
        return {"w_hat": self.w_hat.to_json(), "t_hat": self.t_hat.to_json(), "punctures": self.dom.to_json()}

    @classmethod
    def from_json(cls, obj) -> "CanonicalForms":
        if not isinstance(obj, dict):
            raise ValidationError("forms must be an object")
        try:
            w, t = RationalMap.from_json(obj["w_hat"]), RationalMap.from_json(obj["t_hat"])
        except KeyError as exc:
            raise ValidationError(f"missing field {exc}") from None
        return cls(w, t, PuncturedSphere.from_json(obj.get("punctures", [])))


@dataclass(frozen=True)
class Sl2Frame:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=complex)
        if m.shape != (2, 2):
            raise ValidationError("a frame is a 2x2 matrix")
        object.__setattr__(self, "m", m)

    @classmethod
    def identity(cls) -> "Sl2Frame":
        return cls(np.eye(2, dtype=complex))

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.m))

    def is_sl2(self, tol: float = EPS_DET) -> bool:
        return abs(self.det - 1) <= tol

    def __getitem__(self, ij):
        return self.m[ij]

    def to_json(self) -> list:
        return [[[e.real, e.imag] for e in row] for row in self.m]


def _mat(E) -> np.ndarray:
    return E.m if isinstance(E, Sl2Frame) else np.asarray(E, dtype=complex)


@dataclass(frozen=True)
class HermitianPoint:
    """A vector of Minkowski space R^{1,3} and its Hermitian matrix."""

    x: np.ndarray  # (x0, x1, x2, x3)

    @property
    def matrix(self) -> np.ndarray:
        return to_hermitian(self.x)

    @classmethod
    def from_matrix(cls, X) -> "HermitianPoint":
        return cls(from_hermitian(np.asarray(X)))

    def inner(self, other: "HermitianPoint") -> float:
        return float(minkowski_inner(self.x, other.x))

    def poincare(self) -> np.ndarray:
        return poincare_ball(self.x)


def from_hermitian(X: np.ndarray) -> np.ndarray:
    """Minkowski coordinates of Hermitian matrices ``(..., 2, 2) -> (..., 4)``."""
    x0 = 0.5 * (X[..., 0, 0] + X[..., 1, 1]).real
    x3 = 0.5 * (X[..., 0, 0] - X[..., 1, 1]).real
    return np.stack([x0, X[..., 0, 1].real, X[..., 0, 1].imag, x3], -1)


def to_hermitian(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    X = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    X[..., 0, 0] = x[..., 0] + x[..., 3]
    X[..., 1, 1] = x[..., 0] - x[..., 3]
    X[..., 0, 1] = x[..., 1] + 1j * x[..., 2]
    X[..., 1, 0] = x[..., 1] - 1j * x[..., 2]
    return X


def minkowski_inner(a, b) -> np.ndarray:
    """``-a0 b0 + a1 b1 + a2 b2 + a3 b3`` over the last axis."""
    a, b = np.asarray(a), np.asarray(b)
    return -a[..., 0] * b[..., 0] + np.sum(a[..., 1:] * b[..., 1:], axis=-1)


def poincare_ball(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x)
    return x[..., 1:] / (1 + x[..., :1])


def front_coords(E: np.ndarray) -> np.ndarray:
    """Minkowski coordinates of ``E E*`` for frames of shape ``(..., 2, 2)``."""
    return from_hermitian(E @ np.conj(np.swapaxes(E, -1, -2)))


def normal_coords(E: np.ndarray) -> np.ndarray:
    return from_hermitian(E @ _E3 @ np.conj(np.swapaxes(E, -1, -2)))


def front_point(E) -> HermitianPoint:
    return HermitianPoint(front_coords(_mat(E)))


def normal(E) -> HermitianPoint:
    return HermitianPoint(normal_coords(_mat(E)))


def parallel(f, n, t: float):
    """Parallel front at signed distance ``t``: ``(cosh t f + sinh t n, cosh t n + sinh t f)``."""
    if isinstance(f, HermitianPoint):
        ft, nt = parallel(f.x, n.x, t)
        return HermitianPoint(ft), HermitianPoint(nt)
    f, n = np.asarray(f), np.asarray(n)
    c, s = np.cosh(t), np.sinh(t)
    return c * f + s * n, c * n + s * f


def _ratio(a: complex, b: complex) -> SpherePoint:
    return INF if abs(b) <= EPS_GAUSS else a / b


def hyperbolic_gauss(E) -> tuple[SpherePoint, SpherePoint]:
    """``(G, G*) = (E11/E21, E12/E22)``, infinite when a denominator is below 1e-12."""
    m = _mat(E)
    return _ratio(m[0, 0], m[1, 0]), _ratio(m[0, 1], m[1, 1])


def dual(E) -> Sl2Frame:
    return Sl2Frame(_mat(E) @ _DUAL)


def u1_gauge(E, s: float) -> Sl2Frame:
    return Sl2Frame(_mat(E) @ np.diag([np.exp(0.5j * s), np.exp(-0.5j * s)]))


def hopf(forms: CanonicalForms) -> RationalMap:
    """Coefficient of ``Q = omega theta`` in ``dz^2``."""
    return forms.w_hat * forms.t_hat


def rho(forms: CanonicalForms) -> RationalMap:
    """``rho = theta/omega``.

    Raises
    ------
    DegenerateData
        If ``omega`` vanishes identically.
    """
    if forms.w_hat.is_zero:
        raise DegenerateData("omega vanishes identically, rho is undefined")
    return forms.t_hat / forms.w_hat


# --- lift integration ---------------------------------------------------


def _check_path(forms: CanonicalForms, a: np.ndarray, b: np.ndarray, guard: float = GUARD) -> None:
    for p in forms.finite_singular():
        ab = b - a
        t = np.clip(((p - a) * np.conj(ab)).real / np.maximum(np.abs(ab) ** 2, 1e-300), 0, 1)
        d = np.abs(a + t * ab - p)
        if np.any(d <= guard):
            raise PathHitsSingularity(f"path passes within {guard:g} of the singular point {point_to_json(p)}")


def integrate_lift(forms: CanonicalForms, path, E0=None) -> Sl2Frame:
    """Lift along a polyline, starting from ``E0`` (identity by default).

    Raises
    ------
    PathHitsSingularity
        If the polyline passes within the guard distance of a pole or puncture.
    ToleranceNotMet
        If the adaptive integrator cannot reach its tolerance.
    """
    E = np.eye(2, dtype=complex) if E0 is None else _mat(E0).copy()
    pts = np.asarray(list(path), dtype=complex)
    if len(pts) >= 2:
        _check_path(forms, pts[:-1], pts[1:])
    for a, b in zip(pts[:-1], pts[1:]):
        E = integrate_segments(forms.coef, E[None], np.array([a]), np.array([b]))[0]
    return Sl2Frame(E)


def _loop(forms: CanonicalForms, p: SpherePoint, n: int = 256) -> np.ndarray:
    """A positively oriented polygon around ``p`` separating it from other singular points."""
    others = [q for q in forms.finite_singular() if is_inf(p) or not same_point(p, q)]
    if is_inf(p):
        R = 2 * max([abs(q) for q in others] + [0.5])
        return R * np.exp(-2j * np.pi * np.arange(n + 1) / n)  # clockwise in z
    others += [INF] if not is_inf(p) else []
    r = contour_radius(p, [q for q in others if not is_inf(q)])
    return p + r * np.exp(2j * np.pi * np.arange(n + 1) / n)


def monodromy(forms: CanonicalForms, puncture: SpherePoint, E0=None) -> Sl2Frame:
    """``E0^{-1} E(after one positive loop)`` around a single puncture.

    Raises
    ------
    ContourTooClose
        If no loop separates the puncture from the other singular points.
    """
    loop = _loop(forms, puncture)
    start = np.eye(2, dtype=complex) if E0 is None else _mat(E0)
    E = integrate_lift(forms, loop, start).m
    return Sl2Frame(np.linalg.solve(start, E))


# --- Schwarzian identity -------------------------------------------------


def schwarzian_omega(w_hat: RationalMap) -> RationalMap:
    """Schwarzian derivative of a primitive of ``w dz``: ``(w'/w)' - (w'/w)^2 / 2``."""
    L = w_hat.derivative() / w_hat
    return L.derivative() - L * L * RationalMap.const(0.5)


def _tree_lifts(forms: CanonicalForms, grid, keep: np.ndarray, root: int, E_root=None) -> np.ndarray:
    """Frames at every grid node reachable from ``root`` through kept nodes.

    A breadth-first spanning tree is built over grid edges; each BFS layer
    is integrated as one batch. Unreached nodes get NaN frames.
    """
    z = grid.z.ravel()
    keep = keep.ravel()
    N = len(z)
    edges = grid.edges()
    edges = edges[keep[edges[:, 0]] & keep[edges[:, 1]]]
    adj = [[] for _ in range(N)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    frames = np.full((N, 2, 2), np.nan, dtype=complex)
    frames[root] = np.eye(2) if E_root is None else _mat(E_root)
    seen = np.zeros(N, dtype=bool)
    seen[root] = True
    layer = [root]
    while layer:
        parents, children = [], []
        for u in layer:
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    parents.append(u)
                    children.append(v)
        if not children:
            break
        parents, children = np.array(parents), np.array(children)
        _check_path(forms, z[parents], z[children])
        frames[children] = integrate_segments(forms.coef, frames[parents], z[parents], z[children])
        layer = list(children)
    return frames


@dataclass(frozen=True)
class SchwarzianResult:
    residual: float
    status: str  # "ok" | "skipped"
    points: int
    h: float

    def to_json(self) -> dict:
        r = self.residual if self.status == "ok" else None
        return {"residual": r, "status": self.status, "points": self.points, "h": self.h}


def _window_grid(window, n):
    if isinstance(window, Domain):
        if window.kind == "rect":
            rect = Domain("rect", x=window.x, y=window.y)
            inside = None
        else:
            c, R = window.center, window.r_max
            rect = Domain("rect", x=(c.real - R, c.real + R), y=(c.imag - R, c.imag + R))
            inside = lambda z: (np.abs(z - c) <= R * (1 + 1e-12)) & (np.abs(z - c) >= window.r_min)  # noqa: E731
    else:
        x0, x1, y0, y1 = window
        rect, inside = Domain("rect", x=(x0, x1), y=(y0, y1)), None
    grid = make_grid(rect, n)
    mask = np.ones(grid.z.shape, bool) if inside is None else inside(grid.z)
    return grid, mask


def schwarzian_check(forms: CanonicalForms, window, n: int = 41, h: float = 1e-3) -> SchwarzianResult:
    """Max of ``|s(omega) - S(G) - 2Q|`` over an ``n x n`` grid.

    ``s(omega)`` is exact; ``S(G)`` uses 5-point central differences of
    ``G = E11/E21`` with step ``h``, where the stencil frames are integrated
    from the grid frame over segments of length at most ``2h``. The
    differences are taken of ``M(G)``, with ``M`` the Moebius map of
    ``E(z_c)^{-1}``; this leaves ``S(G)`` unchanged and keeps the stencil
    away from poles of ``G``. Points with ``|E21| <= 0.1`` are skipped. The check is skipped
    when ``omega`` vanishes identically, since ``G`` is then constant.
    """
    if forms.w_hat.is_zero:
        return SchwarzianResult(0.0, "skipped", 0, h)
    grid, inside = _window_grid(window, n)
    z = grid.z.ravel()
    sing = forms.finite_singular()
    keep = np.ones(z.shape, bool)
    for p in sing:
        keep &= np.abs(z - p) > 4 * h + GUARD
    root = int(np.argmax(keep & inside.ravel())) if np.any(keep & inside.ravel()) else int(np.argmax(keep))
    frames = _tree_lifts(forms, grid, keep, root)
    ok = keep & inside.ravel() & np.isfinite(frames[:, 0, 0]) & (np.abs(frames[:, 1, 0]) > E21_MASK)
    idx = np.nonzero(ok)[0]
    if len(idx) == 0:
        return SchwarzianResult(float("nan"), "skipped", 0, h)
    offsets = np.array([-2, -1, 1, 2]) * h
    zc = np.repeat(z[idx], 4)
    zt = zc + np.tile(offsets, len(idx))
    _check_path(forms, zc, zt)
    Es = integrate_segments(forms.coef, np.repeat(frames[idx], 4, axis=0), zc, zt).reshape(len(idx), 4, 2, 2)
    # S is invariant under Moebius maps, so G = E11/E21 is replaced by its image
    # under E(z_c)^{-1}; that image vanishes at z_c and has no pole near the stencil
    Ec_inv = np.linalg.inv(frames[idx])
    cols = np.einsum("pij,pkj->pki", Ec_inv, Es[..., :, 0])
    g = np.zeros((len(idx), 5), dtype=complex)
    g[:, [0, 1, 3, 4]] = cols[..., 1] / cols[..., 0]
    gm2, gm1, g0, g1, g2 = g.T
    d1 = (-g2 + 8 * g1 - 8 * gm1 + gm2) / (12 * h)
    d2 = (-g2 + 16 * g1 - 30 * g0 + 16 * gm1 - gm2) / (12 * h**2)
    d3 = (g2 - 2 * g1 + 2 * gm1 - gm2) / (2 * h**3)
    SG = d3 / d1 - 1.5 * (d2 / d1) ** 2
    s_omega = schwarzian_omega(forms.w_hat)(z[idx])
    Q = hopf(forms)(z[idx])
    res = np.abs(s_omega - SG - 2 * Q)
    return SchwarzianResult(float(np.max(res)), "ok", int(len(idx)), h)


# --- classification and ends ----------------------------------------------

RHO_CLASSES = ("horosphere", "hyperbolic_cylinder_candidate", "generic")


def classify_rho(forms: CanonicalForms) -> str:
    """Horosphere when ``Q = 0``; candidate cylinder when ``rho`` is a nonzero constant."""
    if forms.w_hat.is_zero or forms.t_hat.is_zero:
        return "horosphere"
    r = rho(forms)
    return "hyperbolic_cylinder_candidate" if r.is_constant else "generic"


@dataclass(frozen=True)
class WcfEndRecord:
    puncture: SpherePoint
    mu: int | None  # order of omega; None when omega = 0
    mu_star: int | None
    ordQ: int | None  # None when Q = 0
    regular: bool
    weakly_complete_necessary: bool

    def to_json(self) -> dict:
        return {
            "puncture": point_to_json(self.puncture),
            "mu": self.mu,
            "mu_star": self.mu_star,
            "ordQ": self.ordQ,
            "regular": self.regular,
            "weakly_complete_necessary": self.weakly_complete_necessary,
        }


def wcf_end_orders(forms: CanonicalForms) -> list[WcfEndRecord]:
    """Orders ``mu = ord omega``, ``mu* = ord theta`` and ``ord Q = mu + mu*`` at each puncture.

    An end is regular when ``ord Q >= -2`` (or ``Q = 0``). ``ds^2_{1,1}``
    can only be complete at the end when ``min(mu, mu*) <= -1``.
    """
    out = []
    for p in forms.dom.punctures:
        mu = None if forms.w_hat.is_zero else form_order_at(forms.w_hat, p)
        ms = None if forms.t_hat.is_zero else form_order_at(forms.t_hat, p)
        q = None if mu is None or ms is None else mu + ms
        low = min(v for v in (mu, ms) if v is not None)
        out.append(WcfEndRecord(p, mu, ms, q, q is None or q >= -2, low <= -1))
    return out


# --- meshes -----------------------------------------------------------


def _crossing_flags(grid, level: np.ndarray) -> np.ndarray:
    from .affine_front import crossing_flags

    return crossing_flags(grid, level)


def mesh_h3(forms: CanonicalForms, domain: Domain, resolution: int, t: float = 0.0, base: complex | None = None,
            guard: float | None = None) -> SurfaceMesh:
    """Mesh of the parallel front ``f_t`` in Poincare-ball coordinates.

    Lifts are integrated along a breadth-first spanning tree of grid edges
    from the node nearest ``base`` (default: the domain centre), where the
    frame is the identity. Polar grids around a hole containing a singular
    point do not wrap in angle, so the mesh is a fundamental domain and any
    monodromy shows up only in the report. Vertex singular flags mark
    ``||rho| - 1| <= EPS_SING`` and the node nearest each crossing of
    ``|rho| = 1`` along a grid edge.

    Raises
    ------
    PathHitsSingularity
        If a tree edge passes a singular point.
    """
    sing = forms.finite_singular()
    wrap = None
    if domain.kind == "annulus" and any(domain.encloses(p) for p in sing):
        wrap = False
    grid = make_grid(domain, resolution, wrap)
    z = grid.z
    guard = 0.02 * domain.diameter if guard is None else guard
    keep = np.ones(z.shape, bool)
    for p in sing:
        keep &= np.abs(z - p) > guard
    if not keep.any():
        raise ValidationError("every grid node lies within the guard radius of a singular point")
    target = (domain.center if domain.kind != "rect" else complex(np.mean(domain.x), np.mean(domain.y))) if base is None else base
    flat = z.ravel()
    cand = np.where(keep.ravel(), np.abs(flat - target), np.inf)
    root = int(np.argmin(cand))
    frames = _tree_lifts(forms, grid, keep, root)
    reached = np.isfinite(frames[:, 0, 0])
    fr = np.where(reached[:, None, None], frames, np.eye(2))
    f0, n0 = front_coords(fr), normal_coords(fr)
    ft, nt = parallel(f0, n0, t)
    pos = poincare_ball(ft)
    pos[~reached] = np.nan
    with np.errstate(all="ignore"):
        if forms.w_hat.is_zero:
            level = np.full(z.shape, np.inf)
        else:
            r = rho(forms)
            level = np.log(np.abs(r.num(z))) - np.log(np.abs(r.den(z)))
        sing_flag = (np.abs(np.exp(level) - 1) <= EPS_SING) | _crossing_flags(grid, np.clip(np.nan_to_num(level, nan=0.0), -1e3, 1e3))
    m = build_mesh(grid, keep & reached.reshape(z.shape), pos.reshape(z.shape + (3,)), sing_flag, {"kind": "h3", "t": float(t), "root": [complex(flat[root]).real, complex(flat[root]).imag]})
    kept = (keep.ravel() & reached)
    m.extras.update(frames=frames[kept], minkowski=ft[kept], normal=nt[kept], minkowski0=f0[kept], normal0=n0[kept])
    return m


__all__ = [
    "CanonicalForms",
    "HermitianPoint",
    "SchwarzianResult",
    "Sl2Frame",
    "WcfEndRecord",
    "classify_rho",
    "dual",
    "front_point",
    "hopf",
    "hyperbolic_gauss",
    "integrate_lift",
    "mesh_h3",
    "minkowski_inner",
    "monodromy",
    "normal",
    "parallel",
    "poincare_ball",
    "rho",
    "schwarzian_check",
    "sl2_normalize",
    "u1_gauge",
    "wcf_end_orders",
]

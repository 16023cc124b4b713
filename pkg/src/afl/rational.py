"""Complex polynomials and rational maps on the Riemann sphere.

Values are floating point but the *shape* of every object is exact: degrees,
root multiplicities and orders at infinity are integers, and the point at
infinity is a tagged value (:data:`INF`) handled by explicit Moebius
substitution rather than by large numbers.

Polynomial coefficients are stored in ascending order of degree.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence, Union

import numpy as np
from scipy.cluster.hierarchy import linkage, to_tree

from .errors import NonConvergence, ValidationError, ValueMismatch

EPS_ROOT = 1e-11
EPS_CLUSTER = 1e-8
EPS_MATCH = 1e-7
MAX_DEGREE = 32
MAX_COEFF = 1e8

_U = np.finfo(float).eps
_TINY = np.finfo(float).smallest_normal

# Taylor coefficients below _KAPPA * u * (their rounding scale) count as zero
# when deciding whether a root cluster is a genuine multiple root.
_KAPPA = 1e3
_TRIM = 1e-13


def _flush(a: complex) -> complex:
    # subnormal parts carry no relative precision; treat them as zero
    re, im = a.real, a.imag
    return complex(re if abs(re) >= _TINY else 0.0, im if abs(im) >= _TINY else 0.0)


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
SpherePoint = Union[complex, _Infinity]


def is_inf(z) -> bool:
    return z is INF


def chordal(a: SpherePoint, b: SpherePoint) -> float:
    """Half the chordal distance between two sphere points.

    ``|a - b| / (sqrt(1+|a|^2) sqrt(1+|b|^2))`` with the usual conventions
    at infinity; bounded by 1.
    """
    if is_inf(a) and is_inf(b):
        return 0.0
    if is_inf(a):
        return 1.0 / math.sqrt(1.0 + abs(b) ** 2)
    if is_inf(b):
        return 1.0 / math.sqrt(1.0 + abs(a) ** 2)
    return abs(a - b) / (math.sqrt(1.0 + abs(a) ** 2) * math.sqrt(1.0 + abs(b) ** 2))


def same_point(a: SpherePoint, b: SpherePoint, tol: float = EPS_MATCH) -> bool:
    return chordal(a, b) <= tol


def point_to_json(z: SpherePoint):
    if is_inf(z):
        return "inf"
    z = complex(z)
    return [z.real, z.imag]


def point_from_json(obj) -> SpherePoint:
    if isinstance(obj, str):
        if obj.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        raise ValidationError(f"unknown sphere point {obj!r}")
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        return complex(obj)
    if isinstance(obj, (list, tuple)) and len(obj) == 2:
        try:
            z = complex(float(obj[0]), float(obj[1]))
        except (TypeError, ValueError) as exc:
            raise ValidationError(f"bad sphere point {obj!r}") from exc
        if not (math.isfinite(z.real) and math.isfinite(z.imag)):
            raise ValidationError(f"non-finite sphere point {obj!r}")
        return z
    raise ValidationError(f"bad sphere point {obj!r}")


# --------------------------------------------------------------------------
# Polynomials
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple = ()

    def __post_init__(self):
        c = [_flush(complex(a)) for a in self.coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: complex = 1.0) -> "Polynomial":
        c = np.array([lead], dtype=complex)
        for r in roots:
            c = np.convolve(c, [-r, 1.0])
        return cls(tuple(c))

    @classmethod
    def monomial(cls, n: int, coeff: complex = 1.0) -> "Polynomial":
        return cls((0,) * n + (coeff,))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lead(self) -> complex:
        return self.coeffs[-1] if self.coeffs else 0j

    def array(self) -> np.ndarray:
        return np.array(self.coeffs, dtype=complex)

    def __call__(self, z):
        if not self.coeffs:
            return np.zeros_like(np.asarray(z, dtype=complex)) if np.ndim(z) else 0j
        acc = self.coeffs[-1] * np.ones_like(np.asarray(z, dtype=complex)) if np.ndim(z) else self.coeffs[-1]
        for a in reversed(self.coeffs[:-1]):
            acc = acc * z + a
        return acc

    def abs_eval(self, r: float) -> float:
        """Evaluate the polynomial with coefficients ``|a_k|`` at ``r >= 0``."""
        return float(sum(abs(a) * r**k for k, a in enumerate(self.coeffs)))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n, dtype=complex)
        a[: len(self.coeffs)] += self.coeffs
        a[: len(other.coeffs)] += other.coeffs
        return Polynomial(tuple(a))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-a for a in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if self.is_zero or other.is_zero:
                return Polynomial()
            return Polynomial(tuple(np.convolve(self.array(), other.array())))
        return Polynomial(tuple(a * other for a in self.coeffs))

    __rmul__ = __mul__

    def derivative(self) -> "Polynomial":
        return Polynomial(tuple(k * a for k, a in enumerate(self.coeffs) if k))

    def trim(self, rel: float = _TRIM) -> "Polynomial":
        """Drop leading coefficients that are rounding noise relative to the rest."""
        c = list(self.coeffs)
        if not c:
            return self
        scale = max(abs(a) for a in c)
        while c and abs(c[-1]) <= rel * scale:
            c.pop()
        return Polynomial(tuple(c))

    def reversed(self, n: int | None = None) -> "Polynomial":
        """Coefficients of ``z**n * p(1/z)`` (``n`` defaults to the degree)."""
        n = self.degree if n is None else n
        c = list(self.coeffs) + [0] * (n + 1 - len(self.coeffs))
        return Polynomial(tuple(reversed(c)))

    def taylor(self, c: complex) -> np.ndarray:
        """Taylor coefficients ``t_j`` with ``p(z) = sum t_j (z - c)**j``."""
        a = self.array().copy()
        n = len(a)
        for i in range(n - 1):
            for k in range(n - 2, i - 1, -1):
                a[k] += c * a[k + 1]
        return a

    def divide_linear(self, c: complex, times: int = 1) -> "Polynomial":
        """Quotient of ``p`` by ``(z - c)**times``, remainder discarded."""
        a = list(self.coeffs)
        for _ in range(times):
            if len(a) <= 1:
                return Polynomial()
            q = [0j] * (len(a) - 1)
            acc = a[-1]
            q[-1] = acc
            for k in range(len(a) - 2, 0, -1):
                acc = a[k] + c * acc
                q[k - 1] = acc
            a = q
        return Polynomial(tuple(a))

    def divmod(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        d = other.degree
        if len(r) - 1 < d:
            return Polynomial(), self
        q = [0j] * (len(r) - d)
        for k in range(len(r) - 1, d - 1, -1):
            f = r[k] / other.lead
            q[k - d] = f
            for j in range(d + 1):
                r[k - d + j] -= f * other.coeffs[j]
        return Polynomial(tuple(q)), Polynomial(tuple(r[:d])).trim()

    def to_json(self) -> list:
        return [[a.real, a.imag] for a in self.coeffs]

    @classmethod
    def from_json(cls, obj) -> "Polynomial":
        if not isinstance(obj, (list, tuple)):
            raise ValidationError(f"polynomial must be a list, got {type(obj).__name__}")
        coeffs = []
        for item in obj:
            if isinstance(item, (int, float)) and not isinstance(item, bool):
                coeffs.append(complex(item))
            elif isinstance(item, (list, tuple)) and len(item) == 2:
                try:
                    coeffs.append(complex(float(item[0]), float(item[1])))
                except (TypeError, ValueError) as exc:
                    raise ValidationError(f"bad coefficient {item!r}") from exc
            else:
                raise ValidationError(f"bad coefficient {item!r}")
        p = cls(tuple(coeffs))
        check_limits(p)
        return p

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"


def check_limits(p: Polynomial) -> None:
    """Enforce the degree and coefficient caps applied to parsed input."""
    if p.degree > MAX_DEGREE:
        raise ValidationError(f"degree {p.degree} exceeds cap {MAX_DEGREE}")
    for a in p.coeffs:
        if not (math.isfinite(a.real) and math.isfinite(a.imag)):
            raise ValidationError("non-finite coefficient")
        if abs(a) > MAX_COEFF:
            raise ValidationError(f"coefficient {a} exceeds magnitude cap {MAX_COEFF:g}")


# --------------------------------------------------------------------------
# Divisors
# --------------------------------------------------------------------------


def _near(a: SpherePoint, b: SpherePoint, tol: float = EPS_CLUSTER) -> bool:
    if is_inf(a) or is_inf(b):
        return is_inf(a) and is_inf(b)
    return abs(a - b) <= tol * (1.0 + abs(a))


@dataclass(frozen=True)
class Divisor:
    """Finite formal sum of sphere points with integer multiplicities."""

    entries: tuple = field(default=())

    def __post_init__(self):
        merged: list[list] = []
        for pt, m in self.entries:
            pt = pt if is_inf(pt) else complex(pt)
            for e in merged:
                if _near(e[0], pt):
                    e[1] += int(m)
                    break
            else:
                merged.append([pt, int(m)])
        object.__setattr__(self, "entries", tuple((p, m) for p, m in merged if m != 0))

    def __iter__(self) -> Iterator[tuple]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __add__(self, other: "Divisor") -> "Divisor":
        return Divisor(self.entries + other.entries)

    def __neg__(self) -> "Divisor":
        return Divisor(tuple((p, -m) for p, m in self.entries))

    @property
    def degree(self) -> int:
        return sum(m for _, m in self.entries)

    @property
    def points(self) -> list:
        return [p for p, _ in self.entries]

    def mult(self, point: SpherePoint, tol: float = EPS_MATCH) -> int:
        """Multiplicity at ``point`` (0 when absent), matched in chordal distance."""
        return sum(m for p, m in self.entries if same_point(p, point, tol))

    def to_json(self) -> list:
        return [[point_to_json(p), m] for p, m in self.entries]


# --------------------------------------------------------------------------
# Roots
# --------------------------------------------------------------------------


def _aberth(a: np.ndarray, max_iter: int = 3000) -> tuple[np.ndarray, bool]:
    """Aberth-Ehrlich simultaneous iteration; ``a`` ascending, ``a[0] != 0``."""
    n = len(a) - 1
    p = Polynomial(tuple(a))
    dp = p.derivative()
    absc = np.abs(a)
    radius = abs(a[0] / a[-1]) ** (1.0 / n)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    active = np.ones(n, dtype=bool)
    for _ in range(max_iter):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            return z, True
        za = z[idx]
        pz = p(za)
        noise = 8 * _U * np.polyval(absc[::-1], np.abs(za))
        done = np.abs(pz) <= noise
        active[idx[done]] = False
        idx, za, pz = idx[~done], za[~done], pz[~done]
        if idx.size == 0:
            return z, True
        dpz = dp(za)
        dpz = np.where(dpz == 0, 1e-300, dpz)
        ratio = pz / dpz
        diff = za[:, None] - z[None, :]
        diff[np.arange(idx.size), idx] = np.inf
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(diff == 0, 0, 1.0 / diff)
        s = inv.sum(axis=1)
        w = ratio / (1.0 - ratio * s)
        w = np.where(np.isfinite(w), w, ratio)
        z[idx] = za - w
    return z, not active.any()


def _taylor_scales(p: Polynomial, c: complex) -> np.ndarray:
    """Rounding scale of each Taylor coefficient of ``p`` at ``c``."""
    absp = Polynomial(tuple(abs(a) for a in p.coeffs))
    return np.abs(absp.taylor(abs(c)))


def _multiple_root(p: Polynomial, pts: np.ndarray, others: np.ndarray = np.empty(0)) -> complex | None:
    """Refined centre if ``pts`` approximate one ``len(pts)``-fold root, else None.

    The centroid is polished by Newton's method on the ``(m-1)``-th
    derivative, which has a simple root there; the polished centre must stay
    inside the cluster and be nearer to every cluster point than to any of
    the ``others``.
    """
    m = len(pts)
    c0 = c = complex(np.mean(pts))
    spread = float(np.max(np.abs(pts - c0)))
    for _ in range(20):
        t = p.taylor(c)
        if t[m] == 0:
            break
        step = t[m - 1] / (m * t[m])
        c = c - step
        if abs(step) <= 4 * _U * (1 + abs(c)):
            break
    if abs(c - c0) > spread + 1e-12 * (1 + abs(c0)):
        return None
    if others.size and np.max(np.abs(pts - c)) >= np.min(np.abs(others - c)):
        return None
    t = p.taylor(c)
    s = _taylor_scales(p, c)
    if all(abs(t[j]) <= _KAPPA * _U * max(s[j], 1e-300) for j in range(m)):
        return c
    return None


def _cluster(p: Polynomial, z: np.ndarray) -> list[tuple[complex, int]]:
    if z.size == 1:
        return [(complex(z[0]), 1)]
    tree = to_tree(linkage(np.column_stack([z.real, z.imag]), method="single"))
    out: list[tuple[complex, int]] = []

    def visit(node):
        ids = node.pre_order()
        if len(ids) == 1:
            out.append((complex(z[ids[0]]), 1))
            return
        c = _multiple_root(p, z[ids], np.delete(z, ids))
        if c is not None:
            out.append((c, len(ids)))
        else:
            visit(node.get_left())
            visit(node.get_right())

    visit(tree)
    return out


def _consistent(p: Polynomial, clusters) -> bool:
    """Residual and backward-error check of a clustered root set."""
    for c, _ in clusters:
        if abs(p(c)) > EPS_ROOT * max(p.abs_eval(abs(c)), 1e-300):
            return False
    rebuilt = Polynomial.from_roots([c for c, m in clusters for _ in range(m)], p.lead)
    scale = max(abs(a) for a in p.coeffs)
    err = max(abs(a - b) for a, b in zip(p.coeffs, rebuilt.coeffs))
    return err <= 1e-6 * scale


def roots(p: Polynomial) -> Divisor:
    """All complex roots of ``p`` with multiplicities.

    Aberth-Ehrlich iteration, falling back to companion-matrix eigenvalues.
    Roots are then grouped single-linkage and a group of size ``m`` with
    centroid ``c`` is accepted as an ``m``-fold root when the first ``m``
    Taylor coefficients of ``p`` at ``c`` are at rounding level; otherwise
    the group is split. Exact zero roots are factored out first.

    Raises
    ------
    NonConvergence
        If neither solver produces roots with relative residual below
        ``EPS_ROOT``.
    """
    if p.is_zero:
        raise ValueError("roots of the zero polynomial")
    c = list(p.coeffs)
    k = 0
    while c[k] == 0:
        k += 1
    entries: list = [(0j, k)] if k else []
    q = Polynomial(tuple(c[k:]))
    n = q.degree
    if n == 1:
        entries.append((-q.coeffs[0] / q.coeffs[1], 1))
    elif n > 1:
        z, ok = _aberth(q.array())
        clusters = _cluster(q, z) if ok and np.all(np.isfinite(z)) else None
        if clusters is None or not _consistent(q, clusters):
            z = np.roots(q.array()[::-1]).astype(complex)
            if z.size != n or not np.all(np.isfinite(z)):
                raise NonConvergence(f"root finding overflowed for {q!r}")
            clusters = _cluster(q, z)
            if not _consistent(q, clusters):
                raise NonConvergence(f"root finding failed for {q!r}")
        entries.extend(clusters)
    return Divisor(tuple(entries))


# --------------------------------------------------------------------------
# Rational maps
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RationalMap:
    """Quotient ``num/den``; build through :func:`reduce` for the reduced form."""

    num: Polynomial
    den: Polynomial = Polynomial((1,))

    def __post_init__(self):
        if self.den.is_zero:
            raise ZeroDivisionError("zero denominator")

    @classmethod
    def const(cls, c: complex) -> "RationalMap":
        return cls(Polynomial((c,)), Polynomial((1,)))

    @classmethod
    def identity(cls) -> "RationalMap":
        return cls(Polynomial((0, 1)), Polynomial((1,)))

    @classmethod
    def from_coeffs(cls, num: Sequence[complex], den: Sequence[complex] = (1,)) -> "RationalMap":
        return reduce(Polynomial(tuple(num)), Polynomial(tuple(den)))

    @property
    def degree(self) -> int:
        return degree(self)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_constant(self) -> bool:
        return degree(self) == 0

    def __call__(self, z):
        """Vectorized evaluation at finite points (``inf`` at poles)."""
        num = self.num(z)
        den = self.den(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(den == 0, complex(np.inf, 0), num / np.where(den == 0, 1, den))
        return complex(out) if np.ndim(out) == 0 else out

    def __mul__(self, other) -> "RationalMap":
        if isinstance(other, RationalMap):
            return reduce(self.num * other.num, self.den * other.den)
        return reduce(self.num * other, self.den)

    __rmul__ = __mul__

    def __truediv__(self, other: "RationalMap") -> "RationalMap":
        if other.is_zero:
            raise ZeroDivisionError("division by the zero map")
        return reduce(self.num * other.den, self.den * other.num)

    def __add__(self, other: "RationalMap") -> "RationalMap":
        return reduce((self.num * other.den + other.num * self.den).trim(), self.den * other.den)

    def __neg__(self) -> "RationalMap":
        return RationalMap(-self.num, self.den)

    def __sub__(self, other: "RationalMap") -> "RationalMap":
        return self + (-other)

    def derivative(self) -> "RationalMap":
        return derivative(self)

    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, obj) -> "RationalMap":
        if isinstance(obj, (int, float)) and not isinstance(obj, bool):
            obj = [obj]
        if isinstance(obj, list):
            num, den = Polynomial.from_json(obj), Polynomial((1,))
        elif isinstance(obj, dict) and "num" in obj:
            num = Polynomial.from_json(obj["num"])
            den = Polynomial.from_json(obj.get("den", [[1, 0]]))
        else:
            raise ValidationError(f"bad rational map {obj!r}")
        if den.is_zero:
            raise ValidationError("zero denominator")
        return reduce(num, den)

    def __repr__(self) -> str:
        return f"RationalMap(num={list(self.num.coeffs)}, den={list(self.den.coeffs)})"


def reduce(num: Polynomial, den: Polynomial) -> RationalMap:
    """Cancel common roots of ``num`` and ``den`` and make ``den`` monic."""
    if den.is_zero:
        raise ZeroDivisionError("zero denominator")
    if num.is_zero:
        return RationalMap(Polynomial(), Polynomial((1,)))
    if num.degree > 0 and den.degree > 0:
        rn, rd = roots(num), roots(den)
        for a, k in rd:
            for b, l in rn:
                if _near(a, b):
                    common = min(k, l)
                    c = (a + b) / 2
                    num = num.divide_linear(c, common)
                    den = den.divide_linear(c, common)
                    break
    lead = den.lead
    return RationalMap(num * (1 / lead), den * (1 / lead))


def degree(r: RationalMap) -> int:
    if r.num.is_zero:
        return 0
    return max(r.num.degree, r.den.degree)


def derivative(r: RationalMap) -> RationalMap:
    w = (r.num.derivative() * r.den - r.num * r.den.derivative()).trim()
    return reduce(w, r.den * r.den)


def wronskian(r: RationalMap) -> Polynomial:
    """Numerator ``num' den - num den'`` of the derivative, unreduced."""
    return (r.num.derivative() * r.den - r.num * r.den.derivative()).trim()


def at_infinity(r: RationalMap) -> RationalMap:
    """The map ``w -> r(1/w)``, exact by coefficient reversal."""
    dn, dd = r.num.degree, r.den.degree
    if r.num.is_zero:
        return r
    num = r.num.reversed() * Polynomial.monomial(max(0, dd - dn))
    den = r.den.reversed() * Polynomial.monomial(max(0, dn - dd))
    lead = den.lead
    return RationalMap(num * (1 / lead), den * (1 / lead))


def form_at_infinity(h: RationalMap) -> RationalMap:
    """Coefficient of ``h(z) dz`` in the chart ``w = 1/z``: ``-h(1/w)/w**2``."""
    g = at_infinity(h)
    return RationalMap(-g.num, g.den * Polynomial.monomial(2))


def reciprocal(r: RationalMap) -> RationalMap:
    if r.is_zero:
        raise ZeroDivisionError("reciprocal of the zero map")
    lead = r.num.lead
    return RationalMap(r.den * (1 / lead), r.num * (1 / lead))


def evaluate(r: RationalMap, z: SpherePoint) -> SpherePoint:
    """Value of ``r`` at a sphere point."""
    if is_inf(z):
        dn, dd = r.num.degree, r.den.degree
        if r.num.is_zero or dn < dd:
            return 0j
        if dn > dd:
            return INF
        return r.num.lead / r.den.lead
    den = r.den(z)
    if den == 0:
        return INF
    return r.num(z) / den


def order_at(r: RationalMap, z: SpherePoint) -> int:
    """Zero order (positive) or pole order (negative) of a function at ``z``."""
    if r.is_zero:
        raise ValueError("order of the zero map")
    if is_inf(z):
        return r.den.degree - r.num.degree
    zeros = roots(r.num).mult(z, EPS_CLUSTER) if r.num.degree > 0 else 0
    poles = roots(r.den).mult(z, EPS_CLUSTER) if r.den.degree > 0 else 0
    return zeros - poles


def form_order_at(h: RationalMap, z: SpherePoint) -> int:
    """Order of the one-form ``h(z) dz`` at a sphere point."""
    if is_inf(z):
        if h.is_zero:
            raise ValueError("order of the zero form")
        return h.den.degree - h.num.degree - 2
    return order_at(h, z)


def _finite_preimages(r: RationalMap, a: SpherePoint) -> tuple[Divisor, int]:
    """Finite preimages of ``a`` and the degree of the polynomial solved."""
    if is_inf(a):
        h = r.den
    else:
        h = (r.num - r.den * a).trim(EPS_ROOT)
    if h.is_zero:
        raise ValueError("map is constant at the requested value")
    if h.degree <= 0:
        return Divisor(), max(h.degree, 0)
    return roots(h), h.degree


def preimages(r: RationalMap, a: SpherePoint) -> Divisor:
    """All sphere preimages of ``a`` under a nonconstant ``r``.

    The multiplicities sum to ``degree(r)``; whatever the finite equation
    misses sits at infinity.
    """
    d = degree(r)
    if d == 0:
        raise ValueError("preimages of a constant map")
    fin, deg_h = _finite_preimages(r, a)
    entries = list(fin.entries)
    if deg_h < d:
        entries.append((INF, d - deg_h))
    return Divisor(tuple(entries))


def _is_pole(r: RationalMap, z0: SpherePoint) -> bool:
    if is_inf(z0):
        return r.num.degree > r.den.degree
    return abs(r.den(z0)) <= EPS_ROOT * max(r.den.abs_eval(abs(z0)), 1e-300)


def mult_at(r: RationalMap, z0: SpherePoint, a: SpherePoint) -> int:
    """Local multiplicity of the value ``a`` at ``z0``.

    Raises
    ------
    ValueMismatch
        If ``r(z0)`` is not ``a`` within the matching tolerance.
    """
    if same_point(z0, INF):
        z0 = INF
    if not is_inf(a) and same_point(a, INF) and _is_pole(r, z0):
        # a huge finite value is chordally indistinguishable from infinity; the pole decides
        a = INF
    val = evaluate(r, z0)
    if not same_point(val, a):
        raise ValueMismatch(f"r({point_to_json(z0)}) = {point_to_json(val)} != {point_to_json(a)}")
    if degree(r) == 0:
        raise ValueError("multiplicity of a constant map")
    if is_inf(z0):
        r, z0 = at_infinity(r), 0j
    if is_inf(a):
        r, a = reciprocal(r), 0j
    # a finite and r(z0) = a: order of num - a*den at z0
    h = (r.num - r.den * a).trim(EPS_ROOT)
    if h.is_zero:
        raise ValueError("map is constant")
    m = roots(h).mult(z0, EPS_MATCH)
    if m == 0:
        # z0 is a root that the solver placed just outside the match radius
        dist = [(abs(p - z0), k) for p, k in roots(h)]
        if not dist:
            raise NonConvergence(f"value {point_to_json(a)} matched at {point_to_json(z0)} but has no root there")
        m = min(dist)[1]
    return m


def divisor_of_form(h: RationalMap) -> Divisor:
    """Divisor of the one-form ``h(z) dz`` on the sphere; total degree -2."""
    if h.is_zero:
        raise ValueError("divisor of the zero form")
    entries = []
    if h.num.degree > 0:
        entries.extend(roots(h.num).entries)
    if h.den.degree > 0:
        entries.extend((p, -m) for p, m in roots(h.den))
    entries.append((INF, h.den.degree - h.num.degree - 2))
    return Divisor(tuple(entries))


def divisor_of_function(r: RationalMap) -> Divisor:
    """Zeros minus poles of a nonzero function, including infinity; degree 0."""
    if r.is_zero:
        raise ValueError("divisor of the zero map")
    entries = []
    if r.num.degree > 0:
        entries.extend(roots(r.num).entries)
    if r.den.degree > 0:
        entries.extend((p, -m) for p, m in roots(r.den))
    entries.append((INF, r.den.degree - r.num.degree))
    return Divisor(tuple(entries))

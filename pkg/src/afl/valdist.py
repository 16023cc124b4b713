"""Value distribution of a rational map restricted to a punctured sphere.

The totally ramified value number of ``nu`` on ``S^2 minus {p_1..p_k}`` is

    delta = r0 + sum_j (1 - 1/m_j)

where ``r0`` counts exceptional (omitted) values and ``m_j`` is the least
multiplicity over the preimages of a non-omitted value all of whose
preimages branch. Only finitely many values can contribute: a value that is
neither a critical value nor the image of a puncture has a simple preimage
inside the domain. The candidate set is therefore complete and ``delta`` is
computed exactly, as a :class:`fractions.Fraction`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .errors import ConstantMap, ValidationError
from .rational import (
    EPS_CLUSTER,
    EPS_MATCH,
    INF,
    RationalMap,
    SpherePoint,
    chordal,
    degree,
    evaluate,
    is_inf,
    mult_at,
    point_from_json,
    point_to_json,
    preimages,
    roots,
    same_point,
    wronskian,
)

GENUS = 0


@dataclass(frozen=True)
class PuncturedSphere:
    """The Riemann sphere minus finitely many points (genus fixed at 0)."""

    punctures: tuple = ()

    def __post_init__(self):
        pts = tuple(INF if is_inf(p) else complex(p) for p in self.punctures)
        for i, a in enumerate(pts):
            for b in pts[:i]:
                if chordal(a, b) <= 2 * EPS_CLUSTER:
                    raise ValidationError(f"punctures {point_to_json(a)} and {point_to_json(b)} coincide")
        object.__setattr__(self, "punctures", pts)

    @property
    def genus(self) -> int:
        return GENUS

    @property
    def k(self) -> int:
        return len(self.punctures)

    def is_puncture(self, z: SpherePoint, tol: float = EPS_MATCH) -> bool:
        return any(same_point(z, p, tol) for p in self.punctures)

    @property
    def finite_punctures(self) -> list[complex]:
        return [p for p in self.punctures if not is_inf(p)]

    def with_puncture(self, z: SpherePoint) -> "PuncturedSphere":
        return PuncturedSphere(self.punctures + (z,))

    def to_json(self) -> list:
        return [point_to_json(p) for p in self.punctures]

    @classmethod
    def from_json(cls, obj) -> "PuncturedSphere":
        if obj is None:
            return cls()
        if not isinstance(obj, list):
            raise ValidationError("punctures must be a list")
        return cls(tuple(point_from_json(p) for p in obj))


@dataclass(frozen=True)
class RamifiedValue:
    value: SpherePoint
    m: int | None  # None encodes m = infinity (exceptional value)
    kind: str  # "exceptional" | "totally-ramified"

    @property
    def weight(self) -> Fraction:
        return Fraction(1) if self.m is None else 1 - Fraction(1, self.m)

    def to_json(self) -> dict:
        return {"value": point_to_json(self.value), "m": "inf" if self.m is None else self.m, "kind": self.kind}


def _fraction_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator, "float": float(q)}


@dataclass(frozen=True)
class RamificationReport:
    d: int
    k: int
    gamma: int
    values: tuple
    delta: Fraction
    D: int
    inv_R: Fraction
    bound: Fraction
    bound_holds: bool
    sharp: bool
    rh_total_branching: int

    @property
    def delta_float(self) -> float:
        return float(self.delta)

    @property
    def exceptional(self) -> list:
        return [v.value for v in self.values if v.kind == "exceptional"]

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "k": self.k,
            "gamma": self.gamma,
            "values": [v.to_json() for v in self.values],
            "delta": _fraction_json(self.delta),
            "D": self.D,
            "inv_R": _fraction_json(self.inv_R),
            "bound": _fraction_json(self.bound),
            "bound_holds": self.bound_holds,
            "sharp": self.sharp,
            "rh_total_branching": self.rh_total_branching,
        }


def _dedupe(points: Iterable[SpherePoint]) -> list:
    out: list = []
    for p in points:
        if not any(is_inf(p) == is_inf(q) and same_point(p, q) for q in out):
            out.append(p)
    return out


def _value_at(nu: RationalMap, p: SpherePoint, poles: list) -> SpherePoint:
    """``nu(p)``, reading a puncture placed on a pole (within matching tolerance) as infinity."""
    if not is_inf(p) and any(same_point(p, q) for q in poles):
        return INF
    return evaluate(nu, p)


def critical_points(nu: RationalMap) -> list[tuple[SpherePoint, int, SpherePoint]]:
    """``(point, local multiplicity, value)`` for every branch point of ``nu``.

    Finite branch points are the roots of ``num' den - num den'``, which
    also vanishes to order ``k-1`` at a pole of order ``k``. Infinity is
    examined separately in the chart ``w = 1/z``.
    """
    if degree(nu) == 0:
        raise ConstantMap("constant map has no branch structure")
    out = []
    w = wronskian(nu)
    poles = list(roots(nu.den)) if nu.den.degree > 0 else []
    if w.degree > 0:
        for z, _ in roots(w):
            for p, _ in poles:
                if abs(p - z) <= 1e3 * EPS_CLUSTER * (1 + abs(p)):
                    z, val = p, INF
                    break
            else:
                val = complex(nu(z))  # not a pole, so the value is finite however large
            m = mult_at(nu, z, val)
            if m >= 2:
                out.append((z, m, val))
    val = evaluate(nu, INF)
    m = mult_at(nu, INF, val)
    if m >= 2:
        out.append((INF, m, val))
    return out


def critical_values(nu: RationalMap) -> list:
    return _dedupe(v for _, _, v in critical_points(nu))


def total_branching(nu: RationalMap) -> int:
    return sum(m - 1 for _, m, _ in critical_points(nu))


def rh_check(nu: RationalMap) -> bool:
    """Genus-0 Riemann-Hurwitz: total branching equals ``2 deg - 2``."""
    return total_branching(nu) == 2 * degree(nu) - 2


def ramification_report(nu: RationalMap, dom: PuncturedSphere) -> RamificationReport:
    """Exceptional values, totally ramified values and the ramification bound.

    Raises
    ------
    ConstantMap
        If ``nu`` has degree 0.
    """
    d = degree(nu)
    if d == 0:
        raise ConstantMap("ramification report of a constant map")
    crit = critical_points(nu)
    poles = [q for q, _ in roots(nu.den)] if nu.den.degree > 0 else []
    candidates = _dedupe(
        [v for _, _, v in crit] + [_value_at(nu, p, poles) for p in dom.punctures] + [INF]
    )
    values = []
    for a in candidates:
        inside = [(z, m) for z, m in preimages(nu, a) if not dom.is_puncture(z)]
        if not inside:
            values.append(RamifiedValue(a, None, "exceptional"))
        elif min(m for _, m in inside) >= 2:
            values.append(RamifiedValue(a, min(m for _, m in inside), "totally-ramified"))
    r0 = sum(1 for v in values if v.kind == "exceptional")
    delta = sum((v.weight for v in values), Fraction(0))
    inv_R = Fraction(2 * GENUS - 2 + dom.k, 2 * d)
    bound = 2 + 2 * inv_R
    return RamificationReport(
        d=d,
        k=dom.k,
        gamma=GENUS,
        values=tuple(values),
        delta=delta,
        D=r0,
        inv_R=inv_R,
        bound=bound,
        bound_holds=delta <= bound,
        sharp=delta == bound,
        rh_total_branching=sum(m - 1 for _, m, _ in crit),
    )


def exceptional_values(nu: RationalMap, dom: PuncturedSphere) -> list:
    return ramification_report(nu, dom).exceptional

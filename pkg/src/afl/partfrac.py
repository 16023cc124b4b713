"""Partial fractions and closed-form antiderivatives of rational functions."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rational import Polynomial, RationalMap, reduce, roots


@dataclass(frozen=True)
class PartialFractions:
    """``h = poly + sum_a sum_l c[a][l-1] / (z - a)**l``."""

    poly: Polynomial
    terms: tuple  # ((a, (c_1, ..., c_k)), ...)

    def residue(self, a: complex, tol: float = 1e-8) -> complex:
        for b, c in self.terms:
            if abs(a - b) <= tol * (1 + abs(b)):
                return c[0]
        return 0j

    def residues(self) -> list[tuple[complex, complex]]:
        return [(a, c[0]) for a, c in self.terms]

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.poly(z) if not self.poly.is_zero else np.zeros_like(z)
        for a, cs in self.terms:
            for l, c in enumerate(cs, start=1):
                out = out + c / (z - a) ** l
        return out


def _series_quotient(b: np.ndarray, e: np.ndarray, k: int) -> np.ndarray:
    """First ``k`` Taylor coefficients of ``b(x)/e(x)``."""
    s = np.zeros(k, dtype=complex)
    for j in range(k):
        acc = b[j] if j < len(b) else 0
        for i in range(1, min(j, len(e) - 1) + 1):
            acc -= e[i] * s[j - i]
        s[j] = acc / e[0]
    return s


def partial_fractions(h: RationalMap) -> PartialFractions:
    poly, _ = h.num.divmod(h.den) if h.num.degree >= h.den.degree else (Polynomial(), h.num)
    terms = []
    if h.den.degree > 0:
        for a, k in roots(h.den):
            q = h.den.divide_linear(a, k)
            s = _series_quotient(h.num.taylor(a), q.taylor(a), k)
            # coefficient of (z-a)^(-l) is s[k-l]
            terms.append((a, tuple(s[k - l] for l in range(1, k + 1))))
    return PartialFractions(poly, tuple(terms))


@dataclass(frozen=True)
class Antiderivative:
    """``poly + sum_a sum_l d_l/(z-a)**l + sum_a c_a log(z - a)``, principal logs."""

    poly: Polynomial
    terms: tuple
    logs: tuple  # ((a, c), ...)

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.poly(z) if not self.poly.is_zero else np.zeros_like(z)
        for a, ds in self.terms:
            for l, d in enumerate(ds, start=1):
                out = out + d / (z - a) ** l
        for a, c in self.logs:
            out = out + c * np.log(z - a)
        return out if out.ndim else complex(out)

    def is_rational(self, tol: float) -> bool:
        return all(abs(c) <= tol for _, c in self.logs)

    def rational_part(self) -> RationalMap:
        """The antiderivative without its logarithmic terms, as a reduced map."""
        poles = [(a, ds) for a, ds in self.terms if any(d != 0 for d in ds)]
        den = Polynomial((1,))
        for a, ds in poles:
            den = den * Polynomial.from_roots([a] * len(ds))
        num = self.poly * den
        for a, ds in poles:
            others = Polynomial((1,))
            for b, es in poles:
                if b is not a:
                    others = others * Polynomial.from_roots([b] * len(es))
            k = len(ds)
            for l, d in enumerate(ds, start=1):
                num = num + Polynomial.from_roots([a] * (k - l), lead=d) * others
        return reduce(num.trim(), den)


def _integrate_poly(p: Polynomial) -> Polynomial:
    return Polynomial((0,) + tuple(a / (k + 1) for k, a in enumerate(p.coeffs)))


def antiderivative(h: RationalMap) -> Antiderivative:
    pf = partial_fractions(h)
    terms, logs = [], []
    for a, cs in pf.terms:
        logs.append((a, cs[0]))
        ds = [0j] * max(len(cs) - 1, 0)
        for l, c in enumerate(cs[1:], start=2):
            ds[l - 2] = -c / (l - 1)
        if ds:
            terms.append((a, tuple(ds)))
    return Antiderivative(_integrate_poly(pf.poly), tuple(terms), tuple(logs))

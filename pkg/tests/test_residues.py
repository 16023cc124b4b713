import numpy as np
import pytest

from afl.contour import contour_radius, residue
from afl.errors import ContourTooClose
from afl.partfrac import antiderivative, partial_fractions
from afl.rational import INF, Polynomial, RationalMap, roots

from conftest import random_map


def rmap(num, den=(1,)):
    return RationalMap.from_coeffs(num, den)


def test_partial_fractions_reconstruct(rng):
    for _ in range(20):
        h = random_map(rng, 5)
        pf = partial_fractions(h)
        z = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert np.allclose(pf(z), h(z), rtol=1e-8, atol=1e-10)


def test_partial_fractions_voss():
    pf = partial_fractions(rmap([1], [-1, 0, 1]))
    assert abs(pf.residue(1) - 0.5) < 1e-14
    assert abs(pf.residue(-1) + 0.5) < 1e-14


def test_partial_fractions_double_pole():
    # (3z + 1)/z^2 = 3/z + 1/z^2
    pf = partial_fractions(rmap([1, 3], [0, 0, 1]))
    (a, cs), = pf.terms
    assert abs(a) < 1e-14 and np.allclose(cs, [3, 1])


def test_contour_matches_closed_form_residues(rng):
    # independent routes: trapezoid quadrature vs series division
    for _ in range(20):
        h = random_map(rng, 5)
        if h.den.degree == 0:
            continue
        pts = roots(h.den).points
        for a, c in partial_fractions(h).residues():
            try:
                r = contour_radius(a, [p for p in pts if p != a])
            except ContourTooClose:
                continue
            assert abs(residue(h, a, r) - c) <= 1e-8 * max(1, abs(c))


def test_residue_at_infinity_balances_finite_ones(rng):
    for _ in range(20):
        h = random_map(rng, 4)
        pts = roots(h.den).points if h.den.degree > 0 else []
        total = sum(c for _, c in partial_fractions(h).residues())
        r = contour_radius(INF, pts)
        assert abs(residue(h, INF, r) + total) <= 1e-8 * max(1, abs(total))


def test_rotational_residues():
    for r in (1.0, 2.0):
        h = rmap([-(r**2)], [0, 1])  # F G' for (z, r^2/z)
        assert abs(residue(h, 0, 0.5) + r**2) < 1e-12
        assert abs(residue(h, INF, 0.5) - r**2) < 1e-12


def test_contour_too_close():
    with pytest.raises(ContourTooClose):
        contour_radius(0j, [1e-12])


def test_antiderivative_differentiates_back(rng):
    for _ in range(10):
        h = random_map(rng, 4)
        A = antiderivative(h)
        z = complex(rng.normal(), rng.normal()) + 3
        e = 1e-5
        fd = (A(z + e) - A(z - e)) / (2 * e)
        assert abs(fd - h(z)) <= 1e-6 * (1 + abs(h(z)))


def test_rational_part_without_residues():
    # d/dz (z^2 + 1/z - 2/(z-1)^2)
    h = rmap([0, 2]) + rmap([-1], [0, 0, 1]) + rmap([4], Polynomial.from_roots([1, 1, 1]).coeffs)
    A = antiderivative(h)
    assert A.is_rational(1e-10)
    P = A.rational_part()
    z = np.array([0.3 + 0.2j, -2 + 1j, 3.0])
    expect = z**2 + 1 / z - 2 / (z - 1) ** 2
    assert np.allclose(P(z) - P(0.5j), expect - (0.5j**2 + 1 / 0.5j - 2 / (0.5j - 1) ** 2))

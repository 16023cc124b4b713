"""Property-based checks of the structural invariants across modules."""
import numpy as np
from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

from afl import affine_front as af
from afl import flat_front as ff
from afl.ode import sl2_normalize
from afl.rational import (
    INF,
    Polynomial,
    RationalMap,
    degree,
    divisor_of_form,
    mult_at,
    preimages,
    reduce,
    roots,
    same_point,
)
from afl.valdist import PuncturedSphere, ramification_report, rh_check

SETTINGS = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])

# roots are rounded to a lattice so that near-collisions stay well separated
lattice = st.builds(lambda a, b: complex(a, b) / 4, st.integers(-8, 8), st.integers(-8, 8))
small = st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False)
# coefficients on the scale accepted at parse time: zero or of moderate size
coeff = st.one_of(st.just(0j), st.builds(complex, st.floats(-3, 3), st.floats(-3, 3)).filter(lambda c: abs(c) > 1e-3))


@st.composite
def rational_maps(draw, max_degree=4):
    zs = draw(st.lists(lattice, max_size=max_degree))
    ps = draw(st.lists(lattice, max_size=max_degree))
    assume(len(zs) + len(ps) > 0)
    lead = draw(st.sampled_from([1, -2, 1j, 0.5 + 0.5j]))
    return reduce(Polynomial.from_roots(zs, lead), Polynomial.from_roots(ps))


@st.composite
def frames(draw):
    v = draw(st.lists(st.floats(-3, 3), min_size=8, max_size=8))
    E = np.array(v[:4]).reshape(2, 2) + 1j * np.array(v[4:]).reshape(2, 2)
    det = np.linalg.det(E)
    assume(abs(det) > 1e-2)
    return sl2_normalize(E)


# --- rational -------------------------------------------------------------


@SETTINGS
@given(st.lists(lattice, min_size=1, max_size=3), st.lists(lattice, max_size=3), st.lists(lattice, max_size=3))
def test_reduce_cancels_common_factors(common, zs, ps):
    r = reduce(Polynomial.from_roots(common + zs), Polynomial.from_roots(common + ps))
    if r.is_zero:
        return
    num_roots, den_roots = roots(r.num).points, roots(r.den).points
    assert not any(same_point(a, b, 1e-8) for a in num_roots for b in den_roots)


@SETTINGS
@given(rational_maps())
def test_riemann_hurwitz(r):
    assume(degree(r) > 0)
    assert rh_check(r)


@SETTINGS
@given(rational_maps())
def test_form_divisor_degree(r):
    assume(not r.is_zero)
    assert divisor_of_form(r).degree == -2


@SETTINGS
@given(rational_maps(), small)
def test_preimage_mass(r, a):
    assume(degree(r) > 0)
    div = preimages(r, a)
    assert sum(m for _, m in div.entries) == degree(r)
    assert sum(mult_at(r, p, a) for p, _ in div.entries) == degree(r)


# --- valdist ----------------------------------------------------------------


@SETTINGS
@given(rational_maps(), st.lists(st.one_of(lattice, st.just(INF)), max_size=3, unique_by=str))
def test_report_invariants(r, punctures):
    assume(degree(r) > 0)
    rep = ramification_report(r, PuncturedSphere(tuple(punctures)))
    assert rep.D <= rep.delta
    assert rep.D == len(rep.exceptional)
    # exceptional values enter delta with full weight 1
    assert sum(v.weight for v in rep.values if v.kind == "exceptional") == rep.D


@SETTINGS
@given(rational_maps(), st.lists(st.one_of(lattice, st.just(INF)), max_size=3, unique_by=str),
       st.one_of(lattice, st.just(INF)))
def test_adding_puncture_never_decreases_delta(r, punctures, extra):
    assume(degree(r) > 0)
    dom = PuncturedSphere(tuple(punctures))
    assume(not dom.is_puncture(extra))
    assert ramification_report(r, dom.with_puncture(extra)).delta >= ramification_report(r, dom).delta


@SETTINGS
@given(st.lists(coeff, min_size=2, max_size=4), st.lists(coeff, min_size=2, max_size=4))
def test_bound_holds_for_polynomial_data(fc, gc):
    # polynomial data on the plane: every end has ord dtau^2 <= -2
    F, G = RationalMap.from_coeffs(fc), RationalMap.from_coeffs(gc)
    assume(not F.is_constant and not G.is_constant)
    d = af.WeierstrassData.explicit(F, G, [INF])
    nu = af.lagrangian_gauss(d)
    assume(not nu.is_constant)
    if af.completeness_necessary(d):
        assert ramification_report(nu, d.dom).bound_holds


# --- affine fronts --------------------------------------------------------


@SETTINGS
@given(st.lists(coeff, min_size=2, max_size=4), st.lists(coeff, min_size=2, max_size=4), small)
def test_metric_identities(fc, gc, z):
    F, G = RationalMap.from_coeffs(fc), RationalMap.from_coeffs(gc)
    assume(not G.is_constant)  # nu needs dG != 0
    m = af.metric_factors(af.WeierstrassData.explicit(F, G, [INF]), z)
    assume(m["dtau"] > 1e-8)
    assert abs(m["dtau"] - m["dtau_nu"]) <= 1e-12 * m["dtau"] or abs(G.derivative()(z)) < 1e-8
    if abs(m["nu"]) < 1:
        assert m["g"] < m["dtau"]


@SETTINGS
@given(st.lists(coeff, min_size=2, max_size=3), st.lists(coeff, min_size=2, max_size=3), small,
       st.floats(0, 2 * np.pi))
def test_conormal_annihilates_differential(fc, gc, z, angle):
    F, G = RationalMap.from_coeffs(fc), RationalMap.from_coeffs(gc)
    assume(not (F.is_constant and G.is_constant))
    d = af.WeierstrassData.explicit(F, G, [INF])
    front = af.AffineFront(d, base=0)
    h = 1e-5
    dz = h * np.exp(1j * angle)
    (xp, pp), (xm, pm) = front.evaluate(np.array([z + dz])), front.evaluate(np.array([z - dz]))
    n, _ = af.conormal(d, z)
    dphi = (pp - pm)[0] / 2
    dx = (xp - xm)[0] / 2
    scale = 1 + abs(n) * abs(dx) + abs(dphi)
    assert abs(dphi + (n * np.conj(dx)).real) <= 1e-6 * scale


@SETTINGS
@given(st.integers(1, 5), st.floats(0.3, 3))
def test_singular_points_on_unit_modulus(n, c):
    # nu = c z^n: the singular set is |z| = c^{-1/n}
    d = af.WeierstrassData.explicit(RationalMap.from_coeffs([0] * (n + 1) + [c / (n + 1)]),
                                    RationalMap.from_coeffs([0, 1]), [INF])
    r = c ** (-1 / n)
    curves = af.singular_curves(d, (-2 * r, 2 * r, -2 * r, 2 * r), 64)
    pts = np.concatenate([cv.points for cv in curves])
    assert np.max(np.abs(np.abs(af.lagrangian_gauss(d)(pts)) - 1)) <= 5e-3


# --- flat fronts ------------------------------------------------------------


@SETTINGS
@given(frames())
def test_frame_contract(E):
    f, n = ff.front_coords(E), ff.normal_coords(E)
    s = f[0] ** 2
    assert abs(ff.minkowski_inner(f, f) + 1) <= 1e-9 * s
    assert abs(ff.minkowski_inner(n, n) - 1) <= 1e-9 * s
    assert abs(ff.minkowski_inner(f, n)) <= 1e-9 * s


@SETTINGS
@given(frames(), st.floats(-3, 3))
def test_gauge_and_dual(E, s):
    f = ff.front_coords(E)
    G, Gs = ff.hyperbolic_gauss(E)
    F = ff.u1_gauge(E, s).m
    assert np.allclose(ff.front_coords(F), f, atol=1e-12 * f[0])
    G2, Gs2 = ff.hyperbolic_gauss(F)
    close = lambda a, b: (a is INF and b is INF) or (a is not INF and b is not INF and abs(a - b) <= 1e-9 * (1 + abs(a)))  # noqa: E731,E501
    assert close(G, G2) and close(Gs, Gs2)
    D = ff.dual(E).m
    assert np.allclose(ff.front_coords(D), f, atol=1e-12 * f[0])
    Gd, Gsd = ff.hyperbolic_gauss(D)
    assert close(Gd, Gs) and close(Gsd, G)


@SETTINGS
@given(frames(), st.floats(-2, 2))
def test_parallel_gauss_ray(E, t):
    f, n = ff.front_coords(E), ff.normal_coords(E)
    ft, nt = ff.parallel(f, n, t)
    assert np.allclose(ft + nt, np.exp(t) * (f + n), rtol=0, atol=1e-12 * np.exp(abs(t)) * f[0])
    assert abs(ff.minkowski_inner(ft, ft) + 1) <= 1e-9 * np.exp(2 * abs(t)) * f[0] ** 2


@SETTINGS
@given(st.lists(coeff, min_size=1, max_size=3), st.lists(coeff, min_size=1, max_size=3),
       st.lists(coeff, min_size=1, max_size=4))
def test_lift_determinant_along_paths(wc, tc, path):
    w, t = RationalMap.from_coeffs(wc), RationalMap.from_coeffs(tc)
    assume(not (w.is_zero and t.is_zero))
    forms = ff.CanonicalForms.make(w, t, [INF])
    E = ff.integrate_lift(forms, [0j] + [p / 3 for p in path])
    assert abs(E.det - 1) <= 1e-9


@SETTINGS
@given(st.lists(coeff, min_size=1, max_size=3), st.lists(coeff, min_size=1, max_size=3), small)
def test_sasaki_identity(wc, tc, z):
    w, t = RationalMap.from_coeffs(wc), RationalMap.from_coeffs(tc)
    assume(not w.is_zero and abs(w(z)) > 1e-6)
    forms = ff.CanonicalForms.make(w, t, [INF])
    lhs = abs(w(z)) ** 2 + abs(t(z)) ** 2
    rhs = (1 + abs(ff.rho(forms)(z)) ** 2) * abs(w(z)) ** 2
    assert abs(lhs - rhs) <= 1e-12 * lhs

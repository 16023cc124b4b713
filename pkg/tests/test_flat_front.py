import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from afl.errors import DegenerateData, PathHitsSingularity, ValidationError
from afl.flat_front import (
    CanonicalForms,
    HermitianPoint,
    Sl2Frame,
    classify_rho,
    dual,
    front_point,
    hopf,
    hyperbolic_gauss,
    integrate_lift,
    mesh_h3,
    minkowski_inner,
    monodromy,
    normal,
    parallel,
    rho,
    schwarzian_check,
    u1_gauge,
    wcf_end_orders,
)
from afl.mesh import Domain
from afl.ode import integrate_segments, sl2_normalize
from afl.rational import INF, RationalMap


def rmap(num, den=(1,)):
    return RationalMap.from_coeffs(num, den)


def forms(w, t, punctures=()):
    return CanonicalForms.make(w, t, punctures)


HORO = forms(rmap([1]), rmap([0]))
LINEAR = forms(rmap([1]), rmap([0, 1]), [INF])
CYL = forms(rmap([1], [0, 1]), rmap([0.5], [0, 1]), [0, INF])


def random_frames(rng, k):
    E = rng.normal(size=(k, 2, 2)) + 1j * rng.normal(size=(k, 2, 2))
    return sl2_normalize(E)


def ivp_lift(fm, a, b, E0=np.eye(2)):
    """Independent route: scipy's RK on the real 8-vector along a segment."""

    def rhs(s, y):
        E = (y[:4] + 1j * y[4:]).reshape(2, 2)
        z = a + s * (b - a)
        M = np.array([[0, fm.t_hat(z)], [fm.w_hat(z), 0]]) * (b - a)
        d = (E @ M).ravel()
        return np.concatenate([d.real, d.imag])

    y0 = np.concatenate([np.ravel(E0).real, np.ravel(E0).imag])
    sol = solve_ivp(rhs, (0, 1), y0, method="DOP853", rtol=1e-12, atol=1e-14)
    y = sol.y[:, -1]
    return (y[:4] + 1j * y[4:]).reshape(2, 2)


# --- lift integration ---------------------------------------------------


def test_lift_horosphere_closed_form():
    for z in (1 + 2j, -0.5j, 3.0):
        E = integrate_lift(HORO, [0, z]).m
        assert np.allclose(E, [[1, 0], [z, 1]], atol=1e-9)


def test_lift_empty_path_returns_start():
    E0 = Sl2Frame(np.array([[2, 1], [1, 1]]))
    assert np.array_equal(integrate_lift(HORO, [], E0).m, E0.m)
    assert np.array_equal(integrate_lift(HORO, [0.5], E0).m, E0.m)


def test_lift_constant_coefficients_matrix_exponential():
    fm = forms(rmap([1]), rmap([1]))
    for z in (0.7 + 0.2j, -1.5 + 1j):
        E = integrate_lift(fm, [0, z]).m
        assert np.allclose(E, [[np.cosh(z), np.sinh(z)], [np.sinh(z), np.cosh(z)]], atol=1e-9)
        assert np.allclose(E, expm(z * np.array([[0, 1], [1, 0]])), atol=1e-9)


def test_lift_matches_independent_integrator(rng):
    fm = forms(rmap([1, 0.5j, 0.3], [2, 1]), rmap([0.2, 1j, 0, 0.1]), [-2, INF])
    for _ in range(5):
        a, b = complex(*rng.normal(size=2) * 0.6), complex(*rng.normal(size=2) * 0.6)
        E0 = random_frames(rng, 1)[0]
        ours = integrate_lift(fm, [a, b], E0).m
        assert np.allclose(ours, ivp_lift(fm, a, b, E0), rtol=1e-8, atol=1e-9)


def test_lift_path_through_pole_refused():
    with pytest.raises(PathHitsSingularity):
        integrate_lift(CYL, [-1, 1])


def test_lift_preserves_determinant(rng):
    fm = forms(rmap([1, 2, 1j]), rmap([0.5, 0, 1]), [INF])
    path = np.cumsum(rng.normal(size=20) + 1j * rng.normal(size=20)) * 0.2
    assert Sl2Frame(integrate_lift(fm, path).m).is_sl2(1e-9)


def test_batched_segments_independent(rng):
    # batching must not couple segments: each row equals its solo integration
    a = rng.normal(size=6) + 1j * rng.normal(size=6)
    b = a + 0.3 * (rng.normal(size=6) + 1j * rng.normal(size=6))
    E0 = random_frames(rng, 6)
    batch = integrate_segments(LINEAR.coef, E0, a, b)
    for i in range(6):
        solo = integrate_segments(LINEAR.coef, E0[i : i + 1], a[i : i + 1], b[i : i + 1])[0]
        assert np.allclose(batch[i], solo, rtol=1e-9, atol=1e-11)


# --- monodromy -----------------------------------------------------------


def test_monodromy_trivial_loop():
    fm = forms(rmap([1]), rmap([0]), [5.0])
    assert np.allclose(monodromy(fm, 5.0).m, np.eye(2), atol=1e-8)


def test_monodromy_log_term():
    fm = forms(rmap([1], [0, 1]), rmap([0]), [0, INF])
    M = monodromy(fm, 0).m
    assert np.allclose(M, [[1, 0], [2j * np.pi, 1]], atol=1e-8)


def test_monodromy_at_infinity_inverts_finite_loop():
    fm = forms(rmap([1], [0, 1]), rmap([0]), [0, INF])
    M = monodromy(fm, INF).m
    assert np.allclose(M, [[1, 0], [-2j * np.pi, 1]], atol=1e-8)


def test_monodromy_cylinder_unimodular():
    fm = forms(rmap([1], [0, 1]), rmap([1], [0, 1]), [0, INF])
    assert abs(monodromy(fm, 0).det - 1) <= 1e-9
    M = monodromy(CYL, 0)
    assert abs(M.det - 1) <= 1e-9
    # trace is conjugation invariant: exp(2 pi i J) with J^2 = rho
    assert abs(np.trace(M.m) - 2 * np.cos(2 * np.pi * np.sqrt(0.5))) < 1e-8


# --- points, normals, parallels ----------------------------------------


def test_front_point_examples():
    f = front_point(np.eye(2))
    assert np.allclose(f.x, [1, 0, 0, 0])
    for z in (0.3 + 0.4j, -2 + 1j):
        f = front_point(np.array([[1, 0], [z, 1]]))
        assert np.allclose(f.matrix, [[1, np.conj(z)], [z, 1 + abs(z) ** 2]])
        assert abs(f.x[0] + f.x[3] - 1) < 1e-15


def test_front_and_normal_contract(rng):
    for E in random_frames(rng, 100):
        f, n = front_point(E), normal(E)
        assert abs(f.inner(f) + 1) <= 1e-9 * f.x[0] ** 2
        assert abs(n.inner(n) - 1) <= 1e-9 * f.x[0] ** 2
        assert abs(f.inner(n)) <= 1e-9 * f.x[0] ** 2
        X = f.matrix
        assert abs(np.linalg.det(X) - 1) <= 1e-9 * f.x[0] ** 2 and np.trace(X).real > 0


def test_hermitian_roundtrip():
    p = HermitianPoint(np.array([2.0, 0.5, -1.0, 0.25]))
    assert np.allclose(HermitianPoint.from_matrix(p.matrix).x, p.x)


def test_parallel_examples():
    f, n = np.array([1.0, 0, 0, 0]), np.array([0, 0, 0, 1.0])
    ft, nt = parallel(f, n, 1.0)
    assert np.allclose(ft, [np.cosh(1), 0, 0, np.sinh(1)])
    f0, n0 = parallel(f, n, 0.0)
    assert np.array_equal(f0, f) and np.array_equal(n0, n)


def test_parallel_family(rng):
    for E in random_frames(rng, 100):
        f, n = front_coords_of(E)
        for t in (-1.0, 0.3, 2.0):
            ft, nt = parallel(f, n, t)
            scale = f[0] * np.exp(abs(t))
            assert abs(minkowski_inner(ft, ft) + 1) <= 1e-9 * scale**2
            assert ft[0] > 0
            assert np.max(np.abs(ft + nt - np.exp(t) * (f + n))) <= 1e-12 * scale


def front_coords_of(E):
    return front_point(E).x, normal(E).x


# --- Gauss maps, dual, gauge -------------------------------------------


def test_hyperbolic_gauss_examples():
    assert hyperbolic_gauss(np.eye(2)) == (INF, 0)
    G, Gs = hyperbolic_gauss(np.array([[1, 0], [2 + 1j, 1]]))
    assert abs(G - 1 / (2 + 1j)) < 1e-15 and Gs == 0


def test_gauge_and_dual_invariants(rng):
    for E in random_frames(rng, 50):
        G, Gs = hyperbolic_gauss(E)
        for s in (0.3, -2.0, np.pi):
            F = u1_gauge(E, s)
            assert np.allclose(front_point(F).x, front_point(E).x, atol=1e-12 * front_point(E).x[0])
            G2, Gs2 = hyperbolic_gauss(F)
            assert abs(G2 - G) <= 1e-10 * (1 + abs(G)) and abs(Gs2 - Gs) <= 1e-10 * (1 + abs(Gs))
        D = dual(E)
        assert np.allclose(front_point(D).x, front_point(E).x, atol=1e-12 * front_point(E).x[0])
        Gd, Gsd = hyperbolic_gauss(D)
        assert abs(Gd - Gs) <= 1e-10 * (1 + abs(Gs)) and abs(Gsd - G) <= 1e-10 * (1 + abs(G))
        assert np.allclose(dual(dual(E)).m, -E)


def test_dual_of_identity():
    assert np.allclose(dual(np.eye(2)).m, [[0, 1j], [1j, 0]])
    assert np.allclose(front_point(dual(np.eye(2))).x, [1, 0, 0, 0])


def test_dual_swaps_forms_along_path():
    # E^{-1} dE by finite differences: off-diagonal entries swap under the dual
    fm = forms(rmap([1, 1j]), rmap([0.5, 0, 1]), [INF])
    z, h = 0.3 + 0.2j, 1e-5
    E0 = integrate_lift(fm, [0, z]).m
    Ep = integrate_lift(fm, [z, z + h], E0).m
    Em = integrate_lift(fm, [z, z - h], E0).m
    for E, p, m in ((E0, Ep, Em), (dual(E0).m, dual(Ep).m, dual(Em).m)):
        A = np.linalg.solve(E, (p - m) / (2 * h))
        assert abs(A[0, 0]) < 1e-6 and abs(A[1, 1]) < 1e-6
        if E is E0:
            w, t = A[1, 0], A[0, 1]
    assert abs(w - fm.w_hat(z)) < 1e-6 and abs(t - fm.t_hat(z)) < 1e-6
    assert abs(A[1, 0] - t) < 1e-6 and abs(A[0, 1] - w) < 1e-6


# --- Hopf differential and rho ------------------------------------------------


def test_hopf_and_rho_examples():
    assert hopf(HORO).is_zero and rho(HORO).is_zero
    assert abs(hopf(LINEAR)(0.7) - 0.7) < 1e-15 and abs(rho(LINEAR)(0.7) - 0.7) < 1e-15
    assert rho(CYL).is_constant and abs(rho(CYL)(1) - 0.5) < 1e-15
    with pytest.raises(DegenerateData):
        rho(forms(rmap([0]), rmap([1])))


def test_sasaki_rho_identity(rng):
    fm = forms(rmap([1, 2j, 0.5], [3, 1]), rmap([1, 0, 1j]), [-3, INF])
    z = rng.normal(size=300) + 1j * rng.normal(size=300)
    w, t, r = fm.w_hat(z), fm.t_hat(z), rho(fm)(z)
    lhs = np.abs(w) ** 2 + np.abs(t) ** 2
    assert np.all(np.abs(lhs - (1 + np.abs(r) ** 2) * np.abs(w) ** 2) <= 1e-12 * lhs)


# --- Schwarzian identity ---------------------------------------------------


def test_schwarzian_linear_theta():
    res = schwarzian_check(LINEAR, Domain("disk", r_max=0.8), 41)
    assert res.status == "ok" and res.residual <= 1e-4


def test_schwarzian_horosphere_runs():
    res = schwarzian_check(HORO, Domain("disk", r_max=0.8), 21)
    assert res.status == "ok" and res.residual <= 1e-4


def test_schwarzian_skipped_without_omega():
    assert schwarzian_check(forms(rmap([0]), rmap([1])), Domain("disk", r_max=0.8), 11).status == "skipped"


def test_schwarzian_pole_outside_window():
    fm = forms(rmap([1], [-2, 1]), rmap([0, 1]), [2, INF])
    assert schwarzian_check(fm, Domain("disk", r_max=1), 41).residual <= 1e-4


def test_schwarzian_detects_mismatched_hopf():
    # negative control: pair the lift of one datum with the Q of another
    import afl.flat_front as ff

    fm = forms(rmap([1]), rmap([0, 1]), [INF])
    doubled = forms(rmap([1]), rmap([0, 2]), [INF])
    real_hopf = ff.hopf
    try:
        ff.hopf = lambda f: real_hopf(doubled)
        res = schwarzian_check(fm, Domain("disk", r_max=0.5), 11)
    finally:
        ff.hopf = real_hopf
    assert res.residual > 1e-2


# --- classification and ends -------------------------------------------------


def test_classify_rho():
    assert classify_rho(HORO) == "horosphere"
    assert classify_rho(forms(rmap([0]), rmap([1]))) == "horosphere"
    assert classify_rho(CYL) == "hyperbolic_cylinder_candidate"
    assert classify_rho(LINEAR) == "generic"


def test_wcf_end_orders_examples():
    recs = wcf_end_orders(forms(rmap([1], [0, 1]), rmap([1], [0, 1]), [0, INF]))
    r0 = recs[0]
    assert (r0.mu, r0.mu_star, r0.ordQ, r0.regular) == (-1, -1, -2, True)
    assert r0.weakly_complete_necessary
    r = wcf_end_orders(forms(rmap([1], [0, 0, 0, 1]), rmap([1]), [0, INF]))[0]
    assert r.ordQ == -3 and not r.regular
    assert wcf_end_orders(forms(rmap([1]), rmap([1]))) == []


def test_wcf_end_order_sum():
    fm = forms(rmap([1, 1], [0, 0, 1]), rmap([2], [0, 1]), [0, INF])
    for r in wcf_end_orders(fm):
        assert r.ordQ == r.mu + r.mu_star


def test_forms_validation():
    with pytest.raises(ValidationError):
        forms(rmap([1], [0, 1]), rmap([0]))
    with pytest.raises(DegenerateData):
        forms(rmap([0]), rmap([0]))


# --- meshes -------------------------------------------------------------


def test_mesh_horosphere():
    m = mesh_h3(HORO, Domain("disk", r_max=1), 32)
    x = m.extras["minkowski"]
    assert m.n_vertices == 32 * 32
    assert np.max(np.abs(x[:, 0] + x[:, 3] - 1)) <= 1e-8
    assert np.max(np.abs(minkowski_inner(x, x) + 1)) <= 1e-8
    assert np.max(np.abs(np.linalg.det(m.extras["frames"]) - 1)) <= 1e-9
    assert np.all(np.linalg.norm(m.vertices, axis=1) < 1)


def test_mesh_parallel_family_pointwise():
    m0 = mesh_h3(LINEAR, Domain("disk", r_max=1.5), 24, t=0.0)
    m1 = mesh_h3(LINEAR, Domain("disk", r_max=1.5), 24, t=0.7)
    ft, _ = parallel(m0.extras["minkowski"], m0.extras["normal"], 0.7)
    assert np.max(np.abs(ft - m1.extras["minkowski"])) <= 1e-9 * np.max(np.abs(ft))


def test_mesh_contract_at_vertices():
    m = mesh_h3(LINEAR, Domain("disk", r_max=1.5), 24)
    f, n = m.extras["minkowski"], m.extras["normal"]
    s = f[:, 0] ** 2
    assert np.all(np.abs(minkowski_inner(f, f) + 1) <= 1e-9 * s)
    assert np.all(np.abs(minkowski_inner(n, n) - 1) <= 1e-9 * s)
    assert np.all(np.abs(minkowski_inner(f, n)) <= 1e-9 * s)


def test_mesh_singular_ring():
    m = mesh_h3(LINEAR, Domain("disk", r_max=2), 48)
    ring = np.abs(m.params[m.singular])
    assert len(ring) > 0 and np.all(np.abs(ring - 1) < 0.05)


def test_mesh_cylinder_fundamental_domain():
    m = mesh_h3(CYL, Domain("annulus", r_min=0.5, r_max=2), 24)
    assert m.n_vertices == 24 * 24
    assert np.all(np.isfinite(m.vertices))


@settings(max_examples=30, deadline=None)
@given(st.floats(-3, 3), st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_parallel_keeps_gauss_endpoint(t, z):
    E = integrate_lift(LINEAR, [0, z]).m
    f, n = front_point(E).x, normal(E).x
    ft, nt = parallel(f, n, t)
    # f + n is null and its ray is t-invariant
    assert abs(minkowski_inner(f + n, f + n)) <= 1e-9 * f[0] ** 2
    assert np.allclose(ft + nt, np.exp(t) * (f + n), rtol=1e-12, atol=1e-12 * np.exp(abs(t)) * f[0])

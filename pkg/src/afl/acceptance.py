"""Acceptance suite shared by ``afl verify`` and the test-suite.

Each criterion is a function returning an :class:`Outcome`; the runner adds
wall-clock time and fails a criterion that exceeds its runtime budget.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import affine_front as af
from . import flat_front as ff
from .errors import NotWellDefined
from .mesh import Domain
from .ode import sl2_normalize
from .rational import INF, RationalMap, degree, evaluate, mult_at, preimages, same_point
from .valdist import critical_values, ramification_report, total_branching


@dataclass(frozen=True)
class Outcome:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0
    limit: float | None = None

    def line(self) -> str:
        budget = f" (limit {self.limit:g} s)" if self.limit is not None else ""
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}: {self.detail} [{self.seconds:.2f} s{budget}]"


def seed() -> int:
    return int(os.environ.get("AFL_SEED", "0"))


def rmap(num, den=(1,)) -> RationalMap:
    return RationalMap.from_coeffs(num, den)


def random_map(rng, max_degree: int = 6) -> RationalMap:
    """Random rational map of degree 1..max_degree with Gaussian coefficients."""
    while True:
        dn, dd = rng.integers(0, max_degree + 1, size=2)
        if max(dn, dd) == 0:
            continue
        num = rng.normal(size=dn + 1) + 1j * rng.normal(size=dn + 1)
        den = rng.normal(size=dd + 1) + 1j * rng.normal(size=dd + 1)
        r = RationalMap.from_coeffs(num, den)
        if r.degree > 0:
            return r


def hausdorff_to_circle(curves, r: float, m: int = 4000) -> float:
    """Hausdorff distance between polylines, read as unions of segments, and ``|z| = r``."""
    circ = r * np.exp(2j * np.pi * np.arange(m) / m)
    a = np.concatenate([c.points if c.closed else c.points[:-1] for c in curves])
    b = np.concatenate([np.roll(c.points, -1) if c.closed else c.points[1:] for c in curves])
    ab = b - a
    t = ((circ[:, None] - a[None, :]) * np.conj(ab)[None, :]).real / np.maximum(np.abs(ab) ** 2, 1e-300)
    foot = a[None, :] + np.clip(t, 0, 1) * ab[None, :]
    to_curve = np.abs(circ[:, None] - foot).min(axis=1).max()
    pts = np.concatenate([c.points for c in curves])
    return float(max(to_curve, np.abs(np.abs(pts) - r).max()))


# --- criteria ------------------------------------------------------------


def sharpness_i() -> Outcome:
    bad = []
    for n in range(2, 7):
        d = af.WeierstrassData.explicit(rmap([0] * (n + 1) + [1 / (n + 1)]), rmap([0, 1]), [INF])
        rep = ramification_report(af.lagrangian_gauss(d), d.dom)
        want = 2 - Fraction(1, n)
        if not (rep.delta == want and rep.D == 1 and rep.bound == want and rep.sharp):
            bad.append(f"n={n}: delta={rep.delta} D={rep.D} bound={rep.bound} sharp={rep.sharp}")
    return Outcome("sharpness family (i)", not bad, "; ".join(bad) or "delta = bound = 2 - 1/n, D = 1 for n = 2..6")


def sharpness_ii() -> Outcome:
    bad, notes = [], []
    for r in (1.0, 2.0):
        d = af.WeierstrassData.explicit(rmap([0, 1]), rmap([r * r], [0, 1]), [0, INF])
        rep = ramification_report(af.lagrangian_gauss(d), d.dom)
        if not (rep.D == 2 and rep.delta == 2 and rep.bound == 2):
            bad.append(f"r={r}: D={rep.D} delta={rep.delta} bound={rep.bound}")
        cert = af.period_check(d)
        im = max(abs(rec.res_FdG.imag) for rec in cert.records if rec.res_FdG is not None)
        if not cert.well_defined or im > 1e-10:
            bad.append(f"r={r}: verdict {cert.verdict}, |Im Res| = {im:.2e}")
        w = 2 * r
        curves = af.singular_curves(d, (-w, w, -w, w), 256)
        h = hausdorff_to_circle(curves, r) if curves else np.inf
        if h > 2e-2:
            bad.append(f"r={r}: Hausdorff {h:.3e}")
        notes.append(f"r={r:g}: Hausdorff {h:.1e}, |Im Res| {im:.1e}")
    return Outcome("sharpness family (ii)", not bad, "; ".join(bad or notes))


def voss() -> Outcome:
    d = af.WeierstrassData.differential(rmap([0, 1]), rmap([1], [-1, 0, 1]), [1, -1, INF])
    cert = af.period_check(d)
    res1 = cert.record(1).res_dG
    refused = False
    try:
        af.immerse(d, 0.5j)
    except NotWellDefined:
        refused = True
    omitted = ramification_report(af.lagrangian_gauss(d), d.dom).exceptional
    want = [1, -1, INF]
    exact_three = len(omitted) == 3 and all(any(same_point(v, w) for v in omitted) for w in want)
    ok = cert.verdict == "universal_cover_only" and abs(res1 - 0.5) <= 1e-10 and refused and exact_three
    return Outcome("Voss certificate", ok,
                   f"verdict {cert.verdict}, |Res_1 dG - 1/2| = {abs(res1 - 0.5):.1e}, immerse refused = {refused}, "
                   f"omitted values exactly {{1, -1, inf}} = {exact_three}")


def classifier() -> Outcome:
    cases = [(0.5, "elliptic_paraboloid"), (-0.5j, "elliptic_paraboloid"), (1.0, "degenerate_line"),
             (np.exp(1j * np.pi / 3), "degenerate_line"), (1j, "degenerate_line")]
    bad = []
    for c, want in cases:
        got = af.classify(af.WeierstrassData.explicit(rmap([0, c]), rmap([0, 1]), [INF]))
        if got != want:
            bad.append(f"c={c}: {got}")
    return Outcome("classifier", not bad, "; ".join(bad) or "|c| = 1/2 -> elliptic_paraboloid, |c| = 1 -> degenerate_line")


def riemann_hurwitz() -> Outcome:
    rng = np.random.default_rng(seed())
    maps = [random_map(rng) for _ in range(50)]
    bad = [f"deg {degree(r)}: branching {total_branching(r)}" for r in maps if total_branching(r) != 2 * degree(r) - 2]
    mass_bad = 0
    for i in range(100):
        r = maps[i % 50]
        crit = [v for v in critical_values(r) if not same_point(v, INF)]
        # half the values are critical, so multiplicities above one are exercised
        if i % 2 and crit:
            a = crit[rng.integers(len(crit))]
        else:
            a = complex(*rng.normal(size=2))
        div = preimages(r, a)
        total = 0
        for p, m in div.entries:
            if not same_point(evaluate(r, p), a, 1e-6):
                mass_bad += 1
            total += mult_at(r, p, a)
        mass_bad += total != degree(r)
    ok = not bad and mass_bad == 0
    return Outcome("Riemann-Hurwitz suite", ok,
                   "; ".join(bad) + (f" {mass_bad} preimage-mass failures" if mass_bad else "")
                   if not ok else "50 maps: branching = 2d - 2; 100 pairs: preimage mass = d")


def metric_identities() -> Outcome:
    rng = np.random.default_rng(seed())
    xs = np.linspace(-1.5, 1.5, 20)
    ys = np.linspace(-1.5, 1.5, 10)
    z = (xs[None, :] + 1j * ys[:, None]).ravel()
    worst, viol = 0.0, 0
    for _ in range(10):
        F = rmap(rng.normal(size=4) + 1j * rng.normal(size=4))
        G = rmap(rng.normal(size=4) + 1j * rng.normal(size=4))
        m = af.metric_factors(af.WeierstrassData.explicit(F, G, [INF]), z)
        worst = max(worst, float(np.max(np.abs(m["dtau"] - m["dtau_nu"]) / m["dtau"])))
        inside = np.abs(m["nu"]) < 1
        viol += int(np.count_nonzero(m["g"][inside] >= m["dtau"][inside]))
    ok = worst <= 1e-12 and viol == 0
    return Outcome("metric identities", ok, f"max relative dtau mismatch {worst:.1e}, g >= dtau^2 at {viol} points")


def h3_conservation() -> Outcome:
    forms = ff.CanonicalForms.make(rmap([1]), rmap([0]))
    m = ff.mesh_h3(forms, Domain("disk", r_max=1.0), 64)
    f = m.extras["minkowski"]
    det = float(np.max(np.abs(np.linalg.det(m.extras["frames"]) - 1)))
    hyp = float(np.max(np.abs(ff.minkowski_inner(f, f) + 1)))
    height = float(np.max(np.abs(f[:, 0] + f[:, 3] - 1)))
    cls = ff.classify_rho(forms)
    ok = det <= 1e-9 and hyp <= 1e-8 and height <= 1e-8 and cls == "horosphere"
    return Outcome("H3 conservation", ok,
                   f"{m.n_vertices} vertices: |det - 1| {det:.1e}, |<f,f> + 1| {hyp:.1e}, |x0 + x3 - 1| {height:.1e}, {cls}")


def schwarzian() -> Outcome:
    forms = ff.CanonicalForms.make(rmap([1]), rmap([0, 1]), [INF])
    res = ff.schwarzian_check(forms, Domain("disk", r_max=0.8), 41, 1e-3)
    ok = res.status == "ok" and res.residual <= 1e-4
    return Outcome("Schwarzian identity", ok, f"max residual {res.residual:.2e} on {res.points} points")


def parallel_family() -> Outcome:
    rng = np.random.default_rng(seed())
    E = sl2_normalize(rng.normal(size=(100, 2, 2)) + 1j * rng.normal(size=(100, 2, 2)))
    f, n = ff.front_coords(E), ff.normal_coords(E)
    hyp = gap = 0.0
    future = True
    for t in (-1.0, 0.3, 2.0):
        ft, nt = ff.parallel(f, n, t)
        hyp = max(hyp, float(np.max(np.abs(ff.minkowski_inner(ft, ft) + 1))))
        gap = max(gap, float(np.max(np.abs(ft + nt - np.exp(t) * (f + n)))))
        future &= bool(np.all(ft[:, 0] > 0))
    ok = hyp <= 1e-9 and gap <= 1e-12 and future
    return Outcome("parallel family", ok, f"|<f_t,f_t> + 1| {hyp:.1e}, |f_t + n_t - e^t(f + n)| {gap:.1e}")


CRITERIA = [
    (sharpness_i, 1.0),
    (sharpness_ii, 5.0),
    (voss, None),
    (classifier, None),
    (riemann_hurwitz, 10.0),
    (metric_identities, None),
    (h3_conservation, None),
    (schwarzian, 30.0),
    (parallel_family, None),
]


def run_criterion(fn, limit=None) -> Outcome:
    t0 = time.perf_counter()
    try:
        out = fn()
    except Exception as exc:  # a crash is a failure of the criterion, reported on its line
        out = Outcome(fn.__name__, False, f"raised {type(exc).__name__}: {exc}")
    dt = time.perf_counter() - t0
    passed = out.passed and (limit is None or dt < limit)
    detail = out.detail if dt < (limit or np.inf) else f"{out.detail}; over time budget"
    return Outcome(out.name, passed, detail, dt, limit)


def run_all(echo=print) -> list[Outcome]:
    results = []
    for fn, limit in CRITERIA:
        out = run_criterion(fn, limit)
        echo(out.line())
        results.append(out)
    return results

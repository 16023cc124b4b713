from fractions import Fraction

import pytest

from afl.errors import ConstantMap, ValidationError
from afl.rational import INF, RationalMap, degree, same_point
from afl.valdist import (
    PuncturedSphere,
    critical_values,
    exceptional_values,
    ramification_report,
    rh_check,
    total_branching,
)

from conftest import random_map


def rmap(num, den=(1,)):
    return RationalMap.from_coeffs(num, den)


def as_set(points):
    return sorted((("inf", 0, 0) if p is INF else ("", round(p.real, 9) + 0.0, round(p.imag, 9) + 0.0)) for p in points)


def test_critical_values_examples():
    assert as_set(critical_values(rmap([0, 0, 1]))) == as_set([0j, INF])
    for n in range(2, 7):
        assert as_set(critical_values(rmap([0] * n + [1]))) == as_set([0j, INF])


def test_critical_values_z_plus_inverse():
    # critical points +-1 only; the poles 0 and infinity are simple
    assert as_set(critical_values(rmap([1, 0, 1], [0, 1]))) == as_set([2, -2])


def test_exceptional_values_examples():
    assert as_set(exceptional_values(rmap([0, 0, 1]), PuncturedSphere((0, INF)))) == as_set([0, INF])
    assert as_set(exceptional_values(rmap([0, 0, 0, 1]), PuncturedSphere((INF,)))) == as_set([INF])
    assert exceptional_values(rmap([0, 1]), PuncturedSphere()) == []


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
def test_report_zn_punctured_plane(n):
    rep = ramification_report(rmap([0] * n + [1]), PuncturedSphere((INF,)))
    assert rep.delta == 2 - Fraction(1, n)
    assert rep.D == 1
    assert rep.bound == 2 - Fraction(1, n)
    assert rep.sharp and rep.bound_holds
    assert rep.rh_total_branching == 2 * n - 2


@pytest.mark.parametrize("r", [1.0, 2.0])
def test_report_rotational(r):
    rep = ramification_report(rmap([0, 0, -1 / r**2]), PuncturedSphere((0, INF)))
    assert rep.delta == 2 and rep.D == 2 and rep.bound == 2 and rep.sharp


def test_report_identity_on_plane():
    rep = ramification_report(rmap([0, 1]), PuncturedSphere((INF,)))
    assert rep.delta == 1 and rep.D == 1 and rep.bound == 1 and rep.sharp
    assert rep.inv_R == Fraction(-1, 2)


def test_report_voss_omits_three_values():
    rep = ramification_report(rmap([0, 1]), PuncturedSphere((1, -1, INF)))
    assert as_set(rep.exceptional) == as_set([1, -1, INF])
    assert rep.delta == 3


def test_report_constant_map():
    with pytest.raises(ConstantMap):
        ramification_report(rmap([2.0]), PuncturedSphere())


def test_report_json_exact_delta():
    js = ramification_report(rmap([0, 0, 0, 1]), PuncturedSphere((INF,))).to_json()
    assert js["delta"] == {"num": 5, "den": 3, "float": 5 / 3}
    assert js["values"][0]["m"] in (3, "inf")


def test_rh_check_examples():
    assert rh_check(rmap([0, 0, 1]))
    for n in range(2, 9):
        assert total_branching(rmap([0] * n + [1])) == 2 * n - 2


def test_rh_check_random(rng):
    for _ in range(50):
        assert rh_check(random_map(rng))


def test_report_invariants_random(rng):
    for _ in range(30):
        nu = random_map(rng, 4)
        pts = [INF] + [complex(x, y) for x, y in rng.normal(size=(rng.integers(0, 3), 2))]
        rep = ramification_report(nu, PuncturedSphere(tuple(pts)))
        assert rep.D <= rep.delta
        weights = rep.D + sum(1 - Fraction(1, v.m) for v in rep.values if v.m is not None)
        assert weights == rep.delta
        assert rep.bound == 2 + 2 * rep.inv_R
        assert rep.rh_total_branching == 2 * degree(nu) - 2
        assert all(v.m is None or v.m >= 2 for v in rep.values)


def test_adding_puncture_never_decreases_delta(rng):
    for _ in range(25):
        nu = random_map(rng, 4)
        dom = PuncturedSphere()
        prev = ramification_report(nu, dom).delta
        # punctures at critical points and generic points
        extra = [INF, 0j] + [complex(x, y) for x, y in rng.normal(size=(3, 2))]
        for p in extra:
            if dom.is_puncture(p):
                continue
            dom = dom.with_puncture(p)
            cur = ramification_report(nu, dom).delta
            assert cur >= prev
            prev = cur


def test_punctures_must_be_distinct():
    with pytest.raises(ValidationError):
        PuncturedSphere((1.0, 1.0 + 1e-12))
    assert PuncturedSphere((0, INF)).k == 2


def test_exceptional_are_counted_in_delta():
    rep = ramification_report(rmap([0, 0, 1]), PuncturedSphere((0, INF)))
    for v in rep.values:
        if v.kind == "exceptional":
            assert v.weight == 1
    assert all(any(same_point(e, v.value) for v in rep.values) for e in rep.exceptional)

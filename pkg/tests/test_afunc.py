from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from support import candidate, moment, scalar

from gravinst import afunc
from gravinst.exactmath import parse_ratfunc, rf_eval, strip_pi

ALL = afunc.case_labels()


def nondegenerate():
    return [l for l in ALL if not scalar(l).degenerate]


# Kähler classes --------------------------------------------------------------------

def test_case_1a_areas():
    md = moment("1A")
    assert md.omega_F == parse_ratfunc("(1+a)/2")
    assert md.c1_omega == parse_ratfunc("2+a")


def test_case_3h_areas():
    cand = candidate("3H")
    k = afunc.assign_kahler(cand, {"E5": 1})
    assert (k.area("Z"), k.area("F"), k.area("Y")) == (3, 4, 2)
    assert k.omega(cand.config.generic_class) == 6
    assert k.c1() == 4
    assert all(k.area(e).is_zero() for e in cand.exceptional)


def test_pin_on_contracted_curve():
    cand = candidate("1A")
    with pytest.raises(afunc.AfuncError):
        afunc.assign_kahler(cand, {cand.exceptional[0]: 1, "Z": 1})


def test_too_few_pins():
    with pytest.raises(afunc.AfuncError):
        afunc.assign_kahler(candidate("1B"), {"Z": 1})


@pytest.mark.parametrize("label", ["1A", "2D", "3C", "3H"])
def test_kahler_class_is_linear(label):
    cand = candidate(label)
    k = afunc.assign_kahler(cand, afunc.case_entry(label)["pins"])
    cfg = cand.config
    # omega of a sum of classes is the sum of omegas
    for x in cfg.curves:
        for y in cfg.curves:
            both = tuple(a + b for a, b in zip(x.cls, y.cls))
            assert k.omega(both) == k.area(x.name) + k.area(y.name)


# Chern numbers ------------------------------------------------------------------------

def test_endpoint_rule_examples():
    half = Fraction(1, 2)
    assert afunc.endpoint_chern("minus", "point", 4, (half, half)) == -1
    assert afunc.endpoint_chern("plus", "point", 1, (-1, -1)) == 1
    assert afunc.endpoint_chern("plus", "curve", 1, self_intersection=-1) == 1
    assert afunc.endpoint_chern("minus", "curve", 3, self_intersection=1) == Fraction(1, 3)
    with pytest.raises(afunc.AfuncError):
        afunc.endpoint_chern("plus", "line")


def test_chern_endpoints_2d_1c():
    assert afunc.chern_endpoints(candidate("2D")) == (-1, 1)
    assert afunc.chern_endpoints(candidate("1C")) == (-2, 1)


@pytest.mark.parametrize("label", ALL)
def test_crossing_and_orbit_areas(label):
    md = moment(label)
    assert md.crossing_defect() == 0
    for p in md.interior:
        assert p.up_area + p.down_area == md.omega_F
        assert p.r > 0 > p.s


def test_crossing_violation_reported():
    md = moment("1C")
    bad = afunc.MomentData(md.omega_c_plus, md.omega_c_minus, md.omega_F, md.interior,
                           md.chern_plus + 1, md.chern_minus, md.c1_omega)
    with pytest.raises(afunc.AfuncError, match="crossing"):
        afunc.check_moment_data(bad)


# T-vector and the A(t) oracle ------------------------------------------------------------

def test_quotient_example():
    ex = afunc.evaluate_example("P2/Z3")
    assert ex.ok, ex.checks
    T = ex.T
    assert T.Ts == 12 * T.T1
    assert ex.s0 == 12


def test_quotient_example_is_degenerate():
    # the descended Fubini-Study class has constant scalar curvature
    ex = afunc.evaluate_example("P2/Z3")
    assert ex.h == afunc.DEGENERATE


def test_symmetric_ends_give_zero_ts():
    md = afunc.moment_data_from_fixture({
        "omega_c_plus": "1", "omega_c_minus": "1", "omega_F": "4",
        "chern_minus": "0", "chern_plus": "0", "c1_omega": "4",
    })
    assert afunc.compute_T(md).Ts.is_zero()


@pytest.mark.parametrize("label", ALL)
def test_oracle_matches_closed_formulas(label):
    md = moment(label)
    T = afunc.compute_T(md)
    assert (T.T0, T.T1, T.T2) == afunc.compute_T_oracle(md)


@pytest.mark.parametrize("label", ALL)
def test_area_profile_closes_up(label):
    md = moment(label)
    a, _, kinks = afunc.area_profile(md)
    assert afunc.area_at(md, a) == md.omega_c_plus
    if not md.params:
        # relative position of each kink along [-a, a]
        assert all(0 <= ((t + a) / (2 * a)).constant_value() <= 1 for t, _ in kinks)


@pytest.mark.parametrize("label", ALL)
def test_volume_is_half_square(label):
    md = moment(label)
    assert afunc.compute_T(md).T0 == md.omega_square / 2


# h, Futaki, min s ----------------------------------------------------------------------------

def test_3j_degenerate():
    md = moment("3J")
    T = afunc.compute_T(md)
    assert afunc.compute_h(T, afunc.scalar_average(md, T)) == afunc.DEGENERATE
    assert afunc.min_scalar(md) == afunc.DEGENERATE
    with pytest.raises(afunc.AfuncError):
        afunc.futaki(T, afunc.scalar_average(md, T), afunc.DEGENERATE)


def test_3c_limit_value():
    r = scalar("3C")
    assert r.degenerate
    assert r.min_s == parse_ratfunc("4*pi/(a-a^2)")
    assert rf_eval(r.min_s.substitute({"pi": 1}), {"a": Fraction(1, 2)}) == 16


def test_eguchi_hanson_zero():
    assert afunc.min_scalar(moment("EH")).is_zero()
    v = afunc.positivity_report(scalar("EH").min_s, (), ())
    assert v.label == "exact:identically-zero"


@pytest.mark.parametrize("label,value", [("3H", "24*pi/7"), ("3L", "96*pi/7"), ("3M", "600*pi/31")])
def test_constants(label, value):
    assert afunc.min_scalar(moment(label)) == parse_ratfunc(value)


@pytest.mark.parametrize("label", ["1A", "2E", "3A", "3H", "EH"])
@settings(max_examples=10)
@given(lam=st.fractions(Fraction(1, 5), 7, max_denominator=9))
def test_homogeneity(label, lam):
    md = moment(label)
    r, s = afunc.min_scalar_full(md), afunc.min_scalar_full(md.scaled(lam))
    assert s.min_s == r.min_s / lam
    assert s.h == r.h * lam * lam


def test_homogeneity_symbolic():
    md = moment("3E")
    lam = parse_ratfunc("t")
    assert afunc.min_scalar(md.scaled(lam)) == afunc.min_scalar(md) / lam


def test_futaki_nonpositive_on_domain():
    for label in nondegenerate():
        md = moment(label)
        f = scalar(label).futaki
        k, g = strip_pi(f)
        assert k == 2
        pts = afunc.domain_points(md.domain, md.params, density=8) if md.params else [{}]
        assert pts
        assert all(rf_eval(g, p) <= 0 for p in pts), label


def test_3h_futaki_negative():
    assert scalar("3H").futaki == parse_ratfunc("-64*pi^2/7")


def test_h_relation():
    # futaki = -int (s - s0)^2 reproduced from h: F = (-Ts + s0 T1)/h
    for label in nondegenerate():
        r = scalar(label)
        assert r.futaki == (-r.T.Ts + r.s0 * r.T.T1) / r.h


# positivity ----------------------------------------------------------------------------------

def test_positivity_exact_3e():
    md = moment("3E")
    v = afunc.positivity_report(scalar("3E").min_s, md.domain, md.params)
    assert (v.label, v.domain) == ("exact:strictly-positive", "0<a<2/3")


def test_positivity_sampled_2e():
    md = moment("2E")
    v = afunc.positivity_report(scalar("2E").min_s, md.domain, md.params)
    assert v.label == "sampled:strictly-positive" and v.witness is None
    assert v.samples >= 2500


def test_positivity_finds_sign_change():
    dom = (parse_ratfunc("a"), parse_ratfunc("b"))
    v = afunc.positivity_report(parse_ratfunc("pi*(a - b)"), dom, ("a", "b"), density=10)
    assert v.result == "has-zero"
    assert v.witness is not None


def test_positivity_boundary_probe_catches_thin_failure():
    # negative only within 1/100 of the face a = 0; interior ticks start at 2/5
    dom = (parse_ratfunc("a"), parse_ratfunc("b"))
    v = afunc.positivity_report(parse_ratfunc("a - 1/100"), dom, ("a", "b"), density=10, min_points=1)
    assert v.result == "has-zero"


def test_domain_text_and_interval():
    dom = (parse_ratfunc("a/3"), parse_ratfunc("2/3 - a"))
    assert afunc.domain_text(dom) == "a > 0, -3*a + 2 > 0"
    assert afunc.interval_of(dom, "a") == (0, Fraction(2, 3))


# permutation sums and certificates ------------------------------------------------------

def test_cyclic_sum_convention():
    abc = ("a", "b", "c")
    assert afunc.parse_cyclic("S(a)", abc) == parse_ratfunc("2*(a+b+c)")
    assert afunc.parse_cyclic("S(a*b*c)", abc) == parse_ratfunc("6*a*b*c")
    assert afunc.parse_cyclic("S(a^2*b)", ("a", "b")) == parse_ratfunc("a^2*b + b^2*a")


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3),
       st.permutations(["a", "b", "c"]))
def test_cyclic_sum_symmetric(exps, perm):
    mono = "*".join(f"{v}^{k}" for v, k in zip("abc", exps) if k) or "1"
    f = afunc.parse_cyclic(f"S({mono})", ("a", "b", "c"))
    g = parse_ratfunc(afunc.cyclic_sum(mono, perm))
    assert f == g


def test_certificate_checks():
    pts = afunc.domain_points((parse_ratfunc("a"), parse_ratfunc("b")), ("a", "b"))
    got = afunc.check_certificate(["S(a^2) >= 2*a*b", "a - b > 0"], ("a", "b"), pts)
    assert got == [("S(a^2) >= 2*a*b", True), ("a - b > 0", False)]


@pytest.mark.parametrize("label", [l for l in ALL if afunc.case_entry(l).get("certificates")])
def test_recorded_certificates(label):
    rep = afunc.evaluate_case(label, density=20, min_points=100)
    for ineq, holds, expected in rep.certificates:
        assert holds == expected, ineq


# whole pipeline ---------------------------------------------------------------------------

@pytest.mark.parametrize("label", ALL)
def test_case_matches_fixture(label):
    rep = afunc.evaluate_case(label)
    assert rep.ok, {k: v for k, v in rep.checks.items() if not v}
    out = rep.to_json()
    assert out["case"] == label and out["matches"]
    assert set(out["min_s"]) == {"num", "den"}

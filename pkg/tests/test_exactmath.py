from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from gravinst.exactmath import (
    HAS_POLE,
    HAS_ZERO,
    STRICTLY_NEGATIVE,
    STRICTLY_POSITIVE,
    MultiPoly,
    RatFunc,
    count_real_roots,
    divide_exact,
    isolate_real_roots,
    parse_poly,
    parse_ratfunc,
    poly_gcd,
    ratfunc_from_json,
    ratfunc_to_json,
    refine_root,
    rf_eval,
    rf_normalize,
    sign_on_interval,
    to_text,
)

VARS = ("a", "b", "c")
SYM = {v: sympy.Symbol(v) for v in VARS + ("pi",)}


def to_sympy(f):
    if isinstance(f, RatFunc):
        return to_sympy(f.num) / to_sympy(f.den)
    return sum(
        (sympy.Rational(c.numerator, c.denominator)
         * sympy.Mul(*[SYM[v] ** k for v, k in zip(f.variables, e)])
         for e, c in f.terms.items()),
        sympy.Integer(0),
    )


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)
exps = st.tuples(*[st.integers(0, 3)] * 3)


@st.composite
def polys(draw, max_terms=4):
    terms = draw(st.dictionaries(exps, small, max_size=max_terms))
    return MultiPoly(VARS, terms)


nonzero_polys = polys().filter(lambda p: not p.is_zero())
points = st.fixed_dictionaries({v: st.fractions(-3, 3, max_denominator=5) for v in VARS})


# rf_normalize --------------------------------------------------------------------

def test_common_factor_cancels():
    a = MultiPoly.var("a")
    f = rf_normalize(a * a - 1, a - 1)
    assert f.num == a + 1 and f.den == MultiPoly.const(1)


def test_sign_convention_is_canonical():
    f = rf_normalize(parse_poly("4*pi"), parse_poly("a - a^2"))
    g = rf_normalize(parse_poly("-4*pi"), parse_poly("a^2 - a"))
    assert f == g
    assert f.den.leading()[1] == 1


def test_zero_numerator():
    f = rf_normalize(MultiPoly.const(0), MultiPoly.var("a"))
    assert f.num.is_zero() and f.den == MultiPoly.const(1)


def test_zero_denominator_rejected():
    with pytest.raises(ZeroDivisionError):
        rf_normalize(MultiPoly.var("a"), MultiPoly.const(0))


@given(polys(), nonzero_polys, nonzero_polys)
def test_normalize_cancels_shared_factor(f, g, h):
    assert RatFunc(f * h, g * h) == RatFunc(f, g)


@given(polys(), nonzero_polys)
def test_normal_form_matches_sympy(f, g):
    r = RatFunc(f, g)
    assert sympy.simplify(to_sympy(r) - to_sympy(f) / to_sympy(g)) == 0
    if not r.is_zero():
        n, d = sympy.fraction(sympy.cancel(to_sympy(f) / to_sympy(g)))
        # same total degrees as sympy's reduced form
        deg = lambda e: sympy.Poly(e, *SYM.values()).total_degree()
        assert r.num.total_degree() == deg(n)
        assert r.den.total_degree() == deg(d)


# gcd -----------------------------------------------------------------------------

@given(nonzero_polys, nonzero_polys, nonzero_polys)
def test_gcd_against_sympy(f, g, h):
    got = poly_gcd(f * h, g * h)
    want = sympy.gcd(to_sympy(f * h), to_sympy(g * h))
    assert sympy.simplify(to_sympy(got) / want).is_number
    divide_exact(f * h, got)
    divide_exact(g * h, got)


def test_gcd_large_coefficient_products():
    a, b, c = (MultiPoly.var(v) for v in VARS)
    p = (3 * a * a * b - 7 * c + 11) * (a + b + c + 1) ** 3
    q = (5 * b * c - a + 2) * (a + b + c + 1) ** 2
    g = poly_gcd(p, q)
    assert g.total_degree() == 2
    assert divide_exact((a + b + c + 1) ** 2, g).is_constant()


def test_gcd_keeps_integer_content_of_inner_images():
    # images at b = xi are 32*(c + 1) and 32, whose gcd is 32, not 1
    f, g = parse_poly("(c^2 + c)*(b*c + c)"), parse_poly("b*c + c")
    assert poly_gcd(f, g) == g
    assert RatFunc(f, g) == RatFunc(parse_poly("c^2 + c"))


def test_gcd_coprime():
    a, b = MultiPoly.var("a"), MultiPoly.var("b")
    assert poly_gcd(a * a + b, a + b * b + 1).is_constant()


def test_divide_exact_rejects_remainder():
    a = MultiPoly.var("a")
    with pytest.raises(ValueError):
        divide_exact(a * a + 1, a + 1)


# field axioms and evaluation ---------------------------------------------------------

@given(polys(), nonzero_polys, polys(), nonzero_polys)
def test_field_axioms(n1, d1, n2, d2):
    f, g = RatFunc(n1, d1), RatFunc(n2, d2)
    assert (f + g) - g == f
    if not g.is_zero():
        assert (f * g) / g == f


@given(polys(), nonzero_polys, polys(), nonzero_polys, points)
def test_eval_commutes_with_arithmetic(n1, d1, n2, d2, pt):
    f, g = RatFunc(n1, d1), RatFunc(n2, d2)
    assume(f.den.evaluate(pt) != 0 and g.den.evaluate(pt) != 0)
    assert rf_eval(f + g, pt) == rf_eval(f, pt) + rf_eval(g, pt)
    assert rf_eval(f * g, pt) == rf_eval(f, pt) * rf_eval(g, pt)


@given(polys(), nonzero_polys, nonzero_polys)
def test_construction_order_irrelevant(f, g, h):
    x = RatFunc(f) / RatFunc(g) * RatFunc(h)
    y = RatFunc(h) * (RatFunc(f) / RatFunc(g))
    assert x == y and to_text(x) == to_text(y)


def test_eval_examples():
    assert rf_eval(parse_ratfunc("(a+1)/a"), {"a": 1}) == 2
    f = parse_ratfunc("4*pi/(a-a^2)")
    assert f.substitute({"a": Fraction(1, 2)}) == parse_ratfunc("16*pi")
    assert parse_ratfunc("24*pi/7").substitute({"a": 3}) == parse_ratfunc("pi*24/7")


def test_pole_raises():
    with pytest.raises(ZeroDivisionError):
        rf_eval(parse_ratfunc("1/a"), {"a": 0})


# text and JSON ---------------------------------------------------------------------

@given(polys(), nonzero_polys)
def test_text_round_trip(f, g):
    r = RatFunc(f, g)
    assert parse_ratfunc(to_text(r)) == r


@given(polys(), nonzero_polys)
def test_json_round_trip(f, g):
    r = RatFunc(f, g)
    assert ratfunc_from_json(ratfunc_to_json(r)) == r


def test_text_format():
    assert to_text(parse_ratfunc("a^2*b - 3*a + 1/2")) == "a^2*b - 3*a + 1/2"
    assert to_text(parse_ratfunc("4*pi/(a-a^2)")) == "(-4*pi)/(a^2 - a)"


@pytest.mark.parametrize("bad", ["a +", "2**a", "sin(a)", "1.5*a"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, TypeError)):
        parse_ratfunc(bad)


# real roots -----------------------------------------------------------------------

def test_sqrt_two_isolated():
    p = parse_poly("a^2 - 2")
    (iv,) = isolate_real_roots(p, (0, 2))
    lo, hi = refine_root(p, iv, Fraction(1, 10**6))
    assert lo < Fraction(14142136, 10**7) and hi > Fraction(14142135, 10**7)


@pytest.mark.parametrize("text", ["9*a^3 - 26*a^2 + 24*a - 8", "a - a^2"])
def test_no_roots_in_unit_interval(text):
    assert count_real_roots(parse_poly(text), (0, 1)) == 0


def test_repeated_and_endpoint_roots():
    p = parse_poly("(a - 1/2)^3*(a - 1)*(a + 1)")
    assert count_real_roots(p, (0, 1)) == 1
    assert count_real_roots(p, (-2, 2)) == 3


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=7))
def test_root_count_matches_sympy(coeffs):
    p = MultiPoly.from_univariate("a", coeffs)
    assume(not p.is_constant())
    want = len([r for r in sympy.Poly(list(reversed(coeffs)), SYM["a"]).real_roots()
                if -3 < r < 3])
    distinct = len({r for r in sympy.Poly(list(reversed(coeffs)), SYM["a"]).real_roots()
                    if -3 < r < 3})
    assert count_real_roots(p, (-3, 3)) == distinct <= want


@given(st.lists(st.integers(-6, 6), min_size=2, max_size=7))
def test_root_count_matches_sign_changes(coeffs):
    # simple roots only, so every root is a sign change of a fine grid
    p = MultiPoly.from_univariate("a", coeffs)
    assume(not p.is_constant())
    sp = sympy.Poly(list(reversed(coeffs)), SYM["a"])
    assume(sympy.degree(sympy.gcd(sp, sp.diff())) == 0)
    roots = sorted(float(r) for r in sp.real_roots() if -3 < r < 3)
    assume(all(b - a > 1e-2 for a, b in zip(roots, roots[1:])))
    assume(all(abs(abs(r) - 3) > 1e-2 for r in roots))
    grid = [Fraction(-3) + Fraction(6 * k, 2000) for k in range(2001)]
    vals = [p.evaluate({"a": x}) for x in grid]
    signs = [v > 0 for v in vals if v != 0]
    changes = sum(1 for u, v in zip(signs, signs[1:]) if u != v)
    assert count_real_roots(p, (-3, 3)) == changes


# sign verdicts ---------------------------------------------------------------------

def test_sign_examples():
    assert sign_on_interval(parse_ratfunc("4*pi/(a-a^2)"), (0, 1)) == STRICTLY_POSITIVE
    g = parse_ratfunc("-216*pi*(6*a^4-12*a^3+12*a^2-6*a+1)"
                      "/(972*a^6-2916*a^5+3564*a^4-2268*a^3+774*a^2-126*a+7)")
    assert sign_on_interval(g, (Fraction(1, 3), Fraction(2, 3))) == STRICTLY_POSITIVE
    assert sign_on_interval(parse_ratfunc("(a-1/2)/a"), (0, 1)) == HAS_ZERO
    assert sign_on_interval(parse_ratfunc("1/(a-1/2)"), (0, 1)) == HAS_POLE
    assert sign_on_interval(parse_ratfunc("-pi^2*(a+1)"), (0, 1)) == STRICTLY_NEGATIVE


def test_sign_needs_one_parameter():
    with pytest.raises(ValueError):
        sign_on_interval(parse_ratfunc("a*b"), (0, 1))

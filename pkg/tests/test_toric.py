from __future__ import annotations

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from gravinst.toric import (
    CyclicGroup,
    NonCyclicGroup,
    b_gamma,
    chain_to_json,
    det,
    fan_chain,
    hj_expand,
    hj_value,
    noncyclic_weight_star,
    parse_group,
    recover_group,
    star_resolution,
    verify_exceptional_parametrization,
    weight_chain,
    weight_chain_recursive,
)


@st.composite
def groups(draw, max_p=60):
    p = draw(st.integers(2, max_p))
    q = draw(st.integers(1, p - 1))
    assume(math.gcd(p, q) == 1)
    return CyclicGroup(q, p)


@st.composite
def theta_tau(draw):
    tau = draw(st.fractions(0, 10, max_denominator=6))
    theta = tau + draw(st.fractions(0, 10, max_denominator=6))
    assume(theta > 0)
    return theta, tau


# Hirzebruch-Jung --------------------------------------------------------------------

@pytest.mark.parametrize("q,p,e", [(1, 2, [2]), (3, 4, [2, 2, 2]), (2, 3, [2, 2]), (1, 5, [5]), (2, 5, [3, 2])])
def test_hj_examples(q, p, e):
    assert hj_expand(CyclicGroup(q, p)) == e


def test_trivial_group_has_empty_chain():
    assert hj_expand(CyclicGroup(1, 1)) == []
    assert fan_chain(CyclicGroup(1, 1)) == [(0, 1), (1, 0)]


@given(groups())
def test_nested_fraction_reconstructs(g):
    e = hj_expand(g)
    assert all(x >= 2 for x in e)
    assert hj_value(e) == Fraction(g.q, g.p)


@pytest.mark.parametrize("label", ["L(2,4)", "L(0,3)", "L(5,3)"])
def test_invalid_groups(label):
    with pytest.raises(ValueError):
        parse_group(label)


# fans ----------------------------------------------------------------------------------

def test_fan_examples():
    assert fan_chain(CyclicGroup(1, 2)) == [(0, 1), (1, 0), (2, -1)]
    assert fan_chain(CyclicGroup(3, 4)) == [(0, 1), (1, 0), (2, -1), (3, -2), (4, -3)]


@given(groups())
def test_fan_is_unimodular_and_ends_at_p_minus_q(g):
    v = fan_chain(g)
    assert all(det(v[i + 1], v[i]) == 1 for i in range(len(v) - 1))
    assert v[-1] == (g.p, -g.q)


@pytest.mark.parametrize("p", range(2, 10))
def test_exceptional_parametrization_su2(p):
    assert verify_exceptional_parametrization(CyclicGroup(p - 1, p))


@given(groups(30))
def test_exceptional_parametrization_all(g):
    assert verify_exceptional_parametrization(g)


# weights ----------------------------------------------------------------------------------

def test_weight_examples():
    assert list(weight_chain(CyclicGroup(1, 2), 1, 1).w) == [2, 0, -2]
    assert list(weight_chain(CyclicGroup(3, 4), 2, 1).w) == [8, 5, 2, -1, -4]


@given(groups())
def test_tau_zero_weights_positive(g):
    assert all(w > 0 for w in weight_chain(g, 1, 0).w[:-1])
    assert weight_chain(g, 1, 0).w[-1] == 0


@given(groups(), theta_tau())
def test_formula_matches_recursion(g, tt):
    theta, tau = tt
    assert list(weight_chain(g, theta, tau).w) == weight_chain_recursive(g, theta, tau)


@given(st.integers(2, 40), theta_tau())
def test_su2_weights_arithmetic_progression(p, tt):
    theta, tau = tt
    w = weight_chain(CyclicGroup(p - 1, p), theta, tau).w
    steps = {b - a for a, b in zip(w, w[1:])}
    assert len(steps) == 1
    assert w[0] == theta * p and w[-1] == -tau * p
    assert all(b < a for a, b in zip(w, w[1:]))


def test_recover_examples():
    assert recover_group((8, -5), 2, 1, "y0-side") == CyclicGroup(3, 4)
    # w_k = theta - tau * (q^-1 mod p) = 2 - 3, so the x0 end is [-1, 4]
    assert recover_group((-1, 4), 2, 1, "x0-side") == CyclicGroup(3, 4)
    assert weight_chain(CyclicGroup(3, 4), 2, 1).x0_end() == (-1, 4)
    assert recover_group((2, 0), 1, 1, "y0-side") == CyclicGroup(1, 2)


@given(groups(), theta_tau())
def test_recover_round_trip(g, tt):
    theta, tau = tt
    wc = weight_chain(g, theta, tau)
    assert recover_group(wc.y0_end(), theta, tau, "y0-side") == g
    if tau:
        assert recover_group(wc.x0_end(), theta, tau, "x0-side") == g


def test_recover_rejects_bad_side():
    with pytest.raises(ValueError):
        recover_group((8, -5), 2, 1, "middle")


# stars --------------------------------------------------------------------------------------

@pytest.mark.parametrize("label,dynkin,arms", [
    ("D*(1,2)", "D4", ((2,), (2,), (2,))),
    ("T*(1)", "E6", ((2,), (2, 2), (2, 2))),
    ("O*(1)", "E7", ((2,), (2, 2), (2, 2, 2))),
    ("I*(1)", "E8", ((2,), (2, 2), (2, 2, 2, 2))),
])
def test_star_examples(label, dynkin, arms):
    s = star_resolution(parse_group(label))
    assert s.central_self_intersection == -2
    assert s.arms == arms
    assert s.dynkin() == dynkin


@pytest.mark.parametrize("g", [NonCyclicGroup("D*", 1, 2), NonCyclicGroup("I*", 1),
                               NonCyclicGroup("T*", 1), NonCyclicGroup("D*", 1, 5)])
def test_b_gamma_m1(g):
    assert b_gamma(g) == 2


def test_weight_star():
    s = noncyclic_weight_star(NonCyclicGroup("D*", 1, 2))
    assert all(w[0] > 0 for w in s.arm_weights)
    assert s.orbifold_weights == (Fraction(1, 2), Fraction(1, 2))
    s3 = noncyclic_weight_star(NonCyclicGroup("D*", 3, 2))
    assert s3.orbifold_weights == (Fraction(1, 6), Fraction(1, 6))


def test_chain_json():
    out = chain_to_json(CyclicGroup(3, 4), 2, 1)
    assert out == {"group": "L(3,4)", "e": [2, 2, 2],
                   "v": [[0, 1], [1, 0], [2, -1], [3, -2], [4, -3]],
                   "w": ["8", "5", "2", "-1", "-4"]}

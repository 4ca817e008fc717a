from __future__ import annotations

import dataclasses
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from support import candidate

from gravinst.census import catalog_entries
from gravinst.surface import (
    ALLOWED,
    BlowUpError,
    blow_up,
    blow_up_sequence,
    canonical_form,
    canonical_labeling,
    check_invariants,
    classify,
    config_to_json,
    euler_count,
    find_ade_components,
    prune_filter,
    seed_h2,
    seed_p2,
    targets,
)

SEEDS = [("type-i", 2, 1), ("type-ii", 2, 1), ("type-iii", 2, 1), ("type-iii", 3, 1), ("type-iii", 4, 3)]


def weights(cfg, names=None):
    return sorted(tuple(p.weights) for p in cfg.points if names is None or p.name in names)


def build(label):
    return next(e for e in catalog_entries() if e.label == label).build()


@st.composite
def configs(draw, max_steps=6):
    cfg = seed_p2(*draw(st.sampled_from(SEEDS)))
    for _ in range(draw(st.integers(0, max_steps))):
        ts = targets(cfg)
        cfg = blow_up(cfg, ts[draw(st.integers(0, len(ts) - 1))])
    return cfg


# seeds ----------------------------------------------------------------------------

def test_type_iii_seed_weights():
    cfg = seed_p2("type-iii", 2, 1)
    assert cfg.point(cfg.c_minus).weights == (1, 2)


def test_type_i_seed():
    cfg = seed_p2("type-i")
    assert cfg.point(cfg.c_minus).weights == (1, 1)
    assert cfg.curve("Z").fixed and cfg.c_plus == "Z"


@pytest.mark.parametrize("seed", SEEDS)
def test_seed_euler_count(seed):
    assert euler_count(seed_p2(*seed)) == (3, 3)
    assert check_invariants(seed_p2(*seed)) == []


def test_bad_seed():
    with pytest.raises(ValueError):
        seed_p2("type-iv")


def test_eguchi_hanson_seed():
    c = seed_h2()
    assert (c.ade_type, c.degree, c.picard_rank) == ("A1", 8, 1)


# blow-ups ---------------------------------------------------------------------------

def test_blow_up_type_iii_source():
    cfg = blow_up(seed_p2("type-iii", 2, 1), "X∩Y")
    assert weights(cfg, [p.name for p in cfg.points if "E1" in p.curves()]) == [(1, 1), (2, -1)]


def test_blow_up_equal_weights_gives_fixed_curve():
    cfg = blow_up(seed_p2("type-i"), "X∩Y")
    assert cfg.curve("E1").fixed


def test_blow_up_on_fixed_curve_point():
    cfg = blow_up(seed_p2("type-i"), "X∩Z")
    on_e = [p.name for p in cfg.points if "E1" in p.curves()]
    assert weights(cfg, on_e) == [(-1, 0), (-1, 1)]


def test_unknown_target():
    with pytest.raises(BlowUpError):
        blow_up(seed_p2("type-i"), "Q∩R")


@given(configs(), st.randoms(use_true_random=False))
def test_blow_up_preserves_invariants(cfg, rnd):
    t = rnd.choice(targets(cfg))
    new = blow_up(cfg, t)
    got, want = euler_count(new)
    assert got == want == 3 + new.n_blowups
    assert check_invariants(new) == []
    assert new.canonical_class == (-3,) + (1,) * new.n_blowups


@given(configs(), st.randoms(use_true_random=False))
def test_blow_up_leaves_distant_curves_alone(cfg, rnd):
    t = rnd.choice(targets(cfg))
    new = blow_up(cfg, t)
    through = set(t[1:]) if isinstance(t, tuple) else set(cfg.point(t).curves())
    for c in cfg.curves:
        if c.name in through:
            continue
        d = new.curve(c.name)
        assert d.fixed == c.fixed
        assert d.cls == c.cls + (0,) * (new.rank - cfg.rank)


# pruning -------------------------------------------------------------------------------

def test_prune_point_on_minus_two_curve():
    cfg = blow_up_sequence(seed_p2("type-iii", 2, 1), ["X∩Y", "X∩E1"])
    assert cfg.self_intersection("E1") == -2
    assert prune_filter(cfg, "E1∩Y").startswith("forbidden")


def test_prune_corollary_rule():
    cfg = blow_up_sequence(seed_p2("type-iii", 2, 1), ["X∩Y", "X∩E1"])
    assert prune_filter(cfg, "X∩E2", "lattice-only") == ALLOWED
    assert prune_filter(cfg, "X∩E2", "corollary").startswith("forbidden")


def test_prune_on_zero_curves_allowed():
    cfg = seed_p2("type-ii")
    assert all(prune_filter(cfg, t, "corollary") == ALLOWED for t in targets(cfg))


def test_prune_unknown_mode():
    with pytest.raises(ValueError):
        prune_filter(seed_p2("type-i"), "X∩Y", "aggressive")


# ADE and contraction ---------------------------------------------------------------------

def test_ade_components():
    assert [t for _, t in find_ade_components(build("2E"))] == ["D4"]
    assert len(find_ade_components(build("2E"))[0][0]) == 4
    assert find_ade_components(build("1A")) == [(("E1",), "A1")]
    assert find_ade_components(seed_p2("type-i")) == []


def test_orbifold_weights():
    assert candidate("2D").orbifold_weights == (Fraction(1, 2), Fraction(1, 2))
    v = classify(build("2C"))
    assert not v.ok
    assert v.orbifold_weights == (Fraction(2, 3), Fraction(1, 3))


def test_e8_case():
    c = candidate("3M")
    assert (c.ade_type, c.degree, c.picard_rank) == ("E8", 1, 1)


@pytest.mark.parametrize("entry", [e for e in catalog_entries() if e.verdict == "candidate"],
                         ids=lambda e: e.label)
def test_fano_filter(entry):
    c = candidate(entry.label)
    cfg = c.config
    assert c.degree > 0
    for curve in cfg.curves:
        mk = cfg.minus_k(curve.cls)
        assert (mk == 0) == (curve.name in c.exceptional)
        assert mk >= 0
    assert (c.ade_type, c.group_label, c.picard_rank, c.degree) == (
        entry_ade(entry), entry.group, entry.picard_rank, entry.degree)


def entry_ade(entry):
    from gravinst.fixtures import load_catalog

    return next(d["ade"] for d in load_catalog()["cases"] if d["label"] == entry.label)


# canonical forms --------------------------------------------------------------------------

@pytest.mark.parametrize("a,b", [("2B", "1C"), ("3F", "3E"), ("3I", "3E"), ("3B", "2D")])
def test_biholomorphic_pairs(a, b):
    assert canonical_form(build(a)) == canonical_form(build(b))


@pytest.mark.parametrize("a,b", [("1A", "1B"), ("3E", "3H"), ("2E", "3C")])
def test_distinct_cases(a, b):
    assert canonical_form(build(a)) != canonical_form(build(b))


def _permute_basis(cfg, perm):
    """Reorder the exceptional classes e_1..e_n by ``perm``."""
    order = [0] + [1 + i for i in perm]
    move = lambda v: tuple(v[i] for i in order)
    return dataclasses.replace(
        cfg,
        curves=tuple(dataclasses.replace(c, cls=move(c.cls)) for c in reversed(cfg.curves)),
        points=tuple(reversed(cfg.points)),
        gram=tuple(move(cfg.gram[i]) for i in order),
        canonical_class=move(cfg.canonical_class),
        generic_class=move(cfg.generic_class),
    )


@given(configs(), st.randoms(use_true_random=False))
def test_canonical_form_relabel_invariant(cfg, rnd):
    perm = list(range(cfg.n_blowups))
    rnd.shuffle(perm)
    assert canonical_form(_permute_basis(cfg, perm)) == canonical_form(cfg)


@given(st.integers(1, 7), st.randoms(use_true_random=False), st.data())
def test_canonical_labeling_permutation_invariant(n, rnd, data):
    labels = [data.draw(st.sampled_from("xyz")) for _ in range(n)]
    edges = {}
    for i in range(n):
        for j in range(i + 1, n):
            lab = data.draw(st.sampled_from([None, "1", "2"]))
            if lab:
                edges[(i, j)] = lab
    perm = list(range(n))
    rnd.shuffle(perm)
    plabels = [None] * n
    for i, l in enumerate(labels):
        plabels[perm[i]] = l
    pedges = {(min(perm[i], perm[j]), max(perm[i], perm[j])): l for (i, j), l in edges.items()}
    assert canonical_labeling(plabels, pedges) == canonical_labeling(labels, edges)


def test_config_json_is_deterministic():
    a = json.dumps(config_to_json(build("3G")), sort_keys=True)
    b = json.dumps(config_to_json(build("3G")), sort_keys=True)
    assert a == b


def test_random_sequences_stay_legal():
    rng = random.Random(3)
    for _ in range(300):
        cfg = seed_p2(*rng.choice(SEEDS))
        for _ in range(rng.randint(1, 7)):
            cfg = blow_up(cfg, rng.choice(targets(cfg)))
            assert check_invariants(cfg) == []

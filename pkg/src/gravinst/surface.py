"""Equivariant rational surfaces built from P^2 (or H_2) by blowing up fixed points.

A configuration records every invariant curve that is not a generic orbit
closure, with its Picard class, plus every fixed point with the weights of
the C*-action on its tangent space.  Generic orbit closures are tracked only
through their common class and their two end sets (the source c_- and the
sink c_+).

Conventions: a positive weight along a curve at a point means the flow leaves
the point along that curve.  A fixed point with one zero weight lies on a
fixed curve, which is then ``axes[1]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .exactmath import as_rational, rational_str
from .toric import (
    ade_group,
    ade_order,
    recover_group,
    star_resolution,
    fan_chain,
    CyclicGroup,
)

Vec = Tuple[int, ...]


def frac_gcd(a: Fraction, b: Fraction) -> Fraction:
    a, b = abs(as_rational(a)), abs(as_rational(b))
    den = a.denominator * b.denominator // math.gcd(a.denominator, b.denominator)
    return Fraction(math.gcd(int(a * den), int(b * den)), den)


@dataclass(frozen=True)
class Curve:
    name: str
    cls: Vec
    fixed: bool = False
    normal_weight: Fraction = Fraction(0)


@dataclass(frozen=True)
class FixedPoint:
    """A fixed point of the action.

    ``axes`` name the curves along ``weights[0]`` and ``weights[1]``; it is
    empty for equal weights, where every invariant curve through the point is
    a smooth branch listed in ``lines``.  At a same-sign point with unequal
    weights, ``germs`` are the other orbit closures through it (tangent to the
    axis of smaller absolute weight).
    """

    name: str
    weights: Tuple[Fraction, Fraction]
    axes: Tuple[str, ...] = ()
    germs: Tuple[str, ...] = ()
    lines: Tuple[str, ...] = ()

    @property
    def equal(self) -> bool:
        return self.weights[0] == self.weights[1]

    @property
    def on_fixed_curve(self) -> bool:
        return self.weights[1] == 0

    @property
    def source(self) -> bool:
        return self.weights[0] > 0 and self.weights[1] > 0

    @property
    def sink(self) -> bool:
        return self.weights[0] < 0 and self.weights[1] < 0

    @property
    def saddle(self) -> bool:
        return self.weights[0] * self.weights[1] < 0

    def germ_data(self) -> Tuple[int, int, int]:
        """(small-axis index, reduced small weight, reduced large weight)."""
        a, b = self.weights
        g = frac_gcd(a, b)
        small = 0 if abs(a) < abs(b) else 1
        s, l = abs(self.weights[small]) / g, abs(self.weights[1 - small]) / g
        return small, int(s), int(l)

    def germ_weight(self) -> Fraction:
        a, b = self.weights
        g = frac_gcd(a, b)
        return g if a > 0 else -g

    def germ_multiplicity(self) -> int:
        if self.equal:
            return 1
        return self.germ_data()[1]

    def curves(self) -> Tuple[str, ...]:
        return self.lines + self.axes + self.germs


@dataclass(frozen=True)
class Incidence:
    point: str
    curve: str
    weight: Fraction
    role: str  # axis | fixed | germ | line
    multiplicity: int = 1


def incidences(p: FixedPoint) -> List[Incidence]:
    if p.equal:
        return [Incidence(p.name, c, p.weights[0], "line") for c in p.lines]
    out = [
        Incidence(p.name, p.axes[0], p.weights[0], "axis"),
        Incidence(p.name, p.axes[1], p.weights[1], "fixed" if p.weights[1] == 0 else "axis"),
    ]
    if p.germs:
        m, w = p.germ_multiplicity(), p.germ_weight()
        out += [Incidence(p.name, g, w, "germ", m) for g in p.germs]
    return out


def local_intersection(p: FixedPoint, c1: str, c2: str) -> int:
    """Local intersection number at p of two distinct invariant curves through it."""
    if p.equal:
        return 1
    roles = {}
    for c in (c1, c2):
        if c in p.germs:
            roles[c] = "germ"
        else:
            roles[c] = p.axes.index(c)
    if "germ" not in roles.values():
        return 1
    small, s, l = p.germ_data()
    if roles[c1] == "germ" and roles[c2] == "germ":
        return s * l
    other = roles[c2] if roles[c1] == "germ" else roles[c1]
    return l if other == small else s


def germ_delta(p: FixedPoint) -> int:
    """Delta invariant of an orbit-closure germ through a same-sign point."""
    if p.equal:
        return 0
    _, s, l = p.germ_data()
    return (s - 1) * (l - 1) // 2


@dataclass(frozen=True)
class SurfaceConfig:
    curves: Tuple[Curve, ...]
    points: Tuple[FixedPoint, ...]
    gram: Tuple[Vec, ...]
    canonical_class: Vec
    generic_class: Vec
    c_minus: str
    c_plus: str
    seed_tag: str
    history: Tuple[str, ...] = ()
    counters: Tuple[int, int, int] = (1, 1, 0)

    # lookup ---------------------------------------------------------------
    def curve(self, name: str) -> Curve:
        for c in self.curves:
            if c.name == name:
                return c
        raise KeyError(f"unknown curve {name!r}")

    def point(self, name: str) -> FixedPoint:
        for p in self.points:
            if p.name == name:
                return p
        raise KeyError(f"unknown fixed point {name!r}")

    def has_curve(self, name: str) -> bool:
        return any(c.name == name for c in self.curves)

    def has_point(self, name: str) -> bool:
        return any(p.name == name for p in self.points)

    # lattice ------------------------------------------------------------------
    @property
    def rank(self) -> int:
        return len(self.gram)

    @property
    def n_blowups(self) -> int:
        return self.rank - 1

    def dot(self, u: Vec, v: Vec) -> int:
        g = self.gram
        total = 0
        for i, ui in enumerate(u):
            if ui:
                row = g[i]
                for j, vj in enumerate(v):
                    if vj and row[j]:
                        total += ui * row[j] * vj
        return total

    def self_intersection(self, name: str) -> int:
        c = self.curve(name).cls
        return self.dot(c, c)

    def minus_k(self, cls: Vec) -> int:
        return -self.dot(self.canonical_class, cls)

    def degree(self) -> int:
        return self.dot(self.canonical_class, self.canonical_class)

    # incidence ------------------------------------------------------------------
    def incidences(self) -> List[Incidence]:
        out: List[Incidence] = []
        for p in self.points:
            out += incidences(p)
        return out

    def incidences_of(self, curve: str) -> List[Incidence]:
        return [i for i in self.incidences() if i.curve == curve]

    def ends(self, curve: str) -> Tuple[Incidence, Incidence]:
        """(source end, sink end) of a non-fixed curve."""
        inc = self.incidences_of(curve)
        src = [i for i in inc if i.weight > 0]
        snk = [i for i in inc if i.weight < 0]
        if len(src) != 1 or len(snk) != 1 or len(inc) != 2:
            raise ValueError(f"curve {curve} does not have exactly one source and one sink end")
        return src[0], snk[0]

    def is_generic(self, name: str) -> bool:
        """Non-fixed curve indistinguishable from a generic orbit closure."""
        c = self.curve(name)
        return not c.fixed and c.cls == self.generic_class

    def delta(self, name: str) -> int:
        """Sum of local delta invariants of the singular points of a curve."""
        return sum(germ_delta(self.point(i.point)) for i in self.incidences_of(name) if i.role == "germ")

    def generic_multiplicity(self, end: str) -> int:
        if self.has_point(end):
            return self.point(end).germ_multiplicity()
        return 1

    def points_on(self, *curves: str) -> List[FixedPoint]:
        return [p for p in self.points if all(c in p.curves() for c in curves)]


# seeds -----------------------------------------------------------------------

def _p2_gram(n: int) -> Tuple[Vec, ...]:
    return tuple(tuple((1 if i == 0 else -1) if i == j else 0 for j in range(n + 1)) for i in range(n + 1))


F0, F1 = Fraction(0), Fraction(1)
H = (1,)


def seed_p2(action: str, alpha: int = 2, beta: int = 1) -> SurfaceConfig:
    """P^2 with t.[x:y:z] = [tx:ty:z] (type-i), [x:y:tz] (type-ii) or [t^a x:t^b y:z]."""
    gram, K = _p2_gram(0), (-3,)
    if action in ("type-i", "i"):
        return SurfaceConfig(
            curves=(Curve("X", H), Curve("Y", H), Curve("Z", H, True, -F1)),
            points=(
                FixedPoint("q0", (F1, F1), lines=("X", "Y")),
                FixedPoint("q1", (-F1, F0), axes=("X", "Z")),
                FixedPoint("q2", (-F1, F0), axes=("Y", "Z")),
            ),
            gram=gram, canonical_class=K, generic_class=H,
            c_minus="q0", c_plus="Z", seed_tag="type-i", counters=(1, 1, 3),
        )
    if action in ("type-ii", "ii"):
        return SurfaceConfig(
            curves=(Curve("X", H), Curve("Y", H), Curve("Z", H, True, F1)),
            points=(
                FixedPoint("q0", (-F1, -F1), lines=("X", "Y")),
                FixedPoint("q1", (F1, F0), axes=("X", "Z")),
                FixedPoint("q2", (F1, F0), axes=("Y", "Z")),
            ),
            gram=gram, canonical_class=K, generic_class=H,
            c_minus="Z", c_plus="q0", seed_tag="type-ii", counters=(1, 1, 3),
        )
    if action in ("type-iii", "iii"):
        if not (alpha > beta > 0) or math.gcd(alpha, beta) != 1:
            raise ValueError("type-iii needs coprime alpha > beta > 0")
        a, b = Fraction(alpha), Fraction(beta)
        return SurfaceConfig(
            curves=(Curve("X", H), Curve("Y", H), Curve("Z", H)),
            points=(
                FixedPoint("q0", (b, a), axes=("X", "Y")),
                FixedPoint("q1", (-b, a - b), axes=("X", "Z")),
                FixedPoint("q2", (b - a, -a), axes=("Z", "Y")),
            ),
            gram=gram, canonical_class=K, generic_class=(alpha,),
            c_minus="q0", c_plus="q2", seed_tag=f"type-iii({alpha},{beta})", counters=(1, 1, 3),
        )
    raise ValueError(f"unknown seed action {action!r}")


def h2_config() -> SurfaceConfig:
    """Hirzebruch surface H_2 in the basis (fiber f, negative section s)."""
    return SurfaceConfig(
        curves=(Curve("Cinf", (0, 1), True, F1), Curve("C0", (2, 1), True, -F1)),
        points=(),
        gram=((0, 1), (1, -2)),
        canonical_class=(-4, -2),
        generic_class=(1, 0),
        c_minus="Cinf", c_plus="C0", seed_tag="H2",
    )


# blow-ups ---------------------------------------------------------------------

Target = Union[str, Tuple[str, str]]


class BlowUpError(ValueError):
    pass


def resolve_target(cfg: SurfaceConfig, text: str) -> Target:
    """Accept a point id, ``generic:C`` or ``A∩B`` (also ``A^B``)."""
    text = text.strip()
    if text.startswith("generic:"):
        return ("generic", text.split(":", 1)[1].strip())
    for sep in ("∩", "^"):
        if sep in text:
            a, b = (s.strip() for s in text.split(sep))
            hits = [p for p in cfg.points_on(a, b) if not _germ_only(p, a, b)]
            if len(hits) != 1:
                raise BlowUpError(f"{text}: expected one intersection point, found {len(hits)}")
            return hits[0].name
    if cfg.has_point(text):
        return text
    raise BlowUpError(f"cannot resolve blow-up target {text!r}")


def _germ_only(p: FixedPoint, a: str, b: str) -> bool:
    return a in p.germs and b in p.germs


def describe_target(cfg: SurfaceConfig, target: Target) -> str:
    if isinstance(target, tuple):
        return f"generic:{target[1]}"
    p = cfg.point(target)
    names = p.axes if p.axes else p.lines
    return "∩".join(names[:2]) if names else p.name


def _sub(cls: Vec, idx: int, m: int) -> Vec:
    out = list(cls)
    out[idx] -= m
    return tuple(out)


def _spawn_orbit(cfg: SurfaceConfig, curve: str) -> Tuple[SurfaceConfig, str]:
    """Name the generic orbit through a generic point of a fixed curve."""
    c = cfg.curve(curve)
    if not c.fixed:
        raise BlowUpError(f"{curve} is not a fixed curve")
    ne, nf, nq = cfg.counters
    fname = "F" if nf == 1 else f"F{nf}"
    while cfg.has_curve(fname):
        nf += 1
        fname = f"F{nf}"
    other = cfg.c_plus if curve == cfg.c_minus else cfg.c_minus
    points = list(cfg.points)
    mark = FixedPoint(f"q{nq}", (c.normal_weight, F0), axes=(fname, curve))
    nq += 1
    points.append(mark)
    if cfg.has_curve(other):
        oc = cfg.curve(other)
        points.append(FixedPoint(f"q{nq}", (oc.normal_weight, F0), axes=(fname, other)))
        nq += 1
    else:
        op = cfg.point(other)
        idx = points.index(op)
        if op.equal:
            points[idx] = replace(op, lines=op.lines + (fname,))
        else:
            points[idx] = replace(op, germs=op.germs + (fname,))
    new = replace(
        cfg,
        curves=cfg.curves + (Curve(fname, cfg.generic_class),),
        points=tuple(points),
        counters=(ne, nf + 1, nq),
    )
    return new, mark.name


def _axis_point(name: str, w_along: Fraction, curve: str, w_e: Fraction, e: str) -> FixedPoint:
    if w_along == 0:
        return FixedPoint(name, (w_e, F0), axes=(e, curve))
    if w_e == 0:
        return FixedPoint(name, (w_along, F0), axes=(curve, e))
    return FixedPoint(name, (w_along, w_e), axes=(curve, e))


def blow_up(cfg: SurfaceConfig, target: Target) -> SurfaceConfig:
    """Blow up a fixed point, or a generic point ``("generic", C)`` of a fixed curve."""
    if isinstance(target, str) and not cfg.has_point(target):
        target = resolve_target(cfg, target)
    label = describe_target(cfg, target)
    if isinstance(target, tuple):
        if target[0] != "generic":
            raise BlowUpError(f"unknown target kind {target[0]!r}")
        cfg, pname = _spawn_orbit(cfg, target[1])
    else:
        pname = target
    P = cfg.point(pname)
    ne, nf, nq = cfg.counters
    idx = cfg.rank
    ename = f"E{ne}"
    while cfg.has_curve(ename):
        ne += 1
        ename = f"E{ne}"
    e_vec = (0,) * idx + (1,)
    curves: Dict[str, Curve] = {c.name: replace(c, cls=c.cls + (0,)) for c in cfg.curves}
    generic = cfg.generic_class + (0,)
    gram = tuple(row + (0,) for row in cfg.gram) + ((0,) * idx + (-1,),)
    canon = cfg.canonical_class + (1,)
    c_minus, c_plus = cfg.c_minus, cfg.c_plus
    points = [p for p in cfg.points if p.name != pname]

    def fresh() -> str:
        nonlocal nq
        nq += 1
        return f"q{nq - 1}"

    def lower(name: str, m: int) -> None:
        curves[name] = replace(curves[name], cls=_sub(curves[name].cls, idx, m))

    is_end = pname in (c_minus, c_plus)
    if P.equal:
        a = P.weights[0]
        curves[ename] = Curve(ename, e_vec, True, a)
        for line in P.lines:
            lower(line, 1)
            points.append(FixedPoint(fresh(), (a, F0), axes=(line, ename)))
        if is_end:
            generic = _sub(generic, idx, 1)
            c_minus = ename if c_minus == pname else c_minus
            c_plus = ename if c_plus == pname else c_plus
    else:
        a, b = P.weights
        A, B = P.axes
        curves[ename] = Curve(ename, e_vec)
        lower(A, 1)
        lower(B, 1)
        p1 = _axis_point(fresh(), a, A, b - a, ename)
        p2 = _axis_point(fresh(), b, B, a - b, ename)
        if a * b > 0:
            m = P.germ_multiplicity()
            for g in P.germs:
                lower(g, m)
            if is_end:
                generic = _sub(generic, idx, m)
            small = 0 if abs(a) < abs(b) else 1
            host = p1 if small == 0 else p2
            if host.equal:
                host = FixedPoint(host.name, host.weights, lines=host.axes + P.germs)
            else:
                host = replace(host, germs=P.germs)
            if small == 0:
                p1 = host
            else:
                p2 = host
            c_minus = host.name if c_minus == pname else c_minus
            c_plus = host.name if c_plus == pname else c_plus
        points += [p1, p2]
    return SurfaceConfig(
        curves=tuple(curves.values()),
        points=tuple(points),
        gram=gram,
        canonical_class=canon,
        generic_class=generic,
        c_minus=c_minus,
        c_plus=c_plus,
        seed_tag=cfg.seed_tag,
        history=cfg.history + (label,),
        counters=(ne + 1, nf, nq),
    )


def blow_up_sequence(cfg: SurfaceConfig, steps: Iterable[str]) -> SurfaceConfig:
    for s in steps:
        cfg = blow_up(cfg, resolve_target(cfg, s))
    return cfg


def targets(cfg: SurfaceConfig) -> List[Target]:
    """All blow-up centres up to the choice of generic point on a fixed curve."""
    out: List[Target] = []
    for p in cfg.points:
        if p.on_fixed_curve and cfg.is_generic(p.axes[0]):
            continue
        out.append(p.name)
    out += [("generic", c.name) for c in cfg.curves if c.fixed]
    return out


def _curves_through(cfg: SurfaceConfig, target: Target) -> List[Tuple[str, int]]:
    if isinstance(target, tuple):
        return [(target[1], 1)]
    p = cfg.point(target)
    return [(i.curve, i.multiplicity) for i in incidences(p)]


ALLOWED = "allowed"


def prune_filter(cfg: SurfaceConfig, target: Target, mode: str = "lattice-only") -> str:
    """``allowed`` or ``forbidden(reason)`` for a prospective blow-up."""
    if mode not in ("lattice-only", "corollary"):
        raise ValueError(f"unknown pruning mode {mode!r}")
    if isinstance(target, str) and not cfg.has_point(target):
        target = resolve_target(cfg, target)
    through = _curves_through(cfg, target)
    for name, m in through:
        c = cfg.curve(name).cls
        sq = cfg.dot(c, c) - m * m
        mk = cfg.minus_k(c) - m
        if sq <= -3 or mk < 0:
            return f"forbidden({name} would have self-intersection {sq}, -K.C = {mk})"
    if mode == "corollary" and not isinstance(target, tuple):
        p = cfg.point(target)
        if not (p.source or p.sink):
            a, b = p.axes
            if cfg.self_intersection(a) < 0 and cfg.self_intersection(b) < 0:
                return f"forbidden(mixed-sign point on negative curves {a}, {b})"
    return ALLOWED


# invariants -------------------------------------------------------------------

def euler_count(cfg: SurfaceConfig) -> Tuple[int, int]:
    iso = sum(1 for p in cfg.points if not p.on_fixed_curve)
    fixed = sum(1 for c in cfg.curves if c.fixed)
    return iso + 2 * fixed, 3 + cfg.n_blowups


def check_invariants(cfg: SurfaceConfig) -> List[str]:
    """Structural consistency problems (empty list when consistent)."""
    bad: List[str] = []
    got, want = euler_count(cfg)
    if got != want:
        bad.append(f"euler count {got} != {want}")
    k = cfg.canonical_class
    if cfg.seed_tag != "H2" and k != (-3,) + (1,) * cfg.n_blowups:
        bad.append(f"canonical class drifted: {k}")
    for c in cfg.curves:
        sq = cfg.dot(c.cls, c.cls)
        kc = cfg.dot(k, c.cls)
        if sq + kc != -2 + 2 * cfg.delta(c.name):
            bad.append(f"adjunction fails on {c.name}: {sq} + {kc}")
        if c.fixed:
            for i in cfg.incidences_of(c.name):
                if i.role != "fixed":
                    bad.append(f"fixed curve {c.name} meets {i.point} as {i.role}")
        else:
            try:
                s, t = cfg.ends(c.name)
                if s.weight != -t.weight:
                    bad.append(f"{c.name} end weights {s.weight}, {t.weight} not opposite")
            except ValueError as exc:
                bad.append(str(exc))
    names = [c.name for c in cfg.curves]
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            ca, cb = cfg.curve(a), cfg.curve(b)
            if ca.fixed and cb.fixed:
                if cfg.dot(ca.cls, cb.cls):
                    bad.append(f"fixed curves {a}, {b} meet")
                continue
            local = sum(local_intersection(p, a, b) for p in cfg.points_on(a, b))
            glob = cfg.dot(ca.cls, cb.cls)
            if local != glob:
                bad.append(f"{a}.{b}: lattice {glob} but local sum {local}")
    for end in (cfg.c_minus, cfg.c_plus):
        if cfg.has_curve(end):
            if not cfg.curve(end).fixed:
                bad.append(f"extremal set {end} is not fixed")
        elif not (cfg.point(end).source or cfg.point(end).sink):
            bad.append(f"extremal point {end} is a saddle")
    for c in cfg.curves:
        if c.fixed and c.name not in (cfg.c_minus, cfg.c_plus):
            bad.append(f"fixed curve {c.name} is not extremal")
    return bad


# ADE recognition -------------------------------------------------------------

def _adjacency(cfg: SurfaceConfig, names: Sequence[str]) -> Dict[str, Dict[str, int]]:
    adj: Dict[str, Dict[str, int]] = {n: {} for n in names}
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            d = cfg.dot(cfg.curve(a).cls, cfg.curve(b).cls)
            if d:
                adj[a][b] = adj[b][a] = d
    return adj


def _components(adj: Dict[str, Dict[str, int]]) -> List[List[str]]:
    seen, comps = set(), []
    for start in adj:
        if start in seen:
            continue
        comp, stack = [], [start]
        seen.add(start)
        while stack:
            v = stack.pop()
            comp.append(v)
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        comps.append(sorted(comp))
    return comps


def dynkin_type(adj: Dict[str, Dict[str, int]], comp: Sequence[str]) -> str:
    """ADE label of a connected graph of (-2)-curves, or '' if not ADE."""
    k = len(comp)
    edges = [(a, b, d) for a in comp for b, d in adj[a].items() if a < b]
    if any(d != 1 for _, _, d in edges) or len(edges) != k - 1:
        return ""
    deg = {v: len(adj[v]) for v in comp}
    if max(deg.values(), default=0) <= 2:
        return f"A{k}"
    branch = [v for v in comp if deg[v] == 3]
    if len(branch) != 1 or max(deg.values()) > 3:
        return ""
    arms = sorted(len(a) for a in _arms(adj, branch[0]))
    if arms[:2] == [1, 1]:
        return f"D{k}"
    if arms[:2] == [1, 2] and arms[2] in (2, 3, 4):
        return f"E{k}"
    return ""


def _arms(adj: Dict[str, Dict[str, int]], center: str) -> List[List[str]]:
    arms = []
    for start in sorted(adj[center]):
        arm, prev, cur = [], center, start
        while True:
            arm.append(cur)
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
        arms.append(arm)
    return arms


def minus_two_curves(cfg: SurfaceConfig) -> List[str]:
    return [
        c.name for c in cfg.curves
        if cfg.dot(c.cls, c.cls) == -2 and cfg.delta(c.name) == 0
    ]


def find_ade_components(cfg: SurfaceConfig) -> List[Tuple[Tuple[str, ...], str]]:
    """Connected components of the (-2)-curve graph with their ADE type ('' if none)."""
    names = minus_two_curves(cfg)
    adj = _adjacency(cfg, names)
    return [(tuple(c), dynkin_type(adj, c)) for c in _components(adj)]


# contraction -----------------------------------------------------------------

@dataclass(frozen=True)
class ClassificationCandidate:
    config: SurfaceConfig
    exceptional: Tuple[str, ...]
    ade_type: str
    orbifold_weights: Tuple[Fraction, Fraction]
    degree: int
    picard_rank: int
    group_order: int
    group_label: str

    @property
    def same_weights(self) -> bool:
        return self.orbifold_weights[0] == self.orbifold_weights[1]


class ContractionError(ValueError):
    def __init__(self, message: str, weights: Optional[Tuple[Fraction, Fraction]] = None):
        super().__init__(message)
        self.weights = weights


def _weight_along_at(cfg: SurfaceConfig, curve: str, point: str) -> Fraction:
    for i in incidences(cfg.point(point)):
        if i.curve == curve:
            return i.weight
    raise KeyError(f"{curve} does not pass through {point}")


def _other_weight(p: FixedPoint, curve: str) -> Fraction:
    if p.equal:
        return p.weights[0]
    if curve in p.axes:
        return p.weights[1 - p.axes.index(curve)]
    raise ContractionError(f"{curve} is not an axis at {p.name}")


def _chain_order(adj: Dict[str, Dict[str, int]], comp: Sequence[str]) -> List[str]:
    ends = sorted(v for v in comp if len(adj[v]) <= 1)
    order, prev, cur = [], None, ends[0]
    while cur is not None:
        order.append(cur)
        nxt = [w for w in adj[cur] if w != prev]
        prev, cur = cur, (nxt[0] if nxt else None)
    return order


def _far_end(cfg: SurfaceConfig, curve: str, neighbour: Optional[str]) -> Incidence:
    """End of a non-fixed curve that does not lie on ``neighbour``."""
    src, snk = cfg.ends(curve)
    if neighbour is None:
        return src
    on = [i for i in (src, snk) if neighbour in cfg.point(i.point).curves()]
    rest = [i for i in (src, snk) if i not in on]
    if len(rest) != 1:
        raise ContractionError(f"cannot orient chain at {curve}")
    return rest[0]


def _chain_weights(cfg: SurfaceConfig, order: List[str]) -> Tuple[Fraction, Fraction, List[Fraction], Tuple]:
    """Observed (w_0, w_{k+1}, [w_1..w_k], end pair) of an A_k chain."""
    k = len(order)
    first, last = cfg.curve(order[0]), cfg.curve(order[-1])
    if first.fixed:
        w0, w1_obs = first.normal_weight, F0
    else:
        end = _far_end(cfg, order[0], order[1] if k > 1 else None)
        w0 = _other_weight(cfg.point(end.point), order[0])
        w1_obs = -end.weight
    ws: List[Fraction] = []
    for i, name in enumerate(order):
        c = cfg.curve(name)
        if c.fixed:
            ws.append(F0)
            continue
        prev = order[i - 1] if i > 0 else None
        if prev is None:
            ws.append(w1_obs)
            continue
        src, snk = cfg.ends(name)
        toward_prev = [x for x in (src, snk) if prev in cfg.point(x.point).curves()]
        if len(toward_prev) != 1:
            raise ContractionError(f"cannot orient chain at {name}")
        ws.append(-toward_prev[0].weight)
    if last.fixed:
        end_pair = (F0, last.normal_weight)
    else:
        prev = order[-2] if k > 1 else None
        if prev is None:
            src, snk = cfg.ends(order[-1])
            far = snk if _far_end(cfg, order[0], None) is src else src
        else:
            far = _far_end(cfg, order[-1], prev)
        end_pair = (far.weight, _other_weight(cfg.point(far.point), order[-1]))
    return w0, w1_obs, ws, end_pair


def _contract_cyclic(cfg: SurfaceConfig, order: List[str]) -> Tuple[Fraction, Fraction]:
    k = len(order)
    p, q = k + 1, k
    w0, w1, ws, end_pair = _chain_weights(cfg, order)
    theta = w0 / p
    tau = theta * q - w1
    predicted = [theta * (p * vv + q * vu) - tau * vu for vu, vv in fan_chain(CyclicGroup(q, p))]
    observed = [w0] + ws + [-end_pair[1]]
    if predicted != observed:
        raise ContractionError(
            f"chain weights {observed} do not match L({q},{p}) chain {predicted}",
            (theta, tau),
        )
    if tau != 0:
        try:
            back = recover_group(end_pair, theta, tau, "x0-side")
        except ValueError as exc:
            raise ContractionError(str(exc), (theta, tau)) from exc
        if (back.q, back.p) != (q, p):
            raise ContractionError(f"far end recovers {back.label}", (theta, tau))
    return theta, tau


def _contract_star(cfg: SurfaceConfig, adj, comp, ade: str) -> Tuple[Fraction, Fraction]:
    center = next(v for v in comp if len(adj[v]) == 3)
    c = cfg.curve(center)
    if not c.fixed:
        raise ContractionError(f"central curve {center} of {ade} is not fixed")
    nu = c.normal_weight
    star = star_resolution(ade_group(ade))
    by_len = sorted(zip(star.arms, star.arm_groups), key=lambda t: len(t[0]))
    arms = sorted(_arms(adj, center), key=len)
    for arm, (hj, grp) in zip(arms, by_len):
        if len(arm) != len(hj):
            raise ContractionError(f"arm {arm} does not match {grp.label}")
        p, q = grp.p, grp.q
        w = [nu * (p * vv + q * vu) for vu, vv in fan_chain(grp)]
        chain = list(reversed(arm))
        for i, name in enumerate(chain, start=1):
            if cfg.curve(name).fixed:
                raise ContractionError(f"arm curve {name} is fixed")
            nxt = chain[i] if i < len(chain) else center
            src, snk = cfg.ends(name)
            toward = [x for x in (src, snk) if nxt in cfg.point(x.point).curves()]
            if len(toward) != 1 or toward[0].weight != w[i]:
                raise ContractionError(f"arm weight mismatch on {name}", (nu / 2, nu / 2))
        tip = _far_end(cfg, chain[0], chain[1] if len(chain) > 1 else center)
        if _other_weight(cfg.point(tip.point), chain[0]) != w[0]:
            raise ContractionError(f"arm tip weight mismatch on {chain[0]}", (nu / 2, nu / 2))
    return nu / 2, nu / 2


def _in_component(cfg: SurfaceConfig, target: str, comp: Sequence[str]) -> bool:
    if cfg.has_curve(target):
        return target in comp
    p = cfg.point(target)
    return any(c in comp for c in p.curves())


def contract(cfg: SurfaceConfig, comp: Sequence[str]) -> ClassificationCandidate:
    """Contract an ADE component containing c_- and read the orbifold weights."""
    names = list(comp)
    adj = _adjacency(cfg, names)
    ade = dynkin_type(adj, names)
    if not ade:
        raise ContractionError("component is not an ADE configuration")
    if not _in_component(cfg, cfg.c_minus, names):
        raise ContractionError("component does not contain c_-")
    if _in_component(cfg, cfg.c_plus, names):
        raise ContractionError("component meets c_+")
    if ade.startswith("A"):
        theta, tau = _contract_cyclic(cfg, _chain_order(adj, names))
    else:
        theta, tau = _contract_star(cfg, adj, names, ade)
    grp = ade_group(ade)
    return ClassificationCandidate(
        config=cfg,
        exceptional=tuple(sorted(names)),
        ade_type=ade,
        orbifold_weights=(max(theta, tau), min(theta, tau)),
        degree=cfg.degree(),
        picard_rank=cfg.rank - len(names),
        group_order=grp.order,
        group_label=grp.label,
    )


@dataclass(frozen=True)
class Verdict:
    candidate: Optional[ClassificationCandidate]
    reason: str
    orbifold_weights: Optional[Tuple[Fraction, Fraction]] = None

    @property
    def ok(self) -> bool:
        return self.candidate is not None


def classify(cfg: SurfaceConfig) -> Verdict:
    """Final-state test: ADE + Fano + c_- in E + same weights at the orbifold point."""
    if cfg.degree() <= 0:
        return Verdict(None, "degree not positive")
    zero: List[str] = []
    for c in cfg.curves:
        mk = cfg.minus_k(c.cls)
        if mk < 0:
            return Verdict(None, f"-K.{c.name} < 0")
        if mk == 0:
            zero.append(c.name)
    if cfg.minus_k(cfg.generic_class) <= 0:
        return Verdict(None, "-K not positive on generic orbits")
    if not zero:
        return Verdict(None, "no curve to contract")
    for name in zero:
        if cfg.self_intersection(name) != -2 or cfg.delta(name):
            return Verdict(None, f"{name} has -K.C = 0 but is not a smooth (-2)-curve")
    adj = _adjacency(cfg, zero)
    comps = _components(adj)
    if len(comps) != 1:
        return Verdict(None, "(-2)-curves are disconnected")
    try:
        cand = contract(cfg, comps[0])
    except ContractionError as exc:
        return Verdict(None, str(exc), exc.weights)
    if not cand.same_weights:
        return Verdict(None, "orbifold weights differ", cand.orbifold_weights)
    if cand.orbifold_weights[0] <= 0:
        return Verdict(None, "orbifold point is not the source", cand.orbifold_weights)
    return Verdict(cand, "ok", cand.orbifold_weights)


def seed_h2() -> ClassificationCandidate:
    v = classify(h2_config())
    if not v.ok:
        raise RuntimeError(f"H2 seed failed to classify: {v.reason}")
    return v.candidate


# canonical form ----------------------------------------------------------------

def _graph(cfg: SurfaceConfig) -> Tuple[List[str], Dict[Tuple[int, int], str], List[str]]:
    """Isomorphism-relevant labelled graph: node labels, edge labels, node ids."""
    keep = [c for c in cfg.curves if not cfg.is_generic(c.name)]
    g = cfg.generic_class
    ids: List[str] = []
    labels: List[str] = []
    for c in keep:
        ids.append("c:" + c.name)
        labels.append(json.dumps([
            "C", c.fixed, cfg.dot(c.cls, c.cls), cfg.minus_k(c.cls),
            rational_str(c.normal_weight), cfg.dot(c.cls, g), cfg.delta(c.name),
            c.name == cfg.c_minus, c.name == cfg.c_plus,
        ]))
    pts = [p for p in cfg.points if not (p.on_fixed_curve and cfg.is_generic(p.axes[0]))]
    for p in pts:
        ids.append("p:" + p.name)
        labels.append(json.dumps([
            "P", sorted(rational_str(w) for w in p.weights),
            p.name == cfg.c_minus, p.name == cfg.c_plus,
        ]))
    pos = {x: i for i, x in enumerate(ids)}
    edges: Dict[Tuple[int, int], str] = {}
    for p in pts:
        for inc in incidences(p):
            if cfg.is_generic(inc.curve):
                continue
            i, j = pos["p:" + p.name], pos["c:" + inc.curve]
            edges[(min(i, j), max(i, j))] = json.dumps(
                ["I", branch_role(p, inc), rational_str(inc.weight), inc.multiplicity]
            )
    for a in range(len(keep)):
        for b in range(a + 1, len(keep)):
            d = cfg.dot(keep[a].cls, keep[b].cls)
            if d:
                edges[(a, b)] = json.dumps(["X", d])
    return labels, edges, ids


def branch_role(p: FixedPoint, inc: Incidence) -> str:
    """Role of a branch up to equivariant coordinate changes at p.

    When the smaller weight divides the larger one, the small axis is one
    member of the pencil of orbit closures tangent to it, so it is not
    distinguished from the germs.
    """
    if inc.role == "axis" and (p.source or p.sink) and not p.equal:
        small, s, _ = p.germ_data()
        if s == 1 and p.axes[small] == inc.curve:
            return "germ"
    return inc.role


def _refine(colors: List[int], nbrs: List[List[Tuple[str, int]]]) -> List[int]:
    while True:
        sigs = [
            (colors[v], tuple(sorted((lab, colors[w]) for lab, w in nbrs[v])))
            for v in range(len(colors))
        ]
        ranking = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [ranking[s] for s in sigs]
        if len(ranking) == len(set(colors)):
            return new
        colors = new


def canonical_labeling(labels: Sequence[str], edges: Dict[Tuple[int, int], str]) -> str:
    """Lexicographically least encoding over an individualization-refinement tree."""
    n = len(labels)
    nbrs: List[List[Tuple[str, int]]] = [[] for _ in range(n)]
    for (i, j), lab in edges.items():
        nbrs[i].append((lab, j))
        nbrs[j].append((lab, i))
    order = sorted(set(labels))
    start = [order.index(l) for l in labels]

    def encode(colors: List[int]) -> str:
        perm = sorted(range(n), key=lambda v: colors[v])
        where = {v: k for k, v in enumerate(perm)}
        es = sorted(
            (min(where[i], where[j]), max(where[i], where[j]), lab) for (i, j), lab in edges.items()
        )
        return json.dumps([[labels[v] for v in perm], es], separators=(",", ":"))

    best: List[Optional[str]] = [None]

    def search(colors: List[int]) -> None:
        colors = _refine(colors, nbrs)
        cells: Dict[int, List[int]] = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        target = next((cells[c] for c in sorted(cells) if len(cells[c]) > 1), None)
        if target is None:
            code = encode(colors)
            if best[0] is None or code < best[0]:
                best[0] = code
            return
        for v in target:
            search([2 * c + (0 if (u == v or c != colors[v]) else 1) for u, c in enumerate(colors)])

    search(start)
    return best[0] or "[]"


def canonical_form(obj: Union[SurfaceConfig, ClassificationCandidate]) -> bytes:
    """Byte string equal for configurations related by relabelling."""
    cfg = obj.config if isinstance(obj, ClassificationCandidate) else obj
    labels, edges, _ = _graph(cfg)
    g = cfg.generic_class
    head = json.dumps([
        cfg.n_blowups, cfg.degree(), cfg.dot(g, g), cfg.minus_k(g),
        cfg.has_curve(cfg.c_minus), cfg.has_curve(cfg.c_plus),
    ])
    return (head + "|" + canonical_labeling(labels, edges)).encode()


# serialization -----------------------------------------------------------------

def config_to_json(cfg: SurfaceConfig) -> dict:
    return {
        "seed": cfg.seed_tag,
        "n_blowups": cfg.n_blowups,
        "history": list(cfg.history),
        "gram": [list(r) for r in cfg.gram],
        "canonical_class": list(cfg.canonical_class),
        "generic_class": list(cfg.generic_class),
        "c_minus": cfg.c_minus,
        "c_plus": cfg.c_plus,
        "curves": [
            {
                "name": c.name,
                "class": list(c.cls),
                "fixed": c.fixed,
                "normal_weight": rational_str(c.normal_weight),
                "self_intersection": cfg.dot(c.cls, c.cls),
            }
            for c in sorted(cfg.curves, key=lambda c: c.name)
        ],
        "points": [
            {
                "name": p.name,
                "weights": [rational_str(w) for w in p.weights],
                "axes": list(p.axes),
                "germs": list(p.germs),
                "lines": list(p.lines),
            }
            for p in sorted(cfg.points, key=lambda p: p.name)
        ],
    }


def candidate_to_json(c: ClassificationCandidate) -> dict:
    return {
        "exceptional": list(c.exceptional),
        "ade_type": c.ade_type,
        "group": c.group_label,
        "orbifold_weights": [rational_str(w) for w in c.orbifold_weights],
        "degree": c.degree,
        "picard_rank": c.picard_rank,
        "config": config_to_json(c.config),
    }

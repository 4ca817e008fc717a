"""Moment-map integrals, Futaki invariant and the minimum of scalar curvature.

Given a candidate surface with its C*-action and a Kähler class (areas of
curves as rational functions of free parameters), the integrals
``T = (int t s dmu, int dmu, int t dmu, int t^2 dmu)`` are computed in two
independent ways: from the closed bracket formulas and from the
piecewise-linear area profile A(t) of the symplectic quotients.  ``pi`` is
kept as a symbolic variable throughout.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .exactmath import (
    HAS_POLE,
    HAS_ZERO,
    STRICTLY_NEGATIVE,
    STRICTLY_POSITIVE,
    MultiPoly,
    RatFunc,
    as_rational,
    parse_ratfunc,
    rational_str,
    rf_eval,
    sign_on_interval,
    strip_pi,
    to_text,
)
from .surface import ClassificationCandidate, SurfaceConfig, incidences

PI = RatFunc.var("pi")
PARAMS = ("a", "b", "c")


class AfuncError(ValueError):
    pass


def _rf(x) -> RatFunc:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, str):
        return parse_ratfunc(x)
    return RatFunc.of(x)


# Kähler classes -----------------------------------------------------------------

@dataclass(frozen=True)
class KahlerAssignment:
    """Kähler class as a linear functional ``phi`` on the Picard lattice."""

    config: SurfaceConfig
    phi: Tuple[RatFunc, ...]
    pins: Tuple[Tuple[str, str], ...]
    params: Tuple[str, ...]

    def omega(self, cls: Sequence[int]) -> RatFunc:
        total = RatFunc.of(0)
        for p, c in zip(self.phi, cls):
            if c:
                total = total + p * c
        return total

    def area(self, curve: str) -> RatFunc:
        return self.omega(self.config.curve(curve).cls)

    @property
    def areas(self) -> Dict[str, RatFunc]:
        return {c.name: self.omega(c.cls) for c in self.config.curves}

    def c1(self) -> RatFunc:
        return self.omega(tuple(-k for k in self.config.canonical_class))

    def square(self) -> RatFunc:
        """[omega]^2 through the inverse Gram matrix."""
        inv = _inverse([[Fraction(x) for x in row] for row in self.config.gram])
        total = RatFunc.of(0)
        n = len(self.phi)
        for i in range(n):
            for j in range(n):
                if inv[i][j]:
                    total = total + self.phi[i] * self.phi[j] * inv[i][j]
        return total


def _inverse(m: List[List[Fraction]]) -> List[List[Fraction]]:
    n = len(m)
    aug = [row[:] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if piv is None:
            raise AfuncError("singular matrix")
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [x / p for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [x - f * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def assign_kahler(candidate: ClassificationCandidate, pins: Mapping[str, Union[str, RatFunc, int]]) -> KahlerAssignment:
    """Solve for the class vanishing on E with the given curve areas.

    ``pins`` maps curve names (or ``"generic"``) to areas.
    """
    cfg = candidate.config
    rows: List[List[Fraction]] = []
    rhs: List[RatFunc] = []
    for name in candidate.exceptional:
        if name in pins:
            raise AfuncError(f"cannot pin contracted curve {name}")
        rows.append([Fraction(x) for x in cfg.curve(name).cls])
        rhs.append(RatFunc.of(0))
    for name, value in pins.items():
        cls = cfg.generic_class if name == "generic" else cfg.curve(name).cls
        rows.append([Fraction(x) for x in cls])
        rhs.append(_rf(value))
    n = cfg.rank
    if len(rows) != n:
        raise AfuncError(f"need {n - len(candidate.exceptional)} pins, got {len(pins)}")
    phi = _solve(rows, rhs)
    params = sorted({v for r in rhs for v in r.variables if v != "pi"})
    return KahlerAssignment(cfg, tuple(phi), tuple((k, to_text(_rf(v))) for k, v in pins.items()), tuple(params))


def _solve(rows: List[List[Fraction]], rhs: List[RatFunc]) -> List[RatFunc]:
    n = len(rows)
    a = [r[:] for r in rows]
    b = list(rhs)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise AfuncError("pins do not span the Picard lattice modulo E")
        a[col], a[piv] = a[piv], a[col]
        b[col], b[piv] = b[piv], b[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        b[col] = b[col] * (1 / p)
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
                b[r] = b[r] - b[col] * f
    return b


# moment data -----------------------------------------------------------------------

@dataclass(frozen=True)
class InteriorFixedPoint:
    """Isolated fixed point strictly between the extremal sets.

    ``up_area`` and ``down_area`` are the weighted areas sum |m_C| omega(C)
    of the orbit chains from the point forward to c_+ and back to c_-; they
    equal 2*pi times the moment-map distances to the two ends.
    """

    point: str
    r: Fraction
    s: Fraction
    chain_up: Tuple[str, ...]
    chain_down: Tuple[str, ...]
    up_area: RatFunc
    down_area: RatFunc

    def delta(self, omega_f: RatFunc) -> RatFunc:
        return (self.up_area - self.down_area) / omega_f


@dataclass(frozen=True)
class MomentData:
    omega_c_plus: RatFunc
    omega_c_minus: RatFunc
    omega_F: RatFunc
    interior: Tuple[InteriorFixedPoint, ...]
    chern_plus: Fraction
    chern_minus: Fraction
    c1_omega: RatFunc
    params: Tuple[str, ...] = ()
    domain: Tuple[RatFunc, ...] = ()
    omega_square: Optional[RatFunc] = None

    def crossing_defect(self) -> Fraction:
        return self.chern_plus - self.chern_minus - sum((-1 / (p.r * p.s) for p in self.interior), Fraction(0))

    def scaled(self, lam) -> "MomentData":
        """Multiply every area by ``lam``."""
        lam = _rf(lam)
        return MomentData(
            self.omega_c_plus * lam, self.omega_c_minus * lam, self.omega_F * lam,
            tuple(InteriorFixedPoint(p.point, p.r, p.s, p.chain_up, p.chain_down,
                                     p.up_area * lam, p.down_area * lam) for p in self.interior),
            self.chern_plus, self.chern_minus, self.c1_omega * lam, self.params,
            tuple(d * lam for d in self.domain),
            None if self.omega_square is None else self.omega_square * lam * lam,
        )


@dataclass(frozen=True)
class TVector:
    Ts: RatFunc
    T0: RatFunc
    T1: RatFunc
    T2: RatFunc

    def as_tuple(self) -> Tuple[RatFunc, RatFunc, RatFunc, RatFunc]:
        return (self.Ts, self.T0, self.T1, self.T2)


def _on_curves(cfg: SurfaceConfig, point: str, names) -> bool:
    return any(c in names for c in cfg.point(point).curves())


def _trace(cfg: SurfaceConfig, kahler: KahlerAssignment, start: str, forward: bool,
           stop) -> Tuple[Tuple[str, ...], RatFunc]:
    chain: List[str] = []
    area = RatFunc.of(0)
    point = start
    for _ in range(len(cfg.curves) + 1):
        p = cfg.point(point)
        out = [i for i in incidences(p) if (i.weight > 0) == forward and i.weight != 0]
        if len(out) != 1:
            raise AfuncError(f"cannot continue orbit chain at {point}")
        inc = out[0]
        chain.append(inc.curve)
        area = area + kahler.area(inc.curve) * abs(inc.weight)
        src, snk = cfg.ends(inc.curve)
        point = (snk if forward else src).point
        if stop(point):
            return tuple(chain), area
    raise AfuncError("orbit chain does not terminate")


def interior_points(candidate: ClassificationCandidate, kahler: KahlerAssignment) -> List[InteriorFixedPoint]:
    cfg = candidate.config
    ex = set(candidate.exceptional)

    def at_minus(pt: str) -> bool:
        return pt == cfg.c_minus or _on_curves(cfg, pt, ex | {cfg.c_minus})

    def at_plus(pt: str) -> bool:
        return pt == cfg.c_plus or _on_curves(cfg, pt, {cfg.c_plus})

    out = []
    for p in cfg.points:
        if not p.saddle or _on_curves(cfg, p.name, ex):
            continue
        r, s = max(p.weights), min(p.weights)
        up, ua = _trace(cfg, kahler, p.name, True, at_plus)
        down, da = _trace(cfg, kahler, p.name, False, at_minus)
        out.append(InteriorFixedPoint(p.name, r, s, up, down, ua, da))
    return sorted(out, key=lambda x: x.point)


def _contracted(cfg: SurfaceConfig, end: str, ex) -> bool:
    if cfg.has_curve(end):
        return end in ex
    return _on_curves(cfg, end, ex)


def endpoint_chern(side: str, kind: str, order: int = 1, weights: Sequence[Fraction] = (),
                   self_intersection: Optional[Fraction] = None) -> Fraction:
    """Chern number of the circle bundle near one end of the moment map.

    ``side`` is "minus" or "plus"; ``kind`` is "point" (cover weights r, s)
    or "curve" (cover self-intersection); ``order`` is the local group order.
    """
    d = Fraction(order)
    if kind == "point":
        r, s = (as_rational(w) for w in weights)
        value = 1 / (d * r * s)
        return -value if side == "minus" else value
    if kind == "curve":
        n = as_rational(self_intersection)
        return n / d if side == "minus" else -n / d
    raise AfuncError(f"unknown endpoint kind {kind!r}")


def chern_endpoints(candidate: ClassificationCandidate) -> Tuple[Fraction, Fraction]:
    """(c_1(Y)[Sigma_{-a}], c_1(Y)[Sigma_a]) for a candidate."""
    cfg = candidate.config
    ex = set(candidate.exceptional)
    if _contracted(cfg, cfg.c_minus, ex):
        minus = endpoint_chern("minus", "point", candidate.group_order, candidate.orbifold_weights)
    elif cfg.has_curve(cfg.c_minus):
        minus = endpoint_chern("minus", "curve", self_intersection=cfg.self_intersection(cfg.c_minus))
    else:
        minus = endpoint_chern("minus", "point", weights=cfg.point(cfg.c_minus).weights)
    if cfg.has_curve(cfg.c_plus):
        plus = endpoint_chern("plus", "curve", self_intersection=cfg.self_intersection(cfg.c_plus))
    else:
        plus = endpoint_chern("plus", "point", weights=cfg.point(cfg.c_plus).weights)
    return minus, plus


def moment_data(candidate: ClassificationCandidate, kahler: KahlerAssignment) -> MomentData:
    cfg = candidate.config
    ex = set(candidate.exceptional)
    omega_f = kahler.omega(cfg.generic_class)

    def end_area(name: str) -> RatFunc:
        if cfg.has_curve(name) and name not in ex:
            return kahler.area(name)
        return RatFunc.of(0)

    interior = tuple(interior_points(candidate, kahler))
    minus, plus = chern_endpoints(candidate)
    domain: List[RatFunc] = []
    for c in cfg.curves:
        if c.name in ex:
            continue
        w = kahler.area(c.name)
        if w.is_constant():
            if w.constant_value() <= 0:
                raise AfuncError(f"area of {c.name} is {w} on every class")
            continue
        if w not in domain and -w not in domain:
            domain.append(w)
        elif -w in domain:
            raise AfuncError("empty Kähler cone")
    domain = _prune_domain(domain, kahler.params)
    md = MomentData(
        omega_c_plus=end_area(cfg.c_plus),
        omega_c_minus=end_area(cfg.c_minus),
        omega_F=omega_f,
        interior=interior,
        chern_plus=plus,
        chern_minus=minus,
        c1_omega=kahler.c1(),
        params=kahler.params,
        domain=tuple(domain),
        omega_square=kahler.square(),
    )
    check_moment_data(md)
    return md


def _prune_domain(domain: List[RatFunc], params: Sequence[str]) -> List[RatFunc]:
    """Drop forms with nonnegative coefficients once every parameter is itself positive."""
    coords = {v for v in params if any(d == RatFunc.var(v) * d.num.leading()[1] for d in domain)}
    if coords != set(params):
        return domain
    out = []
    for d in domain:
        if d.num.total_degree() == 1 and d.num.is_monomial():
            out.append(d)
        elif not all(c > 0 for c in d.num.terms.values()):
            out.append(d)
    return out


def check_moment_data(md: MomentData) -> None:
    if md.crossing_defect() != 0:
        lhs = md.chern_plus - md.chern_minus
        raise AfuncError(f"crossing formula fails: {lhs} vs {lhs - md.crossing_defect()}")
    for p in md.interior:
        if p.up_area + p.down_area != md.omega_F:
            raise AfuncError(f"orbit breaking at {p.point}: {p.up_area} + {p.down_area} != {md.omega_F}")


# the integrals ------------------------------------------------------------------------

def compute_T(md: MomentData) -> TVector:
    """Closed bracket formulas for (Ts, T0, T1, T2)."""
    wf = md.omega_F
    wp, wm = md.omega_c_plus, md.omega_c_minus
    dp = RatFunc.of(md.chern_plus - md.chern_minus)
    sp = RatFunc.of(md.chern_plus + md.chern_minus)

    def moment(k: int) -> RatFunc:
        total = RatFunc.of(0)
        for p in md.interior:
            total = total + p.delta(wf) ** k * (1 / (p.r * p.s))
        return total

    ts = wf * (wp - wm)
    t0 = wf ** 2 / 8 * (4 * (wp + wm) / wf + moment(2) + dp)
    t1 = wf ** 3 / (96 * PI) * (6 * (wp - wm) / wf - moment(3) + sp)
    t2 = wf ** 4 / (768 * PI ** 2) * (8 * (wp + wm) / wf + moment(4) + dp)
    return TVector(ts, t0, t1, t2)


def _int_power(lo: RatFunc, hi: RatFunc, n: int) -> RatFunc:
    return (hi ** (n + 1) - lo ** (n + 1)) / (n + 1)


def area_profile(md: MomentData) -> Tuple[RatFunc, RatFunc, List[Tuple[RatFunc, RatFunc]]]:
    """(half-width a, initial slope, [(t_j, slope jump)]) of the area function A(t)."""
    a = md.omega_F / (4 * PI)
    slope = -2 * PI * md.chern_minus
    kinks = [(-a + p.down_area / (2 * PI), 2 * PI * (1 / (p.r * p.s))) for p in md.interior]
    return a, slope, kinks


def area_at(md: MomentData, t: RatFunc) -> RatFunc:
    """A(t), valid when every kink t_j lies at or below t."""
    a, slope, kinks = area_profile(md)
    val = md.omega_c_minus + slope * (t + a)
    for tj, k in kinks:
        val = val + k * (t - tj)
    return val


def compute_T_oracle(md: MomentData) -> Tuple[RatFunc, RatFunc, RatFunc]:
    """(T0, T1, T2) as 2*pi times the moments of A(t) over [-a, a]."""
    a, slope, kinks = area_profile(md)
    out = []
    for n in range(3):
        # A(t) = A(-a) + slope (t + a) + sum_j k_j (t - t_j)_+
        base = (md.omega_c_minus + slope * a) * _int_power(-a, a, n) + slope * _int_power(-a, a, n + 1)
        for tj, k in kinks:
            base = base + k * (_int_power(tj, a, n + 1) - tj * _int_power(tj, a, n))
        out.append(2 * PI * base)
    return tuple(out)


class Degenerate:
    """Marker: -Ts + s0 T1 vanishes identically, so no extremal metric exists."""

    def __repr__(self) -> str:
        return "DEGENERATE"

    def __eq__(self, other) -> bool:
        return isinstance(other, Degenerate)

    def __hash__(self) -> int:
        return 0


DEGENERATE = Degenerate()


def scalar_average(md: MomentData, T: TVector) -> RatFunc:
    return 4 * PI * md.c1_omega / T.T0


def compute_h(T: TVector, s0: RatFunc) -> Union[RatFunc, Degenerate]:
    den = -T.Ts + s0 * T.T1
    if den.is_zero():
        return DEGENERATE
    return (-T.T2 + T.T1 ** 2 / T.T0) / den


def futaki(T: TVector, s0: RatFunc, h: Union[RatFunc, Degenerate]) -> RatFunc:
    if isinstance(h, Degenerate):
        raise AfuncError("Futaki invariant undefined: degenerate h")
    return -T.Ts / h + s0 * T.T1 / h


def compute_h_inverse(T: TVector, s0: RatFunc) -> RatFunc:
    """1/h, which stays finite (and vanishes) in the degenerate case."""
    return (-T.Ts + s0 * T.T1) / (-T.T2 + T.T1 ** 2 / T.T0)


@dataclass(frozen=True)
class ScalarResult:
    T: TVector
    s0: RatFunc
    h: Union[RatFunc, Degenerate]
    futaki: Optional[RatFunc]
    min_s: RatFunc

    @property
    def degenerate(self) -> bool:
        return isinstance(self.h, Degenerate)


def min_scalar_full(md: MomentData) -> ScalarResult:
    """All intermediate quantities; in the degenerate case min_s is the 1/h -> 0 value s0."""
    T = compute_T(md)
    s0 = scalar_average(md, T)
    h = compute_h(T, s0)
    hinv = compute_h_inverse(T, s0)
    ms = -md.omega_F * hinv / (4 * PI) - T.T1 * hinv / T.T0 + s0
    fut = None if isinstance(h, Degenerate) else (-T.Ts + s0 * T.T1) * hinv
    return ScalarResult(T, s0, h, fut, ms)


def min_scalar(md: MomentData) -> Union[RatFunc, Degenerate]:
    """The minimum of scalar curvature, or DEGENERATE when -Ts + s0*T1 vanishes."""
    r = min_scalar_full(md)
    return DEGENERATE if r.degenerate else r.min_s


# positivity --------------------------------------------------------------------------

@dataclass(frozen=True)
class PositivityVerdict:
    mode: str  # exact | sampled | constant
    result: str
    domain: str
    witness: Optional[Dict[str, str]] = None
    samples: int = 0

    @property
    def label(self) -> str:
        return f"{self.mode}:{self.result}"

    @property
    def nonvanishing(self) -> bool:
        return self.result in (STRICTLY_POSITIVE, STRICTLY_NEGATIVE)


IDENTICALLY_ZERO = "identically-zero"


def _integral_form(d: RatFunc) -> MultiPoly:
    """Positive rescaling of a linear form to coprime integer coefficients."""
    n = d.num.scale(1 / d.den.constant_value())
    den = 1
    for c in n.terms.values():
        den = den * c.denominator // _gcd(den, c.denominator)
    n = n.scale(den)
    g = 0
    for c in n.terms.values():
        g = _gcd(g, abs(int(c)))
    return n.scale(Fraction(1, g)) if g > 1 else n


def domain_text(domain: Sequence[RatFunc]) -> str:
    return ", ".join(f"{to_text(_integral_form(d))} > 0" for d in domain) or "all"


def interval_of(domain: Sequence[RatFunc], var: str) -> Tuple[Fraction, Fraction]:
    """Open interval cut out by linear inequalities in one variable."""
    lo, hi = None, None
    for d in domain:
        if d.den != MultiPoly.const(1) and not d.den.is_constant():
            raise AfuncError("domain inequality is not linear")
        n = d.num.scale(1 / d.den.constant_value())
        if n.total_degree() > 1:
            raise AfuncError("domain inequality is not linear")
        k = n.derivative(var).constant_value() if var in n.variables else Fraction(0)
        c = n.substitute({var: 0}).constant_value()
        if k == 0:
            continue
        root = -c / k
        if k > 0:
            lo = root if lo is None else max(lo, root)
        else:
            hi = root if hi is None else min(hi, root)
    if lo is None or hi is None or lo >= hi:
        raise AfuncError(f"domain for {var} is not a bounded interval")
    return lo, hi


def interval_text(lo: Fraction, hi: Fraction, var: str = "a") -> str:
    return f"{rational_str(lo)}<{var}<{rational_str(hi)}"


def _grid_values(p: MultiPoly, variables: Sequence[str], axes: Sequence[Sequence[int]], n: int) -> List[int]:
    """Sign-faithful integers n^deg * p(x/n) over the product grid, in product order."""
    den = 1
    for c in p.terms.values():
        den = den * c.denominator // _gcd(den, c.denominator)
    deg = p.total_degree()
    idx = [p.variables.index(v) if v in p.variables else None for v in variables]
    terms = []
    for e, c in p.terms.items():
        ex = tuple(e[i] if i is not None else 0 for i in idx)
        terms.append((int(c * den) * n ** (deg - sum(ex)), ex))
    return _grid_rec(terms, list(axes))


def _grid_rec(terms: List[Tuple[int, Tuple[int, ...]]], axes: List[Sequence[int]]) -> List[int]:
    if not axes:
        return [sum(c for c, _ in terms)]
    groups: Dict[int, List[Tuple[int, Tuple[int, ...]]]] = {}
    for c, ex in terms:
        groups.setdefault(ex[0], []).append((c, ex[1:]))
    subs = {k: _grid_rec(g, axes[1:]) for k, g in groups.items()}
    size = len(next(iter(subs.values()))) if subs else 1
    out: List[int] = []
    for x in axes[0]:
        block = [0] * size
        for k, vals in subs.items():
            xk = x ** k
            for j, v in enumerate(vals):
                block[j] += xk * v
        out.extend(block)
    return out


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def positivity_report(f: Union[RatFunc, Degenerate], domain: Sequence[RatFunc],
                      params: Sequence[str] = (), density: int = 50,
                      box: Optional[Mapping[str, Tuple]] = None,
                      min_points: int = 2500) -> PositivityVerdict:
    """Sign of f on the open region where every domain form is positive.

    One parameter: exact, via root isolation on the interval.  Several: a
    rational grid over ``box`` (default (0, 4) per axis) restricted to the
    domain, refined until at least ``min_points`` points fall inside, plus
    probes at 1/64 of a grid step from each box face.
    """
    if isinstance(f, Degenerate):
        return PositivityVerdict("exact", "degenerate", domain_text(domain))
    if f.is_zero():
        return PositivityVerdict("exact", IDENTICALLY_ZERO, domain_text(domain))
    _, g = strip_pi(f)
    params = list(params) or [v for v in g.variables]
    if not params:
        v = g.constant_value()
        return PositivityVerdict("constant", STRICTLY_POSITIVE if v > 0 else STRICTLY_NEGATIVE, "point")
    if len(params) == 1:
        lo, hi = interval_of(domain, params[0])
        res = sign_on_interval(g, (lo, hi))
        return PositivityVerdict("exact", res, interval_text(lo, hi, params[0]))
    while True:
        verdict = _sampled(g, domain, params, density, box or {})
        if verdict.samples >= min_points or verdict.result != STRICTLY_POSITIVE and verdict.result != STRICTLY_NEGATIVE:
            return verdict
        if density > 1000:
            return verdict
        density *= 2


def _sampled(g: RatFunc, domain: Sequence[RatFunc], params: Sequence[str], density: int,
             box: Mapping[str, Tuple]) -> PositivityVerdict:
    bounds = []
    for v in params:
        lo, hi = box.get(v, (0, 4))
        bounds.append((as_rational(lo), as_rational(hi)))
    # x = lo + (hi - lo) * i / (64 * density), all on a common integer scale N
    sub = 64 * density
    scale = 1
    for lo, hi in bounds:
        d = (hi - lo).denominator * lo.denominator
        scale = scale * d // _gcd(scale, d)
    N = sub * scale
    axes = []
    for lo, hi in bounds:
        a, w = int(lo * N), int((hi - lo) * N)
        ticks = [a + w * i // density for i in range(1, density)]
        axes.append(ticks + [a + w // sub, a + w - w // sub])
    points = list(itertools.product(*axes))
    num = _grid_values(g.num, params, axes, N)
    den = _grid_values(g.den, params, axes, N)
    dom = [(_grid_values(d.num, params, axes, N), _grid_values(d.den, params, axes, N)) for d in domain]
    signs = set()
    witness = None
    count = 0
    for i, pt in enumerate(points):
        if any(dn[i] * dd[i] <= 0 for dn, dd in dom):
            continue
        count += 1
        vn, vd = num[i], den[i]
        if vd == 0:
            return PositivityVerdict("sampled", HAS_POLE, domain_text(domain), _pt(params, pt, N), count)
        sgn = (vn > 0) - (vn < 0)
        sgn *= 1 if vd > 0 else -1
        if sgn == 0:
            return PositivityVerdict("sampled", HAS_ZERO, domain_text(domain), _pt(params, pt, N), count)
        if signs and sgn not in signs:
            witness = _pt(params, pt, N)
        signs.add(sgn)
    if not count:
        raise AfuncError("no sample point inside the domain")
    if len(signs) > 1:
        return PositivityVerdict("sampled", HAS_ZERO, domain_text(domain), witness, count)
    res = STRICTLY_POSITIVE if signs == {1} else STRICTLY_NEGATIVE
    return PositivityVerdict("sampled", res, domain_text(domain), None, count)


def domain_points(domain: Sequence[RatFunc], params: Sequence[str], density: int = 12,
                  box: Optional[Mapping[str, Tuple]] = None) -> List[Dict[str, Fraction]]:
    """Rational grid points strictly inside the domain (for certificate checks)."""
    box = box or {}
    axes = []
    for v in params:
        lo, hi = (as_rational(x) for x in box.get(v, (0, 4)))
        axes.append([lo + (hi - lo) * Fraction(i, density) for i in range(1, density)])
    out = []
    for pt in itertools.product(*axes):
        p = dict(zip(params, pt))
        if all(rf_eval(d, p) > 0 for d in domain):
            out.append(p)
    return out


def _pt(params, pt, N) -> Dict[str, str]:
    return {v: rational_str(Fraction(x, N)) for v, x in zip(params, pt)}


# permutation sums ----------------------------------------------------------------------

_SUM = re.compile(r"S\(([^()]*)\)")


def cyclic_sum(monomial: str, variables: Sequence[str]) -> str:
    """Sum of a monomial over all permutations of the variables, as text."""
    mono = monomial.strip()
    exps: Dict[str, int] = {v: 0 for v in variables}
    coeff = 1
    for factor in filter(None, (x.strip() for x in mono.split("*"))):
        if factor.isdigit():
            coeff *= int(factor)
        elif "^" in factor:
            base, k = factor.split("^")
            exps[base.strip()] += int(k)
        elif factor in exps:
            exps[factor] += 1
        else:
            raise ValueError(f"unknown variable {factor!r} in S({monomial})")
    terms = []
    for perm in itertools.permutations(variables):
        parts = [str(coeff)] if coeff != 1 else []
        parts += [f"{perm[i]}^{exps[v]}" for i, v in enumerate(variables) if exps[v]]
        terms.append("*".join(parts) or "1")
    return "(" + " + ".join(terms) + ")"


def expand_cyclic(text: str, variables: Sequence[str]) -> str:
    """Replace every ``S(monomial)`` by its expanded permutation sum."""
    return _SUM.sub(lambda m: cyclic_sum(m.group(1), variables), text)


def parse_cyclic(text: str, variables: Sequence[str]) -> RatFunc:
    return parse_ratfunc(expand_cyclic(text, variables))


def check_certificate(inequalities: Sequence[str], variables: Sequence[str],
                      points: Sequence[Mapping[str, Fraction]]) -> List[Tuple[str, bool]]:
    """Evaluate stated inequalities ``lhs >= rhs`` / ``lhs > rhs`` at sample points."""
    out = []
    for ineq in inequalities:
        strict = ">=" not in ineq
        lhs, rhs = re.split(r">=|>", ineq, maxsplit=1)
        diff = parse_cyclic(lhs, variables) - parse_cyclic(rhs, variables)
        ok = True
        for p in points:
            v = rf_eval(diff, p)
            if v < 0 or (strict and v == 0):
                ok = False
                break
        out.append((ineq, ok))
    return out


# example with hand-supplied data ------------------------------------------------------

def _fixture_chern(d: Mapping, side: str) -> Fraction:
    end = d.get(f"c_{side}")
    if end is None:
        return as_rational(d[f"chern_{side}"])
    return endpoint_chern(side, end["kind"], end.get("order", 1), end.get("weights", ()),
                          end.get("self_intersection"))


def moment_data_from_fixture(d: Mapping) -> MomentData:
    """MomentData from explicit endpoint data (used for the orbifold-quotient example)."""
    interior = tuple(
        InteriorFixedPoint(p.get("name", f"p{i}"), as_rational(p["r"]), as_rational(p["s"]), (), (),
                           _rf(p["up_area"]), _rf(p["down_area"]))
        for i, p in enumerate(d.get("interior", ()))
    )
    return MomentData(
        omega_c_plus=_rf(d["omega_c_plus"]),
        omega_c_minus=_rf(d["omega_c_minus"]),
        omega_F=_rf(d["omega_F"]),
        interior=interior,
        chern_plus=_fixture_chern(d, "plus"),
        chern_minus=_fixture_chern(d, "minus"),
        c1_omega=_rf(d.get("c1_omega", "0")),
    )


# fixture-driven evaluation -------------------------------------------------------------

@dataclass
class CaseReport:
    label: str
    moment: MomentData
    result: ScalarResult
    verdict: PositivityVerdict
    checks: Dict[str, bool]
    domain: str
    certificates: List[Tuple[str, bool, bool]] = field(default_factory=list)
    # degenerate with no finite value on record: shown as "degenerate"
    degenerate_only: bool = False

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    @property
    def min_s_text(self) -> str:
        return "degenerate" if self.degenerate_only else to_text(self.result.min_s)

    def to_json(self) -> dict:
        ms = self.result.min_s
        return {
            "case": self.label,
            "min_s": {"num": to_text(ms.num), "den": to_text(ms.den)},
            "domain": self.domain,
            "verdict": self.verdict.label,
            "degenerate": self.result.degenerate,
            "samples": self.verdict.samples,
            "witness": self.verdict.witness,
            "matches": self.ok,
            "checks": dict(sorted(self.checks.items())),
            "certificates": [{"inequality": i, "holds": h, "expected": e} for i, h, e in self.certificates],
        }


def _case_domain(md: MomentData, verdict: PositivityVerdict) -> str:
    if not md.params:
        return "fixed class"
    return verdict.domain


def minscal_fixtures() -> dict:
    from .fixtures import load_fixture
    return load_fixture("minscal.json")


def case_entry(label: str) -> dict:
    for e in minscal_fixtures()["cases"]:
        if e["label"] == label:
            return e
    raise KeyError(f"unknown case {label!r}")


def case_labels() -> List[str]:
    return [e["label"] for e in minscal_fixtures()["cases"]]


def evaluate_case(label: str, density: int = 50, min_points: int = 2500) -> CaseReport:
    """Run the full pipeline on one catalogued case and compare with its fixture."""
    from .census import catalog_entries
    from .surface import classify

    entry = case_entry(label)
    cat = next(c for c in catalog_entries() if c.label == label)
    verdict_c = classify(cat.build())
    if not verdict_c.ok:
        raise AfuncError(f"{label} is not a candidate: {verdict_c.reason}")
    return evaluate_candidate(verdict_c.candidate, entry, density, min_points)


def evaluate_candidate(candidate: ClassificationCandidate, entry: Mapping, density: int = 50,
                       min_points: int = 2500) -> CaseReport:
    label = entry.get("label", "config")
    kahler = assign_kahler(candidate, entry["pins"])
    md = moment_data(candidate, kahler)
    res = min_scalar_full(md)
    target = DEGENERATE if res.degenerate and entry.get("min_s") is None else res.min_s
    verdict = positivity_report(target, md.domain, md.params, density=density, min_points=min_points)
    checks: Dict[str, bool] = {}
    exp = entry.get("expect", {})
    if "omega_F" in exp:
        checks["omega_F"] = md.omega_F == _rf(exp["omega_F"])
    if "c1" in exp:
        checks["c1"] = md.c1_omega == _rf(exp["c1"])
    if "chern_minus" in exp:
        checks["chern"] = (md.chern_minus, md.chern_plus) == (as_rational(exp["chern_minus"]),
                                                               as_rational(exp["chern_plus"]))
    for name, value in exp.get("areas", {}).items():
        checks[f"area:{name}"] = kahler.area(name) == _rf(value)
    checks["crossing"] = md.crossing_defect() == 0
    T = res.T
    checks["oracle"] = (T.T0, T.T1, T.T2) == compute_T_oracle(md)
    if md.omega_square is not None:
        checks["volume"] = T.T0 == md.omega_square / 2
    if entry.get("min_s") is not None:
        text = entry["min_s"]
        expected = parse_cyclic(text, entry["sum_variables"]) if "sum_variables" in entry else _rf(text)
        checks["closed_form"] = res.min_s == expected
    checks["degenerate"] = res.degenerate == bool(entry.get("degenerate", False))
    if "verdict" in entry:
        checks["verdict"] = verdict.label == entry["verdict"]
    domain = _case_domain(md, verdict)
    if "domain" in entry:
        checks["domain"] = domain == entry["domain"]
    certs = []
    if entry.get("certificates"):
        pts = domain_points(md.domain, md.params)
        got = check_certificate([c["inequality"] for c in entry["certificates"]], md.params, pts)
        for (ineq, holds), c in zip(got, entry["certificates"]):
            certs.append((ineq, holds, c["holds"]))
        checks["certificates"] = all(h == e for _, h, e in certs)
    return CaseReport(label, md, res, verdict, checks, domain, certs,
                      degenerate_only=res.degenerate and entry.get("min_s") is None)


@dataclass
class ExampleReport:
    label: str
    T: TVector
    chern: Tuple[Fraction, Fraction]
    s0: RatFunc
    h: Union[RatFunc, Degenerate]
    checks: Dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def evaluate_example(label: str) -> ExampleReport:
    d = next(e for e in minscal_fixtures()["examples"] if e["label"] == label)
    md = moment_data_from_fixture(d)
    T = compute_T(md)
    s0 = scalar_average(md, T)
    h = compute_h(T, s0)
    exp = d.get("expect", {})
    checks = {
        "crossing": md.crossing_defect() == 0,
        "oracle": (T.T0, T.T1, T.T2) == compute_T_oracle(md),
    }
    if "T" in exp:
        checks["T"] = list(T.as_tuple()) == [_rf(x) for x in exp["T"]]
    if "chern_minus" in exp:
        checks["chern"] = (md.chern_minus, md.chern_plus) == (as_rational(exp["chern_minus"]),
                                                               as_rational(exp["chern_plus"]))
    if "s0" in exp:
        checks["s0"] = s0 == _rf(exp["s0"])
    if "degenerate" in exp:
        checks["degenerate"] = isinstance(h, Degenerate) == exp["degenerate"]
    return ExampleReport(label, T, (md.chern_minus, md.chern_plus), s0, h, checks)

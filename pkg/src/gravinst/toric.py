"""Quotient singularities, their minimal resolutions and equivariant weights."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .exactmath import as_rational, rational_str

Vec = Tuple[int, int]


@dataclass(frozen=True)
class CyclicGroup:
    """L(q, p): C^2 / <diag(zeta_p, zeta_p^q)>."""

    q: int
    p: int

    def __post_init__(self):
        if self.p < 1 or self.q < 0:
            raise ValueError(f"invalid cyclic group L({self.q},{self.p})")
        if self.p == 1:
            if self.q not in (0, 1):
                raise ValueError("the trivial group is L(0,1) or L(1,1)")
        elif not (1 <= self.q < self.p) or math.gcd(self.q, self.p) != 1:
            raise ValueError(f"L({self.q},{self.p}) needs 1 <= q < p, gcd(q,p)=1")

    @property
    def order(self) -> int:
        return self.p

    @property
    def label(self) -> str:
        return f"L({self.q},{self.p})"

    def is_su2(self) -> bool:
        return self.p == 1 or self.q == self.p - 1


FAMILIES = {
    "D*": "BinaryDihedral",
    "T*": "BinaryTetrahedral",
    "O*": "BinaryOctahedral",
    "I*": "BinaryIcosahedral",
    "J2": "J2",
    "J3": "J3",
}
_SHORT = {v: k for k, v in FAMILIES.items()}


@dataclass(frozen=True)
class NonCyclicGroup:
    family: str
    m: int
    n: int = 0

    def __post_init__(self):
        if self.family in FAMILIES:
            object.__setattr__(self, "family", FAMILIES[self.family])
        if self.family not in _SHORT:
            raise ValueError(f"unknown family {self.family}")
        g = math.gcd
        m, n = self.m, self.n
        if m < 1:
            raise ValueError("m must be positive")
        two_param = self.family in ("BinaryDihedral", "J2")
        if two_param and n < 2:
            raise ValueError(f"{self.family} needs n >= 2")
        if not two_param and n:
            raise ValueError(f"{self.family} takes no n")
        ok = {
            "BinaryDihedral": g(m, 2 * n) == 1,
            "BinaryTetrahedral": g(m, 6) == 1,
            "BinaryOctahedral": g(m, 6) == 1,
            "BinaryIcosahedral": g(m, 30) == 1,
            "J2": g(m, 2) == 2 and g(m, n) == 1,
            "J3": g(m, 6) == 3,
        }[self.family]
        if not ok:
            raise ValueError(f"group condition fails for {self.label}")

    @property
    def order(self) -> int:
        m, n = self.m, self.n
        return {
            "BinaryDihedral": 4 * m * n,
            "BinaryTetrahedral": 24 * m,
            "BinaryOctahedral": 48 * m,
            "BinaryIcosahedral": 120 * m,
            "J2": 4 * m * n,
            "J3": 24 * m,
        }[self.family]

    @property
    def label(self) -> str:
        s = _SHORT[self.family]
        return f"{s}({self.m},{self.n})" if self.n else f"{s}({self.m})"

    def arm_groups(self) -> List[CyclicGroup]:
        """Source groups L(alpha, beta) of the three arms, reduced mod beta."""
        m, n = self.m, self.n
        raw = {
            "BinaryDihedral": [(1, 2), (1, 2), (-m, n)],
            "BinaryTetrahedral": [(1, 2), (-m, 3), (-m, 3)],
            "BinaryOctahedral": [(1, 2), (-m, 3), (-m, 4)],
            "BinaryIcosahedral": [(1, 2), (-m, 3), (-m, 5)],
            "J2": [(1, 2), (1, 2), (-m, n)],
            "J3": [(1, 2), (1, 3), (2, 3)],
        }[self.family]
        return [CyclicGroup(a % b, b) for a, b in raw]


Group = Union[CyclicGroup, NonCyclicGroup]

_LABEL = re.compile(r"^\s*(L|D\*|T\*|O\*|I\*|J2|J3)\s*\(\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\)\s*$")


def parse_group(label: str) -> Group:
    """Parse "L(q,p)", "D*(m,n)", "T*(m)", "O*(m)", "I*(m)", "J2(m,n)", "J3(m)"."""
    mt = _LABEL.match(label)
    if not mt:
        raise ValueError(f"cannot parse group label {label!r}")
    kind, x, y = mt.group(1), int(mt.group(2)), mt.group(3)
    if kind == "L":
        if y is None:
            raise ValueError("L needs two arguments")
        return CyclicGroup(x, int(y))
    return NonCyclicGroup(kind, x, int(y) if y is not None else 0)


# ADE bookkeeping for SU(2) groups -------------------------------------------

def ade_group(ade: str) -> Group:
    """SU(2) group whose minimal resolution graph is the Dynkin diagram ``ade``."""
    kind, k = ade[0], int(ade[1:])
    if kind == "A":
        return CyclicGroup(k, k + 1)
    if kind == "D":
        return NonCyclicGroup("D*", 1, k - 2)
    if kind == "E":
        return {6: NonCyclicGroup("T*", 1), 7: NonCyclicGroup("O*", 1), 8: NonCyclicGroup("I*", 1)}[k]
    raise ValueError(f"not an ADE label: {ade}")


def ade_order(ade: str) -> int:
    return ade_group(ade).order


# Hirzebruch-Jung ---------------------------------------------------------------

def hj_expand(g: CyclicGroup) -> List[int]:
    """Ceiling continued fraction p/q = e1 - 1/(e2 - 1/(...))."""
    if g.p == 1:
        return []
    x = Fraction(g.p, g.q)
    out = []
    while True:
        e = math.ceil(x)
        out.append(e)
        if x == e:
            return out
        x = 1 / (e - x)


def hj_value(e: Sequence[int]) -> Fraction:
    """Evaluate the nested fraction 1/(e1 - 1/(e2 - ...)), i.e. q/p."""
    x = Fraction(0)
    for k in reversed(e):
        x = 1 / (k - x)
    return x


def det(u: Vec, v: Vec) -> int:
    return u[0] * v[1] - u[1] * v[0]


def fan_chain(g: CyclicGroup) -> List[Vec]:
    """Rays v_0..v_{k+1} of the minimal resolution fan, v = (U, V) components."""
    v: List[Vec] = [(0, 1), (1, 0)]
    if g.p == 1:
        return v
    for e in hj_expand(g):
        a, b = v[-1], v[-2]
        v.append((e * a[0] - b[0], e * a[1] - b[1]))
    return v


@dataclass(frozen=True)
class WeightChain:
    group: CyclicGroup
    theta: Fraction
    tau: Fraction
    w: Tuple[Fraction, ...]

    def node_pair(self, i: int) -> Tuple[Fraction, Fraction]:
        """Weights [w_i, -w_{i+1}] at the point between curves i and i+1."""
        return (self.w[i], -self.w[i + 1])

    def y0_end(self) -> Tuple[Fraction, Fraction]:
        return self.node_pair(0)

    def x0_end(self) -> Tuple[Fraction, Fraction]:
        return self.node_pair(len(self.w) - 2)


def _check_theta_tau(theta: Fraction, tau: Fraction) -> None:
    if not (theta >= tau >= 0) or theta == 0:
        raise ValueError("need theta >= tau >= 0, not both zero")


def weight_chain(g: CyclicGroup, theta, tau) -> WeightChain:
    """w_i = theta (p v_iV + q v_iU) - tau v_iU over the fan rays."""
    theta, tau = as_rational(theta), as_rational(tau)
    _check_theta_tau(theta, tau)
    w = tuple(theta * (g.p * vv + g.q * vu) - tau * vu for vu, vv in fan_chain(g))
    return WeightChain(g, theta, tau, w)


def weight_chain_recursive(g: CyclicGroup, theta, tau) -> List[Fraction]:
    """Independent recursion w_{i+1} = e_i w_i - w_{i-1} from w_0, w_1."""
    theta, tau = as_rational(theta), as_rational(tau)
    w = [theta * g.p, theta * g.q - tau]
    for e in hj_expand(g):
        w.append(e * w[-1] - w[-2])
    return w


def recover_group(endpoint: Tuple, theta, tau, side: str) -> CyclicGroup:
    """Invert the endpoint weights of a chain to the group L(q,p).

    y0-side pair is [w_0, -w_1]; x0-side pair is [w_k, -w_{k+1}].
    """
    theta, tau = as_rational(theta), as_rational(tau)
    a, b = (as_rational(x) for x in endpoint)
    if side == "y0-side":
        if theta == 0:
            raise ValueError("theta must be nonzero on the y0 side")
        p, q = a / theta, (-b + tau) / theta
        if p.denominator != 1 or q.denominator != 1:
            raise ValueError("recovered p or q is not an integer")
        p, q = int(p), int(q)
        if p > 1 and math.gcd(p, q) != 1:
            raise ValueError("recovered p, q not coprime")
        return CyclicGroup(q % p if p > 1 else q, p)
    if side == "x0-side":
        if tau == 0:
            raise ValueError("tau must be nonzero on the x0 side")
        p, qinv = b / tau, (theta - a) / tau
        if p.denominator != 1 or qinv.denominator != 1:
            raise ValueError("recovered p or q^-1 is not an integer")
        p, qinv = int(p), int(qinv)
        if p == 1:
            return CyclicGroup(1, 1)
        if math.gcd(p, qinv) != 1:
            raise ValueError("recovered q^-1 not a unit mod p")
        return CyclicGroup(pow(qinv, -1, p), p)
    raise ValueError(f"unknown side {side!r}")


# non-cyclic stars ----------------------------------------------------------------

def b_gamma(g: NonCyclicGroup) -> int:
    m, order = g.m, g.order
    r = order // (4 * m)
    return 2 + (4 * m * (m - m % r)) // order


@dataclass(frozen=True)
class StarResolution:
    group: NonCyclicGroup
    central_self_intersection: int
    arm_groups: Tuple[CyclicGroup, ...]
    arms: Tuple[Tuple[int, ...], ...]
    central_fixed: bool = False
    arm_weights: Optional[Tuple[Tuple[Fraction, ...], ...]] = None
    orbifold_weights: Optional[Tuple[Fraction, Fraction]] = None

    def dynkin(self) -> str:
        """ADE label when every curve is a (-2)-curve, else ''."""
        if self.central_self_intersection != -2 or any(e != 2 for arm in self.arms for e in arm):
            return ""
        lens = sorted(len(a) for a in self.arms)
        total = 1 + sum(lens)
        if lens[:2] == [1, 1]:
            return f"D{total}"
        if lens[:2] == [1, 2] and lens[2] in (2, 3, 4):
            return f"E{total}"
        return ""


def star_resolution(g: NonCyclicGroup) -> StarResolution:
    groups = tuple(g.arm_groups())
    return StarResolution(
        group=g,
        central_self_intersection=-b_gamma(g),
        arm_groups=groups,
        arms=tuple(tuple(hj_expand(a)) for a in groups),
    )


def noncyclic_weight_star(g: NonCyclicGroup) -> StarResolution:
    """Star with fixed central curve, arm chains at tau = 0, theta = 1."""
    base = star_resolution(g)
    weights = tuple(tuple(weight_chain(a, 1, 0).w) for a in base.arm_groups)
    ow = Fraction(1, 2 * g.m)
    return StarResolution(
        group=g,
        central_self_intersection=base.central_self_intersection,
        arm_groups=base.arm_groups,
        arms=base.arms,
        central_fixed=True,
        arm_weights=weights,
        orbifold_weights=(ow, ow),
    )


def verify_exceptional_parametrization(g: CyclicGroup) -> bool:
    """Lattice checks on the fan: ordering, edge exponents, dual-cone membership."""
    v = fan_chain(g)
    if g.p == 1:
        return True
    for i in range(len(v)):
        if any(det(v[i], v[j]) <= 0 for j in range(i)):
            return False
    first, last = v[0], v[-1]
    for i in range(len(v) - 1):
        eu = v[i][1] - v[i + 1][1]
        ev = v[i + 1][0] - v[i][0]
        if eu <= 0 or ev <= 0:
            return False
        m = (eu, ev)
        pair = lambda x: m[0] * x[0] + m[1] * x[1]
        if pair(first) < 0 or pair(last) < 0:
            return False
    return True


# JSON ------------------------------------------------------------------------

def chain_to_json(g: CyclicGroup, theta=None, tau=None) -> dict:
    out = {"group": g.label, "e": hj_expand(g), "v": [list(x) for x in fan_chain(g)]}
    if theta is not None:
        out["w"] = [rational_str(x) for x in weight_chain(g, theta, tau or 0).w]
    return out


def star_to_json(s: StarResolution) -> dict:
    out = {
        "group": s.group.label,
        "order": s.group.order,
        "central": s.central_self_intersection,
        "arms": [
            {"group": a.label, "e": list(e)} for a, e in zip(s.arm_groups, s.arms)
        ],
        "dynkin": s.dynkin(),
    }
    if s.arm_weights is not None:
        out["central_fixed"] = s.central_fixed
        for arm, w in zip(out["arms"], s.arm_weights):
            arm["w"] = [rational_str(x) for x in w]
        out["orbifold_weights"] = [rational_str(x) for x in s.orbifold_weights]
    return out

"""Exact rationals, multivariate polynomials and normalized rational functions.

Scalars are :class:`fractions.Fraction`.  Polynomials live in Q[a, b, c, pi, ...]
where ``pi`` is an ordinary formal variable.  Terms are ordered graded
lexicographically over the fixed variable order ``a < b < c < pi`` (then
alphabetical), which makes printed and serialized output deterministic.
"""

from __future__ import annotations

import ast
import math
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

BigRational = Fraction

DEFAULT_ORDER = ("a", "b", "c", "pi")

Exps = Tuple[int, ...]
Scalar = Union[int, Fraction]


def _var_key(name: str) -> Tuple[int, str]:
    if name in DEFAULT_ORDER:
        return (DEFAULT_ORDER.index(name), "")
    return (len(DEFAULT_ORDER), name)


def _sorted_vars(names: Iterable[str]) -> Tuple[str, ...]:
    return tuple(sorted(set(names), key=_var_key))


def as_rational(x: Union[int, str, Fraction]) -> Fraction:
    """Coerce ints, Fractions and ``"num/den"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("bool is not a rational")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot convert {x!r} to a rational")


def rational_str(x: Fraction) -> str:
    """Canonical ``num/den`` text (``den`` omitted when 1)."""
    x = as_rational(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _grlex_key(e: Exps) -> Tuple[int, Exps]:
    return (sum(e), e)


class MultiPoly:
    """Immutable polynomial with rational coefficients.

    Only variables that actually occur are kept, so two equal polynomials are
    structurally identical regardless of how they were built.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[Exps, Scalar]):
        variables = tuple(variables)
        if len(set(variables)) != len(variables):
            raise ValueError("duplicate variable names")
        clean: Dict[Exps, Fraction] = {}
        for e, c in terms.items():
            if len(e) != len(variables):
                raise ValueError("exponent arity does not match variable list")
            if any(k < 0 for k in e):
                raise ValueError("negative exponent")
            c = as_rational(c)
            if c:
                clean[tuple(e)] = clean.get(tuple(e), Fraction(0)) + c
                if not clean[tuple(e)]:
                    del clean[tuple(e)]
        used = [i for i in range(len(variables)) if any(e[i] for e in clean)]
        order = sorted(used, key=lambda i: _var_key(variables[i]))
        self.variables: Tuple[str, ...] = tuple(variables[i] for i in order)
        self.terms: Dict[Exps, Fraction] = {
            tuple(e[i] for i in order): c for e, c in clean.items()
        }
        self._hash: Optional[int] = None

    # construction -------------------------------------------------------
    @classmethod
    def const(cls, c: Scalar) -> "MultiPoly":
        return cls((), {(): c})

    @classmethod
    def var(cls, name: str) -> "MultiPoly":
        return cls((name,), {(1,): 1})

    @classmethod
    def from_univariate(cls, name: str, coeffs: Sequence[Scalar]) -> "MultiPoly":
        """Build from low-to-high coefficients in one variable."""
        return cls((name,), {(k,): c for k, c in enumerate(coeffs)})

    # basic queries ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.variables

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), Fraction(0))

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        if self.is_zero():
            return -1
        if name not in self.variables:
            return 0
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    def leading(self) -> Tuple[Exps, Fraction]:
        """Leading exponent and coefficient under graded lex order."""
        if self.is_zero():
            raise ValueError("zero polynomial has no leading term")
        e = max(self.terms, key=_grlex_key)
        return e, self.terms[e]

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def aligned(self, variables: Sequence[str]) -> Dict[Exps, Fraction]:
        """Terms re-keyed to a superset variable list."""
        idx = [variables.index(v) for v in self.variables]
        out: Dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            full = [0] * len(variables)
            for j, k in zip(idx, e):
                full[j] = k
            out[tuple(full)] = c
        return out

    # arithmetic ---------------------------------------------------------
    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            return other
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return MultiPoly.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        vs = _sorted_vars(self.variables + other.variables)
        t = self.aligned(vs)
        for e, c in other.aligned(vs).items():
            t[e] = t.get(e, Fraction(0)) + c
        return MultiPoly(vs, t)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero() or other.is_zero():
            return ZERO
        vs = _sorted_vars(self.variables + other.variables)
        a, b = self.aligned(vs), other.aligned(vs)
        out: Dict[Exps, Fraction] = {}
        for e1, c1 in a.items():
            for e2, c2 in b.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return MultiPoly(vs, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, c: Scalar) -> "MultiPoly":
        c = as_rational(c)
        return MultiPoly(self.variables, {e: v * c for e, v in self.terms.items()})

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.variables, frozenset(self.terms.items())))
        return self._hash

    def __repr__(self):
        return f"MultiPoly({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    # evaluation ---------------------------------------------------------
    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        missing = [v for v in self.variables if v not in point]
        if missing:
            raise KeyError(f"unbound variables: {missing}")
        vals = [as_rational(point[v]) for v in self.variables]
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for x, k in zip(vals, e):
                if k:
                    term *= x**k
            total += term
        return total

    def substitute(self, point: Mapping[str, Scalar]) -> "MultiPoly":
        """Bind some variables to rationals, keeping the rest symbolic."""
        keep = [v for v in self.variables if v not in point]
        out: Dict[Exps, Fraction] = {}
        for e, c in self.terms.items():
            coeff = c
            rest = []
            for v, k in zip(self.variables, e):
                if v in point:
                    coeff *= as_rational(point[v]) ** k
                else:
                    rest.append(k)
            out[tuple(rest)] = out.get(tuple(rest), Fraction(0)) + coeff
        return MultiPoly(keep, out)

    def derivative(self, name: str) -> "MultiPoly":
        if name not in self.variables:
            return ZERO
        i = self.variables.index(name)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                out[tuple(f)] = c * e[i]
        return MultiPoly(self.variables, out)

    def univariate_coeffs(self) -> Tuple[Optional[str], List[Fraction]]:
        """Low-to-high coefficients of a polynomial in at most one variable."""
        if len(self.variables) > 1:
            raise ValueError(f"not univariate: {self.variables}")
        if not self.variables:
            return None, [self.terms.get((), Fraction(0))]
        deg = self.degree_in(self.variables[0])
        coeffs = [Fraction(0)] * (deg + 1)
        for (k,), c in self.terms.items():
            coeffs[k] = c
        return self.variables[0], coeffs


ZERO = MultiPoly((), {})
ONE = MultiPoly.const(1)


def monic(f: MultiPoly) -> MultiPoly:
    """Scale so the graded-lex leading coefficient is 1."""
    if f.is_zero():
        return f
    return f.scale(1 / f.leading()[1])


# exact division -----------------------------------------------------------

def divide_exact(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Return q with f = q*g, raising ValueError if g does not divide f."""
    if g.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if f.is_zero():
        return ZERO
    vs = _sorted_vars(f.variables + g.variables)
    ge, gc = max(g.aligned(vs).items(), key=lambda t: _grlex_key(t[0]))
    g_al = g.aligned(vs)
    r = f.aligned(vs)
    q: Dict[Exps, Fraction] = {}
    while r:
        re = max(r, key=_grlex_key)
        rc = r[re]
        d = tuple(x - y for x, y in zip(re, ge))
        if any(k < 0 for k in d):
            raise ValueError("polynomial division is not exact")
        t = rc / gc
        q[d] = q.get(d, Fraction(0)) + t
        for e, c in g_al.items():
            k = tuple(x + y for x, y in zip(e, d))
            v = r.get(k, Fraction(0)) - t * c
            if v:
                r[k] = v
            else:
                r.pop(k, None)
    return MultiPoly(vs, q)


# gcd: content + pseudo-remainder recursion in the last variable ------------

def _as_univ(f: MultiPoly, x: str) -> Dict[int, MultiPoly]:
    if x not in f.variables:
        return {0: f} if not f.is_zero() else {}
    i = f.variables.index(x)
    rest = f.variables[:i] + f.variables[i + 1:]
    buckets: Dict[int, Dict[Exps, Fraction]] = {}
    for e, c in f.terms.items():
        buckets.setdefault(e[i], {})[e[:i] + e[i + 1:]] = c
    return {k: MultiPoly(rest, t) for k, t in buckets.items()}


def _from_univ(coeffs: Mapping[int, MultiPoly], x: str) -> MultiPoly:
    out = ZERO
    xv = MultiPoly.var(x)
    for k, c in coeffs.items():
        out = out + c * xv**k
    return out


def _content(f: MultiPoly, x: str) -> MultiPoly:
    g = ZERO
    for c in _as_univ(f, x).values():
        g = poly_gcd(g, c)
        if g == ONE:
            break
    return g


def _primitive(f: MultiPoly, x: str) -> MultiPoly:
    if f.is_zero():
        return f
    return monic(divide_exact(f, _content(f, x)))


def _prem(f: MultiPoly, g: MultiPoly, x: str) -> MultiPoly:
    """Pseudo-remainder of f by g as polynomials in x."""
    df, dg = f.degree_in(x), g.degree_in(x)
    gu = _as_univ(g, x)
    lc = gu[dg]
    xv = MultiPoly.var(x)
    r = f
    steps = df - dg + 1
    while not r.is_zero() and r.degree_in(x) >= dg:
        dr = r.degree_in(x)
        lr = _as_univ(r, x)[dr]
        r = r * lc - lr * g * xv ** (dr - dg)
        steps -= 1
    if steps > 0:
        r = r * lc**steps
    return r


def _monomial_gcd(m: MultiPoly, f: MultiPoly) -> MultiPoly:
    vs = _sorted_vars(m.variables + f.variables)
    (me,) = m.aligned(vs).keys()
    low = list(me)
    for e in f.aligned(vs):
        low = [min(a, b) for a, b in zip(low, e)]
    return MultiPoly(vs, {tuple(low): 1})


_P = (1 << 61) - 1


def _univ_gcd_degree_mod(f: List[int], g: List[int]) -> int:
    """Degree of gcd of two dense coefficient lists (low to high) over GF(_P)."""
    def trim(p):
        while p and p[-1] == 0:
            p.pop()
        return p
    a, b = trim(list(f)), trim(list(g))
    if len(a) < len(b):
        a, b = b, a
    while b:
        inv = pow(b[-1], _P - 2, _P)
        while len(a) >= len(b):
            t = a[-1] * inv % _P
            k = len(a) - len(b)
            for i, c in enumerate(b):
                a[i + k] = (a[i + k] - t * c) % _P
            trim(a)
        a, b = b, a
    return len(a) - 1


def _image_mod(f: MultiPoly, x: str, point: Mapping[str, int]) -> Optional[List[int]]:
    i = f.variables.index(x)
    out = [0] * (f.degree_in(x) + 1)
    for e, c in f.terms.items():
        if c.denominator % _P == 0:
            return None
        v = c.numerator * pow(c.denominator, _P - 2, _P)
        for j, name in enumerate(f.variables):
            if j != i and e[j]:
                v = v * pow(point[name], e[j], _P)
        out[e[i]] = (out[e[i]] + v) % _P
    return out


_PROBE = (1000003, 7000121, 11000027, 13000027, 17000023, 19000013, 23000009, 29000039)


def _coprime_by_images(f: MultiPoly, g: MultiPoly) -> bool:
    """True only if gcd(f, g) is certainly 1.

    For each variable x, specialize the others at integers mod a prime,
    keeping both leading coefficients in x nonzero; the image gcd then
    bounds the x-degree of the true gcd from above.
    """
    vs = _sorted_vars(f.variables + g.variables)
    for x in vs:
        if x not in f.variables or x not in g.variables:
            continue
        others = [v for v in vs if v != x]
        for shift in range(3):
            point = {v: _PROBE[(k + shift) % len(_PROBE)] * (shift + 1) for k, v in enumerate(others)}
            fi, gi = _image_mod(f, x, point), _image_mod(g, x, point)
            if fi and gi and fi[-1] and gi[-1]:
                break
        else:
            return False
        if _univ_gcd_degree_mod(fi, gi) > 0:
            return False
    return True


def _univ_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Euclid over Q for two polynomials in the same single variable."""
    (x,) = _sorted_vars(f.variables + g.variables)

    def dense(p: MultiPoly) -> List[Fraction]:
        out = [Fraction(0)] * (p.degree_in(x) + 1)
        for (k,), c in p.aligned((x,)).items():
            out[k] = c
        return out

    return MultiPoly.from_univariate(x, _ugcd(dense(f), dense(g)))


# heuristic gcd: evaluate at a large integer, recurse, rebuild xi-adically ------

IntPoly = Dict[Exps, int]


def _to_int_poly(f: MultiPoly, vs: Tuple[str, ...]) -> IntPoly:
    terms = f.aligned(vs)
    den = 1
    for c in terms.values():
        den = den * c.denominator // math.gcd(den, c.denominator)
    out = {e: int(c * den) for e, c in terms.items()}
    g = 0
    for c in out.values():
        g = math.gcd(g, c)
    return {e: c // g for e, c in out.items()}


def _eval_first(f: IntPoly, xi: int) -> IntPoly:
    out: IntPoly = {}
    for e, c in f.items():
        k = e[1:]
        out[k] = out.get(k, 0) + c * xi ** e[0]
    return {e: c for e, c in out.items() if c}


def _heu(f: IntPoly, g: IntPoly, nvars: int) -> Optional[IntPoly]:
    if nvars == 0:
        return {(): math.gcd(f.get((), 0), g.get((), 0))}
    # integer content splits off; the xi-adic lift only recovers primitive parts
    cf, cg = _int_content(f), _int_content(g)
    unit = math.gcd(cf, cg)
    f = {e: c // cf for e, c in f.items()}
    g = {e: c // cg for e, c in g.items()}
    norm = min(max(abs(c) for c in f.values()), max(abs(c) for c in g.values()))
    xi = 2 * norm + 29
    for _ in range(6):
        fe, ge = _eval_first(f, xi), _eval_first(g, xi)
        if fe and ge:
            h = _heu(fe, ge, nvars - 1)
            if h is not None:
                out: IntPoly = {}
                for rest, v in h.items():
                    i = 0
                    while v:
                        d = v % xi
                        if d > xi // 2:
                            d -= xi
                        if d:
                            out[(i,) + rest] = d
                        v = (v - d) // xi
                        i += 1
                cont = _int_content(out)
                cand = {e: c // cont for e, c in out.items()}
                if _int_divides(cand, f) and _int_divides(cand, g):
                    return {e: c * unit for e, c in cand.items()}
        xi = xi * 73794 // 27011
    return None


def _int_content(f: IntPoly) -> int:
    g = 0
    for c in f.values():
        g = math.gcd(g, c)
    return g


def _int_divides(d: IntPoly, f: IntPoly) -> bool:
    vs = tuple(f"_{i}" for i in range(len(next(iter(f)))))
    try:
        divide_exact(MultiPoly(vs, f), MultiPoly(vs, d))
    except ValueError:
        return False
    return True


def _heuristic_gcd(f: MultiPoly, g: MultiPoly) -> Optional[MultiPoly]:
    vs = _sorted_vars(f.variables + g.variables)
    h = _heu(_to_int_poly(f, vs), _to_int_poly(g, vs), len(vs))
    return None if h is None else monic(MultiPoly(vs, h))


def _monomial_part(f: MultiPoly) -> MultiPoly:
    """Largest monomial dividing f (coefficient 1)."""
    low = None
    for e in f.terms:
        low = list(e) if low is None else [min(a, b) for a, b in zip(low, e)]
    if not low or not any(low):
        return ONE
    return MultiPoly(f.variables, {tuple(low): 1})


def poly_gcd(f: MultiPoly, g: MultiPoly) -> MultiPoly:
    """Monic greatest common divisor over Q."""
    if f.is_zero():
        return monic(g)
    if g.is_zero():
        return monic(f)
    if f.is_constant() or g.is_constant():
        return ONE
    if f.is_monomial():
        return _monomial_gcd(f, g)
    if g.is_monomial():
        return _monomial_gcd(g, f)
    mf, mg = _monomial_part(f), _monomial_part(g)
    if mf != ONE or mg != ONE:
        m = _monomial_gcd(mf, mg) if mf != ONE and mg != ONE else ONE
        return monic(m * poly_gcd(divide_exact(f, mf), divide_exact(g, mg)))
    if _coprime_by_images(f, g):
        return ONE
    if len(_sorted_vars(f.variables + g.variables)) == 1:
        return _univ_gcd(f, g)
    h = _heuristic_gcd(f, g)
    if h is not None:
        return h
    vs = _sorted_vars(f.variables + g.variables)
    x = vs[-1]
    if x not in f.variables:
        return poly_gcd(f, _content(g, x))
    if x not in g.variables:
        return poly_gcd(_content(f, x), g)
    cf, cg = _content(f, x), _content(g, x)
    c = poly_gcd(cf, cg)
    a, b = divide_exact(f, cf), divide_exact(g, cg)
    if a.degree_in(x) < b.degree_in(x):
        a, b = b, a
    while not b.is_zero() and b.degree_in(x) > 0:
        r = _prem(a, b, x)
        a, b = b, _primitive(r, x)
    core = _primitive(a, x) if b.is_zero() else ONE
    return monic(c * core)


# rational functions --------------------------------------------------------

class RatFunc:
    """Normalized quotient num/den: coprime, den leading coefficient 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: MultiPoly, den: MultiPoly = ONE, *, _normalized: bool = False):
        if _normalized:
            self.num, self.den = num, den
            return
        n, d = rf_normalize_parts(num, den)
        self.num, self.den = n, d

    @classmethod
    def of(cls, x) -> "RatFunc":
        if isinstance(x, RatFunc):
            return x
        if isinstance(x, MultiPoly):
            return cls(x)
        return cls(MultiPoly.const(as_rational(x)))

    @classmethod
    def var(cls, name: str) -> "RatFunc":
        return cls(MultiPoly.var(name), ONE, _normalized=True)

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction:
        return self.num.constant_value() / self.den.constant_value()

    @property
    def variables(self) -> Tuple[str, ...]:
        return _sorted_vars(self.num.variables + self.den.variables)

    def _coerce(self, other):
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, MultiPoly) or (
            isinstance(other, (int, Fraction)) and not isinstance(other, bool)
        ):
            return RatFunc.of(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den, _normalized=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, k: int):
        if k < 0:
            return RatFunc.of(1) / self**(-k)
        return RatFunc(self.num**k, self.den**k, _normalized=True) if k else RatFunc.of(1)

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"RatFunc({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    def evaluate(self, point: Mapping[str, Scalar]) -> Fraction:
        return rf_eval(self, point)

    def substitute(self, point: Mapping[str, Scalar]) -> "RatFunc":
        d = self.den.substitute(point)
        if d.is_zero():
            raise ZeroDivisionError("pole at substitution point")
        return RatFunc(self.num.substitute(point), d)


def rf_normalize_parts(n: MultiPoly, d: MultiPoly) -> Tuple[MultiPoly, MultiPoly]:
    if d.is_zero():
        raise ZeroDivisionError("zero denominator")
    if n.is_zero():
        return ZERO, ONE
    g = poly_gcd(n, d)
    if g != ONE:
        n, d = divide_exact(n, g), divide_exact(d, g)
    lc = d.leading()[1]
    if lc != 1:
        n, d = n.scale(1 / lc), d.scale(1 / lc)
    return n, d


def rf_normalize(n: MultiPoly, d: MultiPoly) -> RatFunc:
    """Canonical coprime form with monic (graded-lex) denominator."""
    return RatFunc(n, d)


def rf_eval(f: RatFunc, point: Mapping[str, Scalar]) -> Fraction:
    den = f.den.evaluate(point)
    if den == 0:
        raise ZeroDivisionError("rational function has a pole at this point")
    return f.num.evaluate(point) / den


# text and JSON serialization ---------------------------------------------

def _term_text(vs: Sequence[str], e: Exps, c: Fraction) -> str:
    mono = "*".join(v if k == 1 else f"{v}^{k}" for v, k in zip(vs, e) if k)
    mag = abs(c)
    if not mono:
        return rational_str(mag)
    if mag == 1:
        return mono
    return f"{rational_str(mag)}*{mono}"


def poly_text(f: MultiPoly) -> str:
    if f.is_zero():
        return "0"
    parts = []
    for i, e in enumerate(sorted(f.terms, key=_grlex_key, reverse=True)):
        c = f.terms[e]
        body = _term_text(f.variables, e, c)
        if i == 0:
            parts.append(("-" if c < 0 else "") + body)
        else:
            parts.append(("- " if c < 0 else "+ ") + body)
    return " ".join(parts)


def to_text(f: Union[MultiPoly, RatFunc]) -> str:
    """Canonical text: terms in descending graded-lex order."""
    if isinstance(f, MultiPoly):
        return poly_text(f)
    if f.den == ONE:
        return poly_text(f.num)
    return f"({poly_text(f.num)})/({poly_text(f.den)})"


_BINOPS = {ast.Add: "__add__", ast.Sub: "__sub__", ast.Mult: "__mul__", ast.Div: "__truediv__"}


def _eval_node(node: ast.AST) -> RatFunc:
    if isinstance(node, ast.Expression):
        return _eval_node(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, int):
        return RatFunc.of(node.value)
    if isinstance(node, ast.Name):
        return RatFunc.var(node.id)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, ast.Pow):
            k = node.right
            if isinstance(k, ast.UnaryOp) and isinstance(k.op, ast.USub):
                k = k.operand
                sign = -1
            else:
                sign = 1
            if not (isinstance(k, ast.Constant) and isinstance(k.value, int)):
                raise ValueError("exponents must be integer literals")
            return _eval_node(node.left) ** (sign * k.value)
        op = _BINOPS.get(type(node.op))
        if op is None:
            raise ValueError(f"unsupported operator {type(node.op).__name__}")
        return getattr(_eval_node(node.left), op)(_eval_node(node.right))
    raise ValueError(f"unsupported expression element {ast.dump(node)}")


def parse_ratfunc(text: str) -> RatFunc:
    """Parse ``+ - * / ^`` expressions over integers and symbol names."""
    try:
        tree = ast.parse(text.strip().replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {text!r}") from exc
    return _eval_node(tree)


def parse_poly(text: str) -> MultiPoly:
    f = parse_ratfunc(text)
    if f.den != ONE:
        raise ValueError(f"{text!r} is not a polynomial")
    return f.num


def poly_to_json(f: MultiPoly) -> dict:
    order = sorted(f.terms, key=_grlex_key, reverse=True)
    return {
        "vars": list(f.variables),
        "terms": [[list(e), rational_str(f.terms[e])] for e in order],
    }


def poly_from_json(obj: Mapping) -> MultiPoly:
    return MultiPoly(obj["vars"], {tuple(e): as_rational(c) for e, c in obj["terms"]})


def ratfunc_to_json(f: RatFunc) -> dict:
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def ratfunc_from_json(obj: Mapping) -> RatFunc:
    return RatFunc(poly_from_json(obj["num"]), poly_from_json(obj["den"]))


# univariate real roots -----------------------------------------------------

def _trim(p: List[Fraction]) -> List[Fraction]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _ueval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


def _udivmod(a: List[Fraction], b: List[Fraction]) -> Tuple[List[Fraction], List[Fraction]]:
    a, b = _trim(a), _trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 1)
    r = list(a)
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        t = r[-1] / b[-1]
        q[k] = t
        for i, c in enumerate(b):
            r[i + k] -= t * c
        r = _trim(r)
    return q, r


def _ugcd(a: List[Fraction], b: List[Fraction]) -> List[Fraction]:
    a, b = _trim(a), _trim(b)
    while b:
        a, b = b, _udivmod(a, b)[1]
    return [c / a[-1] for c in a] if a else a


def _uderiv(p: Sequence[Fraction]) -> List[Fraction]:
    return [c * k for k, c in enumerate(p)][1:]


def sturm_sequence(p: Sequence[Fraction]) -> List[List[Fraction]]:
    seq = [_trim(list(p)), _trim(_uderiv(p))]
    while seq[-1]:
        r = _udivmod(seq[-2], seq[-1])[1]
        if not r:
            break
        seq.append([-c for c in r])
    return [s for s in seq if s]


def _sign_changes(seq: Sequence[Sequence[Fraction]], x: Fraction) -> int:
    signs = [v > 0 for v in (_ueval(s, x) for s in seq) if v != 0]
    return sum(1 for u, v in zip(signs, signs[1:]) if u != v)


def isolate_real_roots(
    p: MultiPoly, interval: Tuple[Scalar, Scalar]
) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint open rational intervals, one per distinct real root in ``interval``.

    The interval is open.  Every returned (lo, hi) has non-root endpoints and
    contains exactly one root; intervals are sorted left to right.
    """
    _, coeffs = p.univariate_coeffs()
    coeffs = _trim(coeffs)
    if not coeffs:
        raise ValueError("zero polynomial has no isolated roots")
    lo, hi = as_rational(interval[0]), as_rational(interval[1])
    if lo >= hi:
        raise ValueError("empty interval")
    if len(coeffs) == 1:
        return []
    g = _ugcd(coeffs, _uderiv(coeffs))
    w = _udivmod(coeffs, g)[0] if len(g) > 1 else coeffs
    for r in (lo, hi):
        while len(w) > 1 and _ueval(w, r) == 0:
            w = _udivmod(w, [-r, Fraction(1)])[0]
    if len(w) == 1:
        return []
    seq = sturm_sequence(w)

    def count(a: Fraction, b: Fraction) -> int:
        return _sign_changes(seq, a) - _sign_changes(seq, b)

    out: List[Tuple[Fraction, Fraction]] = []
    stack = [(lo, hi)]
    while stack:
        a, b = stack.pop()
        n = count(a, b)
        if n == 0:
            continue
        if n == 1:
            out.append((a, b))
            continue
        mid = next(
            m for m in (a + (b - a) * t for t in _split_points()) if _ueval(w, m) != 0
        )
        stack.append((mid, b))
        stack.append((a, mid))
    return sorted(out)


def _split_points():
    yield Fraction(1, 2)
    k = 3
    while True:
        for j in range(1, k):
            yield Fraction(j, k)
        k += 1


def count_real_roots(p: MultiPoly, interval: Tuple[Scalar, Scalar]) -> int:
    return len(isolate_real_roots(p, interval))


def refine_root(
    p: MultiPoly, iv: Tuple[Fraction, Fraction], width: Scalar
) -> Tuple[Fraction, Fraction]:
    """Shrink an isolating interval by bisection until narrower than ``width``."""
    _, coeffs = p.univariate_coeffs()
    a, b = iv
    fa = _ueval(coeffs, a)
    width = as_rational(width)
    while b - a > width:
        m = (a + b) / 2
        fm = _ueval(coeffs, m)
        if fm == 0:
            return (m, m)
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return (a, b)


# sign verdicts ----------------------------------------------------------------

STRICTLY_POSITIVE = "strictly-positive"
STRICTLY_NEGATIVE = "strictly-negative"
HAS_ZERO = "has-zero"
HAS_POLE = "has-pole"


def split_pi_power(f: MultiPoly) -> Tuple[int, MultiPoly]:
    """Write f = pi^k * g with g free of pi; fails if f mixes pi powers."""
    if f.is_zero():
        return 0, f
    if "pi" not in f.variables:
        return 0, f
    i = f.variables.index("pi")
    ks = {e[i] for e in f.terms}
    if len(ks) != 1:
        raise ValueError("expression is not a pure power of pi times a pi-free factor")
    (k,) = ks
    return k, f.substitute({"pi": 1})


def strip_pi(f: RatFunc) -> Tuple[int, RatFunc]:
    """Return (k, g) with f = pi^k * g and g free of pi."""
    kn, n = split_pi_power(f.num)
    kd, d = split_pi_power(f.den)
    return kn - kd, RatFunc(n, d)


def sign_on_interval(f: RatFunc, interval: Tuple[Scalar, Scalar]) -> str:
    """Exact sign verdict of a one-parameter function on an open interval.

    ``pi`` is treated as a positive constant, so it must factor out.
    """
    _, g = strip_pi(f)
    if len(g.variables) > 1:
        raise ValueError(f"expected one free parameter, got {g.variables}")
    lo, hi = as_rational(interval[0]), as_rational(interval[1])
    if g.num.is_zero():
        return HAS_ZERO
    if not g.den.is_constant() and isolate_real_roots(g.den, (lo, hi)):
        return HAS_POLE
    if not g.num.is_constant() and isolate_real_roots(g.num, (lo, hi)):
        return HAS_ZERO
    var = g.variables[0] if g.variables else "a"
    v = rf_eval(g, {var: (lo + hi) / 2})
    return STRICTLY_POSITIVE if v > 0 else STRICTLY_NEGATIVE


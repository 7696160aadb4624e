"""Sorted atoms produced by splitting formulas along the two projections.

``Lin`` is a linear constraint on the value sort in logarithmic notation,
``sum n_v * p1(v) + c  (= | <)  0``.  It only speaks about nonzero
variables: if any of its variables is 0 the atom is false.  Splitting always
pairs ``Lin`` atoms with explicit :class:`IsZero` guards, which keeps whole
formulas exact.

``Lay`` is a polynomial constraint on the layer sort, ``d(lam) (= | != | <) 0``
with ``d`` a rational polynomial in the layers of the variables.  Layers are
always defined (the layer of 0 is 1).  ``Lay`` atoms are only built for
nontrivial layerings, where layer sums are ordinary sums of positive numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import Theta
from .syntax import (
    FALSE, TRUE, Eq, Formula, LayerConst, Lit, LLt, Lt, Mul, Not, One, P1, P2, Pow, Term, Var, Zero,
    Add, conj, disj,
)
from .core import LayeredElem


# --------------------------------------------------------------------------
# multivariate rational polynomials (layer side)

Mono = tuple  # ((var, exp), ...) sorted, exps >= 1


def mono_mul(a: Mono, b: Mono) -> Mono:
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


@dataclass(frozen=True)
class MPoly:
    terms: tuple  # ((Mono, Fraction), ...) sorted, nonzero coefficients

    @classmethod
    def of(cls, mapping: dict) -> "MPoly":
        return cls(tuple(sorted((m, Fraction(c)) for m, c in mapping.items() if c != 0)))

    @classmethod
    def const(cls, c) -> "MPoly":
        return cls.of({(): c})

    @classmethod
    def var(cls, v: str, exp: int = 1) -> "MPoly":
        return cls.of({((v, exp),): 1})

    def as_dict(self) -> dict:
        return dict(self.terms)

    def __add__(self, other: "MPoly") -> "MPoly":
        d = self.as_dict()
        for m, c in other.terms:
            d[m] = d.get(m, 0) + c
        return MPoly.of(d)

    def __neg__(self) -> "MPoly":
        return MPoly(tuple((m, -c) for m, c in self.terms))

    def __sub__(self, other: "MPoly") -> "MPoly":
        return self + (-other)

    def __mul__(self, other) -> "MPoly":
        if not isinstance(other, MPoly):
            return MPoly.of({m: c * other for m, c in self.terms})
        d: dict = {}
        for m1, c1 in self.terms:
            for m2, c2 in other.terms:
                m = mono_mul(m1, m2)
                d[m] = d.get(m, 0) + c1 * c2
        return MPoly.of(d)

    def __pow__(self, n: int) -> "MPoly":
        out = MPoly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == () for m, _ in self.terms)

    def const_value(self) -> Fraction:
        return self.as_dict().get((), Fraction(0))

    def variables(self) -> set[str]:
        return {v for m, _ in self.terms for v, _ in m}

    def degree_in(self, v: str) -> int:
        return max((dict(m).get(v, 0) for m, _ in self.terms), default=-1)

    def coeffs_in(self, v: str) -> dict[int, "MPoly"]:
        """Write the polynomial as ``sum_k c_k * v**k``; returns ``{k: c_k}``."""
        out: dict[int, dict] = {}
        for m, c in self.terms:
            d = dict(m)
            k = d.pop(v, 0)
            rest = tuple(sorted(d.items()))
            out.setdefault(k, {})
            out[k][rest] = out[k].get(rest, 0) + c
        return {k: MPoly.of(d) for k, d in out.items()}

    def subst(self, v: str, p: "MPoly") -> "MPoly":
        out = MPoly.of({})
        for k, c in self.coeffs_in(v).items():
            out = out + c * (p ** k)
        return out

    def evaluate(self, env: dict) -> Fraction:
        total = Fraction(0)
        for m, c in self.terms:
            t = c
            for v, e in m:
                t *= Fraction(env[v]) ** e
            total += t
        return total

    def primitive(self) -> "MPoly":
        """Positive rescaling to coprime integer coefficients."""
        if not self.terms:
            return self
        den = math.lcm(*(c.denominator for _, c in self.terms))
        g = math.gcd(*(int(c * den) for _, c in self.terms))
        return self * Fraction(den, g)


# --------------------------------------------------------------------------
# atoms


class SplitAtom(Formula):
    __slots__ = ()


@dataclass(frozen=True)
class IsZero(SplitAtom):
    var: str

    def variables(self):
        return {self.var}

    def evaluate(self, model: Theta, env: dict) -> bool:
        return env[self.var].value is None

    def substitute(self, var, term):
        if var != self.var:
            return self
        if isinstance(term, Zero):
            return TRUE
        if isinstance(term, Var):
            return IsZero(term.name)
        raise TypeError("IsZero only admits variable renaming")

    def surface(self, model: Theta) -> Formula:
        return Eq(Var(self.var), Zero())


@dataclass(frozen=True)
class Lin(SplitAtom):
    coeffs: tuple  # ((var, int), ...) sorted by var
    const: Fraction
    rel: str  # "=", "<", or "<=" (the last only inside feasibility checks)

    def variables(self):
        return {v for v, _ in self.coeffs}

    def coeff(self, v: str) -> int:
        return dict(self.coeffs).get(v, 0)

    def evaluate(self, model: Theta, env: dict) -> bool:
        total = self.const
        for v, n in self.coeffs:
            val = env[v].value
            if val is None:
                return False
            total += n * val
        if self.rel == "=":
            return total == 0
        return total < 0 if self.rel == "<" else total <= 0

    def substitute(self, var, term):
        if var not in self.variables():
            return self
        if isinstance(term, Zero):
            return FALSE
        if isinstance(term, Var):
            d = dict(self.coeffs)
            d[term.name] = d.get(term.name, 0) + d.pop(var)
            return lin(d, self.const, self.rel)
        raise TypeError("Lin only admits variable renaming")

    def surface(self, model: Theta) -> Formula:
        left: list[Term] = []
        right: list[Term] = []
        for v, n in self.coeffs:
            base = P1(Var(v))
            t = base if abs(n) == 1 else Pow(base, abs(n))
            (left if n > 0 else right).append(t)
        if self.const != 0:
            left.insert(0, Lit(LayeredElem(model.L.one, self.const)))
        a, b = _product(left), _product(right)
        guards = [Not(Eq(Var(v), Zero())) for v, _ in self.coeffs]
        rel = {"=": Eq(a, b), "<": Lt(a, b), "<=": disj([Lt(a, b), Eq(P1(a), P1(b))])}[self.rel]
        return conj(guards + [rel])

    def __str__(self):
        s = " + ".join(f"{n}*{v}" for v, n in self.coeffs)
        return f"[{s} + {self.const} {self.rel} 0]"


@dataclass(frozen=True)
class Lay(SplitAtom):
    poly: MPoly
    rel: str  # "=", "!=", "<"

    def variables(self):
        return self.poly.variables()

    def evaluate(self, model: Theta, env: dict) -> bool:
        val = self.poly.evaluate({v: env[v].layer for v in self.poly.variables()})
        if self.rel == "=":
            return val == 0
        if self.rel == "!=":
            return val != 0
        return val < 0

    def substitute(self, var, term):
        if var not in self.variables():
            return self
        if isinstance(term, Var):
            return lay(self.poly.subst(var, MPoly.var(term.name)), self.rel)
        if isinstance(term, Zero):
            return lay(self.poly.subst(var, MPoly.const(1)), self.rel)
        raise TypeError("Lay only admits variable renaming or zero")

    def surface(self, model: Theta) -> Formula:
        pos = {m: c for m, c in self.poly.terms if c > 0}
        neg = {m: -c for m, c in self.poly.terms if c < 0}
        a, b = _layer_term(pos), _layer_term(neg)
        if self.rel == "=":
            return Eq(a, b)
        if self.rel == "!=":
            return Not(Eq(a, b))
        return LLt(a, b)

    def __str__(self):
        return f"[lay {self.poly.terms} {self.rel} 0]"


def _product(ts: list[Term]) -> Term:
    if not ts:
        return One()
    out = ts[0]
    for t in ts[1:]:
        out = Mul(out, t)
    return out


def _layer_term(d: dict) -> Term:
    parts = []
    for m, c in sorted(d.items()):
        factors: list[Term] = []
        if c != 1 or not m:
            factors.append(LayerConst(c if c.denominator != 1 else int(c)))
        for v, e in m:
            b = P2(Var(v))
            factors.append(b if e == 1 else Pow(b, e))
        parts.append(_product(factors))
    out = parts[0]
    for p in parts[1:]:
        out = Add(out, p)
    return out


# --------------------------------------------------------------------------
# smart constructors


def lin(coeffs: dict, const, rel: str) -> Formula:
    """Normalized linear atom, or TRUE/FALSE when it is ground."""
    items = {v: Fraction(c) for v, c in coeffs.items() if c != 0}
    const = Fraction(const)
    if not items:
        ok = const == 0 if rel == "=" else (const < 0 if rel == "<" else const <= 0)
        return TRUE if ok else FALSE
    den = math.lcm(*(c.denominator for c in items.values()))
    g = math.gcd(*(int(c * den) for c in items.values()))
    scale = Fraction(den, g)
    keys = sorted(items)
    if rel == "=" and items[keys[0]] < 0:
        scale = -scale
    return Lin(tuple((v, int(items[v] * scale)) for v in keys), const * scale, rel)


def lay(poly: MPoly, rel: str) -> Formula:
    """Normalized layer atom; decided outright when the sign of ``poly`` is forced."""
    if poly.is_zero():
        return TRUE if rel == "=" else FALSE
    signs = {c > 0 for _, c in poly.terms}
    if len(signs) == 1:
        positive = signs.pop()
        if rel == "=":
            return FALSE
        if rel == "!=":
            return TRUE
        return FALSE if positive else TRUE
    p = poly.primitive()
    if rel != "<" and p.terms[0][1] < 0:
        p = -p
    return Lay(p, rel)


def negate_atom(a: SplitAtom) -> Formula:
    """Exact negation of a sorted atom, without a leading ``Not`` where possible."""
    if isinstance(a, IsZero):
        return Not(a)
    if isinstance(a, Lay):
        if a.rel == "=":
            return lay(a.poly, "!=")
        if a.rel == "!=":
            return lay(a.poly, "=")
        return disj([lay(a.poly, "="), lay(-a.poly, "<")])
    if isinstance(a, Lin):
        d = dict(a.coeffs)
        neg = {v: -n for v, n in d.items()}
        zero_cases = [IsZero(v) for v in sorted(d)]
        if a.rel == "=":
            return disj([lin(d, a.const, "<"), lin(neg, -a.const, "<")] + zero_cases)
        if a.rel == "<=":
            return disj([lin(neg, -a.const, "<")] + zero_cases)
        return disj([lin(d, a.const, "="), lin(neg, -a.const, "<")] + zero_cases)
    raise TypeError(a)


def lin_terms(a: Lin) -> tuple[dict, Fraction]:
    return dict(a.coeffs), a.const

"""Layering semirings.

A layering semiring is an ordered cancellative semiring without zero.  Three
computable instances are provided: the one-point semiring ``{1}`` (which turns
layered domains into plain max-plus algebras), the naturals ``N>=1`` and the
positive rationals ``Q>0``.  Besides arithmetic, each instance answers the
univariate polynomial queries needed when a layer variable is eliminated.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence


class LayerSemiring:
    """Base class.  Subclasses must represent their unit as something ``== 1``."""

    name = "abstract"
    one = 1
    trivial = False
    integral = False

    def add(self, a, b):
        raise NotImplementedError

    def mul(self, a, b):
        raise NotImplementedError

    def cmp(self, a, b) -> int:
        return (a > b) - (a < b)

    def contains(self, a) -> bool:
        raise NotImplementedError

    def multiple(self, k: int, a=None):
        """``k * a`` for a natural multiplicity ``k >= 1`` (``a`` defaults to 1)."""
        if k < 1:
            raise ValueError("multiplicity must be positive")
        a = self.one if a is None else a
        out = a
        for _ in range(k - 1):
            out = self.add(out, a)
        return out

    def subtract_query(self, a, b) -> bool:
        """Is there a layer ``lam`` with ``a + lam == b``?"""
        raise NotImplementedError

    def parse(self, text: str):
        raise NotImplementedError

    def format(self, a) -> str:
        return str(a)

    def sample(self, rng: random.Random):
        raise NotImplementedError

    def solve(self, eqs, diseqs, lts=()) -> "LayerSolveResult":
        return LayerSolveResult.unsupported(f"no solver for layering {self.name!r}")

    def __repr__(self):
        return f"<{type(self).__name__}>"


class TrivialLayers(LayerSemiring):
    name = "trivial"
    trivial = True
    integral = True

    def add(self, a, b):
        return 1

    def mul(self, a, b):
        return 1

    def contains(self, a) -> bool:
        return a == 1

    def subtract_query(self, a, b) -> bool:
        return a == 1 and b == 1

    def parse(self, text: str):
        if text.strip() != "1":
            raise ValueError(f"bad layer literal {text!r} for trivial layering")
        return 1

    def sample(self, rng):
        return 1

    def solve(self, eqs, diseqs, lts=()):
        # every polynomial evaluates to 1, so r = s always holds and r != s, r < s never do
        if diseqs or lts:
            return LayerSolveResult.unsat()
        return LayerSolveResult.sat(1)


class NatLayers(LayerSemiring):
    name = "nat"
    integral = True

    def add(self, a, b):
        return a + b

    def mul(self, a, b):
        return a * b

    def contains(self, a) -> bool:
        return isinstance(a, int) and not isinstance(a, bool) and a >= 1

    def subtract_query(self, a, b) -> bool:
        return b - a >= 1

    def parse(self, text: str):
        text = text.strip()
        if not text.isdigit() or int(text) < 1:
            raise ValueError(f"bad layer literal {text!r} for nat layering")
        return int(text)

    def sample(self, rng):
        return rng.randint(1, 20)

    def solve(self, eqs, diseqs, lts=()):
        return _solve_univariate(self, eqs, diseqs, lts)


class PosRatLayers(LayerSemiring):
    name = "posrat"
    one = Fraction(1)

    def add(self, a, b):
        return Fraction(a) + b

    def mul(self, a, b):
        return Fraction(a) * b

    def contains(self, a) -> bool:
        return isinstance(a, (int, Fraction)) and not isinstance(a, bool) and a > 0

    def subtract_query(self, a, b) -> bool:
        return b - a > 0

    def parse(self, text: str):
        text = text.strip()
        num, _, den = text.partition("/")
        if not num.isdigit() or (den and not den.isdigit()):
            raise ValueError(f"bad layer literal {text!r} for posrat layering")
        val = Fraction(int(num), int(den) if den else 1)
        if val <= 0:
            raise ValueError(f"layer must be positive, got {text!r}")
        return val

    def format(self, a) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def sample(self, rng):
        return Fraction(rng.randint(1, 12), rng.randint(1, 6))

    def solve(self, eqs, diseqs, lts=()):
        return _solve_univariate(self, eqs, diseqs, lts)


TRIVIAL = TrivialLayers()
NAT = NatLayers()
POSRAT = PosRatLayers()

LAYERINGS = {"trivial": TRIVIAL, "nat": NAT, "posrat": POSRAT}


def get_layering(name: str) -> LayerSemiring:
    try:
        return LAYERINGS[name]
    except KeyError:
        raise ValueError(f"unknown layering {name!r}; choose from {sorted(LAYERINGS)}") from None


# --------------------------------------------------------------------------
# univariate layer polynomials


@dataclass(frozen=True)
class LayerPoly:
    """Univariate polynomial ``sum c_d * y**d`` with ground coefficients.

    Coefficients are elements of N*L' already folded into rationals, which is
    exact for ``nat`` and ``posrat``.  Internally the difference of two layer
    polynomials may carry negative coefficients; zero coefficients are dropped.
    """

    coeffs: tuple  # ((degree, Fraction), ...) sorted by degree

    @classmethod
    def of(cls, mapping) -> "LayerPoly":
        if not isinstance(mapping, dict):
            mapping = {0: mapping}
        items = sorted((int(d), Fraction(c)) for d, c in mapping.items() if c != 0)
        return cls(tuple(items))

    @classmethod
    def y(cls, degree: int = 1, coeff=1) -> "LayerPoly":
        return cls.of({degree: coeff})

    @classmethod
    def const(cls, c) -> "LayerPoly":
        return cls.of({0: c})

    def as_dict(self) -> dict:
        return dict(self.coeffs)

    def __add__(self, other: "LayerPoly") -> "LayerPoly":
        d = self.as_dict()
        for k, c in other.coeffs:
            d[k] = d.get(k, 0) + c
        return LayerPoly.of(d)

    def __sub__(self, other: "LayerPoly") -> "LayerPoly":
        return self + LayerPoly(tuple((k, -c) for k, c in other.coeffs))

    def __mul__(self, other: "LayerPoly") -> "LayerPoly":
        d: dict = {}
        for k1, c1 in self.coeffs:
            for k2, c2 in other.coeffs:
                d[k1 + k2] = d.get(k1 + k2, 0) + c1 * c2
        return LayerPoly.of(d)

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return self.coeffs[-1][0] if self.coeffs else -1

    def __call__(self, y) -> Fraction:
        return sum((c * Fraction(y) ** k for k, c in self.coeffs), Fraction(0))

    def integer_coeffs(self) -> list[int]:
        """Dense coefficient list (index = degree) scaled to primitive integers."""
        if not self.coeffs:
            return []
        den = math.lcm(*(c.denominator for _, c in self.coeffs))
        dense = [0] * (self.degree + 1)
        for k, c in self.coeffs:
            dense[k] = int(c * den)
        g = math.gcd(*dense)
        return [a // g for a in dense]


@dataclass(frozen=True)
class LayerSolveResult:
    tag: str  # "SAT" | "UNSAT" | "UNSUPPORTED"
    witness: object = None
    reason: str = ""

    @classmethod
    def sat(cls, w):
        return cls("SAT", w)

    @classmethod
    def unsat(cls):
        return cls("UNSAT")

    @classmethod
    def unsupported(cls, reason):
        return cls("UNSUPPORTED", reason=reason)

    def __bool__(self):
        return self.tag == "SAT"


def solve_layer_system(L: LayerSemiring, eqs: Sequence, diseqs: Sequence = (), lts: Sequence = ()):
    """Find ``y`` in ``L`` with ``r(y) = s(y)``, ``p(y) != q(y)``, ``a(y) < b(y)``.

    Each system entry is a pair of :class:`LayerPoly`.
    """
    return L.solve(list(eqs), list(diseqs), list(lts))


def _divisors(n: int) -> list[int]:
    n = abs(n)
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def positive_rational_roots(p: LayerPoly) -> list[Fraction]:
    """Positive rational roots of a nonzero polynomial (rational root theorem)."""
    a = p.integer_coeffs()
    while a and a[0] == 0:  # y > 0, so factors of y carry no roots
        a = a[1:]
    if len(a) <= 1:
        return []
    cands = {Fraction(u, v) for u in _divisors(a[0]) for v in _divisors(a[-1])}
    return sorted(r for r in cands if p(r) == 0)


def cauchy_bound(p: LayerPoly) -> Fraction:
    """Every real root of ``p`` has absolute value below this bound."""
    a = p.integer_coeffs()
    lead = abs(a[-1])
    return 1 + Fraction(max((abs(c) for c in a[:-1]), default=0), lead)


_SCAN_LIMIT = 10**6


def _solve_univariate(L: LayerSemiring, eqs, diseqs, lts) -> LayerSolveResult:
    diffs_eq = [r - s for r, s in eqs]
    diffs_ne = [p - q for p, q in diseqs]
    diffs_lt = [a - b for a, b in lts]

    if any(d.is_zero() for d in diffs_ne):
        return LayerSolveResult.unsat()
    if any(d.is_zero() for d in diffs_lt):
        return LayerSolveResult.unsat()
    nontrivial = [d for d in diffs_eq if not d.is_zero()]

    def ok(y) -> bool:
        return (
            all(d(y) == 0 for d in diffs_eq)
            and all(d(y) != 0 for d in diffs_ne)
            and all(d(y) < 0 for d in diffs_lt)
        )

    if nontrivial:
        cands = positive_rational_roots(nontrivial[0])
        if L.integral:
            cands = [c for c in cands if c.denominator == 1]
        for c in cands:
            if ok(c):
                return LayerSolveResult.sat(int(c) if L.integral else c)
        return LayerSolveResult.unsat()

    if L.integral:
        # past every Cauchy bound all signs are constant, and no root remains
        bound = max((cauchy_bound(d) for d in diffs_ne + diffs_lt if d.degree > 0), default=Fraction(1))
        top = math.floor(bound) + 1
        if top > _SCAN_LIMIT:
            return LayerSolveResult.unsupported("layer search range too large")
        for y in range(1, top + 1):
            if ok(y):
                return LayerSolveResult.sat(y)
        return LayerSolveResult.unsat()

    for y in _open_set_test_points(diffs_ne + diffs_lt):
        if y > 0 and ok(y):
            return LayerSolveResult.sat(y)
    return LayerSolveResult.unsat()


def _open_set_test_points(polys: Iterable[LayerPoly]) -> list[Fraction]:
    """Rational points meeting every cell of (0, inf) cut out by the real roots."""
    polys = [p for p in polys if p.degree > 0]
    if not polys:
        return [Fraction(1)]
    import sympy

    y = sympy.Symbol("y")
    prod = sympy.Integer(1)
    for p in polys:
        prod *= sum(sympy.Integer(c) * y**k for k, c in enumerate(p.integer_coeffs()))
    sqf = sympy.Poly(sympy.sqf_part(sympy.expand(prod)), y)
    while sqf.degree() > 0 and sqf.eval(0) == 0:
        sqf = sympy.quo(sqf, sympy.Poly(y, y))
    coeffs = [Fraction(int(c)) for c in reversed(sqf.all_coeffs())]
    # positive roots lie above this (Cauchy bound applied to the reversed polynomial)
    low = 1 / (1 + max(abs(c) for c in coeffs[1:]) / abs(coeffs[0])) if len(coeffs) > 1 else Fraction(1)
    pts = {Fraction(1), low / 2}
    if sqf.degree() <= 0:
        return sorted(pts)
    eps = Fraction(1, 2)
    for _ in range(200):
        ivs = [(Fraction(str(a)), Fraction(str(b))) for (a, b), _ in sqf.intervals(inf=0, eps=eps)]
        # isolating intervals may touch; refine until every gap is open
        if all(b1 < a2 for (_, b1), (a2, _) in zip(ivs, ivs[1:])):
            break
        eps /= 4
    for (a1, b1), (a2, b2) in zip(ivs, ivs[1:]):
        pts.add((b1 + a2) / 2)
    if ivs:
        pts.add(ivs[-1][1] + 1)
    return sorted(p for p in pts if p > 0)

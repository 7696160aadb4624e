"""Layered elements and the canonical model ``L x Q``.

Values are written logarithmically: the value group is ``(Q, +, max)`` with
``None`` standing for the bottom element (minus infinity).  A layered element
``[l]a`` multiplies by adding values and tropically adds by keeping the larger
value, summing layers on ties.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .layering import LayerSemiring, get_layering

Value = Optional[Fraction]  # None is bottom


def value_lt(a: Value, b: Value) -> bool:
    if a is None:
        return b is not None
    return b is not None and a < b


@dataclass(frozen=True)
class LayeredElem:
    layer: object
    value: Value

    def __post_init__(self):
        if self.value is None and self.layer != 1:
            raise ValueError("the zero element must sit on layer 1")
        if self.value is not None and not isinstance(self.value, Fraction):
            object.__setattr__(self, "value", Fraction(self.value))

    @property
    def is_zero(self) -> bool:
        return self.value is None


ZERO = LayeredElem(1, None)
ONE = LayeredElem(1, Fraction(0))


def elem(layer, value) -> LayeredElem:
    """Build ``[layer]value``; a bottom value forces layer 1."""
    if value is None:
        return ZERO
    return LayeredElem(layer, Fraction(value))


class InverseOfZero(ArithmeticError):
    pass


_ELEM_RE = re.compile(r"\s*\[\s*([0-9/]+)\s*\]\s*(-?\d+(?:/\d+)?)\s*$")


class Theta:
    """The canonical model over a given layering semiring."""

    def __init__(self, layering: LayerSemiring | str):
        self.L = get_layering(layering) if isinstance(layering, str) else layering
        self.zero = ZERO
        self.one = LayeredElem(self.L.one, Fraction(0))

    def __repr__(self):
        return f"Theta({self.L.name})"

    def __eq__(self, other):
        return isinstance(other, Theta) and other.L is self.L

    def __hash__(self):
        return hash(self.L.name)

    # arithmetic ---------------------------------------------------------

    def add(self, x: LayeredElem, y: LayeredElem) -> LayeredElem:
        if x.value is None:
            return y
        if y.value is None:
            return x
        if x.value > y.value:
            return x
        if y.value > x.value:
            return y
        return LayeredElem(self.L.add(x.layer, y.layer), x.value)

    def mul(self, x: LayeredElem, y: LayeredElem) -> LayeredElem:
        if x.value is None or y.value is None:
            return ZERO
        return LayeredElem(self.L.mul(x.layer, y.layer), x.value + y.value)

    def pow(self, x: LayeredElem, n: int) -> LayeredElem:
        if n < 1:
            raise ValueError("exponent must be >= 1")
        out = x
        for _ in range(n - 1):
            out = self.mul(out, x)
        return out

    def p1(self, x: LayeredElem) -> LayeredElem:
        return LayeredElem(self.L.one, x.value) if x.value is not None else ZERO

    def p2(self, x: LayeredElem) -> LayeredElem:
        return LayeredElem(x.layer, Fraction(0))

    def value_inverse(self, x: LayeredElem) -> LayeredElem:
        if x.value is None:
            raise InverseOfZero("0 has no inverse")
        return LayeredElem(self.L.one, -x.value)

    def layer_const(self, layer) -> LayeredElem:
        return LayeredElem(layer, Fraction(0))

    # relations ----------------------------------------------------------

    def lt(self, x: LayeredElem, y: LayeredElem) -> bool:
        return value_lt(x.value, y.value)

    def layer_lt(self, x: LayeredElem, y: LayeredElem) -> bool:
        """Compare layers only; this is the order the layer axioms speak about."""
        return self.L.cmp(x.layer, y.layer) < 0

    def nu_equiv(self, x: LayeredElem, y: LayeredElem) -> bool:
        return x.value == y.value

    def surpasses(self, a: LayeredElem, b: LayeredElem) -> bool:
        if a == b:
            return True
        if a.value == b.value and self.L.cmp(a.layer, b.layer) > 0:
            return True
        # a = b + c with layer(c) >= layer(b)
        if value_lt(b.value, a.value):
            # b is strictly dominated, so c must be a itself
            return self.L.cmp(a.layer, b.layer) >= 0
        if a.value == b.value and a.value is not None:
            # c on the same value: layer(b) + lam = layer(a) with lam >= layer(b)
            return self._tie_witness(a.layer, b.layer)
        return False

    def _tie_witness(self, la, lb) -> bool:
        L = self.L
        if L.trivial:
            return la == 1 and lb == 1
        return L.subtract_query(lb, la) and L.cmp(la - lb, lb) >= 0

    # literals -----------------------------------------------------------

    def parse_elem(self, text: str) -> LayeredElem:
        t = text.strip()
        if t == "0":
            return ZERO
        if t == "1":
            return self.one
        m = _ELEM_RE.match(t)
        if not m:
            raise ValueError(f"bad element literal {text!r}")
        return LayeredElem(self.L.parse(m.group(1)), Fraction(m.group(2)))

    def format_elem(self, x: LayeredElem) -> str:
        if x.value is None:
            return "0"
        return f"[{self.L.format(x.layer)}]{format_rat(x.value)}"

    def sample(self, rng: random.Random, zero_prob: float = 1 / 16) -> LayeredElem:
        """Random element: value p/q with |p| <= 100, q <= 10; bottom with ``zero_prob``."""
        if rng.random() < zero_prob:
            return ZERO
        return LayeredElem(self.L.sample(rng), Fraction(rng.randint(-100, 100), rng.randint(1, 10)))


def format_rat(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"

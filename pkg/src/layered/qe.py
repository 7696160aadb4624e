"""Quantifier elimination in the canonical model.

Each ``E w`` is pushed through an exact disjunctive split of its body.  In a
clause ``w`` is either zero (drop it) or nonzero; then its value ``p1(w)``
and layer ``p2(w)`` range independently over ``Q`` and ``L``, so the linear
value atoms and the layer atoms are eliminated separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

from . import linear
from .atoms import IsZero, Lay, Lin, MPoly, lay
from .core import Theta
from .layering import LayerPoly, LayerSemiring
from .normal import DEFAULT_CAPS, CapExceeded, Caps, split_clauses
from .syntax import (
    FALSE, TRUE, And, Exists, FalseF, Forall, Formula, Implies, Not, Or, TrueF, Zero, conj, disj,
    free_vars, substitute,
)


class Unsupported(Exception):
    """The formula leaves the fragment this procedure can eliminate exactly."""


@dataclass
class QEReport:
    result: Formula
    trace: list = field(default_factory=list)


def is_quantifier_free(f) -> bool:
    if isinstance(f, (Exists, Forall)):
        return False
    if isinstance(f, Not):
        return is_quantifier_free(f.arg)
    if isinstance(f, (And, Or)):
        return all(is_quantifier_free(a) for a in f.args)
    if isinstance(f, Implies):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return True


# --------------------------------------------------------------------------
# the layer sort


def _linear_coeff(p: MPoly, w: str):
    """``(a, e)`` with ``p = a*w + e`` and ``a`` a nonzero constant, else None."""
    if p.degree_in(w) != 1:
        return None
    cs = p.coeffs_in(w)
    a = cs[1]
    if not a.is_const():
        return None
    return a.const_value(), cs.get(0, MPoly.of({}))


def _to_layer_poly(p: MPoly, w: str) -> LayerPoly:
    return LayerPoly.of({k: c.const_value() for k, c in p.coeffs_in(w).items()})


def _nonzero_in(p: MPoly, w: str) -> Formula:
    """``p`` is not the zero polynomial in ``w`` (so it has finitely many roots)."""
    return disj(lay(c, "!=") for c in p.coeffs_in(w).values())


def _integral(p: MPoly) -> bool:
    return all(c.denominator == 1 for _, c in p.terms)


def eliminate_layer(w: str, atoms: list, L: LayerSemiring) -> tuple[Formula, str]:
    """Eliminate ``E p2(w)`` from a conjunction of :class:`Lay` atoms."""
    inw = [a for a in atoms if w in a.variables()]
    rest = [a for a in atoms if w not in a.variables()]
    if not inw:
        return conj(rest), "absent"
    if L.trivial:
        return conj(rest + [lay(a.poly.subst(w, MPoly.const(1)), a.rel) for a in inw]), "trivial"

    # equality with a constant leading coefficient: substitute the solution
    lin_eqs = [(a, _linear_coeff(a.poly, w)) for a in inw if a.rel == "="]
    lin_eqs = [(a, lc) for a, lc in lin_eqs if lc is not None]
    if lin_eqs:
        eq, (k, e) = min(lin_eqs, key=lambda t: (abs(t[1][0]), repr(t[0])))
        sol = e * Fraction(-1, 1) * (1 / Fraction(k))
        if L.integral and not _integral(sol):
            if not sol.is_const():
                raise Unsupported("layer equation with a non-integral parametric solution")
            return FALSE, "layer-equality"
        out = rest + [lay(-sol, "<")]
        out += [lay(a.poly.subst(w, sol), a.rel) for a in inw if a is not eq]
        return conj(out), "layer-equality"

    if not L.integral:
        signed = [(a, lc) for a in inw if a.rel == "=" for lc in [_signed_linear(a.poly, w)] if lc]
        if signed:
            eq, (k, e) = min(signed, key=lambda t: repr(t[0]))
            out = rest + [lay(e * k, "<")]  # the solution -e/k is positive
            out += [_clear_subst(a, w, k, e) for a in inw if a is not eq]
            return conj(out), "layer-equality"

    if all(a.variables() == {w} for a in inw):
        eqs = [(_to_layer_poly(a.poly, w), LayerPoly.const(0)) for a in inw if a.rel == "="]
        nes = [(_to_layer_poly(a.poly, w), LayerPoly.const(0)) for a in inw if a.rel == "!="]
        lts = [(_to_layer_poly(a.poly, w), LayerPoly.const(0)) for a in inw if a.rel == "<"]
        res = L.solve(eqs, nes, lts)
        if res.tag == "UNSUPPORTED":
            raise Unsupported(res.reason)
        return (conj(rest) if res.tag == "SAT" else FALSE), "layer-solve"

    if any(a.rel == "=" for a in inw):
        raise Unsupported("parametric layer equation of degree > 1 in the bound variable")

    lts = [a for a in inw if a.rel == "<"]
    nes = [a for a in inw if a.rel == "!="]
    bounds = []
    for a in lts:
        lc = _linear_coeff(a.poly, w)
        if lc is None:
            raise Unsupported("parametric layer inequality that is not linear in the bound variable")
        bounds.append(lc)
    lowers = [MPoly.const(0)]  # layers are positive
    uppers = []
    for k, e in bounds:
        bound = e * (Fraction(-1) / k)  # k*w + e < 0
        (uppers if k > 0 else lowers).append(bound)
    if not uppers:
        return conj(rest + [_nonzero_in(a.poly, w) for a in nes]), "layer-unbounded"
    if not L.integral:
        pairs = [lay(lo - up, "<") for lo in lowers for up in uppers]
        return conj(rest + pairs + [_nonzero_in(a.poly, w) for a in nes]), "layer-bounds"
    return _integer_bounds(w, rest, lts, nes), "layer-integer-bounds"


def _signed_linear(p: MPoly, w: str):
    """``(k, e)`` with ``p = k*w + e`` and every term of ``k`` of one sign, so ``k != 0`` on layers."""
    if p.degree_in(w) != 1:
        return None
    cs = p.coeffs_in(w)
    k = cs[1]
    if w in k.variables() or len({c > 0 for _, c in k.terms}) != 1:
        return None
    return k, cs.get(0, MPoly.of({}))


def _clear_subst(a: Lay, w: str, k: MPoly, e: MPoly) -> Formula:
    """``a`` at ``w = -e/k``, multiplied through by ``k**d``."""
    cs = a.poly.coeffs_in(w)
    d = max(cs)
    q = MPoly.of({})
    for i, c in cs.items():
        q = q + c * (-e) ** i * k ** (d - i)
    negative = k.terms[0][1] < 0
    if a.rel == "<" and negative and d % 2:
        q = -q
    return lay(q, a.rel)


def _integer_bounds(w: str, rest: list, lts: list, nes: list) -> Formula:
    """Integer Fourier-Motzkin for unit coefficients; disequations split into two sides."""
    for a in lts:
        k, e = _linear_coeff(a.poly, w)
        if abs(k) != 1 or not _integral(e):
            raise Unsupported("bounded natural layer with a non-unit coefficient")
    sides = []
    for a in nes:
        lc = _linear_coeff(a.poly, w)
        if lc is None or abs(lc[0]) != 1 or not _integral(lc[1]):
            raise Unsupported("bounded natural layer with a nonlinear disequation")
        sides.append(((lay(a.poly, "<")), lay(-a.poly, "<")))
    if len(sides) > 12:
        raise CapExceeded("too many layer disequations to split")
    branches = []
    for choice in product(*sides) if sides else [()]:
        atoms = list(lts) + [c for c in choice if isinstance(c, Lay)]
        if any(isinstance(c, FalseF) for c in choice):
            continue
        lowers = [MPoly.const(0)]
        uppers = []
        extra = []
        for a in atoms:
            if w not in a.variables():
                extra.append(a)
                continue
            k, e = _linear_coeff(a.poly, w)
            bound = e * (Fraction(-1) / k)
            (uppers if k > 0 else lowers).append(bound)
        if not uppers:
            branches.append(conj(extra))
            continue
        # integers: lo < w < up has a solution iff lo + 1 < up
        pairs = [lay(lo - up + MPoly.const(1), "<") for lo in lowers for up in uppers]
        branches.append(conj(extra + pairs))
    return conj(rest + [disj(branches)])


# --------------------------------------------------------------------------
# clauses


def zero_case_split(w: str, clause: Formula, M: Theta, caps: Caps = DEFAULT_CAPS) -> tuple[Formula, Formula]:
    """The clause specialised to ``w = 0`` and to ``w != 0``, over sorted atoms."""
    zero, nonzero = [], []
    body = conj([clause, IsZero(w)]), conj([clause, Not(IsZero(w))])
    for target, f, guard in ((zero, body[0], IsZero(w)), (nonzero, body[1], Not(IsZero(w)))):
        for c in split_clauses(f, M, caps):
            target.append(conj(a for a in c if a != guard))
    return _fold_zero_only(disj(zero), M), _fold_zero_only(disj(nonzero), M)


def _fold_zero_only(f: Formula, M: Theta) -> Formula:
    """Replace a formula built only from ``IsZero`` atoms by TRUE/FALSE when it is constant."""
    names: set = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, IsZero):
            names.add(g.var)
        elif isinstance(g, Not):
            stack.append(g.arg)
        elif isinstance(g, (And, Or)):
            stack.extend(g.args)
        elif not isinstance(g, (TrueF, FalseF)):
            return f
    if len(names) > 10:
        return f
    from .core import ONE, ZERO
    from .decide import eval_formula

    names = sorted(names)
    seen = {eval_formula(f, dict(zip(names, bits)), M) for bits in product((ZERO, ONE), repeat=len(names))}
    if len(seen) == 1:
        return TRUE if seen.pop() else FALSE
    return f


def _is_split_literal(a) -> bool:
    if isinstance(a, Not):
        a = a.arg
    return isinstance(a, (IsZero, Lin, Lay)) or isinstance(a, (TrueF, FalseF))


def eliminate_exists(w: str, clause, M: Theta, trace: list | None = None,
                     caps: Caps = DEFAULT_CAPS) -> Formula:
    """Quantifier-free equivalent of ``E w. clause``.

    ``clause`` is a conjunction (an :class:`And`, a single literal or a
    sequence of literals).  Literals that are not sorted atoms are split first.
    """
    if isinstance(clause, And):
        lits = list(clause.args)
    elif isinstance(clause, (list, tuple)):
        lits = list(clause)
    else:
        lits = [clause]
    if not all(_is_split_literal(a) for a in lits):
        parts = [eliminate_exists(w, c, M, trace, caps) for c in split_clauses(conj(lits), M, caps)]
        return disj(parts)
    if any(isinstance(a, FalseF) for a in lits):
        return FALSE
    lits = [a for a in lits if not isinstance(a, TrueF)]
    if IsZero(w) in lits:
        others = [substitute(a, w, Zero()) for a in lits if a != IsZero(w)]
        if Not(IsZero(w)) in others or any(isinstance(a, Not) and a.arg == TRUE for a in others):
            return FALSE
        if trace is not None:
            trace.append(f"E {w}: zero branch")
        return conj(others)
    lits = [a for a in lits if a != Not(IsZero(w))]
    lin_w = [a for a in lits if isinstance(a, Lin) and w in a.variables()]
    lay_w = [a for a in lits if isinstance(a, Lay) and w in a.variables()]
    rest = [a for a in lits if a not in lin_w and a not in lay_w]
    if any(w in free_vars(a) for a in rest):
        raise TypeError(f"unexpected literal mentioning {w}")
    lin_res, lin_rule = linear.eliminate(w, lin_w)
    if any(isinstance(a, FalseF) for a in lin_res):
        return FALSE
    # Lin atoms are false at zero, so their other variables must stay nonzero
    params = sorted({v for a in lin_w for v in a.variables()} - {w})
    rest += [Not(IsZero(v)) for v in params if Not(IsZero(v)) not in rest]
    lay_res, lay_rule = eliminate_layer(w, lay_w, M.L)
    if trace is not None:
        trace.append(f"E {w}: value {lin_rule}, layer {lay_rule}")
    return conj(rest + lin_res + [lay_res])


def _exists(w: str, body: Formula, M: Theta, caps: Caps, trace: list) -> Formula:
    if w not in free_vars(body):
        return body
    clauses = split_clauses(body, M, caps)
    trace.append(f"E {w}: {len(clauses)} clauses")
    parts = []
    for c in clauses:
        r = eliminate_exists(w, c, M, trace, caps)
        if isinstance(r, TrueF):
            return TRUE
        parts.append(r)
    return _fold_zero_only(disj(dict.fromkeys(parts)), M)


def _qe(f: Formula, M: Theta, caps: Caps, trace: list) -> Formula:
    if is_quantifier_free(f):
        return f
    if isinstance(f, Not):
        return Not(_qe(f.arg, M, caps, trace))
    if isinstance(f, And):
        return conj(_qe(a, M, caps, trace) for a in f.args)
    if isinstance(f, Or):
        return disj(_qe(a, M, caps, trace) for a in f.args)
    if isinstance(f, Implies):
        return Implies(_qe(f.left, M, caps, trace), _qe(f.right, M, caps, trace))
    body = _qe(f.body, M, caps, trace)
    if isinstance(f, Exists):
        return _exists(f.var, body, M, caps, trace)
    trace.append(f"A {f.var}: as ~E {f.var}. ~")
    return _negate(_exists(f.var, Not(body), M, caps, trace))


def _negate(f: Formula) -> Formula:
    if isinstance(f, TrueF):
        return FALSE
    if isinstance(f, FalseF):
        return TRUE
    if isinstance(f, Not):
        return f.arg
    return Not(f)


def qe(f: Formula, M: Theta, caps: Caps = DEFAULT_CAPS) -> QEReport:
    """Innermost-first elimination; quantifier-free input comes back unchanged."""
    trace: list = []
    if is_quantifier_free(f):
        return QEReport(f, trace)
    result = _qe(f, M, caps, trace)
    if not free_vars(result):
        from .decide import eval_formula

        result = TRUE if eval_formula(result, {}, M) else FALSE
    return QEReport(result, trace)

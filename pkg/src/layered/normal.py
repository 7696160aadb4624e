"""Polynomial normal forms, monomial orderings and atom splitting.

A term is expanded into a sum of monomials ``c * prod p1(x)^a * prod p2(x)^b``
where ``c`` is a nonzero layered constant.  Projections of sums are not
polynomial: ``p1(x + y)`` depends on which summand dominates.  Such terms are
handled by :func:`to_cases`, which returns guarded pieces, each guard naming
the dominant index set of one inner sum.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product

from .atoms import IsZero, Lay, Lin, MPoly, SplitAtom, lay, lin, negate_atom
from .core import LayeredElem, Theta
from .linear import feasible
from .syntax import (
    ATOMS, FALSE, TRUE, Add, And, Eq, Exists, FalseF, Forall, Formula, Implies, LayerConst, Lit, LLt,
    Lt, Mul, Not, One, Or, P1, P2, Pow, Term, TrueF, Var, Zero, conj, disj, free_vars, substitute,
)


@dataclass(frozen=True)
class Caps:
    monomials: int = 16
    dnf: int = 100_000
    zero_vars: int = 12


DEFAULT_CAPS = Caps()


class CapExceeded(RuntimeError):
    pass


class NotPolynomial(ValueError):
    """A projection of a sum has no single polynomial form."""


# --------------------------------------------------------------------------
# polynomials


@dataclass(frozen=True)
class Monomial:
    p1: tuple  # ((var, exp), ...)
    p2: tuple
    coeff: LayeredElem  # never zero

    def key(self):
        return (self.p1, self.p2, self.coeff.value)

    def value_form(self) -> tuple[dict, Fraction]:
        return dict(self.p1), self.coeff.value

    def layer_poly(self) -> MPoly:
        return MPoly.of({self.p2: Fraction(self.coeff.layer)})

    def variables(self) -> set[str]:
        return {v for v, _ in self.p1} | {v for v, _ in self.p2}


@dataclass(frozen=True)
class PolyNF:
    monomials: tuple = ()

    def __len__(self):
        return len(self.monomials)

    def __iter__(self):
        return iter(self.monomials)

    def __getitem__(self, i):
        return self.monomials[i]

    @property
    def is_zero(self) -> bool:
        return not self.monomials


def _merge_exps(a: tuple, b: tuple) -> tuple:
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted((v, e) for v, e in d.items() if e))


def normalize(M: Theta, monos) -> PolyNF:
    acc: dict = {}
    for m in monos:
        if m.coeff.is_zero:
            continue
        p2 = () if M.L.trivial else m.p2
        k = (m.p1, p2, m.coeff.value)
        if k in acc:
            acc[k] = M.L.add(acc[k], m.coeff.layer)
        else:
            acc[k] = m.coeff.layer
    return PolyNF(tuple(Monomial(p1, p2, LayeredElem(l, v)) for (p1, p2, v), l in sorted(acc.items())))


def poly_const(M: Theta, e: LayeredElem) -> PolyNF:
    return normalize(M, [Monomial((), (), e)])


def poly_var(M: Theta, x: str) -> PolyNF:
    return normalize(M, [Monomial(((x, 1),), ((x, 1),), M.one)])


def poly_add(M: Theta, p: PolyNF, q: PolyNF) -> PolyNF:
    return normalize(M, p.monomials + q.monomials)


def mono_mul(M: Theta, a: Monomial, b: Monomial) -> Monomial:
    return Monomial(_merge_exps(a.p1, b.p1), _merge_exps(a.p2, b.p2), M.mul(a.coeff, b.coeff))


def poly_mul(M: Theta, p: PolyNF, q: PolyNF) -> PolyNF:
    return normalize(M, [mono_mul(M, a, b) for a in p for b in q])


def poly_pow(M: Theta, p: PolyNF, n: int) -> PolyNF:
    out = p
    for _ in range(n - 1):
        out = poly_mul(M, out, p)
    return out


def mono_p1(M: Theta, m: Monomial) -> Monomial:
    return Monomial(m.p1, (), LayeredElem(M.L.one, m.coeff.value))


def mono_p2(M: Theta, m: Monomial) -> Monomial:
    return Monomial((), m.p2, LayeredElem(m.coeff.layer, Fraction(0)))


def to_poly(t: Term, M: Theta) -> PolyNF:
    """Expand ``t``; raises :class:`NotPolynomial` on projections of sums."""
    cases = to_cases(t, M)
    if len(cases) != 1 or cases[0].guards:
        raise NotPolynomial(f"projection of a sum in {t!r}")
    return cases[0].poly


def eval_mono(M: Theta, m: Monomial, env: dict) -> LayeredElem:
    out = m.coeff
    for v, e in m.p1:
        out = M.mul(out, M.pow(M.p1(env[v]), e))
    for v, e in m.p2:
        out = M.mul(out, M.pow(M.p2(env[v]), e))
    return out


def eval_poly(M: Theta, p: PolyNF, env: dict) -> LayeredElem:
    out = M.zero
    for m in p:
        out = M.add(out, eval_mono(M, m, env))
    return out


def poly_vars(p: PolyNF) -> set[str]:
    return set().union(*(m.variables() for m in p)) if p.monomials else set()


# --------------------------------------------------------------------------
# monomial-terms orderings


@dataclass(frozen=True)
class MTO:
    I: frozenset
    J: frozenset


def _value_diff(a: Monomial, b: Monomial) -> tuple[dict, Fraction]:
    da, ca = a.value_form()
    db, cb = b.value_form()
    d = dict(da)
    for v, e in db.items():
        d[v] = d.get(v, 0) - e
    return d, ca - cb


def delta_atoms(p: PolyNF, I) -> list[Formula]:
    """Lin atoms saying exactly the monomials in ``I`` attain the maximum value."""
    if not I:
        return [TRUE] if p.is_zero else [FALSE]
    idx = sorted(I)
    i0 = p[idx[0]]
    out = []
    for i in idx[1:]:
        out.append(lin(*_value_diff(p[i], i0), "="))
    for j in range(len(p)):
        if j not in I:
            out.append(lin(*_value_diff(p[j], i0), "<"))
    return out


def delta_condition(p: PolyNF, o: MTO) -> Formula:
    return conj(delta_atoms(p, o.I))


def enumerate_mtos(p: PolyNF, caps: Caps = DEFAULT_CAPS) -> list[MTO]:
    n = len(p)
    if n == 0:
        raise ValueError("the zero polynomial has no orderings")
    if n > caps.monomials:
        raise CapExceeded(f"{n} monomials exceed the cap of {caps.monomials}")
    full = frozenset(range(n))
    return [MTO(frozenset(I), full - frozenset(I))
            for k in range(1, n + 1) for I in combinations(range(n), k)]


def feasible_mtos(p: PolyNF, caps: Caps = DEFAULT_CAPS, extra=()) -> list[tuple[MTO, list]]:
    """Orderings whose condition is satisfiable together with ``extra`` Lin atoms."""
    out = []
    for o in enumerate_mtos(p, caps):
        d = delta_atoms(p, o.I)
        if feasible(list(extra) + d):
            out.append((o, d))
    return out


def essential_form(p: PolyNF, M: Theta, caps: Caps = DEFAULT_CAPS) -> PolyNF:
    """Drop monomials that can never belong to a dominant set."""
    if len(p) <= 1:
        return p
    if len(p) > caps.monomials:
        raise CapExceeded(f"{len(p)} monomials exceed the cap of {caps.monomials}")
    keep = []
    for i, m in enumerate(p):
        # m can reach the maximum iff v_j <= v_m is satisfiable for all j
        atoms = [lin(*_value_diff(q, m), "<=") for j, q in enumerate(p) if j != i]
        if feasible(atoms):
            keep.append(m)
    return PolyNF(tuple(keep))


# --------------------------------------------------------------------------
# guarded pieces


@dataclass(frozen=True)
class Dominance:
    """Guard: the monomials of ``poly`` with maximal value are exactly ``I``."""

    poly: PolyNF
    I: frozenset

    def holds(self, M: Theta, env: dict) -> bool:
        vals = [eval_mono(M, m, env).value for m in self.poly]
        finite = [v for v in vals if v is not None]
        if not finite:
            return not self.I
        top = max(finite)
        return self.I == frozenset(i for i, v in enumerate(vals) if v == top)

    def atoms(self) -> list[Formula]:
        return delta_atoms(self.poly, self.I)


@dataclass(frozen=True)
class Case:
    guards: tuple
    poly: PolyNF

    def lin_guards(self) -> list[Formula]:
        return [a for g in self.guards if g.I for a in g.atoms()]


def _combine(cases_a, cases_b, op, prune) -> list[Case]:
    out = []
    for a, b in product(cases_a, cases_b):
        guards = tuple(dict.fromkeys(a.guards + b.guards))
        seen = {}
        if any(seen.setdefault(g.poly, g.I) != g.I for g in guards):
            continue
        c = Case(guards, op(a.poly, b.poly))
        if prune and not feasible(c.lin_guards()):
            continue
        out.append(c)
    return out


def _collapse_combine(*args) -> list[Case]:
    return _collapse(_combine(*args))


def _project(M: Theta, cases, which: int, caps: Caps, prune: bool) -> list[Case]:
    out = []
    for c in cases:
        p = c.poly
        if len(p) <= 1:
            if p.is_zero:
                out.append(Case(c.guards, p if which == 1 else poly_const(M, M.one)))
            elif which == 1:
                out.append(Case(c.guards, normalize(M, [mono_p1(M, p[0])])))
            elif not p[0].p1 or M.L.trivial:
                out.append(Case(c.guards, normalize(M, [mono_p2(M, p[0])])))
            else:
                # p2 of a product is only multiplicative while the product is nonzero
                out.append(Case(c.guards + (Dominance(p, frozenset({0})),), normalize(M, [mono_p2(M, p[0])])))
                out.append(Case(c.guards + (Dominance(p, frozenset()),), poly_const(M, M.one)))
            continue
        if prune:
            options = [o.I for o, _ in feasible_mtos(p, caps, c.lin_guards())]
        else:
            options = [o.I for o in enumerate_mtos(p, caps)]
        for I in options:
            if which == 1:
                q = normalize(M, [mono_p1(M, p[min(I)])])
            else:
                q = normalize(M, [mono_p2(M, p[i]) for i in sorted(I)])
            out.append(Case(c.guards + (Dominance(p, I),), q))
        if all(m.variables() for m in p):
            q = PolyNF() if which == 1 else poly_const(M, M.one)
            out.append(Case(c.guards + (Dominance(p, frozenset()),), q))
    return out


def to_cases(t: Term, M: Theta, caps: Caps = DEFAULT_CAPS, prune: bool = True) -> list[Case]:
    """Guarded polynomial pieces of ``t``.

    The guards of the pieces are mutually exclusive and jointly exhaustive,
    and on each guard the term evaluates like the piece's polynomial.  With
    ``prune`` pieces whose guards are unsatisfiable are dropped; this is
    sound for every assignment, zeros included, because a zero variable can
    be replaced by a nonzero one of very small value without changing which
    finite monomials dominate.
    """
    if isinstance(t, Var):
        return [Case((), poly_var(M, t.name))]
    if isinstance(t, Zero):
        return [Case((), PolyNF())]
    if isinstance(t, One):
        return [Case((), poly_const(M, M.one))]
    if isinstance(t, Lit):
        return [Case((), poly_const(M, t.elem))]
    if isinstance(t, LayerConst):
        return [Case((), poly_const(M, M.layer_const(t.layer)))]
    if isinstance(t, Add):
        return _collapse_combine(to_cases(t.left, M, caps, prune), to_cases(t.right, M, caps, prune),
                        lambda p, q: poly_add(M, p, q), prune)
    if isinstance(t, Mul):
        return _collapse_combine(to_cases(t.left, M, caps, prune), to_cases(t.right, M, caps, prune),
                        lambda p, q: poly_mul(M, p, q), prune)
    if isinstance(t, Pow):
        base = to_cases(t.base, M, caps, prune)
        out = base
        for _ in range(t.exp - 1):
            out = _combine(out, base, lambda p, q: poly_mul(M, p, q), prune)
        return _collapse(out)
    if isinstance(t, (P1, P2)):
        return _collapse(_project(M, to_cases(t.arg, M, caps, prune), 1 if isinstance(t, P1) else 2, caps, prune))
    raise TypeError(f"not a term: {t!r}")


def _collapse(cases: list[Case]) -> list[Case]:
    # the guards are exhaustive, so one shared polynomial needs none
    if len({c.poly for c in cases}) == 1:
        return [Case((), cases[0].poly)]
    return cases


# --------------------------------------------------------------------------
# splitting atoms into sorted constraints

Clause = tuple  # conjunction of sorted literals
_TOP: list = [()]  # DNF of true
_BOTTOM: list = []  # DNF of false


def _dominant(p: PolyNF, I) -> tuple:
    """Value form (None for bottom) and layer polynomial of ``p`` on ordering ``I``."""
    if p.is_zero:
        return None, MPoly.const(1)
    layer = MPoly.of({})
    for i in I:
        layer = layer + p[i].layer_poly()
    return p[min(I)].value_form(), layer


def _lin_cmp(f1, f2, rel: str) -> Formula:
    (d1, c1), (d2, c2) = f1, f2
    d = dict(d1)
    for v, e in d2.items():
        d[v] = d.get(v, 0) - e
    return lin(d, c1 - c2, rel)


def _bool_dnf(truth: bool) -> list:
    return list(_TOP) if truth else []


def _compare(M: Theta, kind, side1, side2, negated: bool) -> list:
    """DNF over sorted atoms of ``side1 kind side2`` given dominant forms."""
    (v1, s1), (v2, s2) = side1, side2
    trivial = M.L.trivial
    if kind is LLt:
        if trivial:
            return _bool_dnf(negated)
        if not negated:
            return [(lay(s1 - s2, "<"),)]
        return [(lay(s1 - s2, "="),), (lay(s2 - s1, "<"),)]
    if v1 is None or v2 is None:
        truth = (v1 is None and v2 is None) if kind is Eq else (v1 is None and v2 is not None)
        if kind is Eq and truth and not trivial:
            truth = True  # layers of 0 are both 1
        return _bool_dnf(truth != negated)
    if kind is Lt:
        if not negated:
            return [(_lin_cmp(v1, v2, "<"),)]
        return [(_lin_cmp(v1, v2, "="),), (_lin_cmp(v2, v1, "<"),)]
    lay_eq = TRUE if trivial else lay(s1 - s2, "=")
    if not negated:
        return [(_lin_cmp(v1, v2, "="), lay_eq)]
    out = [(_lin_cmp(v1, v2, "<"),), (_lin_cmp(v2, v1, "<"),)]
    if not trivial:
        out.append((lay(s1 - s2, "!="),))
    return out


def _orderings(p: PolyNF, caps: Caps, extra) -> list:
    if p.is_zero:
        return [(frozenset(), [])]
    return [(o.I, d) for o, d in feasible_mtos(p, caps, extra)]


def _add_literal(clause: Clause, lit) -> Clause | None:
    if isinstance(lit, TrueF):
        return clause
    if isinstance(lit, FalseF):
        return None
    if lit in clause:
        return clause
    if (isinstance(lit, Not) and lit.arg in clause) or Not(lit) in clause:
        return None
    return clause + (lit,)


def _extend(clause: Clause, lits) -> Clause | None:
    for lit in lits:
        clause = _add_literal(clause, lit)
        if clause is None:
            return None
    return clause


def _clause_ok(clause: Clause) -> bool:
    return feasible([a for a in clause if isinstance(a, Lin)])


def split_nonzero(atom: Formula, M: Theta, negated: bool = False, caps: Caps = DEFAULT_CAPS) -> list:
    """DNF of ``atom`` (or its negation) assuming every variable is nonzero."""
    kind = type(atom)
    out = []
    for c1, c2 in product(to_cases(atom.left, M, caps), to_cases(atom.right, M, caps)):
        if any(not g.I for g in c1.guards + c2.guards):
            continue  # an all-zero sum needs a zero variable
        guards = c1.lin_guards() + c2.lin_guards()
        if not feasible(guards):
            continue
        for I1, d1 in _orderings(c1.poly, caps, guards):
            for I2, d2 in _orderings(c2.poly, caps, guards + d1):
                base = _extend((), guards + d1 + d2)
                if base is None or not _clause_ok(base):
                    continue
                for b in _compare(M, kind, _dominant(c1.poly, I1), _dominant(c2.poly, I2), negated):
                    cl = _extend(base, b)
                    if cl is not None and _clause_ok(cl):
                        out.append(cl)
                        if len(out) > caps.dnf:
                            raise CapExceeded(f"more than {caps.dnf} clauses")
    return out


def _zero_patterns(vs: list[str], caps: Caps):
    if len(vs) > caps.zero_vars:
        raise CapExceeded(f"{len(vs)} variables exceed the zero-split cap of {caps.zero_vars}")
    for mask in product((False, True), repeat=len(vs)):
        yield {v for v, z in zip(vs, mask) if z}


def _pattern_guards(vs, zero) -> tuple:
    return tuple(IsZero(v) if v in zero else Not(IsZero(v)) for v in vs)


def _zero_subst(f: Formula, zero: set) -> Formula:
    for v in sorted(zero):
        f = substitute(f, v, Zero())
    return f


def split_atom(atom: Formula, M: Theta, form: str = "dnf", caps: Caps = DEFAULT_CAPS) -> Formula:
    """Equivalent formula over sorted atoms, exact for every assignment.

    ``form="dnf"`` gives a disjunction over zero patterns and compatible
    orderings.  ``form="implication"`` gives, per zero pattern, the
    conjunction over all ordering pairs of ``not(Delta and Delta) or B``.
    """
    if not isinstance(atom, ATOMS):
        return atom
    vs = sorted(free_vars(atom))
    parts = []
    for zero in _zero_patterns(vs, caps):
        a = _zero_subst(atom, zero)
        guards = list(_pattern_guards(vs, zero))
        if form == "dnf":
            body = disj(conj(c) for c in split_nonzero(a, M, False, caps))
        elif form == "implication":
            body = _implication_form(a, M, caps)
        else:
            raise ValueError(f"unknown form {form!r}")
        parts.append(conj(guards + [body]))
    return disj(parts)


def _implication_form(atom: Formula, M: Theta, caps: Caps) -> Formula:
    kind = type(atom)
    conjuncts = []
    for c1, c2 in product(to_cases(atom.left, M, caps, prune=False),
                          to_cases(atom.right, M, caps, prune=False)):
        if any(not g.I for g in c1.guards + c2.guards):
            continue
        guards = c1.lin_guards() + c2.lin_guards()
        o1 = [(o.I, delta_atoms(c1.poly, o.I)) for o in enumerate_mtos(c1.poly, caps)] if len(c1.poly) else [(frozenset(), [])]
        o2 = [(o.I, delta_atoms(c2.poly, o.I)) for o in enumerate_mtos(c2.poly, caps)] if len(c2.poly) else [(frozenset(), [])]
        for I1, d1 in o1:
            for I2, d2 in o2:
                b = _compare(M, kind, _dominant(c1.poly, I1), _dominant(c2.poly, I2), False)
                premise = conj(guards + d1 + d2)
                conjuncts.append(disj([_negate(premise), disj(conj(c) for c in b)]))
    return conj(conjuncts)


# --------------------------------------------------------------------------
# normal forms


def _negate(f: Formula) -> Formula:
    return nnf(Not(f), resolve=False)


def nnf(f: Formula, resolve: bool = True) -> Formula:
    """Negation normal form.

    With ``resolve`` negated order atoms are rewritten by totality:
    ``~(a < b)`` becomes ``p1(a) = p1(b) | b < a`` and ``~(a << b)`` becomes
    ``p2(a) = p2(b) | b << a``.  Negated equalities stay as they are.
    """
    if isinstance(f, Not):
        g = f.arg
        if isinstance(g, Not):
            return nnf(g.arg, resolve)
        if isinstance(g, And):
            return disj(nnf(Not(a), resolve) for a in g.args)
        if isinstance(g, Or):
            return conj(nnf(Not(a), resolve) for a in g.args)
        if isinstance(g, Implies):
            return conj([nnf(g.left, resolve), nnf(Not(g.right), resolve)])
        if isinstance(g, Exists):
            return Forall(g.var, nnf(Not(g.body), resolve))
        if isinstance(g, Forall):
            return Exists(g.var, nnf(Not(g.body), resolve))
        if isinstance(g, TrueF):
            return FALSE
        if isinstance(g, FalseF):
            return TRUE
        if isinstance(g, SplitAtom):
            return negate_atom(g)
        if resolve and isinstance(g, Lt):
            return disj([Eq(P1(g.left), P1(g.right)), Lt(g.right, g.left)])
        if resolve and isinstance(g, LLt):
            return disj([Eq(P2(g.left), P2(g.right)), LLt(g.right, g.left)])
        return f
    if isinstance(f, And):
        return conj(nnf(a, resolve) for a in f.args)
    if isinstance(f, Or):
        return disj(nnf(a, resolve) for a in f.args)
    if isinstance(f, Implies):
        return disj([nnf(Not(f.left), resolve), nnf(f.right, resolve)])
    if isinstance(f, (Exists, Forall)):
        return type(f)(f.var, nnf(f.body, resolve))
    return f


def _dnf_lists(f: Formula, leaf, caps: Caps, prune) -> list:
    if isinstance(f, TrueF):
        return list(_TOP)
    if isinstance(f, FalseF):
        return []
    if isinstance(f, Or):
        out = []
        for a in f.args:
            out.extend(_dnf_lists(a, leaf, caps, prune))
            if len(out) > caps.dnf:
                raise CapExceeded(f"more than {caps.dnf} clauses")
        return out
    if isinstance(f, And):
        acc = list(_TOP)
        for a in f.args:
            part = _dnf_lists(a, leaf, caps, prune)
            nxt = []
            for c1 in acc:
                for c2 in part:
                    c = _extend(c1, c2)
                    if c is not None and prune(c):
                        nxt.append(c)
                        if len(nxt) > caps.dnf:
                            raise CapExceeded(f"more than {caps.dnf} clauses")
            acc = nxt
            if not acc:
                break
        return acc
    if isinstance(f, (Exists, Forall, Implies)):
        raise ValueError("dnf expects a quantifier-free formula in negation normal form")
    return leaf(f)


def dnf(f: Formula, caps: Caps = DEFAULT_CAPS) -> Formula:
    """Disjunctive normal form over the literals of ``nnf(f)``."""
    lists = _dnf_lists(nnf(f), lambda lit: [(lit,)], caps, lambda c: True)
    return disj(conj(c) for c in dict.fromkeys(lists))


def split_clauses(f: Formula, M: Theta, caps: Caps = DEFAULT_CAPS) -> list:
    """Exact DNF of a quantifier-free ``f`` over sorted literals.

    Every clause starts with a full zero pattern for the free variables of
    ``f``: ``IsZero(v)`` or ``~IsZero(v)`` for each one, so the linear atoms
    in a clause only ever talk about nonzero variables.
    """
    vs = sorted(free_vars(f))
    out = []
    for zero in _zero_patterns(vs, caps):
        g = nnf(_zero_subst(f, zero), resolve=False)

        def leaf(lit, zero=zero):
            neg = isinstance(lit, Not)
            a = lit.arg if neg else lit
            if isinstance(a, IsZero):
                return _bool_dnf((a.var in zero) != neg)
            if isinstance(a, (Lin, Lay)):
                return [(a,)] if not neg else _dnf_lists(nnf(negate_atom(a)), leaf, caps, _clause_ok)
            if isinstance(a, ATOMS):
                return split_nonzero(a, M, neg, caps)
            raise TypeError(f"unexpected literal {lit!r}")

        guards = _pattern_guards(vs, zero)
        for c in _dnf_lists(g, leaf, caps, _clause_ok):
            out.append(guards + c)
            if len(out) > caps.dnf:
                raise CapExceeded(f"more than {caps.dnf} clauses")
    return out


def split_dnf(f: Formula, M: Theta, caps: Caps = DEFAULT_CAPS) -> Formula:
    return disj(conj(c) for c in split_clauses(f, M, caps))


def poly_to_term(p: PolyNF, M: Theta) -> Term:
    """A term denoting ``p``; monomials keep their order."""
    if p.is_zero:
        return Zero()
    parts = []
    for m in p:
        factors: list[Term] = []
        if m.coeff != M.one or (not m.p1 and not m.p2):
            factors.append(Lit(m.coeff))
        e1, e2 = dict(m.p1), dict(m.p2)
        for v in sorted(set(e1) | set(e2)):
            a, b = e1.get(v, 0), e2.get(v, 0)
            both = min(a, b) if not M.L.trivial else a
            for base, e in ((Var(v), both), (P1(Var(v)), a - both), (P2(Var(v)), (b - both) if not M.L.trivial else 0)):
                if e:
                    factors.append(base if e == 1 else Pow(base, e))
        t = factors[0]
        for f in factors[1:]:
            t = Mul(t, f)
        parts.append(t)
    out = parts[0]
    for t in parts[1:]:
        out = Add(out, t)
    return out


def simplify_term(t: Term, M: Theta, caps: Caps = DEFAULT_CAPS) -> Term:
    """Essential form of ``t`` when it is polynomial; otherwise ``t`` itself."""
    try:
        p = to_poly(t, M)
    except NotPolynomial:
        return t
    return poly_to_term(essential_form(p, M, caps), M)


def simplify_formula(f: Formula, M: Theta, caps: Caps = DEFAULT_CAPS) -> Formula:
    """Atoms reduced to essential forms, then put into DNF."""
    def walk(g):
        if isinstance(g, ATOMS):
            return type(g)(simplify_term(g.left, M, caps), simplify_term(g.right, M, caps))
        if isinstance(g, Not):
            return Not(walk(g.arg))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(walk(a) for a in g.args))
        if isinstance(g, Implies):
            return Implies(walk(g.left), walk(g.right))
        if isinstance(g, (Exists, Forall)):
            return type(g)(g.var, walk(g.body))
        return g
    g = walk(f)
    if any(isinstance(x, (Exists, Forall)) for x in _subformulas(g)):
        return nnf(g)
    return dnf(g, caps)


def _subformulas(f):
    yield f
    if isinstance(f, Not):
        yield from _subformulas(f.arg)
    elif isinstance(f, (And, Or)):
        for a in f.args:
            yield from _subformulas(a)
    elif isinstance(f, Implies):
        yield from _subformulas(f.left)
        yield from _subformulas(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from _subformulas(f.body)

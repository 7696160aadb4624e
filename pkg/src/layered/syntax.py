"""Terms and formulas of the layered language, with a parser and printer.

Surface grammar (whitespace-insensitive)::

    formula := "A" var "." formula | "E" var "." formula | impl
    impl    := disj ["->" impl]
    disj    := conj { "|" conj }
    conj    := lit { "&" lit }
    lit     := "~" lit | atom | "(" formula ")"
    atom    := term rel term | "PL(" term ")" | "true" | "false"
    rel     := "=" | "!=" | "<" | "<=" | ">" | ">=" | "<<" | ">>"
    term    := prod { "+" prod } ;  prod := factor { "*" factor }
    factor  := base ["^" nat]
    base    := var | "0" | "1" | "[" layer "]" rat | "L(" layer ")"
             | "p1(" term ")" | "p2(" term ")" | "(" term ")"

``<<`` compares layers (``p2``); the other order relations compare values.
Derived relations are desugared while parsing, as is ``PL(t)`` into
``t = p2(t)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .core import LayeredElem, Theta


class Term:
    __slots__ = ()


@dataclass(frozen=True)
class Var(Term):
    name: str


@dataclass(frozen=True)
class Zero(Term):
    pass


@dataclass(frozen=True)
class One(Term):
    pass


@dataclass(frozen=True)
class Lit(Term):
    elem: LayeredElem


@dataclass(frozen=True)
class LayerConst(Term):
    layer: object


@dataclass(frozen=True)
class Add(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Mul(Term):
    left: Term
    right: Term


@dataclass(frozen=True)
class Pow(Term):
    base: Term
    exp: int

    def __post_init__(self):
        if self.exp < 1:
            raise ValueError("exponent must be >= 1")


@dataclass(frozen=True)
class P1(Term):
    arg: Term


@dataclass(frozen=True)
class P2(Term):
    arg: Term


class Formula:
    __slots__ = ()


@dataclass(frozen=True)
class Eq(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class Lt(Formula):
    left: Term
    right: Term


@dataclass(frozen=True)
class LLt(Formula):
    """Layer order: ``p2(left)`` strictly below ``p2(right)`` in L."""

    left: Term
    right: Term


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Exists(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: str
    body: Formula


@dataclass(frozen=True)
class TrueF(Formula):
    pass


@dataclass(frozen=True)
class FalseF(Formula):
    pass


TRUE = TrueF()
FALSE = FalseF()
ATOMS = (Eq, Lt, LLt)
BINARY_TERMS = (Add, Mul)


def conj(parts: Iterable[Formula]) -> Formula:
    out = []
    for p in parts:
        if isinstance(p, FalseF):
            return FALSE
        if isinstance(p, TrueF):
            continue
        out.extend(p.args if isinstance(p, And) else (p,))
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(parts: Iterable[Formula]) -> Formula:
    out = []
    for p in parts:
        if isinstance(p, TrueF):
            return TRUE
        if isinstance(p, FalseF):
            continue
        out.extend(p.args if isinstance(p, Or) else (p,))
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


# --------------------------------------------------------------------------
# variables and substitution


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, BINARY_TERMS):
        return term_vars(t.left) | term_vars(t.right)
    if isinstance(t, (Pow,)):
        return term_vars(t.base)
    if isinstance(t, (P1, P2)):
        return term_vars(t.arg)
    return set()


def free_vars(f) -> set[str]:
    if isinstance(f, Term):
        return term_vars(f)
    if isinstance(f, ATOMS):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.arg)
    if isinstance(f, (And, Or)):
        out: set[str] = set()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, Implies):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, (TrueF, FalseF)):
        return set()
    if hasattr(f, "variables"):
        return set(f.variables())
    raise TypeError(f"not a formula: {f!r}")


def all_vars(f) -> set[str]:
    if isinstance(f, (Exists, Forall)):
        return all_vars(f.body) | {f.var}
    if isinstance(f, Not):
        return all_vars(f.arg)
    if isinstance(f, (And, Or)):
        out: set[str] = set()
        for a in f.args:
            out |= all_vars(a)
        return out
    if isinstance(f, Implies):
        return all_vars(f.left) | all_vars(f.right)
    return free_vars(f)


def fresh_name(base: str, taken: set[str]) -> str:
    stem = base.rstrip("0123456789").rstrip("_") or "v"
    i = 1
    while f"{stem}_{i}" in taken:
        i += 1
    return f"{stem}_{i}"


def subst_term(t: Term, var: str, s: Term) -> Term:
    if isinstance(t, Var):
        return s if t.name == var else t
    if isinstance(t, Add):
        return Add(subst_term(t.left, var, s), subst_term(t.right, var, s))
    if isinstance(t, Mul):
        return Mul(subst_term(t.left, var, s), subst_term(t.right, var, s))
    if isinstance(t, Pow):
        return Pow(subst_term(t.base, var, s), t.exp)
    if isinstance(t, P1):
        return P1(subst_term(t.arg, var, s))
    if isinstance(t, P2):
        return P2(subst_term(t.arg, var, s))
    return t


def substitute(f, var: str, s: Term):
    """Replace free occurrences of ``var`` by ``s``, renaming binders to avoid capture."""
    if isinstance(f, Term):
        return subst_term(f, var, s)
    if isinstance(f, ATOMS):
        return type(f)(subst_term(f.left, var, s), subst_term(f.right, var, s))
    if isinstance(f, Not):
        return Not(substitute(f.arg, var, s))
    if isinstance(f, (And, Or)):
        return type(f)(tuple(substitute(a, var, s) for a in f.args))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, var, s), substitute(f.right, var, s))
    if isinstance(f, (Exists, Forall)):
        if f.var == var or var not in free_vars(f.body):
            return f
        body, bound = f.body, f.var
        svars = term_vars(s)
        if bound in svars:
            new = fresh_name(bound, svars | all_vars(body) | {var})
            body = substitute(body, bound, Var(new))
            bound = new
        return type(f)(bound, substitute(body, var, s))
    if isinstance(f, (TrueF, FalseF)):
        return f
    if hasattr(f, "substitute"):
        return f.substitute(var, s)
    raise TypeError(f"not a formula: {f!r}")


def rename_apart(f: Formula) -> Formula:
    """Rename binders so no bound name is reused or clashes with a free name."""
    taken = set(free_vars(f))

    def go(g):
        if isinstance(g, (Exists, Forall)):
            name, body = g.var, g.body
            if name in taken:
                new = fresh_name(name, taken | all_vars(body))
                body = substitute(body, name, Var(new))
                name = new
            taken.add(name)
            return type(g)(name, go(body))
        if isinstance(g, Not):
            return Not(go(g.arg))
        if isinstance(g, (And, Or)):
            return type(g)(tuple(go(a) for a in g.args))
        if isinstance(g, Implies):
            return Implies(go(g.left), go(g.right))
        return g

    return go(f)


# --------------------------------------------------------------------------
# parser


class ParseError(ValueError):
    def __init__(self, text: str, pos: int, expected: str):
        line = text.count("\n", 0, pos) + 1
        col = pos - (text.rfind("\n", 0, pos) + 1) + 1
        self.line, self.col, self.expected = line, col, expected
        super().__init__(f"line {line}, col {col}: expected {expected}")


_RESERVED = {"A", "E", "p1", "p2", "L", "PL", "true", "false"}
_SYMBOLS = ["->", "<<", ">>", "<=", ">=", "!=", "=", "<", ">", "(", ")", "[", "]", "+", "*", "^",
            "&", "|", "~", ".", "-", "/", ","]


_DIGITS = set("0123456789")


def _tokenize(text: str):
    toks = []
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c in " \t\r\n":
            i += 1
            continue
        if c in _DIGITS:
            j = i
            while j < n and text[j] in _DIGITS:
                j += 1
            toks.append(("num", text[i:j], i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_") and text[j].isascii():
                j += 1
            if not c.isascii():
                raise ParseError(text, i, "ASCII input")
            toks.append(("id", text[i:j], i))
            i = j
            continue
        for s in _SYMBOLS:
            if text.startswith(s, i):
                toks.append(("sym", s, i))
                i += len(s)
                break
        else:
            raise ParseError(text, i, "a token")
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str, model: Theta):
        self.text = text
        self.model = model
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, expected):
        raise ParseError(self.text, self.peek()[2], expected)

    def accept(self, value):
        tok = self.peek()
        if tok[0] in ("sym", "id") and tok[1] == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            self.error(repr(value))

    def number(self) -> int:
        tok = self.peek()
        if tok[0] != "num":
            self.error("a number")
        self.i += 1
        return int(tok[1])

    # formulas

    def formula(self) -> Formula:
        tok = self.peek()
        if tok[0] == "id" and tok[1] in ("A", "E"):
            self.i += 1
            v = self.var_name()
            self.expect(".")
            body = self.formula()
            return (Forall if tok[1] == "A" else Exists)(v, body)
        return self.impl()

    def impl(self) -> Formula:
        left = self.disj()
        if self.accept("->"):
            return Implies(left, self.impl())
        return left

    def disj(self) -> Formula:
        parts = [self.conj()]
        while self.accept("|"):
            parts.append(self.conj())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def conj(self) -> Formula:
        parts = [self.lit()]
        while self.accept("&"):
            parts.append(self.lit())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def lit(self) -> Formula:
        if self.accept("~"):
            return Not(self.lit())
        tok = self.peek()
        if tok[0] == "id" and tok[1] in ("A", "E"):
            return self.formula()
        if tok[0] == "sym" and tok[1] == "(":
            # either a parenthesised formula or an atom starting with a parenthesised term
            save = self.i
            try:
                return self.atom()
            except ParseError as err_atom:
                self.i = save
                self.expect("(")
                try:
                    f = self.formula()
                    self.expect(")")
                except ParseError as err_f:
                    raise max(err_atom, err_f, key=lambda e: (e.line, e.col)) from None
                return f
        return self.atom()

    def atom(self) -> Formula:
        if self.accept("true"):
            return TRUE
        if self.accept("false"):
            return FALSE
        if self.peek()[1] == "PL" and self.peek(1)[1] == "(":
            self.i += 2
            t = self.term()
            self.expect(")")
            return Eq(t, P2(t))
        left = self.term()
        tok = self.peek()
        rel = tok[1] if tok[0] == "sym" else None
        if rel not in ("=", "!=", "<", "<=", ">", ">=", "<<", ">>"):
            self.error("a relation")
        self.i += 1
        right = self.term()
        return _desugar(rel, left, right)

    # terms

    def term(self) -> Term:
        t = self.prod()
        while self.accept("+"):
            t = Add(t, self.prod())
        return t

    def prod(self) -> Term:
        t = self.factor()
        while self.accept("*"):
            t = Mul(t, self.factor())
        return t

    def factor(self) -> Term:
        t = self.base()
        if self.accept("^"):
            n = self.number()
            if n < 1:
                self.error("an exponent >= 1")
            t = Pow(t, n)
        return t

    def base(self) -> Term:
        tok = self.peek()
        if tok[0] == "num":
            if tok[1] in ("0", "1"):
                self.i += 1
                return Zero() if tok[1] == "0" else One()
            self.error("0, 1 or a bracketed literal")
        if tok[0] == "sym" and tok[1] == "(":
            self.i += 1
            t = self.term()
            self.expect(")")
            return t
        if tok[0] == "sym" and tok[1] == "[":
            self.i += 1
            layer = self.layer_lit()
            self.expect("]")
            return Lit(LayeredElem(layer, self.rat()))
        if tok[0] == "id" and tok[1] in ("p1", "p2", "L") and self.peek(1)[1] == "(":
            self.i += 2
            if tok[1] == "L":
                layer = self.layer_lit()
                self.expect(")")
                return LayerConst(layer)
            t = self.term()
            self.expect(")")
            return P1(t) if tok[1] == "p1" else P2(t)
        if tok[0] == "id":
            return Var(self.var_name())
        self.error("a term")

    def var_name(self) -> str:
        tok = self.peek()
        if tok[0] != "id" or tok[1] in _RESERVED:
            self.error("a variable name")
        self.i += 1
        return tok[1]

    def layer_lit(self):
        start = self.peek()[2]
        num = self.number()
        text = str(num)
        if self.accept("/"):
            text += "/" + str(self.number())
        try:
            return self.model.L.parse(text)
        except ValueError:
            raise ParseError(self.text, start, f"a {self.model.L.name} layer literal") from None

    def rat(self):
        from fractions import Fraction

        neg = self.accept("-")
        num = self.number()
        den = 1
        if self.accept("/"):
            den = self.number()
            if den == 0:
                self.error("a nonzero denominator")
        q = Fraction(num, den)
        return -q if neg else q


def _desugar(rel: str, a: Term, b: Term) -> Formula:
    if rel == "=":
        return Eq(a, b)
    if rel == "!=":
        return Not(Eq(a, b))
    if rel == "<":
        return Lt(a, b)
    if rel == ">":
        return Lt(b, a)
    if rel == "<=":
        return Or((Lt(a, b), Eq(a, b)))
    if rel == ">=":
        return Or((Lt(b, a), Eq(a, b)))
    if rel == "<<":
        return LLt(a, b)
    return LLt(b, a)


def _run(text: str, model: Theta | None, start: str):
    p = _Parser(text, model or Theta("trivial"))
    try:
        out = getattr(p, start)()
    except RecursionError:
        raise ParseError(text, p.peek()[2], "less deeply nested input") from None
    if p.peek()[0] != "eof":
        p.error("end of input")
    return out


def parse_formula(text: str, model: Theta | None = None, rename: bool = True) -> Formula:
    f = _run(text, model, "formula")
    return rename_apart(f) if rename else f


def parse_term(text: str, model: Theta | None = None) -> Term:
    return _run(text, model, "term")


# --------------------------------------------------------------------------
# printer


def pretty(x, model: Theta | None = None) -> str:
    model = model or Theta("trivial")
    if isinstance(x, Term):
        return _pretty_term(x, model)
    return _pretty_formula(x, model)


def _pretty_term(t: Term, m: Theta) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Zero):
        return "0"
    if isinstance(t, One):
        return "1"
    if isinstance(t, Lit):
        if t.elem.value is None:
            return "0"
        return m.format_elem(t.elem)
    if isinstance(t, LayerConst):
        return f"L({m.L.format(t.layer)})"
    if isinstance(t, Add):
        return f"({_pretty_term(t.left, m)} + {_pretty_term(t.right, m)})"
    if isinstance(t, Mul):
        return f"({_pretty_term(t.left, m)} * {_pretty_term(t.right, m)})"
    if isinstance(t, Pow):
        b = _pretty_term(t.base, m)
        return f"({b})^{t.exp}" if isinstance(t.base, Pow) else f"{b}^{t.exp}"
    if isinstance(t, P1):
        return f"p1({_pretty_term(t.arg, m)})"
    if isinstance(t, P2):
        return f"p2({_pretty_term(t.arg, m)})"
    raise TypeError(f"not a term: {t!r}")


def _operand(f, m: Theta) -> str:
    s = _pretty_formula(f, m)
    # a quantifier scopes as far right as possible
    return f"({s})" if isinstance(f, (Exists, Forall)) or hasattr(f, "surface") else s


def _pretty_formula(f, m: Theta) -> str:
    if isinstance(f, Eq):
        return f"{_pretty_term(f.left, m)} = {_pretty_term(f.right, m)}"
    if isinstance(f, Lt):
        return f"{_pretty_term(f.left, m)} < {_pretty_term(f.right, m)}"
    if isinstance(f, LLt):
        return f"{_pretty_term(f.left, m)} << {_pretty_term(f.right, m)}"
    if isinstance(f, TrueF):
        return "true"
    if isinstance(f, FalseF):
        return "false"
    if isinstance(f, Not):
        inner = f.arg
        s = _pretty_formula(inner, m)
        if isinstance(inner, (Exists, Forall, Implies)) or hasattr(inner, "surface"):
            s = f"({s})"
        return f"~{s}"
    if isinstance(f, And):
        return "(" + " & ".join(_operand(a, m) for a in f.args) + ")"
    if isinstance(f, Or):
        return "(" + " | ".join(_operand(a, m) for a in f.args) + ")"
    if isinstance(f, Implies):
        return f"({_operand(f.left, m)} -> {_operand(f.right, m)})"
    if isinstance(f, Exists):
        return f"E {f.var}. ({_pretty_formula(f.body, m)})"
    if isinstance(f, Forall):
        return f"A {f.var}. ({_pretty_formula(f.body, m)})"
    if hasattr(f, "surface"):
        return _pretty_formula(f.surface(m), m)
    raise TypeError(f"not a formula: {f!r}")

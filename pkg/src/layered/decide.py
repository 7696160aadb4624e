"""Evaluation in the canonical model, sentence decision and axiom checking."""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Optional

from .core import LayeredElem, Theta, ZERO
from .normal import DEFAULT_CAPS, Caps
from .qe import qe
from .syntax import (
    Add, And, Eq, Exists, FalseF, Forall, Formula, Implies, LayerConst, Lit, LLt, Lt, Mul, Not, One,
    Or, P1, P2, Pow, Term, TrueF, Var, Zero, free_vars, parse_formula, parse_term, term_vars,
)


class UnboundVariable(KeyError):
    pass


# --------------------------------------------------------------------------
# evaluation


def _eval_var(t, env, M):
    try:
        return env[t.name]
    except KeyError:
        raise UnboundVariable(t.name) from None


_TERM_EVAL = {
    Var: _eval_var,
    Zero: lambda t, env, M: M.zero,
    One: lambda t, env, M: M.one,
    Lit: lambda t, env, M: t.elem,
    LayerConst: lambda t, env, M: M.layer_const(t.layer),
    Add: lambda t, env, M: M.add(eval_term(t.left, env, M), eval_term(t.right, env, M)),
    Mul: lambda t, env, M: M.mul(eval_term(t.left, env, M), eval_term(t.right, env, M)),
    Pow: lambda t, env, M: M.pow(eval_term(t.base, env, M), t.exp),
    P1: lambda t, env, M: M.p1(eval_term(t.arg, env, M)),
    P2: lambda t, env, M: M.p2(eval_term(t.arg, env, M)),
}


def eval_term(t: Term, env: dict, M: Theta) -> LayeredElem:
    fn = _TERM_EVAL.get(type(t))
    if fn is None:
        raise TypeError(f"not a term: {t!r}")
    return fn(t, env, M)


def eval_formula(f: Formula, env: dict, M: Theta) -> bool:
    """Truth of a quantifier-free formula (sorted atoms allowed) under ``env``."""
    if isinstance(f, Eq):
        return eval_term(f.left, env, M) == eval_term(f.right, env, M)
    if isinstance(f, Lt):
        return M.lt(eval_term(f.left, env, M), eval_term(f.right, env, M))
    if isinstance(f, LLt):
        return M.layer_lt(eval_term(f.left, env, M), eval_term(f.right, env, M))
    if isinstance(f, Not):
        return not eval_formula(f.arg, env, M)
    if isinstance(f, And):
        return all(eval_formula(a, env, M) for a in f.args)
    if isinstance(f, Or):
        return any(eval_formula(a, env, M) for a in f.args)
    if isinstance(f, Implies):
        return not eval_formula(f.left, env, M) or eval_formula(f.right, env, M)
    if isinstance(f, TrueF):
        return True
    if isinstance(f, FalseF):
        return False
    if isinstance(f, (Exists, Forall)):
        raise ValueError("eval_formula needs a quantifier-free formula")
    if hasattr(f, "evaluate"):
        missing = f.variables() - env.keys()
        if missing:
            raise UnboundVariable(sorted(missing)[0])
        return f.evaluate(M, env)
    raise TypeError(f"not a formula: {f!r}")


def decide_sentence(f: Formula, M: Theta, caps: Caps = DEFAULT_CAPS) -> bool:
    """Truth value of a closed formula in the canonical model."""
    if free_vars(f):
        raise ValueError(f"sentence has free variables: {sorted(free_vars(f))}")
    return eval_formula(qe(f, M, caps).result, {}, M)


# --------------------------------------------------------------------------
# sampling


def sample_env(M: Theta, names, rng: random.Random, tie_bias: float = 0.5) -> dict:
    """Random assignment.

    With probability ``tie_bias`` a variable draws from a small pool
    (values in -2..2, small layers, zero) so that ties between monomials
    show up often; otherwise it uses :meth:`Theta.sample`.
    """
    env = {}
    for v in sorted(names):
        if rng.random() < tie_bias:
            val = rng.choice([None, -2, -1, 0, 0, 1, 2])
            env[v] = ZERO if val is None else LayeredElem(_small_layer(M, rng), Fraction(val))
        else:
            env[v] = M.sample(rng)
    return env


def _small_layer(M: Theta, rng: random.Random):
    if M.L.trivial:
        return 1
    if M.L.integral:
        return rng.choice([1, 1, 2, 3])
    return rng.choice([Fraction(1), Fraction(1), Fraction(1, 2), Fraction(2), Fraction(3, 2)])


def grid_values(M: Theta, values=(-1, 0, 1)) -> list[LayeredElem]:
    layers = [1] if M.L.trivial else ([1, 2, 3] if M.L.integral else [Fraction(1), Fraction(1, 2), Fraction(2)])
    return [ZERO] + [LayeredElem(l, Fraction(v)) for v in values for l in layers]


def format_env(env: dict, M: Theta) -> str:
    return ",".join(f"{v}={M.format_elem(env[v])}" for v in sorted(env))


# --------------------------------------------------------------------------
# polynomial identities


@dataclass
class PolyEqResult:
    equal: bool
    counterexample: Optional[dict] = None

    def __bool__(self):
        return self.equal


def poly_equal(p: Term, q: Term, M: Theta, caps: Caps = DEFAULT_CAPS, seed: int = 0,
               samples: int = 1000) -> PolyEqResult:
    """Decide ``A xs. p = q`` and look for a witness assignment when it fails."""
    names = sorted(term_vars(p) | term_vars(q))
    sentence: Formula = Eq(p, q)
    for v in reversed(names):
        sentence = Forall(v, sentence)
    if decide_sentence(sentence, M, caps):
        return PolyEqResult(True)
    return PolyEqResult(False, find_counterexample(p, q, M, names, seed, samples))


def find_counterexample(p: Term, q: Term, M: Theta, names, seed: int = 0, samples: int = 1000):
    """First seeded random sample with ``p != q``, then a small structured grid."""
    rng = random.Random(seed)
    for _ in range(samples):
        env = sample_env(M, names, rng)
        if eval_term(p, env, M) != eval_term(q, env, M):
            return env
    if len(names) <= 4:
        for combo in product(grid_values(M, (-2, -1, 0, 1, 2)), repeat=len(names)):
            env = dict(zip(names, combo))
            if eval_term(p, env, M) != eval_term(q, env, M):
                return env
    return None


# --------------------------------------------------------------------------
# axioms


@dataclass(frozen=True)
class Axiom:
    id: str
    text: str
    universal: bool = True
    witness: Optional[Callable] = None  # (M, env, var) -> element, for existential steps

    def formula(self, M: Theta) -> Formula:
        return parse_formula(self.text, M, rename=False)


@dataclass(frozen=True)
class AxiomSuite:
    kind: str
    layering: str
    sentences: tuple

    def ids(self) -> list[str]:
        return [a.id for a in self.sentences]


def _inverse_witness(M, env, var):
    return M.value_inverse(env["x"])


def _nontrivial_witness(M, env, var):
    return LayeredElem(M.L.one, Fraction(1))


def _root_witness(n):
    def w(M, env, var):
        x = env["x"]
        return ZERO if x.is_zero else LayeredElem(M.L.one, x.value / n)
    return w


_LD_AXIOMS = [
    ("mul_one", "A x. (1*x = x & x*1 = x)"),
    ("mul_comm", "A x. A y. (x*y = y*x)"),
    ("mul_assoc", "A x. A y. A z. (x*(y*z) = (x*y)*z)"),
    ("zero_product", "A x. A y. (((x = 0 | y = 0) -> x*y = 0) & (x*y = 0 -> (x = 0 | y = 0)))"),
    ("add_zero", "A x. (0 + x = x & x + 0 = x)"),
    ("mul_zero", "A x. (0*x = 0 & x*0 = 0)"),
    ("p1_add_comm", "A x. A y. (p1(x) + p1(y) = p1(y) + p1(x))"),
    ("p1_add_assoc", "A x. A y. A z. (p1(x) + (p1(y) + p1(z)) = (p1(x) + p1(y)) + p1(z))"),
    ("p2_add_comm", "A x. A y. (p2(x) + p2(y) = p2(y) + p2(x))"),
    ("p2_add_assoc", "A x. A y. A z. (p2(x) + (p2(y) + p2(z)) = (p2(x) + p2(y)) + p2(z))"),
    ("proj_one", "p1(1) = 1 & p2(1) = 1"),
    ("p1_zero", "p1(0) = 0"),
    ("p2_zero", "p2(0) = 1"),
    ("lt_def", "A x. A y. ((x < y -> p1(x) < p1(y)) & (p1(x) < p1(y) -> x < y))"),
    ("p1_lt_trans", "A x. A y. A z. ((p1(x) < p1(y) & p1(y) < p1(z)) -> p1(x) < p1(z))"),
    ("p1_trichotomy", "A x. A y. (p1(x) < p1(y) | p1(x) = p1(y) | p1(y) < p1(x))"),
    ("p2_irreflexive", "A x. ~(p2(x) {lt} p2(x))"),
    ("p2_lt_trans", "A x. A y. A z. ((p2(x) {lt} p2(y) & p2(y) {lt} p2(z)) -> p2(x) {lt} p2(z))"),
    ("p2_trichotomy", "A x. A y. (p2(x) {lt} p2(y) | p2(x) = p2(y) | p2(y) {lt} p2(x))"),
    ("p1_mul", "A x. A y. (p1(x*y) = p1(x)*p1(y))"),
    ("p2_mul", "A x. A y. ({guard_xy}p2(x*y) = p2(x)*p2(y))"),
    ("add_value", "A x. A y. ((p1(x) >= p1(y) & p1(x + y) = p1(x)) | (p1(x) <= p1(y) & p1(x + y) = p1(y)))"),
    ("add_layer", "A x. A y. ((p1(x) > p1(y) & p2(x + y) = p2(x)) | (p1(x) < p1(y) & p2(x + y) = p2(y))"
                  " | (p1(x) = p1(y) & ({guard_x}p2(x + y) = p2(x) + p2(y))))"),
    ("p1_idempotent", "A x. (p1(p1(x)) = p1(x))"),
    ("p2_idempotent", "A x. (p2(p2(x)) = p2(x))"),
    ("p1_p2", "A x. (p1(p2(x)) = 1 & p2(p1(x)) = 1)"),
    ("equality", "A x. A y. ((x = y -> (p1(x) = p1(y) & p2(x) = p2(y)))"
                 " & ((p1(x) = p1(y) & p2(x) = p2(y)) -> x = y))"),
]

_DLSF_ONLY = ["inverse", "nontriviality", "divisible_"]

_LAYER_CONSTS = {"trivial": ["1"], "nat": ["1", "2", "3", "7"], "posrat": ["1", "1/2", "3/2", "4"]}


def _format_ld(text: str, literal: bool) -> str:
    if literal:
        return text.format(lt="<", guard_xy="", guard_x="")
    return text.format(lt="<<", guard_xy="x = 0 | y = 0 | ", guard_x="x = 0 | ")


def axiom_suite(kind: str, layering: str = "nat", literal: bool = False, n_max: int = 5) -> AxiomSuite:
    """Axioms as data.

    ``kind`` is one of ``LD``, ``LD(L)``, ``DLSF``, ``DLSF(L)``.  By default
    the layer-order axioms use the layer relation ``<<`` and the multiplicative
    and tie-sum layer axioms carry a zero guard; ``literal=True`` gives the
    unguarded variants with the value order, which the canonical model does
    not satisfy for nontrivial layerings.
    """
    if kind not in ("LD", "LD(L)", "DLSF", "DLSF(L)"):
        raise ValueError(f"unknown suite kind {kind!r}")
    out = [Axiom(i, _format_ld(t, literal)) for i, t in _LD_AXIOMS]
    if kind.startswith("DLSF"):
        out.append(Axiom("inverse", "A x. (x != 0 -> E y. (y*p1(x) = 1))", False, _inverse_witness))
        out.append(Axiom("nontriviality", "E x. (p1(x) != 0 & p1(x) != 1)", False, _nontrivial_witness))
        for n in range(2, n_max + 1):
            out.append(Axiom(f"divisible_{n}", f"A x. (x = p1(x) -> E y. (y = p1(y) & y^{n} = x))",
                             False, _root_witness(n)))
    if kind.endswith("(L)"):
        consts = _LAYER_CONSTS[layering]
        for c in consts:
            out.append(Axiom(f"layer_fixed_{c}", f"L({c}) = p2(L({c}))"))
        out.append(Axiom("layer_predicate", "A x. ((x = p2(x) -> PL(x)) & (PL(x) -> x = p2(x)))"))
        for c in consts:
            out.append(Axiom(f"layer_one_{c}", f"(p2(L({c})) = 1 -> L({c}) = 1) & (L({c}) = 1 -> p2(L({c})) = 1)"))
    return AxiomSuite(kind, layering, tuple(out))


def _strip_universals(f: Formula):
    names = []
    while isinstance(f, Forall):
        names.append(f.var)
        f = f.body
    return names, f


def _eval_with_witness(f: Formula, env: dict, M: Theta, witness) -> bool:
    """Like :func:`eval_formula` but existential steps use the supplied witness."""
    if isinstance(f, Exists):
        if witness is None:
            raise ValueError("existential step without a witness")
        inner = dict(env)
        inner[f.var] = witness(M, env, f.var)
        return _eval_with_witness(f.body, inner, M, witness)
    if isinstance(f, Not):
        return not _eval_with_witness(f.arg, env, M, witness)
    if isinstance(f, And):
        return all(_eval_with_witness(a, env, M, witness) for a in f.args)
    if isinstance(f, Or):
        return any(_eval_with_witness(a, env, M, witness) for a in f.args)
    if isinstance(f, Implies):
        return not _eval_with_witness(f.left, env, M, witness) or _eval_with_witness(f.right, env, M, witness)
    return eval_formula(f, env, M)


@dataclass
class AxiomResult:
    id: str
    status: str  # PASS | FAIL
    counterexample: Optional[str] = None


@dataclass
class AxiomReport:
    layering: str
    results: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(r.status == "PASS" for r in self.results)

    def failures(self) -> list:
        return [r for r in self.results if r.status != "PASS"]

    def lines(self) -> list[str]:
        return [f"{r.status} {r.id}" + (f" {r.counterexample}" if r.counterexample else "") for r in self.results]

    def text(self) -> str:
        return "\n".join(self.lines())

    def json_lines(self) -> str:
        return "\n".join(json.dumps({"id": r.id, "status": r.status, "counterexample": r.counterexample})
                         for r in self.results)


def check_axioms(suite: AxiomSuite, sample_count: int = 10_000, seed: int = 0) -> AxiomReport:
    """Check every sentence of ``suite`` in the canonical model on random assignments.

    Universal prefixes are instantiated by :func:`sample_env`; existential
    steps use the axiom's constructed witness.  Each axiom gets its own RNG
    stream derived from ``seed`` and its index, so reports are reproducible.
    """
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    M = Theta(suite.layering)
    report = AxiomReport(suite.layering)
    for idx, ax in enumerate(suite.sentences):
        names, body = _strip_universals(ax.formula(M))
        rng = random.Random(seed * 1_000_003 + idx)
        runs = sample_count if names else 1
        bad = None
        for _ in range(runs):
            env = sample_env(M, names, rng)
            if not _eval_with_witness(body, env, M, ax.witness):
                bad = env
                break
        if bad is None:
            report.results.append(AxiomResult(ax.id, "PASS"))
        else:
            report.results.append(AxiomResult(ax.id, "FAIL", format_env(bad, M) or "(closed)"))
    return report


def parse_assignment(text: str, M: Theta) -> dict:
    """``x=[2]3,y=0`` into an assignment."""
    env = {}
    if not text.strip():
        return env
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"bad assignment {part!r}")
        name, lit = part.split("=", 1)
        env[name.strip()] = M.parse_elem(lit)
    return env


__all__ = [
    "UnboundVariable", "eval_term", "eval_formula", "decide_sentence", "poly_equal", "PolyEqResult",
    "axiom_suite", "AxiomSuite", "Axiom", "check_axioms", "AxiomReport", "sample_env", "format_env",
    "parse_assignment", "find_counterexample", "grid_values", "parse_term",
]

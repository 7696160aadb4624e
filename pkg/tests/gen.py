"""Seeded random generators for terms, formulas and byte strings."""

import random
from fractions import Fraction

from layered.core import LayeredElem, Theta
from layered.syntax import (
    Add, And, Eq, Exists, FALSE, Forall, Implies, LayerConst, Lit, LLt, Lt, Mul, Not, One, Or, P1, P2,
    Pow, TRUE, Var, Zero,
)


def rand_layer(M: Theta, rng: random.Random):
    if M.L.trivial:
        return 1
    if M.L.integral:
        return rng.randint(1, 6)
    return Fraction(rng.randint(1, 9), rng.randint(1, 4))


def rand_elem(M, rng, small=True):
    v = Fraction(rng.randint(-3, 3), rng.choice([1, 1, 2])) if small else Fraction(rng.randint(-100, 100), rng.randint(1, 10))
    return LayeredElem(rand_layer(M, rng), v)


def rand_term(M, rng, vars_=("x", "y", "z"), depth=3, proj=True, layer_consts=True):
    if depth <= 0 or rng.random() < 0.3:
        r = rng.random()
        if r < 0.6:
            return Var(rng.choice(vars_))
        if r < 0.7:
            return rng.choice([Zero(), One()])
        if r < 0.9 or not layer_consts:
            return Lit(rand_elem(M, rng))
        return LayerConst(rand_layer(M, rng))
    ops = ["add", "mul", "pow"] + (["p1", "p2"] if proj else [])
    op = rng.choice(ops)
    sub = lambda: rand_term(M, rng, vars_, depth - 1, proj, layer_consts)
    if op == "add":
        return Add(sub(), sub())
    if op == "mul":
        return Mul(sub(), sub())
    if op == "pow":
        return Pow(sub(), rng.randint(1, 3))
    return (P1 if op == "p1" else P2)(sub())


def rand_atom(M, rng, vars_=("x", "y", "z"), depth=2, proj=True):
    r = rng.random()
    a, b = rand_term(M, rng, vars_, depth, proj), rand_term(M, rng, vars_, depth, proj)
    if r < 0.45:
        return Eq(a, b)
    if r < 0.85:
        return Lt(a, b)
    if r < 0.95:
        return LLt(a, b)
    return rng.choice([TRUE, FALSE])


def rand_qf(M, rng, vars_=("x", "y", "z"), depth=2, tdepth=2, proj=True):
    if depth <= 0 or rng.random() < 0.35:
        return rand_atom(M, rng, vars_, tdepth, proj)
    op = rng.choice(["not", "and", "or", "implies"])
    sub = lambda: rand_qf(M, rng, vars_, depth - 1, tdepth, proj)
    if op == "not":
        return Not(sub())
    if op == "and":
        return And((sub(), sub()))
    if op == "or":
        return Or((sub(), sub()))
    return Implies(sub(), sub())


def rand_formula(M, rng, vars_=("x", "y", "z"), depth=3):
    if depth <= 0 or rng.random() < 0.3:
        return rand_qf(M, rng, vars_, 1)
    op = rng.choice(["not", "and", "or", "implies", "E", "A"])
    sub = lambda: rand_formula(M, rng, vars_, depth - 1)
    if op == "E":
        return Exists(rng.choice(vars_), sub())
    if op == "A":
        return Forall(rng.choice(vars_), sub())
    if op == "not":
        return Not(sub())
    if op == "and":
        return And((sub(), sub()))
    if op == "or":
        return Or((sub(), sub()))
    return Implies(sub(), sub())


def rand_linear_clause(rng, vars_=("x", "y"), w="w", max_atoms=6):
    """Lin atoms over ``w`` and parameters, integer coefficients in [-3, 3]."""
    from layered.atoms import lin

    out = []
    for _ in range(rng.randint(1, max_atoms)):
        coeffs = {v: rng.randint(-3, 3) for v in (w,) + tuple(vars_)}
        if rng.random() < 0.8 and coeffs[w] == 0:
            coeffs[w] = rng.choice([-3, -2, -1, 1, 2, 3])
        const = Fraction(rng.randint(-6, 6), rng.choice([1, 2]))
        out.append(lin(coeffs, const, "=" if rng.random() < 0.2 else "<"))
    return out

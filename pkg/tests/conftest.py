import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from layered.core import LayeredElem, Theta, ZERO
from layered.syntax import (
    Add, And, Eq, Exists, FALSE, Forall, Implies, LayerConst, Lit, LLt, Lt, Mul, Not, One, Or, P1, P2,
    Pow, TRUE, Var, Zero,
)

LAYERINGS = ["trivial", "nat", "posrat"]
MODELS = {name: Theta(name) for name in LAYERINGS}


@pytest.fixture(params=LAYERINGS)
def model(request):
    return MODELS[request.param]


def layers(name):
    if name == "trivial":
        return st.just(1)
    if name == "nat":
        return st.integers(1, 20)
    return st.fractions(min_value=Fraction(1, 10), max_value=10, max_denominator=10).filter(lambda q: q > 0)


def values():
    return st.fractions(min_value=-100, max_value=100, max_denominator=10)


def elements(name, zero_weight=1):
    finite = st.builds(LayeredElem, layers(name), values())
    small = st.builds(LayeredElem, layers(name), st.sampled_from([Fraction(v) for v in (-1, 0, 1)]))
    return st.one_of(st.just(ZERO), finite, small) if zero_weight else st.one_of(finite, small)


VARS = ["x", "y", "z"]


def terms(name, vars_=VARS, max_leaves=6):
    leaves = [
        st.sampled_from([Zero(), One()]),
        st.builds(Lit, elements(name, zero_weight=0)),
        st.builds(LayerConst, layers(name)),
    ]
    if vars_:
        leaves.insert(0, st.sampled_from([Var(v) for v in vars_]))
    leaf = st.one_of(*leaves)

    def extend(children):
        return st.one_of(
            st.builds(Add, children, children),
            st.builds(Mul, children, children),
            st.builds(Pow, children, st.integers(1, 3)),
            st.builds(P1, children),
            st.builds(P2, children),
        )

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def poly_terms(name, vars_=VARS, max_leaves=6):
    """Terms without projections of sums (so they have a single polynomial form)."""
    leaf = st.one_of(
        st.sampled_from([Var(v) for v in vars_] + [P1(Var(v)) for v in vars_] + [P2(Var(v)) for v in vars_]),
        st.sampled_from([Zero(), One()]),
        st.builds(Lit, elements(name, zero_weight=0)),
    )

    def extend(children):
        return st.one_of(st.builds(Add, children, children), st.builds(Mul, children, children),
                         st.builds(Pow, children, st.integers(1, 2)))

    return st.recursive(leaf, extend, max_leaves=max_leaves)


def qf_formulas(name, vars_=VARS, max_leaves=4):
    atom = st.one_of(
        st.builds(Eq, terms(name, vars_, 4), terms(name, vars_, 4)),
        st.builds(Lt, terms(name, vars_, 4), terms(name, vars_, 4)),
        st.builds(LLt, terms(name, vars_, 3), terms(name, vars_, 3)),
        st.sampled_from([TRUE, FALSE]),
    )

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(lambda a, b: And((a, b)), children, children),
            st.builds(lambda a, b: Or((a, b)), children, children),
            st.builds(Implies, children, children),
        )

    return st.recursive(atom, extend, max_leaves=max_leaves)


def formulas(name, vars_=VARS, max_leaves=5):
    base = qf_formulas(name, vars_, 3)

    def extend(children):
        return st.one_of(
            st.builds(Not, children),
            st.builds(lambda a, b: And((a, b)), children, children),
            st.builds(lambda a, b: Or((a, b)), children, children),
            st.builds(Implies, children, children),
            st.builds(Exists, st.sampled_from(vars_), children),
            st.builds(Forall, st.sampled_from(vars_), children),
        )

    return st.recursive(base, extend, max_leaves=max_leaves)


def assignments(name, vars_=VARS):
    return st.fixed_dictionaries({v: elements(name) for v in vars_})


def tie_env(M, names, rng):
    """Random assignment biased toward ties (shared small values, few layers)."""
    from layered.decide import sample_env
    return sample_env(M, names, rng)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, assume, given, settings, strategies as st

from conftest import MODELS, qf_formulas
from gen import rand_formula, rand_linear_clause
from layered.atoms import IsZero, Lin, MPoly, lay, lin
from layered.core import LayeredElem, ZERO
from layered.decide import eval_formula, sample_env
from layered.normal import CapExceeded
from layered.qe import Unsupported, eliminate_exists, is_quantifier_free, qe, zero_case_split
from layered.syntax import FALSE, TRUE, Exists, free_vars, parse_formula


def bound_vars(f):
    out = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if hasattr(g, "var") and hasattr(g, "body"):
            out.add(g.var)
            stack.append(g.body)
        for attr in ("arg", "left", "right", "body"):
            if hasattr(g, attr) and not isinstance(getattr(g, attr), str):
                stack.append(getattr(g, attr))
        if hasattr(g, "args"):
            stack.extend(g.args)
    return out


def agree(f, M, n=300, seed=0):
    res = qe(f, M).result
    names = free_vars(f)
    rng = random.Random(seed)
    for _ in range(n):
        env = sample_env(M, names | free_vars(res), rng)
        assert eval_formula(res, env, M) == _truth(f, env, M), (f, env)
    return res


def _truth(f, env, M):
    from layered.decide import decide_sentence
    from layered.syntax import Lit, substitute

    g = f
    for v, e in env.items():
        if v in free_vars(g):
            g = substitute(g, v, Lit(e))
    return decide_sentence(g, M)


def test_density_example(model):
    f = parse_formula("E w. (x < w & w < y)")
    res = agree(f, model)
    assert "w" not in free_vars(res)
    # x < y is the expected answer
    rng = random.Random(1)
    target = parse_formula("x < y")
    for _ in range(200):
        env = sample_env(model, {"x", "y"}, rng)
        assert eval_formula(res, env, model) == eval_formula(target, env, model)


def test_divisible_equation():
    # 2*p1(w) = g has a solution for any nonzero g
    clause = [lin({"w": 2, "g": -1}, 0, "=")]
    for M in MODELS.values():
        res = eliminate_exists("w", clause, M)
        for g in (Fraction(-3), Fraction(5, 7), Fraction(0)):
            assert eval_formula(res, {"g": LayeredElem(1, g)}, M)


def test_layer_square_nat():
    M = MODELS["nat"]
    w = MPoly.var("w")
    clause = [lay(w * w - MPoly.const(4), "=")]
    assert eliminate_exists("w", clause, M) == TRUE
    clause = [lay(w * w - MPoly.const(2), "=")]
    assert eliminate_exists("w", clause, M) == FALSE


def test_qf_unchanged(model):
    f = parse_formula("x < y | p1(x) = 1")
    assert qe(f, model).result is f


def test_commutativity_true(model):
    assert qe(parse_formula("A x. A y. (x + y = y + x)"), model).result == TRUE


def test_zero_case_split_examples(model):
    M = model
    zero, nonzero = zero_case_split("w", parse_formula("w * x = 0"), M)
    assert zero == TRUE
    rng = random.Random(0)
    for _ in range(50):
        env = sample_env(M, {"x", "w"}, rng)
        if env["w"] == ZERO:
            continue
        assert eval_formula(nonzero, env, M) == (env["x"] == ZERO)
    zero, _ = zero_case_split("w", parse_formula("w = 1"), M)
    assert zero == FALSE
    assert zero_case_split("w", parse_formula("w < w"), M) == (FALSE, FALSE)


def test_trace_names_rules():
    rep = qe(parse_formula("E w. (x < w & w < y)"), MODELS["posrat"])
    assert any("bounds" in line for line in rep.trace)


def test_parametric_layer_unsupported():
    M = MODELS["nat"]
    f = parse_formula("E w. (p2(w) * p2(w) = p2(x))")
    with pytest.raises(Unsupported):
        qe(f, M)


LAYERING_NAMES = list(MODELS)


@pytest.mark.parametrize("name", LAYERING_NAMES)
def test_random_formulas_output_shape(name):
    M = MODELS[name]
    rng = random.Random(11)
    done = 0
    for _ in range(60):
        f = rand_formula(M, rng, vars_=("x", "y"), depth=2)
        try:
            res = qe(f, M).result
        except Unsupported:
            continue
        assert is_quantifier_free(res)
        assert free_vars(res) <= free_vars(f)
        assert not (bound_vars(f) - free_vars(f)) & free_vars(res)
        assert qe(res, M).result == res  # idempotence
        done += 1
    assert done >= 30


# --------------------------------------------------------------------------
# grid oracle for single existential linear clauses


GRID = sorted({Fraction(k, 24) for k in range(-24 * 20, 24 * 20 + 1)})


def grid_sat(clause, env):
    for v in GRID:
        e = dict(env, w=LayeredElem(1, v))
        if all(a.evaluate(None, e) if isinstance(a, Lin) else a == TRUE for a in clause):
            return True
    return False


def linear_clause_cases(n=200, seed=2024):
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        clause = rand_linear_clause(rng, vars_=("x", "y"), w="w", max_atoms=6)
        if FALSE in clause:
            continue
        clause = [a for a in clause if a != TRUE]
        if not any(isinstance(a, Lin) and "w" in a.variables() for a in clause):
            continue
        params = []
        for _ in range(3):
            params.append({v: LayeredElem(1, Fraction(rng.randint(-2, 2))) for v in ("x", "y")})
        out.append((clause, params))
    return out


def check_linear_clause(clause, params, M):
    res = eliminate_exists("w", clause, M)
    assert "w" not in free_vars(res)
    return all(eval_formula(res, env, M) == grid_sat(clause, env) for env in params)


def test_grid_oracle_sample():
    M = MODELS["posrat"]
    cases = linear_clause_cases(40, seed=5)
    assert all(check_linear_clause(c, p, M) for c, p in cases)


def test_zero_parameter_kills_lin():
    M = MODELS["trivial"]
    clause = [lin({"w": 1, "x": 1}, 0, "<")]
    res = eliminate_exists("w", clause, M)
    assert not eval_formula(res, {"x": ZERO}, M)
    assert eval_formula(res, {"x": LayeredElem(1, Fraction(3))}, M)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.sampled_from(LAYERING_NAMES), st.data())
def test_exists_matches_oracle(name, data):
    from oracle import oracle_eval

    M = MODELS[name]
    f = Exists("w", data.draw(qf_formulas(name, vars_=["x", "w"], max_leaves=3)))
    try:
        res = qe(f, M).result
    except (Unsupported, CapExceeded):
        assume(False)
    rng = random.Random(0)
    for _ in range(20):
        env = sample_env(M, {"x"}, rng)
        assert eval_formula(res, env, M) == oracle_eval(f, env, M)

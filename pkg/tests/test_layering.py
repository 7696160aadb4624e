import random
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from layered.layering import NAT, POSRAT, TRIVIAL, LayerPoly, cauchy_bound, get_layering, solve_layer_system

from conftest import layers

Y = LayerPoly.y


def test_add_examples():
    assert TRIVIAL.add(1, 1) == 1
    assert NAT.add(2, 3) == 5
    assert POSRAT.add(Fraction(1, 2), Fraction(1, 3)) == Fraction(5, 6)


def test_mul_examples():
    assert TRIVIAL.mul(1, 1) == 1
    assert NAT.mul(2, 3) == 6
    assert POSRAT.mul(Fraction(2, 3), Fraction(3, 4)) == Fraction(1, 2)


def test_cmp_examples():
    assert NAT.cmp(2, 5) < 0
    assert TRIVIAL.cmp(1, 1) == 0
    assert POSRAT.cmp(Fraction(3, 2), Fraction(4, 3)) > 0


def test_solve_examples():
    r = solve_layer_system(TRIVIAL, [(Y(2), LayerPoly.const(1))])
    assert r.tag == "SAT" and r.witness == 1
    r = solve_layer_system(NAT, [(Y(2), LayerPoly.const(4))])
    assert r.tag == "SAT" and r.witness == 2
    r = solve_layer_system(NAT, [], [(Y(1), LayerPoly.const(1))])
    assert r.tag == "SAT" and r.witness == 2


def _scan(L, eqs, nes, lts, cands):
    for y in cands:
        if all(r(y) == s(y) for r, s in eqs) and all(p(y) != q(y) for p, q in nes) \
                and all(a(y) < b(y) for a, b in lts):
            return True
    return False


def _rand_poly(rng, deg=3):
    return LayerPoly.of({d: rng.randint(-6, 6) for d in range(deg + 1)})


def test_solver_against_scan_nat():
    rng = random.Random(3)
    for _ in range(400):
        eqs = [(_rand_poly(rng, 2), LayerPoly.const(0))] if rng.random() < 0.4 else []
        nes = [(_rand_poly(rng), LayerPoly.const(0)) for _ in range(rng.randint(0, 2))]
        lts = [(_rand_poly(rng, 2), LayerPoly.const(0)) for _ in range(rng.randint(0, 2))]
        res = solve_layer_system(NAT, eqs, nes, lts)
        expect = _scan(NAT, eqs, nes, lts, range(1, 300))
        assert (res.tag == "SAT") == expect, (eqs, nes, lts)
        if res.tag == "SAT":
            assert _scan(NAT, eqs, nes, lts, [res.witness])


def test_solver_against_scan_posrat():
    rng = random.Random(4)
    grid = sorted({Fraction(p, q) for p in range(1, 80) for q in range(1, 13)})
    for _ in range(300):
        eqs = [(_rand_poly(rng, 2), LayerPoly.const(0))] if rng.random() < 0.3 else []
        nes = [(_rand_poly(rng, 2), LayerPoly.const(0)) for _ in range(rng.randint(0, 1))]
        lts = [(_rand_poly(rng, 1), LayerPoly.const(0)) for _ in range(rng.randint(0, 2))]
        res = solve_layer_system(POSRAT, eqs, nes, lts)
        if res.tag == "SAT":
            assert _scan(POSRAT, eqs, nes, lts, [res.witness])
        elif _scan(POSRAT, eqs, nes, lts, grid):
            raise AssertionError(("missed witness", eqs, nes, lts))


def test_diseq_only_systems_are_sat():
    rng = random.Random(5)
    for L in (NAT, POSRAT):
        for _ in range(200):
            nes = [(_rand_poly(rng), LayerPoly.const(0)) for _ in range(3)]
            nes = [(p, q) for p, q in nes if not (p - q).is_zero()]
            res = solve_layer_system(L, [], nes)
            assert res.tag == "SAT"
            scan = range(1, 201) if L is NAT else [Fraction(k, 7) for k in range(1, 201)]
            assert _scan(L, [], nes, [], scan)


def test_trivial_rejects_diseqs():
    assert solve_layer_system(TRIVIAL, [], [(Y(1), LayerPoly.const(1))]).tag == "UNSAT"


def test_cauchy_bound():
    p = LayerPoly.of({2: 1, 0: -4})
    assert cauchy_bound(p) >= 2


def test_lookup():
    assert get_layering("nat") is NAT


@settings(max_examples=300)
@given(st.data())
def test_semiring_laws(data):
    for L in (TRIVIAL, NAT, POSRAT):
        a, b, c = (data.draw(layers(L.name)) for _ in range(3))
        assert L.add(a, b) == L.add(b, a)
        assert L.mul(a, b) == L.mul(b, a)
        assert L.add(a, L.add(b, c)) == L.add(L.add(a, b), c)
        assert L.mul(a, L.mul(b, c)) == L.mul(L.mul(a, b), c)
        assert L.mul(a, L.add(b, c)) == L.add(L.mul(a, b), L.mul(a, c))
        # cancellation
        if L.mul(a, c) == L.mul(b, c):
            assert a == b

"""Fourier-Motzkin elimination over the dense divisible value group ``(Q, +, <)``.

Works on :class:`~layered.atoms.Lin` atoms.  Formulas only use ``=`` and
strict ``<``, which is all a dense order without endpoints needs; ``<=``
is accepted for feasibility questions such as "can this monomial reach the
maximum".
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable

from .atoms import Lin, lin
from .syntax import FalseF, Formula, TrueF


def _pick_equality(var: str, eqs: list[Lin]) -> Lin:
    return min(eqs, key=lambda a: (abs(a.coeff(var)), a.coeffs, a.const))


def solve_for(var: str, eq: Lin) -> tuple[dict, Fraction]:
    """From ``m*var + rest + c = 0`` return ``var = sum(d) + e`` as ``(d, e)``."""
    m = eq.coeff(var)
    d = {v: Fraction(-n, m) for v, n in eq.coeffs if v != var}
    return d, Fraction(-eq.const) / m


def substitute_value(atom: Lin, var: str, d: dict, e: Fraction) -> Formula:
    n = atom.coeff(var)
    if n == 0:
        return atom
    coeffs = {v: Fraction(c) for v, c in atom.coeffs if v != var}
    for v, c in d.items():
        coeffs[v] = coeffs.get(v, 0) + n * c
    return lin(coeffs, atom.const + n * e, atom.rel)


def eliminate(var: str, atoms: Iterable[Lin]) -> tuple[list[Formula], str]:
    """Eliminate ``var`` from the conjunction ``atoms``.

    Returns the resulting atoms (possibly containing FALSE) and the rule name.
    """
    atoms = list(atoms)
    keep = [a for a in atoms if a.coeff(var) == 0]
    inv = [a for a in atoms if a.coeff(var) != 0]
    if not inv:
        return keep, "absent"
    eqs = [a for a in inv if a.rel == "="]
    if eqs:
        eq = _pick_equality(var, eqs)
        d, e = solve_for(var, eq)
        out = keep + [substitute_value(a, var, d, e) for a in inv if a is not eq]
        return out, "equality"
    lowers, uppers = [], []
    for a in inv:
        # m*var + rest + c < 0  gives  var < bound (m > 0) or var > bound (m < 0)
        d, e = solve_for(var, Lin(a.coeffs, a.const, "="))
        (uppers if a.coeff(var) > 0 else lowers).append((d, e, a.rel == "<"))
    out = list(keep)
    for dl, el, sl in lowers:
        for du, eu, su in uppers:
            coeffs = dict(dl)
            for v, c in du.items():
                coeffs[v] = coeffs.get(v, 0) - c
            out.append(lin(coeffs, el - eu, "<" if sl or su else "<="))
    return out, "bounds" if lowers and uppers else "unbounded"


def _clean(atoms: Iterable[Formula]) -> tuple[Lin, ...] | None:
    out = set()
    for a in atoms:
        if isinstance(a, FalseF):
            return None
        if isinstance(a, TrueF):
            continue
        out.add(a)
    return tuple(sorted(out, key=repr))


def eliminate_all(var: str, atoms: Iterable[Lin]) -> tuple[Lin, ...] | None:
    """Like :func:`eliminate` but normalized; ``None`` means infeasible."""
    res, _ = eliminate(var, atoms)
    return _clean(res)


@lru_cache(maxsize=1 << 16)
def _feasible(atoms: frozenset) -> bool:
    cur = _clean(atoms)
    while cur:
        var = min(v for a in cur for v in a.variables())
        cur = eliminate_all(var, cur)
        if cur is None:
            return False
    return cur is not None


def feasible(atoms: Iterable[Formula]) -> bool:
    """Satisfiability over Q of a conjunction of Lin atoms (TRUE/FALSE allowed)."""
    atoms = list(atoms)
    if any(isinstance(a, FalseF) for a in atoms):
        return False
    return _feasible(frozenset(a for a in atoms if isinstance(a, Lin)))

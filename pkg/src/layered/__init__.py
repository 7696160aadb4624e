"""Exact decision tools for layered semifields over the canonical model ``L x Q``."""

from .core import ONE, ZERO, InverseOfZero, LayeredElem, Theta, elem
from .decide import (
    AxiomSuite, axiom_suite, check_axioms, decide_sentence, eval_formula, eval_term, poly_equal,
)
from .layering import LAYERINGS, NAT, POSRAT, TRIVIAL, LayerPoly, get_layering, solve_layer_system
from .normal import (
    Caps, CapExceeded, delta_condition, dnf, enumerate_mtos, essential_form, nnf, split_atom,
    split_clauses, to_cases, to_poly,
)
from .qe import QEReport, Unsupported, eliminate_exists, qe, zero_case_split
from .syntax import ParseError, free_vars, parse_formula, parse_term, pretty, substitute

__all__ = [
    "ONE", "ZERO", "InverseOfZero", "LayeredElem", "Theta", "elem",
    "AxiomSuite", "axiom_suite", "check_axioms", "decide_sentence", "eval_formula", "eval_term", "poly_equal",
    "LAYERINGS", "NAT", "POSRAT", "TRIVIAL", "LayerPoly", "get_layering", "solve_layer_system",
    "Caps", "CapExceeded", "delta_condition", "dnf", "enumerate_mtos", "essential_form", "nnf",
    "split_atom", "split_clauses", "to_cases", "to_poly",
    "QEReport", "Unsupported", "eliminate_exists", "qe", "zero_case_split",
    "ParseError", "free_vars", "parse_formula", "parse_term", "pretty", "substitute",
]

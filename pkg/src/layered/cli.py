"""Command-line front end.

Exit codes: 0 success or true, 1 false, 2 parse error, 3 unsupported
fragment, 4 cap exceeded (5 for other input errors).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

from .core import Theta
from .decide import (
    UnboundVariable, axiom_suite, check_axioms, decide_sentence, eval_formula, eval_term, format_env,
    parse_assignment, poly_equal,
)
from .normal import CapExceeded, Caps, simplify_formula
from .qe import Unsupported, qe
from .syntax import ParseError, free_vars, parse_formula, parse_term, pretty

COMMANDS = ("qe", "decide", "eval", "simplify", "poly-eq", "axioms")
EXIT_OK, EXIT_FALSE, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_CAP, EXIT_INPUT = 0, 1, 2, 3, 4, 5


@dataclass
class CliConfig:
    command: str
    layering: str = "nat"
    assignment: str = ""
    monomial_cap: int = 16
    dnf_cap: int = 100_000
    seed: int = 0
    samples: int = 10_000
    verbose: bool = False
    json: bool = False
    kind: str = "DLSF(L)"
    literal: bool = False
    input: str = "-"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ValueError(f"unknown command {self.command!r}")
        if self.monomial_cap < 1 or self.dnf_cap < 1:
            raise ValueError("caps must be >= 1")

    @property
    def caps(self) -> Caps:
        return Caps(monomials=self.monomial_cap, dnf=self.dnf_cap)


def _one_line(msg: str) -> str:
    return " ".join(str(msg).split())


def run(config: CliConfig, text: str) -> tuple[int, str]:
    """Execute one command; returns the exit code and the text to print.

    For codes >= 2 the text is a one-line diagnostic meant for stderr.
    """
    try:
        return _run(config, text)
    except ParseError as e:
        return EXIT_PARSE, _one_line(f"parse error: {e}")
    except Unsupported as e:
        return EXIT_UNSUPPORTED, _one_line(f"unsupported: {e}")
    except CapExceeded as e:
        return EXIT_CAP, _one_line(f"cap exceeded: {e}")
    except (UnboundVariable, ValueError) as e:
        return EXIT_INPUT, _one_line(f"error: {e}")


def _verdict(b: bool) -> tuple[int, str]:
    return (EXIT_OK, "true") if b else (EXIT_FALSE, "false")


def _run(cfg: CliConfig, text: str) -> tuple[int, str]:
    M = Theta(cfg.layering)
    caps = cfg.caps
    if cfg.command == "axioms":
        rep = check_axioms(axiom_suite(cfg.kind, cfg.layering, cfg.literal), cfg.samples, cfg.seed)
        return (EXIT_OK if rep.ok else EXIT_FALSE), (rep.json_lines() if cfg.json else rep.text())
    text = text.strip()
    if cfg.command == "poly-eq":
        if text.count("==") != 1:
            raise ValueError("poly-eq expects two terms separated by '=='")
        a, b = text.split("==")
        res = poly_equal(parse_term(a, M), parse_term(b, M), M, caps, seed=cfg.seed)
        if res.equal:
            return EXIT_OK, "true"
        cex = res.counterexample
        return EXIT_FALSE, "false" + (f"\ncounterexample: {format_env(cex, M)}" if cex else "")
    if cfg.command == "eval":
        env = parse_assignment(cfg.assignment, M)
        try:
            t = parse_term(text, M)
        except ParseError:
            return _verdict(eval_formula(parse_formula(text, M), env, M))
        return EXIT_OK, M.format_elem(eval_term(t, env, M))
    f = parse_formula(text, M)
    if cfg.command == "decide":
        return _verdict(decide_sentence(f, M, caps))
    if cfg.command == "qe":
        rep = qe(f, M, caps)
        lines = [pretty(rep.result, M)]
        if cfg.verbose:
            lines += [f"# {s}" for s in rep.trace]
        return EXIT_OK, "\n".join(lines)
    return EXIT_OK, pretty(simplify_formula(f, M, caps), M)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="layered", description="Decision tools for layered semifields.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("input", nargs="?", default="-", help="input file, or - for stdin")
    p.add_argument("--layering", choices=("trivial", "nat", "posrat"), default="nat")
    p.add_argument("--assign", default="", help="comma separated var=literal pairs")
    p.add_argument("--monomial-cap", type=int, default=16)
    p.add_argument("--dnf-cap", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--kind", default="DLSF(L)", choices=("LD", "LD(L)", "DLSF", "DLSF(L)"))
    p.add_argument("--literal", action="store_true", help="axioms: use the unguarded variants")
    p.add_argument("--json", action="store_true", help="axioms: one JSON record per line")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = CliConfig(command=args.command, layering=args.layering, assignment=args.assign,
                        monomial_cap=args.monomial_cap, dnf_cap=args.dnf_cap, seed=args.seed,
                        samples=args.samples, verbose=args.verbose, json=args.json, kind=args.kind,
                        literal=args.literal, input=args.input)
    except ValueError as e:
        print(_one_line(f"error: {e}"), file=sys.stderr)
        return EXIT_INPUT
    text = ""
    if cfg.command != "axioms":
        try:
            if cfg.input == "-":
                text = sys.stdin.read()
            else:
                with open(cfg.input, encoding="ascii") as fh:
                    text = fh.read()
        except (OSError, UnicodeDecodeError) as e:
            print(_one_line(f"error: {e}"), file=sys.stderr)
            return EXIT_INPUT
    code, out = run(cfg, text)
    print(out, file=sys.stderr if code >= EXIT_PARSE else sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())

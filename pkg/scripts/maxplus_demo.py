"""Freshman's dream across layerings.

In max-plus arithmetic ``(x + y)^n = x^n + y^n`` holds; once ties carry
layers (natural numbers), it fails exactly where x and y have equal values.
"""

import argparse

from layered import Theta, decide_sentence, parse_formula, parse_term, poly_equal
from layered.decide import format_env


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-n", type=int, default=4)
    args = ap.parse_args()
    for name in ("trivial", "nat", "posrat"):
        M = Theta(name)
        for n in range(2, args.max_n + 1):
            s = parse_formula(f"A x. A y. ((x + y)^{n} = x^{n} + y^{n})", M)
            verdict = decide_sentence(s, M)
            line = f"{name:8s} n={n} {str(verdict).lower()}"
            if not verdict:
                res = poly_equal(parse_term(f"(x + y)^{n}"), parse_term(f"x^{n} + y^{n}"), M)
                line += f"  counterexample {format_env(res.counterexample, M)}"
            print(line)


if __name__ == "__main__":
    main()

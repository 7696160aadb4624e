"""Print the quantifier-free equivalent of every corpus formula."""

from pathlib import Path

from layered import Theta, Unsupported, parse_formula, pretty, qe

CORPUS = Path(__file__).resolve().parent.parent / "tests" / "data" / "corpus.txt"

for line in CORPUS.read_text().splitlines():
    if not line.strip() or line.startswith("#"):
        continue
    name, text = (s.strip() for s in line.split("|", 1))
    M = Theta(name)
    try:
        out = pretty(qe(parse_formula(text, M), M).result, M)
    except Unsupported as e:
        out = f"unsupported: {e}"
    print(f"{name:8s} {text}\n         => {out}")

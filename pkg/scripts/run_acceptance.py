"""Run the acceptance suite and print one PASS/FAIL line per criterion."""

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-s", "-p", "no:cacheprovider", "tests/test_acceptance.py"],
        cwd=ROOT, capture_output=True, text=True,
    )
    lines = [l for l in proc.stdout.splitlines() if l.startswith("criterion ")]
    for line in dict.fromkeys(lines):
        print(line)
    if proc.returncode and not lines:
        print(proc.stdout[-2000:], proc.stderr[-2000:], sep="\n")
    return proc.returncode


if __name__ == "__main__":
    sys.exit(main())

"""Numerical-hygiene report for every scheme in the catalog."""
import sys

from nhqcbench.bench import benchmark_catalog
from nhqcbench.cli import main

if __name__ == "__main__":
    for tag in benchmark_catalog():
        print(f"--- {tag} ---")
        code = main(["check", "--scheme", tag])
        if code != 0:
            sys.exit(code)
    sys.exit(0)

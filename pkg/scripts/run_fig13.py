"""Generate all three benchmark sweep panels into out/.

Panel a: fidelity vs uniform decoherence rate, no control errors.
Panel b: fidelity vs Rabi-error fraction at the published decoherence rates.
Panel c: fidelity vs detuning-error fraction at the same rates.

Dense grids take minutes; pass a smaller --points for a quick look.
"""
import argparse
import sys

from nhqcbench.cli import main

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=21)
    args = parser.parse_args()
    for panel in "abc":
        code = main(["fig13", panel, "--points", str(args.points),
                     "--out", f"out/fig13{panel}.csv"])
        if code != 0:
            sys.exit(code)
    sys.exit(0)

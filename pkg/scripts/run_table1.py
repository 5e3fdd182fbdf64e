"""Print the pulse-area comparison table and write it to out/table1.csv."""
import sys

from nhqcbench.cli import main

if __name__ == "__main__":
    sys.exit(main(["table1", "--out", "out/table1.csv"]))

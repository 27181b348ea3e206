"""
Main entry point for so3tengen

Examples:
    python main.py enumerate "cart:1,cart:1" --degree 2 --out gens.json
    python main.py basis "cart:2" --out-rep cart:2 --degree 2 --out basis.json
    python main.py verify --in gens.json --rotations 200
    python main.py experiment --variant equi7 --train-sizes 100,1000 --out results/
    python main.py dump --kind cg --la 1 --lb 1 --lc 2
"""

import sys
import os

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from clirun.commands import run


def main():
    return run(sys.argv[1:])


if __name__ == "__main__":
    exit_code = main()
    sys.exit(exit_code)

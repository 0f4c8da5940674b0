"""Solve the two bundled example chains at their stored poses and print the solution tables.

    python3 scripts/worked_examples.py
"""

import json
from pathlib import Path

from ik6rp.io import parse_chain, report_table
from ik6rp.solver import solve_ik_report

DATA = Path(__file__).resolve().parent.parent / "data"


def main():
    poses = json.loads((DATA / "poses.json").read_text())
    for key, pose in poses.items():
        chain = parse_chain(DATA / f"{key}.json")
        print(f"== {chain.name} ==")
        print(report_table(chain, solve_ik_report(chain, pose)).rstrip())
        print()


if __name__ == "__main__":
    main()

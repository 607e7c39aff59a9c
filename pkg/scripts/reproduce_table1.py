"""Print the squared-correlation sums of the five named states and their nc partners."""

import argparse
from fractions import Fraction

from nocorr.correlations import CONVENTIONS, PER_PLACEMENT
from nocorr.experiments import sigma_table


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--convention", choices=CONVENTIONS, default=PER_PLACEMENT)
    args = ap.parse_args()

    rows = sigma_table(convention=args.convention)
    table: dict[tuple[str, str], list[str]] = {}
    for r in rows:
        table.setdefault((r.state, r.kind), []).append(str(Fraction(r.value).limit_denominator(100_000)))
    print(f"{'state':<12}{'k=1':>12}{'k=2':>12}{'k=3':>12}")
    for (state, kind), vals in table.items():
        label = state if kind == "original" else f"nc({state})"
        print(f"{label:<12}" + "".join(f"{v:>12}" for v in vals))


if __name__ == "__main__":
    main()

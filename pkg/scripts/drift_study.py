"""Step-size study of RK4 conservation drift for the explicit systems.

Usage: python3 scripts/drift_study.py [--t 10] [--dts 0.04,0.02,0.01,0.005,0.001]

Prints the worst drift per system and step size, plus the ratio between
consecutive step sizes (16 is the fourth-order asymptote; a value near 32
means the leading error term vanishes, as for linear flows).
"""

import argparse

from superint.catalog import bind
from superint.dynamics import IntegrationError, drift_report, integrate_default

EXPLICIT = ["E1", "E3", "E4", "E5", "E6", "E12", "E13", "E14", "E15", "E18", "S3", "S5", "S6"]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--t", type=float, default=10.0)
    ap.add_argument("--dts", default="0.04,0.02,0.01,0.005,0.001")
    args = ap.parse_args()
    dts = [float(x) for x in args.dts.split(",")]
    print("system " + " ".join(f"{dt:>10g}" for dt in dts) + "   ratios")
    for sid in EXPLICIT:
        b = bind(sid)
        names = ["H"] + [n for n in b.explicit_constants() if n != "A0"]
        row = []
        for dt in dts:
            try:
                row.append(max(drift_report(integrate_default(b, args.t, dt), b, names).values()))
            except IntegrationError:
                row.append(float("nan"))
        ratios = [a / b_ if b_ else float("inf") for a, b_ in zip(row, row[1:])]
        print(f"{sid:6s} " + " ".join(f"{d:10.2e}" for d in row)
              + "   " + " ".join(f"{r:.1f}" for r in ratios))


if __name__ == "__main__":
    main()

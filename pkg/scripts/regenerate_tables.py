"""Regenerate both separating-coordinates tables and compare with the fixtures.

Usage: python3 scripts/regenerate_tables.py [--write] [--seed N]

With --write the regenerated tables replace the packaged fixtures; without
it only the mismatch list is printed.
"""

import argparse
from importlib import resources

from superint.verify import generate_table, golden_table


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--write", action="store_true")
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    status = 0
    for space in ("e2", "s2"):
        got = generate_table(space, args.seed)
        bad = got.mismatches(golden_table(space))
        print(f"{space}: {len(got.rows)}x{len(got.columns)}, {len(bad)} mismatches")
        for sys_id, fam, mine, want in bad:
            print(f"  {sys_id} {fam}: regenerated {mine}, fixture {want}")
        status |= bool(bad)
        if args.write:
            path = resources.files("superint") / "data" / f"table_{space}.json"
            with open(str(path), "w") as fh:
                fh.write(got.dumps())
    return int(status)


if __name__ == "__main__":
    raise SystemExit(main())

#!/usr/bin/env python3
"""Builds data/items_300.tsv: the 31 published example rows followed by
synthetic rows that recombine their subjects and VPs (seeded, reproducible)."""

import random
import sys
from pathlib import Path

N_ITEMS = 300
SEED = 20251014


def main() -> None:
    data = Path(__file__).resolve().parent.parent / "data"
    rows = [line.split("\t") for line in
            (data / "items_table1.tsv").read_text().splitlines()[1:] if line]
    subjects = sorted({r[0] for r in rows})
    vps = sorted({r[1] for r in rows} | {r[2] for r in rows})
    rng = random.Random(SEED)
    items = [tuple(r) for r in rows]
    seen = set(items)
    while len(items) < N_ITEMS:
        subject = rng.choice(subjects)
        vp1, vp2 = rng.sample(vps, 2)
        item = (subject, vp1, vp2)
        if item not in seen:
            seen.add(item)
            items.append(item)
    out = data / "items_300.tsv"
    with out.open("w", newline="\n") as f:
        f.write("subject\tvp1\tvp2\n")
        for item in items:
            f.write("\t".join(item) + "\n")
    sys.stdout.write(f"wrote {len(items)} items to {out}\n")


if __name__ == "__main__":
    main()

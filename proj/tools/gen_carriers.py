#!/usr/bin/env python3
"""Regenerates the synthetic carrier fixtures in data/.

Each set derives three carriers from one random ancestor by independent
point substitutions plus a few indels, so the carriers have distinct
lengths and controlled divergence.
"""
import random
import sys
from pathlib import Path


def mutate(rng, seq, sub_rate, indels):
    out = [c if rng.random() >= sub_rate else rng.choice([b for b in "ACGT" if b != c])
           for c in seq]
    for delta in indels:
        pos = rng.randrange(50, len(out) - 50)
        if delta > 0:
            out[pos:pos] = [rng.choice("ACGT") for _ in range(delta)]
        else:
            del out[pos:pos - delta]
    return "".join(out)


def write(path, names, seqs):
    with open(path, "w") as f:
        for name, s in zip(names, seqs):
            f.write(f">{name}\n")
            for i in range(0, len(s), 60):
                f.write(s[i:i + 60] + "\n")


def main(out_dir):
    out = Path(out_dir)
    rng = random.Random(20100417)

    ancestor = "".join(rng.choice("ACGT") for _ in range(900))
    plan = [(0.025, []), (0.025, [-3]), (0.025, [2, 2])]
    seqs = [mutate(rng, ancestor, r, ind) for r, ind in plan]
    write(out / "carriers.fasta", ["carrier_a synthetic", "carrier_b synthetic", "carrier_c synthetic"], seqs)

    ancestor = "".join(rng.choice("ACGT") for _ in range(1500))
    plan = [(0.45, []), (0.45, [-4, -3]), (0.45, [5, 3])]
    seqs = [mutate(rng, ancestor, r, ind) for r, ind in plan]
    write(out / "carriers_wide.fasta", ["wide_a synthetic", "wide_b synthetic", "wide_c synthetic"], seqs)


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "data")

"""Sample random region morphisms and tabulate how often locality fails.

    python scripts/random_locality_sweep.py --samples 500 --seed 1
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from collections import Counter
from dataclasses import asdict

from gaugeccr.gauge_model import locality_check
from gaugeccr.library import ExperimentConfig, random_bundle_morphism


def sweep(samples: int, seed: int, cfg: ExperimentConfig) -> dict:
    rng = random.Random(seed)
    table: dict = {}
    for m in (2, 3, 4):
        for connected in (True, False):
            counts = Counter()
            start = time.perf_counter()
            for _ in range(samples):
                r = locality_check(random_bundle_morphism(rng, m, connected, cfg))
                counts[r.verdict] += 1
                counts["kernel_in_radical"] += r.kernel_in_radical
                counts["criterion_agrees"] += r.criterion_agrees
            table[f"m={m} {'connected' if connected else 'disconnected'}"] = {
                "samples": samples,
                "not_injective": counts["NOT injective"],
                "kernel_in_radical": counts["kernel_in_radical"],
                "criterion_agrees": counts["criterion_agrees"],
                "seconds": round(time.perf_counter() - start, 3),
            }
    return {"seed": seed, "config": {k: str(v) for k, v in asdict(cfg).items()}, "results": table}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--max-pieces", type=int, default=3)
    parser.add_argument("--json", help="write the table to this file")
    args = parser.parse_args(argv)
    out = sweep(args.samples, args.seed, ExperimentConfig(max_pieces=args.max_pieces))
    print(f"{'family':26s} {'non-local':>10s} {'ker<=rad':>9s} {'agree':>6s} {'time':>7s}")
    for name, row in out["results"].items():
        print(f"{name:26s} {row['not_injective']:>6d}/{row['samples']:<3d} {row['kernel_in_radical']:>9d} "
              f"{row['criterion_agrees']:>6d} {row['seconds']:>6.2f}s")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(out, fh, indent=2, sort_keys=True)
    bad = any(r["criterion_agrees"] != r["samples"] for r in out["results"].values())
    return 1 if bad else 0


if __name__ == "__main__":
    sys.exit(main())

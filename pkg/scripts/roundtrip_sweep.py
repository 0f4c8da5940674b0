"""Solve forward poses of random chains and check that the sampled joints come back.

    python3 scripts/roundtrip_sweep.py --seeds 50 --tol 1e-6
"""

import argparse
import time
from dataclasses import dataclass

import numpy as np

from ik6rp.chain import SUPPORTED_PATTERNS, forward_arr
from ik6rp.sampling import random_chain, random_joints
from ik6rp.solver import solve_ik_report


@dataclass(frozen=True)
class SweepConfig:
    seeds: int = 50
    tol: float = 1e-6
    margin: float = 0.05


def run(cfg: SweepConfig):
    hits = total = 0
    worst_time = 0.0
    t0 = time.perf_counter()
    for seed in range(cfg.seeds):
        for k, pattern in enumerate(SUPPORTED_PATTERNS):
            rng = np.random.default_rng(seed * 10 + k)
            chain = random_chain(rng, pattern, margin=cfg.margin)
            q = random_joints(rng, chain)
            total += 1
            t = time.perf_counter()
            try:
                report = solve_ik_report(chain, forward_arr(chain, q))
            except Exception as exc:
                print(f"seed {seed} {pattern}: {type(exc).__name__}: {exc}")
                continue
            worst_time = max(worst_time, time.perf_counter() - t)
            scale = max(1.0, max(abs(x) for x in q))
            if any(max(abs(a - b) for a, b in zip(s.joints, q)) <= cfg.tol * scale for s in report.solutions):
                hits += 1
            else:
                print(f"seed {seed} {pattern}: miss, {len(report.solutions)} solutions, families {report.families}")
                print("  want", np.round(q.external(), 4))
                for s in report.solutions:
                    print("  got ", np.round(s.external, 4))
    print(f"{hits}/{total} recovered, {time.perf_counter() - t0:.1f} s total, slowest solve {worst_time:.2f} s")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seeds", type=int, default=SweepConfig.seeds)
    ap.add_argument("--tol", type=float, default=SweepConfig.tol)
    ap.add_argument("--margin", type=float, default=SweepConfig.margin)
    run(SweepConfig(**vars(ap.parse_args())))

"""Random chains and joint vectors for round-trip experiments."""

from __future__ import annotations

import math

import numpy as np

from .chain import SUPPORTED_PATTERNS, ChainSpec, JointVector, make_chain


def _away(rng, lo: float, hi: float) -> float:
    """Uniform magnitude in [lo, hi] with a random sign."""
    return float(rng.choice([-1.0, 1.0]) * rng.uniform(lo, hi))


def random_chain(rng: np.random.Generator, pattern: str = "RRRRRR", margin: float = 0.05,
                 max_len: float = 1.0, name: str = "") -> ChainSpec:
    """Normalized chain of the given pattern with a_i and tan(alpha_i/2) at least ``margin`` from 0."""
    if pattern not in SUPPORTED_PATTERNS:
        raise ValueError(f"unsupported pattern {pattern}")
    rows = []
    for i, jt in enumerate(pattern):
        last = i == 5
        a = 0.0 if last else _away(rng, margin, max_len)
        alpha = 0.0 if last else math.degrees(2 * math.atan(_away(rng, margin, 3.0)))
        if jt == "R":
            d = 0.0 if i in (0, 5) else float(rng.uniform(-max_len, max_len))
            rows.append(("R", None, d, a, alpha))
        else:
            rows.append(("P", float(rng.uniform(-170, 170)), None, a, alpha))
    return make_chain(rows, name or f"random-{pattern}")


def random_joints(rng: np.random.Generator, chain: ChainSpec, max_angle: float = 170.0,
                  max_len: float = 1.0) -> JointVector:
    vals = [float(rng.uniform(-max_angle, max_angle)) if t == "R" else float(rng.uniform(-max_len, max_len))
            for t in chain.pattern]
    return JointVector.from_external(chain, vals)

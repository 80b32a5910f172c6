#!/usr/bin/env python3
"""Sweep the compile-failure rate and watch the scores respond.

The level-0 score degrades with the failure share while the fully
tolerant level stays put, since it ignores every failure category.
"""

from __future__ import annotations

import argparse

from tcscore.scoring import ScoreConfig, score_curve
from tcscore.simulator import ErrorRates, SimSpec, simulate


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--n", type=int, default=400)
    args = parser.parse_args()

    cfg = ScoreConfig()
    print(f"{'fail_rate':>9}  {'S(0)':>7}  {'ES(3)':>7}")
    for rate in (0.0, 0.1, 0.2, 0.4, 0.6, 0.8):
        spec = SimSpec(
            seed=args.seed,
            n_samples=args.n,
            error_rates=ErrorRates(0.0, 0.0, rate),
        )
        curve = score_curve(*simulate(spec, cfg), cfg)
        at_zero = next(p for p in curve.points if p.t == 0.0)
        at_three = next(p for p in curve.points if p.t == 3.0)
        print(f"{rate:>9.1f}  {at_zero.speedup_score:>7.3f}  {at_three.error_aware_score:>7.3f}")


if __name__ == "__main__":
    main()

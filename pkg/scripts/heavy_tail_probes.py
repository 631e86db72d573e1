#!/usr/bin/env python3
"""Empirical probes of the heavy-negative-tail regimes, desk scale.

Three power-law negative tails bracket the hypothesis landscape:

  beta = 2.0   E[X^-] finite but E[(X^-)^4] infinite: mean convergence proved,
               almost-sure convergence not
  beta = 0.6   E[X^-] infinite, negative-tail integral finite: beyond the
               proved regime, but the mean value at every length stays finite
  beta = 0.2   negative-tail integral infinite: even the mean value diverges

For each: classify the integrability conditions, evaluate the negative-tail
integral, and run a small truncated-estimate grid to see whether the rate
still looks linear.  Nothing here proves anything; it maps where the proved
regimes end.
"""

import argparse

from greedypaths import (
    estimate_rate,
    hypothesis_report,
    check_negative_tail_integrability,
)
from greedypaths.weights import ParetoTail


def probe(beta: float, seed: int, replicas: int, threads: int) -> None:
    spec = ParetoTail(beta, -1, 1.0)
    print(f"=== pareto negative tail, beta={beta} ===")
    rep = hypothesis_report(spec, d=2, alpha=1.0)
    print(
        f"  positive_moment={rep.positive_moment} negative_mean={rep.negative_mean} "
        f"negative_fourth={rep.negative_fourth} tail_integral={rep.negative_tail_integral}"
    )
    print(f"  granted mode: {rep.mode}")
    integ = check_negative_tail_integrability(spec, 2, n=10)
    print(f"  tail integral: finite={integ.details['finite']} value={integ.details['integral']}")
    # truncation keeps every solve finite; the coupling makes levels comparable
    for m in (2.0, 8.0, 32.0):
        rows = [
            estimate_rate(spec, 2, n, m, replicas, seed, workers=threads) for n in (6, 8, 10)
        ]
        drift = abs(rows[-1].mean - rows[-2].mean)
        print(
            f"  m={m:5.1f}: rate(n=10) = {rows[-1].mean:9.4f} "
            f"+- {1.96 * rows[-1].stderr:.4f}, drift {drift:.4f}"
        )


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--replicas", type=int, default=200)
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    for beta in (2.0, 0.6, 0.2):
        probe(beta, a.seed, a.replicas, a.threads)

#!/usr/bin/env python3
"""Desk-scale convergence probe: does the best-path rate stabilize in n?

Runs the fair-Bernoulli field over an n grid, prints the rate table, the
drift between the two largest lengths, and the limit estimate with its
truncation-bias bound, then renders plots into the store.
"""

import argparse

from greedypaths import estimate_limit, estimate_rate
from greedypaths.cli import main as cli_main
from greedypaths.weights import Bernoulli


def run(out: str, seed: int, replicas: int, threads: int) -> int:
    spec = Bernoulli(0.5)
    n_grid = [6, 8, 10, 12]
    rows = [estimate_rate(spec, 2, n, float("inf"), replicas, seed, workers=threads) for n in n_grid]
    for row in rows:
        print(
            f"n={row.n:3d} mean={row.mean:.5f} stderr={row.stderr:.5f} "
            f"ci=[{row.ci_low:.5f}, {row.ci_high:.5f}]"
        )
    drift = abs(rows[-1].mean - rows[-2].mean)
    print(f"drift between n={n_grid[-2]} and n={n_grid[-1]}: {drift:.5f}")

    limit = estimate_limit(spec, 2, [0.0, 1.0], n_grid, replicas, seed, workers=threads)
    print(
        f"limit estimate {limit.limit:.5f} +- {limit.uncertainty:.5f} "
        f"(bias bound {limit.bias_bound:.5f}, monotone_ok={limit.monotone_ok})"
    )
    print(f"lower bound from the mean weight: {spec.mean():.5f}")

    cli_main(
        [
            "estimate", "--dist", "bernoulli:0.5", "--d", "2",
            "--n-grid", ",".join(map(str, n_grid)), "--m-grid", "inf",
            "--replicas", str(replicas), "--seed", str(seed),
            "--threads", str(threads), "--out", out,
        ]
    )
    return cli_main(["plot", "--out", out])


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="store")
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--replicas", type=int, default=500)
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    raise SystemExit(run(a.out, a.seed, a.replicas, a.threads))

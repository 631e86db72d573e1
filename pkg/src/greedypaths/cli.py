"""Config-driven experiment runner with persistent, resumable, reproducible outputs.

Subcommands: solve, estimate, verify, plot.  Every run is keyed by an explicit
seed (no wall-clock defaults); outputs are byte-identical for identical
(config, seed, code version) regardless of worker count.  Numbers serialize
with 17 significant digits so files round-trip 64-bit floats exactly.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from . import estimation, verify
from .solver import DEFAULT_NODE_BUDGET, beam_search, max_weight_path, within_exact_budget
from .weights import (
    Gaussian,
    TwoPoint,
    as_truncation,
    parse_spec,
    spec_token,
)

ESTIMATE_HEADER = (
    "experiment_id,d,family,params,n,m,replicas,mean,stderr,ci_low,ci_high,exact_fraction"
)
SOLVE_HEADER = (
    "experiment_id,d,family,params,seed,n,m,value,exact,nodes_expanded,nodes_pruned,path"
)


def fmt(x: float) -> str:
    """17-significant-digit float serialization (round-trip exact)."""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.17g}"


def parse_float(tok: str) -> float:
    return math.inf if tok.strip() in ("inf", "+inf", "none") else float(tok)


def parse_int_list(tok: str) -> list[int]:
    return [int(p) for p in tok.split(",") if p.strip()]


def parse_float_list(tok: str) -> list[float]:
    return [parse_float(p) for p in tok.split(",") if p.strip()]


def fmt_path(path) -> str:
    return "->".join("(" + ",".join(str(c) for c in v) + ")" for v in path)


def load_config(path: str) -> dict[str, str]:
    """Flat key = value file; '#' starts a comment; keys match long flag names."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise SystemExit(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if not key:
            raise SystemExit(f"{path}:{lineno}: empty key")
        out[key] = value.strip()
    return out


def _expand_config(argv: list[str]) -> list[str]:
    # Config values become flags inserted right after the subcommand, so real
    # command-line flags (parsed later) override them.
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    cfg = load_config(argv[i + 1])
    tokens: list[str] = []
    for key, value in cfg.items():
        tokens += [f"--{key.replace('_', '-')}", value]
    return argv[:1] + tokens + argv[1:]


def config_id(config: dict) -> str:
    canon = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:12]


def _json_safe(x):
    if isinstance(x, dict):
        return {k: _json_safe(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_json_safe(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, float) and (math.isinf(x) or math.isnan(x)):
        return fmt(x) if math.isinf(x) else "nan"
    return x


class ResultStore:
    """Append-only CSV results plus a JSON manifest of completed cells.

    Re-running an identical config is a no-op for completed cells; appending
    replicas extends a cell from its recorded sufficient statistics and never
    rewrites existing rows.
    """

    def __init__(self, root):
        self.root = Path(root)
        self.results = self.root / "results"
        self.reports = self.root / "reports"
        self.plots = self.root / "plots"
        self.manifest_path = self.root / "manifest.json"

    def load_manifest(self) -> dict:
        if self.manifest_path.exists():
            return json.loads(self.manifest_path.read_text())
        return {"tool": "greedypaths", "version": __version__, "experiments": {}}

    def save_manifest(self, manifest: dict) -> None:
        self.root.mkdir(parents=True, exist_ok=True)
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
        tmp.replace(self.manifest_path)

    def append_rows(self, filename: str, header: str, rows: list[str]) -> Path:
        self.results.mkdir(parents=True, exist_ok=True)
        target = self.results / filename
        new = not target.exists()
        with open(target, "a") as fh:
            if new:
                fh.write(header + "\n")
            for row in rows:
                fh.write(row + "\n")
        return target

    def write_report(self, filename: str, payload: dict) -> Path:
        self.reports.mkdir(parents=True, exist_ok=True)
        target = self.reports / filename
        target.write_text(json.dumps(_json_safe(payload), sort_keys=True, indent=2) + "\n")
        return target


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def run_solve(args) -> int:
    spec = parse_spec(args.dist)
    trunc = as_truncation(args.m)
    field = estimation.replica_field(spec, args.d, args.seed, 0)
    if within_exact_budget(args.d, args.n, args.n_budget):
        res = max_weight_path(field, args.n, trunc, node_budget=args.node_budget)
    else:
        res = beam_search(field, args.n, args.beam_width, trunc)
    print(
        f"value={fmt(res.value)} exact={'true' if res.exact else 'false'} "
        f"nodes_expanded={res.nodes_expanded} nodes_pruned={res.nodes_pruned}"
    )
    print(f"path={fmt_path(res.path)}")

    config = {
        "kind": "solve",
        "dist": spec_token(spec),
        "d": args.d,
        "n": args.n,
        "m": fmt(trunc.m),
        "seed": args.seed,
        "node_budget": args.node_budget,
        "beam_width": args.beam_width,
    }
    exp_id = config_id(config)
    store = ResultStore(args.out)
    manifest = store.load_manifest()
    exp = manifest["experiments"].get(exp_id)
    if exp is None:
        family, _, params = spec_token(spec).partition(":")
        row = ",".join(
            [
                exp_id, str(args.d), family, f'"{params}"', str(args.seed), str(args.n),
                fmt(trunc.m), fmt(res.value), "true" if res.exact else "false",
                str(res.nodes_expanded), str(res.nodes_pruned), f'"{fmt_path(res.path)}"',
            ]
        )
        store.append_rows("solve.csv", SOLVE_HEADER, [row])
        manifest["experiments"][exp_id] = {"config": config, "complete": True}
        store.save_manifest(manifest)
    return 0


# ---------------------------------------------------------------------------
# estimate
# ---------------------------------------------------------------------------


def _cell_key(n: int, m: float) -> str:
    return f"n={n},m={fmt(m)}"


def run_estimate(args) -> int:
    spec = parse_spec(args.dist)
    n_grid = parse_int_list(args.n_grid)
    m_grid = parse_float_list(args.m_grid)
    if not n_grid or not m_grid:
        raise SystemExit("n-grid and m-grid must be nonempty")
    if any(a >= b for a, b in zip(n_grid, n_grid[1:])) or any(
        a >= b for a, b in zip(m_grid, m_grid[1:])
    ):
        raise SystemExit("n-grid and m-grid must be strictly increasing")
    config = {
        "kind": "estimate",
        "dist": spec_token(spec),
        "d": args.d,
        "n_grid": n_grid,
        "m_grid": [fmt(m) for m in m_grid],
        "seed": args.seed,
        "node_budget": args.node_budget,
        "beam_width": args.beam_width,
    }
    exp_id = config_id(config)
    store = ResultStore(args.out)
    manifest = store.load_manifest()
    exp = manifest["experiments"].setdefault(exp_id, {"config": config, "cells": {}})
    if exp["config"] != config:
        raise SystemExit(f"experiment id collision for {exp_id}")

    family, _, params = spec_token(spec).partition(":")
    rows: list[str] = []
    for n in n_grid:
        for m in m_grid:
            key = _cell_key(n, m)
            cell = exp["cells"].get(key, {"count": 0, "sum": 0.0, "sumsq": 0.0, "exact": 0})
            extended = cell["count"] < args.replicas
            if extended:
                vals = estimation.replica_values(
                    spec, args.d, n, m, range(cell["count"], args.replicas), args.seed,
                    node_budget=args.node_budget, n_budget=args.n_budget,
                    beam_width=args.beam_width, workers=args.threads,
                )
                for value, exact in vals:
                    x = value / n
                    cell["count"] += 1
                    cell["sum"] += x
                    cell["sumsq"] += x * x
                    cell["exact"] += bool(exact)
                exp["cells"][key] = cell
            row = estimation.row_from_moments(
                n, m, cell["count"], cell["sum"], cell["sumsq"], cell["exact"]
            )
            if extended:
                rows.append(
                    ",".join(
                        [
                            exp_id, str(args.d), family, f'"{params}"', str(n), fmt(m),
                            str(row.replicas), fmt(row.mean), fmt(row.stderr),
                            fmt(row.ci_low), fmt(row.ci_high), fmt(row.exact_fraction),
                        ]
                    )
                )
            print(
                f"n={n} m={fmt(m)} replicas={row.replicas} mean={fmt(row.mean)} "
                f"stderr={fmt(row.stderr)} exact_fraction={fmt(row.exact_fraction)}"
            )
    if rows:
        store.append_rows(f"estimate_{exp_id}.csv", ESTIMATE_HEADER, rows)
        store.save_manifest(manifest)
    print(f"experiment_id={exp_id}")
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

CHECK_NAMES = [
    "stirling",
    "binomial-moment",
    "factorial-moment-exact",
    "factorial-moment",
    "concentration-rate",
    "concentration",
    "fourth-moment",
    "fourth-moment-identity",
    "partial-sum",
    "lower-tail",
    "integrability",
]

# interface aliases kept for config compatibility
CHECK_ALIASES = {
    "key-lemma-exact": "factorial-moment-exact",
    "key-lemma-stat": "factorial-moment",
    "c-of-m": "concentration-rate",
    "tail-bound": "lower-tail",
}

_PROFILES = {
    "quick": {"replicas": 2000, "batches": 5000},
    "full": {"replicas": 10_000, "batches": 100_000},
}


def _run_one_check(name: str, args, profile: dict) -> list[verify.VerificationReport]:
    replicas = args.replicas if args.replicas is not None else profile["replicas"]
    batches = args.replicas if args.replicas is not None else profile["batches"]
    seed = args.seed
    workers = args.threads
    dist = parse_spec(args.dist) if args.dist else None
    if name == "stirling":
        return [verify.check_stirling_identity(n_max=args.nmax)]
    if name == "binomial-moment":
        return [verify.check_binomial_factorial_moment(n=args.nmax, p=0.3, k=args.k or 3)]
    if name == "factorial-moment-exact":
        q = Fraction(args.q) if args.q else Fraction(1, 2)
        return [verify.check_factorial_moment_bound_exact(q, m=1.0, d=args.d, n=args.n or 3)]
    if name == "factorial-moment":
        spec = dist or TwoPoint(1, 10, 0.3)
        ks = [args.k] if args.k else [1, 2]
        return [
            verify.check_factorial_moment_bound(
                spec, args.d, args.n or 8, args.m, k, replicas, seed, workers=workers
            )
            for k in ks
        ]
    if name == "concentration-rate":
        return [verify.check_concentration_rate_positive()]
    if name == "concentration":
        spec = dist or TwoPoint(1, 10, 0.2)
        return [
            verify.check_floor_count_concentration(
                spec, args.d, args.n or 10, args.m, replicas, seed, workers=workers
            )
        ]
    if name == "fourth-moment":
        spec = dist or Gaussian(0.0, 1.0)
        return [verify.check_fourth_moment(spec, args.m_overshoot, args.ell, replicas, seed)]
    if name == "fourth-moment-identity":
        return [verify.check_fourth_moment_identity(dist, m=args.m_overshoot)]
    if name == "partial-sum":
        spec = dist or TwoPoint(1, 10, 0.2)
        return [verify.check_partial_sum_bound(spec, args.d, args.n or 20, args.m, batches, seed)]
    if name == "lower-tail":
        spec = dist or Gaussian(0.0, 1.0)
        t_grid = parse_float_list(args.t_grid)
        return [
            verify.check_lower_tail_bound(
                spec, args.d, args.n or 6, t_grid, replicas, seed, workers=workers
            )
        ]
    if name == "integrability":
        spec = dist or Gaussian(0.0, 1.0)
        return [verify.check_negative_tail_integrability(spec, args.d, n=args.n or 10)]
    raise SystemExit(f"unknown check name: {name}")


def run_verify(args) -> int:
    name = CHECK_ALIASES.get(args.check, args.check)
    names = CHECK_NAMES if name == "all" else [name]
    if any(nm not in CHECK_NAMES for nm in names):
        raise SystemExit(f"unknown check name: {args.check}")
    profile = _PROFILES[args.profile]
    reports: list[verify.VerificationReport] = []
    for nm in names:
        reports.extend(_run_one_check(nm, args, profile))
    for rep in reports:
        status = "PASS" if rep.passed else "FAIL"
        print(
            f"{status} {rep.name} [{rep.mode}] statistic={fmt(rep.statistic)} "
            f"bound={fmt(rep.bound)} slack={fmt(rep.slack)}"
        )
    config = {
        "kind": "verify",
        "check": args.check,
        "profile": args.profile,
        "seed": args.seed,
        "d": args.d,
        "dist": args.dist,
    }
    exp_id = config_id(config)
    store = ResultStore(args.out)
    payload = {
        "config": config,
        "reports": [dataclasses.asdict(rep) for rep in reports],
        "all_passed": all(r.passed for r in reports),
    }
    path = store.write_report(f"verify_{exp_id}.json", payload)
    manifest = store.load_manifest()
    manifest["experiments"][exp_id] = {"config": config, "complete": True}
    store.save_manifest(manifest)
    print(f"report={path}")
    return 0 if all(r.passed for r in reports) else 1


# ---------------------------------------------------------------------------
# plot
# ---------------------------------------------------------------------------


def _read_estimate_rows(store: ResultStore, exp_id: str) -> dict[tuple[int, float], dict]:
    import csv

    target = store.results / f"estimate_{exp_id}.csv"
    cells: dict[tuple[int, float], dict] = {}
    with open(target) as fh:
        for rec in csv.DictReader(fh):
            key = (int(rec["n"]), parse_float(rec["m"]))
            if key not in cells or int(rec["replicas"]) > cells[key]["replicas"]:
                cells[key] = {
                    "replicas": int(rec["replicas"]),
                    "mean": float(rec["mean"]),
                    "stderr": float(rec["stderr"]),
                    "ci_low": float(rec["ci_low"]),
                    "ci_high": float(rec["ci_high"]),
                }
    return cells


def run_plot(args) -> int:
    store = ResultStore(args.out)
    manifest = store.load_manifest()
    estimates = {
        eid: exp
        for eid, exp in manifest["experiments"].items()
        if exp.get("config", {}).get("kind") == "estimate"
        and (store.results / f"estimate_{eid}.csv").exists()
    }
    if not estimates:
        print("no estimate results found in store; run `estimate` first", file=sys.stderr)
        return 2

    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    store.plots.mkdir(parents=True, exist_ok=True)
    written = []
    for eid in sorted(estimates):
        exp = estimates[eid]
        cells = _read_estimate_rows(store, eid)
        matplotlib.rcParams["svg.hashsalt"] = eid
        n_values = sorted({n for n, _ in cells})
        m_values = sorted({m for _, m in cells})

        # mean rate vs n, one curve per truncation level
        fig, ax = plt.subplots(figsize=(6, 4))
        tidy = ["experiment_id,m,n,mean,ci_low,ci_high"]
        for m in m_values:
            pts = [(n, cells[(n, m)]) for n in n_values if (n, m) in cells]
            xs = [n for n, _ in pts]
            ys = [c["mean"] for _, c in pts]
            err = [1.96 * c["stderr"] for _, c in pts]
            ax.errorbar(xs, ys, yerr=err, marker="o", capsize=3, label=f"m={fmt(m)}")
            for n, c in pts:
                tidy.append(
                    f"{eid},{fmt(m)},{n},{fmt(c['mean'])},{fmt(c['ci_low'])},{fmt(c['ci_high'])}"
                )
        ax.set_xlabel("path length n (vertices)")
        ax.set_ylabel("mean best-path weight per vertex")
        ax.set_title(exp["config"]["dist"])
        ax.legend(fontsize=8)
        fig.tight_layout()
        svg1 = store.plots / f"{eid}_rate_vs_n.svg"
        fig.savefig(svg1, format="svg", metadata={"Date": None})
        plt.close(fig)
        (store.plots / f"{eid}_rate_vs_n.csv").write_text("\n".join(tidy) + "\n")
        written.append(svg1)

        # truncated-constant estimate (largest n) vs finite m, drift-widened bars
        finite_m = [m for m in m_values if not math.isinf(m)]
        if finite_m and len(n_values) >= 2:
            n_max, n_prev = n_values[-1], n_values[-2]
            fig, ax = plt.subplots(figsize=(6, 4))
            tidy = ["experiment_id,m,estimate,uncertainty"]
            xs, ys, err = [], [], []
            for m in finite_m:
                if (n_max, m) not in cells or (n_prev, m) not in cells:
                    continue
                est = cells[(n_max, m)]["mean"]
                drift = abs(est - cells[(n_prev, m)]["mean"])
                unc = 1.96 * cells[(n_max, m)]["stderr"] + drift
                xs.append(m)
                ys.append(est)
                err.append(unc)
                tidy.append(f"{eid},{fmt(m)},{fmt(est)},{fmt(unc)}")
            ax.errorbar(xs, ys, yerr=err, marker="s", capsize=3, color="tab:red")
            ax.set_xlabel("truncation level m")
            ax.set_ylabel(f"estimated limit constant (n={n_max})")
            ax.set_title(exp["config"]["dist"])
            fig.tight_layout()
            svg2 = store.plots / f"{eid}_const_vs_m.svg"
            fig.savefig(svg2, format="svg", metadata={"Date": None})
            plt.close(fig)
            (store.plots / f"{eid}_const_vs_m.csv").write_text("\n".join(tidy) + "\n")
            written.append(svg2)
    for p in written:
        print(f"wrote {p}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", help="flat key = value config file; flags override")
    sp.add_argument("--out", default="store", help="output directory (default: ./store)")
    sp.add_argument("--seed", type=int, required=True, help="master seed (required)")
    sp.add_argument("--threads", type=int, default=1, help="worker processes (default 1)")
    sp.add_argument("--d", type=int, default=2, help="lattice dimension (default 2)")
    sp.add_argument("--node-budget", type=int, default=DEFAULT_NODE_BUDGET)
    sp.add_argument("--n-budget", type=int, default=None, help="max n for exact solves")
    sp.add_argument("--beam-width", type=int, default=64)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="greedypaths",
        description="Max-weight self-avoiding lattice paths: exact solver, "
        "growth-constant estimation, and inequality verification.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="one exact (or beam) solve")
    _add_common(sp)
    sp.add_argument("--dist", required=True, help="family:params, e.g. two_point:1,10,0.3")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=parse_float, default=math.inf, help="truncation level")
    sp.set_defaults(func=run_solve)

    sp = sub.add_parser("estimate", help="Monte Carlo estimates over (n, m) grids")
    _add_common(sp)
    sp.add_argument("--dist", required=True)
    sp.add_argument("--n-grid", required=True, help="e.g. 4,6,8,10")
    sp.add_argument("--m-grid", default="inf", help="e.g. 0,2,4,8 or inf")
    sp.add_argument("--replicas", type=int, default=1000)
    sp.set_defaults(func=run_estimate)

    sp = sub.add_parser("verify", help="run named inequality checks")
    _add_common(sp)
    sp.add_argument("--check", required=True, help="check name or 'all'")
    sp.add_argument("--profile", choices=sorted(_PROFILES), default="quick")
    sp.add_argument("--dist", default=None)
    sp.add_argument("--replicas", type=int, default=None, help="override profile replicas")
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--m", type=parse_float, default=4.0, help="truncation level for checks")
    sp.add_argument("--m-overshoot", type=parse_float, default=1.0, help="floor for overshoot checks")
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--q", default=None, help="low-atom probability, e.g. 1/2 or 0.5")
    sp.add_argument("--ell", type=int, default=100)
    sp.add_argument("--t-grid", default="6,12,18")
    sp.add_argument("--nmax", type=int, default=10)
    sp.set_defaults(func=run_verify)

    sp = sub.add_parser("plot", help="render SVG plots + tidy CSV from stored results")
    sp.add_argument("--config", help="flat key = value config file; flags override")
    sp.add_argument("--out", default="store")
    sp.set_defaults(func=run_plot)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    argv = _expand_config(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())

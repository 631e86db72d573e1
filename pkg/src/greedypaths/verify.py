"""Exact and statistical verification of the inequalities behind linear growth.

Every statistical check is one-sided with an explicit 3-standard-error slack;
exact checks (integer identities, exhaustive small-instance enumeration) admit
zero slack.  A check passes iff statistic <= bound + slack, component by
component.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as _field
from fractions import Fraction
from functools import partial
from math import comb

from ._parallel import ordered_map
from .estimation import replica_field
from .lattice import Path, ResourceBound, enumerate_saws, l1_ball_offsets, origin, path_weight
from .solver import DEFAULT_NODE_BUDGET, greedy_stats, max_weight_path
from .weights import (
    DistributionSpec,
    Gaussian,
    ParetoTail,
    ShiftedExponential,
    as_truncation,
    conditional_overshoot_mean,
    derive_seed,
    overshoot_mean,
    overshoot_raw_moment,
    overshoot_sampler,
    tail_prob,
    tail_prob_strict,
)


class DegenerateTail(ValueError):
    """Floor-hit probability outside the range where the check is informative."""


class InvalidP(ValueError):
    """Probability outside the domain of the concentration-rate formulas."""


@dataclass(frozen=True)
class CheckComponent:
    name: str
    statistic: float
    bound: float
    slack: float
    passed: bool


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one named check; headline figures come from the worst component."""

    name: str
    mode: str  # "exact" or "statistical"
    statistic: float
    bound: float
    slack: float
    passed: bool
    components: tuple[CheckComponent, ...]
    details: dict = _field(default_factory=dict)


def _report(name: str, mode: str, components: list[CheckComponent], details: dict | None = None) -> VerificationReport:
    worst = max(components, key=lambda c: c.statistic - c.bound - c.slack)
    return VerificationReport(
        name=name,
        mode=mode,
        statistic=worst.statistic,
        bound=worst.bound,
        slack=worst.slack,
        passed=all(c.passed for c in components),
        components=tuple(components),
        details=details or {},
    )


def _mean_stderr(xs: list[float]) -> tuple[float, float]:
    n = len(xs)
    mean = sum(xs) / n
    if n < 2:
        return mean, 0.0
    var = sum((x - mean) ** 2 for x in xs) / (n - 1)
    return mean, math.sqrt(var / n)


# ---------------------------------------------------------------------------
# integer identities
# ---------------------------------------------------------------------------


def falling_factorial(x: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= x - j
    return out


def stirling_table(n_max: int) -> list[list[int]]:
    """Partition numbers S(n, k) for 0 <= k <= n <= n_max, exact integers."""
    if not 0 <= n_max <= 20:
        raise ValueError("n_max must lie in [0, 20] for exact integer arithmetic")
    table = [[1]]
    for n in range(1, n_max + 1):
        prev = table[-1]
        row = [0] * (n + 1)
        for k in range(1, n + 1):
            row[k] = k * prev[k] + prev[k - 1] if k < n else prev[k - 1]
        table.append(row)
    return table


def check_stirling_identity(n_max: int = 10, x_range: tuple[int, int] = (-5, 5)) -> VerificationReport:
    """x^n = sum_k S(n,k) * x(x-1)...(x-k+1), exactly, for integer x."""
    table = stirling_table(n_max)
    worst = 0
    checked = 0
    for n in range(n_max + 1):
        for x in range(x_range[0], x_range[1] + 1):
            lhs = x**n
            rhs = sum(table[n][k] * falling_factorial(x, k) for k in range(n + 1))
            worst = max(worst, abs(lhs - rhs))
            checked += 1
    comp = CheckComponent("power_to_falling_factorial", float(worst), 0.0, 0.0, worst == 0)
    return _report(
        "stirling_identity", "exact", [comp], {"n_max": n_max, "evaluations": checked}
    )


def binomial_factorial_moment(n: int, p: float, k: int) -> float:
    """E prod_{j<k} (Y - j) for Y ~ Binomial(n, p): prod_{j<k} (n - j) * p^k."""
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if k < 1:
        raise ValueError("k must be at least 1")
    return falling_factorial(n, k) * p**k


def _binomial_factorial_moment_by_pmf(n: int, p: float, k: int) -> float:
    return sum(
        falling_factorial(y, k) * comb(n, y) * p**y * (1.0 - p) ** (n - y)
        for y in range(n + 1)
    )


def check_binomial_factorial_moment(n: int = 10, p: float = 0.3, k: int = 3) -> VerificationReport:
    closed = binomial_factorial_moment(n, p, k)
    direct = _binomial_factorial_moment_by_pmf(n, p, k)
    gap = abs(closed - direct)
    tol = 1e-12 * max(1.0, abs(closed))
    comp = CheckComponent("closed_form_vs_pmf", gap, tol, 0.0, gap <= tol)
    return _report(
        "binomial_factorial_moment", "exact", [comp],
        {"n": n, "p": p, "k": k, "closed_form": closed, "pmf_sum": direct},
    )


# ---------------------------------------------------------------------------
# factorial-moment domination (statistical and exact)
# ---------------------------------------------------------------------------


def _floor_count_task(r: int, *, spec, d, n, m, seed, node_budget) -> int:
    field = replica_field(spec, d, seed, r)
    trunc = as_truncation(m)
    res = max_weight_path(field, n, trunc, node_budget=node_budget)
    return greedy_stats(res, field, trunc).n_below


def _floor_counts(spec, d, n, m, replicas, seed, node_budget, workers) -> list[int]:
    fn = partial(
        _floor_count_task, spec=spec, d=d, n=n, m=float(m), seed=seed, node_budget=node_budget
    )
    return ordered_map(fn, list(range(replicas)), workers=workers)


def check_factorial_moment_bound(
    spec: DistributionSpec,
    d: int,
    n: int,
    m: float,
    k: int,
    replicas: int,
    seed: int,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> VerificationReport:
    """Monte Carlo check that the k-th factorial moment of the floor-hit count
    along the canonical truncated path is dominated by the Binomial(n, p) one."""
    if k not in (1, 2, 3):
        raise ValueError("k must be 1, 2 or 3")
    p = tail_prob(spec, m)
    counts = _floor_counts(spec, d, n, m, replicas, seed, node_budget, workers)
    xs = [float(falling_factorial(c, k)) for c in counts]
    mean, stderr = _mean_stderr(xs)
    bound = binomial_factorial_moment(n, p, k)
    slack = 3.0 * stderr
    comp = CheckComponent(f"factorial_moment_k{k}", mean, bound, slack, mean <= bound + slack)
    structural = CheckComponent(
        "count_at_most_n", float(max(counts)), float(n), 0.0, max(counts) <= n
    )
    return _report(
        "factorial_moment_bound",
        "statistical",
        [comp, structural],
        {
            "replicas": replicas, "n": n, "m": m, "k": k, "tail_prob": p,
            "degenerate_tail": p in (0.0, 1.0),
        },
    )


def check_factorial_moment_bound_exact(
    q,
    m: float = 1.0,
    d: int = 2,
    n: int = 3,
    k_values: tuple[int, ...] = (1, 2),
    config_limit: int = 1 << 26,
) -> VerificationReport:
    """Exact factorial-moment domination on a fully enumerated small instance.

    Weights are two-point with the lower atom below the floor -m, hit
    independently with probability q; every one of the 2^|ball| low/high
    configurations is solved and weighted exactly (rational arithmetic).  Also
    asserts, vertex by vertex, the conditional product rule
    E[1(v on path) 1(v low)] <= E[1(v on path)] * q used in the k=1 step.
    """
    import numpy as np

    q = Fraction(q)
    if not 0 <= q <= 1:
        raise ValueError("q must lie in [0, 1]")
    if m < 0:
        raise ValueError("m must be nonnegative")
    verts = l1_ball_offsets(d, n - 1)
    nv = len(verts)
    if 1 << nv > config_limit:
        raise ResourceBound(f"2^{nv} weight configurations exceed the limit {config_limit}")
    index = {v: i for i, v in enumerate(verts)}
    paths = list(enumerate_saws(n, d))  # lexicographic order
    masks = np.array(
        [sum(1 << index[v] for v in p) for p in paths], dtype=np.uint64
    )

    # maximizing the truncated weight == minimizing the number of low vertices
    # on the path; argmin over lexicographically ordered paths realizes the
    # canonical (lex-smallest) greedy path.
    nconf = 1 << nv
    hist = np.zeros((nv + 1, n + 1), dtype=np.int64)
    hist_on_low = np.zeros((nv, nv + 1), dtype=np.int64)
    hist_on = np.zeros((nv, nv + 1), dtype=np.int64)
    chunk = 1 << 16
    for lo in range(0, nconf, chunk):
        cfg = np.arange(lo, min(lo + chunk, nconf), dtype=np.uint64)
        lows = np.bitwise_count(cfg[:, None] & masks[None, :])
        count = lows.min(axis=1).astype(np.int64)
        chosen = masks[lows.argmin(axis=1)]
        cpop = np.bitwise_count(cfg).astype(np.int64)
        np.add.at(hist, (cpop, count), 1)
        for v in range(nv):
            bit = np.uint64(1) << np.uint64(v)
            on = (chosen & bit) != 0
            low = (cfg & bit) != 0
            hist_on[v] += np.bincount(cpop[on], minlength=nv + 1)
            hist_on_low[v] += np.bincount(cpop[on & low], minlength=nv + 1)

    weight_c = [q**c * (1 - q) ** (nv - c) for c in range(nv + 1)]
    components = []
    details: dict = {"q": str(q), "n": n, "d": d, "ball_size": nv, "configs": nconf}
    for k in k_values:
        lhs = Fraction(0)
        for c in range(nv + 1):
            for cnt in range(n + 1):
                h = int(hist[c, cnt])
                if h:
                    lhs += h * falling_factorial(cnt, k) * weight_c[c]
        bound = falling_factorial(n, k) * q**k
        components.append(
            CheckComponent(f"factorial_moment_k{k}", float(lhs), float(bound), 0.0, lhs <= bound)
        )
        details[f"exact_lhs_k{k}"] = str(lhs)
        details[f"exact_bound_k{k}"] = str(bound)

    worst_gap = Fraction(-1)
    per_vertex_ok = True
    for v in range(nv):
        e_on_low = sum(int(hist_on_low[v, c]) * weight_c[c] for c in range(nv + 1))
        e_on = sum(int(hist_on[v, c]) * weight_c[c] for c in range(nv + 1))
        gap = e_on_low - q * e_on
        per_vertex_ok &= gap <= 0
        worst_gap = max(worst_gap, gap)
    components.append(
        CheckComponent("per_vertex_product_rule", float(worst_gap), 0.0, 0.0, per_vertex_ok)
    )
    return _report("factorial_moment_bound_exact", "exact", components, details)


# ---------------------------------------------------------------------------
# concentration of the floor-hit count
# ---------------------------------------------------------------------------


def concentration_rate(p: float) -> tuple[float, float]:
    """Tilt t and exponential rate c for the tail P(count >= 2pn) <= exp(-c n).

    t = ln(2(1-p)/(1-2p)),  c = 2p*t - ln((1-p)/(1-2p)); requires 0 < p < 1/2.
    """
    if not 0.0 < p < 0.5:
        raise InvalidP("concentration rate requires 0 < p < 1/2")
    t = math.log(2.0 * (1.0 - p) / (1.0 - 2.0 * p))
    c = 2.0 * p * t - math.log((1.0 - p) / (1.0 - 2.0 * p))
    return t, c


def check_concentration_rate_positive(grid_max: float = 0.4, step: float = 0.005) -> VerificationReport:
    """Scan p in (0, grid_max] and record where the exponential rate is positive."""
    ps = []
    p = step
    while p <= grid_max + 1e-12:
        ps.append(round(p, 10))
        p += step
    cs = [concentration_rate(p)[1] for p in ps]
    min_c = min(cs)
    threshold = max((p for p, c in zip(ps, cs) if c > 0.0), default=0.0)
    comp = CheckComponent("rate_positive_on_grid", -min_c, 0.0, 0.0, min_c > 0.0)
    return _report(
        "concentration_rate_positive", "exact", [comp],
        {"grid_max": grid_max, "step": step, "min_rate": min_c, "positive_up_to": threshold},
    )


def check_floor_count_concentration(
    spec: DistributionSpec,
    d: int,
    n: int,
    m: float,
    replicas: int,
    seed: int,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> VerificationReport:
    """One-sided checks of the exponential tail bound and the moment generating
    function bound for the floor-hit count along the canonical truncated path."""
    p = tail_prob(spec, m)
    if not 0.0 < p < 0.5:
        raise DegenerateTail(f"need 0 < P(X <= -m) < 1/2, got {p}")
    t, c = concentration_rate(p)
    counts = _floor_counts(spec, d, n, m, replicas, seed, node_budget, workers)
    threshold = 2.0 * p * n
    tail_ind = [1.0 if cnt >= threshold else 0.0 for cnt in counts]
    tail_mean, tail_se = _mean_stderr(tail_ind)
    tail_bound = math.exp(-c * n)
    mgf_vals = [math.exp(t * cnt) for cnt in counts]
    mgf_mean, mgf_se = _mean_stderr(mgf_vals)
    mgf_bound = ((math.exp(t) - 1.0) * p + 1.0) ** n
    components = [
        CheckComponent(
            "exponential_tail", tail_mean, tail_bound, 3.0 * tail_se,
            tail_mean <= tail_bound + 3.0 * tail_se,
        ),
        CheckComponent(
            "mgf_domination", mgf_mean, mgf_bound, 3.0 * mgf_se,
            mgf_mean <= mgf_bound + 3.0 * mgf_se,
        ),
    ]
    return _report(
        "floor_count_concentration", "statistical", components,
        {"replicas": replicas, "n": n, "m": m, "tail_prob": p, "t": t, "rate": c},
    )


# ---------------------------------------------------------------------------
# overshoot sums: fourth-moment and partial-sum bounds
# ---------------------------------------------------------------------------


def check_fourth_moment(
    spec: DistributionSpec,
    m: float,
    ell: int,
    replicas: int,
    seed: int,
) -> VerificationReport:
    """E (sum of ell centered overshoots)^4 <= 8 ell^2 E xi^4, one-sided Monte Carlo.

    When the empirical fourth moment keeps growing with the sample size the
    report flags infinite_moment instead of trusting the bound (the regime
    where the fourth-moment hypothesis fails).
    """
    if ell < 1:
        raise ValueError("ell must be at least 1")
    mean_xi = conditional_overshoot_mean(spec, m)
    draws = replicas * ell
    xs = list(itertools.islice(overshoot_sampler(spec, m, derive_seed(seed, "overshoot")), draws))

    # Empirical divergence probe: with a finite fourth moment the per-block
    # estimates concentrate; with an infinite one single draws dominate whole
    # blocks and the estimates spread over orders of magnitude.
    nblocks = min(8, draws)
    size = draws // nblocks
    blocks = sorted(
        sum(x**4 for x in xs[b * size : (b + 1) * size]) / size for b in range(nblocks)
    )
    spread = blocks[-1] / blocks[nblocks // 2] if blocks[nblocks // 2] > 0 else 1.0
    analytic_infinite = isinstance(spec, ParetoTail) and spec.sign < 0 and spec.beta <= 4.0
    diverging = spread > 50.0 or analytic_infinite
    emp4 = sum(x**4 for x in xs) / draws

    ys = []
    for b in range(replicas):
        s = sum(xs[b * ell + j] - mean_xi for j in range(ell))
        ys.append(s**4)
    stat, se = _mean_stderr(ys)
    bound = 8.0 * ell * ell * emp4
    slack = 3.0 * se
    passed = stat <= bound + slack and not diverging
    comp = CheckComponent("centered_sum_fourth_moment", stat, bound, slack, passed)
    return _report(
        "fourth_moment_bound", "statistical", [comp],
        {
            "replicas": replicas, "ell": ell, "m": m,
            "empirical_fourth_moment": emp4,
            "block_estimates": blocks,
            "block_spread": spread,
            "infinite_moment": diverging,
        },
    )


def check_fourth_moment_identity(spec: DistributionSpec | None = None, m: float = 1.0) -> VerificationReport:
    """Quadrature check of E(Y1+Y2)^4 = 2 E Y^4 + 6 (E Y^2)^2 for centered i.i.d.
    overshoots (the two-summand case of the moment expansion; the cross-term
    coefficient is 3*l*(l-1) = 6 here, not 6*l*(l-1))."""
    from scipy.integrate import dblquad, quad

    if spec is None:
        spec = Gaussian(0.0, 1.0)
    p = tail_prob(spec, m)
    mu = conditional_overshoot_mean(spec, m)

    def xi(u: float) -> float:
        return max(-m - spec.quantile(u * p), 0.0)

    ey2, _ = quad(lambda u: (xi(u) - mu) ** 2, 0.0, 1.0, limit=200)
    ey4, _ = quad(lambda u: (xi(u) - mu) ** 4, 0.0, 1.0, limit=200)
    lhs, _ = dblquad(
        lambda u, v: (xi(u) + xi(v) - 2.0 * mu) ** 4,
        0.0, 1.0, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12,
    )
    rhs = 2.0 * ey4 + 6.0 * ey2**2
    gap = abs(lhs - rhs)
    tol = 1e-9 * max(1.0, abs(rhs))
    comp = CheckComponent("two_summand_expansion", gap, tol, 0.0, gap <= tol)
    return _report(
        "fourth_moment_identity", "exact", [comp],
        {"m": m, "lhs": lhs, "rhs": rhs, "EY2": ey2, "EY4": ey4,
         "cross_term_coefficient": "3*l*(l-1)"},
    )


def check_partial_sum_bound(
    spec: DistributionSpec,
    d: int,
    n: int,
    m: float,
    replicas: int,
    seed: int,
) -> VerificationReport:
    """P(sum of floor(2pn) overshoots >= eps*n) <= 512 p^2 E xi^4 / (eps^4 n^2),
    with eps = 4 * overshoot_mean; one-sided Monte Carlo."""
    p = tail_prob(spec, m)
    if not 0.0 < p < 0.5:
        raise DegenerateTail(f"need 0 < P(X <= -m) < 1/2, got {p}")
    eps = 4.0 * overshoot_mean(spec, m)
    if eps <= 0.0:
        raise DegenerateTail("overshoot mean vanishes; the event threshold is degenerate")
    exi4 = overshoot_raw_moment(spec, m, 4)
    ell = int(2.0 * p * n)
    a = 512.0 * p * p * exi4 / eps**4
    bound = a / (n * n)
    if ell == 0:
        comp = CheckComponent("partial_sum_tail", 0.0, bound, 0.0, True)
        return _report(
            "partial_sum_bound", "statistical", [comp],
            {"replicas": 0, "n": n, "m": m, "ell": 0, "eps": eps, "a": a},
        )
    stream = overshoot_sampler(spec, m, derive_seed(seed, "partial-sum"))
    hits = []
    for _ in range(replicas):
        s = sum(itertools.islice(stream, ell))
        hits.append(1.0 if s >= eps * n else 0.0)
    stat, se = _mean_stderr(hits)
    slack = 3.0 * se
    comp = CheckComponent("partial_sum_tail", stat, bound, slack, stat <= bound + slack)
    return _report(
        "partial_sum_bound", "statistical", [comp],
        {"replicas": replicas, "n": n, "m": m, "ell": ell, "eps": eps,
         "fourth_moment": exi4, "a": a},
    )


# ---------------------------------------------------------------------------
# lower tail of the maximum weight via disjoint arm paths
# ---------------------------------------------------------------------------


def _unit(d: int, axis: int, sign: int) -> tuple[int, ...]:
    return tuple(sign if i == axis else 0 for i in range(d))


def disjoint_arm_paths(d: int, n: int) -> list[Path]:
    """2d self-avoiding paths of n vertices from the origin, pairwise sharing
    only the origin: each leaves along its own axis direction and then turns
    into its own quadrant (straight rays in d = 1)."""
    if n < 1:
        raise ValueError("path length must be at least 1")
    o = origin(d)
    arms = []
    h = (n - 1 + 1) // 2
    for axis in range(d):
        for sign in (1, -1):
            if d == 1:
                legs = [(_unit(d, axis, sign), n - 1)]
            else:
                turn_axis, turn_sign = (axis + 1, sign) if axis + 1 < d else (0, -sign)
                legs = [
                    (_unit(d, axis, sign), h),
                    (_unit(d, turn_axis, turn_sign), n - 1 - h),
                ]
            path = [o]
            cur = o
            for step, cnt in legs:
                for _ in range(cnt):
                    cur = tuple(a + b for a, b in zip(cur, step))
                    path.append(cur)
            arms.append(tuple(path))
    return arms


def _lower_tail_task(r: int, *, spec, d, n, seed, arms, node_budget) -> tuple[float, float]:
    field = replica_field(spec, d, seed, r)
    res = max_weight_path(field, n, node_budget=node_budget)
    best_arm = max(path_weight(arm, field) for arm in arms)
    return res.value, best_arm


def check_lower_tail_bound(
    spec: DistributionSpec,
    d: int,
    n: int,
    t_grid: list[float],
    replicas: int,
    seed: int,
    *,
    node_budget: int = DEFAULT_NODE_BUDGET,
    workers: int = 1,
) -> VerificationReport:
    """P(-value > t) <= n^(2d) P(X < -t/n)^(2d), one-sided per t, plus the
    per-sample structural bound value >= max over the 2d disjoint arm paths."""
    arms = disjoint_arm_paths(d, n)
    if n >= 2:
        shared = set(arms[0])
        for arm in arms[1:]:
            shared &= set(arm)
        if shared != {origin(d)}:
            raise AssertionError("arm paths must share only the origin")
    fn = partial(
        _lower_tail_task, spec=spec, d=d, n=n, seed=seed, arms=tuple(arms),
        node_budget=node_budget,
    )
    out = ordered_map(fn, list(range(replicas)), workers=workers)
    violations = sum(1 for value, best_arm in out if value < best_arm - 1e-9)
    components = [
        CheckComponent("arm_domination", float(violations), 0.0, 0.0, violations == 0)
    ]
    for t in t_grid:
        ind = [1.0 if -value > t else 0.0 for value, _ in out]
        stat, se = _mean_stderr(ind)
        bound = n ** (2 * d) * tail_prob_strict(spec, t / n) ** (2 * d)
        slack = 3.0 * se
        components.append(
            CheckComponent(f"tail_t={t:g}", stat, bound, slack, stat <= bound + slack)
        )
    return _report(
        "lower_tail_bound", "statistical", components,
        {"replicas": replicas, "n": n, "d": d, "t_grid": list(t_grid), "arms": len(arms)},
    )


# ---------------------------------------------------------------------------
# integrability of the negative tail
# ---------------------------------------------------------------------------


def negative_tail_integral(spec: DistributionSpec, d: int) -> tuple[bool, float]:
    """int_0^inf P(X < -t)^(2d) dt: (finite?, value); value is +inf when divergent."""
    k = 2 * d
    if spec.is_discrete:
        neg = sorted((-a, p) for a, p in spec.atoms() if a < 0)
        total = 0.0
        prev = 0.0
        for mag, _ in neg:
            tail = sum(p for mg, p in neg if mg >= mag)
            total += (mag - prev) * tail**k
            prev = mag
        return True, total
    if isinstance(spec, ParetoTail):
        if spec.sign > 0:
            return True, 0.0
        if k * spec.beta <= 1.0:
            return False, math.inf
        return True, spec.scale + spec.scale / (k * spec.beta - 1.0)
    if isinstance(spec, ShiftedExponential) and spec.sign < 0:
        rate = spec.rate * k
        head = max(0.0, -spec.shift)
        return True, head + math.exp(-rate * max(spec.shift, 0.0)) / rate
    from scipy.integrate import quad

    val, _ = quad(lambda t: tail_prob_strict(spec, t) ** k, 0.0, math.inf, limit=200)
    return True, val


def check_negative_tail_integrability(spec: DistributionSpec, d: int, n: int = 10) -> VerificationReport:
    """Classify the negative-tail integral as finite/infinite; when finite,
    cross-check against an independent clipped quadrature (breakpoints at the
    integrand's knots, analytic remainder beyond the clip) and report the
    implied lower bound on the mean maximum weight at length n."""
    from scipy.integrate import quad

    finite, value = negative_tail_integral(spec, d)
    details: dict = {"d": d, "finite": finite, "integral": value}
    if not finite:
        comp = CheckComponent("integral_divergent", 0.0, 0.0, 0.0, True)
        return _report("negative_tail_integrability", "exact", [comp], details)
    k = 2 * d
    upper = 1.0
    while tail_prob_strict(spec, upper) ** k > 1e-16 and upper < 2e8:
        upper *= 2.0
    breaks: set[float] = set()
    if spec.is_discrete:
        breaks = {-a for a, _ in spec.atoms() if a < 0 and -a < upper}
    elif isinstance(spec, ParetoTail) and spec.sign < 0 and spec.scale < upper:
        breaks = {spec.scale}
    elif isinstance(spec, ShiftedExponential) and spec.sign < 0 and 0.0 < -spec.shift < upper:
        breaks = {-spec.shift}
    knots = {0.0, upper} | breaks
    u = 1.0
    while u < upper:
        knots.add(u)
        u *= 10.0
    grid = sorted(knots)
    numeric = 0.0
    for a, b in zip(grid, grid[1:]):
        seg, _ = quad(lambda t: tail_prob_strict(spec, t) ** k, a, b, limit=200)
        numeric += seg
    if isinstance(spec, ParetoTail) and spec.sign < 0:
        kb = k * spec.beta
        numeric += spec.scale**kb * upper ** (1.0 - kb) / (kb - 1.0)
    gap = abs(numeric - value)
    tol = 1e-6 * (1.0 + abs(value))
    details["quadrature"] = numeric
    details["mean_value_lower_bound"] = -(float(n) ** (k + 1)) * value
    comp = CheckComponent("closed_form_vs_quadrature", gap, tol, 0.0, gap <= tol)
    return _report("negative_tail_integrability", "exact", [comp], details)

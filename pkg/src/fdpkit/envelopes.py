"""Confidence envelopes for the false discovery proportion path, and the
thresholds read off from them.

Two constructions: an asymptotic band driven by the supremum of a scaled
Brownian bridge, valid above a small-t floor; and an exact finite-sample
envelope obtained by inverting per-subset uniformity tests based on the
second-smallest p-value.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .estimation import _validated_pvalues, ecdf
from .rng import standard_normal, stream
from .stepfun import StepFunction
from .thresholds import ThresholdResult

__all__ = [
    "brownian_sup_quantile",
    "EnvelopeResult",
    "asymptotic_envelope",
    "UniformityTestResult",
    "uniformity_critical_value",
    "uniformity_test_second_order",
    "ExactConfidenceSet",
    "exact_confidence_set",
    "exact_envelope",
    "confidence_thresholds",
    "m10_envelope",
]

_W_CACHE: dict = {}
_CRIT_CACHE: dict = {}


def brownian_sup_quantile(
    alpha_half: float,
    t_floor: float,
    grid_size: int = 2048,
    reps: int = 20000,
    seed: int = 0,
) -> float:
    """Upper quantile (level 1 - alpha_half) of sup over [t_floor, 1] of
    B(t) / sqrt(t) for a Brownian bridge B, by Monte Carlo on a geometric
    grid whose last point is pinned to 1."""
    if not 0.0 < alpha_half < 1.0:
        raise ValueError("alpha_half must lie in (0, 1)")
    if not 0.0 < t_floor <= 1.0:
        raise ValueError("t_floor must lie in (0, 1]")
    if grid_size < 1:
        raise ValueError("grid_size must be at least 1")
    if reps < 10_000:
        raise ValueError("reps must be at least 10000 for a stable quantile")
    key = (float(alpha_half), float(t_floor), int(grid_size), int(reps), int(seed))
    if key in _W_CACHE:
        return _W_CACHE[key]
    grid = np.geomspace(t_floor, 1.0, grid_size)
    grid[-1] = 1.0
    dt = np.diff(np.r_[0.0, grid])
    root_dt = np.sqrt(dt)
    root_grid = np.sqrt(grid)
    stats = np.empty(reps)
    done = 0
    chunk_idx = 0
    while done < reps:
        n = min(1024, reps - done)
        rng = stream(seed, chunk_idx)
        w = np.cumsum(standard_normal(rng, (n, grid.size)) * root_dt, axis=1)
        b = w - grid * w[:, -1:]
        stats[done : done + n] = (b / root_grid).max(axis=1)
        done += n
        chunk_idx += 1
    out = float(np.quantile(stats, 1.0 - alpha_half, method="linear"))
    _W_CACHE[key] = out
    return out


@dataclass(frozen=True)
class _AsymptoticCurve:
    """The band t -> min(V(t) / Ghat(t), 1) with V(t) = (1 - a0) t
    + delta sqrt(t / m); undefined (NaN) below the floor t_min."""

    ghat: object
    one_minus_a0: float
    delta: float
    m: int
    t_min: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        v = self.one_minus_a0 * t + self.delta * np.sqrt(t / self.m)
        g = np.asarray(self.ghat(t), dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(g > 0.0, v / np.where(g > 0.0, g, 1.0), np.inf)
        out = np.minimum(out, 1.0)
        out = np.where(t < self.t_min, np.nan, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class _AsymptoticCount:
    one_minus_a0: float
    delta: float
    m: int
    t_min: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        out = self.one_minus_a0 * t + self.delta * np.sqrt(t / self.m)
        out = np.where(t < self.t_min, np.nan, out)
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class EnvelopeResult:
    """A level-(1 - level) upper confidence path for the FDP process.

    ``gamma_bar`` maps t to the bound; ``v_fn`` maps t to the matching
    per-observation bound on the fraction of false discoveries, so
    ``m * v_fn(t)`` bounds their count."""

    gamma_bar: object
    level: float
    method: str
    t_min: float | None
    v_fn: object
    meta: dict = field(default_factory=dict)

    def gamma_at(self, t):
        return self.gamma_bar(t)

    def v_at(self, t):
        return self.v_fn(t)

    def count_bound_at(self, t):
        if self.method == "exact":
            return self.meta["j_fn"](t)
        out = self.meta["m"] * np.asarray(self.v_fn(t), dtype=float)
        return out if out.ndim else float(out)


def asymptotic_envelope(
    pvalues,
    t0: float = 0.5,
    alpha: float = 0.05,
    t_min: float | None = None,
    w: float | None = None,
    *,
    enforce_floor: bool = True,
    quantile_grid_size: int = 2048,
    quantile_reps: int = 20000,
    quantile_seed: int = 0,
) -> EnvelopeResult:
    """Asymptotic FDP confidence band at level 1 - alpha on [t_min, 1].

    The half-width constant is the larger of a scaled-bridge supremum
    quantile term (weighted by the exceedance-ratio null fraction taken
    without clamping) and a distribution-free tail term; the band uses the
    plain empirical CDF.  Validity needs t_min above the small-t floor
    (log m)^4 / m; pass ``enforce_floor=False`` together with an explicit
    t_min to evaluate the band below that floor anyway.
    """
    p = _validated_pvalues(pvalues)
    if not 0.0 < t0 < 1.0:
        raise ValueError("t0 must lie in (0, 1)")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    m = p.size
    floor = np.log(m) ** 4 / m
    if enforce_floor:
        if t_min is None:
            t_min = floor
        elif t_min < floor:
            raise ValueError(
                f"t_min={t_min!r} is below the small-t floor (log m)^4 / m = {floor!r}; "
                "the asymptotic band is not valid there (pass enforce_floor=False to override)"
            )
        if t_min >= 1.0:
            raise ValueError(
                f"the small-t floor (log m)^4 / m = {floor!r} is not below 1 at m={m}, so no "
                "valid evaluation window exists; pass enforce_floor=False with an explicit t_min"
            )
    else:
        if t_min is None:
            raise ValueError("an explicit t_min is required when the floor check is disabled")
    if not 0.0 < t_min < 1.0:
        raise ValueError("t_min must lie in (0, 1)")
    ghat = ecdf(p, "plain")
    one_minus_a0 = (1.0 - float(ghat(t0))) / (1.0 - t0)
    if w is None:
        w = brownian_sup_quantile(
            alpha / 2.0, t_min, quantile_grid_size, quantile_reps, quantile_seed
        )
    tail_term = np.sqrt(2.0) / (1.0 - t0) * np.sqrt(np.log(4.0 / alpha))
    delta = max(2.0 * one_minus_a0 * float(w), float(tail_term))
    curve = _AsymptoticCurve(ghat=ghat, one_minus_a0=one_minus_a0, delta=delta, m=m, t_min=float(t_min))
    count = _AsymptoticCount(one_minus_a0=one_minus_a0, delta=delta, m=m, t_min=float(t_min))
    return EnvelopeResult(
        gamma_bar=curve,
        level=alpha,
        method="asymptotic",
        t_min=float(t_min),
        v_fn=count,
        meta={
            "m": m,
            "t0": t0,
            "one_minus_a0": one_minus_a0,
            "w": float(w),
            "delta": delta,
            "floor": float(floor),
            "pvalues": p.copy(),
        },
    )


# ---------------------------------------------------------------------------
# Exact finite-sample construction.
# ---------------------------------------------------------------------------


def uniformity_critical_value(k: int, alpha: float) -> float:
    """Critical value for the second-smallest of k uniforms: the c with
    P{second order statistic <= c} = alpha.  Sizes 0 and 1 are never
    rejected (returns -inf)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    if k <= 1:
        return -np.inf
    key = (int(k), float(alpha))
    if key in _CRIT_CACHE:
        return _CRIT_CACHE[key]

    def h(c):
        return 1.0 - (1.0 - c) ** k - k * c * (1.0 - c) ** (k - 1) - alpha

    out = float(brentq(h, 0.0, 1.0, xtol=1e-15, rtol=8.9e-16))
    _CRIT_CACHE[key] = out
    return out


@dataclass(frozen=True)
class UniformityTestResult:
    accept: bool
    statistic: float | None
    critical: float
    k: int
    alpha: float


def uniformity_test_second_order(subset_pvalues, alpha: float) -> UniformityTestResult:
    """Accept the hypothesis that the subset is uniform when its
    second-smallest value exceeds the size-k critical value; subsets of
    size at most 1 are always accepted."""
    p = np.asarray(subset_pvalues, dtype=float)
    if p.ndim != 1:
        raise ValueError("need a 1-D array of p-values")
    if p.size and (np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0)):
        raise ValueError("p-values must lie in [0, 1]")
    k = p.size
    crit = uniformity_critical_value(k, alpha)
    if k <= 1:
        return UniformityTestResult(accept=True, statistic=None, critical=crit, k=k, alpha=alpha)
    stat = float(np.sort(p)[1])
    return UniformityTestResult(
        accept=bool(stat > crit), statistic=stat, critical=crit, k=k, alpha=alpha
    )


@dataclass(frozen=True)
class ExactConfidenceSet:
    """A 1 - alpha confidence collection of candidate null label-sets,
    summarized through the per-size acceptance rule.

    ``feasible[k]`` says whether some size-k subset is accepted (the k
    largest p-values are the easiest to accept, so only they are checked);
    ``accepted_summaries`` lists those k, and ``m0_interval`` is their
    range.  ``contains(labels)`` runs the exact membership test for a full
    labeling (1 marking the alternative)."""

    pvalues: np.ndarray
    sorted_pvalues: np.ndarray
    alpha: float
    crit: np.ndarray
    feasible: np.ndarray
    accepted_summaries: tuple
    m0_interval: tuple

    def contains(self, labels) -> bool:
        lab = np.asarray(labels)
        if lab.shape != self.pvalues.shape:
            raise ValueError("labels must align with the p-values")
        if not np.all((lab == 0) | (lab == 1)):
            raise ValueError("labels must be 0 (null) or 1 (alternative)")
        nulls = self.pvalues[lab == 0]
        k = nulls.size
        if k <= 1:
            return True
        return bool(np.sort(nulls)[1] > self.crit[k])


def exact_confidence_set(pvalues, alpha: float) -> ExactConfidenceSet:
    """Build the exact confidence collection by testing, for each size k,
    the k largest p-values against the second-order-statistic rule."""
    p = _validated_pvalues(pvalues)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    m = p.size
    ps = np.sort(p)
    crit = np.full(m + 1, -np.inf)
    for k in range(2, m + 1):
        crit[k] = uniformity_critical_value(k, alpha)
    feasible = np.ones(m + 1, dtype=bool)
    ks = np.arange(2, m + 1)
    feasible[2:] = ps[m - ks + 1] > crit[2:]
    accepted = tuple(int(k) for k in np.nonzero(feasible)[0])
    return ExactConfidenceSet(
        pvalues=p.copy(),
        sorted_pvalues=ps,
        alpha=alpha,
        crit=crit,
        feasible=feasible,
        accepted_summaries=accepted,
        m0_interval=(int(accepted[0]), int(accepted[-1])),
    )


def exact_envelope(confset: ExactConfidenceSet, pvalues) -> EnvelopeResult:
    """Exact FDP envelope: at each t, the largest fraction j / R(t)
    achievable by an accepted candidate null-set placing j of its elements
    at or below t.

    A size-k candidate with j elements at or below t is accepted exactly
    when at least j - 1 of those elements exceed the size-k critical value;
    taking all m - R(t) larger p-values into the candidate makes the
    acceptance easiest, so only k = (m - R(t)) + j needs checking."""
    p = _validated_pvalues(pvalues)
    ps = np.sort(p)
    if not np.array_equal(ps, confset.sorted_pvalues):
        raise ValueError("confidence set was built from different p-values")
    m = p.size
    distinct, counts = np.unique(p, return_counts=True)
    r_at = counts.cumsum()                      # rejections at each distinct p
    n_below = np.searchsorted(ps, confset.crit, side="right")

    n = distinct.size
    js = np.arange(2, m + 1)
    r_col = r_at[:, None]
    k_idx = (m - r_col) + js[None, :]
    valid = js[None, :] <= r_col
    k_idx = np.where(valid, k_idx, m)
    ok = valid & ((r_col - n_below[k_idx]) >= (js[None, :] - 1))
    best = np.where(ok, js[None, :], 0).max(axis=1)
    j_vals = np.where(best >= 2, best, np.where(r_at >= 1, 1, 0)).astype(float)

    gamma = StepFunction.from_pairs(distinct, j_vals / r_at, value_at_zero=0.0)
    j_fn = StepFunction.from_pairs(distinct, j_vals, value_at_zero=0.0)
    v_fn = StepFunction.from_pairs(distinct, j_vals / m, value_at_zero=0.0)
    return EnvelopeResult(
        gamma_bar=gamma,
        level=confset.alpha,
        method="exact",
        t_min=float(distinct[0]) if distinct[0] > 0.0 else 0.0,
        v_fn=v_fn,
        meta={
            "m": m,
            "pvalues": p.copy(),
            "j_fn": j_fn,
            "domain": (float(distinct[0]) if distinct[0] > 0.0 else 0.0, 1.0),
        },
    )


def m10_envelope(env: EnvelopeResult, m: int):
    """Upper confidence path for the count of false discoveries among the
    p-values at or below t."""
    if m != env.meta["m"]:
        raise ValueError(f"envelope was built for m={env.meta['m']}, not m={m}")
    if env.method == "exact":
        return env.meta["j_fn"]
    return _AsymptoticCountScaled(env.v_fn, m)


@dataclass(frozen=True)
class _AsymptoticCountScaled:
    v_fn: object
    m: int

    def __call__(self, t):
        out = self.m * np.asarray(self.v_fn(t), dtype=float)
        return out if out.ndim else float(out)


def confidence_thresholds(env: EnvelopeResult, c: float | None = None) -> ThresholdResult:
    """Thresholds read off an FDP envelope.

    With ``c`` given: the largest t in the envelope's domain where the
    bound stays at or below c (0 when there is none), a rate-ceiling rule.
    With ``c=None``: the minimum of the bound and the largest t attaining
    it, the rule that rejects as much as possible at the best achievable
    rate.  ``inclusive=False`` marks a supremum approached from the left
    but not attained, in which case ``rejected`` counts p-values strictly
    below t."""
    if env.method == "exact":
        return _exact_thresholds(env, c)
    if env.method == "asymptotic":
        return _asymptotic_thresholds(env, c)
    raise ValueError(f"unknown envelope method: {env.method!r}")


def _threshold_result(env, t, z, inclusive, c) -> ThresholdResult:
    p = env.meta["pvalues"]
    rejected = int(np.count_nonzero(p <= t if inclusive else p < t))
    return ThresholdResult(
        t=float(t),
        rejected=rejected,
        method="rate-ceiling" if c is not None else "min-rate",
        alpha=env.level,
        z=float(z),
        inclusive=bool(inclusive),
        diagnostics={"envelope": env.method},
    )


def _exact_thresholds(env: EnvelopeResult, c: float | None) -> ThresholdResult:
    sf: StepFunction = env.gamma_bar
    knots = sf.knots
    vals = sf.values
    n = knots.size
    lo = env.meta["domain"][0]
    idx = [i for i in range(n) if (knots[i + 1] if i + 1 < n else 1.0) > lo and knots[i] >= lo]
    # pieces fully inside the domain [lo, 1]; the first distinct p-value
    # starts the domain, so piece i covers [knots[i], next) with value vals[i]
    if not idx:
        idx = [n - 1]
    if c is None:
        z = min(vals[i] for i in idx)
        last = max(i for i in idx if vals[i] == z)
        if last == n - 1:
            return _threshold_result(env, 1.0, z, True, c)
        return _threshold_result(env, knots[last + 1], z, False, c)
    for i in reversed(idx):
        if vals[i] <= c:
            if i == n - 1:
                return _threshold_result(env, 1.0, c, True, c)
            return _threshold_result(env, knots[i + 1], c, False, c)
    return _threshold_result(env, 0.0, c, True, c)


def _asymptotic_thresholds(env: EnvelopeResult, c: float | None) -> ThresholdResult:
    curve: _AsymptoticCurve = env.gamma_bar
    ghat = curve.ghat
    knots = ghat.base.knots
    gvals = ghat.base.values
    t_min = env.t_min
    one_m = curve.one_minus_a0
    delta = curve.delta
    root_m = np.sqrt(curve.m)

    # pieces of Ghat clipped to [t_min, 1]
    pieces = []
    for i in range(knots.size):
        s = knots[i]
        e = knots[i + 1] if i + 1 < knots.size else 1.0
        s_eff = max(s, t_min)
        if i + 1 == knots.size:
            e = 1.0
        if s_eff < e or (i + 1 == knots.size and s_eff <= 1.0):
            pieces.append((s_eff, e, gvals[i], i + 1 == knots.size))

    if c is None:
        cand_t = np.array([s for s, _, _, _ in pieces])
        cand_v = np.array([float(curve(s)) for s, _, _, _ in pieces])
        z = cand_v.min()
        t = cand_t[np.nonzero(cand_v == z)[0][-1]]
        return _threshold_result(env, t, z, True, c)

    for s, e, v, is_last in reversed(pieces):
        if v <= 0.0:
            continue
        if float(curve(s)) > c:
            continue
        # solve (1 - a0) t + delta sqrt(t / m) = c v for the crossing
        target = c * v
        if one_m > 0.0:
            b = delta / root_m
            y = (-b + np.sqrt(b * b + 4.0 * one_m * target)) / (2.0 * one_m)
            tstar = y * y
        elif delta > 0.0:
            tstar = (target * root_m / delta) ** 2
        else:
            tstar = np.inf
        if is_last:
            if tstar >= 1.0:
                return _threshold_result(env, 1.0, c, True, c)
            return _threshold_result(env, max(tstar, s), c, True, c)
        if tstar >= e:
            return _threshold_result(env, e, c, False, c)
        return _threshold_result(env, max(tstar, s), c, True, c)
    return _threshold_result(env, 0.0, c, True, c)

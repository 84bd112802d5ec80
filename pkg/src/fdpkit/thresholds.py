"""Rejection-threshold procedures: classical single-step and step-up rules,
the known-model oracle, plug-in rules built on estimated quantities, and the
asymptotic rate-ceiling rule for a known mixture.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import ndtri

from .estimation import NullFractionEstimate, _validated_pvalues, ecdf, kernel_density
from .kernels import KernelSpec, eval_kernel
from .model import MixtureModel, q_inverse, q_map

__all__ = [
    "ThresholdResult",
    "simple_thresholds",
    "bh_threshold",
    "oracle_threshold",
    "plugin_threshold",
    "bayes_classifier_threshold",
    "rate_ceiling_known_a",
]


@dataclass(frozen=True)
class ThresholdResult:
    """A rejection rule: reject p-values up to ``t`` (strictly below ``t``
    when ``inclusive`` is False).  ``rejected`` is None for population-level
    rules that never saw data; ``z`` carries the rate value attached to the
    rule when there is one."""

    t: float
    rejected: int | None
    method: str
    alpha: float | None = None
    z: float | None = None
    inclusive: bool = True
    diagnostics: dict = field(default_factory=dict)


def _count_rejected(p: np.ndarray, t: float, inclusive: bool = True) -> int:
    return int(np.count_nonzero(p <= t if inclusive else p < t))


def simple_thresholds(
    pvalues,
    alpha: float | None = None,
    kind: str = "uncorrected",
    *,
    t: float | None = None,
    r: int | None = None,
) -> ThresholdResult:
    """Single-step rules: ``uncorrected`` rejects below alpha, ``bonferroni``
    below alpha / m, ``fixed`` below a user threshold, ``first-r`` rejects
    the r smallest."""
    p = _validated_pvalues(pvalues)
    m = p.size
    kind = kind.replace("_", "-")
    if kind in ("uncorrected", "bonferroni"):
        if alpha is None or not 0.0 < alpha < 1.0:
            raise ValueError("alpha in (0, 1) required")
        thr = alpha if kind == "uncorrected" else alpha / m
    elif kind == "fixed":
        if t is None or not 0.0 <= t <= 1.0:
            raise ValueError("fixed rule needs t in [0, 1]")
        thr = float(t)
    elif kind == "first-r":
        if r is None or not 0 <= r <= m:
            raise ValueError("first-r rule needs r in {0, ..., m}")
        thr = 0.0 if r == 0 else float(np.sort(p)[r - 1])
    else:
        raise ValueError(f"unknown rule kind: {kind!r}")
    return ThresholdResult(
        t=float(thr),
        rejected=_count_rejected(p, thr),
        method=kind,
        alpha=alpha,
    )


def bh_threshold(pvalues, alpha: float) -> ThresholdResult:
    """Step-up rule: reject the i* smallest with
    i* = max{i : p_(i) <= alpha i / m}, none when the set is empty."""
    p = _validated_pvalues(pvalues)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    m = p.size
    ps = np.sort(p)
    ok = np.nonzero(ps <= alpha * np.arange(1, m + 1) / m)[0]
    if ok.size == 0:
        return ThresholdResult(t=0.0, rejected=0, method="bh", alpha=alpha)
    istar = int(ok[-1]) + 1
    return ThresholdResult(t=float(ps[istar - 1]), rejected=istar, method="bh", alpha=alpha)


def oracle_threshold(model: MixtureModel, alpha: float) -> ThresholdResult:
    """Largest t whose population positive-FDR value stays at or below
    alpha.  For concave mixtures the map is nondecreasing, so bisection
    localizes the supremum to machine precision."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    q = q_map(model)
    if q(1.0) <= alpha:
        t = 1.0
    else:
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if q(mid) <= alpha:
                lo = mid
            else:
                hi = mid
        t = lo
    return ThresholdResult(
        t=float(t),
        rejected=None,
        method="oracle",
        alpha=alpha,
        diagnostics={"q_at_t": float(q(t))},
    )


def _ahat_value(ahat) -> tuple[float, str | None]:
    if isinstance(ahat, NullFractionEstimate):
        return float(ahat.value), ahat.method
    return float(ahat), None


def plugin_threshold(pvalues, ahat, alpha: float, variant: str = "plain") -> ThresholdResult:
    """Plug-in rule: the largest candidate t in {0} U {p-values} U {1} with
    estimated positive-FDR value (1 - ahat) t / Ghat(t) at or below alpha.

    With the concave-majorant variant the estimated map is monotone and the
    exact supremum over [0, 1] is solvable segment by segment, so that exact
    point is returned instead.  For the step variants the exact supremum
    (which can exceed the largest feasible candidate, since the map restarts
    rising inside each flat stretch of Ghat) is reported in
    ``diagnostics["sup_exact"]``.
    """
    p = _validated_pvalues(pvalues)
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    a, a_method = _ahat_value(ahat)
    if not 0.0 <= a <= 1.0:
        raise ValueError("ahat must lie in [0, 1]")
    diag = {"ahat": a, "variant": variant}
    if a_method is not None:
        diag["ahat_method"] = a_method
    if a == 1.0:
        diag["sup_exact"] = 1.0
        return ThresholdResult(
            t=1.0, rejected=p.size, method="plugin", alpha=alpha, diagnostics=diag
        )
    ghat = ecdf(p, variant)
    one_minus = 1.0 - a

    if ghat.variant == "lcm":
        t = _lcm_sup(ghat, one_minus, alpha)
        diag["sup_exact"] = t
        return ThresholdResult(
            t=t, rejected=_count_rejected(p, t), method="plugin", alpha=alpha, diagnostics=diag
        )

    cand = np.unique(np.r_[0.0, p, 1.0])
    g = np.asarray(ghat(cand), dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        qv = np.where(g > 0.0, one_minus * cand / np.where(g > 0, g, 1.0), np.inf)
    qv[cand == 0.0] = 0.0
    t = float(cand[qv <= alpha].max())
    diag["sup_exact"] = _step_sup(ghat, one_minus, alpha)
    return ThresholdResult(
        t=t, rejected=_count_rejected(p, t), method="plugin", alpha=alpha, diagnostics=diag
    )


def _step_sup(ghat, one_minus: float, alpha: float) -> float:
    """Exact sup{t : (1 - ahat) t / Ghat(t) <= alpha} for the step variants."""
    if one_minus <= alpha:            # the map tops out at one_minus
        return 1.0
    knots = ghat.base.knots
    vals = ghat.base.values
    best = 0.0
    for j in range(knots.size):
        x = knots[j]
        e = knots[j + 1] if j + 1 < knots.size else 1.0
        v = vals[j]
        if ghat.variant == "floor":
            v_eff = max(v, x)         # rising part uses the step value only up to t = v
            if v_eff <= 0.0:
                continue
            cross = alpha * max(v, x) / one_minus
            hi = min(e, max(v, x), cross) if v > x else min(e, cross)
            if hi >= x:
                best = max(best, hi)
            continue
        if v <= 0.0:
            continue
        cross = alpha * v / one_minus
        if cross >= x:
            best = max(best, min(e, cross))
    return float(best)


def _lcm_sup(ghat, one_minus: float, alpha: float) -> float:
    """Exact sup along the concave majorant, scanned right to left."""
    if one_minus <= alpha:
        return 1.0
    xs = ghat.hull.x
    ys = ghat.hull.y
    for i in range(xs.size - 2, -1, -1):
        x0, x1 = xs[i], xs[i + 1]
        y0, y1 = ys[i], ys[i + 1]
        s = (y1 - y0) / (x1 - x0)
        c = y0 - s * x0
        den = one_minus - alpha * s
        if den <= 0.0:
            return float(x1)          # feasible on the whole segment
        tstar = alpha * c / den
        if tstar >= x1:
            return float(x1)
        if tstar >= x0:
            return float(tstar)
    return 0.0


def bayes_classifier_threshold(pvalues, bandwidth: float | None = None) -> ThresholdResult:
    """Reject where the estimated marginal density exceeds 1 — the sample
    analogue of the optimal-classification region; the threshold is the
    largest density-grid point in that region (0 when it is empty)."""
    p = _validated_pvalues(pvalues)
    h = float(bandwidth) if bandwidth is not None else p.size ** (-0.2)
    grid, dens = kernel_density(p, h)
    above = dens > 1.0
    t = float(grid[above].max()) if np.any(above) else 0.0
    return ThresholdResult(
        t=t,
        rejected=_count_rejected(p, t),
        method="bayes-classifier",
        diagnostics={"bandwidth": h, "density_max": float(dens.max())},
    )


def rate_ceiling_known_a(model: MixtureModel, m: int, c: float, alpha: float) -> ThresholdResult:
    """Threshold keeping the realized false discovery proportion at or below
    c with probability about 1 - alpha, for a known mixture at sample size m.

    Starts from the population point t_c where the positive-FDR map hits c
    and backs off by a normal quantile of the rejection-balance fluctuation
    scaled by the slope of its mean."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0.0 < c < 1.0:
        raise ValueError("c must lie in (0, 1)")
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    a = model.a
    t_c = 1.0 if c >= 1.0 - a else q_inverse(model, c)
    slope = (1.0 - a) - c * float(model.pdf(t_c))
    if slope <= 0.0:
        raise ValueError("expected rejection balance is not strictly decreasing at the target")
    k = eval_kernel(KernelSpec("rejection-balance", model, c=c), t_c, t_c)
    sd = float(np.sqrt(max(k, 0.0)))
    t = max(0.0, t_c - float(ndtri(1.0 - alpha)) * sd / (slope * np.sqrt(m)))
    return ThresholdResult(
        t=float(t),
        rejected=None,
        method="rate-ceiling-known-a",
        alpha=alpha,
        z=float(c),
        diagnostics={"t_c": float(t_c), "sd": sd, "slope": float(slope)},
    )

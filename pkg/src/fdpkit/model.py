"""Two-groups mixture model, classification counts, and the false
discovery / false nondiscovery proportion processes with their population
analogues.

Conventions used throughout the package:

* labels code alternatives as 1 and true nulls as 0;
* all processes of a threshold ``t`` reject exactly the p-values ``<= t``
  and are right-continuous step functions;
* the false discovery proportion is defined as 0 when nothing is rejected,
  and the false nondiscovery proportion as 0 when everything is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .families import AlternativeFamily
from .stepfun import StepFunction

__all__ = [
    "MixtureModel",
    "LabeledSample",
    "CountsTable",
    "classify",
    "fdp_process",
    "fnp_process",
    "q_map",
    "qtilde_map",
    "expected_fdp_fnp",
    "q_inverse",
    "q_derivative",
]


@dataclass(frozen=True)
class MixtureModel:
    """Marginal p-value law ``G = (1-a) * Uniform + a * F``.

    Parameters
    ----------
    a : float
        Probability that a hypothesis is a true signal (label 1); the
        marginal mixing weight of the alternative component.
    F : AlternativeFamily or None
        Alternative p-value distribution; may be None only when ``a == 0``.
    """

    a: float
    F: AlternativeFamily | None = None

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError("mixing weight a must lie in [0, 1]")
        if self.F is None and self.a > 0.0:
            raise ValueError("an alternative family is required when a > 0")

    def cdf(self, t):
        """Marginal CDF G(t)."""
        t = np.asarray(t, dtype=float)
        alt = self.F.cdf(t) if self.a > 0.0 else 0.0
        out = (1.0 - self.a) * t + self.a * alt
        return out if out.ndim else float(out)

    def pdf(self, t):
        """Marginal density g(t) = (1-a) + a f(t); requires the family density."""
        if self.a == 0.0:
            t = np.asarray(t, dtype=float)
            out = np.ones_like(t)
            return out if out.ndim else 1.0
        if self.F.pdf is None:
            raise ValueError("alternative family has no density")
        t = np.asarray(t, dtype=float)
        out = (1.0 - self.a) + self.a * np.asarray(self.F.pdf(t), dtype=float)
        return out if out.ndim else float(out)

    @property
    def has_density(self) -> bool:
        return self.a == 0.0 or self.F.pdf is not None


@dataclass(frozen=True)
class LabeledSample:
    """P-values with simulation-only hypothesis labels (1 = alternative)."""

    pvalues: np.ndarray
    labels: np.ndarray | None = None

    def __post_init__(self):
        p = np.asarray(self.pvalues, dtype=float)
        if p.ndim != 1 or p.size == 0:
            raise ValueError("pvalues must be a nonempty 1-D array")
        if np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
            raise ValueError("pvalues must lie in [0, 1]")
        object.__setattr__(self, "pvalues", p)
        if self.labels is not None:
            h = np.asarray(self.labels)
            if h.shape != p.shape or not np.isin(h, (0, 1)).all():
                raise ValueError("labels must be 0/1 and aligned with pvalues")
            object.__setattr__(self, "labels", h.astype(np.int8))

    @property
    def m(self) -> int:
        return self.pvalues.size

    def sorted_pvalues(self) -> np.ndarray:
        return np.sort(self.pvalues, kind="stable")

    def _require_labels(self) -> np.ndarray:
        if self.labels is None:
            raise ValueError("operation requires hypothesis labels")
        return self.labels


@dataclass(frozen=True)
class CountsTable:
    """2x2 rejection-by-label counts at a fixed threshold.

    ``mXY`` counts hypotheses with rejection indicator X (1 = rejected) and
    label Y (0 = null, 1 = alternative); ``r = m10 + m11`` rejections.
    """

    m00: int
    m10: int
    m01: int
    m11: int
    r: int = field(default=-1)

    def __post_init__(self):
        if self.r == -1:
            object.__setattr__(self, "r", self.m10 + self.m11)
        if min(self.m00, self.m10, self.m01, self.m11) < 0:
            raise ValueError("counts must be nonnegative")
        if self.r != self.m10 + self.m11:
            raise ValueError("r must equal m10 + m11")

    @property
    def m(self) -> int:
        return self.m00 + self.m10 + self.m01 + self.m11


def classify(sample: LabeledSample, t: float) -> CountsTable:
    """Cross-tabulate rejection (p <= t) against the true labels."""
    h = sample._require_labels()
    if not 0.0 <= t <= 1.0:
        raise ValueError("threshold must lie in [0, 1]")
    rej = sample.pvalues <= t
    alt = h == 1
    return CountsTable(
        m00=int(np.sum(~rej & ~alt)),
        m10=int(np.sum(rej & ~alt)),
        m01=int(np.sum(~rej & alt)),
        m11=int(np.sum(rej & alt)),
    )


def _distinct_sorted(sample: LabeledSample):
    """Distinct p-values with cumulative total/null/alternative counts."""
    h = sample._require_labels()
    distinct, inverse = np.unique(sample.pvalues, return_inverse=True)
    total = np.bincount(inverse, minlength=distinct.size).cumsum()
    nulls = np.bincount(inverse, weights=(h == 0).astype(float), minlength=distinct.size).cumsum()
    alts = total - nulls
    return distinct, total, nulls, alts


def fdp_process(sample: LabeledSample) -> StepFunction:
    """False discovery proportion path t -> (# nulls rejected) / (# rejected).

    Right-continuous, piecewise constant with breakpoints exactly at the
    distinct p-values; 0 before the first p-value (nothing rejected).
    """
    distinct, total, nulls, _ = _distinct_sorted(sample)
    vals = nulls / total
    return StepFunction.from_pairs(distinct, vals, value_at_zero=0.0)


def fnp_process(sample: LabeledSample) -> StepFunction:
    """False nondiscovery proportion path t -> (# alternatives not rejected)
    / (# not rejected); 0 once everything is rejected."""
    distinct, total, nulls, alts = _distinct_sorted(sample)
    m = sample.m
    m1 = alts[-1]
    above = m - total            # count strictly above each distinct p
    alts_above = m1 - alts
    vals = np.where(above > 0, alts_above / np.maximum(above, 1), 0.0)
    return StepFunction.from_pairs(distinct, vals, value_at_zero=m1 / m)


def q_map(model: MixtureModel):
    """Population positive false discovery rate t -> (1-a) t / G(t), with 0 at t=0."""

    def q(t):
        t = np.asarray(t, dtype=float)
        g = model.cdf(t)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(t > 0.0, (1.0 - model.a) * t / np.where(g > 0, g, 1.0), 0.0)
        return out if out.ndim else float(out)

    return q


def qtilde_map(model: MixtureModel):
    """Population false nondiscovery analogue t -> a (1 - F(t)) / (1 - G(t))."""

    def qtilde(t):
        t = np.asarray(t, dtype=float)
        g = model.cdf(t)
        if np.any(g >= 1.0):
            raise ValueError("undefined where G(t) = 1")
        fa = model.F.cdf(t) if model.a > 0.0 else 0.0
        out = model.a * (1.0 - fa) / (1.0 - g)
        out = np.asarray(out)
        return out if out.ndim else float(out)

    return qtilde


def expected_fdp_fnp(model: MixtureModel, m: int, t: float) -> tuple[float, float]:
    """Exact means of the two proportion processes at a fixed threshold.

    Mean FDP = Q(t) (1 - (1-G(t))^m); mean FNP = Qtilde(t) (1 - G(t)^m).
    The second factor in each is the probability the denominator count is
    positive.  At G(t) = 1 the FNP mean is 0 (no non-rejections possible).
    """
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0.0 < t < 1.0:
        raise ValueError("t must lie in (0, 1)")
    g = model.cdf(t)
    efdp = q_map(model)(t) * (1.0 - (1.0 - g) ** m)
    if g >= 1.0:
        efnp = 0.0
    else:
        efnp = qtilde_map(model)(t) * (1.0 - g**m)
    return float(efdp), float(efnp)


def q_derivative(model: MixtureModel, t):
    """Derivative of the population ratio Q: (1-a)(G(t) - t g(t)) / G(t)^2."""
    t = np.asarray(t, dtype=float)
    g = model.cdf(t)
    gd = model.pdf(t)
    out = (1.0 - model.a) * (g - t * gd) / g**2
    return out if out.ndim else float(out)


def q_inverse(model: MixtureModel, u: float, *, tol=1e-12) -> float:
    """Inverse of Q by monotone bisection (valid for concave G, where Q is
    nondecreasing).  Requires 0 < u <= Q(1) = 1 - a."""
    if not 0.0 < u <= 1.0 - model.a:
        raise ValueError("u outside the range of the population ratio")
    q = q_map(model)
    lo, hi = 0.0, 1.0
    # invariant: Q(lo) <= u, and either hi == 1 with Q(1) >= u or Q(hi) > u
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if q(mid) <= u:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)

"""Alternative p-value distributions for the two-groups mixture.

Every family exposes the CDF on [0, 1]; density and quantile function are
optional in general (operations that need them fail fast when absent), but
all built-in families provide the full triple.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr, ndtri

__all__ = [
    "AlternativeFamily",
    "OneSidedNormal",
    "TwoSidedNormal",
    "BetaPower",
    "UserCdf",
    "make_family",
]


def _bisect_increasing(fn, target, lo=0.0, hi=1.0, iters=90):
    """Invert a vectorized nondecreasing fn on [lo, hi] by bisection."""
    target = np.asarray(target, dtype=float)
    lo = np.full(target.shape, lo, dtype=float)
    hi = np.full(target.shape, hi, dtype=float)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        below = fn(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    out = 0.5 * (lo + hi)
    return out if out.ndim else float(out)


class AlternativeFamily:
    """Interface: ``cdf`` required; ``pdf``/``ppf`` optional (may be None)."""

    name = "base"
    params: dict = {}

    def cdf(self, t):
        raise NotImplementedError

    pdf = None
    ppf = None

    def __repr__(self):
        inner = ", ".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{type(self).__name__}({inner})"


class OneSidedNormal(AlternativeFamily):
    """P-values of a one-sided normal-mean test with standardized shift
    ``sqrt(n) * theta``.

    CDF ``F(t) = ndtr(mu + ndtri(t))`` with ``mu = sqrt(n) * theta``; this is
    the exceedance probability of a unit-variance normal shifted by ``mu``.
    The density ``exp(-mu * ndtri(t) - mu^2 / 2)`` is strictly decreasing, so
    the family is pure: its density tends to 0 at t = 1.
    """

    name = "one-sided-normal"

    def __init__(self, theta: float, n: int = 1):
        if theta < 0 or n < 1:
            raise ValueError("need theta >= 0 and n >= 1")
        self.theta = float(theta)
        self.n = int(n)
        self.mu = np.sqrt(self.n) * self.theta
        self.params = {"theta": self.theta, "n": self.n}

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        out = np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, ndtr(self.mu + ndtri(np.clip(t, 1e-320, 1.0)))))
        return out if out.ndim else float(out)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        out = np.exp(-self.mu * ndtri(t) - 0.5 * self.mu**2)
        return out if out.ndim else float(out)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        out = ndtr(ndtri(u) - self.mu)
        return out if out.ndim else float(out)


class TwoSidedNormal(AlternativeFamily):
    """P-values of a two-sided normal-mean test with shift ``sqrt(n) * theta``.

    Density ``exp(-mu^2/2) * cosh(mu * c)`` at ``c = ndtri(1 - p/2)``; its
    infimum over (0, 1] is ``exp(-mu^2/2) > 0``, so the family is impure and
    the mixture weight is only partially identifiable.
    """

    name = "two-sided-normal"

    def __init__(self, theta: float, n: int = 1):
        if theta < 0 or n < 1:
            raise ValueError("need theta >= 0 and n >= 1")
        self.theta = float(theta)
        self.n = int(n)
        self.mu = np.sqrt(self.n) * self.theta
        self.params = {"theta": self.theta, "n": self.n}

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        tc = np.clip(t, 1e-320, 1.0)
        c = ndtri(1.0 - tc / 2.0)
        out = ndtr(self.mu - c) + ndtr(-c - self.mu)
        out = np.where(t <= 0.0, 0.0, np.where(t >= 1.0, 1.0, out))
        return out if out.ndim else float(out)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        c = ndtri(1.0 - t / 2.0)
        out = np.exp(-0.5 * self.mu**2) * np.cosh(self.mu * c)
        return out if out.ndim else float(out)

    def ppf(self, u):
        return _bisect_increasing(self.cdf, u)


class BetaPower(AlternativeFamily):
    """Power-law alternative ``F(t) = t**beta`` with ``0 < beta <= 1``.

    ``beta = 0.5`` is the square-root family used in worked examples; its
    density ``beta * t**(beta-1)`` decreases to ``beta`` at t = 1.
    """

    name = "beta"

    def __init__(self, beta: float):
        if not 0.0 < beta <= 1.0:
            raise ValueError("need 0 < beta <= 1 so that F dominates the uniform")
        self.beta = float(beta)
        self.params = {"beta": self.beta}

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        out = t**self.beta
        return out if out.ndim else float(out)

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):  # density diverges at 0 for beta < 1
            out = self.beta * t ** (self.beta - 1.0)
        return out if out.ndim else float(out)

    def ppf(self, u):
        u = np.asarray(u, dtype=float)
        out = u ** (1.0 / self.beta)
        return out if out.ndim else float(out)


class UserCdf(AlternativeFamily):
    """Wrap a user-supplied CDF (plus optional density/quantile callables)."""

    name = "user-cdf"

    def __init__(self, cdf, pdf=None, ppf=None):
        self._cdf = cdf
        self._pdf = pdf
        self._ppf = ppf
        self.params = {}

    def cdf(self, t):
        return self._cdf(t)

    @property
    def pdf(self):
        return self._pdf

    @property
    def ppf(self):
        if self._ppf is not None:
            return self._ppf
        return lambda u: _bisect_increasing(self._cdf, u)


def make_family(name: str, params: dict | None = None) -> AlternativeFamily:
    """Construct a family from its config tag.

    Tags: ``one-sided-normal`` (theta, n), ``two-sided-normal`` (theta, n),
    ``beta`` (beta), ``square-root`` (no parameters), ``user-cdf`` (callables,
    not expressible in config files).
    """
    params = dict(params or {})
    if name == "one-sided-normal":
        return OneSidedNormal(params.pop("theta"), params.pop("n", 1))
    if name == "two-sided-normal":
        return TwoSidedNormal(params.pop("theta"), params.pop("n", 1))
    if name == "beta":
        return BetaPower(params.pop("beta"))
    if name == "square-root":
        return BetaPower(0.5)
    if name == "user-cdf":
        return UserCdf(params.pop("cdf"), params.pop("pdf", None), params.pop("ppf", None))
    raise ValueError(f"unknown alternative family: {name!r}")

"""Estimators for the marginal p-value CDF, the null/alternative mixing
weight, and the alternative CDF.

The mixing-weight estimators come in three flavours: the exceedance ratio at
a fixed cut point, a uniform-confidence lower bound built from the empirical
CDF band, and a kernel-density plug-in for the identifiable floor.  The
alternative CDF is recovered by a sup-norm projection of the de-uniformed
empirical CDF onto the set of CDFs supported on the observed p-value grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .stepfun import PiecewiseLinear, StepFunction

__all__ = [
    "EcdfEstimate",
    "NullFractionEstimate",
    "QHat",
    "ecdf",
    "dkw_epsilon",
    "storey_a0",
    "astar_lower",
    "kernel_density",
    "kernel_a_consistent",
    "q_hat",
    "project_f",
    "projection_objective",
]

_VARIANTS = {
    "plain": "plain",
    "floor": "floor",
    "floor-at-identity": "floor",
    "lcm": "lcm",
    "least-concave-majorant": "lcm",
}


def _normalize_variant(variant: str) -> str:
    try:
        return _VARIANTS[variant]
    except KeyError:
        raise ValueError(f"unknown ECDF variant: {variant!r}") from None


def _validated_pvalues(pvalues) -> np.ndarray:
    p = np.asarray(pvalues, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("need a nonempty 1-D array of p-values")
    if np.any(~np.isfinite(p)) or np.any(p < 0.0) or np.any(p > 1.0):
        raise ValueError("p-values must lie in [0, 1]")
    return p


@dataclass(frozen=True, eq=False)
class EcdfEstimate:
    """Empirical CDF with an optional correction.

    Variants: ``plain`` is the raw empirical CDF; ``floor`` takes the
    pointwise maximum with the identity (the marginal CDF always dominates
    the uniform); ``lcm`` is the least concave majorant — the smallest
    concave CDF lying above the empirical one.
    """

    base: StepFunction
    variant: str
    m: int
    hull: PiecewiseLinear | None = None

    def __call__(self, t):
        if self.variant == "plain":
            return self.base(t)
        if self.variant == "floor":
            out = np.maximum(self.base(t), np.asarray(t, dtype=float))
            return out if out.ndim else float(out)
        return self.hull(t)

    def left(self, t):
        """Left limit; coincides with the value for the continuous majorant."""
        if self.variant == "plain":
            return self.base.left(t)
        if self.variant == "floor":
            out = np.maximum(self.base.left(t), np.asarray(t, dtype=float))
            return out if out.ndim else float(out)
        return self.hull(t)


def _concave_majorant(xs: np.ndarray, ys: np.ndarray) -> PiecewiseLinear:
    """Upper concave hull of the graph points, scanned left to right."""
    hx, hy = [], []
    for x, y in zip(xs, ys):
        while len(hx) >= 2:
            cross = (hx[-1] - hx[-2]) * (y - hy[-2]) - (hy[-1] - hy[-2]) * (x - hx[-2])
            if cross >= 0.0:
                hx.pop()
                hy.pop()
            else:
                break
        hx.append(x)
        hy.append(y)
    return PiecewiseLinear(np.array(hx), np.array(hy))


def ecdf(pvalues, variant: str = "plain") -> EcdfEstimate:
    """Empirical CDF of the p-values in the requested variant."""
    p = _validated_pvalues(pvalues)
    variant = _normalize_variant(variant)
    m = p.size
    distinct, counts = np.unique(p, return_counts=True)
    vals = counts.cumsum() / m
    base = StepFunction.from_pairs(distinct, vals, value_at_zero=0.0)
    hull = None
    if variant == "lcm":
        xs = distinct
        ys = vals
        if xs[0] != 0.0:
            xs = np.r_[0.0, xs]
            ys = np.r_[0.0, ys]
        if xs[-1] != 1.0:
            xs = np.r_[xs, 1.0]
            ys = np.r_[ys, 1.0]
        else:
            ys = ys.copy()
            ys[-1] = 1.0
        hull = _concave_majorant(xs, ys)
    return EcdfEstimate(base=base, variant=variant, m=m, hull=hull)


def dkw_epsilon(m: int, alpha: float) -> float:
    """Half-width of the uniform empirical-CDF confidence band,
    sqrt(log(2/alpha) / (2 m))."""
    if m < 1:
        raise ValueError("m must be at least 1")
    if not 0.0 < alpha <= 2.0:
        raise ValueError("alpha must lie in (0, 2]")
    return float(np.sqrt(np.log(2.0 / alpha) / (2.0 * m)))


@dataclass(frozen=True)
class NullFractionEstimate:
    """An estimate of the alternative mixing weight (or a lower bound on it)."""

    value: float
    method: str
    t0: float | None = None
    bandwidth: float | None = None
    alpha: float | None = None
    diagnostics: dict = field(default_factory=dict)


def storey_a0(pvalues, t0: float = 0.5) -> NullFractionEstimate:
    """Exceedance-ratio estimate: positive part of
    (Ghat(t0) - t0) / (1 - t0)."""
    p = _validated_pvalues(pvalues)
    if not 0.0 < t0 < 1.0:
        raise ValueError("t0 must lie in (0, 1)")
    ghat_t0 = np.count_nonzero(p <= t0) / p.size
    raw = (ghat_t0 - t0) / (1.0 - t0)
    return NullFractionEstimate(
        value=max(0.0, float(raw)),
        method="storey",
        t0=t0,
        diagnostics={"raw": float(raw), "ghat_t0": float(ghat_t0)},
    )


def astar_lower(ghat: EcdfEstimate, alpha: float) -> NullFractionEstimate:
    """Uniform-confidence lower bound for the mixing weight:
    max over t of (Ghat(t) - t - eps_m(alpha)) / (1 - t), clamped at 0.

    The objective is piecewise monotone between breakpoints, so the exact
    supremum over [0, 1) is attained on the finite candidate set of
    breakpoints evaluated from both sides.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    eps = dkw_epsilon(ghat.m, alpha)
    ts = ghat.base.knots
    if ghat.variant == "lcm":
        ts = np.union1d(ts, ghat.hull.x)
    ts = ts[ts < 1.0]
    cand_t = np.concatenate([ts, ts])
    cand_v = np.concatenate([ghat(ts), ghat.left(ts)])
    phi = (cand_v - cand_t - eps) / (1.0 - cand_t)
    best = int(np.argmax(phi))
    value = max(0.0, float(phi[best]))
    return NullFractionEstimate(
        value=value,
        method="astar-lower",
        alpha=alpha,
        diagnostics={"argmax_t": float(cand_t[best]), "eps": eps, "unclamped": float(phi[best])},
    )


def kernel_density(pvalues, bandwidth: float | None = None, grid_size: int = 512):
    """Triangular-kernel density estimate on [0, 1] with boundary reflection.

    Reflection at both ends removes the edge bias that would otherwise
    corrupt the density minimum, which for decreasing alternative densities
    sits at t = 1.  Returns ``(grid, density)``.
    """
    p = _validated_pvalues(pvalues)
    m = p.size
    h = float(bandwidth) if bandwidth is not None else m ** (-0.2)
    if h <= 0.0:
        raise ValueError("bandwidth must be positive")
    grid = np.linspace(0.0, 1.0, grid_size)
    ext = np.concatenate([p, -p, 2.0 - p])
    dens = np.zeros(grid_size)
    chunk = max(1, 2_000_000 // grid_size)
    for i in range(0, ext.size, chunk):
        u = np.abs(grid[:, None] - ext[None, i : i + chunk]) / h
        dens += np.clip(1.0 - u, 0.0, None).sum(axis=1)
    dens /= m * h
    return grid, dens


def kernel_a_consistent(pvalues, bandwidth: float | None = None) -> NullFractionEstimate:
    """Plug-in for the identifiable mixing-weight floor: one minus the
    minimum of the kernel density estimate."""
    p = _validated_pvalues(pvalues)
    if p.size < 10:
        raise ValueError("need at least 10 p-values for the kernel estimate")
    h = float(bandwidth) if bandwidth is not None else p.size ** (-0.2)
    grid, dens = kernel_density(p, h)
    k = int(np.argmin(dens))
    value = float(np.clip(1.0 - dens[k], 0.0, 1.0))
    return NullFractionEstimate(
        value=value,
        method="kernel-min-density",
        bandwidth=h,
        diagnostics={"argmin_t": float(grid[k]), "min_density": float(dens[k])},
    )


def _ahat_value(ahat) -> float:
    if isinstance(ahat, NullFractionEstimate):
        return float(ahat.value)
    return float(ahat)


@dataclass(frozen=True)
class QHat:
    """Estimated positive-FDR map t -> (1 - ahat) t / Ghat(t), 0 at t = 0."""

    ghat: EcdfEstimate
    ahat: float

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        g = np.asarray(self.ghat(t), dtype=float)
        bad = (t > 0.0) & (g <= 0.0)
        if np.any(bad):
            raise ValueError("estimated CDF is 0 at a positive evaluation point")
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(t > 0.0, (1.0 - self.ahat) * t / np.where(g > 0, g, 1.0), 0.0)
        return out if out.ndim else float(out)


def q_hat(pvalues, ahat, variant: str = "plain") -> QHat:
    """Plug-in estimate of the positive-FDR map from data and a mixing-weight
    estimate (a float or a NullFractionEstimate)."""
    a = _ahat_value(ahat)
    if not 0.0 <= a <= 1.0:
        raise ValueError("ahat must lie in [0, 1]")
    return QHat(ghat=ecdf(pvalues, variant), ahat=a)


# ---------------------------------------------------------------------------
# Sup-norm projection of (Ghat - (1 - ahat) U) / ahat onto CDFs.
# ---------------------------------------------------------------------------


def _step_targets(ghat: EcdfEstimate, ahat: float):
    """Per-interval extreme values of E(t) = Ghat(t) - (1 - ahat) t.

    Interval k = [x_k, x_{k+1}) (the last one closes at 1) owns the step
    value h_k of the projected CDF; the fixed stretch [0, x_1), where the
    projection is pinned at 0, contributes a constant term.
    """
    grid = np.unique(ghat.base.knots[1:] if ghat.base.knots[0] == 0.0 else ghat.base.knots)
    grid = grid[grid > 0.0]
    if ghat.base.knots[0] == 0.0 and ghat.base.values[0] > 0.0:
        grid = np.r_[0.0, grid]          # an observed p-value of exactly 0
    if grid.size == 0:
        raise ValueError("no usable p-value grid")
    n = grid.size
    one_minus_a = 1.0 - ahat

    def e_right(t):
        return float(ghat(t)) - one_minus_a * t

    def e_left(t):
        return float(ghat.left(t)) - one_minus_a * t

    lo = np.empty(n)
    hi = np.empty(n)
    for k in range(n):
        s = grid[k]
        e = grid[k + 1] if k < n - 1 else 1.0
        targets = [e_right(s)]
        if e > s:
            targets.append(e_left(e))
        if k == n - 1 and e > s:
            targets.append(e_right(1.0))
        if ghat.variant == "floor":
            b = float(ghat.base(s))
            if s < b < e:
                targets.append(b - one_minus_a * b)
        lo[k] = min(targets)
        hi[k] = max(targets)
    # fixed stretch before the first breakpoint
    if grid[0] > 0.0:
        fixed = [e_right(0.0), e_left(grid[0])]
        fixed_dev = max(abs(v) for v in fixed)
    else:
        fixed_dev = 0.0
    return grid, lo, hi, fixed_dev


def _node_targets(ghat: EcdfEstimate, ahat: float):
    """Per-node extreme values of E for the piecewise-linear representation.

    Nodes are the p-value grid plus 0 and 1 (plus interior kink points of the
    floor variant); between nodes both E and the candidate CDF are linear, so
    the sup-norm is controlled by the one-sided values at the nodes.
    """
    base_knots = ghat.base.knots
    nodes = set(base_knots.tolist()) | {0.0, 1.0}
    if ghat.variant == "floor":
        ks = base_knots
        for k in range(ks.size):
            s = ks[k]
            e = ks[k + 1] if k + 1 < ks.size else 1.0
            b = float(ghat.base(s))
            if s < b < e:
                nodes.add(b)
    nodes = np.array(sorted(nodes))
    one_minus_a = 1.0 - ahat
    er = np.asarray(ghat(nodes), dtype=float) - one_minus_a * nodes
    el = np.asarray(ghat.left(nodes), dtype=float) - one_minus_a * nodes
    lo = np.minimum(er, el)
    hi = np.maximum(er, el)
    # node 0 is pinned at height 0
    fixed_dev = max(abs(lo[0]), abs(hi[0]))
    return nodes, lo[1:], hi[1:], fixed_dev


def _coordinate_minimax(lo, hi, ahat, fixed_dev, init, tol, max_iter):
    """Minimize max(fixed_dev, max_k max(hi_k - a h_k, a h_k - lo_k)) over
    nondecreasing h in [0, 1] by local segment moves.

    Single-segment moves go to the bound-clipped midpoint (the exact local
    minimizer of the V-shaped per-segment deviation).  When the worst
    segment sits inside a block of equal values, the end segments of the
    block are tried instead; sweeps over all segments handle tied chains.
    """
    n = lo.size
    h = np.clip(np.asarray(init, dtype=float).copy(), 0.0, 1.0)
    np.maximum.accumulate(h, out=h)
    mid = (lo + hi) / (2.0 * ahat)

    def devs(hh):
        return np.maximum(hi - ahat * hh, ahat * hh - lo)

    def sweep(hh):
        changed = False
        for k in range(n):
            lb = hh[k - 1] if k > 0 else 0.0
            ub = hh[k + 1] if k < n - 1 else 1.0
            v = min(max(mid[k], lb), ub)
            if v != hh[k]:
                hh[k] = v
                changed = True
        return changed

    for _ in range(100):
        if not sweep(h):
            break

    if max_iter is None:
        max_iter = 10 * max(n, 1)
    stalled_sweeps = 0
    for _ in range(int(max_iter)):
        d = devs(h)
        worst = float(d.max())
        obj = max(fixed_dev, worst)
        if worst <= fixed_dev + tol:
            break
        k = int(np.argmax(d))          # leftmost worst segment

        def try_move(idx):
            lb = h[idx - 1] if idx > 0 else 0.0
            ub = h[idx + 1] if idx < n - 1 else 1.0
            v = min(max(mid[idx], lb), ub)
            if v == h[idx]:
                return None
            trial = h.copy()
            trial[idx] = v
            return trial, max(fixed_dev, float(devs(trial).max()))

        moved = False
        cand = try_move(k)
        if cand is not None and cand[1] < obj - tol:
            h = cand[0]
            moved = True
        if not moved:
            # contiguous block of equal values around the worst segment
            l = k
            while l > 0 and h[l - 1] == h[k]:
                l -= 1
            r = k
            while r < n - 1 and h[r + 1] == h[k]:
                r += 1
            best = None
            for idx in {l, r}:
                cand = try_move(idx)
                if cand is not None and (best is None or cand[1] < best[1]):
                    best = cand
            if best is not None and best[1] < obj - tol:
                h = best[0]
                moved = True
        if not moved:
            if not sweep(h):
                break
            stalled_sweeps += 1
            if stalled_sweeps > n + 2:
                break
    return h


def project_f(
    ghat: EcdfEstimate,
    ahat,
    *,
    piecewise_linear: bool = False,
    tol: float = 1e-12,
    max_iter: int | None = None,
):
    """Estimate the alternative CDF by sup-norm projection.

    Finds a CDF H minimizing ``||Ghat - (1 - ahat) U - ahat H||_inf`` over
    step CDFs on the observed p-value grid (or over continuous piecewise
    linear CDFs with nodes on that grid when ``piecewise_linear=True``,
    a finer representation suited to smooth targets).  The minimization is
    a descent over single-segment moves with a tied-block rule; the result
    is a valid CDF and a local minimum of the objective under those moves.
    """
    a = _ahat_value(ahat)
    if not 0.0 < a <= 1.0:
        raise ValueError("ahat must lie in (0, 1]")
    if piecewise_linear:
        nodes, lo, hi, fixed_dev = _node_targets(ghat, a)
        init = np.maximum.accumulate(np.clip(hi / a, 0.0, 1.0))
        h = _coordinate_minimax(lo, hi, a, fixed_dev, init, tol, max_iter)
        return PiecewiseLinear(nodes, np.r_[0.0, h])
    grid, lo, hi, fixed_dev = _step_targets(ghat, a)
    er = np.asarray(ghat(grid), dtype=float) - (1.0 - a) * grid
    init = np.maximum.accumulate(np.clip(er / a, 0.0, 1.0))
    h = _coordinate_minimax(lo, hi, a, fixed_dev, init, tol, max_iter)
    return StepFunction.from_pairs(grid, h, value_at_zero=0.0)


def projection_objective(ghat: EcdfEstimate, ahat, fhat) -> float:
    """Exact sup-norm objective ``||Ghat - (1 - ahat) U - ahat fhat||_inf``.

    Works for step or piecewise-linear candidate CDFs; evaluates the
    difference from both sides at every breakpoint of either function (plus
    the identity-crossing kinks of the floor variant), which is exact
    because the difference is linear in between.
    """
    a = _ahat_value(ahat)
    xs = set(ghat.base.knots.tolist()) | {0.0, 1.0}
    if ghat.variant == "lcm":
        xs |= set(ghat.hull.x.tolist())
    if ghat.variant == "floor":
        xs |= set(np.clip(ghat.base.values, 0.0, 1.0).tolist())
    if isinstance(fhat, StepFunction):
        xs |= set(fhat.knots.tolist())

        def f_right(t):
            return np.asarray(fhat(t), dtype=float)

        def f_left(t):
            return np.asarray(fhat.left(t), dtype=float)

    else:
        xs |= set(fhat.x.tolist())

        def f_right(t):
            return np.asarray(fhat(t), dtype=float)

        f_left = f_right
    ts = np.array(sorted(xs))
    gr = np.asarray(ghat(ts), dtype=float)
    gl = np.asarray(ghat.left(ts), dtype=float)
    dev_right = np.abs(gr - (1.0 - a) * ts - a * f_right(ts))
    dev_left = np.abs(gl - (1.0 - a) * ts - a * f_left(ts))
    return float(max(dev_right.max(), dev_left.max()))

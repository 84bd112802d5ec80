"""Right-continuous step functions and piecewise-linear curves on [0, 1].

These are the shared representations for empirical CDFs, false-discovery
proportion paths, and confidence envelopes.
"""

from __future__ import annotations

import numpy as np

__all__ = ["StepFunction", "PiecewiseLinear"]


def _as_float_array(x) -> np.ndarray:
    return np.asarray(x, dtype=float)


class StepFunction:
    """Piecewise-constant, right-continuous function on [0, 1].

    Parameters
    ----------
    knots : array_like
        Strictly increasing breakpoints with ``knots[0] == 0.0``.  The
        function equals ``values[i]`` on ``[knots[i], knots[i+1])`` and
        ``values[-1]`` on ``[knots[-1], 1]``.
    values : array_like
        Same length as ``knots``.  NaN entries are allowed and mean
        "undefined here" (used by envelopes below their domain).

    Notes
    -----
    Evaluation outside [0, 1] raises: paths and envelopes in this package
    have no meaning there.
    """

    __slots__ = ("knots", "values")

    def __init__(self, knots, values):
        knots = _as_float_array(knots)
        values = _as_float_array(values)
        if knots.ndim != 1 or values.ndim != 1 or knots.shape != values.shape:
            raise ValueError("knots and values must be 1-D arrays of equal length")
        if knots.size == 0:
            raise ValueError("need at least one knot")
        if knots[0] != 0.0:
            raise ValueError("first knot must be 0.0")
        if np.any(np.diff(knots) <= 0):
            raise ValueError("knots must be strictly increasing")
        if knots[-1] > 1.0 or np.any(knots < 0.0):
            raise ValueError("knots must lie in [0, 1]")
        self.knots = knots
        self.values = values

    @classmethod
    def from_pairs(cls, xs, ys, *, value_at_zero=0.0) -> "StepFunction":
        """Build from (x, y) jump pairs, prepending a 0-knot when absent.

        Duplicate x entries collapse to the last y given (useful for tied
        p-values where the cumulative count at the tie is what survives).
        """
        xs = _as_float_array(xs)
        ys = _as_float_array(ys)
        order = np.argsort(xs, kind="stable")
        xs, ys = xs[order], ys[order]
        keep = np.r_[xs[1:] != xs[:-1], True]
        xs, ys = xs[keep], ys[keep]
        if xs.size == 0 or xs[0] != 0.0:
            xs = np.r_[0.0, xs]
            ys = np.r_[float(value_at_zero), ys]
        return cls(xs, ys)

    def __call__(self, t):
        t = _as_float_array(t)
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        idx = np.searchsorted(self.knots, t, side="right") - 1
        out = self.values[idx]
        return out if out.ndim else float(out)

    def left(self, t):
        """Left limit at ``t``; at 0 this is the value at 0."""
        t = _as_float_array(t)
        if np.any(t < 0.0) or np.any(t > 1.0):
            raise ValueError("evaluation points must lie in [0, 1]")
        idx = np.maximum(np.searchsorted(self.knots, t, side="left") - 1, 0)
        out = self.values[idx]
        return out if out.ndim else float(out)

    def __eq__(self, other):
        if not isinstance(other, StepFunction):
            return NotImplemented
        return np.array_equal(self.knots, other.knots) and np.array_equal(
            self.values, other.values, equal_nan=True
        )

    def __hash__(self):
        return hash((self.knots.tobytes(), self.values.tobytes()))

    def __repr__(self):
        return f"StepFunction(knots={self.knots!r}, values={self.values!r})"


class PiecewiseLinear:
    """Continuous piecewise-linear function through ``(x[i], y[i])`` on [0, 1]."""

    __slots__ = ("x", "y")

    def __init__(self, x, y):
        x = _as_float_array(x)
        y = _as_float_array(y)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise ValueError("need matching 1-D arrays with at least two nodes")
        if np.any(np.diff(x) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if x[0] < 0.0 or x[-1] > 1.0:
            raise ValueError("nodes must lie in [0, 1]")
        self.x = x
        self.y = y

    def __call__(self, t):
        t = _as_float_array(t)
        if np.any(t < self.x[0]) or np.any(t > self.x[-1]):
            raise ValueError("evaluation points outside the node range")
        out = np.interp(t, self.x, self.y)
        return out if out.ndim else float(out)

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return np.array_equal(self.x, other.x) and np.array_equal(self.y, other.y)

    def __hash__(self):
        return hash((self.x.tobytes(), self.y.tobytes()))

    def __repr__(self):
        return f"PiecewiseLinear(x={self.x!r}, y={self.y!r})"

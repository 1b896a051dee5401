"""Discrete memoryless channels and capacity via alternating maximization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prob import Distribution, StochasticMatrix


class CapacityError(RuntimeError):
    """Capacity iteration failed to reach the requested residual."""


@dataclass(frozen=True)
class DMC:
    """Channel with row-stochastic transition matrix T[x, y]."""

    transition: StochasticMatrix

    @property
    def num_inputs(self) -> int:
        return self.transition.num_inputs

    @property
    def num_outputs(self) -> int:
        return self.transition.num_outputs

    @classmethod
    def from_rows(cls, rows) -> "DMC":
        return cls(StochasticMatrix(rows))


def bsc(eps: float) -> DMC:
    """Binary symmetric channel with flip probability eps in [0, 1/2]."""
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"bsc: flip probability {eps!r} outside [0, 1/2]")
    return DMC.from_rows([[1.0 - eps, eps], [eps, 1.0 - eps]])


def effective_noise(alpha: float, eps: float):
    """Flip parameter of a Z-mixed binary stage: (1-alpha) eps + alpha (1-eps)."""
    a = np.asarray(alpha, dtype=float)
    if not np.all((a >= 0) & (a <= 1)):
        raise ValueError(f"effective_noise: alpha {alpha!r} outside [0, 1]")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"effective_noise: eps {eps!r} outside [0, 1]")
    out = (1.0 - a) * eps + a * (1.0 - eps)
    return float(out) if out.ndim == 0 else out


def concat(signal: StochasticMatrix, ch: DMC) -> StochasticMatrix:
    """End-to-end kernel of a signaling stage followed by a channel."""
    if signal.num_outputs != ch.num_inputs:
        raise ValueError("concat: signal outputs do not match channel inputs")
    return StochasticMatrix(signal.rows @ ch.transition.rows)


@dataclass(frozen=True)
class CapacityResult:
    capacity: float
    optimal_input: Distribution
    iterations: int
    residual: float


def capacity(ch: DMC, tol: float = 1e-9, max_iter: int = 100_000) -> CapacityResult:
    """Channel capacity in bits by alternating maximization.

    Each sweep computes per-input divergences d(x) = D(T(.|x) || q) against the
    current output law q. sum r d is a lower bound on capacity and max d an
    upper bound; the loop stops when the bracket closes below tol and raises
    CapacityError (with the last residual) if max_iter sweeps do not get there.
    """
    T = ch.transition.rows
    m = T.shape[0]
    support = T > 0
    logT = np.where(support, np.log2(np.where(support, T, 1.0)), 0.0)
    r = np.full(m, 1.0 / m)
    residual = np.inf
    for it in range(1, max_iter + 1):
        q = r @ T
        # q[y] > 0 wherever some T[x, y] > 0 since r stays strictly positive
        logq = np.log2(np.where(q > 0, q, 1.0))
        d = ((logT - logq[None, :]) * T).sum(axis=1)
        upper = float(d.max())
        lower = float(r @ d)
        residual = upper - lower
        if residual <= tol:
            return CapacityResult(capacity=max(lower, 0.0),
                                  optimal_input=Distribution(r),
                                  iterations=it,
                                  residual=residual)
        r = r * np.exp2(d - upper)
        r = r / r.sum()
    raise CapacityError(f"capacity: residual {residual!r} above tol {tol!r} "
                        f"after {max_iter} iterations")

"""Binary posterior splitting and its feasibility under channel constraints.

A binary signal (alpha, beta) maps state u1 to messages (1-alpha, alpha) and
state u2 to (beta, 1-beta). Conditioning a prior p = P(u1) on the message
splits it into two posteriors whose mixture returns p. Feasibility of a
target split is judged either per-use (both required signal parameters must
sit inside the channel's attainable band) or per-block (the signal's
information rate must fit under a channel capacity).
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .prob import binary_entropy

FEAS_ATOL = 1e-12


class SplitError(ValueError):
    """Posterior pair not realizable from the prior by any binary signal."""


class DegenerateSplitError(SplitError):
    """Posterior pair with p1 == p2 (no information revealed)."""


@dataclass(frozen=True)
class BinarySignal:
    """Binary signaling kernel: row u1 = (1-alpha, alpha), row u2 = (beta, 1-beta)."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("alpha", "beta"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"BinarySignal: {name} = {v!r} outside [0, 1]")

    def rows(self) -> np.ndarray:
        return np.array([[1.0 - self.alpha, self.alpha],
                         [self.beta, 1.0 - self.beta]])

NO_INFO = BinarySignal(0.5, 0.5)


@dataclass(frozen=True)
class PosteriorPair:
    """Posteriors P(u1 | w1) and P(u1 | w2); undefined marks zero-mass messages."""

    p1: float
    p2: float
    undefined: frozenset = frozenset()

    def __post_init__(self):
        for name in ("p1", "p2"):
            v = getattr(self, name)
            if not (np.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"PosteriorPair: {name} = {v!r} outside [0, 1]")
        object.__setattr__(self, "undefined", frozenset(self.undefined))


@dataclass(frozen=True)
class FeasibilityVerdict:
    feasible: bool
    slack: float
    mode: str


def _check_prior(p: float) -> None:
    if not (np.isfinite(p) and 0.0 <= p <= 1.0):
        raise ValueError(f"prior {p!r} outside [0, 1]")


def posteriors_from_signal(p: float, signal: BinarySignal) -> PosteriorPair:
    """Posterior pair induced by a signal; a zero-mass message keeps the prior."""
    _check_prior(p)
    a, b = signal.alpha, signal.beta
    m1 = p * (1.0 - a) + (1.0 - p) * b
    m2 = p * a + (1.0 - p) * (1.0 - b)
    undefined = set()
    if m1 > 0:
        p1 = p * (1.0 - a) / m1
    else:
        p1, undefined = p, {"w1"}
    if m2 > 0:
        p2 = p * a / m2
    else:
        p2, undefined = p, undefined | {"w2"}
    return PosteriorPair(min(p1, 1.0), min(p2, 1.0), frozenset(undefined))


def message_weights(p: float, signal: BinarySignal) -> tuple:
    """(P(w1), P(w2)) under prior p."""
    _check_prior(p)
    m1 = p * (1.0 - signal.alpha) + (1.0 - p) * signal.beta
    return (m1, 1.0 - m1)


def is_valid_split(p: float, pair: PosteriorPair) -> bool:
    """True iff a signal realizes the pair: interior prior strictly between
    the two posteriors (either order). The degenerate pair p1 = p2 fails; the
    solver handles that point separately as NO_INFO."""
    _check_prior(p)
    if p <= 0.0 or p >= 1.0:
        return False
    lo, hi = sorted((pair.p1, pair.p2))
    return lo < p < hi


def required_signal_arrays(p: float, p1, p2):
    """Vectorized inversion: signal parameters that induce posteriors (p1, p2).

    No validity checks; callers mask. Division by zero yields inf/nan.
    """
    p1 = np.asarray(p1, dtype=float)
    p2 = np.asarray(p2, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        alpha = p2 * (p1 - p) / (p * (p1 - p2))
        beta = (1.0 - p1) * (p - p2) / ((1.0 - p) * (p1 - p2))
    return alpha, beta


def signal_from_posteriors(p: float, pair: PosteriorPair) -> BinarySignal:
    """The unique signal inducing a valid split (inversion of the Bayes map)."""
    if pair.p1 == pair.p2:
        raise DegenerateSplitError(
            f"posterior pair ({pair.p1!r}, {pair.p2!r}) is degenerate; "
            f"no unique signal exists")
    if not is_valid_split(p, pair):
        raise SplitError(f"prior {p!r} not strictly between posteriors "
                         f"({pair.p1!r}, {pair.p2!r})")
    alpha, beta = required_signal_arrays(p, pair.p1, pair.p2)
    # valid splits give parameters in [0, 1] up to roundoff
    return BinarySignal(float(np.clip(alpha, 0.0, 1.0)), float(np.clip(beta, 0.0, 1.0)))


def signal_information_rate(p: float, alpha, beta):
    """I(state; message) in bits for signal (alpha, beta) under prior p.

    Vectorized over alpha/beta. Garbage in, garbage out: callers mask.
    """
    alpha = np.asarray(alpha, dtype=float)
    beta = np.asarray(beta, dtype=float)
    m1 = p * (1.0 - alpha) + (1.0 - p) * beta
    out = _h_raw(m1) - p * _h_raw(alpha) - (1.0 - p) * _h_raw(beta)
    return float(out) if out.ndim == 0 else out


def _h_raw(x) -> np.ndarray:
    """Binary entropy without range checks; 0 outside (0, 1) and on nan."""
    x = np.asarray(x, dtype=float)
    inner = (x > 0) & (x < 1)
    q = np.where(inner, x, 0.5)
    return np.where(inner, -(q * np.log2(q) + (1 - q) * np.log2(1 - q)), 0.0)


def one_shot_feasible(p: float, pair: PosteriorPair, eps: float) -> FeasibilityVerdict:
    """Can a single use of a binary channel with flip eps realize the split?

    Both required signal parameters must land in the attainable band
    [eps, 1-eps]. Slack is the worst signed margin into the band.
    """
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"one_shot_feasible: eps {eps!r} outside [0, 1/2]")
    sig = signal_from_posteriors(p, pair)
    slack = min(sig.alpha - eps, (1.0 - eps) - sig.alpha,
                sig.beta - eps, (1.0 - eps) - sig.beta)
    return FeasibilityVerdict(slack >= -FEAS_ATOL, slack, "one_shot")


def block_feasible(p: float, signal: BinarySignal, cap: float) -> FeasibilityVerdict:
    """Can long coding blocks at channel capacity `cap` carry the signal?

    Needs I(state; message) <= cap. Slack is cap minus the rate.
    """
    _check_prior(p)
    if cap < 0:
        raise ValueError(f"block_feasible: negative capacity {cap!r}")
    rate = signal_information_rate(p, signal.alpha, signal.beta)
    slack = cap - rate
    return FeasibilityVerdict(slack >= -FEAS_ATOL, slack, "block")


class RegionLabel(IntEnum):
    INVALID_SPLIT = 0
    ONE_SHOT = 1
    BLOCK_ONLY = 2
    INFEASIBLE = 3
    VALID = 4  # used by surfaces scanned without a channel


@dataclass(frozen=True)
class RegionGrid:
    p1_axis: np.ndarray
    p2_axis: np.ndarray
    labels: np.ndarray  # RegionLabel values, shape (len(p1_axis), len(p2_axis))
    prior: float
    eps: float
    capacity: float


def split_masks(p: float, p1_grid, p2_grid, eps: float, cap: float):
    """Validity, per-use and block feasibility masks on a posterior grid."""
    P1 = np.asarray(p1_grid, dtype=float)
    P2 = np.asarray(p2_grid, dtype=float)
    lo = np.minimum(P1, P2)
    hi = np.maximum(P1, P2)
    valid = (lo < p) & (p < hi)
    if p <= 0.0 or p >= 1.0:
        valid &= False
    alpha, beta = required_signal_arrays(p, P1, P2)
    margin = np.minimum.reduce([alpha - eps, (1.0 - eps) - alpha,
                                beta - eps, (1.0 - eps) - beta])
    one_shot = valid & (margin >= -FEAS_ATOL)
    rate = signal_information_rate(p, np.clip(alpha, 0.0, 1.0), np.clip(beta, 0.0, 1.0))
    block = valid & (cap - rate >= -FEAS_ATOL)
    return valid, one_shot, block


def region_scan(p: float, eps: float, resolution: float = 1.0 / 500) -> RegionGrid:
    """Label every grid point of the posterior square by channel feasibility."""
    _check_prior(p)
    if not 0.0 <= eps <= 0.5:
        raise ValueError(f"region_scan: eps {eps!r} outside [0, 1/2]")
    n = round(1.0 / resolution)
    if n < 1:
        raise ValueError(f"region_scan: resolution {resolution!r} too coarse")
    axis = np.linspace(0.0, 1.0, n + 1)
    P1, P2 = np.meshgrid(axis, axis, indexing="ij")
    cap = 1.0 - binary_entropy(eps)
    valid, one_shot, block = split_masks(p, P1, P2, eps, cap)
    labels = np.full(P1.shape, int(RegionLabel.INVALID_SPLIT), dtype=np.int8)
    labels[valid] = int(RegionLabel.INFEASIBLE)
    labels[valid & block] = int(RegionLabel.BLOCK_ONLY)
    labels[one_shot] = int(RegionLabel.ONE_SHOT)
    labels.flags.writeable = False
    return RegionGrid(p1_axis=axis, p2_axis=axis, labels=labels,
                      prior=p, eps=eps, capacity=cap)

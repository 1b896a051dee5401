"""Sender-commitment equilibrium over binary states.

The sender designs a binary signal; the receiver observes the message, updates
to a posterior and best-replies. The solver grid-searches posterior pairs,
restricted by the channel feasibility mode, and returns the sender-optimal
split together with the induced values. Best-reply ties are broken in the
sender's favor, then by lowest action index, so runs are reproducible.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .prob import Distribution, JointDistribution, StochasticMatrix, mutual_information
from .splitting import (FEAS_ATOL, NO_INFO, BinarySignal, FeasibilityVerdict,
                        PosteriorPair, SplitError, block_feasible,
                        is_valid_split, one_shot_feasible,
                        signal_from_posteriors, split_masks)

TIE_ATOL = 1e-12


@dataclass(frozen=True)
class Scenario:
    """Persuasion game: prior over states, ordered actions, payoff tables.

    phi1 is the sender's table, phi2 the receiver's; both |U| x |V|.
    """

    prior: Distribution
    actions: tuple
    phi1: np.ndarray
    phi2: np.ndarray

    def __post_init__(self):
        actions = tuple(self.actions)
        if not actions:
            raise ValueError("Scenario: empty action set")
        t1 = np.array(self.phi1, dtype=float)
        t2 = np.array(self.phi2, dtype=float)
        want = (len(self.prior), len(actions))
        for name, t in (("phi1", t1), ("phi2", t2)):
            if t.shape != want:
                raise ValueError(f"Scenario: {name} shape {t.shape} != {want}")
            if not np.all(np.isfinite(t)):
                raise ValueError(f"Scenario: {name} has non-finite entries")
        t1.flags.writeable = False
        t2.flags.writeable = False
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "phi1", t1)
        object.__setattr__(self, "phi2", t2)

    def num_states(self) -> int:
        return len(self.prior)

    def action_index(self, v) -> int:
        try:
            return self.actions.index(v)
        except ValueError:
            raise ValueError(f"Scenario: unknown action {v!r}") from None


@dataclass(frozen=True)
class BestReplySet:
    """Receiver-optimal actions at one posterior; indices into Scenario.actions."""

    optimal_actions: tuple
    receiver_value: float
    selected: int


@dataclass(frozen=True)
class Unconstrained:
    name: ClassVar[str] = "unconstrained"


@dataclass(frozen=True)
class OneShot:
    eps: float
    name: ClassVar[str] = "one_shot"

    def __post_init__(self):
        if not 0.0 <= self.eps <= 0.5:
            raise ValueError(f"OneShot: eps {self.eps!r} outside [0, 1/2]")


@dataclass(frozen=True)
class Block:
    capacity: float
    name: ClassVar[str] = "block"

    def __post_init__(self):
        if not (np.isfinite(self.capacity) and self.capacity >= 0):
            raise ValueError(f"Block: capacity {self.capacity!r} must be >= 0")


@dataclass(frozen=True)
class EquilibriumResult:
    posteriors: PosteriorPair
    signal: BinarySignal
    message_weights: Distribution
    receiver_actions: tuple
    phi1_star: float
    phi2_star: float
    mode: object
    feasibility: FeasibilityVerdict
    no_info: bool = False


def receiver_expected_utility(posterior: Distribution, v, sc: Scenario) -> float:
    """Receiver's expected payoff of action label v under a posterior."""
    j = sc.action_index(v)
    if len(posterior) != sc.num_states():
        raise ValueError("receiver_expected_utility: posterior length mismatch")
    return float(posterior.probs @ sc.phi2[:, j])


def best_reply(posterior: Distribution, sc: Scenario) -> BestReplySet:
    """Receiver-optimal action set with deterministic selection."""
    if len(posterior) != sc.num_states():
        raise ValueError("best_reply: posterior length mismatch")
    u2 = posterior.probs @ sc.phi2
    top = float(u2.max())
    opt = np.flatnonzero(u2 >= top - TIE_ATOL)
    u1 = posterior.probs @ sc.phi1
    sel = opt[int(np.argmax(u1[opt]))]
    return BestReplySet(tuple(int(i) for i in opt), top, int(sel))


def in_Q0(prior: Distribution, signal: StochasticMatrix, cap: float) -> FeasibilityVerdict:
    """Does the signal's information rate fit under the channel capacity?

    Independent of any receiver response.
    """
    if signal.num_inputs != len(prior):
        raise ValueError("in_Q0: signal rows do not match prior length")
    if cap < 0:
        raise ValueError(f"in_Q0: negative capacity {cap!r}")
    joint = JointDistribution(prior.probs[:, None] * signal.rows, axes=("u", "w"))
    slack = cap - mutual_information(joint)
    return FeasibilityVerdict(slack >= -FEAS_ATOL, slack, "block")


def in_Q2(prior: Distribution, signal: StochasticMatrix,
          response: StochasticMatrix, sc: Scenario) -> bool:
    """Is the response a best reply at every positive-mass message?"""
    if signal.num_inputs != len(prior) or len(prior) != sc.num_states():
        raise ValueError("in_Q2: prior/signal/scenario dimensions disagree")
    if response.num_inputs != signal.num_outputs:
        raise ValueError("in_Q2: response rows do not match signal outputs")
    if response.num_outputs != len(sc.actions):
        raise ValueError("in_Q2: response columns do not match the action set")
    pw = prior.probs @ signal.rows
    for w in range(signal.num_outputs):
        if pw[w] <= 0:
            continue
        post = Distribution(prior.probs * signal.rows[:, w] / pw[w])
        opt = best_reply(post, sc).optimal_actions
        stray = 1.0 - float(response.rows[w][list(opt)].sum())
        if stray > TIE_ATOL:
            return False
    return True


def _require_binary(sc: Scenario, who: str) -> float:
    if sc.num_states() != 2:
        raise ValueError(f"{who}: solver scope is binary state spaces, "
                         f"got {sc.num_states()} states")
    return float(sc.prior.probs[0])


def _point_values(q: float, sc: Scenario):
    """(sender, receiver) payoff at posterior q with the tie-broken best reply."""
    br = best_reply(Distribution((q, 1.0 - q)), sc)
    v1 = q * sc.phi1[0, br.selected] + (1.0 - q) * sc.phi1[1, br.selected]
    v2 = q * sc.phi2[0, br.selected] + (1.0 - q) * sc.phi2[1, br.selected]
    return float(v1), float(v2), br.selected


def sender_value(t: PosteriorPair, p: float, sc: Scenario):
    """Expected (phi1, phi2) of the split t from prior p.

    The no-information point p1 = p2 = p evaluates at the prior itself.
    """
    _require_binary(sc, "sender_value")
    if t.p1 == t.p2:
        if t.p1 != p:
            raise SplitError(f"sender_value: degenerate pair at {t.p1!r} "
                             f"inconsistent with prior {p!r}")
        v1, v2, _ = _point_values(p, sc)
        return v1, v2
    if not is_valid_split(p, t):
        raise SplitError(f"sender_value: prior {p!r} not strictly between "
                         f"({t.p1!r}, {t.p2!r})")
    lam = (t.p2 - p) / (t.p2 - t.p1)
    a1, a2, _ = _point_values(t.p1, sc)
    b1, b2, _ = _point_values(t.p2, sc)
    return lam * a1 + (1.0 - lam) * b1, lam * a2 + (1.0 - lam) * b2


def grid_best_replies(sc: Scenario, q_grid: np.ndarray):
    """Vectorized tie-broken best replies along a posterior axis.

    Returns (selected index, sender value, receiver value) arrays. Shared by
    the solver and the case-study surface generator so their argmax agrees.
    """
    _require_binary(sc, "grid_best_replies")
    q = np.asarray(q_grid, dtype=float)[:, None]
    U1 = q * sc.phi1[0][None, :] + (1.0 - q) * sc.phi1[1][None, :]
    U2 = q * sc.phi2[0][None, :] + (1.0 - q) * sc.phi2[1][None, :]
    top = U2.max(axis=1, keepdims=True)
    tie = U2 >= top - TIE_ATOL
    score = np.where(tie, U1, -np.inf)
    sel = np.argmax(score, axis=1)
    take = sel[:, None]
    V1 = np.take_along_axis(U1, take, axis=1).ravel()
    V2 = np.take_along_axis(U2, take, axis=1).ravel()
    return sel, V1, V2


def _mode_mask(p: float, grid: np.ndarray, mode):
    P1 = grid[:, None]
    P2 = grid[None, :]
    if isinstance(mode, Unconstrained):
        valid, _, _ = split_masks(p, P1, P2, 0.0, np.inf)
        return valid
    if isinstance(mode, OneShot):
        _, one_shot, _ = split_masks(p, P1, P2, mode.eps, np.inf)
        return one_shot
    if isinstance(mode, Block):
        _, _, block = split_masks(p, P1, P2, 0.0, mode.capacity)
        return block
    raise TypeError(f"solve_equilibrium: unknown mode {mode!r}")


def _no_info_verdict(p: float, mode) -> FeasibilityVerdict:
    if isinstance(mode, Unconstrained):
        return FeasibilityVerdict(True, math.inf, "unconstrained")
    if isinstance(mode, OneShot):
        # canonical signal (1/2, 1/2) sits mid-band
        return FeasibilityVerdict(True, 0.5 - mode.eps, "one_shot")
    return FeasibilityVerdict(True, mode.capacity, "block")


def _split_verdict(p: float, pair: PosteriorPair, mode) -> FeasibilityVerdict:
    if isinstance(mode, Unconstrained):
        return FeasibilityVerdict(True, math.inf, "unconstrained")
    if isinstance(mode, OneShot):
        return one_shot_feasible(p, pair, mode.eps)
    return block_feasible(p, signal_from_posteriors(p, pair), mode.capacity)


def solve_equilibrium(sc: Scenario, mode, resolution: float = 1e-3) -> EquilibriumResult:
    """Sender-optimal split by grid search over posterior pairs.

    The grid is restricted to cells passing the mode's feasibility predicate;
    the no-information point always competes. Argmax ties break to the lowest
    p1, then lowest p2 (row-major first maximum).
    """
    p = _require_binary(sc, "solve_equilibrium")
    if not 0 < resolution <= 0.5:
        raise ValueError(f"solve_equilibrium: resolution {resolution!r} outside (0, 0.5]")
    n = round(1.0 / resolution)
    grid = np.linspace(0.0, 1.0, n + 1)
    sel, V1, V2 = grid_best_replies(sc, grid)
    mask = _mode_mask(p, grid, mode)

    no1, no2, no_sel = _point_values(p, sc)
    best = EquilibriumResult(
        posteriors=PosteriorPair(p, p), signal=NO_INFO,
        message_weights=Distribution((0.5, 0.5)),
        receiver_actions=(sc.actions[no_sel], sc.actions[no_sel]),
        phi1_star=no1, phi2_star=no2, mode=mode,
        feasibility=_no_info_verdict(p, mode), no_info=True)
    if not mask.any():
        return best

    P2 = grid[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (P2 - p) / (P2 - grid[:, None])
        vals = lam * V1[:, None] + (1.0 - lam) * V1[None, :]
    vals = np.where(mask, vals, -np.inf)
    flat = int(np.argmax(vals))
    top = float(vals.flat[flat])
    if not top > best.phi1_star:
        return best

    i, j = divmod(flat, grid.size)
    pair = PosteriorPair(float(grid[i]), float(grid[j]))
    phi1_star, phi2_star = sender_value(pair, p, sc)
    lam_star = (pair.p2 - p) / (pair.p2 - pair.p1)
    return EquilibriumResult(
        posteriors=pair,
        signal=signal_from_posteriors(p, pair),
        message_weights=Distribution((lam_star, 1.0 - lam_star)),
        receiver_actions=(sc.actions[int(sel[i])], sc.actions[int(sel[j])]),
        phi1_star=phi1_star, phi2_star=phi2_star, mode=mode,
        feasibility=_split_verdict(p, pair, mode), no_info=False)


def scenario_from_dict(doc: dict) -> Scenario:
    """Build a Scenario from a plain dict (the scenario JSON schema)."""
    if not isinstance(doc, dict):
        raise ValueError("scenario: expected a JSON object")
    missing = [k for k in ("prior", "actions", "phi1", "phi2") if k not in doc]
    if missing:
        raise ValueError(f"scenario: missing field {missing[0]!r}")
    extra = [k for k in doc if k not in ("prior", "actions", "phi1", "phi2")]
    if extra:
        raise ValueError(f"scenario: unknown field {extra[0]!r}")
    try:
        prior = Distribution(doc["prior"])
    except (ValueError, TypeError) as e:
        raise ValueError(f"scenario.prior: {e}") from None
    actions = doc["actions"]
    if not isinstance(actions, (list, tuple)) or not actions:
        raise ValueError("scenario.actions: expected a non-empty list")
    try:
        return Scenario(prior, tuple(actions), doc["phi1"], doc["phi2"])
    except (ValueError, TypeError) as e:
        raise ValueError(f"scenario: {e}") from None


def scenario_to_dict(sc: Scenario) -> dict:
    return {"prior": sc.prior.probs.tolist(),
            "actions": list(sc.actions),
            "phi1": sc.phi1.tolist(),
            "phi2": sc.phi2.tolist()}


def load_scenario(path) -> Scenario:
    with open(path) as f:
        return scenario_from_dict(json.load(f))

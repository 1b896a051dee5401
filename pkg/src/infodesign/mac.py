"""Two-transmitter power allocation case study on parallel fading channels.

Two gain states, a fixed first-transmitter power split, and a second
transmitter choosing a power share v from a small grid. The informed party's
payoff is the first transmitter's sum rate, the receiver's is the second
transmitter's. Utilities are computed with natural logs; the regression
values pinned in the tests are on that scale.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from importlib import resources

import numpy as np

from .persuasion import Scenario, grid_best_replies
from .prob import Distribution
from .splitting import RegionLabel, region_scan, split_masks


@dataclass(frozen=True)
class GainState:
    """Channel power gains; g_ij links transmitter i to base station j."""

    g11: float
    g12: float
    g21: float
    g22: float

    def __post_init__(self):
        for name in ("g11", "g12", "g21", "g22"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"GainState: {name} = {v!r} must be >= 0")


@dataclass(frozen=True)
class MacConfig:
    """Case-study data: gain states, power split a1, noise, prior, action grid."""

    gain_a: GainState
    gain_b: GainState
    a1: float = 0.16
    sigma2: float = 1.0
    prior_p: float = 0.5
    actions: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)

    def __post_init__(self):
        if not 0.0 <= self.a1 <= 1.0:
            raise ValueError(f"MacConfig: a1 = {self.a1!r} outside [0, 1]")
        if not 0.0 <= self.prior_p <= 1.0:
            raise ValueError(f"MacConfig: prior_p = {self.prior_p!r} outside [0, 1]")
        if not self.sigma2 > 0:
            raise ValueError(f"MacConfig: sigma2 = {self.sigma2!r} must be > 0")
        actions = tuple(float(v) for v in self.actions)
        if not actions:
            raise ValueError("MacConfig: empty action grid")
        if any(not 0.0 <= v <= 1.0 for v in actions):
            raise ValueError("MacConfig: power shares must lie in [0, 1]")
        object.__setattr__(self, "actions", actions)


def phi2(g: GainState, v: float, cfg: MacConfig) -> float:
    """Second transmitter's sum rate at power share v against gain state g."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"phi2: power share {v!r} outside [0, 1]")
    s2 = cfg.sigma2
    return float(np.log1p(v * g.g21 / (s2 + cfg.a1 * g.g11))
                 + np.log1p((1.0 - v) * g.g22 / (s2 + (1.0 - cfg.a1) * g.g12)))


def phi1(g: GainState, v: float, cfg: MacConfig) -> float:
    """First transmitter's sum rate; v enters only as interference."""
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"phi1: power share {v!r} outside [0, 1]")
    s2 = cfg.sigma2
    return float(np.log1p(cfg.a1 * g.g11 / (s2 + v * g.g12))
                 + np.log1p((1.0 - cfg.a1) * g.g12 / (s2 + (1.0 - v) * g.g22)))


def build_scenario(cfg: MacConfig) -> Scenario:
    """Persuasion game with states (gain_a, gain_b) and the power-share actions."""
    states = (cfg.gain_a, cfg.gain_b)
    t1 = np.array([[phi1(g, v, cfg) for v in cfg.actions] for g in states])
    t2 = np.array([[phi2(g, v, cfg) for v in cfg.actions] for g in states])
    prior = Distribution((cfg.prior_p, 1.0 - cfg.prior_p))
    return Scenario(prior, cfg.actions, t1, t2)


@dataclass(frozen=True)
class BestReplyCurve:
    """Receiver best reply swept over the prior: arrays p, action, value."""

    p: np.ndarray
    action: np.ndarray
    value: np.ndarray


def best_reply_curve(cfg: MacConfig, step: float = 1e-3) -> BestReplyCurve:
    """The piecewise-constant v*(p) staircase with its expected utility."""
    if not 0.0 < step < 1.0:
        raise ValueError(f"best_reply_curve: step {step!r} outside (0, 1)")
    sc = build_scenario(cfg)
    grid = np.linspace(0.0, 1.0, round(1.0 / step) + 1)
    sel, _, V2 = grid_best_replies(sc, grid)
    labels = np.array(cfg.actions)[sel]
    return BestReplyCurve(p=grid, action=labels, value=V2)


@dataclass(frozen=True)
class UtilitySurface:
    """Split values on the posterior square; nan where no signal exists.

    labels uses RegionLabel: channel regions when eps was given, else
    VALID / INVALID_SPLIT only.
    """

    p1_axis: np.ndarray
    p2_axis: np.ndarray
    phi1: np.ndarray
    phi2: np.ndarray
    labels: np.ndarray
    prior: float
    eps: float | None


def scenario_surface(sc: Scenario, resolution: float = 1.0 / 500,
                     eps: float | None = None) -> UtilitySurface:
    """Expected (phi1, phi2) of every posterior pair on a grid.

    Uses the same vectorized best-reply path as the equilibrium solver, so
    restricting the surface to a feasibility label and taking the argmax
    reproduces the solver's answer at equal resolution.
    """
    p = float(sc.prior.probs[0])
    n = round(1.0 / resolution)
    if n < 2:
        raise ValueError(f"utility_surface: resolution {resolution!r} too coarse")
    grid = np.linspace(0.0, 1.0, n + 1)
    sel, V1, V2 = grid_best_replies(sc, grid)
    P2 = grid[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = (P2 - p) / (P2 - grid[:, None])
        vals1 = lam * V1[:, None] + (1.0 - lam) * V1[None, :]
        vals2 = lam * V2[:, None] + (1.0 - lam) * V2[None, :]
    if eps is None:
        valid, _, _ = split_masks(p, grid[:, None], P2, 0.0, np.inf)
        labels = np.where(valid, int(RegionLabel.VALID),
                          int(RegionLabel.INVALID_SPLIT)).astype(np.int8)
    else:
        labels = region_scan(p, eps, resolution).labels
        valid = labels != int(RegionLabel.INVALID_SPLIT)
    vals1 = np.where(valid, vals1, np.nan)
    vals2 = np.where(valid, vals2, np.nan)
    return UtilitySurface(p1_axis=grid, p2_axis=grid, phi1=vals1, phi2=vals2,
                          labels=labels, prior=p, eps=eps)


def utility_surface(cfg: MacConfig, resolution: float = 1.0 / 500,
                    eps: float | None = None) -> UtilitySurface:
    """Surface for the case-study config; see scenario_surface."""
    return scenario_surface(build_scenario(cfg), resolution, eps)


def config_from_dict(doc: dict) -> MacConfig:
    if not isinstance(doc, dict):
        raise ValueError("mac config: expected a JSON object")
    known = {"gain_a", "gain_b", "a1", "sigma2", "prior_p", "actions"}
    extra = [k for k in doc if k not in known]
    if extra:
        raise ValueError(f"mac config: unknown field {extra[0]!r}")
    gains = {}
    for key in ("gain_a", "gain_b"):
        if key not in doc:
            raise ValueError(f"mac config: missing field {key!r}")
        cell = doc[key]
        if not isinstance(cell, dict):
            raise ValueError(f"mac config.{key}: expected an object of gains")
        try:
            gains[key] = GainState(**cell)
        except (TypeError, ValueError) as e:
            raise ValueError(f"mac config.{key}: {e}") from None
    kwargs = {k: doc[k] for k in ("a1", "sigma2", "prior_p", "actions") if k in doc}
    try:
        return MacConfig(gain_a=gains["gain_a"], gain_b=gains["gain_b"], **kwargs)
    except (TypeError, ValueError) as e:
        raise ValueError(f"mac config: {e}") from None


def config_to_dict(cfg: MacConfig) -> dict:
    return {"gain_a": asdict(cfg.gain_a),
            "gain_b": asdict(cfg.gain_b),
            "a1": cfg.a1, "sigma2": cfg.sigma2,
            "prior_p": cfg.prior_p, "actions": list(cfg.actions)}


def load_config(path) -> MacConfig:
    with open(path) as f:
        return config_from_dict(json.load(f))


def default_config() -> MacConfig:
    """The bundled study constants."""
    text = resources.files("infodesign").joinpath("data/mac_default.json").read_text()
    return config_from_dict(json.loads(text))

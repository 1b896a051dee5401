import json

import numpy as np
import pytest

from infodesign.mac import (GainState, MacConfig, best_reply_curve,
                            build_scenario, config_from_dict, config_to_dict,
                            default_config, load_config, phi1, phi2,
                            scenario_surface, utility_surface)
from infodesign.persuasion import (Block, OneShot, Unconstrained,
                                   sender_value, solve_equilibrium)
from infodesign.prob import binary_entropy
from infodesign.splitting import PosteriorPair, RegionLabel

CFG = default_config()
SC = build_scenario(CFG)
CAP_QUARTER = 1.0 - binary_entropy(0.25)


class TestConfig:
    def test_default_values(self):
        assert CFG.a1 == 0.16
        assert CFG.sigma2 == 1.0
        assert CFG.prior_p == 0.5
        assert CFG.actions == (0.0, 0.25, 0.5, 0.75, 1.0)
        assert CFG.gain_a.g11 == pytest.approx(1.1878)

    def test_gains_nonnegative(self):
        with pytest.raises(ValueError):
            GainState(-0.1, 1.0, 1.0, 1.0)

    def test_round_trip(self):
        doc = config_to_dict(CFG)
        back = config_from_dict(doc)
        assert back == CFG

    def test_unknown_field_rejected(self):
        doc = config_to_dict(CFG)
        doc["bogus"] = 1
        with pytest.raises(ValueError, match="bogus"):
            config_from_dict(doc)

    def test_load_matches_default(self, tmp_path):
        f = tmp_path / "m.json"
        f.write_text(json.dumps(config_to_dict(CFG)))
        assert load_config(f) == CFG


class TestUtilities:
    # pinned regression values (natural-log payoff scale)
    def test_phi1_point_values(self):
        assert phi1(CFG.gain_a, 0.0, CFG) == pytest.approx(0.6416791754535167,
                                                           abs=1e-12)
        assert phi1(CFG.gain_a, 1.0, CFG) == pytest.approx(0.763272011577371,
                                                           abs=1e-12)
        assert phi1(CFG.gain_b, 0.0, CFG) == pytest.approx(0.5716206765203432,
                                                           abs=1e-12)

    def test_phi2_point_values(self):
        assert phi2(CFG.gain_a, 0.5, CFG) == pytest.approx(0.4505591450161247,
                                                           abs=1e-12)
        assert phi2(CFG.gain_b, 1.0, CFG) == pytest.approx(0.06736040353838868,
                                                           abs=1e-12)

    def test_tables_positive_finite(self):
        assert np.all(np.isfinite(SC.phi1)) and np.all(SC.phi1 > 0)
        assert np.all(np.isfinite(SC.phi2)) and np.all(SC.phi2 > 0)

    def test_scenario_shape(self):
        assert SC.phi1.shape == (2, 5)
        assert SC.actions == CFG.actions
        assert SC.prior.probs[0] == 0.5


class TestBestReplyCurve:
    def test_staircase_monotone(self):
        curve = best_reply_curve(CFG, 1e-3)
        assert np.all(np.diff(curve.action) >= 0)
        assert curve.action[0] == 0.0
        assert curve.action[-1] == 1.0

    def test_threshold_locations(self):
        # receiver switches 0 -> 0.25 -> 0.5 -> 0.75 -> 1 at these priors
        curve = best_reply_curve(CFG, 1e-3)
        jumps = np.flatnonzero(np.diff(curve.action) != 0)
        lo = curve.p[jumps]
        hi = curve.p[jumps + 1]
        expected = (0.30327, 0.39510, 0.50619, 0.64145)
        assert len(jumps) == 4
        for left, right, t in zip(lo, hi, expected):
            assert left < t < right

    def test_value_continuous_at_jumps(self):
        # receiver value is a max of affine functions: continuous
        curve = best_reply_curve(CFG, 1e-3)
        dv = np.abs(np.diff(curve.value))
        assert dv.max() < 1e-2


class TestEquilibria:
    def test_unconstrained(self):
        res = solve_equilibrium(SC, Unconstrained(), 1e-3)
        assert res.phi1_star == pytest.approx(0.7331932814533344, abs=1e-12)
        assert res.posteriors.p1 == pytest.approx(0.0, abs=1e-12)
        assert res.posteriors.p2 == pytest.approx(0.642, abs=1e-12)
        assert res.receiver_actions == (0.0, 1.0)
        assert res.signal.alpha == pytest.approx(1.0, abs=1e-12)
        assert res.signal.beta == pytest.approx(0.4424, abs=2e-3)

    def test_block_constrained(self):
        res = solve_equilibrium(SC, Block(CAP_QUARTER), 1e-3)
        assert res.phi1_star == pytest.approx(0.7272579157933095, abs=1e-12)
        assert (res.posteriors.p1, res.posteriors.p2) == (0.091, 0.642)
        assert res.feasibility.feasible

    def test_one_shot_constrained(self):
        res = solve_equilibrium(SC, OneShot(0.25), 1e-3)
        assert res.phi1_star == pytest.approx(0.7125680976842583, abs=1e-12)
        assert (res.posteriors.p1, res.posteriors.p2) == (0.304, 0.642)
        assert res.feasibility.feasible

    def test_revealing_value(self):
        v1, _ = sender_value(PosteriorPair(1.0, 0.0), 0.5, SC)
        assert v1 == pytest.approx(0.6674463440488572, abs=1e-12)

    def test_ordering(self):
        v_un = solve_equilibrium(SC, Unconstrained(), 1e-2).phi1_star
        v_bl = solve_equilibrium(SC, Block(CAP_QUARTER), 1e-2).phi1_star
        v_os = solve_equilibrium(SC, OneShot(0.25), 1e-2).phi1_star
        assert v_un >= v_bl >= v_os


class TestSurface:
    def test_unconstrained_labels(self):
        surf = scenario_surface(SC, resolution=0.02)
        labels = set(np.unique(surf.labels))
        assert labels == {int(RegionLabel.INVALID_SPLIT),
                          int(RegionLabel.VALID)}

    def test_constrained_labels(self):
        surf = scenario_surface(SC, resolution=0.02, eps=0.25)
        labels = set(np.unique(surf.labels))
        assert int(RegionLabel.ONE_SHOT) in labels
        assert int(RegionLabel.BLOCK_ONLY) in labels

    def test_invalid_cells_are_nan(self):
        surf = scenario_surface(SC, resolution=0.02)
        bad = surf.labels == int(RegionLabel.INVALID_SPLIT)
        assert np.isnan(surf.phi1[bad]).all()
        assert np.isfinite(surf.phi1[~bad]).all()

    def test_config_wrapper_matches(self):
        a = utility_surface(CFG, resolution=0.05)
        b = scenario_surface(SC, resolution=0.05)
        assert np.allclose(a.phi1, b.phi1, equal_nan=True)

    def test_surface_argmax_matches_solver(self):
        # re-reducing the surface reproduces the unconstrained optimum
        surf = scenario_surface(SC, resolution=1e-3)
        res = solve_equilibrium(SC, Unconstrained(), 1e-3)
        flat = np.nanargmax(surf.phi1)
        i, j = divmod(int(flat), surf.p2_axis.size)
        assert surf.phi1[i, j] == pytest.approx(res.phi1_star, abs=1e-12)
        assert surf.p1_axis[i] == res.posteriors.p1
        assert surf.p2_axis[j] == res.posteriors.p2

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infodesign.persuasion import (Block, OneShot, Scenario, Unconstrained,
                                   best_reply, grid_best_replies, in_Q0, in_Q2,
                                   receiver_expected_utility, scenario_from_dict,
                                   scenario_to_dict, sender_value,
                                   solve_equilibrium)
from infodesign.prob import Distribution, StochasticMatrix, binary_entropy
from infodesign.splitting import PosteriorPair, SplitError

# classic two-state persuasion: sender wants action "act" always, receiver
# wants it only in state good (prior tilted toward bad)
PROSECUTOR = Scenario(
    prior=Distribution([0.3, 0.7]),
    actions=("act", "pass"),
    phi1=[[1.0, 0.0], [1.0, 0.0]],
    phi2=[[1.0, 0.0], [-1.0, 0.0]],
)

ALIGNED = Scenario(
    prior=Distribution([0.4, 0.6]),
    actions=(0, 1),
    phi1=[[1.0, 0.0], [0.0, 1.0]],
    phi2=[[1.0, 0.0], [0.0, 1.0]],
)


class TestBestReply:
    def test_threshold(self):
        br = best_reply(Distribution([0.6, 0.4]), PROSECUTOR)
        assert br.selected == 0
        br = best_reply(Distribution([0.3, 0.7]), PROSECUTOR)
        assert br.selected == 1

    def test_tie_broken_sender_preferred(self):
        # at posterior 1/2 the receiver is indifferent; sender wants "act"
        br = best_reply(Distribution([0.5, 0.5]), PROSECUTOR)
        assert br.optimal_actions == (0, 1)
        assert br.selected == 0

    def test_tie_lowest_index_when_sender_indifferent(self):
        sc = Scenario(Distribution([0.5, 0.5]), ("a", "b"),
                      phi1=[[0.0, 0.0], [0.0, 0.0]],
                      phi2=[[1.0, 1.0], [1.0, 1.0]])
        assert best_reply(Distribution([0.5, 0.5]), sc).selected == 0

    def test_receiver_value(self):
        br = best_reply(Distribution([0.6, 0.4]), PROSECUTOR)
        assert br.receiver_value == pytest.approx(0.2, abs=1e-12)

    def test_expected_utility_by_label(self):
        got = receiver_expected_utility(Distribution([0.6, 0.4]), "act",
                                        PROSECUTOR)
        assert got == pytest.approx(0.2, abs=1e-12)


class TestFeasibilityPredicates:
    def test_q0_no_info_fits_zero_capacity(self):
        sig = StochasticMatrix([[0.5, 0.5], [0.5, 0.5]])
        v = in_Q0(Distribution([0.5, 0.5]), sig, 0.0)
        assert v.feasible

    def test_q0_revealing_needs_full_bit(self):
        sig = StochasticMatrix([[1.0, 0.0], [0.0, 1.0]])
        v = in_Q0(Distribution([0.5, 0.5]), sig, 0.9)
        assert not v.feasible
        assert v.slack == pytest.approx(-0.1, abs=1e-12)

    def test_q2_accepts_best_reply(self):
        sig = StochasticMatrix([[0.65, 0.35], [0.35, 0.65]])
        rsp = StochasticMatrix([[1.0, 0.0], [0.0, 1.0]])
        assert in_Q2(Distribution([0.5, 0.5]), sig, rsp, ALIGNED)

    def test_q2_rejects_dominated_response(self):
        sig = StochasticMatrix([[0.65, 0.35], [0.35, 0.65]])
        rsp = StochasticMatrix([[0.0, 1.0], [1.0, 0.0]])
        assert not in_Q2(Distribution([0.5, 0.5]), sig, rsp, ALIGNED)

    def test_q2_ignores_zero_mass_message(self):
        sig = StochasticMatrix([[1.0, 0.0], [1.0, 0.0]])
        rsp = StochasticMatrix([[1.0, 0.0], [0.0, 1.0]])  # w2 never occurs
        assert in_Q2(Distribution([0.5, 0.5]), sig, rsp, ALIGNED)


class TestSenderValue:
    def test_prosecutor_optimal_split(self):
        # posteriors (1/2, 0): receiver acts at 1/2 (sender-preferred tie)
        v1, v2 = sender_value(PosteriorPair(0.5, 0.0), 0.3, PROSECUTOR)
        assert v1 == pytest.approx(0.6, abs=1e-12)

    def test_no_info_point(self):
        v1, _ = sender_value(PosteriorPair(0.3, 0.3), 0.3, PROSECUTOR)
        assert v1 == 0.0  # receiver passes at the prior

    def test_degenerate_off_prior_raises(self):
        with pytest.raises(SplitError):
            sender_value(PosteriorPair(0.4, 0.4), 0.3, PROSECUTOR)

    def test_invalid_split_raises(self):
        with pytest.raises(SplitError):
            sender_value(PosteriorPair(0.1, 0.2), 0.3, PROSECUTOR)


class TestSolve:
    def test_prosecutor_unconstrained(self):
        # concavification: split 0.3 into (1/2, 0), value = 0.3/0.5 = 0.6
        res = solve_equilibrium(PROSECUTOR, Unconstrained(), 1e-3)
        assert res.phi1_star == pytest.approx(0.6, abs=2e-3)
        assert sorted((res.posteriors.p1, res.posteriors.p2)) == pytest.approx(
            [0.0, 0.5], abs=1e-9)
        assert not res.no_info

    def test_aligned_equals_revealing(self):
        # with identical utilities nothing beats full revelation
        res = solve_equilibrium(ALIGNED, Unconstrained(), 1e-2)
        rev1, _ = sender_value(PosteriorPair(1.0, 0.0), 0.4, ALIGNED)
        assert res.phi1_star == pytest.approx(rev1, abs=1e-12)
        assert res.phi1_star == pytest.approx(1.0, abs=1e-12)
        assert set(res.receiver_actions) == {0, 1}

    def test_mode_monotonicity(self):
        cap = 1.0 - binary_entropy(0.25)
        v_un = solve_equilibrium(PROSECUTOR, Unconstrained(), 1e-2).phi1_star
        v_bl = solve_equilibrium(PROSECUTOR, Block(cap), 1e-2).phi1_star
        v_os = solve_equilibrium(PROSECUTOR, OneShot(0.25), 1e-2).phi1_star
        v_no = sender_value(PosteriorPair(0.3, 0.3), 0.3, PROSECUTOR)[0]
        assert v_un >= v_bl - 1e-12
        assert v_bl >= v_os - 1e-12
        assert v_os >= v_no - 1e-12

    def test_zero_capacity_forces_no_info(self):
        res = solve_equilibrium(PROSECUTOR, Block(0.0), 1e-2)
        assert res.no_info
        assert res.signal.alpha == res.signal.beta == 0.5
        assert res.feasibility.feasible

    def test_useless_channel_forces_no_info(self):
        res = solve_equilibrium(PROSECUTOR, OneShot(0.5), 1e-2)
        assert res.no_info

    def test_posteriors_average_to_prior(self):
        res = solve_equilibrium(PROSECUTOR, Unconstrained(), 1e-2)
        w = res.message_weights.probs
        back = w[0] * res.posteriors.p1 + w[1] * res.posteriors.p2
        assert back == pytest.approx(0.3, abs=1e-9)

    def test_feasibility_verdict_attached(self):
        res = solve_equilibrium(PROSECUTOR, OneShot(0.1), 1e-2)
        assert res.feasibility.mode == "one_shot"
        assert res.feasibility.feasible

    def test_rejects_nonbinary(self):
        sc = Scenario(Distribution([0.3, 0.3, 0.4]), (0, 1),
                      phi1=np.zeros((3, 2)), phi2=np.zeros((3, 2)))
        with pytest.raises(ValueError):
            solve_equilibrium(sc, Unconstrained())

    def test_rejects_bad_resolution(self):
        with pytest.raises(ValueError):
            solve_equilibrium(PROSECUTOR, Unconstrained(), 0.0)


class TestModes:
    def test_one_shot_validates_eps(self):
        with pytest.raises(ValueError):
            OneShot(0.75)

    def test_block_validates_capacity(self):
        with pytest.raises(ValueError):
            Block(-0.1)

    def test_names(self):
        assert Unconstrained.name == "unconstrained"
        assert OneShot(0.1).name == "one_shot"
        assert Block(1.0).name == "block"


class TestScenarioIO:
    def test_round_trip(self):
        doc = scenario_to_dict(PROSECUTOR)
        sc = scenario_from_dict(doc)
        assert sc.actions == PROSECUTOR.actions
        assert np.array_equal(sc.phi1, PROSECUTOR.phi1)
        assert np.allclose(sc.prior.probs, PROSECUTOR.prior.probs)

    def test_missing_field(self):
        with pytest.raises(ValueError, match="phi2"):
            scenario_from_dict({"prior": [0.5, 0.5], "actions": [0, 1],
                                "phi1": [[0, 0], [0, 0]]})

    def test_unknown_field(self):
        doc = scenario_to_dict(ALIGNED)
        doc["extra"] = 1
        with pytest.raises(ValueError, match="extra"):
            scenario_from_dict(doc)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            scenario_from_dict({"prior": [0.5, 0.5], "actions": [0, 1],
                                "phi1": [[0, 0]], "phi2": [[0, 0], [0, 0]]})


# -- property suites ---------------------------------------------------------

def random_binary_scenario(data, k_actions):
    p = data.draw(st.floats(0.05, 0.95))
    phi = st.lists(st.lists(st.floats(-5, 5), min_size=k_actions,
                            max_size=k_actions), min_size=2, max_size=2)
    return Scenario(Distribution([p, 1.0 - p]), tuple(range(k_actions)),
                    data.draw(phi), data.draw(phi))


@settings(max_examples=150, deadline=None)
@given(st.integers(2, 5), st.data())
def test_argmax_affine_invariance(k_actions, data):
    """Rescaling and shifting the receiver table never moves the best reply."""
    sc = random_binary_scenario(data, k_actions)
    a = data.draw(st.floats(0.1, 10.0))
    b = data.draw(st.floats(-5.0, 5.0))
    sc2 = Scenario(sc.prior, sc.actions, sc.phi1, a * sc.phi2 + b)
    grid = np.linspace(0.0, 1.0, 41)
    sel1, _, _ = grid_best_replies(sc, grid)
    sel2, _, _ = grid_best_replies(sc2, grid)
    assert np.array_equal(sel1, sel2)


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 4), st.data())
def test_mode_monotonicity_random(k_actions, data):
    sc = random_binary_scenario(data, k_actions)
    eps = data.draw(st.floats(0.0, 0.49))
    cap = 1.0 - binary_entropy(eps)
    v_un = solve_equilibrium(sc, Unconstrained(), 0.05).phi1_star
    v_bl = solve_equilibrium(sc, Block(cap), 0.05).phi1_star
    v_os = solve_equilibrium(sc, OneShot(eps), 0.05).phi1_star
    assert v_un >= v_bl - 1e-9
    assert v_bl >= v_os - 1e-9


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.data())
def test_solver_weights_average_to_prior(k_actions, data):
    sc = random_binary_scenario(data, k_actions)
    res = solve_equilibrium(sc, Unconstrained(), 0.05)
    w = res.message_weights.probs
    back = w[0] * res.posteriors.p1 + w[1] * res.posteriors.p2
    assert back == pytest.approx(float(sc.prior.probs[0]), abs=1e-9)

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from infodesign.channel import (DMC, CapacityError, bsc, capacity, concat,
                                effective_noise)
from infodesign.prob import StochasticMatrix, binary_entropy


class TestBsc:
    def test_transition(self):
        ch = bsc(0.25)
        assert np.allclose(ch.transition.rows, [[0.75, 0.25], [0.25, 0.75]])

    def test_rejects_above_half(self):
        with pytest.raises(ValueError):
            bsc(0.6)

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            bsc(-0.01)


class TestEffectiveNoise:
    # a signal (alpha, alpha) through bsc(eps) behaves like one flip
    # probability: (1-alpha) eps + alpha (1-eps)
    def test_formula(self):
        assert effective_noise(0.0, 0.25) == 0.25
        assert effective_noise(1.0, 0.25) == 0.75
        assert effective_noise(0.5, 0.25) == 0.5

    def test_array(self):
        out = effective_noise(np.array([0.0, 1.0]), 0.1)
        assert np.allclose(out, [0.1, 0.9])

    def test_rejects_outside(self):
        with pytest.raises(ValueError):
            effective_noise(1.5, 0.25)


class TestConcat:
    def test_degraded_signal(self):
        sig = StochasticMatrix([[1.0, 0.0], [0.0, 1.0]])
        out = concat(sig, bsc(0.25))
        assert np.allclose(out.rows, bsc(0.25).transition.rows)

    def test_composition_order(self):
        sig = StochasticMatrix([[0.5, 0.5]])
        out = concat(sig, bsc(0.0))
        assert out.rows.shape == (1, 2)
        assert np.allclose(out.rows, [[0.5, 0.5]])


class TestCapacity:
    def test_bsc_quarter(self):
        res = capacity(bsc(0.25))
        assert res.capacity == pytest.approx(1.0 - binary_entropy(0.25),
                                             abs=1e-9)
        assert np.allclose(res.optimal_input.probs, 0.5, atol=1e-6)

    def test_noiseless_binary(self):
        assert capacity(bsc(0.0)).capacity == pytest.approx(1.0, abs=1e-9)

    def test_useless_channel(self):
        res = capacity(bsc(0.5))
        assert res.capacity == pytest.approx(0.0, abs=1e-9)

    def test_capacity_never_negative(self):
        assert capacity(bsc(0.5)).capacity >= 0.0

    def test_identity_ternary(self):
        ch = DMC.from_rows(np.eye(3))
        assert capacity(ch).capacity == pytest.approx(np.log2(3.0), abs=1e-9)

    def test_asymmetric_erasure(self):
        # binary erasure channel, erasure probability e: C = 1 - e
        e = 0.3
        ch = DMC.from_rows([[1 - e, e, 0.0], [0.0, e, 1 - e]])
        assert capacity(ch).capacity == pytest.approx(1.0 - e, abs=1e-7)

    def test_residual_bracket(self):
        res = capacity(bsc(0.11))
        assert res.residual <= 1e-9
        assert res.iterations >= 1

    def test_non_convergence_raises(self):
        # asymmetric channel so the bracket takes several sweeps to close
        ch = DMC.from_rows([[0.9, 0.1], [0.3, 0.7]])
        with pytest.raises(CapacityError):
            capacity(ch, tol=1e-12, max_iter=2)

    def test_closed_form_sweep(self):
        for eps in np.linspace(0.0, 0.5, 21):
            got = capacity(bsc(float(eps))).capacity
            assert got == pytest.approx(1.0 - binary_entropy(float(eps)),
                                        abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.data())
def test_capacity_bounds_random_channels(k_in, k_out, data):
    rows = []
    for _ in range(k_in):
        vals = np.array(data.draw(
            st.lists(st.floats(1e-6, 1.0), min_size=k_out, max_size=k_out)))
        rows.append(vals / vals.sum())
    res = capacity(DMC.from_rows(np.array(rows)), tol=1e-7)
    assert -1e-9 <= res.capacity <= np.log2(min(k_in, k_out)) + 1e-6


@given(st.floats(0.0, 0.5))
def test_capacity_matches_closed_form(eps):
    got = capacity(bsc(eps)).capacity
    assert got == pytest.approx(1.0 - binary_entropy(eps), abs=1e-6)

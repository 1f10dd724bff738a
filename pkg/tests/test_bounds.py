import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaybounds import bounds, zoo
from relaybounds.bounds import (
    BOTH,
    BROADCAST,
    MAC,
    RateGrid,
    ResolutionError,
    caf_rate,
    capacity_endpoints,
    critical_r0_lower_bound,
    cut_set_bound,
    new_upper_bound,
    sweep,
)
from relaybounds.harness import RandomChannelConfig, random_channel
from relaybounds.optimizer import SearchConfig
from relaybounds.probability import ChannelSpec, binary_entropy, entropy

QUICK = SearchConfig(restarts=8)


def test_rate_grid_validation():
    with pytest.raises(ValueError):
        RateGrid(())
    with pytest.raises(ValueError):
        RateGrid((0.0, 0.2, 0.1))
    with pytest.raises(ValueError):
        RateGrid((-0.1, 0.2))
    g = RateGrid.linspace(0, 1.2, 61)
    assert len(g) == 61 and g.step == pytest.approx(0.02)
    assert list(RateGrid.linspace(0.3, 0.3, 1)) == [0.3]


def test_negative_rate_rejected(erasure):
    for fn in (cut_set_bound, new_upper_bound, caf_rate):
        with pytest.raises(ValueError):
            fn(erasure.channel, -0.1)


def test_erasure_cutset_values(erasure):
    r = cut_set_bound(erasure.channel, 0.2)
    assert r.value == pytest.approx(0.247484, abs=1e-4)
    assert r.active_branch == MAC
    assert r.p_v_given_t is None
    top = cut_set_bound(erasure.channel, 1.0)
    assert top.value == pytest.approx(0.4, abs=1e-4)
    assert top.active_branch == BROADCAST


def test_erasure_upper_bound_and_caf(erasure):
    ub = new_upper_bound(erasure.channel, 0.2, v_card=4)
    assert ub.value == pytest.approx(0.127484, abs=1e-3)
    assert ub.constraint_slack >= -1e-9
    assert ub.p_v_given_t.shape == (2, 4)
    caf = caf_rate(erasure.channel, 0.2)
    assert caf.value == pytest.approx(0.127484, abs=1e-3)
    assert caf.active_branch is None
    assert caf_rate(erasure.channel, 0.0).value == pytest.approx(0.047484, abs=1e-3)


def test_caf_with_full_rate_reaches_broadcast_cut(erasure):
    h_t = entropy(erasure.channel.p_t)
    assert caf_rate(erasure.channel, h_t + 0.05).value == pytest.approx(0.4, abs=1e-3)


def test_invalid_v_card(erasure):
    with pytest.raises(ValueError):
        new_upper_bound(erasure.channel, 0.1, v_card=0)
    with pytest.raises(ValueError):
        caf_rate(erasure.channel, 0.1, v_card=0)


def test_zero_rate_collapse(erasure, mult):
    for ch in (erasure.channel, mult.channel):
        assert new_upper_bound(ch, 0.0).value == pytest.approx(cut_set_bound(ch, 0.0).value, abs=1e-4)


def test_capacity_endpoints(erasure, mult):
    assert capacity_endpoints(erasure.channel) == pytest.approx((0.047484, 0.4), abs=1e-6)
    assert capacity_endpoints(mult.channel)[1] == pytest.approx(0.25, abs=1e-6)
    identity = ChannelSpec(p_t=[1.0], kernel=np.eye(3)[:, None, :])
    assert capacity_endpoints(identity) == pytest.approx((np.log2(3), np.log2(3)), abs=1e-6)


def test_useless_channel_all_zero():
    ch = zoo.from_name("erasure:alpha=0.3,eps=0").channel
    for fn in (cut_set_bound, new_upper_bound, caf_rate):
        assert fn(ch, 0.3, config=QUICK).value == pytest.approx(0.0, abs=1e-12)


def test_tied_branches_reported_as_both():
    ch = zoo.kim_xor(0.0)     # noiseless: I(X;Y) = I(X;Y|T) = 1 at uniform input
    assert cut_set_bound(ch, 0.0).active_branch == BOTH


def test_critical_rate_erasure(erasure):
    grid = RateGrid.linspace(0, 1.2, 61)
    crit = critical_r0_lower_bound(erasure.channel, grid, config=QUICK)
    assert abs(crit.rate - binary_entropy(0.3)) <= crit.grid_step
    assert crit.grid_step == pytest.approx(0.02)


def test_critical_rate_stateless_channel():
    ch = ChannelSpec(p_t=[1.0], kernel=np.array([[[0.9, 0.1]], [[0.2, 0.8]]]))
    assert critical_r0_lower_bound(ch, RateGrid.linspace(0, 1, 11), config=QUICK).rate == 0.0


def test_critical_rate_resolution_errors(erasure):
    with pytest.raises(ResolutionError):
        critical_r0_lower_bound(erasure.channel, RateGrid((0.0, 0.2, 0.4)), config=QUICK)
    with pytest.raises(ResolutionError):
        critical_r0_lower_bound(erasure.channel, RateGrid((0.9, 1.0)), config=QUICK)
    with pytest.raises(ValueError):
        critical_r0_lower_bound(erasure.channel, RateGrid((0.0,)), tol=0.0)


def test_critical_rate_multiplicative_beats_cutset(mult):
    grid = RateGrid.linspace(0, 1, 51)
    ub = critical_r0_lower_bound(mult.channel, grid, config=QUICK).rate
    cs = critical_r0_lower_bound(mult.channel, grid, config=QUICK, bound="cutset").rate
    assert ub > cs


def test_sweep_single_rate_matches_direct_calls(erasure):
    [row] = sweep(erasure.channel, RateGrid((0.3,)), reference=erasure.reference)
    assert row.cutset == cut_set_bound(erasure.channel, 0.3).value
    assert row.upper_bound == new_upper_bound(erasure.channel, 0.3).value
    assert row.caf == caf_rate(erasure.channel, 0.3).value
    assert (row.closed_capacity, row.closed_cutset) == erasure.reference(0.3)


def test_sweep_parallel_identical(erasure):
    grid = RateGrid((0.0, 0.4, 0.9))
    assert sweep(erasure.channel, grid, config=QUICK) == sweep(erasure.channel, grid, config=QUICK,
                                                               workers=2)


def test_multiplicative_interior_ordering(mult):
    for row in sweep(mult.channel, RateGrid.linspace(0.05, 0.3, 6), config=QUICK):
        assert row.caf < row.upper_bound < row.cutset


def test_identity_check_guards_caf(monkeypatch, erasure):
    real = bounds.kernels.relay_terms

    def skewed(*args):
        out = real(*args).copy()
        out[:, bounds.kernels.I_V_Y] += 1e-6
        return out

    monkeypatch.setattr(bounds.kernels, "relay_terms", skewed)
    with pytest.raises(bounds.IdentityCheckError):
        caf_rate(erasure.channel, 0.2, config=QUICK)


@settings(max_examples=10)
@given(seed=st.integers(0, 10_000), r0=st.floats(0.0, 2.0))
def test_ordering_on_random_channels(seed, r0):
    ch = random_channel(RandomChannelConfig(seed=seed, x_sizes=(1, 3), t_sizes=(1, 3),
                                            y_sizes=(1, 4)))
    cs = cut_set_bound(ch, r0).value
    ub = new_upper_bound(ch, r0).value
    caf = caf_rate(ch, r0, v_card=ch.t_size + 2).value
    assert ub <= cs + 1e-6
    assert caf <= ub + 2e-3


@settings(max_examples=10)
@given(seed=st.integers(0, 10_000))
def test_cutset_binary_input_matches_fine_scan(seed):
    ch = random_channel(RandomChannelConfig(seed=seed, x_sizes=(2, 2), t_sizes=(1, 3)))
    from relaybounds.kernels import cutset_terms

    p = np.arange(0, 1 + 1e-12, 1e-5)
    terms = cutset_terms(np.stack([1 - p, p], axis=1), ch.p_t, ch.kernel)
    scan = np.minimum(terms[:, 0] + 0.1, terms[:, 1]).max()
    assert cut_set_bound(ch, 0.1).value == pytest.approx(scan, abs=1e-6)

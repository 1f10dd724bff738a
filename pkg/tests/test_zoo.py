import numpy as np
import pytest

from relaybounds import zoo
from relaybounds.bounds import cut_set_bound, new_upper_bound
from relaybounds.kernels import cutset_terms
from relaybounds.optimizer import SearchConfig
from relaybounds.probability import ChannelSpec, binary_entropy, entropy

H03 = binary_entropy(0.3)


def test_erasure_matrices_as_printed(erasure):
    k = erasure.channel.kernel
    assert k[0, 0].tolist() == pytest.approx([0.0, 0.6, 0.4])      # W0 row x=0
    assert k[1, 0].tolist() == pytest.approx([0.4, 0.6, 0.0])      # W0 row x=1
    assert k[0, 1].tolist() == pytest.approx([0.4, 0.6, 0.0])      # W1 row x=0
    assert erasure.channel.p_t.tolist() == [0.3, 0.7]


def test_erasure_uniform_output(erasure):
    py = np.einsum("x,t,xty->y", [0.5, 0.5], erasure.channel.p_t, erasure.channel.kernel)
    assert py == pytest.approx([0.2, 0.6, 0.2])


def test_erasure_closed_forms(erasure):
    p = erasure.params
    assert zoo.erasure_capacity_closed(p, 0.0) == pytest.approx(0.047484, abs=1e-6)
    assert zoo.erasure_capacity_closed(p, 0.2) == pytest.approx(0.127484, abs=1e-6)
    assert zoo.erasure_capacity_closed(p, H03) == pytest.approx(0.4, abs=1e-12)
    assert zoo.erasure_cutset_closed(p, 0.2) == pytest.approx(0.247484, abs=1e-6)
    gap = zoo.erasure_cutset_closed(p, 0.2) - zoo.erasure_capacity_closed(p, 0.2)
    assert gap == pytest.approx(0.12, abs=1e-12)


def test_kim_channel():
    ch = zoo.kim_xor(0.3)
    assert ch.kernel[1, 1].tolist() == [1.0, 0.0]
    assert ch.kernel[1, 0].tolist() == [0.0, 1.0]
    half = zoo.kim_xor(0.5)
    assert cut_set_bound(half, 0.0).value == pytest.approx(0.0, abs=1e-12)
    pipe = zoo.kim_xor(0.0)
    for r0 in (0.0, 0.5):
        assert new_upper_bound(pipe, r0, config=SearchConfig(restarts=4)).value == pytest.approx(1.0, abs=1e-9)


def test_mod_add_construction():
    params = zoo.ModAddParams(0.1, 0.2)
    ch = zoo.mod_add(params)
    assert ch.p_t[1] == pytest.approx(0.26, abs=1e-15)
    assert zoo.mod_add(zoo.ModAddParams(0.3, 0.0)) == zoo.kim_xor(0.3)
    useless = zoo.mod_add(zoo.ModAddParams(0.5, 0.2))
    assert cut_set_bound(useless, 0.0).value == pytest.approx(0.0, abs=1e-12)


def test_yu_capacity_endpoints():
    params = zoo.ModAddParams(0.1, 0.2)
    cfg = SearchConfig(restarts=8)
    assert zoo.yu_capacity(params, 0.0, config=cfg) == pytest.approx(1 - binary_entropy(0.1), abs=1e-9)
    _, z_given_t = zoo._noise_given_state(params)
    p_t = zoo.mod_add(params).p_t
    h_z_t = sum(p_t[t] * entropy(z_given_t[t]) for t in range(2))
    assert zoo.yu_capacity(params, 1.0, config=cfg) == pytest.approx(1 - h_z_t, abs=1e-6)
    with pytest.raises(ValueError):
        zoo.yu_capacity(params, -1.0)


def test_multiplicative_construction(mult):
    k = mult.channel.kernel
    assert k[1, 1, 2] == 0.5
    assert k[0, 1].tolist() == [0.5, 0.5, 0.0]
    assert k[1, 1].tolist() == [0.0, 0.5, 0.5]
    py = np.einsum("x,t,xty->y", [0.5, 0.5], mult.channel.p_t, k)
    assert py == pytest.approx([3 / 8, 1 / 2, 1 / 8])


def test_multiplicative_closed_terms_match_kernels(mult):
    p = np.linspace(0, 1, 11)
    _, i_bc = zoo._multiplicative_terms(p, 0.5, 0.5)
    terms = cutset_terms(np.stack([1 - p, p], axis=1), mult.channel.p_t, mult.channel.kernel)
    assert i_bc == pytest.approx(terms[:, 1], abs=1e-12)
    # at alpha = delta = 1/2 the broadcast cut is h(p)/4
    assert i_bc == pytest.approx([binary_entropy(v) / 4 for v in p], abs=1e-12)


def test_multiplicative_closed_forms(mult):
    p = mult.params
    c0 = cut_set_bound(mult.channel, 0.0).value
    assert zoo.multiplicative_ub_closed(p, 0.0) == pytest.approx(c0, abs=1e-9)
    assert zoo.multiplicative_cutset_closed(p, 0.0) == pytest.approx(c0, abs=1e-9)
    assert zoo.multiplicative_ub_closed(p, 2.0) == pytest.approx(0.25, abs=1e-9)
    assert zoo.multiplicative_cutset_closed(p, 1.0) == pytest.approx(0.25, abs=1e-9)
    assert zoo.multiplicative_cutset_closed(p, 0.2) > zoo.multiplicative_ub_closed(p, 0.2) + 5e-3
    assert zoo.multiplicative_broadcast_capacity(p) == pytest.approx(0.25, abs=1e-9)


def test_multiplicative_closed_form_matches_generic_bound(mult):
    for r0 in (0.1, 0.2, 0.3):
        generic = new_upper_bound(mult.channel, r0, v_card=4).value
        assert generic == pytest.approx(zoo.multiplicative_ub_closed(mult.params, r0), abs=2e-3)


def test_multiplicative_p_times_rate_variant_collapses_onto_cutset(mult):
    # weighting the rate by p instead of weighting the residual state entropy
    # by p/2 leaves no gap to the cut-set bound at r0 = 0.2
    ha = binary_entropy(0.5)

    def fn(p):
        h_y, i_bc = zoo._multiplicative_terms(p, 0.5, 0.5)
        return np.minimum(h_y - 1 - p / 2 * ha + p * 0.2, i_bc)

    variant = zoo._scan_max(fn)
    assert variant == pytest.approx(zoo.multiplicative_cutset_closed(mult.params, 0.2), abs=1e-9)
    assert new_upper_bound(mult.channel, 0.2).value < variant - 0.04


def test_multiplicative_closed_form_domain():
    with pytest.raises(ValueError, match="Ber\\(1/2\\)"):
        zoo.multiplicative_ub_closed(zoo.MultiplicativeParams(0.5, 0.3), 0.1)
    with pytest.raises(ValueError):
        zoo.multiplicative_cutset_closed(zoo.MultiplicativeParams(0.5, 0.3), 0.1)


@pytest.mark.parametrize("name", [
    "erasure:alpha=0.3,eps=0.4", "kim:delta=0.1", "modadd:delta=0.1,delta_tilde=0.2",
    "multiplicative:alpha=0.5,delta=0.5", "multiplicative:alpha=0.2,delta=0.3"])
def test_constructors_validate(name):
    z = zoo.from_name(name)
    assert isinstance(z.channel, ChannelSpec)
    ChannelSpec(p_t=z.channel.p_t, kernel=z.channel.kernel)


def test_reference_columns():
    assert zoo.from_name("erasure:alpha=0.3,eps=0.4").reference(0.2) == pytest.approx((0.127484, 0.247484), abs=1e-6)
    assert zoo.from_name("modadd:delta=0.1,delta_tilde=0.2").reference(0.2) == (None, None)
    cap, cs = zoo.from_name("multiplicative:alpha=0.5,delta=0.5").reference(0.2)
    assert cap is None and cs == pytest.approx(0.25, abs=1e-9)
    assert zoo.from_name("multiplicative:alpha=0.5,delta=0.3").reference(0.2) == (None, None)


@pytest.mark.parametrize("bad", ["nosuch:x=1", "erasure:alpha=0.3", "erasure:alpha=0.3,eps=x",
                                 "erasure:alpha=0.3,eps=0.4,zeta=1", "erasure:alpha=2,eps=0.1"])
def test_name_parse_errors(bad):
    with pytest.raises(ValueError):
        zoo.from_name(bad)


def test_param_validation():
    with pytest.raises(ValueError):
        zoo.ErasureParams(1.2, 0.4)
    with pytest.raises(ValueError):
        zoo.kim_xor(-0.1)

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relaybounds.probability import (
    ChannelSpec,
    JointDistribution,
    ShapeError,
    ValidationError,
    binary_entropy,
    build_joint,
    conditional_mutual_information,
    entropy,
    marginalize,
    mutual_information,
    prob_vector,
    star,
    stochastic_matrix,
)

from conftest import bsc


def simplex(n_min=1, n_max=6):
    return st.lists(st.floats(0.0, 1.0), min_size=n_min, max_size=n_max).filter(
        lambda w: sum(w) > 1e-3).map(lambda w: np.asarray(w) / sum(w))


def test_prob_vector_rejects_bad_mass_and_negatives():
    with pytest.raises(ValidationError, match="mass"):
        prob_vector([0.5, 0.4])
    with pytest.raises(ValidationError, match="negative"):
        prob_vector([1.2, -0.2])
    with pytest.raises(ShapeError):
        prob_vector([])


def test_prob_vector_normalizes_only_on_request():
    assert np.allclose(prob_vector([1, 3], normalize=True), [0.25, 0.75])
    v = prob_vector([0.5, 0.5])
    with pytest.raises(ValueError):
        v[0] = 1.0   # read-only


def test_stochastic_matrix_names_bad_row():
    with pytest.raises(ValidationError, match="row 1 sums to"):
        stochastic_matrix([[0.5, 0.5], [0.6, 0.3]])


def test_channel_spec_names_bad_kernel_row():
    kernel = np.ones((2, 2, 2)) / 2
    kernel[1, 0] = [0.6, 0.3]
    with pytest.raises(ValidationError, match=r"\[x=1\]\[t=0\]"):
        ChannelSpec(p_t=[0.5, 0.5], kernel=kernel)
    with pytest.raises(ShapeError):
        ChannelSpec(p_t=[1.0], kernel=np.ones((2, 2, 2)) / 2)


def test_entropy_values():
    assert entropy([1.0]) == 0.0
    assert entropy([0.25] * 4) == pytest.approx(2.0, abs=1e-15)
    assert binary_entropy(0.3) == pytest.approx(0.8812908992306927, abs=1e-15)
    assert binary_entropy(0.0) == 0.0
    with pytest.raises(ValueError):
        binary_entropy(1.5)


def test_star():
    assert star(0.1, 0.2) == pytest.approx(0.26, abs=1e-15)
    assert star(0.0, 0.3) == pytest.approx(0.3)
    assert star(0.5, 0.9) == pytest.approx(0.5)


@given(simplex())
def test_entropy_bounds_and_permutation(p):
    h = entropy(p)
    assert -1e-12 <= h <= np.log2(len(p)) + 1e-12
    assert entropy(p[::-1]) == pytest.approx(h, abs=1e-12)


def _bsc_joint(p=0.1):
    return JointDistribution(("X", "Y"), 0.5 * bsc(p))


def test_mutual_information_bsc():
    # 1 - h(0.1)
    assert mutual_information(_bsc_joint(), "X", "Y") == pytest.approx(0.531004, abs=1e-6)
    assert mutual_information(_bsc_joint(), "X", "Y") == pytest.approx(1 - binary_entropy(0.1), abs=1e-14)


def test_mutual_information_of_independent_pair_is_zero():
    joint = JointDistribution(("A", "B"), np.outer([0.3, 0.7], [0.2, 0.5, 0.3]))
    assert abs(mutual_information(joint, "A", "B")) < 1e-15


def test_copy_of_state():
    joint = JointDistribution(("T", "V"), np.diag([0.7, 0.3]))
    assert mutual_information(joint, "T", "V") == pytest.approx(0.881291, abs=1e-6)


def test_overlapping_groups_rejected():
    joint = _bsc_joint()
    with pytest.raises(ValueError, match="overlap"):
        mutual_information(joint, "X", "XY")
    with pytest.raises(ValueError):
        conditional_mutual_information(joint, "X", "Y", "Y")
    with pytest.raises(KeyError):
        marginalize(joint, "Z")


def test_conditional_mi_trivial_cases():
    # C independent of (A, B): I(A;B|C) = I(A;B)
    table = np.einsum("ab,c->abc", 0.5 * bsc(0.2), [0.4, 0.6])
    joint = JointDistribution(("A", "B", "C"), table)
    assert conditional_mutual_information(joint, "A", "B", "C") == pytest.approx(
        mutual_information(joint, "A", "B"), abs=1e-14)
    const = JointDistribution(("A", "B", "C"), np.ones((1, 1, 1)))
    assert conditional_mutual_information(const, "A", "B", "C") == 0.0


def test_erasure_broadcast_term(erasure):
    joint = build_joint([0.5, 0.5], erasure.channel, np.eye(2))
    assert conditional_mutual_information(joint, "X", "Y", "T") == pytest.approx(0.4, abs=1e-14)


def test_marginalize_reorders_axes():
    rng = np.random.default_rng(3)
    table = rng.dirichlet(np.ones(24)).reshape(2, 3, 4)
    joint = JointDistribution(("A", "B", "C"), table)
    m = marginalize(joint, "CA")
    assert m.labels == ("C", "A")
    assert np.allclose(m.table, table.sum(axis=1).T)


def test_build_joint_checks_shapes(erasure):
    with pytest.raises(ShapeError):
        build_joint([1.0], erasure.channel, np.eye(2))
    with pytest.raises(ShapeError):
        build_joint([0.5, 0.5], erasure.channel, np.eye(3))


def test_state_posterior():
    ch = ChannelSpec(p_t=[0.5, 0.5], kernel=np.ones((1, 2, 1)))
    joint = build_joint([1.0], ch, [[0.8, 0.2], [0.4, 0.6]])
    post = joint.state_posterior()
    assert post == pytest.approx([0.4 / 1.2, 0.6 / 0.8])


@given(st.integers(0, 10_000))
def test_markov_structure_of_built_joints(seed):
    rng = np.random.default_rng(seed)
    nx, nt, ny, nv = rng.integers(1, 4, size=4)
    ch = ChannelSpec(p_t=rng.dirichlet(np.ones(nt)), kernel=rng.dirichlet(np.ones(ny), size=(nx, nt)))
    joint = build_joint(rng.dirichlet(np.ones(nx)), ch, rng.dirichlet(np.ones(nv), size=nt))
    assert abs(mutual_information(joint, "X", "T")) < 1e-12
    assert abs(mutual_information(joint, "X", "V")) < 1e-12
    assert abs(conditional_mutual_information(joint, "XY", "V", "T")) < 1e-12
    chain = (mutual_information(joint, "V", "Y") + conditional_mutual_information(joint, "X", "Y", "V"))
    assert mutual_information(joint, "XV", "Y") == pytest.approx(chain, abs=1e-12)
    for a, b in (("X", "Y"), ("T", "V"), ("XV", "Y")):
        assert mutual_information(joint, a, b) >= -1e-12

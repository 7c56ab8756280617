import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mstae.data_io import SyntheticSpec, make_synthetic
from mstae.intrinsic_dim import estimate_dimension, hidden_sizes, layer_plan, round_half_up
from mstae.nn_core import forward, init_params


def test_hidden_sizes_d21_p3():
    assert hidden_sizes(21, 3, 4) == [12, 3, 12, 21]


def test_hidden_sizes_flat_when_d_equals_p():
    assert hidden_sizes(10, 10, 4) == [10, 10, 10, 10]


def test_no_compression_chain_runs():
    params = init_params(layer_plan(10, 10, 4), seed=0)
    assert forward(params, np.ones((3, 10))).output.shape == (3, 10)


def test_layer_plan_activations():
    specs = layer_plan(21, 3, 4)
    assert [s.activation for s in specs] == ["sigmoid"] * 3 + ["identity"]
    assert [(s.in_dim, s.out_dim) for s in specs] == [(21, 12), (12, 3), (3, 12), (12, 21)]


@pytest.mark.parametrize("bad", [(5, 6, 4), (5, 0, 4), (5, 2, 3), (5, 2, 0)])
def test_hidden_sizes_validation(bad):
    with pytest.raises(ValueError):
        hidden_sizes(*bad)


@given(st.integers(1, 60), st.integers(1, 60), st.sampled_from([2, 4, 6, 8, 10, 12]))
def test_hidden_sizes_properties(d, p, n_hidden):
    if p > d:
        return
    sizes = hidden_sizes(d, p, n_hidden)
    half = n_hidden // 2
    assert len(sizes) == n_hidden
    assert sizes[half - 1] == p
    assert sizes[-1] == d
    enc = sizes[:half]
    assert all(a >= b for a, b in zip(enc, enc[1:]))
    assert sizes[half:-1] == enc[-2::-1]


def test_round_half_up():
    assert [round_half_up(v) for v in (2.5, 3.5, 2.49, 0.5)] == [3, 4, 2, 1]


@pytest.mark.parametrize("seed", range(3))
def test_plane_in_3d(seed):
    rng = np.random.default_rng(seed)
    u = rng.uniform(size=(2000, 2))
    x = np.column_stack([u, np.zeros(2000)])
    assert estimate_dimension(x).p_hat == 2


def test_hypercube_5_in_20():
    x, _ = make_synthetic(SyntheticSpec("hypercube", 2000, 20, 5, 0.0, seed=0))
    assert estimate_dimension(x).p_hat in (4, 5, 6)


@given(st.floats(0.01, 100))
def test_scale_invariance(c):
    x = np.random.default_rng(0).normal(size=(200, 3))
    assert estimate_dimension(x).p_hat == estimate_dimension(c * x).p_hat


def test_duplicates_skipped():
    x = np.random.default_rng(0).normal(size=(100, 2))
    x = np.vstack([x, x[:5]])
    stats = estimate_dimension(x)
    assert stats.n_skipped == 10
    assert np.all(np.isfinite(stats.mu))


def test_line_gives_one():
    t = np.random.default_rng(1).uniform(size=(500, 1))
    assert estimate_dimension(np.hstack([t, 2 * t])).p_hat == 1

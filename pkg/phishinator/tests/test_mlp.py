import numpy as np
import pytest

from phishinator.classifiers import (
    ClassifierSpec, fit, mlp_loss_and_grads, predict_many, train_mlp)
from phishinator.classifiers.mlp import _split_validation, init_params
from phishinator.dataset import Dataset
from phishinator.errors import ConvergenceWarning
from phishinator.schema import canonical_schema
from phishinator.tests.conftest import make_dataset


def _pair():
    X = np.zeros((2, 30))
    X[:, 0] = [1, -1]
    return Dataset(canonical_schema(), X, [1, -1])


def test_softplus_gradients_match_finite_differences():
    rng = np.random.default_rng(0)
    d = make_dataset(n=25, seed=2)
    X = d.X.astype(float)
    t = (d.y + 1)/2
    params = init_params((30, 6, 4, 1), rng)
    _, grads = mlp_loss_and_grads(params, X, t, 'softplus', l2=1e-3)
    h = 1e-6
    for layer, (W, b) in enumerate(params):
        for arr, grad in ((W, grads[layer][0]), (b, grads[layer][1])):
            flat, gflat = arr.reshape(-1), grad.reshape(-1)
            for ii in rng.choice(flat.size, min(flat.size, 15), replace=False):
                old = flat[ii]
                flat[ii] = old + h
                lp, _ = mlp_loss_and_grads(params, X, t, 'softplus', 1e-3)
                flat[ii] = old - h
                lm, _ = mlp_loss_and_grads(params, X, t, 'softplus', 1e-3)
                flat[ii] = old
                num = (lp - lm)/(2*h)
                assert abs(num - gflat[ii]) <= 1e-4*max(1., abs(num))


def test_needs_a_hidden_layer(small):
    with pytest.raises(ValueError):
        train_mlp(small, layer_widths=[])
    with pytest.raises(ValueError):
        train_mlp(small, layer_widths=[4, 0])


def test_separable_pair():
    d = _pair()
    model = train_mlp(d, [4], epochs=300, learning_rate=.05)
    assert predict_many(model, d.X).tolist() == [1, -1]
    # Two rows leave nothing to hold out, so every epoch ran
    assert len(model.history) == 300 and not model.val_history


def test_early_stopping_keeps_best_epoch(medium):
    # With a huge tolerance nothing after the first epoch counts as better
    model = train_mlp(medium, [8], epochs=100, patience=3, tol=10.)
    assert len(model.history) == 4
    assert len(model.val_history) == 4
    assert model.converged


def test_epoch_cap_without_early_stop_warns(small):
    spec = ClassifierSpec('mlp', {'epochs': 2, 'patience': 10, 'width': 4})
    with pytest.warns(ConvergenceWarning):
        model = fit(spec, small)
    assert not model.converged


def test_seeded_training_is_deterministic(small):
    a = train_mlp(small, [5, 3], epochs=15, seed=11)
    b = train_mlp(small, [5, 3], epochs=15, seed=11)
    c = train_mlp(small, [5, 3], epochs=15, seed=12)
    assert all(np.array_equal(x, y) for x, y in zip(a.weights, b.weights))
    assert not np.array_equal(a.weights[0], c.weights[0])
    assert a.layer_sizes == (30, 5, 3, 1)


def test_learns_signal(medium):
    model = train_mlp(medium, [16], epochs=200, learning_rate=.01,
                      early_stopping=False, activation='softplus')
    assert model.converged
    assert np.mean(predict_many(model, medium.X) == medium.y) > .8
    assert model.history[-1] < model.history[0]


def test_layer_widths_override_width_and_depth(small):
    spec = ClassifierSpec('mlp', {'layer_widths': [3, 2], 'width': 50,
                                  'epochs': 1, 'early_stopping': False})
    assert fit(spec, small).layer_sizes == (30, 3, 2, 1)


def test_validation_carve_out_holds_both_classes():
    # Ten rows of forty are phishing; a random tenth can miss them all
    y = np.array([-1]*10 + [1]*30)
    for seed in range(20):
        fit_idx, val_idx = _split_validation(
            y, .1, np.random.default_rng(seed))
        assert val_idx.size == 4
        assert set(y[val_idx].tolist()) == {-1, 1}
        assert np.sum(y[val_idx] < 0) == 1
        assert sorted(np.r_[fit_idx, val_idx].tolist()) == list(range(40))
    fit_idx, val_idx = _split_validation(y[:5], .1, np.random.default_rng(0))
    assert val_idx is None and fit_idx.tolist() == list(range(5))

import itertools
import json
import warnings

import numpy as np
import pytest

from phishinator.classifiers import (
    DEFAULT_HYPERPARAMS, ClassifierSpec, KernelSpec, LinearModel,
    decision_function, fit, gini, kernel_eval, kernel_matrix, knn_predict,
    load_model, logistic_loss_and_grad, model_from_dict, model_to_dict,
    predict, predict_many, save_model, train_forest, train_knn,
    train_logistic, train_tree)
from phishinator.classifiers.ensemble import EnsembleModel
from phishinator.classifiers.tree import TreeModel, tree_predict
from phishinator.dataset import Dataset
from phishinator.errors import ConfigError, ConvergenceWarning, ModelFormatError
from phishinator.schema import canonical_schema
from phishinator.tests.conftest import make_dataset

# Settings small enough that every family trains in well under a second
QUICK = {
    'logistic': {'iterations': 200},
    'knn': {'k': 3},
    'svm': {},
    'tree': {},
    'forest': {'n_trees': 7},
    'adaboost': {'n_rounds': 10},
    'gboost': {'n_rounds': 10},
    'xgboost_like': {'n_rounds': 10},
    'mlp': {'epochs': 20, 'width': 8},
}


def _pair():
    X = np.zeros((2, 30), dtype=int)
    X[:, 0] = [1, -1]
    return Dataset(canonical_schema(), X, [1, -1])


def _dataset(rows, labels):
    X = np.zeros((len(rows), 30), dtype=int)
    X[:, :len(rows[0])] = rows
    return Dataset(canonical_schema(), X, labels)


def test_spec_defaults_and_overrides():
    spec = ClassifierSpec('forest', {'n_trees': 3})
    assert spec.hyperparams['n_trees'] == 3
    assert spec.hyperparams['max_features'] == 5
    assert set(spec.hyperparams) == set(DEFAULT_HYPERPARAMS['forest'])
    assert spec.seed == 42
    assert spec.with_params(n_trees=9).hyperparams['n_trees'] == 9
    assert ClassifierSpec.from_dict(spec.to_dict()) == spec


@pytest.mark.parametrize('family,hp', [
    ('knn', {'k': 0}),
    ('knn', {'metric': 'cosine'}),
    ('logistic', {'learning_rate': 0}),
    ('svm', {'kernel': 'laplace'}),
    ('svm', {'C': -1}),
    ('forest', {'max_features': 31}),
    ('gboost', {'learning_rate': 1.5}),
    ('xgboost_like', {'subsample': 0}),
    ('mlp', {'activation': 'tanh'}),
    ('tree', {'depth': 3}),
])
def test_spec_rejects_invalid_hyperparams(family, hp):
    with pytest.raises(ConfigError):
        ClassifierSpec(family, hp)


def test_spec_rejects_unknown_family_and_fields():
    with pytest.raises(ConfigError):
        ClassifierSpec('perceptron')
    with pytest.raises(ConfigError):
        ClassifierSpec.from_dict({'family': 'knn', 'params': {}})
    with pytest.raises(ConfigError):
        ClassifierSpec.from_dict({'hyperparams': {}})
    with pytest.raises(ConfigError):
        ClassifierSpec('knn', seed='x')


def test_kernel_values():
    e1 = np.eye(30)[0]
    assert kernel_eval(KernelSpec('rbf'), e1, e1) == 1.
    assert kernel_eval(KernelSpec('linear'), e1, e1) == 1.
    poly = KernelSpec('polynomial', gamma=1., r=1., d=2)
    assert kernel_eval(poly, [1, 1], [1, 1]) == pytest.approx(9.)
    sig = KernelSpec('sigmoid', gamma=.5, r=-1.)
    assert kernel_eval(sig, [1, 2], [3, 1]) == pytest.approx(np.tanh(1.5))
    rbf = KernelSpec('rbf', gamma=.25)
    assert kernel_eval(rbf, [0, 0], [2, 0]) == pytest.approx(np.exp(-1))
    with pytest.raises(ValueError):
        kernel_eval(rbf, [1, 2], [1, 2, 3])


def test_kernel_matrix_is_symmetric(small):
    for kind in ('linear', 'rbf', 'sigmoid', 'polynomial'):
        K = kernel_matrix(KernelSpec(kind), small.X, small.X)
        assert np.allclose(K, K.T)


def test_kernel_spec_validation():
    for bad in (dict(kind='cubic'), dict(C=0), dict(gamma=-1), dict(d=0),
                dict(d=1.5)):
        with pytest.raises(ConfigError):
            KernelSpec(**bad)
    k = KernelSpec('polynomial', 2., .5, 1., 4)
    assert KernelSpec.from_dict(k.to_dict()) == k


def test_logistic_gradient_matches_finite_differences():
    rng = np.random.default_rng(3)
    d = make_dataset(n=40, seed=3)
    X, y = d.X.astype(float), d.y.astype(float)
    h = 1e-6
    for _ in range(10):
        w, b = rng.normal(size=30)*.3, float(rng.normal())
        _, gw, gb = logistic_loss_and_grad(w, b, X, y, 1e-2)
        num = np.empty(31)
        for ii in range(31):
            wp, wm, bp, bm = w.copy(), w.copy(), b, b
            if ii < 30:
                wp[ii] += h
                wm[ii] -= h
            else:
                bp, bm = b + h, b - h
            lp, _, _ = logistic_loss_and_grad(wp, bp, X, y, 1e-2)
            lm, _, _ = logistic_loss_and_grad(wm, bm, X, y, 1e-2)
            num[ii] = (lp - lm)/(2*h)
        assert np.allclose(np.r_[gw, gb], num, rtol=1e-6, atol=1e-8)


def test_logistic_zero_iterations_is_tie_constant(small):
    model = train_logistic(small, iterations=0)
    assert not model.weights.any() and model.bias == 0
    assert set(predict_many(model, small.X).tolist()) == {1}


def test_logistic_descends_and_learns_sign():
    d = _dataset([[-1], [-1], [1], [1]], [-1, -1, 1, 1])
    model = train_logistic(d, iterations=500)
    assert model.weights[0] > 0
    assert all(b <= a for a, b in zip(model.history, model.history[1:]))
    assert predict_many(model, d.X).tolist() == [-1, -1, 1, 1]


@pytest.mark.parametrize('family,hp', [
    ('logistic', {'iterations': 1000}),
    ('knn', {'k': 1}),
    ('svm', {'kernel': 'linear', 'C': 100.}),
    ('tree', {}),
    ('forest', {'n_trees': 5, 'max_features': 30}),
    ('adaboost', {}),
    ('gboost', {'n_rounds': 20}),
    ('xgboost_like', {'n_rounds': 20, 'min_child_weight': 0.}),
])
def test_separable_pair(family, hp):
    d = _pair()
    model = fit(ClassifierSpec(family, hp), d)
    assert predict_many(model, d.X).tolist() == [1, -1]


def test_knn_basics(small):
    for ii in (0, 7, 33):
        assert knn_predict(small, small.X[ii], k=1) == small.y[ii]
    n_phish, n_legit = small.class_counts()
    majority = 1 if n_legit >= n_phish else -1
    assert knn_predict(small, small.X[0], k=len(small)) == majority
    with pytest.raises(ValueError):
        knn_predict(small, small.X[0], k=0)
    with pytest.raises(ValueError):
        knn_predict(small, small.X[0], k=len(small) + 1)
    with pytest.raises(ValueError):
        knn_predict(small, small.X[0, :10], k=3)


def test_knn_hand_set():
    d = _dataset([[0, 0], [1, 0], [1, 1], [-1, -1], [-1, 0]],
                 [1, 1, -1, -1, -1])
    # Distances from (1, 1): 0, 1, sqrt(2), sqrt(5), 2*sqrt(2)
    assert knn_predict(d, np.r_[[1, 1], np.zeros(28)], k=3) == 1
    assert knn_predict(d, np.r_[[-1, 1], np.zeros(28)], k=3) == -1


def test_knn_matches_brute_force():
    rng = np.random.default_rng(8)
    for trial in range(20):
        train = make_dataset(n=int(rng.integers(5, 200)), seed=trial)
        queries = rng.integers(-1, 2, size=(10, 30))
        k = int(rng.integers(1, min(15, len(train)) + 1))
        for metric in ('euclidean', 'cityblock'):
            model = train_knn(train, k, metric)
            got = predict_many(model, queries)
            for q, label in zip(queries, got):
                diff = train.X - q
                dist = (np.sqrt((diff**2).sum(axis=1)) if metric == 'euclidean'
                        else np.abs(diff).sum(axis=1))
                order = sorted(range(len(train)), key=lambda i: (dist[i], i))
                vote = int(train.y[order[:k]].sum())
                assert label == (1 if vote >= 0 else -1)


def test_gini_values():
    assert gini(2, 2) == 0
    assert gini(2, 4) == pytest.approx(.5)
    assert gini(0, 0) == 0


def test_pure_node_is_a_leaf():
    d = Dataset(canonical_schema(), np.zeros((2, 30)), [1, 1])
    with pytest.raises(ValueError):
        train_tree(d)
    tree = train_tree(_pair())
    assert tree.n_nodes == 3
    assert tree.feature[0] == 0 and tree.threshold[0] == 0


def _best_root_gain(X, y):
    def impurity(lab):
        if lab.size == 0:
            return 0.
        p = np.mean(lab > 0)
        return 1 - p**2 - (1 - p)**2
    best = -np.inf
    for f in range(X.shape[1]):
        for thr in (-.5, .5):
            left = X[:, f] <= thr
            if left.all() or not left.any():
                continue
            gain = impurity(y) - (left.mean()*impurity(y[left])
                                  + (~left).mean()*impurity(y[~left]))
            best = max(best, gain)
    return best


def test_tree_root_split_matches_enumeration():
    rng = np.random.default_rng(21)
    for _ in range(300):
        n = int(rng.integers(2, 9))
        X = np.zeros((n, 30), dtype=int)
        X[:, :4] = rng.integers(-1, 2, size=(n, 4))
        y = rng.permutation(np.r_[[-1, 1], rng.choice([-1, 1], n - 2)])
        d = Dataset(canonical_schema(), X, y)
        tree = train_tree(d)
        best = _best_root_gain(X, y)
        if tree.feature[0] < 0:
            assert best == -np.inf
            continue
        f, thr = tree.feature[0], tree.threshold[0]
        left = X[:, f] <= thr
        parent = gini(np.sum(y > 0), n)
        chosen = parent - (left.mean()*gini(np.sum(y[left] > 0), left.sum())
                           + (~left).mean()*gini(np.sum(y[~left] > 0),
                                                 (~left).sum()))
        assert chosen == pytest.approx(best, abs=1e-12)


def test_tree_respects_depth_and_leaf_size(medium):
    tree = train_tree(medium, max_depth=2)
    assert tree.depth() <= 2
    tree = train_tree(medium, min_leaf=20)
    leaves = tree.feature < 0
    assert tree.counts[leaves].sum(axis=1).min() >= 20
    full = train_tree(medium)
    assert (tree_predict(full, medium.X) == medium.y).mean() >= .9


def test_tree_counts_and_children(medium):
    tree = train_tree(medium, max_depth=4)
    internal = tree.feature >= 0
    assert np.all(tree.left[internal] > 0) and np.all(tree.right[internal] > 0)
    assert np.all(tree.counts >= 0)
    assert np.all(tree.counts.sum(axis=1) > 0)


def test_forest_of_one_tree_equals_tree(medium):
    forest = train_forest(medium, n_trees=1, max_features=30,
                          bootstrap=False, seed=4)
    tree = train_tree(medium)
    assert np.array_equal(predict_many(forest, medium.X),
                          tree_predict(tree, medium.X))


def test_forest_majority_vote():
    stumps = []
    for value in (-1., -1., 1.):
        stumps.append(TreeModel(
            feature=np.array([-1]), threshold=np.zeros(1),
            left=np.array([-1]), right=np.array([-1]),
            value=np.array([value]), counts=np.ones((1, 2))))
    forest = EnsembleModel(tuple(stumps), np.ones(3), 'majority-vote')
    assert predict(forest, np.zeros(30)) == -1


def test_forest_does_not_depend_on_jobs(medium):
    a = train_forest(medium, n_trees=6, seed=9, n_jobs=1)
    b = train_forest(medium, n_trees=6, seed=9, n_jobs=2)
    assert np.array_equal(decision_function(a, medium.X),
                          decision_function(b, medium.X))


@pytest.mark.parametrize('family', sorted(QUICK))
def test_uniform_contract_and_determinism(family, small):
    spec = ClassifierSpec(family, QUICK[family], seed=5)
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', ConvergenceWarning)
        model = fit(spec, small)
        again = fit(spec, small)
    labels = predict_many(model, small.X)
    assert set(labels.tolist()) <= {-1, 1}
    assert np.array_equal(decision_function(model, small.X),
                          decision_function(again, small.X))
    assert predict(model, small.X[0]) == labels[0]
    with pytest.raises(ValueError):
        decision_function(model, small.X[:, :29])


@pytest.mark.parametrize('family', sorted(QUICK))
def test_serialization_roundtrip(family, small, tmp_path):
    spec = ClassifierSpec(family, QUICK[family])
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', ConvergenceWarning)
        model = fit(spec, small)
    path = tmp_path / 'model.json'
    save_model(model, path, spec)
    back = load_model(path)
    assert type(back) is type(model)
    queries = np.array(list(itertools.product((-1, 0, 1), repeat=3))*2)
    queries = np.pad(queries, ((0, 0), (0, 27)))
    for X in (small.X, queries):
        assert np.array_equal(decision_function(model, X),
                              decision_function(back, X))
    record = json.loads(path.read_text())
    assert record['spec'] == spec.to_dict()


def test_model_format_errors(tmp_path, small):
    model = train_logistic(small, iterations=5)
    obj = model_to_dict(model)
    assert isinstance(model_from_dict(obj), LinearModel)
    for change in ({'format_version': 2}, {'features': ['a']},
                   {'model': {'kind': 'bayes'}}, {'model': {'kind': 'linear'}}):
        bad = dict(obj)
        bad.update(change)
        with pytest.raises(ModelFormatError):
            model_from_dict(bad)
    path = tmp_path / 'corrupt.json'
    path.write_text('{"format_version": 1,\n  "model": [')
    with pytest.raises(ModelFormatError, match='line 2'):
        load_model(path)
    with pytest.raises(ModelFormatError):
        load_model(tmp_path / 'missing.json')


def test_tie_rule_predicts_legitimate():
    model = LinearModel(np.zeros(30), 0.)
    assert predict(model, np.zeros(30)) == 1
    with pytest.raises(ValueError):
        predict(model, np.zeros((2, 30)))


def test_single_class_training_is_rejected():
    d = Dataset(canonical_schema(), np.zeros((4, 30)), [1]*4)
    for family in ('logistic', 'svm', 'tree', 'forest', 'adaboost',
                   'gboost', 'xgboost_like', 'mlp'):
        with pytest.raises(ValueError):
            fit(ClassifierSpec(family), d)
    model = fit(ClassifierSpec('knn', {'k': 1}), d)
    assert predict(model, np.zeros(30)) == 1


def test_empty_training_set_is_rejected():
    d = Dataset(canonical_schema(), np.zeros((0, 30)), [])
    with pytest.raises(ValueError):
        fit(ClassifierSpec('knn'), d)

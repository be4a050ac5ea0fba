"""One fit/predict interface over every classifier family."""

import logging
from time import time
from typing import Union

import numpy as np
import numpy.typing as npt

from phishinator.classifiers.adaboost import train_adaboost
from phishinator.classifiers.base import (
    ClassifierSpec, report_convergence, sign_with_tie)
from phishinator.classifiers.ensemble import EnsembleModel
from phishinator.classifiers.forest import train_forest
from phishinator.classifiers.gboost import train_gboost
from phishinator.classifiers.kernels import KernelSpec
from phishinator.classifiers.knn import KnnModel, train_knn
from phishinator.classifiers.logistic import LinearModel, train_logistic
from phishinator.classifiers.mlp import MlpModel, train_mlp
from phishinator.classifiers.svm import KernelMachineModel, train_svm_smo
from phishinator.classifiers.tree import TreeModel, train_tree
from phishinator.classifiers.xgboost_like import train_xgboost_like
from phishinator.dataset import Dataset

logger = logging.getLogger(__name__)

TrainedModel = Union[LinearModel, KnnModel, KernelMachineModel, TreeModel,
                     EnsembleModel, MlpModel]


def _fit_svm(train, hp, seed):
    gamma = hp['gamma'] if hp['gamma'] is not None else 1/train.X.shape[1]
    kernel = KernelSpec(hp['kernel'], hp['C'], gamma, hp['r'], hp['degree'])
    return train_svm_smo(train, kernel, tol=hp['tol'],
                         max_passes=hp['max_passes'],
                         cache_rows=hp['cache_rows'])


def _fit_mlp(train, hp, seed):
    widths = hp['layer_widths']
    if widths is None:
        widths = [hp['width']]*hp['depth']
    params = {k: v for k, v in hp.items()
              if k not in ('width', 'depth', 'layer_widths')}
    return train_mlp(train, widths, seed=seed, **params)


_TRAINERS = {
    'logistic': lambda d, hp, seed: train_logistic(d, **hp),
    'knn': lambda d, hp, seed: train_knn(d, **hp),
    'svm': _fit_svm,
    'tree': lambda d, hp, seed: train_tree(d, **hp),
    'forest': lambda d, hp, seed: train_forest(d, seed=seed, **hp),
    'adaboost': lambda d, hp, seed: train_adaboost(d, **hp),
    'gboost': lambda d, hp, seed: train_gboost(d, **hp),
    'xgboost_like': lambda d, hp, seed: train_xgboost_like(
        d, seed=seed, **hp),
    'mlp': _fit_mlp,
}


def fit(spec: ClassifierSpec, train: Dataset) -> TrainedModel:
    """Train the classifier ``spec`` names.

    Parameters
    ----------
    spec : ClassifierSpec
        Family, validated hyperparameters and seed.
    train : Dataset
        Non-empty; both classes present unless the family is knn.

    Returns
    -------
    model : TrainedModel
        Immutable.  A model whose trainer hit its iteration cap has
        ``converged == False`` and a ConvergenceWarning is issued.
    """
    if len(train) == 0:
        raise ValueError('Cannot train on an empty dataset')
    t0 = time()
    model = _TRAINERS[spec.family](train, dict(spec.hyperparams), spec.seed)
    logger.debug('Took %g seconds to fit %s on %d samples', time() - t0,
                 spec.family, len(train))
    report_convergence(model, spec.family)
    return model


def decision_function(model: TrainedModel, X: npt.ArrayLike) -> np.ndarray:
    """Real scores; positive means legitimate.

    Raises
    ------
    ValueError
        ``X`` does not have ``model.n_features`` columns.
    """
    X = np.asarray(X)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ValueError('Expected %d features per sample, got shape %s' % (
            model.n_features, X.shape))
    return model.decision(X)


def predict_many(model: TrainedModel, X: npt.ArrayLike) -> np.ndarray:
    """Labels in {-1, +1} for every row of ``X``."""
    return sign_with_tie(decision_function(model, X))


def predict(model: TrainedModel, x: npt.ArrayLike) -> int:
    """Label of a single feature vector; a score of exactly 0 gives +1."""
    x = np.asarray(x)
    if x.ndim != 1:
        raise ValueError('predict takes one feature vector; use predict_many')
    return int(predict_many(model, x)[0])

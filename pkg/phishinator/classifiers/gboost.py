"""Gradient boosting of regression trees on the logistic loss.

Labels map to targets ``t = (y + 1)/2``.  The model score ``F`` starts
at the prior log-odds; each round fits a squared-error tree to the
negative gradient ``t - expit(F)`` and sets each leaf to one Newton
step, ``sum(t - p)/sum(p(1 - p))``, scaled by the learning rate.
"""

import logging
from time import time

import numpy as np
from scipy.special import expit

from phishinator.classifiers.base import check_two_classes
from phishinator.classifiers.ensemble import EnsembleModel
from phishinator.classifiers.tree import VarianceCriterion, grow_tree
from phishinator.dataset import Dataset

logger = logging.getLogger(__name__)


def prior_log_odds(y: np.ndarray) -> float:
    """``log(P/(1 - P))`` with ``P`` the fraction of +1 labels."""
    p = np.mean(y > 0)
    p = min(max(p, 1e-12), 1 - 1e-12)
    return float(np.log(p/(1 - p)))


def logistic_loss(F: np.ndarray, y: np.ndarray) -> float:
    """Mean ``log(1 + exp(-y F))``."""
    return float(np.mean(np.logaddexp(0, -y*F)))


def train_gboost(train: Dataset, n_rounds: int = 200,
                 learning_rate: float = .1, max_depth: int = 3,
                 min_leaf: int = 1) -> EnsembleModel:
    """Stagewise additive logistic model.

    Returns
    -------
    model : EnsembleModel
        Additive score; ``history[0]`` is the loss of the prior alone,
        ``history[m]`` the training loss after round ``m``.
    """
    assert 0 < learning_rate <= 1, 'learning_rate must be in (0, 1]'
    check_two_classes(train.y, 'gboost')
    X = train.X
    y = train.y.astype(np.float64)
    t = (y + 1)/2
    F0 = prior_log_odds(y)
    F = np.full(y.size, F0)
    history = [logistic_loss(F, y)]
    trees = []
    t0 = time()
    for _ in range(n_rounds):
        p = expit(F)
        crit = VarianceCriterion(t - p, p*(1 - p))
        tree = grow_tree(X, train.y, crit, max_depth=max_depth,
                         min_leaf=min_leaf)
        F = F + learning_rate*tree.decision(X)
        trees.append(tree)
        history.append(logistic_loss(F, y))
    logger.info('Took %g seconds for %d boosting rounds, loss %g',
                time() - t0, n_rounds, history[-1])
    return EnsembleModel(tuple(trees), np.full(len(trees), learning_rate),
                         'additive-score', base_score=F0,
                         history=tuple(history), n_features=X.shape[1])

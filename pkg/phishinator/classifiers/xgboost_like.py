"""Second-order (Newton) boosting with regularized leaves.

Each round uses the gradient ``g = p - t`` and hessian ``h = p(1-p)``
of the logistic loss at the current score.  Leaves take the weight
``-G/(H + lambda)``; a split is kept only when

    1/2 [G_L^2/(H_L + lambda) + G_R^2/(H_R + lambda) - G^2/(H + lambda)]
    - gamma

is positive.  Split search is exact: every cut between the ternary
levels is scored.
"""

import logging
from time import time
from typing import Optional

import numpy as np
from scipy.special import expit

from phishinator.classifiers.base import check_two_classes
from phishinator.classifiers.ensemble import EnsembleModel
from phishinator.classifiers.gboost import logistic_loss, prior_log_odds
from phishinator.classifiers.tree import NewtonCriterion, grow_tree
from phishinator.dataset import Dataset

logger = logging.getLogger(__name__)


def train_xgboost_like(train: Dataset, n_rounds: int = 200,
                       learning_rate: float = .1, lambda_l2: float = 1.,
                       gamma_min_gain: float = 0., subsample: float = 1.,
                       colsample: float = 1., max_depth: int = 3,
                       min_child_weight: float = 1., seed: int = 42,
                       rng: Optional[np.random.Generator] = None
                       ) -> EnsembleModel:
    """Regularized gradient boosting.

    Parameters
    ----------
    train : Dataset
        Both classes present.
    n_rounds : int, optional
        Number of trees.
    learning_rate : float, optional
        Shrinkage of every tree, in (0, 1].
    lambda_l2 : float, optional
        L2 penalty on leaf weights.
    gamma_min_gain : float, optional
        Cost of each additional leaf.
    subsample : float, optional
        Fraction of rows drawn without replacement per tree.
    colsample : float, optional
        Fraction of features drawn per tree.
    max_depth : int, optional
        Depth of every tree.
    min_child_weight : float, optional
        Minimum hessian sum of a child.
    seed : int, optional
        Seeds the row and column draws.

    Returns
    -------
    model : EnsembleModel
        Additive score starting at the prior log-odds.  ``history[0]``
        is the loss of the prior alone, ``history[m]`` the training loss
        after round ``m``.  The summed tree penalty
        ``gamma*T + lambda/2*||eta w||^2`` is logged, not recorded.
    """
    assert lambda_l2 >= 0 and gamma_min_gain >= 0, (
        'lambda_l2 and gamma_min_gain must be non-negative')
    assert 0 < subsample <= 1 and 0 < colsample <= 1, (
        'subsample and colsample must be in (0, 1]')
    check_two_classes(train.y, 'xgboost_like')
    rng = np.random.default_rng(seed) if rng is None else rng
    X = train.X
    y = train.y.astype(np.float64)
    t = (y + 1)/2
    n, n_features = X.shape
    n_rows = max(1, int(np.ceil(subsample*n)))
    n_cols = max(1, int(round(colsample*n_features)))

    F0 = prior_log_odds(y)
    F = np.full(n, F0)
    history = [logistic_loss(F, y)]
    trees = []
    penalty = 0.
    t0 = time()
    for _ in range(n_rounds):
        p = expit(F)
        g, h = p - t, p*(1 - p)
        rows = (np.arange(n) if n_rows == n
                else np.sort(rng.choice(n, n_rows, replace=False)))
        cols = (None if n_cols == n_features
                else np.sort(rng.choice(n_features, n_cols, replace=False)))
        crit = NewtonCriterion(g[rows], h[rows], lambda_l2, gamma_min_gain,
                               min_child_weight)
        tree = grow_tree(X[rows], train.y[rows], crit, max_depth=max_depth,
                         feature_subset=cols)
        F = F + learning_rate*tree.decision(X)
        trees.append(tree)
        leaves = tree.value[tree.feature < 0]
        penalty += (gamma_min_gain*leaves.size
                    + .5*lambda_l2*np.sum((learning_rate*leaves)**2))
        history.append(logistic_loss(F, y))
    logger.info('Took %g seconds for %d regularized boosting rounds, '
                'loss %g, tree penalty %g', time() - t0, n_rounds,
                history[-1], penalty/n)
    return EnsembleModel(tuple(trees), np.full(len(trees), learning_rate),
                         'additive-score', base_score=F0,
                         history=tuple(history), n_features=n_features)

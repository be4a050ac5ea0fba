"""AdaBoost over weight-aware Gini stumps."""

import logging

import numpy as np

from phishinator.classifiers.base import check_two_classes, sign_with_tie
from phishinator.classifiers.ensemble import EnsembleModel
from phishinator.classifiers.tree import train_tree
from phishinator.dataset import Dataset

logger = logging.getLogger(__name__)

_EPS_FLOOR = 1e-10


def member_weight(eps: float) -> float:
    """``1/2 ln((1 - eps)/eps)`` with ``eps`` clipped away from 0 and 1."""
    eps = min(max(eps, _EPS_FLOOR), 1 - _EPS_FLOOR)
    return .5*np.log((1 - eps)/eps)


def train_adaboost(train: Dataset, n_rounds: int = 100,
                   depth: int = 1) -> EnsembleModel:
    """Discrete AdaBoost.

    Parameters
    ----------
    train : Dataset
        Both classes present.
    n_rounds : int, optional
        Maximum number of weak learners.
    depth : int, optional
        Depth of each weak learner; 1 gives stumps.

    Returns
    -------
    model : EnsembleModel
        Weighted vote; ``history`` holds the sum of the sample weights
        after every round's renormalization.

    Raises
    ------
    ValueError
        The first weak learner is no better than chance.

    Notes
    -----
    Boosting stops early after a learner with zero weighted error (it
    is kept, its weight computed from the clipped error) or before a
    learner with weighted error of at least 1/2 (it is dropped).
    """
    assert n_rounds >= 1, 'n_rounds must be at least 1'
    check_two_classes(train.y, 'adaboost')
    y = train.y.astype(np.float64)
    w = np.full(y.size, 1/y.size)
    members, alphas, sums = [], [], []
    for rnd in range(n_rounds):
        stump = train_tree(train, max_depth=depth, weight=w)
        h = sign_with_tie(stump.decision(train.X))
        eps = float(w[h != y].sum())
        if eps >= .5:
            if rnd == 0:
                raise ValueError(
                    'First weak learner has weighted error %g >= 0.5' % eps)
            logger.warning('Stopping AdaBoost at round %d, error %g', rnd, eps)
            break
        alpha = member_weight(eps)
        members.append(stump)
        alphas.append(alpha)
        w = w*np.exp(-alpha*y*h)
        w /= w.sum()
        sums.append(float(w.sum()))
        if eps <= _EPS_FLOOR:
            logger.debug('Weak learner is perfect at round %d', rnd)
            break
    return EnsembleModel(tuple(members), np.asarray(alphas),
                         'weighted-vote', history=tuple(sums),
                         n_features=train.X.shape[1])

"""Random forest: bagged Gini trees with per-split feature sampling."""

import logging
from time import time
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from phishinator.classifiers.base import check_two_classes
from phishinator.classifiers.ensemble import EnsembleModel
from phishinator.classifiers.tree import TreeModel, train_tree
from phishinator.dataset import Dataset

logger = logging.getLogger(__name__)


def _grow_member(train: Dataset, seed_seq: np.random.SeedSequence,
                 bootstrap: bool, max_features: int,
                 max_depth: Optional[int], min_leaf: int) -> TreeModel:
    rng = np.random.default_rng(seed_seq)
    weight = None
    if bootstrap:
        n = len(train)
        weight = np.bincount(rng.integers(0, n, n), minlength=n)
        if np.unique(train.y[weight > 0]).size < 2:
            # One-class resample; fall back to the full sample
            weight = None
    return train_tree(train, max_depth=max_depth, min_leaf=min_leaf,
                      weight=weight, max_features=max_features, rng=rng)


def train_forest(train: Dataset, n_trees: int = 100, max_features: int = 5,
                 bootstrap: bool = True, seed: int = 42,
                 max_depth: Optional[int] = None, min_leaf: int = 1,
                 n_jobs: int = 1) -> EnsembleModel:
    """Majority vote of ``n_trees`` independently grown trees.

    Parameters
    ----------
    train : Dataset
        Training samples, both classes present.
    n_trees : int, optional
        Ensemble size.
    max_features : int, optional
        Features considered at each split.
    bootstrap : bool, optional
        Grow every tree on a resample drawn with replacement.  A drawn
        row counts as often as it was drawn.
    seed : int, optional
        Every tree gets its own stream spawned from this seed, so the
        forest does not depend on ``n_jobs``.
    max_depth, min_leaf : optional
        Tree parameters.
    n_jobs : int, optional
        Trees grown in parallel.

    Returns
    -------
    forest : EnsembleModel
        Uniform weights, majority-vote aggregation.
    """
    assert n_trees >= 1, 'n_trees must be at least 1'
    assert 1 <= max_features <= train.X.shape[1], (
        'max_features must be in [1, %d]' % train.X.shape[1])
    check_two_classes(train.y, 'forest')
    seeds = np.random.SeedSequence(seed).spawn(n_trees)
    t0 = time()
    trees = Parallel(n_jobs=n_jobs)(
        delayed(_grow_member)(train, s, bootstrap, max_features,
                              max_depth, min_leaf) for s in seeds)
    logger.info('Took %g seconds to grow %d trees', time() - t0, n_trees)
    return EnsembleModel(tuple(trees), np.ones(n_trees), 'majority-vote',
                         n_features=train.X.shape[1])

"""Binary decision trees over ternary features.

One greedy grower serves three uses:

    * classification trees split by weighted Gini decrease,
    * regression trees on residuals (gradient boosting), split by
      squared-error decrease,
    * second-order trees (regularized boosting), split by the gain of
      gradient and hessian sums.

A criterion only has to say how additive per-sample statistics turn
into a split gain and a leaf value; the grower sums the statistics for
every candidate cut at once.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np

from phishinator.classifiers.base import (
    check_two_classes, freeze, sign_with_tie)
from phishinator.dataset import Dataset

logger = logging.getLogger(__name__)

_LEAF = -1


def gini(pos_weight: float, total_weight: float) -> float:
    """Gini impurity ``1 - p^2 - (1-p)^2`` of a node."""
    if total_weight <= 0:
        return 0.
    p = pos_weight/total_weight
    return 1 - p**2 - (1 - p)**2


class GiniCriterion:
    """Statistics (w, w*[y=+1]); leaf label is the weighted majority."""
    n_stats = 2
    min_gain = -1e-12

    def __init__(self, y: np.ndarray, weight: np.ndarray):
        self.stats = np.column_stack((weight, weight*(y > 0)))

    @staticmethod
    def _impurity_mass(S):
        # W*gini = 2*P*(W-P)/W
        W, P = S[..., 0], S[..., 1]
        with np.errstate(invalid='ignore', divide='ignore'):
            return np.where(W > 0, 2*P*(W - P)/W, 0.)

    def gain(self, total, left, right):
        W = total[0]
        return (self._impurity_mass(total) - self._impurity_mass(left)
                - self._impurity_mass(right))/W

    def valid(self, left, right):
        return (left[:, 0] > 0) & (right[:, 0] > 0)

    def is_pure(self, total):
        return total[1] <= 0 or total[1] >= total[0]

    def leaf_value(self, total):
        return 1. if total[1] >= total[0] - total[1] else -1.


class VarianceCriterion:
    """Squared-error splits on residuals with Newton leaf values.

    Statistics are (1, r, r^2, h); a leaf predicts ``sum(r)/sum(h)``,
    one Newton step of the logistic loss when ``r = t - p`` and
    ``h = p(1-p)``.
    """
    n_stats = 4
    min_gain = -1e-12

    def __init__(self, residual: np.ndarray, hessian: np.ndarray):
        self.stats = np.column_stack(
            (np.ones_like(residual), residual, residual**2, hessian))

    @staticmethod
    def _sse(S):
        n, a, b = S[..., 0], S[..., 1], S[..., 2]
        with np.errstate(invalid='ignore', divide='ignore'):
            return np.where(n > 0, b - a**2/n, 0.)

    def gain(self, total, left, right):
        return self._sse(total) - self._sse(left) - self._sse(right)

    def valid(self, left, right):
        return (left[:, 0] > 0) & (right[:, 0] > 0)

    def is_pure(self, total):
        return self._sse(total) <= 1e-12*max(total[0], 1.)

    def leaf_value(self, total):
        if abs(total[3]) < 1e-150:
            return 0.
        return total[1]/total[3]


class NewtonCriterion:
    """Gradient/hessian sums with L2 leaf penalty and split cost."""
    n_stats = 2
    min_gain = 0.

    def __init__(self, grad: np.ndarray, hess: np.ndarray,
                 lambda_l2: float = 1., gamma_min_gain: float = 0.,
                 min_child_weight: float = 1.):
        self.stats = np.column_stack((grad, hess))
        self.lambda_l2 = lambda_l2
        self.gamma_min_gain = gamma_min_gain
        self.min_child_weight = min_child_weight

    def _score(self, S):
        G, H = S[..., 0], S[..., 1]
        return G**2/(H + self.lambda_l2)

    def gain(self, total, left, right):
        with np.errstate(invalid='ignore', divide='ignore'):
            g = .5*(self._score(left) + self._score(right)
                    - self._score(total)) - self.gamma_min_gain
        return np.nan_to_num(g, nan=-np.inf, posinf=-np.inf)

    def valid(self, left, right):
        return ((left[:, 1] >= self.min_child_weight)
                & (right[:, 1] >= self.min_child_weight))

    def is_pure(self, total):
        return False

    def leaf_value(self, total):
        return leaf_weight(total[0], total[1], self.lambda_l2)


def leaf_weight(G: float, H: float, lambda_l2: float) -> float:
    """Optimal leaf weight ``-G/(H + lambda)``."""
    denom = H + lambda_l2
    if denom <= 0:
        return 0.
    return -G/denom


@dataclass(frozen=True, eq=False)
class TreeModel:
    """Tree stored as parallel node arrays in preorder.

    Attributes
    ----------
    feature : array_like
        Split feature per node, -1 at leaves.
    threshold : array_like
        Split value per node; rows with ``x[feature] <= threshold`` go
        left.
    left, right : array_like
        Child node ids, -1 at leaves.
    value : array_like
        Leaf output: a label in {-1, +1} for classification trees, a
        real score for boosting trees.
    counts : array_like
        Per-node (phishing, legitimate) training weight.
    """
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    counts: np.ndarray
    n_features: int = 30
    converged: bool = True

    def __post_init__(self):
        n = self.feature.shape[0]
        assert n > 0, 'Tree needs at least one node'
        for a in (self.threshold, self.left, self.right, self.value):
            assert a.shape == (n,), 'Node arrays disagree in length'
        assert self.counts.shape == (n, 2), 'counts must be (n_nodes, 2)'
        internal = self.feature >= 0
        assert np.all((self.left >= 0) == internal) and np.all(
            (self.right >= 0) == internal), (
                'Internal nodes need exactly two children')
        freeze(self.feature, self.threshold, self.left, self.right,
               self.value, self.counts)

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.sum(self.feature < 0))

    def depth(self) -> int:
        depth = np.zeros(self.n_nodes, dtype=int)
        for ii in range(self.n_nodes):
            if self.feature[ii] >= 0:
                depth[self.left[ii]] = depth[self.right[ii]] = depth[ii] + 1
        return int(depth.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf id reached by every row of ``X``."""
        X = np.asarray(X)
        node = np.zeros(X.shape[0], dtype=np.intp)
        while True:
            f = self.feature[node]
            ii = np.flatnonzero(f >= 0)
            if ii.size == 0:
                return node
            go_left = X[ii, f[ii]] <= self.threshold[node[ii]]
            node[ii] = np.where(
                go_left, self.left[node[ii]], self.right[node[ii]])

    def decision(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> Dict[str, Any]:
        def node(ii):
            out = {'counts': [float(c) for c in self.counts[ii]]}
            if self.feature[ii] < 0:
                out['value'] = float(self.value[ii])
            else:
                out.update(feature=int(self.feature[ii]),
                           threshold=float(self.threshold[ii]),
                           left=node(self.left[ii]),
                           right=node(self.right[ii]))
            return out
        return {'kind': 'tree', 'n_features': self.n_features,
                'root': node(0)}

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> 'TreeModel':
        builder = _NodeArrays()

        def visit(nd):
            ii = builder.add()
            builder.counts[ii] = tuple(nd['counts'])
            if 'feature' in nd:
                builder.feature[ii] = int(nd['feature'])
                builder.threshold[ii] = float(nd['threshold'])
                builder.left[ii] = visit(nd['left'])
                builder.right[ii] = visit(nd['right'])
            else:
                builder.value[ii] = float(nd['value'])
            return ii
        visit(obj['root'])
        return builder.build(int(obj['n_features']))


class _NodeArrays:
    def __init__(self):
        self.feature, self.threshold = [], []
        self.left, self.right, self.value, self.counts = [], [], [], []

    def add(self) -> int:
        self.feature.append(_LEAF)
        self.threshold.append(0.)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        self.value.append(0.)
        self.counts.append((0., 0.))
        return len(self.feature) - 1

    def build(self, n_features: int) -> TreeModel:
        return TreeModel(
            feature=np.array(self.feature, dtype=np.int32),
            threshold=np.array(self.threshold, dtype=np.float64),
            left=np.array(self.left, dtype=np.int32),
            right=np.array(self.right, dtype=np.int32),
            value=np.array(self.value, dtype=np.float64),
            counts=np.array(self.counts, dtype=np.float64).reshape(-1, 2),
            n_features=n_features)


def grow_tree(X: np.ndarray, y: np.ndarray, criterion,
              max_depth: Optional[int] = None, min_leaf: int = 1,
              max_features: Optional[int] = None,
              feature_subset: Optional[Sequence[int]] = None,
              weight: Optional[np.ndarray] = None,
              rng: Optional[np.random.Generator] = None) -> TreeModel:
    """Greedy top-down tree growth.

    Parameters
    ----------
    X : array_like
        (n, n_features) feature matrix.
    y : array_like
        Labels in {-1, +1}; only used for the per-node class counts.
    criterion : GiniCriterion or VarianceCriterion or NewtonCriterion
        Holds the per-sample statistics of the rows of ``X``.
    max_depth : int or None, optional
        Maximum depth; None grows until purity or ``min_leaf``.
    min_leaf : int, optional
        Minimum number of rows per child.
    max_features : int or None, optional
        Features drawn without replacement at every node.
    feature_subset : sequence of int, optional
        Features the whole tree may use.
    weight : array_like, optional
        Sample weights for the class counts.
    rng : numpy.random.Generator, optional
        Needed when ``max_features`` is smaller than the candidate set.

    Returns
    -------
    tree : TreeModel

    Notes
    -----
    Cuts lie between consecutive feature levels present in the data.
    The stored threshold is the midpoint of the largest value going
    left and the smallest going right among the node's rows.  Among
    equal gains the lowest (feature, cut) pair wins.
    """
    X = np.asarray(X)
    n, n_features = X.shape
    weight = np.ones(n) if weight is None else np.asarray(weight, float)
    candidates = (np.arange(n_features) if feature_subset is None
                  else np.sort(np.asarray(feature_subset, dtype=int)))
    if max_features is not None and max_features < candidates.size:
        assert rng is not None, 'Feature subsampling needs an rng'
    else:
        max_features = None
    levels = np.unique(X)
    stats = criterion.stats
    class_w = np.column_stack((weight*(y < 0), weight*(y > 0)))
    nodes = _NodeArrays()

    def build(idx, depth):
        ii = nodes.add()
        nodes.counts[ii] = tuple(class_w[idx].sum(axis=0))
        total = stats[idx].sum(axis=0)
        split = None
        if ((max_depth is None or depth < max_depth)
                and idx.size >= 2*min_leaf
                and not criterion.is_pure(total)):
            split = _best_split(X[idx], stats[idx], total, idx.size)
        if split is None:
            nodes.value[ii] = criterion.leaf_value(total)
            return ii
        f, thr = split
        go_left = X[idx, f] <= thr
        nodes.feature[ii] = f
        nodes.threshold[ii] = thr
        nodes.left[ii] = build(idx[go_left], depth + 1)
        nodes.right[ii] = build(idx[~go_left], depth + 1)
        return ii

    def _best_split(Xn, Sn, total, m):
        cols = candidates
        if max_features is not None:
            cols = np.sort(rng.choice(candidates, max_features, replace=False))
        Xc = Xn[:, cols]
        gains = np.full((cols.size, max(levels.size - 1, 0)), -np.inf)
        for c in range(levels.size - 1):
            mask = Xc <= levels[c]
            n_left = mask.sum(axis=0)
            ok = (n_left >= min_leaf) & (m - n_left >= min_leaf)
            if not ok.any():
                continue
            left = mask.T.astype(np.float64) @ Sn
            right = total[None, :] - left
            ok &= criterion.valid(left, right)
            gains[:, c] = np.where(ok, criterion.gain(total, left, right),
                                   -np.inf)
        if gains.size == 0:
            return None
        best = int(np.argmax(gains))
        fi, c = divmod(best, gains.shape[1])
        if not gains[fi, c] > criterion.min_gain:
            return None
        col = Xc[:, fi]
        lo = col[col <= levels[c]].max()
        hi = col[col > levels[c]].min()
        return int(cols[fi]), (float(lo) + float(hi))/2

    build(np.arange(n), 0)
    return nodes.build(n_features)


def train_tree(train: Dataset, max_depth: Optional[int] = None,
               min_leaf: int = 1, impurity: str = 'gini',
               weight: Optional[np.ndarray] = None,
               max_features: Optional[int] = None,
               rng: Optional[np.random.Generator] = None) -> TreeModel:
    """Classification tree grown by Gini decrease.

    Parameters
    ----------
    train : Dataset
        Training samples with both classes present.
    max_depth : int or None, optional
        Depth cap; None for unlimited.
    min_leaf : int, optional
        Minimum rows per leaf.
    impurity : {'gini'}, optional
        Split criterion.
    weight : array_like, optional
        Non-negative sample weights; rows of zero weight are ignored.
    max_features, rng : optional
        Per-node feature subsampling (random forests).

    Returns
    -------
    tree : TreeModel
        Leaves hold labels in {-1, +1}.
    """
    if impurity != 'gini':
        raise ValueError('Only gini impurity is supported, got %r' % impurity)
    check_two_classes(train.y, 'tree')
    X, y = train.X, train.y
    if weight is not None:
        weight = np.asarray(weight, dtype=np.float64)
        assert weight.shape == y.shape and np.all(weight >= 0), (
            'weights must be non-negative, one per sample')
        keep = weight > 0
        X, y, weight = X[keep], y[keep], weight[keep]
    else:
        weight = np.ones(y.size)
    tree = grow_tree(X, y, GiniCriterion(y, weight), max_depth=max_depth,
                     min_leaf=min_leaf, max_features=max_features,
                     weight=weight, rng=rng)
    logger.debug('Grew tree with %d nodes, depth %d', tree.n_nodes,
                 tree.depth())
    return tree


def tree_predict(tree: TreeModel, X: np.ndarray) -> np.ndarray:
    return sign_with_tie(tree.decision(X))

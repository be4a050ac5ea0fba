"""k-nearest-neighbour voting."""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import cdist

from phishinator.classifiers.base import KNN_METRICS, freeze, sign_with_tie
from phishinator.dataset import Dataset

# Query rows per distance block
_CHUNK = 512


@dataclass(frozen=True, eq=False)
class KnnModel:
    """The training set itself plus k and the metric.

    Neighbours at equal distance are taken in training order (stable
    sort); a vote of exactly zero predicts +1.
    """
    X: np.ndarray
    y: np.ndarray
    k: int = 5
    metric: str = 'euclidean'
    converged: bool = True

    def __post_init__(self):
        assert self.X.shape[0] == self.y.shape[0] > 0, (
            'KNN needs a non-empty training set')
        if not 1 <= self.k <= self.y.size:
            raise ValueError('k must be in [1, %d], got %d' % (
                self.y.size, self.k))
        if self.metric not in KNN_METRICS:
            raise ValueError('Unknown metric %r' % self.metric)
        freeze(self.X, self.y)

    @property
    def n_features(self) -> int:
        return int(self.X.shape[1])

    def neighbours(self, X: np.ndarray) -> np.ndarray:
        """(n, k) training indices of the nearest points, closest first."""
        X = np.asarray(X, dtype=np.float64)
        out = np.empty((X.shape[0], self.k), dtype=np.intp)
        for lo in range(0, X.shape[0], _CHUNK):
            D = cdist(X[lo:lo + _CHUNK], self.X, self.metric)
            out[lo:lo + _CHUNK] = np.argsort(
                D, axis=1, kind='stable')[:, :self.k]
        return out

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Sum of neighbour labels."""
        return self.y[self.neighbours(X)].sum(axis=1).astype(np.float64)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'knn', 'k': self.k, 'metric': self.metric,
                'X': self.X.tolist(), 'y': self.y.tolist()}

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> 'KnnModel':
        return cls(np.asarray(obj['X'], dtype=np.float64),
                   np.asarray(obj['y'], dtype=np.int8),
                   int(obj['k']), obj['metric'])


def train_knn(train: Dataset, k: int = 5,
              metric: str = 'euclidean') -> KnnModel:
    """Store the training set; any non-empty set works."""
    if len(train) == 0:
        raise ValueError('Cannot train knn on an empty dataset')
    return KnnModel(train.X.astype(np.float64), train.y.copy(), k, metric)


def knn_predict(train: Dataset, x: npt.ArrayLike, k: int = 5,
                metric: str = 'euclidean') -> int:
    """Majority label among the ``k`` training points nearest to ``x``.

    Raises
    ------
    ValueError
        ``k`` outside ``[1, len(train)]`` or ``x`` of the wrong length.
    """
    model = train_knn(train, k, metric)
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != model.n_features:
        raise ValueError('Expected %d features, got %d' % (
            model.n_features, x.size))
    return int(sign_with_tie(model.decision(x[None, :]))[0])

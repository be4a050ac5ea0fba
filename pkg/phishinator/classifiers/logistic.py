"""L2-regularized logistic regression by full-batch gradient descent."""

import logging
from dataclasses import dataclass, field
from time import time
from typing import Any, Dict, Tuple

import numpy as np
from scipy.special import expit, log_expit

from phishinator.classifiers.base import check_two_classes, freeze
from phishinator.dataset import Dataset
from phishinator.errors import DivergenceError

logger = logging.getLogger(__name__)

# Step halvings tried before an iteration gives up
_MAX_BACKTRACK = 30


@dataclass(frozen=True, eq=False)
class LinearModel:
    """Weights and bias of a linear decision function ``w.x + b``."""
    weights: np.ndarray
    bias: float
    converged: bool = True
    history: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        assert np.all(np.isfinite(self.weights)) and np.isfinite(self.bias), (
            'Linear model parameters must be finite')
        freeze(self.weights)

    @property
    def n_features(self) -> int:
        return int(self.weights.size)

    def decision(self, X: np.ndarray) -> np.ndarray:
        return np.asarray(X, dtype=np.float64) @ self.weights + self.bias

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'linear', 'weights': self.weights.tolist(),
                'bias': float(self.bias)}

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> 'LinearModel':
        return cls(np.asarray(obj['weights'], dtype=np.float64),
                   float(obj['bias']))


def logistic_loss_and_grad(w: np.ndarray, b: float, X: np.ndarray,
                           y: np.ndarray, l2: float
                           ) -> Tuple[float, np.ndarray, float]:
    """Mean negative log-likelihood plus ``l2/2*||w||^2`` and its gradient.

    Parameters
    ----------
    w, b : array_like, float
        Parameters.
    X : array_like
        (n, d) inputs.
    y : array_like
        Labels in {-1, +1}.
    l2 : float
        Penalty weight; the bias is not penalized.

    Returns
    -------
    loss : float
    grad_w : array_like
    grad_b : float
    """
    margin = y*(X @ w + b)
    loss = -np.mean(log_expit(margin)) + .5*l2*np.dot(w, w)
    coef = -y*expit(-margin)/y.size
    return float(loss), X.T @ coef + l2*w, float(coef.sum())


def train_logistic(train: Dataset, learning_rate: float = .1,
                   iterations: int = 2000, l2: float = 1e-4) -> LinearModel:
    """Fit logistic regression.

    Parameters
    ----------
    train : Dataset
        Training samples, both classes present.
    learning_rate : float, optional
        Initial step size of every iteration.
    iterations : int, optional
        Number of descent steps; 0 leaves all parameters at zero.
    l2 : float, optional
        Ridge penalty on the weights.

    Returns
    -------
    model : LinearModel
        ``history`` holds the loss after every accepted step.

    Raises
    ------
    DivergenceError
        Loss or gradient became non-finite.

    Notes
    -----
    A step that would raise the loss is halved until it does not, so
    the recorded loss never increases.  When no halving helps the
    iterate is a stationary point up to rounding and descent stops.
    """
    assert learning_rate > 0, 'learning_rate must be positive'
    check_two_classes(train.y, 'logistic')
    X = train.X.astype(np.float64)
    y = train.y.astype(np.float64)
    w = np.zeros(X.shape[1])
    b = 0.
    loss, gw, gb = logistic_loss_and_grad(w, b, X, y, l2)
    history = []
    t0 = time()
    for it in range(iterations):
        step = learning_rate
        for _ in range(_MAX_BACKTRACK):
            w_new, b_new = w - step*gw, b - step*gb
            new_loss, new_gw, new_gb = logistic_loss_and_grad(
                w_new, b_new, X, y, l2)
            if not np.isfinite(new_loss) or not np.all(np.isfinite(new_gw)):
                raise DivergenceError(
                    'Logistic loss became non-finite at iteration %d '
                    '(step %g)' % (it, step))
            if new_loss <= loss:
                break
            step /= 2
        else:
            logger.debug('No descent step found at iteration %d', it)
            break
        w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
        history.append(loss)
    logger.debug('Took %g seconds for %d logistic iterations, loss %g',
                 time() - t0, len(history), loss)
    return LinearModel(w, b, history=tuple(history))

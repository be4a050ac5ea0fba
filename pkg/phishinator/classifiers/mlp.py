"""Feed-forward network with a sigmoid output, trained with Adam."""

import logging
from dataclasses import dataclass, field
from time import time
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import expit

from phishinator.classifiers.base import check_two_classes, freeze
from phishinator.dataset import Dataset, stratified_mask
from phishinator.errors import DivergenceError

logger = logging.getLogger(__name__)

Params = List[Tuple[np.ndarray, np.ndarray]]


def _activate(z, activation):
    if activation == 'relu':
        return np.maximum(z, 0)
    return np.logaddexp(0, z)


def _activate_grad(z, activation):
    if activation == 'relu':
        return (z > 0).astype(z.dtype)
    return expit(z)


def forward(params: Params, X: np.ndarray,
            activation: str = 'relu') -> Tuple[np.ndarray, list]:
    """Output logits and the (pre-activation, activation) of each layer."""
    a = np.asarray(X, dtype=np.float64)
    cache = []
    for ii, (W, b) in enumerate(params):
        z = a @ W + b
        cache.append((a, z))
        a = z if ii == len(params) - 1 else _activate(z, activation)
    return a[:, 0], cache


def mlp_loss_and_grads(params: Params, X: np.ndarray, t: np.ndarray,
                       activation: str = 'relu', l2: float = 0.
                       ) -> Tuple[float, Params]:
    """Mean binary cross-entropy plus ``l2/2*sum(W^2)``, with gradients.

    Parameters
    ----------
    params : list of (W, b)
        Layer weights ``W`` of shape (fan_in, fan_out) and biases.
    X : array_like
        (n, d) inputs.
    t : array_like
        Targets in {0, 1}.
    activation : {'relu', 'softplus'}, optional
        Hidden activation.  'softplus' is smooth and is what finite
        difference checks should use.
    l2 : float, optional
        Weight decay; biases are not penalized.

    Returns
    -------
    loss : float
    grads : list of (dW, db)
    """
    logits, cache = forward(params, X, activation)
    n = t.size
    loss = np.mean(np.logaddexp(0, logits) - t*logits)
    loss += .5*l2*sum(np.sum(W**2) for W, _ in params)
    delta = ((expit(logits) - t)/n)[:, None]
    grads = [None]*len(params)
    for ii in reversed(range(len(params))):
        a, _ = cache[ii]
        W = params[ii][0]
        grads[ii] = (a.T @ delta + l2*W, delta.sum(axis=0))
        if ii:
            delta = (delta @ W.T)*_activate_grad(cache[ii - 1][1], activation)
    return float(loss), grads


@dataclass(frozen=True, eq=False)
class MlpModel:
    """Layer parameters of a trained network.

    ``layer_sizes`` runs from the input width to the single output.
    """
    layer_sizes: Tuple[int, ...]
    weights: Tuple[np.ndarray, ...]
    biases: Tuple[np.ndarray, ...]
    activation: str = 'relu'
    converged: bool = True
    history: Tuple[float, ...] = field(default=())
    val_history: Tuple[float, ...] = field(default=())

    def __post_init__(self):
        sizes = self.layer_sizes
        assert len(sizes) >= 3 and sizes[-1] == 1, (
            'Need at least one hidden layer and a single output')
        assert len(self.weights) == len(self.biases) == len(sizes) - 1
        for ii, (W, b) in enumerate(zip(self.weights, self.biases)):
            assert W.shape == (sizes[ii], sizes[ii + 1]), (
                'Layer %d has shape %s, expected %s' % (
                    ii, W.shape, (sizes[ii], sizes[ii + 1])))
            assert b.shape == (sizes[ii + 1],)
            assert np.all(np.isfinite(W)) and np.all(np.isfinite(b)), (
                'Network parameters must be finite')
        freeze(*self.weights, *self.biases)

    @property
    def n_features(self) -> int:
        return int(self.layer_sizes[0])

    @property
    def params(self) -> Params:
        return list(zip(self.weights, self.biases))

    def decision(self, X: np.ndarray) -> np.ndarray:
        """Output logit; 0 corresponds to a sigmoid output of exactly 1/2."""
        return forward(self.params, X, self.activation)[0]

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'mlp', 'layer_sizes': list(self.layer_sizes),
                'activation': self.activation,
                'weights': [W.tolist() for W in self.weights],
                'biases': [b.tolist() for b in self.biases]}

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> 'MlpModel':
        sizes = tuple(int(s) for s in obj['layer_sizes'])
        weights = tuple(
            np.asarray(W, dtype=np.float64).reshape(sizes[ii], sizes[ii + 1])
            for ii, W in enumerate(obj['weights']))
        biases = tuple(np.asarray(b, dtype=np.float64) for b in obj['biases'])
        return cls(sizes, weights, biases, obj['activation'])


def init_params(layer_sizes: Sequence[int],
                rng: np.random.Generator) -> Params:
    """He-normal weights and zero biases."""
    return [(rng.normal(0, np.sqrt(2/fan_in), size=(fan_in, fan_out)),
             np.zeros(fan_out))
            for fan_in, fan_out in zip(layer_sizes[:-1], layer_sizes[1:])]


def _split_validation(y, fraction, rng):
    n_val = int(np.floor(fraction*y.size))
    if n_val < 1 or y.size - n_val < 1:
        return np.arange(y.size), None
    is_val = stratified_mask(y, fraction, n_val, rng)
    return np.flatnonzero(~is_val), np.flatnonzero(is_val)


def train_mlp(train: Dataset, layer_widths: Optional[Sequence[int]] = None,
              epochs: int = 500, learning_rate: float = 1e-3,
              beta1: float = .9, beta2: float = .999, epsilon: float = 1e-8,
              batch_size: int = 200, l2: float = 1e-4,
              early_stopping: bool = True, patience: int = 10,
              validation_fraction: float = .1, tol: float = 1e-4,
              activation: str = 'relu', seed: int = 42) -> MlpModel:
    """Mini-batch backpropagation with Adam on binary cross-entropy.

    Parameters
    ----------
    train : Dataset
        Both classes present.
    layer_widths : sequence of int, optional
        Hidden layer widths; one layer of 30 by default.
    epochs : int, optional
        Epoch cap.
    learning_rate, beta1, beta2, epsilon : float, optional
        Adam parameters.
    batch_size : int, optional
        Capped at the number of training rows.
    l2 : float, optional
        Weight decay.
    early_stopping : bool, optional
        Hold out ``validation_fraction`` of the rows (seeded) and stop
        once the validation loss has not improved by ``tol`` for
        ``patience`` epochs.  The parameters with the best validation
        loss are returned.  Too few rows to hold any out disables it.
    activation : {'relu', 'softplus'}, optional
        Hidden activation.
    seed : int, optional
        Seeds initialization, the validation carve-out and shuffling.

    Returns
    -------
    model : MlpModel
        ``converged`` is False only when early stopping was active and
        the epoch cap came first.

    Raises
    ------
    ValueError
        No hidden layer or a width below 1.
    DivergenceError
        Non-finite training loss.
    """
    widths = [30] if layer_widths is None else list(layer_widths)
    if not widths or any(int(w) != w or w < 1 for w in widths):
        raise ValueError(
            'Need at least one hidden layer of width >= 1, got %s' % widths)
    check_two_classes(train.y, 'mlp')
    rng = np.random.default_rng(seed)
    X = train.X.astype(np.float64)
    t = (train.y.astype(np.float64) + 1)/2
    sizes = (X.shape[1], *[int(w) for w in widths], 1)

    fit_idx, val_idx = np.arange(t.size), None
    if early_stopping:
        fit_idx, val_idx = _split_validation(train.y, validation_fraction, rng)
        if val_idx is None:
            logger.debug('Too few rows for a validation carve-out')
    Xf, tf = X[fit_idx], t[fit_idx]
    batch = min(batch_size, tf.size)

    params = init_params(sizes, rng)
    m = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params]
    v = [(np.zeros_like(W), np.zeros_like(b)) for W, b in params]
    step = 0
    history, val_history = [], []
    best_val, best_params, stale = np.inf, params, 0
    stopped_early = False
    t0 = time()
    for epoch in range(epochs):
        order = rng.permutation(tf.size)
        total = 0.
        for lo in range(0, tf.size, batch):
            idx = order[lo:lo + batch]
            loss, grads = mlp_loss_and_grads(params, Xf[idx], tf[idx],
                                             activation, l2)
            if not np.isfinite(loss):
                raise DivergenceError(
                    'MLP loss became non-finite in epoch %d' % epoch)
            total += loss*idx.size
            step += 1
            lr = learning_rate*np.sqrt(1 - beta2**step)/(1 - beta1**step)
            new = []
            for ii, ((W, b), (dW, db)) in enumerate(zip(params, grads)):
                mW = beta1*m[ii][0] + (1 - beta1)*dW
                mb = beta1*m[ii][1] + (1 - beta1)*db
                vW = beta2*v[ii][0] + (1 - beta2)*dW**2
                vb = beta2*v[ii][1] + (1 - beta2)*db**2
                m[ii], v[ii] = (mW, mb), (vW, vb)
                new.append((W - lr*mW/(np.sqrt(vW) + epsilon),
                            b - lr*mb/(np.sqrt(vb) + epsilon)))
            params = new
        history.append(total/tf.size)

        if val_idx is not None:
            val_loss, _ = mlp_loss_and_grads(params, X[val_idx], t[val_idx],
                                             activation, 0.)
            val_history.append(val_loss)
            if val_loss < best_val - tol:
                best_val, best_params, stale = val_loss, params, 0
            else:
                stale += 1
                if stale >= patience:
                    stopped_early = True
                    break
    if val_idx is None:
        best_params = params
    converged = val_idx is None or stopped_early or epochs == 0
    logger.info('Took %g seconds to train %s network for %d epochs',
                time() - t0, 'x'.join(map(str, sizes)), len(history))
    return MlpModel(sizes, tuple(W for W, _ in best_params),
                    tuple(b for _, b in best_params), activation,
                    converged=converged, history=tuple(history),
                    val_history=tuple(val_history))

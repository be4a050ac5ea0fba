"""Soft-margin kernel SVM trained by sequential minimal optimization.

Notes
-----
The dual

    min_a  1/2 a'Qa - e'a,   Q_ij = y_i y_j k(x_i, x_j)
    s.t.   0 <= a_i <= C,    y'a = 0

is solved two variables at a time.  Each step picks the maximal
violating pair from the gradient (first-order selection), solves the
two-variable subproblem analytically, clips it to the box and updates
the gradient with the two changed kernel rows.

Passes alternate the way Platt's original routine does: a pass over
all variables, then repeated passes restricted to the free (non-bound)
variables until they stop changing, then a full pass again.  A full
pass that changes nothing means the largest KKT violation is below
``tol``.

References
----------
.. [1] Platt, J. C. "Sequential minimal optimization: A fast algorithm
       for training support vector machines." Technical report
       MSR-TR-98-14, Microsoft Research (1998).
.. [2] Fan, R.-E., Chen, P.-H., Lin, C.-J. "Working set selection using
       second order information for training support vector machines."
       JMLR 6 (2005): 1889-1918.
"""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from time import time
from typing import Any, Dict, Optional

import numpy as np

from phishinator.classifiers.base import check_two_classes, freeze
from phishinator.classifiers.kernels import (
    KernelSpec, kernel_diag, kernel_matrix)
from phishinator.dataset import Dataset

logger = logging.getLogger(__name__)

_TAU = 1e-12
_CHUNK = 1024


@dataclass(frozen=True, eq=False)
class KernelMachineModel:
    """Support vectors with their dual coefficients.

    The decision score is ``sum_i alpha_i y_i k(sv_i, x) + bias``.
    """
    support_vectors: np.ndarray
    alphas: np.ndarray
    labels: np.ndarray
    bias: float
    kernel: KernelSpec
    converged: bool = True
    n_iter: int = 0

    def __post_init__(self):
        n = self.alphas.shape[0]
        assert self.support_vectors.shape[0] == n == self.labels.shape[0], (
            'Support vectors, alphas and labels disagree in length')
        assert np.all(self.alphas >= 0) and np.all(
            self.alphas <= self.kernel.C), 'Alphas must lie in [0, C]'
        assert np.isfinite(self.bias), 'Bias must be finite'
        freeze(self.support_vectors, self.alphas, self.labels)

    @property
    def n_features(self) -> int:
        return int(self.support_vectors.shape[1])

    def dual_residual(self) -> float:
        """``|sum alpha_i y_i|``."""
        return float(abs(np.dot(self.alphas, self.labels)))

    def decision(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        coef = self.alphas*self.labels
        out = np.full(X.shape[0], self.bias)
        if coef.size == 0:
            return out
        for lo in range(0, X.shape[0], _CHUNK):
            K = kernel_matrix(self.kernel, X[lo:lo + _CHUNK],
                              self.support_vectors)
            out[lo:lo + _CHUNK] += K @ coef
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'kernel_machine', 'kernel': self.kernel.to_dict(),
                'support_vectors': self.support_vectors.tolist(),
                'alphas': self.alphas.tolist(),
                'labels': self.labels.tolist(), 'bias': float(self.bias),
                'n_features': self.n_features}

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> 'KernelMachineModel':
        sv = np.asarray(obj['support_vectors'], dtype=np.float64)
        return cls(sv.reshape(-1, int(obj['n_features'])),
                   np.asarray(obj['alphas'], dtype=np.float64),
                   np.asarray(obj['labels'], dtype=np.float64),
                   float(obj['bias']), KernelSpec.from_dict(obj['kernel']))


class _RowCache:
    """LRU cache of rows of Q."""

    def __init__(self, X, y, kernel, size):
        self.X, self.y, self.kernel = X, y, kernel
        self.size = size
        self.rows = OrderedDict()
        self.misses = 0

    def __getitem__(self, ii):
        row = self.rows.get(ii)
        if row is not None:
            self.rows.move_to_end(ii)
            return row
        self.misses += 1
        row = self.y[ii]*self.y*kernel_matrix(
            self.kernel, self.X[ii:ii + 1], self.X)[0]
        self.rows[ii] = row
        if len(self.rows) > self.size:
            self.rows.popitem(last=False)
        return row


def _select_pair(alpha, grad, y, C, active):
    """Maximal violating pair among ``active`` and its KKT gap."""
    yg = -y*grad
    up = np.where(y > 0, alpha < C, alpha > 0) & active
    low = np.where(y > 0, alpha > 0, alpha < C) & active
    if not up.any() or not low.any():
        return None, None, 0.
    ii = int(np.argmax(np.where(up, yg, -np.inf)))
    jj = int(np.argmin(np.where(low, yg, np.inf)))
    return ii, jj, float(yg[ii] - yg[jj])


def _update_pair(ii, jj, alpha, grad, y, C, QD, rows):
    """Solve the two-variable subproblem in place; libsvm's update."""
    Qi, Qj = rows[ii], rows[jj]
    old_ai, old_aj = alpha[ii], alpha[jj]
    if y[ii] != y[jj]:
        quad = max(QD[ii] + QD[jj] + 2*Qi[jj], _TAU)
        delta = (-grad[ii] - grad[jj])/quad
        diff = alpha[ii] - alpha[jj]
        alpha[ii] += delta
        alpha[jj] += delta
        if diff > 0:
            if alpha[jj] < 0:
                alpha[jj], alpha[ii] = 0., diff
        elif alpha[ii] < 0:
            alpha[ii], alpha[jj] = 0., -diff
        if diff > 0:
            if alpha[ii] > C:
                alpha[ii], alpha[jj] = C, C - diff
        elif alpha[jj] > C:
            alpha[jj], alpha[ii] = C, C + diff
    else:
        quad = max(QD[ii] + QD[jj] - 2*Qi[jj], _TAU)
        delta = (grad[ii] - grad[jj])/quad
        total = alpha[ii] + alpha[jj]
        alpha[ii] -= delta
        alpha[jj] += delta
        if total > C:
            if alpha[ii] > C:
                alpha[ii], alpha[jj] = C, total - C
        elif alpha[jj] < 0:
            alpha[jj], alpha[ii] = 0., total
        if total > C:
            if alpha[jj] > C:
                alpha[jj], alpha[ii] = C, total - C
        elif alpha[ii] < 0:
            alpha[ii], alpha[jj] = 0., total
    grad += Qi*(alpha[ii] - old_ai) + Qj*(alpha[jj] - old_aj)


def _bias(alpha, grad, y, C):
    yg = y*grad
    free = (alpha > 0) & (alpha < C)
    if free.any():
        rho = float(yg[free].mean())
    else:
        at_upper = alpha >= C
        ub_mask = np.where(y > 0, at_upper, ~at_upper)
        lb_mask = np.where(y > 0, ~at_upper, at_upper)
        ub = yg[ub_mask].min() if ub_mask.any() else np.inf
        lb = yg[lb_mask].max() if lb_mask.any() else -np.inf
        rho = float((ub + lb)/2) if np.isfinite(ub + lb) else 0.
    return -rho


def train_svm_smo(train: Dataset, kernel: Optional[KernelSpec] = None,
                  tol: float = 1e-3, max_passes: int = 10000,
                  cache_rows: int = 1024) -> KernelMachineModel:
    """Train a soft-margin SVM.

    Parameters
    ----------
    train : Dataset
        Both classes must be present.
    kernel : KernelSpec, optional
        Kernel and box constraint; RBF with ``gamma = 1/n_features``
        by default.
    tol : float, optional
        KKT violation tolerance.
    max_passes : int, optional
        Cap on passes over the working set.
    cache_rows : int, optional
        Kernel rows kept in the LRU cache.

    Returns
    -------
    model : KernelMachineModel
        Only rows with ``alpha > 0`` are kept.  ``converged`` is False
        when ``max_passes`` ran out first.
    """
    check_two_classes(train.y, 'svm')
    X = train.X.astype(np.float64)
    y = train.y.astype(np.float64)
    if kernel is None:
        kernel = KernelSpec('rbf', 1., 1/X.shape[1])
    C = kernel.C
    n = y.size
    alpha = np.zeros(n)
    grad = -np.ones(n)
    QD = kernel_diag(kernel, X)
    rows = _RowCache(X, y, kernel, cache_rows)
    everything = np.ones(n, dtype=bool)

    t0 = time()
    n_iter = passes = 0
    examine_all = True
    converged = False
    while passes < max_passes:
        passes += 1
        active = everything if examine_all else (alpha > 0) & (alpha < C)
        changed = 0
        for _ in range(int(active.sum())):
            ii, jj, gap = _select_pair(alpha, grad, y, C, active)
            if ii is None or gap < tol:
                break
            _update_pair(ii, jj, alpha, grad, y, C, QD, rows)
            changed += 1
        n_iter += changed
        if examine_all:
            if changed == 0:
                converged = True
                break
            examine_all = False
        elif changed == 0:
            examine_all = True

    bias = _bias(alpha, grad, y, C)
    sv = alpha > 0
    logger.info('Took %g seconds for SMO: %d updates in %d passes, '
                '%d support vectors, %d kernel rows computed',
                time() - t0, n_iter, passes, int(sv.sum()), rows.misses)
    return KernelMachineModel(
        support_vectors=X[sv], alphas=alpha[sv], labels=y[sv], bias=bias,
        kernel=kernel, converged=converged, n_iter=n_iter)

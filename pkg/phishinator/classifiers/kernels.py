"""Kernel functions of the support vector machine.

Notes
-----
The four kernels are the usual ones:

    linear      a.b
    rbf         exp(-gamma*||a - b||^2)
    sigmoid     tanh(gamma*a.b + r)
    polynomial  (gamma*a.b + r)^d

Some references write the RBF kernel with an extra ``+C`` inside the
exponent.  That only scales every kernel entry by ``e^C`` and does not
change which dual solution is optimal, so ``C`` here is always the box
constraint of the dual and never part of a kernel value.
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import cdist

from phishinator.classifiers.base import KERNELS
from phishinator.errors import ConfigError


@dataclass(frozen=True)
class KernelSpec:
    """Kernel kind and its parameters, plus the SVM box constraint."""
    kind: str = 'rbf'
    C: float = 1.
    gamma: float = 1/30
    r: float = 0.
    d: int = 3

    def __post_init__(self):
        if self.kind not in KERNELS:
            raise ConfigError('Unknown kernel %r; expected one of %s' % (
                self.kind, KERNELS))
        if not self.C > 0 or not np.isfinite(self.C):
            raise ConfigError('Box constraint C must be positive')
        if not self.gamma > 0 or not np.isfinite(self.gamma):
            raise ConfigError('Kernel gamma must be positive')
        if not np.isfinite(self.r):
            raise ConfigError('Kernel offset r must be finite')
        if int(self.d) != self.d or self.d < 1:
            raise ConfigError('Polynomial degree d must be a positive integer')

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind, 'C': float(self.C),
                'gamma': float(self.gamma), 'r': float(self.r),
                'd': int(self.d)}

    @classmethod
    def from_dict(cls, obj: Dict[str, Any]) -> 'KernelSpec':
        return cls(obj['kind'], obj['C'], obj['gamma'], obj['r'], obj['d'])


def kernel_eval(spec: KernelSpec, a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Kernel value of two vectors.

    Raises
    ------
    ValueError
        Vectors of different length.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise ValueError('Kernel arguments differ in dimension: %d != %d' % (
            a.size, b.size))
    return float(kernel_matrix(spec, a[None, :], b[None, :])[0, 0])


def kernel_matrix(spec: KernelSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Gram matrix ``K[i, j] = k(A[i], B[j])``."""
    A = np.asarray(A, dtype=np.float64)
    B = np.asarray(B, dtype=np.float64)
    if A.shape[1] != B.shape[1]:
        raise ValueError('Kernel arguments differ in dimension: %d != %d' % (
            A.shape[1], B.shape[1]))
    if spec.kind == 'rbf':
        return np.exp(-spec.gamma*cdist(A, B, 'sqeuclidean'))
    dots = A @ B.T
    if spec.kind == 'linear':
        return dots
    if spec.kind == 'sigmoid':
        return np.tanh(spec.gamma*dots + spec.r)
    return (spec.gamma*dots + spec.r)**int(spec.d)


def kernel_diag(spec: KernelSpec, A: np.ndarray) -> np.ndarray:
    """``k(A[i], A[i])`` for every row."""
    A = np.asarray(A, dtype=np.float64)
    if spec.kind == 'rbf':
        return np.ones(A.shape[0])
    sq = np.einsum('ij,ij->i', A, A)
    if spec.kind == 'linear':
        return sq
    if spec.kind == 'sigmoid':
        return np.tanh(spec.gamma*sq + spec.r)
    return (spec.gamma*sq + spec.r)**int(spec.d)

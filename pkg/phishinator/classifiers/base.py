"""Classifier specs, hyperparameter defaults and shared helpers."""

import copy
import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, Mapping

import numpy as np
import numpy.typing as npt

from phishinator.errors import ConfigError, ConvergenceWarning

logger = logging.getLogger(__name__)

KERNELS = ('linear', 'rbf', 'sigmoid', 'polynomial')
KNN_METRICS = ('euclidean', 'cityblock', 'chebyshev', 'hamming')

# family -> hyperparameter defaults
DEFAULT_HYPERPARAMS: Dict[str, Dict[str, Any]] = {
    'logistic': {'learning_rate': .1, 'iterations': 2000, 'l2': 1e-4},
    'knn': {'k': 5, 'metric': 'euclidean'},
    'svm': {'kernel': 'rbf', 'C': 1., 'gamma': None, 'r': 0., 'degree': 3,
            'tol': 1e-3, 'max_passes': 10000, 'cache_rows': 1024},
    'tree': {'max_depth': None, 'min_leaf': 1},
    'forest': {'n_trees': 100, 'max_features': 5, 'bootstrap': True,
               'max_depth': None, 'min_leaf': 1, 'n_jobs': 1},
    'adaboost': {'n_rounds': 100, 'depth': 1},
    'gboost': {'n_rounds': 200, 'learning_rate': .1, 'max_depth': 3,
               'min_leaf': 1},
    'xgboost_like': {'n_rounds': 200, 'learning_rate': .1, 'lambda_l2': 1.,
                     'gamma_min_gain': 0., 'subsample': 1., 'colsample': 1.,
                     'max_depth': 3, 'min_child_weight': 1.},
    'mlp': {'width': 30, 'depth': 1, 'layer_widths': None, 'epochs': 500,
            'learning_rate': 1e-3, 'beta1': .9, 'beta2': .999,
            'epsilon': 1e-8, 'batch_size': 200, 'l2': 1e-4,
            'early_stopping': True, 'patience': 10,
            'validation_fraction': .1, 'tol': 1e-4, 'activation': 'relu'},
}


def _int_at_least(lo):
    return (lambda v: isinstance(v, (int, np.integer))
            and not isinstance(v, bool) and v >= lo,
            'an integer >= %d' % lo)


def _real(pred, what):
    return (lambda v: isinstance(v, (int, float, np.number))
            and not isinstance(v, bool) and np.isfinite(v) and pred(v), what)


_POSITIVE = _real(lambda v: v > 0, 'a positive number')
_NONNEG = _real(lambda v: v >= 0, 'a non-negative number')
_UNIT = _real(lambda v: 0 < v <= 1, 'a number in (0, 1]')
_OPEN_UNIT = _real(lambda v: 0 < v < 1, 'a number in (0, 1)')
_ANY = _real(lambda v: True, 'a finite number')
_BOOL = (lambda v: isinstance(v, bool), 'true or false')
_DEPTH = (lambda v: v is None or _int_at_least(1)[0](v), 'null or >= 1')

# (family or '*', name) -> (predicate, description)
_RULES = {
    ('*', 'learning_rate'): _UNIT,
    ('logistic', 'learning_rate'): _POSITIVE,
    ('mlp', 'learning_rate'): _POSITIVE,
    ('*', 'iterations'): _int_at_least(0),
    ('*', 'l2'): _NONNEG,
    ('*', 'k'): _int_at_least(1),
    ('*', 'metric'): (lambda v: v in KNN_METRICS, 'one of %s' % (KNN_METRICS,)),
    ('*', 'kernel'): (lambda v: v in KERNELS, 'one of %s' % (KERNELS,)),
    ('*', 'C'): _POSITIVE,
    ('*', 'gamma'): (lambda v: v is None or _POSITIVE[0](v),
                     'null or a positive number'),
    ('*', 'r'): _ANY,
    ('*', 'degree'): _int_at_least(1),
    ('*', 'tol'): _POSITIVE,
    ('*', 'max_passes'): _int_at_least(1),
    ('*', 'cache_rows'): _int_at_least(2),
    ('*', 'max_depth'): _DEPTH,
    ('*', 'min_leaf'): _int_at_least(1),
    ('*', 'n_trees'): _int_at_least(1),
    ('*', 'max_features'): _int_at_least(1),
    ('*', 'bootstrap'): _BOOL,
    ('*', 'n_jobs'): (lambda v: isinstance(v, int) and v != 0,
                      'a non-zero integer'),
    ('*', 'n_rounds'): _int_at_least(0),
    ('adaboost', 'n_rounds'): _int_at_least(1),
    ('*', 'depth'): _int_at_least(1),
    ('*', 'lambda_l2'): _NONNEG,
    ('*', 'gamma_min_gain'): _NONNEG,
    ('*', 'subsample'): _UNIT,
    ('*', 'colsample'): _UNIT,
    ('*', 'min_child_weight'): _NONNEG,
    ('*', 'width'): _int_at_least(1),
    ('*', 'layer_widths'): (
        lambda v: v is None or (isinstance(v, (list, tuple)) and len(v) > 0
                                and all(_int_at_least(1)[0](w) for w in v)),
        'null or a non-empty list of integers >= 1'),
    ('*', 'epochs'): _int_at_least(0),
    ('*', 'beta1'): _real(lambda v: 0 <= v < 1, 'a number in [0, 1)'),
    ('*', 'beta2'): _real(lambda v: 0 <= v < 1, 'a number in [0, 1)'),
    ('*', 'epsilon'): _POSITIVE,
    ('*', 'batch_size'): _int_at_least(1),
    ('*', 'early_stopping'): _BOOL,
    ('*', 'patience'): _int_at_least(1),
    ('*', 'validation_fraction'): _OPEN_UNIT,
    ('*', 'activation'): (lambda v: v in ('relu', 'softplus'),
                          "'relu' or 'softplus'"),
}


@dataclass(frozen=True)
class ClassifierSpec:
    """Which classifier to train and how.

    Attributes
    ----------
    family : str
        One of ``DEFAULT_HYPERPARAMS``.
    hyperparams : dict
        Overrides; merged over the family defaults on construction and
        validated.  Unknown names are rejected.
    seed : int
        RNG seed of every random choice made while training.
    """
    family: str
    hyperparams: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 42

    def __post_init__(self):
        if self.family not in DEFAULT_HYPERPARAMS:
            raise ConfigError('Unknown classifier family %r; expected one of %s'
                              % (self.family, sorted(DEFAULT_HYPERPARAMS)))
        defaults = DEFAULT_HYPERPARAMS[self.family]
        unknown = set(self.hyperparams) - set(defaults)
        if unknown:
            raise ConfigError('Unknown hyperparameter(s) %s for %s' % (
                sorted(unknown), self.family))
        merged = copy.deepcopy(defaults)
        merged.update(self.hyperparams)
        for name, value in merged.items():
            pred, what = _RULES.get(
                (self.family, name), _RULES.get(('*', name)))
            if not pred(value):
                raise ConfigError('%s.%s must be %s, got %r' % (
                    self.family, name, what, value))
        if self.family == 'forest' and merged['max_features'] > 30:
            raise ConfigError('forest.max_features must be <= 30')
        if not isinstance(self.seed, (int, np.integer)):
            raise ConfigError('seed must be an integer, got %r' % (self.seed,))
        object.__setattr__(self, 'hyperparams', merged)

    def with_params(self, **overrides) -> 'ClassifierSpec':
        """Copy with some hyperparameters replaced."""
        params = dict(self.hyperparams)
        params.update(overrides)
        return ClassifierSpec(self.family, params, self.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family, 'hyperparams': dict(self.hyperparams),
                'seed': int(self.seed)}

    @classmethod
    def from_dict(cls, obj: Mapping[str, Any]) -> 'ClassifierSpec':
        if not isinstance(obj, Mapping) or 'family' not in obj:
            raise ConfigError('Classifier spec needs a "family" field')
        extra = set(obj) - {'family', 'hyperparams', 'seed'}
        if extra:
            raise ConfigError('Unknown spec field(s) %s' % sorted(extra))
        return cls(obj['family'], dict(obj.get('hyperparams') or {}),
                   obj.get('seed', 42))


def sign_with_tie(score: npt.ArrayLike) -> np.ndarray:
    """Labels from real scores; a score of exactly 0 is legitimate (+1)."""
    return np.where(np.asarray(score) >= 0, 1, -1).astype(np.int8)


def check_two_classes(y: np.ndarray, family: str) -> None:
    if y.size == 0:
        raise ValueError('Cannot train %s on an empty dataset' % family)
    if np.unique(y).size < 2:
        raise ValueError(
            'Training %s needs both classes, got only %+d' % (family, y[0]))


def report_convergence(model, family: str) -> None:
    """Log and warn when a trainer stopped at its cap."""
    if not getattr(model, 'converged', True):
        msg = '%s stopped at its iteration cap before converging' % family
        logger.warning(msg)
        warnings.warn(msg, ConvergenceWarning, stacklevel=3)


def freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        if isinstance(a, np.ndarray):
            a.flags.writeable = False

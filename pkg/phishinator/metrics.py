"""Confusion counts and the four detection metrics.

Phishing (-1) is the positive class:

    accuracy  = (N_LL + N_PP)/N
    recall    = N_PP/(N_PL + N_PP)
    precision = N_PP/(N_LP + N_PP)
    F1        = 2*precision*recall/(precision + recall)

where N_XY counts samples of true class X predicted as Y
(L legitimate, P phishing).  A ratio whose denominator is zero is left
undefined and carries a reason instead of a number.
"""

from dataclasses import dataclass, field, replace
from typing import Any, Dict, Mapping, Optional

import numpy as np
import numpy.typing as npt

from phishinator.schema import LEGITIMATE, PHISHING

METRIC_NAMES = ('accuracy', 'recall', 'precision', 'f1')


@dataclass(frozen=True)
class ConfusionCounts:
    n_LL: int = 0
    n_LP: int = 0
    n_PL: int = 0
    n_PP: int = 0

    def __post_init__(self):
        for name in ('n_LL', 'n_LP', 'n_PL', 'n_PP'):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError('%s must be a non-negative integer, got %r'
                                 % (name, value))
            object.__setattr__(self, name, int(value))

    @property
    def total(self) -> int:
        return self.n_LL + self.n_LP + self.n_PL + self.n_PP

    def __add__(self, other: 'ConfusionCounts') -> 'ConfusionCounts':
        return ConfusionCounts(self.n_LL + other.n_LL, self.n_LP + other.n_LP,
                               self.n_PL + other.n_PL, self.n_PP + other.n_PP)

    def to_dict(self) -> Dict[str, int]:
        return {'n_LL': self.n_LL, 'n_LP': self.n_LP, 'n_PL': self.n_PL,
                'n_PP': self.n_PP}

    @classmethod
    def from_dict(cls, obj: Mapping[str, int]) -> 'ConfusionCounts':
        return cls(obj['n_LL'], obj['n_LP'], obj['n_PL'], obj['n_PP'])


@dataclass(frozen=True)
class MetricsReport:
    """Metric values plus wall-clock times.

    A metric that is None is undefined; ``undefined`` maps its name to
    the reason.
    """
    accuracy: Optional[float]
    recall: Optional[float]
    precision: Optional[float]
    f1: Optional[float]
    train_time_s: float = 0.
    test_time_s: float = 0.
    undefined: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        for name in METRIC_NAMES:
            value = getattr(self, name)
            if value is None:
                if name not in self.undefined:
                    raise ValueError('Undefined %s needs a reason' % name)
            elif not 0 <= value <= 1:
                raise ValueError('%s must lie in [0, 1], got %r' % (
                    name, value))
        if self.train_time_s < 0 or self.test_time_s < 0:
            raise ValueError('Times must be non-negative')

    def cell(self, name: str, fmt: str = '%.6f') -> str:
        """Formatted value, or ``n/a(reason)`` when undefined."""
        value = getattr(self, name)
        if value is None:
            return 'n/a(%s)' % self.undefined[name]
        return fmt % value

    def with_times(self, train_time_s: float,
                   test_time_s: float) -> 'MetricsReport':
        return replace(self, train_time_s=float(train_time_s),
                       test_time_s=float(test_time_s))

    def values_dict(self) -> Dict[str, Any]:
        """Metric values without the times."""
        out = {name: getattr(self, name) for name in METRIC_NAMES}
        if self.undefined:
            out['undefined'] = dict(self.undefined)
        return out

    @classmethod
    def from_values(cls, obj: Mapping[str, Any], train_time_s: float = 0.,
                    test_time_s: float = 0.) -> 'MetricsReport':
        return cls(*(obj[name] for name in METRIC_NAMES),
                   train_time_s=train_time_s, test_time_s=test_time_s,
                   undefined=dict(obj.get('undefined', {})))


def confusion(predictions: npt.ArrayLike,
              truths: npt.ArrayLike) -> ConfusionCounts:
    """Count the four (truth, prediction) combinations.

    Raises
    ------
    ValueError
        Length mismatch or a value other than -1/+1.
    """
    pred = np.asarray(predictions).ravel()
    true = np.asarray(truths).ravel()
    if pred.size != true.size:
        raise ValueError('%d predictions for %d truths' % (
            pred.size, true.size))
    for what, arr in (('prediction', pred), ('truth', true)):
        bad = ~np.isin(arr, (PHISHING, LEGITIMATE))
        if bad.any():
            raise ValueError('%s %r at position %d is not -1 or +1' % (
                what, arr[bad][0], int(np.flatnonzero(bad)[0])))
    true_p, pred_p = true == PHISHING, pred == PHISHING
    return ConfusionCounts(
        n_LL=int(np.sum(~true_p & ~pred_p)), n_LP=int(np.sum(~true_p & pred_p)),
        n_PL=int(np.sum(true_p & ~pred_p)), n_PP=int(np.sum(true_p & pred_p)))


def f1_score(precision: float, recall: float) -> Optional[float]:
    """Harmonic mean; None when both are zero."""
    if precision + recall <= 0:
        return None
    return 2*precision*recall/(precision + recall)


def metrics(c: ConfusionCounts) -> MetricsReport:
    """Accuracy, recall, precision and F1 of ``c``; times are zero.

    Raises
    ------
    ValueError
        ``c`` counts no samples.
    """
    if c.total == 0:
        raise ValueError('Cannot compute metrics of zero samples')
    undefined = {}
    accuracy = (c.n_LL + c.n_PP)/c.total
    recall = precision = f1 = None
    if c.n_PL + c.n_PP:
        recall = c.n_PP/(c.n_PL + c.n_PP)
    else:
        undefined['recall'] = 'no phishing samples'
    if c.n_LP + c.n_PP:
        precision = c.n_PP/(c.n_LP + c.n_PP)
    else:
        undefined['precision'] = 'no phishing predictions'
    if recall is None or precision is None:
        undefined['f1'] = '%s undefined' % (
            'recall' if recall is None else 'precision')
    else:
        f1 = f1_score(precision, recall)
        if f1 is None:
            undefined['f1'] = 'precision and recall are 0'
    return MetricsReport(accuracy, recall, precision, f1,
                         undefined=undefined)

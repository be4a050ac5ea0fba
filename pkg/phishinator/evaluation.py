"""Cross-validation, parameter sweeps and feature correlations."""

import logging
from dataclasses import dataclass
from time import perf_counter, time
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from phishinator.classifiers import ClassifierSpec, fit, predict_many
from phishinator.dataset import Dataset, FoldPlan, stratified_kfold
from phishinator.errors import ConfigError, DatasetError
from phishinator.metrics import (
    ConfusionCounts, MetricsReport, confusion, metrics)

logger = logging.getLogger(__name__)

# Display name, family, hyperparameter overrides
COMPARISON_BATTERY = (
    ('logistic regression', 'logistic', {}),
    ('decision tree', 'tree', {}),
    ('random forest', 'forest', {}),
    ('ada booster', 'adaboost', {}),
    ('KNN', 'knn', {'k': 5}),
    ('neural network', 'mlp', {}),
    ('SVM_linear', 'svm', {'kernel': 'linear'}),
    ('SVM_poly', 'svm', {'kernel': 'polynomial'}),
    ('SVM_rbf', 'svm', {'kernel': 'rbf'}),
    ('SVM_sigmoid', 'svm', {'kernel': 'sigmoid'}),
    ('gradient boosting', 'gboost', {}),
    ('XGBoost-like', 'xgboost_like', {}),
)

# axis -> (family, hyperparameter, default values)
SWEEP_AXES = {
    'svm-kernel': ('svm', 'kernel',
                   ('linear', 'rbf', 'polynomial', 'sigmoid')),
    'knn-k': ('knn', 'k', (1, 3, 5, 7, 9, 15, 25)),
    'mlp-depth': ('mlp', 'depth', (1, 2, 4, 8)),
}
_KERNEL_ALIASES = {'poly': 'polynomial'}


def battery_specs(seed: int = 42) -> Tuple[Tuple[str, ClassifierSpec], ...]:
    """The twelve named runs of the comparison table."""
    return tuple((name, ClassifierSpec(family, dict(hp), seed))
                 for name, family, hp in COMPARISON_BATTERY)


@dataclass(frozen=True)
class CrossValReport:
    """Per-fold and pooled results of one k-fold run.

    ``aggregate`` comes from the summed confusion counts; its times are
    the per-fold means.
    """
    spec: ClassifierSpec
    k: int
    seed: int
    per_fold: Tuple[MetricsReport, ...]
    fold_counts: Tuple[ConfusionCounts, ...]
    aggregate: MetricsReport
    plan_digest: str
    converged: bool = True
    name: str = ''

    def __post_init__(self):
        assert len(self.per_fold) == self.k == len(self.fold_counts), (
            'One report per fold')
        if not self.name:
            object.__setattr__(self, 'name', self.spec.family)

    @property
    def pooled(self) -> ConfusionCounts:
        return sum(self.fold_counts, ConfusionCounts())


@dataclass(frozen=True)
class SweepResult:
    axis_name: str
    axis_values: Tuple
    reports: Tuple[CrossValReport, ...]

    def __post_init__(self):
        assert len(self.axis_values) == len(self.reports), (
            'One report per axis value')


def _run_fold(d: Dataset, spec: ClassifierSpec, test_idx: np.ndarray,
              fit_fn: Callable):
    train_idx = np.setdiff1d(np.arange(len(d)), test_idx, assume_unique=True)
    train, test = d.subset(train_idx), d.subset(test_idx)
    t0 = perf_counter()
    model = fit_fn(spec, train)
    t1 = perf_counter()
    pred = predict_many(model, test.X)
    t2 = perf_counter()
    return (confusion(pred, test.y), t1 - t0, t2 - t1,
            bool(getattr(model, 'converged', True)))


def cross_validate(d: Dataset, spec: ClassifierSpec, k: int = 10,
                   seed: int = 42, n_jobs: int = 1,
                   plan: Optional[FoldPlan] = None, name: str = '',
                   fit_fn: Callable = fit) -> CrossValReport:
    """k-fold cross-validation of one classifier.

    Parameters
    ----------
    d : Dataset
        Samples to split.
    spec : ClassifierSpec
        What to train on each k-1 folds.
    k, seed : int, optional
        Fold count and fold-assignment seed; ignored when ``plan`` is
        given.
    n_jobs : int, optional
        Folds run concurrently; results do not depend on it.
    plan : FoldPlan, optional
        Pre-drawn assignment, shared by paired runs.
    name : str, optional
        Display name for reports.
    fit_fn : callable, optional
        ``fit_fn(spec, train) -> model``; :func:`fit` by default.

    Returns
    -------
    report : CrossValReport
    """
    if plan is None:
        plan = stratified_kfold(d, k, seed)
    elif len(plan.assignments) != len(d):
        raise ValueError('Fold plan covers %d samples, dataset has %d' % (
            len(plan.assignments), len(d)))
    t0 = time()
    results = Parallel(n_jobs=n_jobs)(
        delayed(_run_fold)(d, spec, test_idx, fit_fn)
        for test_idx in plan.folds())
    counts = tuple(r[0] for r in results)
    per_fold = tuple(metrics(c).with_times(tr, te)
                     for c, tr, te, _ in results)
    pooled = sum(counts, ConfusionCounts())
    aggregate = metrics(pooled).with_times(
        np.mean([r[1] for r in results]), np.mean([r[2] for r in results]))
    converged = all(r[3] for r in results)
    if not converged:
        logger.warning('%s did not converge on every fold',
                       name or spec.family)
    logger.info('Took %g seconds to cross-validate %s over %d folds',
                time() - t0, name or spec.family, plan.k)
    return CrossValReport(spec, plan.k, plan.seed, per_fold, counts,
                          aggregate, plan.digest(), converged, name)


def _axis_spec(base: ClassifierSpec, param: str, value) -> ClassifierSpec:
    if param == 'kernel':
        value = _KERNEL_ALIASES.get(value, value)
    overrides = {param: value}
    if param == 'depth':
        overrides['layer_widths'] = None
    return base.with_params(**overrides)


def sweep(d: Dataset, base_spec: Optional[ClassifierSpec], axis_name: str,
          axis_values: Optional[Sequence] = None, k: int = 10,
          seed: int = 42, n_jobs: int = 1) -> SweepResult:
    """Cross-validate one family across values of one hyperparameter.

    Parameters
    ----------
    d : Dataset
    base_spec : ClassifierSpec or None
        Fixed hyperparameters; family defaults when None.  Its family
        must be the one the axis belongs to.
    axis_name : {'svm-kernel', 'knn-k', 'mlp-depth'}
    axis_values : sequence, optional
        Values to try; the axis defaults otherwise.
    k, seed, n_jobs : int, optional
        As for :func:`cross_validate`.  Every value uses the same fold
        assignment.

    Raises
    ------
    ConfigError
        Unknown axis, wrong family or an invalid value.
    """
    if axis_name not in SWEEP_AXES:
        raise ConfigError('Unknown sweep axis %r; expected one of %s' % (
            axis_name, sorted(SWEEP_AXES)))
    family, param, defaults = SWEEP_AXES[axis_name]
    if base_spec is None:
        base_spec = ClassifierSpec(family, seed=seed)
    elif base_spec.family != family:
        raise ConfigError('Axis %s sweeps %s, not %s' % (
            axis_name, family, base_spec.family))
    values = tuple(defaults if axis_values is None else axis_values)
    if not values:
        raise ConfigError('Sweep needs at least one axis value')
    specs = [_axis_spec(base_spec, param, v) for v in values]

    plan = stratified_kfold(d, k, seed)
    t0 = time()
    reports = tuple(
        cross_validate(d, spec, plan=plan, n_jobs=n_jobs,
                       name='%s=%s' % (param, value))
        for spec, value in zip(specs, values))
    digests = {r.plan_digest for r in reports}
    assert len(digests) == 1, 'Sweep runs saw different fold plans'
    logger.info('Took %g seconds to sweep %s over %d values',
                time() - t0, axis_name, len(values))
    return SweepResult(axis_name, values, reports)


def correlation_matrix(d: Dataset) -> pd.DataFrame:
    """Pearson correlations between all 31 columns (features and label).

    Entries involving a constant column are NaN; the diagonal of every
    other column is exactly 1.

    Raises
    ------
    DatasetError
        Empty dataset.
    """
    if len(d) == 0:
        raise DatasetError('Cannot correlate an empty dataset')
    df = d.to_frame().astype(np.float64)
    corr = df.corr(method='pearson').clip(-1, 1)
    varying = (df.std(ddof=0) > 0).to_numpy()
    values = corr.to_numpy(copy=True)
    idx = np.flatnonzero(varying)
    values[idx, idx] = 1.
    values[~varying, :] = np.nan
    values[:, ~varying] = np.nan
    return pd.DataFrame(values, index=corr.index, columns=corr.columns)

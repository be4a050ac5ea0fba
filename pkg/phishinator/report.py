"""Render cross-validation results as a comparison table or JSON.

The JSON layout is::

    {"version": 1,
     "runs": [{"name", "spec", "k", "seed", "plan_digest", "converged",
               "per_fold": [{"counts": {...}, "metrics": {...}}, ...],
               "aggregate": {"counts": {...}, "metrics": {...}},
               "timing": {"per_fold": [{"train_time_s", "test_time_s"}],
                          "mean_train_time_s", "mean_test_time_s"}}]}

Everything outside ``timing`` is a pure function of the inputs and the
seed.
"""

import json
import logging
from typing import Any, Dict, List, Sequence

import pandas as pd

from phishinator.classifiers import ClassifierSpec
from phishinator.errors import ConfigError
from phishinator.evaluation import CrossValReport, SweepResult
from phishinator.metrics import METRIC_NAMES, ConfusionCounts, MetricsReport

logger = logging.getLogger(__name__)

REPORT_VERSION = 1
FORMATS = ('text', 'json')
TABLE_COLUMNS = ('classifier', 'train time (s)', 'test time (s)',
                 'accuracy', 'recall', 'precision', 'F1 score')


def report_to_dict(r: CrossValReport) -> Dict[str, Any]:
    return {
        'name': r.name,
        'spec': r.spec.to_dict(),
        'k': r.k,
        'seed': int(r.seed),
        'plan_digest': r.plan_digest,
        'converged': r.converged,
        'per_fold': [{'counts': c.to_dict(), 'metrics': m.values_dict()}
                     for c, m in zip(r.fold_counts, r.per_fold)],
        'aggregate': {'counts': r.pooled.to_dict(),
                      'metrics': r.aggregate.values_dict()},
        'timing': {
            'per_fold': [{'train_time_s': m.train_time_s,
                          'test_time_s': m.test_time_s} for m in r.per_fold],
            'mean_train_time_s': r.aggregate.train_time_s,
            'mean_test_time_s': r.aggregate.test_time_s},
    }


def report_from_dict(obj: Dict[str, Any]) -> CrossValReport:
    timing = obj['timing']
    per_fold = tuple(
        MetricsReport.from_values(f['metrics'], t['train_time_s'],
                                  t['test_time_s'])
        for f, t in zip(obj['per_fold'], timing['per_fold']))
    counts = tuple(ConfusionCounts.from_dict(f['counts'])
                   for f in obj['per_fold'])
    aggregate = MetricsReport.from_values(
        obj['aggregate']['metrics'], timing['mean_train_time_s'],
        timing['mean_test_time_s'])
    return CrossValReport(
        spec=ClassifierSpec.from_dict(obj['spec']), k=int(obj['k']),
        seed=int(obj['seed']), per_fold=per_fold, fold_counts=counts,
        aggregate=aggregate, plan_digest=obj['plan_digest'],
        converged=bool(obj['converged']), name=obj['name'])


def report_table(reports: Sequence[CrossValReport]) -> pd.DataFrame:
    """One row per run, comparison-table column order, cells as text."""
    rows = []
    for r in reports:
        agg = r.aggregate
        rows.append([r.name, '%.6f' % agg.train_time_s,
                     '%.6f' % agg.test_time_s]
                    + [agg.cell(name) for name in METRIC_NAMES])
    return pd.DataFrame(rows, columns=list(TABLE_COLUMNS))


def emit_report(reports: Sequence[CrossValReport], fmt: str = 'text') -> str:
    """Render ``reports``.

    Parameters
    ----------
    reports : sequence of CrossValReport
        Non-empty.
    fmt : {'text', 'json'}, optional
        Aligned table or the versioned JSON document.

    Raises
    ------
    ConfigError
        Unknown format.
    ValueError
        No reports.
    """
    if fmt not in FORMATS:
        raise ConfigError('Unknown report format %r; expected one of %s'
                          % (fmt, FORMATS))
    if not reports:
        raise ValueError('Nothing to report')
    if fmt == 'json':
        return json.dumps({'version': REPORT_VERSION,
                           'runs': [report_to_dict(r) for r in reports]},
                          indent=2) + '\n'
    return report_table(reports).to_string(index=False) + '\n'


def parse_report(text: str) -> List[CrossValReport]:
    """Inverse of the JSON rendering of ``emit_report``.

    Raises
    ------
    ConfigError
        Not a report document of a known version.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError('Report is not JSON: %s at line %d, column %d' % (
            err.msg, err.lineno, err.colno)) from None
    if not isinstance(obj, dict) or obj.get('version') != REPORT_VERSION:
        raise ConfigError('Not a version %d report' % REPORT_VERSION)
    try:
        return [report_from_dict(r) for r in obj['runs']]
    except (KeyError, TypeError) as err:
        raise ConfigError('Malformed report: missing %s' % err) from None


def sweep_frame(result: SweepResult) -> pd.DataFrame:
    """Flat table (axis_value, accuracy, recall, precision, f1)."""
    rows = [[value] + [getattr(r.aggregate, name) for name in METRIC_NAMES]
            for value, r in zip(result.axis_values, result.reports)]
    return pd.DataFrame(rows, columns=['axis_value', *METRIC_NAMES])


def sweep_csv(result: SweepResult) -> str:
    return sweep_frame(result).to_csv(index=False, lineterminator='\n',
                                      float_format='%.6f')


def sweep_to_dict(result: SweepResult) -> Dict[str, Any]:
    return {'version': REPORT_VERSION, 'axis': result.axis_name,
            'axis_values': list(result.axis_values),
            'runs': [report_to_dict(r) for r in result.reports]}

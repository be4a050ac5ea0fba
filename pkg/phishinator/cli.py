"""Command-line entry point.

Exit codes: 0 success, 2 usage or configuration error, 3 a classifier
did not converge (results are still written), 4 no URL could be
extracted.
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from phishinator.classifiers import (
    ClassifierSpec, decision_function, fit, load_model, save_model,
    sign_with_tie)
from phishinator.config import (
    DEFAULT_K, RunConfig, load_config_file, merge, resolve_seed)
from phishinator.dataset import (
    Dataset, load_csv, load_feature_csv, save_csv, summarize)
from phishinator.errors import (
    ConfigError, DatasetError, DivergenceError, ModelFormatError,
    UrlParseError)
from phishinator.evaluation import (
    SWEEP_AXES, battery_specs, correlation_matrix, cross_validate, sweep)
from phishinator.features import EvidenceTable, load_evidence
from phishinator.ingest import extract_urls, read_dump_urls
from phishinator.report import (
    emit_report, parse_report, sweep_csv, sweep_to_dict)
from phishinator.schema import FEATURE_NAMES, PHISHING, canonical_schema
from phishinator.thresholds import default_thresholds, load_thresholds

logger = logging.getLogger('phishinator')

EXIT_OK, EXIT_USAGE, EXIT_CONVERGENCE, EXIT_NO_ROWS = 0, 2, 3, 4
VERDICTS = {-1: 'phishing', 1: 'legitimate'}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='JSON file of default flag values')
    common.add_argument('--seed', type=int,
                        help='RNG seed (default: $PHISH_SEED, then 42)')
    common.add_argument('--jobs', type=int,
                        help='concurrent folds or rows (default 1)')
    common.add_argument('-o', '--output', help='output file (default stdout)')
    common.add_argument('--format', help='output format')
    common.add_argument('-v', '--verbose', action='count', default=None,
                        help='more logging on stderr; repeat for debug')

    parser = argparse.ArgumentParser(
        prog='phishinator',
        description='Phishing website features, classifiers and '
                    'cross-validated comparisons.')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('summarize', parents=[common],
                       help='mean and std of every column (text|json)')
    p.add_argument('dataset', nargs='?')

    for name, what in (('crossval', 'k-fold comparison of classifiers'),
                       ('fit', 'train one classifier and save it')):
        p = sub.add_parser(name, parents=[common], help=what)
        p.add_argument('dataset', nargs='?')
        p.add_argument('--spec', action='append',
                       help='classifier spec as JSON '
                            '{"family", "hyperparams", "seed"}')
        p.add_argument('--spec-file', help='JSON file of one spec or a list')
        if name == 'crossval':
            p.add_argument('--all', action='store_true', default=None,
                           help='run the twelve-classifier battery')
            p.add_argument('-k', '--k', type=int, help='folds (default 10)')

    p = sub.add_parser('sweep', parents=[common],
                       help='cross-validate along one hyperparameter')
    p.add_argument('dataset', nargs='?')
    p.add_argument('--axis', help=', '.join(sorted(SWEEP_AXES)))
    p.add_argument('--values', help='comma-separated axis values')
    p.add_argument('--spec', action='append',
                   help='base classifier spec as JSON')
    p.add_argument('-k', '--k', type=int, help='folds (default 10)')

    p = sub.add_parser('extract', parents=[common],
                       help='feature vectors of URLs (text|json|csv)')
    p.add_argument('--url', action='append', help='URL; repeatable')
    p.add_argument('--dump', help='PhishTank-style CSV of URLs')
    p.add_argument('--evidence', help='JSON file of domain evidence')
    p.add_argument('--thresholds', help='JSON file of rule overrides')
    p.add_argument('--append', help='dataset CSV to add the rows to')
    p.add_argument('--label', type=int, choices=(-1, 1),
                   help='label of appended rows (default -1)')

    p = sub.add_parser('predict', parents=[common],
                       help='apply a saved model (text|json)')
    p.add_argument('--model', help='model file written by fit')
    p.add_argument('--csv', help='CSV of feature rows')
    p.add_argument('--url', action='append', help='URL; repeatable')
    p.add_argument('--evidence', help='JSON file of domain evidence')
    p.add_argument('--thresholds', help='JSON file of rule overrides')

    p = sub.add_parser('report', parents=[common],
                       help='re-render a JSON report (text|json)')
    p.add_argument('report', nargs='?')

    p = sub.add_parser('correlate', parents=[common],
                       help='31x31 correlation matrix (csv|json)')
    p.add_argument('dataset', nargs='?')
    return parser


def _run_config(command: str, values: Dict[str, Any], seed: int) -> RunConfig:
    raw_specs = list(values.get('spec') or [])
    if isinstance(values.get('spec'), (str, dict)):
        raw_specs = [values['spec']]
    specs = [('', _parse_spec_text(s) if isinstance(s, str) else s)
             for s in raw_specs]
    if values.get('spec_file'):
        specs += [('', s) for s in _read_spec_file(values['spec_file'])]
    keys = ('seed', 'k', 'jobs', 'dataset', 'spec', 'spec_file', 'output',
            'format', 'thresholds', 'evidence', 'config', 'verbose',
            'command')
    return RunConfig(
        command=command, seed=seed, k=int(values.get('k') or DEFAULT_K),
        jobs=int(values.get('jobs') or 1),
        dataset_path=values.get('dataset'), specs=tuple(specs),
        output_path=values.get('output'), fmt=values.get('format'),
        thresholds_path=values.get('thresholds'),
        evidence_path=values.get('evidence'),
        options={k: v for k, v in values.items() if k not in keys})


def _parse_spec_text(text: str) -> Dict[str, Any]:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError('--spec is not JSON: %s' % err) from None
    if not isinstance(obj, dict):
        raise ConfigError('--spec must be a JSON object')
    return obj


def _read_spec_file(path: str) -> List[Dict[str, Any]]:
    try:
        with open(path, encoding='utf-8') as f:
            obj = json.load(f)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError('Cannot read spec file %s: %s' % (path, err)) \
            from None
    return obj if isinstance(obj, list) else [obj]


def _specs(cfg: RunConfig) -> List[Tuple[str, ClassifierSpec]]:
    out = []
    for name, obj in cfg.specs:
        obj = dict(obj)
        obj.setdefault('seed', cfg.seed)
        spec = ClassifierSpec.from_dict(obj)
        out.append((name or spec.family, spec))
    return out


def _dataset(cfg: RunConfig) -> Dataset:
    if not cfg.dataset_path:
        raise ConfigError('%s needs a dataset path' % cfg.command)
    return load_csv(cfg.dataset_path)


def _format(cfg: RunConfig, allowed: Sequence[str]) -> str:
    fmt = cfg.fmt or allowed[0]
    if fmt not in allowed:
        raise ConfigError('%s writes %s, not %r' % (
            cfg.command, '|'.join(allowed), fmt))
    return fmt


def _write(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)
    logger.info('Wrote %s', path)


def _evidence_and_thresholds(cfg: RunConfig):
    ev = (load_evidence(cfg.evidence_path) if cfg.evidence_path
          else EvidenceTable())
    t = (load_thresholds(cfg.thresholds_path) if cfg.thresholds_path
         else default_thresholds())
    return ev, t


def cmd_summarize(cfg: RunConfig) -> int:
    """Mean and standard deviation of all 31 columns."""
    fmt = _format(cfg, ('text', 'json'))
    stats = summarize(_dataset(cfg))
    if fmt == 'json':
        obj = {name: {'mean': round(float(row['mean']), 4),
                      'std': round(float(row['std']), 4)}
               for name, row in stats.iterrows()}
        _write(json.dumps(obj, indent=2) + '\n', cfg.output_path)
    else:
        _write(stats.to_string(float_format='%.4f') + '\n', cfg.output_path)
    return EXIT_OK


def cmd_crossval(cfg: RunConfig) -> int:
    """Cross-validate the battery or the given specs and emit a report."""
    fmt = _format(cfg, ('text', 'json'))
    if cfg.options.get('all'):
        runs = list(battery_specs(cfg.seed))
    else:
        runs = _specs(cfg)
    if not runs:
        raise ConfigError('crossval needs --all, --spec or --spec-file')
    d = _dataset(cfg)
    reports = [cross_validate(d, spec, cfg.k, cfg.seed, cfg.jobs, name=name)
               for name, spec in runs]
    _write(emit_report(reports, fmt), cfg.output_path)
    return EXIT_OK if all(r.converged for r in reports) else EXIT_CONVERGENCE


def _axis_values(axis: str, text: Optional[str]):
    if text is None:
        return None
    if isinstance(text, (list, tuple)):
        return tuple(text)
    items = [v.strip() for v in str(text).split(',') if v.strip()]
    if SWEEP_AXES[axis][1] == 'kernel':
        return tuple(items)
    try:
        return tuple(int(v) for v in items)
    except ValueError:
        raise ConfigError('%s values must be integers, got %r' % (
            axis, text)) from None


def cmd_sweep(cfg: RunConfig) -> int:
    """Sweep one axis; CSV to the output, JSON next to it."""
    fmt = _format(cfg, ('csv', 'json'))
    axis = cfg.options.get('axis')
    if axis not in SWEEP_AXES:
        raise ConfigError('--axis must be one of %s, got %r' % (
            ', '.join(sorted(SWEEP_AXES)), axis))
    specs = _specs(cfg)
    if len(specs) > 1:
        raise ConfigError('sweep takes at most one base --spec')
    base = specs[0][1] if specs else None
    result = sweep(_dataset(cfg), base, axis,
                   _axis_values(axis, cfg.options.get('values')),
                   cfg.k, cfg.seed, cfg.jobs)
    doc = json.dumps(sweep_to_dict(result), indent=2) + '\n'
    if fmt == 'json':
        _write(doc, cfg.output_path)
    else:
        _write(sweep_csv(result), cfg.output_path)
        if cfg.output_path:
            _write(doc, os.path.splitext(cfg.output_path)[0] + '.json')
    ok = all(r.converged for r in result.reports)
    return EXIT_OK if ok else EXIT_CONVERGENCE


def cmd_extract(cfg: RunConfig) -> int:
    """Feature vectors for URLs; unparsable rows are reported and skipped."""
    fmt = _format(cfg, ('text', 'json', 'csv'))
    urls = list(cfg.options.get('url') or [])
    if cfg.options.get('dump'):
        urls += read_dump_urls(cfg.options['dump'])
    if not urls:
        raise ConfigError('extract needs --url or --dump')
    ev, t = _evidence_and_thresholds(cfg)
    rows = extract_urls(urls, ev, t, cfg.jobs)

    schema = canonical_schema()
    names = [schema.underscored(ii) for ii in range(len(schema))]
    kept = []
    for url, row in zip(urls, rows):
        if isinstance(row, UrlParseError):
            print('error: %s: %s' % (url, row), file=sys.stderr)
        else:
            kept.append((url, row))
    if not kept:
        return EXIT_NO_ROWS

    if fmt == 'json':
        text = json.dumps([{'url': url, 'features': dict(
            zip(names, (int(v) for v in row)))} for url, row in kept],
            indent=2) + '\n'
    elif fmt == 'csv':
        df = pd.DataFrame(np.stack([row for _, row in kept]),
                          columns=list(FEATURE_NAMES))
        df.insert(0, 'url', [url for url, _ in kept])
        text = df.to_csv(index=False, lineterminator='\n')
    else:
        text = ''.join(
            '# %s\n' % url + ''.join('%s=%d\n' % (n, v)
                                     for n, v in zip(names, row))
            for url, row in kept)
    _write(text, cfg.output_path)

    if cfg.options.get('append'):
        _append_rows(cfg.options['append'], [row for _, row in kept],
                     cfg.options.get('label') or PHISHING)
    return EXIT_OK


def _append_rows(path: str, rows: List[np.ndarray], label: int) -> None:
    schema = canonical_schema()
    X, y = np.stack(rows), np.full(len(rows), label)
    if os.path.exists(path):
        old = load_csv(path)
        X, y = np.vstack((old.X, X)), np.concatenate((old.y, y))
    save_csv(Dataset(schema, X, y, provenance=path), path)
    logger.info('Appended %d rows to %s', len(rows), path)


def cmd_fit(cfg: RunConfig) -> int:
    """Train one classifier on the whole dataset and save it."""
    specs = _specs(cfg)
    if len(specs) != 1:
        raise ConfigError('fit needs exactly one --spec or spec file entry')
    if not cfg.output_path:
        raise ConfigError('fit needs -o/--output for the model file')
    spec = specs[0][1]
    model = fit(spec, _dataset(cfg))
    save_model(model, cfg.output_path, spec)
    return EXIT_OK if model.converged else EXIT_CONVERGENCE


def cmd_predict(cfg: RunConfig) -> int:
    """Verdict and raw score per input row or URL."""
    fmt = _format(cfg, ('text', 'json'))
    if not cfg.options.get('model'):
        raise ConfigError('predict needs --model')
    model = load_model(cfg.options['model'])
    labels, X = [], []
    if cfg.options.get('csv'):
        rows = load_feature_csv(cfg.options['csv'])
        labels += ['row %d' % (ii + 1) for ii in range(rows.shape[0])]
        X += list(rows)
    urls = list(cfg.options.get('url') or [])
    if urls:
        ev, t = _evidence_and_thresholds(cfg)
        for url, row in zip(urls, extract_urls(urls, ev, t, cfg.jobs)):
            if isinstance(row, UrlParseError):
                raise row
            labels.append(url)
            X.append(row)
    if not X:
        raise ConfigError('predict needs --csv or --url')
    scores = decision_function(model, np.stack(X))
    preds = sign_with_tie(scores)
    if fmt == 'json':
        text = json.dumps([{'input': name, 'label': int(p),
                            'verdict': VERDICTS[int(p)], 'score': float(s)}
                           for name, p, s in zip(labels, preds, scores)],
                          indent=2) + '\n'
    else:
        text = ''.join('%s\t%s\t%g\n' % (name, VERDICTS[int(p)], s)
                       for name, p, s in zip(labels, preds, scores))
    _write(text, cfg.output_path)
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    """Re-render a saved JSON report."""
    fmt = _format(cfg, ('text', 'json'))
    path = cfg.options.get('report')
    if not path:
        raise ConfigError('report needs the path of a JSON report')
    try:
        with open(path, encoding='utf-8') as f:
            text = f.read()
    except OSError as err:
        raise ConfigError('Cannot read report %s: %s' % (path, err)) from None
    _write(emit_report(parse_report(text), fmt), cfg.output_path)
    return EXIT_OK


def cmd_correlate(cfg: RunConfig) -> int:
    """Pairwise correlations; constant columns give empty cells."""
    fmt = _format(cfg, ('csv', 'json'))
    corr = correlation_matrix(_dataset(cfg))
    if fmt == 'json':
        text = corr.to_json(orient='index', double_precision=12) + '\n'
    else:
        text = corr.to_csv(float_format='%.6f', lineterminator='\n')
    _write(text, cfg.output_path)
    return EXIT_OK


COMMAND_FUNCS = {
    'summarize': cmd_summarize,
    'crossval': cmd_crossval,
    'sweep': cmd_sweep,
    'extract': cmd_extract,
    'fit': cmd_fit,
    'predict': cmd_predict,
    'report': cmd_report,
    'correlate': cmd_correlate,
}


def _configure_logging(verbosity: Optional[int]) -> None:
    level = {0: logging.WARNING, 1: logging.INFO}.get(
        verbosity or 0, logging.DEBUG)
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code or 0)
    _configure_logging(args.verbose)
    try:
        file_cfg = load_config_file(args.config) if args.config else {}
        values = merge(vars(args), file_cfg)
        cfg = _run_config(args.command, values,
                          resolve_seed(args.seed, file_cfg))
        return COMMAND_FUNCS[args.command](cfg)
    except ConfigError as err:
        print('error: %s' % err, file=sys.stderr)
        print("see 'phishinator %s --help'" % args.command, file=sys.stderr)
        return EXIT_USAGE
    except (DatasetError, ModelFormatError, UrlParseError,
            FileNotFoundError, ValueError) as err:
        print('error: %s' % err, file=sys.stderr)
        return EXIT_USAGE
    except DivergenceError as err:
        print('error: %s' % err, file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == '__main__':
    sys.exit(main())

"""Load, validate, summarize and partition labeled phishing datasets."""

import hashlib
import json
import logging
from dataclasses import dataclass
from os import PathLike
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt
import pandas as pd

from phishinator.errors import DatasetError
from phishinator.schema import (
    FeatureSchema, LABEL_NAME, PHISHING, LEGITIMATE, canonical_schema,
    normalize_header)

logger = logging.getLogger(__name__)

_INDEX_COLUMNS = ('index', 'id')


@dataclass(frozen=True)
class LabeledSample:
    """One website observation: 30 ternary values and a ±1 label."""
    features: Tuple[int, ...]
    label: int

    def __post_init__(self):
        if self.label not in (PHISHING, LEGITIMATE):
            raise ValueError('Label must be -1 or +1, got %r' % self.label)


class Dataset:
    """Feature matrix with ±1 labels and the schema it conforms to.

    Parameters
    ----------
    schema : FeatureSchema
        Column definitions; every cell must lie in its feature domain.
    X : array_like, shape (n, len(schema))
        Feature values.
    y : array_like, shape (n,)
        Labels, -1 (phishing) or +1 (legitimate).
    provenance : str, optional
        Free-text source tag.

    Notes
    -----
    Arrays are copied to ``int8`` and frozen, so a Dataset can be
    shared read-only between workers.  Equality ignores provenance.
    """

    def __init__(self, schema: FeatureSchema, X: npt.ArrayLike,
                 y: npt.ArrayLike, provenance: str = ''):
        X = np.array(X, dtype=np.int8).reshape(-1, len(schema))
        y = np.array(y, dtype=np.int8).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ValueError('X has %d rows but y has %d labels' % (
                X.shape[0], y.shape[0]))
        if not np.isin(y, (PHISHING, LEGITIMATE)).all():
            bad = int(np.flatnonzero(~np.isin(y, (PHISHING, LEGITIMATE)))[0])
            raise DatasetError(
                'Label %d outside {-1, 1}' % y[bad], row=bad + 1,
                column=LABEL_NAME)
        for jj, dom in enumerate(schema.feature_domains):
            bad = ~np.isin(X[:, jj], sorted(dom))
            if bad.any():
                ii = int(np.flatnonzero(bad)[0])
                raise DatasetError(
                    'Value %d outside domain %s' % (X[ii, jj], sorted(dom)),
                    row=ii + 1, column=schema.feature_names[jj])
        X.flags.writeable = False
        y.flags.writeable = False
        self._schema = schema
        self._X = X
        self._y = y
        self.provenance = provenance

    @property
    def schema(self) -> FeatureSchema:
        return self._schema

    @property
    def X(self) -> np.ndarray:
        return self._X

    @property
    def y(self) -> np.ndarray:
        return self._y

    @property
    def samples(self) -> Tuple[LabeledSample, ...]:
        return tuple(self)

    def __len__(self) -> int:
        return self._y.shape[0]

    def __iter__(self) -> Iterator[LabeledSample]:
        for row, label in zip(self._X, self._y):
            yield LabeledSample(tuple(int(v) for v in row), int(label))

    def __getitem__(self, ii: int) -> LabeledSample:
        return LabeledSample(
            tuple(int(v) for v in self._X[ii]), int(self._y[ii]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (self._schema == other._schema
                and np.array_equal(self._X, other._X)
                and np.array_equal(self._y, other._y))

    def __repr__(self) -> str:
        return 'Dataset(n=%d, provenance=%r)' % (len(self), self.provenance)

    def subset(self, indices: npt.ArrayLike) -> 'Dataset':
        """Rows at ``indices``, in that order."""
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(self._schema, self._X[indices], self._y[indices],
                       self.provenance)

    def class_counts(self) -> Tuple[int, int]:
        """(number of phishing, number of legitimate) samples."""
        n_phish = int(np.count_nonzero(self._y == PHISHING))
        return n_phish, len(self) - n_phish

    def to_frame(self) -> pd.DataFrame:
        """Dataset as a DataFrame with the canonical header."""
        df = pd.DataFrame(self._X, columns=list(self._schema.feature_names))
        df[LABEL_NAME] = self._y
        return df

    @classmethod
    def from_samples(cls, samples: Sequence[LabeledSample],
                     schema: Optional[FeatureSchema] = None,
                     provenance: str = '') -> 'Dataset':
        """Build from a sequence of LabeledSample."""
        schema = canonical_schema() if schema is None else schema
        X = np.array([s.features for s in samples],
                     dtype=np.int8).reshape(-1, len(schema))
        y = np.array([s.label for s in samples], dtype=np.int8)
        return cls(schema, X, y, provenance)


def load_csv(path: Union[str, PathLike],
             schema: Optional[FeatureSchema] = None) -> Dataset:
    """Read a dataset CSV.

    Parameters
    ----------
    path : str or path-like
        UTF-8 CSV, first row a header naming the 30 features and a
        final ``Result`` column.  Headers match case-insensitively
        after stripping spaces, underscores and dashes; a leading
        ``index``/``id`` column is ignored.
    schema : FeatureSchema, optional
        Defaults to the canonical schema.

    Returns
    -------
    d : Dataset
        Rows in file order.

    Raises
    ------
    DatasetError
        Missing file, wrong column count, unknown or duplicate header,
        missing or non-integer cell, value outside its domain.  Cell
        errors name the 1-based data row and the column.
    """
    schema = canonical_schema() if schema is None else schema
    X, y = _read_table(path, schema, labeled=True)
    d = Dataset(schema, X, y, provenance=str(path))
    logger.info('Loaded %d samples from %s', len(d), path)
    return d


def load_feature_csv(path: Union[str, PathLike],
                     schema: Optional[FeatureSchema] = None) -> np.ndarray:
    """Read feature rows for prediction; a ``Result`` column is optional.

    Returns
    -------
    X : array_like
        (n, 30) int8 matrix in schema order.
    """
    schema = canonical_schema() if schema is None else schema
    X, _ = _read_table(path, schema, labeled=None)
    return X


def _read_table(path, schema, labeled):
    # labeled: True requires the label column, None accepts either
    try:
        raw = pd.read_csv(path, header=None, dtype=str, keep_default_na=False,
                          encoding='utf-8').fillna('')
    except FileNotFoundError:
        raise DatasetError('No such dataset file: %s' % path) from None
    except pd.errors.EmptyDataError:
        raise DatasetError('Dataset file has no header: %s' % path) from None
    except pd.errors.ParserError as err:
        raise DatasetError('Malformed CSV %s: %s' % (path, err)) from None

    # Header taken as a plain row so repeated names are not mangled
    columns = [str(c).strip() for c in raw.iloc[0]]
    df = raw.iloc[1:]
    if columns and normalize_header(columns[0]) in _INDEX_COLUMNS:
        df = df.iloc[:, 1:]
        columns = columns[1:]
    has_label = bool(columns) and (
        normalize_header(columns[-1]) == normalize_header(LABEL_NAME))
    if labeled is None and not has_label:
        df = df.assign(**{LABEL_NAME: '1'})
        columns.append(LABEL_NAME)
    if len(columns) != len(schema) + 1:
        raise DatasetError('Expected %d columns (%d features + %s), got %d' % (
            len(schema) + 1, len(schema), LABEL_NAME, len(columns)))
    if normalize_header(columns[-1]) != normalize_header(LABEL_NAME):
        raise DatasetError('Last column must be %s' % LABEL_NAME,
                           column=columns[-1])

    # Figure out where each file column goes in the schema
    header_map = schema.header_map()
    order = []
    for col in columns[:-1]:
        key = normalize_header(col)
        if key not in header_map:
            raise DatasetError('Unknown feature column', column=col)
        if header_map[key] in order:
            raise DatasetError('Duplicate feature column', column=col)
        order.append(header_map[key])

    cells = df.apply(lambda col: col.str.strip()).to_numpy(dtype=str)
    if cells.size:
        missing = cells == ''
        numeric = np.vectorize(_is_integer, otypes=[bool])(cells)
        bad = missing | ~numeric
        if bad.any():
            ii, jj = np.argwhere(bad)[0]
            what = ('Missing cell' if missing[ii, jj]
                    else 'Non-integer cell %r' % cells[ii, jj])
            raise DatasetError(what, row=int(ii) + 1, column=columns[jj])
        values = cells.astype(np.int64)
        outside = ~np.isin(values, (-1, 0, 1))
        outside[:, -1] = ~np.isin(values[:, -1], (PHISHING, LEGITIMATE))
        if outside.any():
            ii, jj = np.argwhere(outside)[0]
            allowed = '{-1, 1}' if jj == len(columns) - 1 else '{-1, 0, 1}'
            raise DatasetError(
                'Value %d outside %s' % (values[ii, jj], allowed),
                row=int(ii) + 1, column=columns[jj])
    else:
        values = np.zeros((0, len(columns)), dtype=np.int64)

    X = np.zeros((values.shape[0], len(schema)), dtype=np.int8)
    X[:, order] = values[:, :-1]
    return X, values[:, -1]


def _is_integer(cell: str) -> bool:
    body = cell[1:] if cell[:1] in '+-' else cell
    return body.isdigit()


def save_csv(d: Dataset, path: Union[str, PathLike]) -> None:
    """Write ``d`` with the canonical header; ``load_csv`` reads it back."""
    d.to_frame().to_csv(path, index=False, lineterminator='\n')


def summarize(d: Dataset, ddof: int = 1) -> pd.DataFrame:
    """Per-column mean and standard deviation.

    Parameters
    ----------
    d : Dataset
        Non-empty dataset.
    ddof : int, optional
        Delta degrees of freedom of the std.  The default sample
        convention (n - 1) is the one the dataset description table
        uses.  A column with n <= ddof reports std 0.

    Returns
    -------
    stats : DataFrame
        Indexed by display name (30 features then ``Result``), columns
        ``mean`` and ``std``.
    """
    if len(d) == 0:
        raise DatasetError('Cannot summarize an empty dataset')
    df = d.to_frame().astype(np.float64)
    std = df.std(ddof=ddof) if len(d) > ddof else df.mean() * 0.0
    stats = pd.DataFrame({'mean': df.mean(), 'std': std})
    stats.index = list(d.schema.display_names) + [LABEL_NAME]
    return stats


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every sample to one of k folds.

    Attributes
    ----------
    k : int
        Fold count.
    assignments : tuple of int
        Fold index in [0, k) per sample, in dataset order.
    seed : int
        RNG seed the plan was drawn with.
    """
    k: int
    assignments: Tuple[int, ...]
    seed: int

    def folds(self) -> List[np.ndarray]:
        """Sample indices of each fold, ascending."""
        a = np.asarray(self.assignments, dtype=np.intp)
        return [np.flatnonzero(a == f) for f in range(self.k)]

    def to_json(self) -> str:
        return json.dumps({'k': self.k, 'seed': self.seed,
                           'assignments': list(self.assignments)},
                          separators=(',', ':'))

    @classmethod
    def from_json(cls, text: str) -> 'FoldPlan':
        obj = json.loads(text)
        return cls(int(obj['k']), tuple(int(a) for a in obj['assignments']),
                   int(obj['seed']))

    def digest(self) -> str:
        """sha256 of the canonical JSON form."""
        return hashlib.sha256(self.to_json().encode('utf-8')).hexdigest()


def stratified_kfold(d: Dataset, k: int, seed: int) -> FoldPlan:
    """Stratified k-fold assignment.

    Parameters
    ----------
    d : Dataset
        Every class needs at least ``k`` samples.
    k : int
        Fold count, at least 2.
    seed : int
        RNG seed; the plan is a pure function of (d, k, seed).

    Returns
    -------
    plan : FoldPlan
        Fold sizes differ by at most one, and so do per-fold counts of
        each class.

    Notes
    -----
    Indices are shuffled within each class, then dealt round-robin
    into folds.  The deal continues where the previous class stopped
    so the remainders of both classes land on different folds.
    """
    if int(k) != k or k < 2:
        raise ValueError('k must be an integer >= 2, got %r' % (k,))
    k = int(k)
    rng = np.random.default_rng(seed)
    assignments = np.empty(len(d), dtype=np.intp)
    offset = 0
    for label in (PHISHING, LEGITIMATE):
        idx = np.flatnonzero(d.y == label)
        if idx.size < k:
            raise ValueError(
                'Class %+d has %d samples, fewer than k=%d' % (
                    label, idx.size, k))
        idx = rng.permutation(idx)
        assignments[idx] = (offset + np.arange(idx.size)) % k
        offset = (offset + idx.size) % k
    return FoldPlan(k, tuple(int(a) for a in assignments), int(seed))


def stratified_mask(y: np.ndarray, fraction: float, n_take: int,
                    rng: np.random.Generator) -> np.ndarray:
    """Boolean mask selecting ``n_take`` rows spread over both classes.

    Class shares follow largest-remainder rounding of ``fraction``
    times each class size, so every class is within one row of its
    share.
    """
    y = np.asarray(y)
    groups = [np.flatnonzero(y == label) for label in (PHISHING, LEGITIMATE)]
    quota = np.array([fraction*g.size for g in groups])
    take = np.minimum(np.floor(quota).astype(int), [g.size for g in groups])
    for cc in np.argsort(-(quota - take), kind='stable')[:n_take - take.sum()]:
        take[cc] += 1
    mask = np.zeros(y.size, dtype=bool)
    for g, t in zip(groups, take):
        mask[rng.permutation(g)[:t]] = True
    return mask


def holdout_split(d: Dataset, test_fraction: float,
                  seed: int) -> Tuple[Dataset, Dataset]:
    """Stratified train/test split.

    Parameters
    ----------
    d : Dataset
        Samples to split.
    test_fraction : float
        In (0, 1).  The test set holds round-half-up(fraction*n)
        samples.
    seed : int
        RNG seed.

    Returns
    -------
    train, test : Dataset
        Disjoint, together exactly ``d``, each in dataset order.  Per
        class, the test count is within one of fraction*class size.
    """
    if not 0 < test_fraction < 1:
        raise ValueError(
            'test_fraction must lie in (0, 1), got %r' % test_fraction)
    n = len(d)
    n_test = int(np.floor(test_fraction*n + 0.5))
    if n_test == 0 or n_test == n:
        raise ValueError('Split of %d samples at %g leaves one side empty' % (
            n, test_fraction))

    is_test = stratified_mask(d.y, test_fraction, n_test,
                              np.random.default_rng(seed))
    return d.subset(np.flatnonzero(~is_test)), d.subset(np.flatnonzero(is_test))

"""Build a phishing-labeled dataset from a PhishTank URL dump."""

import logging
from os import PathLike
from time import time
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from phishinator.dataset import Dataset
from phishinator.errors import DatasetError, UrlParseError
from phishinator.features import (
    EvidenceTable, RawWebsiteObservation, extract_all)
from phishinator.schema import PHISHING, canonical_schema
from phishinator.thresholds import Thresholds, default_thresholds
from phishinator.urls import parse_url

logger = logging.getLogger(__name__)


def ingest_phishtank_dump(path: Union[str, PathLike],
                          ev_source: Optional[EvidenceTable] = None,
                          thresholds: Optional[Thresholds] = None,
                          n_jobs: int = 1) -> Tuple[Dataset, int]:
    """Extract features for every URL of a dump, labeling each -1.

    Parameters
    ----------
    path : str or path-like
        CSV with the URL in the first column.  A header row is
        tolerated; if it names a ``url`` column, that column is used
        (the layout of the official dump).
    ev_source : EvidenceTable, optional
        Offline evidence; missing domains get all-absent evidence.
    thresholds : dict, optional
        Rule table.
    n_jobs : int, optional
        Rows processed in parallel; output order is input order.

    Returns
    -------
    d : Dataset
        One sample per parsable URL.
    n_skipped : int
        Rows whose URL could not be parsed.

    Raises
    ------
    DatasetError
        Unreadable file or no parsable URL at all.
    """
    urls = read_dump_urls(path)
    t0 = time()
    rows = extract_urls(urls, ev_source, thresholds, n_jobs)
    kept = [r for r in rows if not isinstance(r, UrlParseError)]
    n_skipped = len(rows) - len(kept)
    logger.info('Took %g seconds to extract %d URLs', time() - t0, len(rows))
    if n_skipped:
        logger.warning('Skipped %d unparsable URL(s) in %s', n_skipped, path)
    if not kept:
        raise DatasetError('No parsable URL in %s' % path)

    X = np.stack(kept)
    y = np.full(len(kept), PHISHING, dtype=np.int8)
    return Dataset(canonical_schema(), X, y, provenance=str(path)), n_skipped


def read_dump_urls(path: Union[str, PathLike]) -> List[str]:
    """URL column of a dump, header row removed.

    Raises
    ------
    DatasetError
        Unreadable file.
    """
    try:
        df = pd.read_csv(path, header=None, dtype=str,
                         keep_default_na=False, encoding='utf-8')
    except (OSError, pd.errors.ParserError,
            pd.errors.EmptyDataError, UnicodeDecodeError) as err:
        raise DatasetError('Cannot read dump %s: %s' % (path, err)) from None

    column = 0
    if len(df):
        first = [str(c).strip().lower() for c in df.iloc[0]]
        if 'url' in first:
            column = first.index('url')
            df = df.iloc[1:]
        elif not _looks_like_url(first[0]):
            df = df.iloc[1:]
    return [u.strip() for u in df.iloc[:, column]] if len(df) else []


def extract_urls(urls: Sequence[str],
                 ev_source: Optional[EvidenceTable] = None,
                 thresholds: Optional[Thresholds] = None,
                 n_jobs: int = 1) -> List[Union[np.ndarray, UrlParseError]]:
    """Feature vector per URL, or the parse error for URLs that fail."""
    ev_source = EvidenceTable() if ev_source is None else ev_source
    t = default_thresholds() if thresholds is None else thresholds
    return Parallel(n_jobs=n_jobs)(
        delayed(_extract_row)(url, ev_source, t) for url in urls)


def _extract_row(url: str, ev_source: EvidenceTable, thresholds: Thresholds):
    try:
        parts = parse_url(url)
    except UrlParseError as err:
        return err
    obs = RawWebsiteObservation(url=url)
    return extract_all(obs, ev_source.lookup(parts.hostname),
                       thresholds=thresholds)


def _looks_like_url(cell: str) -> bool:
    return '.' in cell or '://' in cell

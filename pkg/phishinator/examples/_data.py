"""Locate the dataset snapshot for the examples."""

import os
import pathlib
import sys

from phishinator import load_csv

BUNDLED = (pathlib.Path(__file__).parent.parent / 'data'
           / 'phishing_websites.csv')


def snapshot():
    """Dataset named on the command line, by $PHISH_DATASET, or bundled."""
    if len(sys.argv) > 1:
        path = sys.argv[1]
    else:
        path = os.environ.get('PHISH_DATASET') or str(BUNDLED)
    if not os.path.exists(path):
        sys.exit('Dataset %s not found; pass a path or set PHISH_DATASET'
                 % path)
    return load_csv(path)

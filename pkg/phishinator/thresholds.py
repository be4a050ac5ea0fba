"""Rule parameters of the feature extractor.

Notes
-----
The cut points follow the conventions documented for the public
phishing websites dataset; they are decisions rather than ground
truth, so every one can be overridden from a JSON file.
"""

import copy
import json
from os import PathLike
from typing import Any, Dict, Union

from phishinator.errors import ConfigError
from phishinator.schema import FEATURE_NAMES

Thresholds = Dict[str, Dict[str, Any]]


def _shortener_hosts():
    return [
        'bit.ly', 'bitly.com', 'goo.gl', 'tinyurl.com', 'ow.ly', 't.co',
        'is.gd', 'buff.ly', 'adf.ly', 'bit.do', 'cutt.ly', 'shorte.st',
        'tiny.cc', 'v.gd', 'rebrand.ly', 'lnkd.in', 'db.tt', 'qr.ae',
        'j.mp', 'x.co', 'tr.im', 'po.st', 'soo.gd', 'rb.gy',
    ]


def default_thresholds() -> Thresholds:
    """Fresh copy of the built-in rule table.

    Returns
    -------
    table : dict
        Feature column name → parameter dict.  Ratios are fractions in
        [0, 1]; lengths count characters; ages count days.
    """
    table = dict()
    table['URL_Length'] = {'legitimate_below': 54, 'phishing_above': 75}
    table['Shortining_Service'] = {'hosts': _shortener_hosts()}
    table['having_Sub_Domain'] = {'legitimate_max_dots': 1,
                                  'suspicious_max_dots': 2}
    table['port'] = {'standard_ports': [80, 443]}
    table['Request_URL'] = {'legitimate_below': .22, 'phishing_above': .61}
    table['URL_of_Anchor'] = {'legitimate_below': .31, 'phishing_above': .67}
    table['Links_in_tags'] = {'legitimate_below': .22, 'phishing_above': .61}
    table['Domain_registeration_length'] = {'phishing_at_most_days': 365}
    table['Redirect'] = {'legitimate_at_most': 1, 'phishing_above': 4}
    table['age_of_domain'] = {'phishing_below_days': 30}
    table['web_traffic'] = {'legitimate_at_most_rank': 100000,
                            'suspicious_at_most_rank': 1000000}
    table['Page_Rank'] = {'phishing_below': .2}
    table['Links_pointing_to_page'] = {'phishing_at_most': 0,
                                       'suspicious_at_most': 2}
    return table


def load_thresholds(path: Union[str, PathLike]) -> Thresholds:
    """Defaults overridden by a JSON file of the same shape.

    Raises
    ------
    ConfigError
        Unreadable file, unknown feature name, or a parameter the
        feature's rule does not take.
    """
    try:
        with open(path, encoding='utf-8') as f:
            overrides = json.load(f)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError('Cannot read threshold file %s: %s' % (
            path, err)) from None
    return merge_thresholds(overrides)


def merge_thresholds(overrides: Dict[str, Dict[str, Any]]) -> Thresholds:
    """Validate ``overrides`` against the default table and apply them."""
    table = default_thresholds()
    if not isinstance(overrides, dict):
        raise ConfigError('Threshold config must be a JSON object')
    for feature, params in overrides.items():
        if feature not in table:
            hint = ('has no tunable rule' if feature in FEATURE_NAMES
                    else 'is not a feature')
            raise ConfigError('%r %s' % (feature, hint))
        if not isinstance(params, dict):
            raise ConfigError('Parameters of %r must be an object' % feature)
        unknown = set(params) - set(table[feature])
        if unknown:
            raise ConfigError('Unknown parameter(s) %s for %r' % (
                sorted(unknown), feature))
        table[feature].update(copy.deepcopy(params))
    return table

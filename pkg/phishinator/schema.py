"""The 30-feature schema of the phishing websites dataset.

Notes
-----
Names follow the column headers of the public dataset snapshot
(including its spellings, e.g. ``Shortining_Service``) so files
round-trip unchanged.  Display names follow the dataset description
table and are accepted as header aliases.
"""

from dataclasses import dataclass
from typing import Dict, FrozenSet, Optional, Tuple

LABEL_NAME = 'Result'
PHISHING = -1
LEGITIMATE = 1
TERNARY = frozenset((-1, 0, 1))

# (column name, display name, values observed in the public snapshot)
_FEATURE_TABLE = (
    ('having_IP_Address', 'Having IP Address', (-1, 1)),
    ('URL_Length', 'URL Length', (-1, 0, 1)),
    ('Shortining_Service', 'Shortening Service', (-1, 1)),
    ('having_At_Symbol', 'Having @ Symbol', (-1, 1)),
    ('double_slash_redirecting', 'Double Slash Redirecting', (-1, 1)),
    ('Prefix_Suffix', 'Prefix Suffix', (-1, 1)),
    ('having_Sub_Domain', 'Having Sub Domain', (-1, 0, 1)),
    ('SSLfinal_State', 'SSL Final State', (-1, 0, 1)),
    ('Domain_registeration_length', 'Domain Reg Length', (-1, 1)),
    ('Favicon', 'Favicon', (-1, 1)),
    ('port', 'Port', (-1, 1)),
    ('HTTPS_token', 'HTTPS Token', (-1, 1)),
    ('Request_URL', 'Request URL', (-1, 1)),
    ('URL_of_Anchor', 'URL of Anchor', (-1, 0, 1)),
    ('Links_in_tags', 'Links in Tags', (-1, 0, 1)),
    ('SFH', 'SFH', (-1, 0, 1)),
    ('Submitting_to_email', 'Submitting To Email', (-1, 1)),
    ('Abnormal_URL', 'Abnormal URL', (-1, 1)),
    ('Redirect', 'Website Redirect Count', (0, 1)),
    ('on_mouseover', 'On Mouse Over', (-1, 1)),
    ('RightClick', 'Right Click', (-1, 1)),
    ('popUpWidnow', 'Pop Up Window', (-1, 1)),
    ('Iframe', 'IFrame', (-1, 1)),
    ('age_of_domain', 'Age of Domain', (-1, 1)),
    ('DNSRecord', 'DNS Record', (-1, 1)),
    ('web_traffic', 'Web Traffic', (-1, 0, 1)),
    ('Page_Rank', 'Page Rank', (-1, 1)),
    ('Google_Index', 'Google Index', (-1, 1)),
    ('Links_pointing_to_page', 'Links Pointing to Page', (-1, 0, 1)),
    ('Statistical_report', 'Statistical Report', (-1, 1)),
)


@dataclass(frozen=True)
class FeatureSchema:
    """Ordered feature names with their allowed value sets.

    Attributes
    ----------
    feature_names : tuple of str
        Column names in canonical order.
    feature_domains : tuple of frozenset
        Allowed values per feature, each a non-empty subset of
        {-1, 0, 1}.
    display_names : tuple of str
        Human readable names, same order.
    observed_domains : tuple of frozenset, optional
        Value sets seen in the public snapshot, for reference only.
    """
    feature_names: Tuple[str, ...]
    feature_domains: Tuple[FrozenSet[int], ...]
    display_names: Tuple[str, ...] = ()
    observed_domains: Optional[Tuple[FrozenSet[int], ...]] = None

    def __post_init__(self):
        n = len(self.feature_names)
        if len(set(self.feature_names)) != n:
            raise ValueError('Feature names must be unique!')
        if len(self.feature_domains) != n:
            raise ValueError(
                'Need one domain per feature, got %d for %d features' % (
                    len(self.feature_domains), n))
        for name, dom in zip(self.feature_names, self.feature_domains):
            if not dom or not set(dom) <= TERNARY:
                raise ValueError(
                    'Domain of %s must be a non-empty subset of '
                    '{-1, 0, 1}, got %r' % (name, sorted(dom)))
        if not self.display_names:
            object.__setattr__(self, 'display_names', self.feature_names)

    def __len__(self) -> int:
        return len(self.feature_names)

    def index(self, name: str) -> int:
        """Position of a feature given its column, display or alias name."""
        return self.header_map()[normalize_header(name)]

    def header_map(self) -> Dict[str, int]:
        """Normalized header → feature position."""
        out = {}
        for ii, (name, disp) in enumerate(
                zip(self.feature_names, self.display_names)):
            out[normalize_header(name)] = ii
            out[normalize_header(disp)] = ii
        return out

    def underscored(self, ii: int) -> str:
        """Display name with spaces replaced, e.g. ``Having_IP_Address``."""
        return self.display_names[ii].replace(' ', '_')


def normalize_header(name: str) -> str:
    """Lowercase and drop spaces, underscores and dashes."""
    return ''.join(
        ch for ch in str(name).strip().lower() if ch not in ' _-')


def canonical_schema() -> FeatureSchema:
    """The 30-feature schema, every domain {-1, 0, 1}."""
    return FeatureSchema(
        feature_names=tuple(row[0] for row in _FEATURE_TABLE),
        feature_domains=tuple(TERNARY for _ in _FEATURE_TABLE),
        display_names=tuple(row[1] for row in _FEATURE_TABLE),
        observed_domains=tuple(frozenset(row[2]) for row in _FEATURE_TABLE))


FEATURE_NAMES = tuple(row[0] for row in _FEATURE_TABLE)
N_FEATURES = len(FEATURE_NAMES)

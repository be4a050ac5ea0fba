"""Turn a raw website observation into the 30 ternary features.

Notes
-----
Every rule maps the attack pattern it looks for to -1 (phishing),
an ambiguous reading to 0 (suspicious) and a clean reading to +1
(legitimate), the same sign convention as the dataset labels.
Rules are grouped by what they need to look at:

    - lexical: the URL string only
    - content: the page HTML (0 for every rule when it is missing)
    - reputation: third-party evidence and the redirect chain

Status bar customization and favicon are approximated by static tag
and attribute scanning; nothing is rendered or fetched.
"""

import json
import re
from dataclasses import dataclass, fields
from enum import IntEnum
from os import PathLike
from typing import Dict, List, Mapping, Optional, Union

import numpy as np
from bs4 import BeautifulSoup

from phishinator.errors import ConfigError, UrlParseError
from phishinator.schema import FeatureSchema, FEATURE_NAMES, canonical_schema
from phishinator.thresholds import Thresholds, default_thresholds
from phishinator.urls import (
    UrlParts, is_ip_host, parse_url, registered_domain, split_host)


class Ternary(IntEnum):
    """Value of one feature."""
    PHISHING = -1
    SUSPICIOUS = 0
    LEGITIMATE = 1


LEXICAL_FEATURES = (
    'having_IP_Address', 'URL_Length', 'Shortining_Service',
    'having_At_Symbol', 'double_slash_redirecting', 'Prefix_Suffix',
    'having_Sub_Domain', 'port', 'HTTPS_token')
CONTENT_FEATURES = (
    'Favicon', 'Request_URL', 'URL_of_Anchor', 'Links_in_tags', 'SFH',
    'Submitting_to_email', 'on_mouseover', 'RightClick', 'popUpWidnow',
    'Iframe')
REPUTATION_FEATURES = (
    'SSLfinal_State', 'Domain_registeration_length', 'Abnormal_URL',
    'Redirect', 'age_of_domain', 'DNSRecord', 'web_traffic', 'Page_Rank',
    'Google_Index', 'Links_pointing_to_page', 'Statistical_report')

PHISH, SUSP, LEGIT = Ternary.PHISHING, Ternary.SUSPICIOUS, Ternary.LEGITIMATE


@dataclass(frozen=True)
class RawWebsiteObservation:
    """What was seen when visiting a URL.

    Attributes
    ----------
    url : str
        Address as given.
    html : str, optional
        Page source.
    final_url_after_redirects : str, optional
        Where the redirect chain ended.
    redirect_count : int, optional
        Number of redirects followed.
    """
    url: str
    html: Optional[str] = None
    final_url_after_redirects: Optional[str] = None
    redirect_count: Optional[int] = None

    def __post_init__(self):
        if not self.url:
            raise ValueError('Observation needs a non-empty url')
        if self.redirect_count is not None and self.redirect_count < 0:
            raise ValueError(
                'redirect_count must be >= 0, got %d' % self.redirect_count)


@dataclass(frozen=True)
class ExternalEvidence:
    """Third-party facts about a domain; every field may be absent."""
    domain_age_days: Optional[int] = None
    domain_registration_length_days: Optional[int] = None
    has_dns_record: Optional[bool] = None
    traffic_rank: Optional[int] = None
    page_rank: Optional[float] = None
    google_indexed: Optional[bool] = None
    links_pointing: Optional[int] = None
    on_phishing_ip_list: Optional[bool] = None
    whois_identity_in_url: Optional[bool] = None
    certificate_valid: Optional[bool] = None
    issuer_trusted: Optional[bool] = None

    def __post_init__(self):
        if self.page_rank is not None and not 0 <= self.page_rank <= 1:
            raise ValueError(
                'page_rank must lie in [0, 1], got %r' % self.page_rank)
        if self.traffic_rank is not None and self.traffic_rank < 1:
            raise ValueError(
                'traffic_rank must be positive, got %r' % self.traffic_rank)
        if self.links_pointing is not None and self.links_pointing < 0:
            raise ValueError(
                'links_pointing must be >= 0, got %r' % self.links_pointing)

    @classmethod
    def from_dict(cls, obj: Mapping) -> 'ExternalEvidence':
        known = {f.name for f in fields(cls)}
        unknown = set(obj) - known
        if unknown:
            raise ConfigError('Unknown evidence field(s) %s' % sorted(unknown))
        try:
            return cls(**obj)
        except (TypeError, ValueError) as err:
            raise ConfigError(str(err)) from None


class EvidenceTable:
    """Offline evidence keyed by registered domain.

    Unknown domains yield an all-absent ExternalEvidence.
    """

    def __init__(self, entries: Optional[Mapping[str, ExternalEvidence]] = None):
        self._entries = {k.lower(): v for k, v in (entries or {}).items()}

    def __len__(self) -> int:
        return len(self._entries)

    def lookup(self, hostname: str) -> ExternalEvidence:
        hostname = hostname.lower()
        if hostname in self._entries:
            return self._entries[hostname]
        return self._entries.get(
            registered_domain(hostname), ExternalEvidence())


def load_evidence(path: Union[str, PathLike]) -> EvidenceTable:
    """Read a JSON map of registered domain → evidence fields."""
    try:
        with open(path, encoding='utf-8') as f:
            raw = json.load(f)
    except (OSError, json.JSONDecodeError) as err:
        raise ConfigError('Cannot read evidence file %s: %s' % (
            path, err)) from None
    if not isinstance(raw, dict):
        raise ConfigError('Evidence file must hold a JSON object')
    return EvidenceTable(
        {dom: ExternalEvidence.from_dict(ev) for dom, ev in raw.items()})


def extract_lexical(parts: UrlParts,
                    thresholds: Optional[Thresholds] = None
                    ) -> Dict[str, Ternary]:
    """URL-only rules.

    Parameters
    ----------
    parts : UrlParts
        Parsed URL.
    thresholds : dict, optional
        Rule table, see ``phishinator.thresholds``.

    Returns
    -------
    values : dict
        Feature name → value for ``LEXICAL_FEATURES``.
    """
    t = default_thresholds() if thresholds is None else thresholds
    host = parts.hostname
    out = dict()
    out['having_IP_Address'] = PHISH if is_ip_host(host) else LEGIT
    out['URL_Length'] = _banded(
        len(parts.raw), t['URL_Length']['legitimate_below'],
        t['URL_Length']['phishing_above'])
    bare = host[4:] if host.startswith('www.') else host
    out['Shortining_Service'] = (
        PHISH if bare in t['Shortining_Service']['hosts'] else LEGIT)

    # Scan past the scheme so the mandatory :// is not counted
    out['having_At_Symbol'] = PHISH if '@' in parts.after_scheme else LEGIT
    out['double_slash_redirecting'] = (
        PHISH if '//' in parts.after_scheme else LEGIT)
    out['Prefix_Suffix'] = PHISH if '-' in host else LEGIT

    # An IP literal has no subdomains; having_IP_Address covers it
    if is_ip_host(host):
        dots = 0
    else:
        _, _, suffix = split_host(bare)
        labels = bare[:-len(suffix) - 1] if suffix else bare
        dots = labels.count('.')
    sub = t['having_Sub_Domain']
    if dots <= sub['legitimate_max_dots']:
        out['having_Sub_Domain'] = LEGIT
    elif dots <= sub['suspicious_max_dots']:
        out['having_Sub_Domain'] = SUSP
    else:
        out['having_Sub_Domain'] = PHISH

    out['port'] = (
        PHISH if parts.port is not None
        and parts.port not in t['port']['standard_ports'] else LEGIT)
    out['HTTPS_token'] = PHISH if 'https' in host else LEGIT
    return out


def extract_content(obs: RawWebsiteObservation,
                    thresholds: Optional[Thresholds] = None
                    ) -> Dict[str, Ternary]:
    """HTML rules.

    Parameters
    ----------
    obs : RawWebsiteObservation
        Its ``url`` must parse; without ``html`` every value is 0.
    thresholds : dict, optional
        Rule table.

    Returns
    -------
    values : dict
        Feature name → value for ``CONTENT_FEATURES``.
    """
    if obs.html is None:
        return {name: SUSP for name in CONTENT_FEATURES}
    t = default_thresholds() if thresholds is None else thresholds
    page = registered_domain(parse_url(obs.url).hostname)
    html = obs.html
    tags = _collect_tags(html)

    def external(link):
        return _is_external(link, page)

    out = dict()
    icons = [href for rel, href in tags['icon'] if 'icon' in rel]
    out['Favicon'] = PHISH if any(map(external, icons)) else LEGIT

    requests = tags['request']
    out['Request_URL'] = _ratio_rule(
        sum(map(external, requests)), len(requests), t['Request_URL'])

    anchors = tags['a']
    unsafe = sum(_unsafe_anchor(href) or external(href) for href in anchors)
    out['URL_of_Anchor'] = _ratio_rule(unsafe, len(anchors),
                                       t['URL_of_Anchor'])

    links = tags['links']
    out['Links_in_tags'] = _ratio_rule(
        sum(map(external, links)), len(links), t['Links_in_tags'])

    actions = tags['form']
    if any(external(a) for a in actions
           if a and not a.lower().startswith(('mailto:', 'about:'))):
        out['SFH'] = PHISH
    elif any(not a or a.lower() == 'about:blank' for a in actions):
        out['SFH'] = SUSP
    else:
        out['SFH'] = LEGIT

    mails = any(a.lower().startswith('mailto:') for a in actions)
    out['Submitting_to_email'] = (
        PHISH if mails or _MAIL_CALL.search(html) else LEGIT)
    out['on_mouseover'] = (
        PHISH if any(_STATUS_WRITE.search(h) for h in tags['mouseover'])
        else LEGIT)
    out['RightClick'] = (
        PHISH if _RIGHT_CLICK.search(html) or any(
            'return false' in h.lower() for h in tags['contextmenu'])
        else LEGIT)
    out['popUpWidnow'] = PHISH if _WINDOW_OPEN.search(html) else LEGIT
    out['Iframe'] = PHISH if tags['iframe'] or _IFRAME.search(html) else LEGIT
    return out


def extract_reputation(parts: UrlParts, ev: ExternalEvidence,
                       redirect_count: Optional[int] = None,
                       thresholds: Optional[Thresholds] = None
                       ) -> Dict[str, Ternary]:
    """Evidence rules.

    Parameters
    ----------
    parts : UrlParts
        Parsed URL (scheme drives SSL state).
    ev : ExternalEvidence
        Absent fields give the suspicious value 0.
    redirect_count : int, optional
        Length of the redirect chain.
    thresholds : dict, optional
        Rule table.

    Returns
    -------
    values : dict
        Feature name → value for ``REPUTATION_FEATURES``.
    """
    t = default_thresholds() if thresholds is None else thresholds
    out = dict()
    if parts.scheme.lower() != 'https' or ev.certificate_valid is False:
        out['SSLfinal_State'] = PHISH
    elif ev.certificate_valid and ev.issuer_trusted is not False:
        out['SSLfinal_State'] = LEGIT
    else:
        out['SSLfinal_State'] = SUSP

    reg = ev.domain_registration_length_days
    out['Domain_registeration_length'] = _unless_none(
        reg, lambda v: v <= t['Domain_registeration_length'][
            'phishing_at_most_days'], PHISH, LEGIT)
    out['Abnormal_URL'] = _from_flag(ev.whois_identity_in_url)

    rd = t['Redirect']
    if redirect_count is None:
        out['Redirect'] = SUSP
    elif redirect_count <= rd['legitimate_at_most']:
        out['Redirect'] = LEGIT
    elif redirect_count <= rd['phishing_above']:
        out['Redirect'] = SUSP
    else:
        out['Redirect'] = PHISH

    out['age_of_domain'] = _unless_none(
        ev.domain_age_days,
        lambda v: v < t['age_of_domain']['phishing_below_days'],
        PHISH, LEGIT)
    out['DNSRecord'] = _from_flag(ev.has_dns_record)

    wt = t['web_traffic']
    if ev.traffic_rank is None:
        out['web_traffic'] = SUSP
    elif ev.traffic_rank <= wt['legitimate_at_most_rank']:
        out['web_traffic'] = LEGIT
    elif ev.traffic_rank <= wt['suspicious_at_most_rank']:
        out['web_traffic'] = SUSP
    else:
        out['web_traffic'] = PHISH

    out['Page_Rank'] = _unless_none(
        ev.page_rank, lambda v: v < t['Page_Rank']['phishing_below'],
        PHISH, LEGIT)
    out['Google_Index'] = _from_flag(ev.google_indexed)

    lp = t['Links_pointing_to_page']
    if ev.links_pointing is None:
        out['Links_pointing_to_page'] = SUSP
    elif ev.links_pointing <= lp['phishing_at_most']:
        out['Links_pointing_to_page'] = PHISH
    elif ev.links_pointing <= lp['suspicious_at_most']:
        out['Links_pointing_to_page'] = SUSP
    else:
        out['Links_pointing_to_page'] = LEGIT

    listed = ev.on_phishing_ip_list
    out['Statistical_report'] = _from_flag(
        None if listed is None else not listed)
    return out


def extract_all(obs: RawWebsiteObservation, ev: ExternalEvidence,
                schema: Optional[FeatureSchema] = None,
                thresholds: Optional[Thresholds] = None) -> np.ndarray:
    """All 30 features in schema order.

    Parameters
    ----------
    obs : RawWebsiteObservation
        URL plus optional HTML and redirect information.
    ev : ExternalEvidence
        Reputation facts.
    schema : FeatureSchema, optional
        Must be the canonical schema (the default).
    thresholds : dict, optional
        Rule table.

    Returns
    -------
    x : ndarray of int8, shape (30,)
        The feature vector.

    Raises
    ------
    UrlParseError
        ``obs.url`` has no usable host.
    """
    schema = canonical_schema() if schema is None else schema
    if tuple(schema.feature_names) != FEATURE_NAMES:
        raise ValueError('Extraction only fills the canonical schema')
    t = default_thresholds() if thresholds is None else thresholds
    parts = parse_url(obs.url)
    values = extract_lexical(parts, t)
    values.update(extract_content(obs, t))
    values.update(extract_reputation(parts, ev, obs.redirect_count, t))
    return np.array([int(values[name]) for name in schema.feature_names],
                    dtype=np.int8)


_MAIL_CALL = re.compile(r'\bmail\s*\(', re.I)
_STATUS_WRITE = re.compile(r'window\.status|\bstatus\s*=', re.I)
_RIGHT_CLICK = re.compile(r'event\.button\s*==+\s*2', re.I)
_WINDOW_OPEN = re.compile(r'window\.open\s*\(', re.I)
_IFRAME = re.compile(r'<\s*iframe\b', re.I)
_REQUEST_TAGS = ('img', 'audio', 'video', 'source', 'embed')


def _collect_tags(html: str) -> Dict[str, List]:
    """Link-bearing attributes grouped by the rule that reads them."""
    out = {'icon': [], 'request': [], 'a': [], 'links': [], 'form': [],
           'mouseover': [], 'contextmenu': [], 'iframe': []}
    soup = BeautifulSoup(html, 'html.parser')
    for tag in soup.find_all(list(_REQUEST_TAGS), src=True):
        out['request'].append(tag['src'].strip())
    for tag in soup.find_all('a', href=True):
        out['a'].append(tag['href'].strip())
    for tag in soup.find_all('link', href=True):
        rel = ' '.join(tag.get('rel') or []).lower()
        out['icon'].append((rel, tag['href'].strip()))
        out['links'].append(tag['href'].strip())
    for tag in soup.find_all('script', src=True):
        out['links'].append(tag['src'].strip())
    for tag in soup.find_all('meta', content=True):
        content = tag['content'].strip()
        if 'url=' in content.lower():
            content = content[content.lower().index('url=') + 4:].strip()
        if '://' in content:
            out['links'].append(content)
    for tag in soup.find_all('form'):
        out['form'].append((tag.get('action') or '').strip())
    for tag in soup.find_all(onmouseover=True):
        out['mouseover'].append(tag['onmouseover'])
    for tag in soup.find_all(oncontextmenu=True):
        out['contextmenu'].append(tag['oncontextmenu'])
    out['iframe'] = soup.find_all('iframe')
    return out


def _is_external(link: str, page_domain: str) -> bool:
    if link.startswith('//'):
        link = 'http:' + link
    elif '://' not in link:
        return False
    try:
        host = parse_url(link).hostname
    except UrlParseError:
        return False
    return registered_domain(host) != page_domain


def _unsafe_anchor(href: str) -> bool:
    h = href.lower()
    return (not h or h.startswith('#') or h.startswith('javascript:')
            or h.startswith('mailto:'))


def _banded(value: float, legit_below: float, phish_above: float) -> Ternary:
    if value < legit_below:
        return LEGIT
    if value <= phish_above:
        return SUSP
    return PHISH


def _ratio_rule(n_bad: int, n_total: int, params: Mapping) -> Ternary:
    ratio = n_bad/n_total if n_total else 0.0
    return _banded(ratio, params['legitimate_below'], params['phishing_above'])


def _unless_none(value, is_phishing, phish: Ternary, legit: Ternary) -> Ternary:
    if value is None:
        return SUSP
    return phish if is_phishing(value) else legit


def _from_flag(flag: Optional[bool]) -> Ternary:
    if flag is None:
        return SUSP
    return LEGIT if flag else PHISH

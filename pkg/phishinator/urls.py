"""Split URL strings into the components the lexical rules look at."""

import ipaddress
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, Optional, Tuple

import tldextract

from phishinator.errors import UrlParseError

_SCHEME_DELIM = '://'
_HEX_OR_DWORD_HOST = re.compile(
    r'^(?:0x[0-9a-f]+|\d+)(?:\.(?:0x[0-9a-f]+|\d+)){0,3}$')


@dataclass(frozen=True)
class UrlParts:
    """URL split at its delimiters, keeping the original text.

    Attributes
    ----------
    scheme : str
        Text before the first ``://`` ('' when there is none).
    host : str
        Host as written (case preserved); see ``hostname``.
    port : int or None
        Explicit port.
    path, query, fragment : str
        Remaining components without their delimiters.
    raw : str
        The string that was parsed.
    userinfo : str or None
        Text before ``@`` in the authority, if any.
    separators : frozenset of str
        Which of ``'://'``, ``'?'``, ``'#'`` occurred as delimiters, so
        that empty components round-trip.
    """
    scheme: str
    host: str
    port: Optional[int]
    path: str
    query: str
    fragment: str
    raw: str
    userinfo: Optional[str] = None
    separators: FrozenSet[str] = frozenset()

    @property
    def hostname(self) -> str:
        """Lowercased host without IPv6 brackets."""
        return self.host.lower().strip('[]')

    @property
    def after_scheme(self) -> str:
        """Raw text following the scheme delimiter."""
        if _SCHEME_DELIM in self.separators:
            return self.raw[len(self.scheme) + len(_SCHEME_DELIM):]
        return self.raw

    def unparse(self) -> str:
        """Reassemble; equals ``raw`` for anything ``parse_url`` made."""
        out = ''
        if _SCHEME_DELIM in self.separators:
            out += self.scheme + _SCHEME_DELIM
        if self.userinfo is not None:
            out += self.userinfo + '@'
        out += self.host
        if self.port is not None:
            out += ':%d' % self.port
        out += self.path
        if '?' in self.separators:
            out += '?' + self.query
        if '#' in self.separators:
            out += '#' + self.fragment
        return out


def parse_url(s: str) -> UrlParts:
    """Split a URL string.

    Parameters
    ----------
    s : str
        Absolute URL, or a scheme-less one such as ``bit.ly/1sSEGTB``.

    Returns
    -------
    parts : UrlParts
        Components split at the first ``://``, then the first ``/``,
        ``?`` or ``#`` after the authority.

    Raises
    ------
    UrlParseError
        Empty string, empty host or non-numeric port.
    """
    if not s or not s.strip():
        raise UrlParseError('Empty URL')
    seps = set()
    scheme, rest = '', s
    pos = s.find(_SCHEME_DELIM)
    if pos >= 0:
        scheme, rest = s[:pos], s[pos + len(_SCHEME_DELIM):]
        seps.add(_SCHEME_DELIM)

    # Authority runs up to the first of / ? #
    ends = [rest.find(ch) for ch in '/?#' if ch in rest]
    end = min(ends) if ends else len(rest)
    authority, tail = rest[:end], rest[end:]

    fragment = ''
    if '#' in tail:
        tail, fragment = tail.split('#', 1)
        seps.add('#')
    query = ''
    if '?' in tail:
        tail, query = tail.split('?', 1)
        seps.add('?')
    path = tail

    userinfo = None
    if '@' in authority:
        userinfo, authority = authority.rsplit('@', 1)
    host, port = _split_port(authority, s)
    if not host:
        raise UrlParseError('No host in URL %r' % s)
    return UrlParts(scheme=scheme, host=host, port=port, path=path,
                    query=query, fragment=fragment, raw=s,
                    userinfo=userinfo, separators=frozenset(seps))


def _split_port(authority: str, s: str) -> Tuple[str, Optional[int]]:
    if authority.startswith('['):
        close = authority.find(']')
        if close < 0:
            raise UrlParseError('Unclosed IPv6 host in %r' % s)
        host, rest = authority[:close + 1], authority[close + 1:]
    elif ':' in authority:
        host, rest = authority.rsplit(':', 1)
        rest = ':' + rest
    else:
        return authority, None
    if not rest:
        return host, None
    if not rest.startswith(':') or not rest[1:].isdigit():
        raise UrlParseError('Bad port %r in %r' % (rest, s))
    return host, int(rest[1:])


def is_ip_host(hostname: str) -> bool:
    """Dotted IPv4, IPv6, or hex/dword-encoded IPv4 host."""
    try:
        ipaddress.ip_address(hostname.strip('[]'))
        return True
    except ValueError:
        return bool(_HEX_OR_DWORD_HOST.match(hostname.lower()))


@lru_cache(maxsize=None)
def _extractor() -> tldextract.TLDExtract:
    # Bundled public-suffix snapshot only; never touches the network
    return tldextract.TLDExtract(suffix_list_urls=(), cache_dir=None)


@lru_cache(maxsize=4096)
def split_host(hostname: str) -> Tuple[str, str, str]:
    """(subdomain, domain, public suffix) of a lowercased host."""
    ext = _extractor()(hostname)
    return ext.subdomain, ext.domain, ext.suffix


def registered_domain(hostname: str) -> str:
    """Domain plus public suffix, e.g. ``example.co.uk``; IPs unchanged."""
    if is_ip_host(hostname):
        return hostname
    _, domain, suffix = split_host(hostname.lower())
    if domain and suffix:
        return domain + '.' + suffix
    return domain or hostname.lower()

"""Feature vector of a single URL, with and without domain evidence."""

import sys

from phishinator import (
    ExternalEvidence, RawWebsiteObservation, canonical_schema, extract_all)


if __name__ == '__main__':

    url = sys.argv[1] if len(sys.argv) > 1 else (
        'http://217.102.24.235//secure-login.html')
    html = ("<html><body><form action='mailto:drop@evil.net'></form>"
            "<a href='#'>Sign in</a></body></html>")
    obs = RawWebsiteObservation(url, html, redirect_count=2)
    schema = canonical_schema()

    # Nothing known about the domain: reputation features stay suspicious
    x = extract_all(obs, ExternalEvidence())
    ev = ExternalEvidence(domain_age_days=12, has_dns_record=False,
                          traffic_rank=2500000, google_indexed=False)
    y = extract_all(obs, ev)
    for name, a, b in zip(schema.display_names, x, y):
        print('%-30s %3d %3d' % (name, a, b))

"""Optional retrieval of source pages, with an on-disk snapshot cache.

The canonical interchange format is the ``year,value`` CSV read by
:mod:`kgcycles.series`. :func:`parse_uspto_counts` is a best-effort adapter
for the USPTO calendar-year counts table and may need a column hint when
the page layout changes.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import time
import urllib.error
import urllib.parse
import urllib.request
from html.parser import HTMLParser
from pathlib import Path

import numpy as np

from .errors import CacheMissError, FetchError, ParseError, ValidationError
from .series import PATENT_COUNT, AnnualSeries

#: Environment variable overriding the snapshot cache directory.
CACHE_ENV = "KGCYCLES_CACHE_DIR"
USPTO_COUNTS_URL = "http://www.uspto.gov/web/offices/ac/ido/oeip/taf/h_counts.htm"

_write_lock = threading.Lock()


def cache_dir(override=None):
    if override is not None:
        return Path(override)
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path.home() / ".cache" / "kgcycles"


def snapshot_paths(url, directory=None):
    """Return ``(body_path, metadata_path)`` for ``url`` in the cache."""
    key = hashlib.sha256(url.encode("utf-8")).hexdigest()
    d = cache_dir(directory)
    return d / key, d / f"{key}.json"


def _check_url(url):
    parts = urllib.parse.urlparse(url)
    if parts.scheme not in ("http", "https") or not parts.netloc:
        raise ValidationError(f"not a valid http(s) URL: {url!r}")


def _atomic_write(path, data):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def fetch_source(url, offline=False, cache=None, timeout=30.0):
    """Fetch ``url`` and return the body bytes, writing a snapshot to the cache.

    In offline mode the cached snapshot is returned and no request is made.
    """
    _check_url(url)
    body_path, meta_path = snapshot_paths(url, cache)
    if offline:
        if not body_path.exists():
            raise CacheMissError(f"offline and no snapshot for {url} in {body_path.parent}")
        return body_path.read_bytes()
    try:
        with urllib.request.urlopen(url, timeout=timeout) as resp:
            status = resp.status
            body = resp.read()
    except urllib.error.HTTPError as e:
        raise FetchError(f"HTTP {e.code} fetching {url}") from e
    except (urllib.error.URLError, OSError) as e:
        raise FetchError(f"failed to fetch {url}: {e}") from e
    if not 200 <= status < 300:
        raise FetchError(f"HTTP {status} fetching {url}")
    meta = {"url": url, "fetched_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), "bytes": len(body)}
    with _write_lock:
        _atomic_write(body_path, body)
        _atomic_write(meta_path, json.dumps(meta, indent=2).encode("utf-8"))
    return body


class _TableRows(HTMLParser):
    def __init__(self):
        super().__init__()
        self.rows = []
        self._row = None
        self._cell = None

    def handle_starttag(self, tag, attrs):
        if tag == "tr":
            self._row = []
        elif tag in ("td", "th") and self._row is not None:
            self._cell = []

    def handle_endtag(self, tag):
        if tag in ("td", "th") and self._cell is not None:
            self._row.append(" ".join("".join(self._cell).split()))
            self._cell = None
        elif tag == "tr" and self._row is not None:
            self.rows.append(self._row)
            self._row = None

    def handle_data(self, data):
        if self._cell is not None:
            self._cell.append(data)


def _number(text):
    text = text.replace(",", "").replace("*", "").strip()
    return float(text)


def parse_uspto_counts(html, column="utility"):
    """Extract annual grant counts from the USPTO calendar-year counts table.

    ``column`` is either an integer cell index or a case-insensitive
    substring matched against header cells; the first matching header
    wins. Rows whose first cell is not a 4-digit year are skipped.
    """
    if isinstance(html, bytes):
        html = html.decode("utf-8", errors="replace")
    parser = _TableRows()
    parser.feed(html)
    rows = parser.rows
    if isinstance(column, int):
        col = column
    else:
        col = None
        for row in rows:
            if row and not row[0].strip().isdigit():
                hits = [i for i, c in enumerate(row) if column.lower() in c.lower()]
                if hits:
                    col = hits[0]
                    break
        if col is None:
            raise ParseError(f"no header cell matching {column!r}")
    years, values = [], []
    for row in rows:
        if not row or not (len(row[0]) == 4 and row[0].isdigit()) or len(row) <= col:
            continue
        try:
            v = _number(row[col])
        except ValueError:
            continue
        years.append(int(row[0]))
        values.append(v)
    if not years:
        raise ParseError("no year rows found in table")
    return AnnualSeries(np.array(years), np.array(values), PATENT_COUNT)

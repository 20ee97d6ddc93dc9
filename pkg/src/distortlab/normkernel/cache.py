"""Memo of norm values keyed by exact CanonKey, optionally backed by a file.

File layout (UTF-8 text): a header line ``sdcache-1 <function id> <sha256 of
body>`` followed by one JSON line per entry, ``[["p/q", ...], value, cert]``.
A file whose header, checksum or entries do not parse is ignored with a
warning; it never produces a value.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
import threading
import warnings
from fractions import Fraction
from pathlib import Path

from ..vectorspace import ScalingFunction, format_fraction
from .certs import cert_from_json, cert_to_json

CACHE_FORMAT = "sdcache-1"
CACHE_FILE = "norms.sdcache"


def function_id(f: ScalingFunction) -> str:
    """Stable identifier of a scaling function, or None if it has none."""
    if f.kind == "default-log":
        return "log2p1"
    if f.kind == "tabulated" and f.table is not None:
        body = ";".join(f"{format_fraction(x)}:{format_fraction(y)}" for x, y in f.table)
        return "table-" + hashlib.sha256(body.encode()).hexdigest()[:16]
    return None


class MemoCache:
    """Thread-safe map CanonKey -> (value, cert) for one scaling function at a time.

    Reads take no lock; inserts replace the entry atomically under a lock. Two
    threads inserting the same key write the same value, so the last writer wins
    harmlessly.
    """

    def __init__(self, path: str | os.PathLike | None = None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._data: dict = {}
        self.hits = 0
        self.misses = 0

    def _bucket(self, f):
        fid = function_id(f)
        key = fid if fid is not None else ("id", id(f))
        bucket = self._data.get(key)
        if bucket is None:
            with self._lock:
                bucket = self._data.setdefault(key, {})
            if fid is not None and self.path is not None and self.path.exists():
                self._load_into(bucket, fid)
        return bucket

    def get(self, key: tuple, f: ScalingFunction):
        hit = self._bucket(f).get(tuple(Fraction(v) for v in key))
        if hit is None:
            self.misses += 1
        else:
            self.hits += 1
        return hit

    def put(self, key: tuple, value: float, cert, f: ScalingFunction):
        bucket = self._bucket(f)
        with self._lock:
            bucket[tuple(Fraction(v) for v in key)] = (value, cert)

    def __len__(self):
        return sum(len(b) for b in self._data.values())

    def clear(self):
        with self._lock:
            self._data.clear()
        if self.path is not None and self.path.exists():
            self.path.unlink()

    # persistence ------------------------------------------------------------

    def _load_into(self, bucket, fid):
        try:
            entries = read_cache_file(self.path)
        except ValueError as exc:
            warnings.warn(f"ignoring cache file {self.path}: {exc}", stacklevel=3)
            return
        if entries["function"] != fid:
            return
        with self._lock:
            for key, (value, cert) in entries["entries"].items():
                bucket.setdefault(key, (value, cert))

    def save(self, f: ScalingFunction):
        """Write the entries for ``f`` to the backing file (atomic replace)."""
        if self.path is None:
            raise ValueError("cache has no backing file")
        fid = function_id(f)
        if fid is None:
            raise ValueError("scaling function has no stable id; its values cannot be persisted")
        bucket = self._bucket(f)
        lines = []
        for key in sorted(bucket, key=lambda k: (len(k), k)):
            value, cert = bucket[key]
            lines.append(json.dumps([[format_fraction(v) for v in key], repr(float(value)),
                                     cert_to_json(cert)], separators=(",", ":")))
        body = "\n".join(lines) + "\n"
        digest = hashlib.sha256(body.encode()).hexdigest()
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=self.path.parent, prefix=".sdcache-")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(f"{CACHE_FORMAT} {fid} {digest}\n")
            fh.write(body)
        os.replace(tmp, self.path)


def read_cache_file(path) -> dict:
    """Parse a cache file; raises ValueError on any corruption."""
    text = Path(path).read_text(encoding="utf-8")
    head, _, body = text.partition("\n")
    parts = head.split()
    if len(parts) != 3 or parts[0] != CACHE_FORMAT:
        raise ValueError(f"bad header {head!r}")
    _, fid, digest = parts
    if hashlib.sha256(body.encode()).hexdigest() != digest:
        raise ValueError("checksum mismatch")
    entries = {}
    for n, line in enumerate(body.splitlines(), start=2):
        if not line:
            continue
        try:
            raw_key, value, cert = json.loads(line)
            key = tuple(Fraction(v) for v in raw_key)
            entries[key] = (float(value), cert_from_json(cert))
        except (ValueError, TypeError, ZeroDivisionError) as exc:
            raise ValueError(f"line {n}: {exc}") from None
    return {"format": parts[0], "function": fid, "entries": entries}

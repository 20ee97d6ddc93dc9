"""JSON and CSV serialization of experiment results (schema "report-1")."""

from __future__ import annotations

import csv
import io
import json
import math

REPORT_SCHEMA = "report-1"


def _clean(obj):
    if isinstance(obj, float):
        if math.isnan(obj) or math.isinf(obj):
            return repr(obj)
        return obj
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "as_dict"):
        return _clean(obj.as_dict())
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


def json_report(kind: str, payload, *, tol: float | None = None) -> str:
    """Deterministic JSON document: the payload's fields next to ``schema`` and
    ``kind``, sorted keys, full float precision."""
    doc = _clean(payload)
    if not isinstance(doc, dict):
        doc = {"result": doc}
    doc.update(schema=REPORT_SCHEMA, kind=kind)
    if tol is not None:
        doc["tol"] = tol
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def csv_report(kind: str, header, rows) -> str:
    """CSV with a leading ``# report-1 <kind>`` comment line and a fixed header."""
    buf = io.StringIO()
    buf.write(f"# {REPORT_SCHEMA} {kind}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()

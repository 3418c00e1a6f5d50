"""Deterministic text, JSON and CSV serialisation of module reports."""

from __future__ import annotations

import csv
import io
import json
from datetime import datetime, timezone

from .bounds import BOUNDS_COLUMNS
from .core import CriterionReport, PIntegerVerdict
from .proofs import ProofReport
from .scan import ScanReport

REPORT_SCHEMA = "pomverify.report/1"


def _dump(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _stamp(timestamp):
    if timestamp is True:
        return datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    return timestamp or None


def verdict_dict(v):
    return {"k": v.k, "is_p_integer": v.is_p,
            "collision": list(v.collision) if v.collision else None,
            "checked_primes": v.checked_primes}


def _as_dict(report):
    if isinstance(report, PIntegerVerdict):
        return verdict_dict(report)
    if isinstance(report, (CriterionReport, ProofReport, ScanReport)):
        return report.to_dict()
    if isinstance(report, dict):
        return report
    raise TypeError(f"no serialiser for {type(report).__name__}")


def _proof_text(r):
    lines = [f"{r.theorem} at {r.target or '-'}  profile={r.profile}  precision={r.precision} bits"]
    for flag in r.flags:
        lines.append(f"  ! {flag}")
    for c in r.conditions:
        tag = "CERTIFIED" if c.certified else "UNCERTIFIED"
        enc = f"  [{c.enclosure.lower_str(12)}, {c.enclosure.upper_str(12)}]" if c.enclosure else ""
        lines.append(f"[{tag}] {c.name}: {c.description}{enc}")
    lines.append(f"overall: {'CERTIFIED' if r.overall else 'NOT CERTIFIED'}")
    return "\n".join(lines)


def _scan_text(r):
    lines = [
        f"scan [{r.range_lo}, {r.range_hi}]  status={r.status}  window={r.window}"
        + ("" if r.certified else "  (non-certifying window)"),
        f"even k: {r.even_witnesses}/{r.even_checked} witnessed",
        f"odd k:  {r.odd_witnesses}/{r.odd_checked} witnessed",
        f"sampled witnesses re-verified: {r.sampled}, failures: {len(r.sample_failures)}",
        f"digest: {r.digest:016x}",
    ]
    lines += [f"FAILED k={f['k']} ({f['reason']})" for f in r.failed]
    return "\n".join(lines)


def _text(report):
    if isinstance(report, ProofReport):
        return _proof_text(report)
    if isinstance(report, ScanReport):
        return _scan_text(report)
    if isinstance(report, PIntegerVerdict):
        s = f"k={report.k}: P-integer {str(report.is_p).lower()}"
        if report.collision:
            p, q = report.collision
            s += f" (primes {p} and {q} share a residue mod {report.k})"
        return s
    return "\n".join(f"{k}: {v}" for k, v in _as_dict(report).items())


def emit(report, fmt="text", timestamp=None):
    """Serialise one report.  ``timestamp=True`` adds the current UTC time to JSON."""
    if fmt == "text":
        return _text(report) + "\n"
    if fmt == "json":
        d = dict(_as_dict(report))
        d.setdefault("schema", REPORT_SCHEMA)
        ts = _stamp(timestamp)
        if ts:
            d["generated_at"] = ts
        return _dump(d) + "\n"
    if fmt == "csv":
        rows = report if isinstance(report, list) else [_as_dict(report)]
        return rows_csv(rows)
    raise ValueError(f"unknown format {fmt!r}")


def json_lines(reports):
    return "".join(_dump(_as_dict(r)) + "\n" for r in reports)


def rows_csv(rows, columns=None):
    columns = columns or (BOUNDS_COLUMNS if rows and set(rows[0]) == set(BOUNDS_COLUMNS)
                          else list(rows[0]) if rows else [])
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()

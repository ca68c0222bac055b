"""Experiment rows and their CSV / JSON serialization.

Output is deterministic: fixed column order, fixed float formatting, and a
comment header carrying the resolved configuration and its SHA-256.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

__all__ = ["ExperimentRow", "GM_COLUMNS", "ELL_COLUMNS", "format_value",
           "config_hash", "write_rows", "render_csv", "render_json"]

GM_COLUMNS = ["n", "u", "h_u", "h_D", "h_deg1", "h_deg_gt1", "norm_I", "norm_J", "c_u", "flag_eps", "skip"]
ELL_COLUMNS = GM_COLUMNS + ["m_witness", "nu_witness", "exceptional", "half_exp"]


@dataclass
class ExperimentRow:
    """One family member's measurements."""

    n: int
    u: str
    h_u: Optional[object] = None
    h_D: Optional[object] = None
    h_deg1: Optional[object] = None
    h_deg_gt1: Optional[object] = None
    norm_I: Optional[object] = None
    norm_J: Optional[object] = None
    c_u: Optional[object] = None
    flag_eps: Optional[bool] = None
    skip: str = ""
    m_witness: Optional[int] = None
    nu_witness: Optional[str] = None
    exceptional: Optional[bool] = None
    half_exp: Optional[bool] = None
    report: object = None  # the HeightReport, not serialized

    def as_dict(self, columns=GM_COLUMNS):
        return {c: getattr(self, c) for c in columns}


def format_value(x):
    """Canonical text for one cell."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, Fraction):
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    if isinstance(x, str):
        return x
    return format(float(x), ".15g")


def _json_value(x):
    if x is None or isinstance(x, (bool, int, str)):
        return x
    if isinstance(x, Fraction):
        return format_value(x)
    return float(format(float(x), ".15g"))


def config_hash(config):
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()


def _meta(config, precision, tol, banner=None):
    meta = {
        "config": config,
        "config_sha256": config_hash(config),
        "precision": precision,
        "tolerance": tol,
    }
    if banner:
        meta["banner"] = banner
    return meta


def render_csv(rows, columns, config, precision, tol, banner=None):
    from . import __version__

    buf = io.StringIO()
    meta = _meta(config, precision, tol, banner)
    buf.write(f"# degone {__version__}\n")
    buf.write(f"# config: {json.dumps(config, sort_keys=True, default=str)}\n")
    buf.write(f"# config_sha256: {meta['config_sha256']}\n")
    buf.write(f"# precision: {precision}\n")
    buf.write(f"# tolerance: {tol}\n")
    for line in (banner or "").splitlines():
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([format_value(getattr(r, c)) for c in columns])
    return buf.getvalue()


def render_json(rows, columns, config, precision, tol, banner=None):
    from . import __version__

    doc = {"version": __version__, **_meta(config, precision, tol, banner), "columns": columns,
           "rows": [{c: _json_value(getattr(r, c)) for c in columns} for r in rows]}
    return json.dumps(doc, indent=2, sort_keys=False, default=str) + "\n"


def write_rows(path, rows, columns, config, precision, tol, fmt="csv", banner=None):
    render = render_json if fmt == "json" else render_csv
    text = render(rows, columns, config, precision, tol, banner)
    if path in (None, "-"):
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text

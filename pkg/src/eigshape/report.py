"""Report assembly and serialization (JSON / CSV / text).

Intervals are serialized as {"lo": ..., "hi": ...} decimal strings using the
shortest round-trip representation, so a report parses back to exactly the
computed binary endpoints (which are already outward-rounded).  Reports are
deterministic: identical configuration yields byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json

from .bounds import EigenBounds
from .derivative import DerivativeEnclosure
from .intervals import Interval, IntervalSymMatrix

SCHEMA = "eigshape-report/1"

BASE_ASSUMPTIONS = [
    "projection constants 0.493h (P1) and 0.1893h (Crouzeix-Raviart), stated "
    "for uniform meshes, applied to the uniform mesh of the given triangle",
    "discrete eigenproblems solved in floating point; eigenvalues inflated "
    "by kappa = 10 * residual / gap; assembled matrix entries and "
    "eigenvectors carry unquantified roundoff at relative level ~1e-13",
    "shape parameters r, theta interpreted as exact binary floating-point "
    "values",
]


def interval_json(x: Interval) -> dict:
    return {"lo": repr(x.lo), "hi": repr(x.hi)}


def sym_matrix_json(m) -> dict:
    if isinstance(m, Interval):
        return {"size": 1, "a11": interval_json(m)}
    return {
        "size": 2,
        "a11": interval_json(m.a11),
        "a12": interval_json(m.a12),
        "a22": interval_json(m.a22),
    }


def bounds_json(b: EigenBounds) -> list[dict]:
    return [
        {"k": k + 1, "lo": repr(b.lower[k]), "hi": repr(b.upper[k])}
        for k in range(b.k_max)
    ]


def subspace_json(s) -> dict:
    out = {}
    for name in (
        "delta_b",
        "bar_delta_b",
        "bar_delta_a",
        "err_star_a",
        "err_star_b",
        "tau",
        "tau_h",
        "xi",
        "beta_amp",
    ):
        val = getattr(s, name)
        if val is not None:
            out[name] = interval_json(val)
    return out


def enclosure_json(enc: DerivativeEnclosure) -> dict:
    return {
        "direction": enc.direction.name.lower(),
        "eps": repr(enc.eps),
        "cluster": [enc.cluster.n, enc.cluster.last],
        "gauge": enc.gauge,
        "assume_multiple": enc.assume_multiple,
        "m_hat": sym_matrix_json(enc.matrix.m_hat),
        "err_m": interval_json(enc.matrix.err_m),
        "err_n": interval_json(enc.matrix.err_n),
        "eta": interval_json(enc.matrix.eta),
        "rotation_radius": (
            interval_json(enc.matrix.rotation_radius)
            if enc.matrix.rotation_radius is not None
            else None
        ),
        "mu_hat": [repr(m) for m in enc.mu_hat],
        "quotient_ranges": [
            {"index": enc.cluster.n + i, **interval_json(r)}
            for i, r in enumerate(enc.quotient_ranges)
        ],
        "certified_separated": enc.separated,
        "linear_independence_verified": enc.linear_independent,
        "subspace": subspace_json(enc.subspace),
    }


def build_report(config: dict, body: dict, assumptions_extra: list[str] = ()) -> dict:
    return {
        "schema": SCHEMA,
        "interval_convention": "endpoints are outward-rounded decimal strings",
        "config": config,
        **body,
        "assumptions": BASE_ASSUMPTIONS + list(assumptions_extra),
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def _flatten(prefix: str, obj, rows: list):
    if isinstance(obj, dict):
        for key, val in obj.items():
            _flatten(f"{prefix}.{key}" if prefix else str(key), val, rows)
    elif isinstance(obj, (list, tuple)):
        for i, val in enumerate(obj):
            _flatten(f"{prefix}[{i}]", val, rows)
    else:
        rows.append((prefix, "" if obj is None else obj))


def to_csv(report: dict) -> str:
    rows: list = []
    _flatten("", report, rows)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["key", "value"])
    writer.writerows(rows)
    return buf.getvalue()


def to_text(report: dict) -> str:
    rows: list = []
    _flatten("", report, rows)
    width = max(len(k) for k, _ in rows)
    lines = [f"{k.ljust(width)}  {v}" for k, v in rows]
    return "\n".join(lines) + "\n"


def render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown output format {fmt!r}")

"""Structured records of verification runs and their CSV serialization."""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field

CSV_HEADER = ("suite", "check_id", "value", "reference", "provenance",
              "tolerance", "pass", "quad_err")
PROVENANCES = ("STATED", "DERIVED", "TRIVIAL")


def fmt_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


@dataclass(frozen=True)
class CheckRow:
    """One verified quantity.

    `relation` says how `value` is compared with `reference`:
    ``"abs"`` (|v - r| <= tol), ``"rel"`` (|v - r| <= tol * |r|),
    ``"ge"`` (v >= r - tol) or ``"le"`` (v <= r + tol).
    """

    check_id: str
    value: float
    reference: float
    provenance: str
    tolerance: float
    relation: str = "abs"
    quad_err: float = 0.0

    @property
    def passed(self):
        v, r, t = float(self.value), float(self.reference), float(self.tolerance)
        if math.isnan(v):
            return False
        if self.relation == "abs":
            return abs(v - r) <= t
        if self.relation == "rel":
            return abs(v - r) <= t * abs(r)
        if self.relation == "ge":
            return v >= r - t
        if self.relation == "le":
            return v <= r + t
        raise ValueError(f"unknown relation {self.relation!r}")

    @classmethod
    def close(cls, check_id, value, reference, tol, provenance="DERIVED", rel=False, quad_err=0.0):
        return cls(check_id, float(value), float(reference), provenance, float(tol),
                   "rel" if rel else "abs", float(quad_err))

    @classmethod
    def at_least(cls, check_id, value, bound, tol, provenance="STATED", quad_err=0.0):
        return cls(check_id, float(value), float(bound), provenance, float(tol), "ge", float(quad_err))

    @classmethod
    def at_most(cls, check_id, value, bound, tol, provenance="DERIVED", quad_err=0.0):
        return cls(check_id, float(value), float(bound), provenance, float(tol), "le", float(quad_err))

    def csv_fields(self, suite):
        return (suite, self.check_id, fmt_float(self.value), fmt_float(self.reference),
                self.provenance, fmt_float(self.tolerance),
                "true" if self.passed else "false", fmt_float(self.quad_err))


@dataclass
class ExperimentReport:
    suite: str
    rows: list = field(default_factory=list)
    wall_time: float = 0.0
    config_hash: str = ""
    notes: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def add(self, row):
        self.rows.append(row)
        return row

    def extend(self, rows):
        self.rows.extend(rows)

    def row(self, check_id):
        for r in self.rows:
            if r.check_id == check_id:
                return r
        raise KeyError(check_id)

    def failures(self):
        return [r for r in self.rows if not r.passed]

    def summary_lines(self):
        lines = []
        for r in self.rows:
            mark = "PASS" if r.passed else "FAIL"
            lines.append(f"[{mark}] {self.suite}:{r.check_id} value={r.value:.10g} "
                         f"ref={r.reference:.10g} ({r.relation} tol={r.tolerance:g})")
        return lines

    def csv_text(self, header=True):
        buf = io.StringIO()
        write_csv(buf, [self], header=header)
        return buf.getvalue()


def write_csv(stream, reports, header=True):
    writer = csv.writer(stream, lineterminator="\n")
    if header:
        writer.writerow(CSV_HEADER)
    for rep in reports:
        for r in rep.rows:
            writer.writerow(r.csv_fields(rep.suite))


def config_hash(config):
    """Stable SHA-256 of a JSON-serializable configuration mapping."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:16]

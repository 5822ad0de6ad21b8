"""Check rows, verification reports, run records, and their serialization.

A check row is one measured quantity against one limit; the run passes when
every row passes. Output files are deterministic for a fixed configuration:
volatile data (wall time) is reported on the console only.
"""

import csv
import json
from dataclasses import dataclass, field

__all__ = ["CheckRow", "VerificationReport", "RunRecord",
           "write_csv", "write_report_json", "format_float"]


def format_float(x):
    """17-significant-digit decimal text; round-trips IEEE doubles exactly."""
    return format(float(x), ".17g")


@dataclass
class CheckRow:
    """One verified quantity: passes when measured <= limit."""

    name: str
    tag: str
    measured: float
    limit: float
    detail: str = ""

    @property
    def passed(self):
        return bool(self.measured <= self.limit)

    def as_dict(self):
        return {
            "name": self.name,
            "tag": self.tag,
            "measured": self.measured,
            "limit": self.limit,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class VerificationReport:
    """A bundle of check rows."""

    rows: list = field(default_factory=list)

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    def extend(self, other):
        self.rows.extend(other.rows)
        return self

    def add(self, *args, **kwargs):
        self.rows.append(CheckRow(*args, **kwargs))
        return self.rows[-1]


@dataclass
class RunRecord:
    """Outcome of one scenario run.

    ``wall_time`` is kept for console reporting but excluded from the files
    so identical configurations produce byte-identical outputs.
    """

    scenario: str
    rows: list
    config_hash: str
    rng_algorithm: str
    kernel_backend: str
    wall_time: float = 0.0
    series: list = field(default_factory=list)
    series_columns: tuple = ()

    @property
    def passed(self):
        return all(row.passed for row in self.rows)

    def as_dict(self):
        return {
            "scenario": self.scenario,
            "config_hash": self.config_hash,
            "rng_algorithm": self.rng_algorithm,
            "kernel_backend": self.kernel_backend,
            "passed": self.passed,
            "checks": [row.as_dict() for row in self.rows],
        }


def write_csv(path, record):
    """results.csv: the time series for 'evolve', check rows otherwise."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        if record.series:
            writer.writerow(record.series_columns)
            for row in record.series:
                writer.writerow([cell if isinstance(cell, str) else format_float(cell)
                                 for cell in row])
        else:
            writer.writerow(["name", "tag", "measured", "limit", "passed"])
            for row in record.rows:
                writer.writerow([row.name, row.tag, format_float(row.measured),
                                 format_float(row.limit), str(row.passed).lower()])


def write_report_json(path, record):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(record.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

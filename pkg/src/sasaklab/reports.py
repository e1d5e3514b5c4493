"""Machine-readable run reports: one JSON document and one CSV per run.

Reports are deterministic functions of (config, seed): keys are sorted,
floats are serialized by repr (shortest round-trip), and CSV rows are
written in sample order regardless of worker count.
"""

import csv
import io
import json
import os
from dataclasses import dataclass

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3
EXIT_HYPOTHESIS = 4
EXIT_RESIDUAL = 5
EXIT_NUMERICAL = 6


@dataclass
class ResidualStat:
    """Summary of one named residual against its tolerance."""

    name: str
    tol: float
    count: int = 0
    max: float = 0.0
    total: float = 0.0

    def add(self, value):
        value = abs(float(value))
        self.count += 1
        self.max = max(self.max, value)
        self.total += value

    @property
    def mean(self):
        return self.total / self.count if self.count else 0.0

    @property
    def ok(self):
        return self.max <= self.tol

    def as_dict(self):
        return {
            "name": self.name,
            "count": self.count,
            "max": self.max,
            "mean": self.mean,
            "tolerance": self.tol,
            "within_tolerance": self.ok,
        }


class ResidualLedger:
    """Ordered collection of ResidualStats addressed by name."""

    def __init__(self):
        self._stats = {}

    def stat(self, name, tol):
        if name not in self._stats:
            self._stats[name] = ResidualStat(name, tol)
        return self._stats[name]

    def add(self, name, tol, value):
        self.stat(name, tol).add(value)

    def all_ok(self):
        return all(s.ok for s in self._stats.values())

    def as_list(self):
        return [self._stats[k].as_dict() for k in sorted(self._stats)]

    def worst(self):
        bad = [s for s in self._stats.values() if not s.ok]
        return sorted(bad, key=lambda s: s.name)


def build_report(command, config, *, hypotheses=None, dimensions=None,
                 ledger=None, census=None, notes=None, extra=None,
                 samples_csv="samples.csv", exit_status=EXIT_OK):
    from .jets import BACKEND

    report = {
        "command": command,
        "config": config.echo(),
        "jet_backend": BACKEND,
        "hypotheses": hypotheses or {},
        "dimensions": dimensions or {},
        "residuals": ledger.as_list() if ledger is not None else [],
        "census": census or {},
        "notes": list(notes or []),
        "samples_csv": samples_csv,
        "exit_status": exit_status,
    }
    if extra:
        report.update(extra)
    return report


def report_bytes(report):
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode()


def csv_bytes(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue().encode()


def write_outputs(outdir, report, header, rows):
    os.makedirs(outdir, exist_ok=True)
    with open(os.path.join(outdir, "report.json"), "wb") as fh:
        fh.write(report_bytes(report))
    with open(os.path.join(outdir, "samples.csv"), "wb") as fh:
        fh.write(csv_bytes(header, rows))

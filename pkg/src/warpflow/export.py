"""CSV/text exports of analysis results.  All floats are written with ``repr``."""

import csv
from pathlib import Path

from .analysis import RegionResult
from .errors import IngestError, MissingColumn

RESULTS_COLUMNS = ("region_id", "dtw_distance", "n", "lag_days", "skipped_reason")
CLASSIFIED_COLUMNS = ("region_id", "dtw_distance", "z_score", "class_label")
LAG_SWEEP_COLUMNS = ("region_id", "lag_days", "dtw_distance")
LAG_BEST_COLUMNS = ("region_id", "best_lag", "dtw_distance")
FILTER_COLUMNS = ("stage", "region_id", "reason")
MOBILITY_COLUMNS = ("region_id", "date", "mobility")


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write(path, header, rows):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_results(path, results, filtered_ids=()):
    """Scored and skipped regions, plus ``filtered`` rows, sorted by region id."""
    rows = [(r.region_id, r.dtw_distance, r.n, r.lag_days, r.skipped_reason) for r in results]
    rows += [(rid, None, None, None, "filtered") for rid in filtered_ids]
    rows.sort(key=lambda row: row[0])
    _write(path, RESULTS_COLUMNS, rows)


def read_results(path):
    out = []
    with Path(path).open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RESULTS_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise MissingColumn(f"missing column(s) {', '.join(missing)}", path, 1)
        for row in reader:
            try:
                d = float(row["dtw_distance"]) if row["dtw_distance"] else None
                n = int(row["n"]) if row["n"] else None
                lag = int(row["lag_days"]) if row["lag_days"] else None
                out.append(
                    RegionResult(row["region_id"], d, n, lag, row["skipped_reason"] or None)
                )
            except ValueError as exc:
                raise IngestError(str(exc), path, reader.line_num) from None
    return out


def write_classified(path, classified):
    _write(
        path,
        CLASSIFIED_COLUMNS,
        sorted((c.region_id, c.dtw_distance, c.z_score, c.class_label) for c in classified),
    )


def write_lag_sweep(path, sweeps):
    rows = [
        (s.region_id, lag, d)
        for s in sorted(sweeps, key=lambda s: s.region_id)
        for lag, d in sorted(s.distances.items())
    ]
    _write(path, LAG_SWEEP_COLUMNS, rows)


def write_lag_best(path, sweeps):
    _write(
        path,
        LAG_BEST_COLUMNS,
        [(s.region_id, s.best_lag, s.best_distance) for s in sorted(sweeps, key=lambda s: s.region_id)],
    )


def write_filter_report(path, report):
    _write(path, FILTER_COLUMNS, report.rows)


def write_mobility(path, mobility):
    rows = []
    for rid in sorted(mobility):
        s = mobility[rid]
        rows.extend((rid, d.isoformat(), float(v)) for d, v in zip(s.dates, s.values))
    _write(path, MOBILITY_COLUMNS, rows)


def write_diagnostics(path, report=None, reason=None):
    lines = report.lines() if report is not None else [f"unavailable={reason}"]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

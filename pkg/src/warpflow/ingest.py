"""Reading and writing the three input tables.

Schemas (exact headers, UTF-8, comma separated)::

    regions.csv  region_id,name,population,land_area_sqmi,is_metro
    flows.csv    date,origin,destination,devices_od,devices_origin_total
    cases.csv    date,region_id,new_cases

Extra columns are ignored with a warning.  Dates are ISO ``YYYY-MM-DD``.
"""

import csv
import logging
from dataclasses import dataclass
from datetime import date
from pathlib import Path
from typing import Dict, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    BadDate,
    DevicesExceedTotal,
    DuplicateDate,
    DuplicateRegion,
    IngestError,
    InvalidValue,
    MissingColumn,
    MissingDates,
    NegativeCases,
    NegativeCount,
    NonPositivePopulation,
    UnknownRegion,
)
from .series import DailySeries, date_grid

logger = logging.getLogger(__name__)

REGION_COLUMNS = ("region_id", "name", "population", "land_area_sqmi", "is_metro")
FLOW_COLUMNS = ("date", "origin", "destination", "devices_od", "devices_origin_total")
CASE_COLUMNS = ("date", "region_id", "new_cases")

FILL_POLICIES = (None, "zero", "previous")

_TRUE = {"true", "1", "yes", "y", "t"}
_FALSE = {"false", "0", "no", "n", "f"}


@dataclass(frozen=True)
class RegionMeta:
    region_id: str
    name: str
    population: int
    land_area: float
    is_metro: bool

    @property
    def density(self):
        """Persons per square mile."""
        return self.population / self.land_area


@dataclass(frozen=True, order=True)
class FlowRecord:
    date: date
    origin: str
    destination: str
    devices_od: int
    devices_o: int


@dataclass(frozen=True)
class CaseRecord:
    date: date
    region_id: str
    new_cases: float


@dataclass(frozen=True)
class Dataset:
    regions: Mapping[str, RegionMeta]
    flows: Tuple[FlowRecord, ...]
    cases: Mapping[str, DailySeries]
    date_range: Tuple[date, date]

    @property
    def n_days(self):
        return (self.date_range[1] - self.date_range[0]).days + 1


# -- field parsers ----------------------------------------------------------


def parse_date(text, path=None, row=None):
    try:
        if len(text) != 10:
            raise ValueError
        return date.fromisoformat(text)
    except (TypeError, ValueError):
        raise BadDate(f"expected a YYYY-MM-DD date, got {text!r}", path, row) from None


def _int(text, column, path, row):
    try:
        return int(text)
    except (TypeError, ValueError):
        raise InvalidValue(f"{column} must be an integer, got {text!r}", path, row) from None


def _float(text, column, path, row):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise InvalidValue(f"{column} must be a number, got {text!r}", path, row) from None
    if not np.isfinite(value):
        raise InvalidValue(f"{column} must be finite, got {text!r}", path, row)
    return value


def _bool(text, column, path, row):
    key = (text or "").strip().lower()
    if key in _TRUE:
        return True
    if key in _FALSE:
        return False
    raise InvalidValue(f"{column} must be true/false, got {text!r}", path, row)


def _reader(path, required):
    """Yield ``(line_number, row_dict)`` after checking the header."""
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise MissingColumn(
                f"missing column(s) {', '.join(missing)}; expected header "
                f"{','.join(required)}",
                path,
                1,
            )
        extra = [c for c in header if c not in required]
        if extra:
            logger.warning("%s: ignoring extra column(s) %s", path, ", ".join(extra))
        for row in reader:
            if None in row or any(row[c] is None for c in required):
                raise IngestError("wrong number of fields", path, reader.line_num)
            yield reader.line_num, row


# -- tables -----------------------------------------------------------------


def parse_regions(path) -> Dict[str, RegionMeta]:
    """Parse ``regions.csv`` into a mapping keyed by region id."""
    regions = {}
    for line, row in _reader(path, REGION_COLUMNS):
        rid = row["region_id"].strip()
        if not rid:
            raise InvalidValue("empty region_id", path, line)
        if rid in regions:
            raise DuplicateRegion(f"region_id {rid!r} appears more than once", path, line)
        population = _int(row["population"], "population", path, line)
        if population < 1:
            raise NonPositivePopulation(
                f"region {rid!r} has population {population}", path, line
            )
        land_area = _float(row["land_area_sqmi"], "land_area_sqmi", path, line)
        if land_area <= 0:
            raise InvalidValue(f"region {rid!r} has land area {land_area}", path, line)
        regions[rid] = RegionMeta(
            region_id=rid,
            name=row["name"],
            population=population,
            land_area=land_area,
            is_metro=_bool(row["is_metro"], "is_metro", path, line),
        )
    return dict(sorted(regions.items()))


def parse_flows(path, regions) -> Tuple[FlowRecord, ...]:
    """Parse ``flows.csv``; records come back in canonical sorted order."""
    flows = []
    for line, row in _reader(path, FLOW_COLUMNS):
        day = parse_date(row["date"], path, line)
        origin = row["origin"].strip()
        dest = row["destination"].strip()
        for rid in (origin, dest):
            if rid not in regions:
                raise UnknownRegion(f"region {rid!r} is not in the region table", path, line)
        devices_od = _int(row["devices_od"], "devices_od", path, line)
        devices_o = _int(row["devices_origin_total"], "devices_origin_total", path, line)
        if devices_od < 0 or devices_o < 0:
            raise NegativeCount("device counts must be non-negative", path, line)
        if devices_o == 0:
            raise InvalidValue("devices_origin_total must be positive", path, line)
        if devices_od > devices_o:
            raise DevicesExceedTotal(
                f"devices_od {devices_od} exceeds devices_origin_total {devices_o}",
                path,
                line,
            )
        flows.append(FlowRecord(day, origin, dest, devices_od, devices_o))
    flows.sort()
    return tuple(flows)


def _read_case_rows(path, regions):
    rows: Dict[str, Dict[date, float]] = {}
    for line, row in _reader(path, CASE_COLUMNS):
        day = parse_date(row["date"], path, line)
        rid = row["region_id"].strip()
        if rid not in regions:
            raise UnknownRegion(f"region {rid!r} is not in the region table", path, line)
        value = _float(row["new_cases"], "new_cases", path, line)
        if value < 0:
            raise NegativeCases(f"new_cases {value} is negative", path, line)
        per_region = rows.setdefault(rid, {})
        if day in per_region:
            raise DuplicateDate(f"region {rid!r} has two rows for {day}", path, line)
        per_region[day] = value
    return rows


def _assemble(rid, observed, grid, fill_missing, path):
    values = []
    missing = []
    last = None
    for day in grid:
        if day in observed:
            last = observed[day]
            values.append(last)
        else:
            missing.append(day)
            values.append(None)
    if missing:
        if fill_missing is None:
            shown = ", ".join(d.isoformat() for d in missing[:10])
            more = f" (+{len(missing) - 10} more)" if len(missing) > 10 else ""
            raise MissingDates(
                f"region {rid!r} is missing {len(missing)} date(s): {shown}{more}",
                path,
                dates=missing,
            )
        if fill_missing == "zero":
            values = [0.0 if v is None else v for v in values]
        else:
            present = [v for v in values if v is not None]
            if not present:
                raise MissingDates(
                    f"region {rid!r} has no case rows to carry forward", path, dates=missing
                )
            # leading gaps take the first observed value
            last = present[0]
            filled = []
            for v in values:
                if v is not None:
                    last = v
                filled.append(last)
            values = filled
        logger.info("region %s: filled %d missing date(s) with %s", rid, len(missing), fill_missing)
    return DailySeries(rid, grid[0], values)


def parse_cases(
    path,
    regions,
    date_range: Optional[Tuple[date, date]] = None,
    fill_missing: Optional[str] = None,
) -> Dict[str, DailySeries]:
    """Parse ``cases.csv`` into one contiguous series per region.

    Parameters
    ----------
    date_range : (start, end), optional
        Inclusive calendar window.  Rows outside it are dropped.  When omitted
        the window spans the earliest to the latest date in the file.
    fill_missing : {None, "zero", "previous"}
        ``None`` makes any gap a :class:`MissingDates` error.
    """
    return _parse_cases_with_range(path, regions, date_range, fill_missing)[0]


def _parse_cases_with_range(path, regions, date_range, fill_missing):
    if fill_missing not in FILL_POLICIES:
        raise ValueError(f"fill_missing must be one of {FILL_POLICIES}, got {fill_missing!r}")
    rows = _read_case_rows(path, regions)
    if date_range is None:
        all_days = [d for per in rows.values() for d in per]
        if not all_days:
            raise IngestError("no case rows; cannot infer the date range", path)
        date_range = (min(all_days), max(all_days))
    start, end = date_range
    if end < start:
        raise ValueError(f"date range end {end} precedes start {start}")
    grid = date_grid(start, end)
    dropped = 0
    for rid, per in rows.items():
        outside = [d for d in per if d < start or d > end]
        dropped += len(outside)
        for d in outside:
            del per[d]
    if dropped:
        logger.info("%s: dropped %d case row(s) outside %s..%s", path, dropped, start, end)
    series = {
        rid: _assemble(rid, rows.get(rid, {}), grid, fill_missing, path)
        for rid in sorted(regions)
    }
    return series, (start, end)


def load_dataset(
    regions_path,
    flows_path,
    cases_path,
    date_range: Optional[Tuple[date, date]] = None,
    fill_missing: Optional[str] = None,
) -> Dataset:
    """Parse all three tables into a :class:`Dataset`.

    Flow records outside the (possibly inferred) date range are dropped.
    """
    regions = parse_regions(regions_path)
    cases, date_range = _parse_cases_with_range(cases_path, regions, date_range, fill_missing)
    flows = parse_flows(flows_path, regions)
    start, end = date_range
    kept = tuple(f for f in flows if start <= f.date <= end)
    if len(kept) != len(flows):
        logger.info(
            "%s: dropped %d flow row(s) outside %s..%s",
            flows_path,
            len(flows) - len(kept),
            start,
            end,
        )
    return Dataset(regions=regions, flows=kept, cases=cases, date_range=date_range)


# -- writers ----------------------------------------------------------------


def format_float(value):
    """Shortest text that reads back to the same double."""
    return repr(float(value))


def write_regions(path, regions: Mapping[str, RegionMeta]):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REGION_COLUMNS)
        for rid in sorted(regions):
            r = regions[rid]
            w.writerow(
                [r.region_id, r.name, r.population, format_float(r.land_area),
                 "true" if r.is_metro else "false"]
            )


def write_flows(path, flows: Sequence[FlowRecord]):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(FLOW_COLUMNS)
        for f in sorted(flows):
            w.writerow([f.date.isoformat(), f.origin, f.destination, f.devices_od, f.devices_o])


def write_cases(path, cases: Mapping[str, DailySeries]):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CASE_COLUMNS)
        for rid in sorted(cases):
            s = cases[rid]
            for day, value in zip(s.dates, s.values):
                w.writerow([day.isoformat(), rid, format_float(value)])


def write_dataset(dataset: Dataset, out_dir):
    """Write ``regions.csv``, ``flows.csv`` and ``cases.csv`` into ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_regions(out_dir / "regions.csv", dataset.regions)
    write_flows(out_dir / "flows.csv", dataset.flows)
    write_cases(out_dir / "cases.csv", dataset.cases)
    return {
        "regions": out_dir / "regions.csv",
        "flows": out_dir / "flows.csv",
        "cases": out_dir / "cases.csv",
    }

"""Run configuration: defaults < config file < command-line flags.

The config file is flat ``key = value`` text (INI syntax, section header
optional).  Keys match the long command-line flags with dashes turned into
underscores, e.g. ``--band-radius`` <-> ``band_radius``.
"""

import configparser
import os
from dataclasses import dataclass, fields, replace
from datetime import date
from pathlib import Path
from typing import Optional, Union

from .errors import ConfigError, TypeMismatch, UnknownKey
from .ingest import FILL_POLICIES
from .preprocess import AnalysisConfig

SECTION = "warpflow"


@dataclass(frozen=True)
class RunConfig:
    regions: Optional[str] = None
    flows: Optional[str] = None
    cases: Optional[str] = None
    out: str = "warpflow-out"
    lag: int = 7
    window: int = 7
    metro_only: bool = True
    min_case_filter: Union[str, float] = "median"
    resmooth_cases: bool = False
    fill_missing: Optional[str] = None
    start_date: Optional[date] = None
    end_date: Optional[date] = None
    band_radius: Optional[int] = None
    workers: Optional[int] = None
    lag_min: int = 0
    lag_max: int = 30
    export_mobility: bool = False

    def __post_init__(self):
        if self.fill_missing not in FILL_POLICIES:
            raise ConfigError(f"fill_missing must be 'zero' or 'previous', got {self.fill_missing!r}")
        if self.lag < 0 or self.window < 1:
            raise ConfigError("lag must be >= 0 and window >= 1")
        if self.band_radius is not None and self.band_radius < 0:
            raise ConfigError("band_radius must be >= 0")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if (self.start_date is None) != (self.end_date is None):
            raise ConfigError("start_date and end_date must be given together")
        if self.start_date is not None and self.end_date < self.start_date:
            raise ConfigError("end_date precedes start_date")

    @property
    def date_range(self):
        if self.start_date is None:
            return None
        return (self.start_date, self.end_date)

    @property
    def effective_workers(self):
        return self.workers if self.workers is not None else (os.cpu_count() or 1)

    def analysis_config(self, date_range=None):
        return AnalysisConfig(
            lag_days=self.lag,
            smooth_window=self.window,
            date_range=date_range or self.date_range,
            min_case_filter=self.min_case_filter,
            metro_only=self.metro_only,
            resmooth_cases=self.resmooth_cases,
        )

    def to_text(self):
        """Effective configuration in config-file syntax (loadable by :func:`load_config`)."""
        lines = [f"[{SECTION}]"]
        for f in fields(self):
            value = getattr(self, f.name)
            if value is None:
                continue
            if isinstance(value, bool):
                text = "true" if value else "false"
            elif isinstance(value, date):
                text = value.isoformat()
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{f.name} = {text}")
        return "\n".join(lines) + "\n"


_FIELDS = {f.name: f for f in fields(RunConfig)}
_INT_KEYS = {"lag", "window", "band_radius", "workers", "lag_min", "lag_max"}
_BOOL_KEYS = {"metro_only", "resmooth_cases", "export_mobility"}
_DATE_KEYS = {"start_date", "end_date"}
_TRUE = {"true", "yes", "on", "1"}
_FALSE = {"false", "no", "off", "0"}


def coerce_value(key, value):
    """Convert a raw (string) config value to the field's type."""
    if key not in _FIELDS:
        raise UnknownKey(f"unknown configuration key {key!r}")
    if not isinstance(value, str):
        return value
    text = value.strip()
    try:
        if key in _INT_KEYS:
            if text.lower() in ("", "none"):
                return None
            return int(text)
        if key in _BOOL_KEYS:
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError
        if key in _DATE_KEYS:
            return date.fromisoformat(text)
        if key == "min_case_filter":
            return "median" if text == "median" else float(text)
        if key == "fill_missing":
            return None if text.lower() in ("", "none", "error") else text
    except ValueError:
        raise TypeMismatch(f"configuration key {key!r} has an invalid value {value!r}") from None
    return text


def read_config_file(path):
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror}") from None
    parser = configparser.ConfigParser(interpolation=None)
    try:
        body = [ln.strip() for ln in text.splitlines()]
        first = next((ln for ln in body if ln and ln[0] not in "#;"), "")
        if not first.startswith("["):
            text = f"[{SECTION}]\n" + text
        parser.read_string(text, source=str(path))
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None
    values = {}
    for section in parser.sections():
        for key, value in parser.items(section):
            values[key] = coerce_value(key, value)
    return values


def load_config(path=None, **overrides):
    """Build a :class:`RunConfig`.

    ``overrides`` are flag values; entries that are ``None`` count as "not
    given" and leave the file or default value in place.
    """
    values = {}
    if path is not None:
        values.update(read_config_file(path))
    for key, value in overrides.items():
        if value is not None:
            values[key] = coerce_value(key, value)
    try:
        return replace(RunConfig(), **values)
    except TypeError as exc:
        raise TypeMismatch(str(exc)) from None

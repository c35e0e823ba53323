"""Region selection, lag alignment and min-max scaling."""

from dataclasses import dataclass, field
from datetime import date
from typing import Dict, Optional, Tuple, Union

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive_int, check_series
from .errors import DegenerateSeries, EmptyAfterFilter, LagTooLarge
from .mobility import rolling_mean


@dataclass(frozen=True)
class AnalysisConfig:
    """Knobs of the per-region pipeline.

    ``min_case_filter`` is either ``"median"`` or a numeric threshold on a
    region's mean daily cases.  ``date_range=None`` means "whatever the case
    table covers".
    """

    lag_days: int = 7
    smooth_window: int = 7
    date_range: Optional[Tuple[date, date]] = None
    min_case_filter: Union[str, float] = "median"
    metro_only: bool = True
    resmooth_cases: bool = False

    def __post_init__(self):
        check_positive_int(self.lag_days, "lag_days", allow_zero=True)
        check_positive_int(self.smooth_window, "smooth_window")
        if isinstance(self.min_case_filter, str):
            if self.min_case_filter != "median":
                raise ValueError(
                    f"min_case_filter must be 'median' or a number, got {self.min_case_filter!r}"
                )
        elif not np.isfinite(float(self.min_case_filter)):
            raise ValueError("min_case_filter threshold must be finite")
        if self.date_range is not None:
            start, end = self.date_range
            n_days = (end - start).days + 1
            if n_days < 1:
                raise ValueError("date_range end precedes start")
            if self.lag_days >= n_days:
                raise LagTooLarge(
                    f"lag_days {self.lag_days} must be shorter than the {n_days}-day date range"
                )


@dataclass(frozen=True)
class AlignedPair:
    region_id: str
    mobility_norm: np.ndarray = field(repr=False)
    cases_norm: np.ndarray = field(repr=False)
    lag_days: int = 0

    @property
    def n(self):
        return self.mobility_norm.size


@dataclass(frozen=True)
class FilterReport:
    """What the region filter did, stage by stage.

    ``rows`` holds ``(stage, region_id, reason)`` triples for every input
    region; ``stage`` is ``"metro"`` or ``"case_filter"`` for dropped regions
    and ``"kept"`` for survivors.
    """

    n_input: int
    n_after_metro: int
    threshold: float
    threshold_kind: str
    n_below_threshold: int
    n_kept: int
    mean_cases: Dict[str, float] = field(repr=False)
    rows: Tuple[Tuple[str, str, str], ...] = field(repr=False)

    def summary_lines(self):
        return [
            f"regions_input={self.n_input}",
            f"regions_after_metro={self.n_after_metro}",
            f"case_threshold_kind={self.threshold_kind}",
            f"case_threshold={self.threshold!r}",
            f"regions_below_threshold={self.n_below_threshold}",
            f"regions_kept={self.n_kept}",
        ]


def filter_regions(regions, case_series, config=AnalysisConfig()):
    """Keep metro regions (optionally) whose mean daily cases reach the threshold.

    The default threshold is the median of the per-region means computed
    over the regions that survived the metro step; a region is dropped only
    when its mean is strictly below it.

    Returns
    -------
    kept : frozenset of str
    report : FilterReport
    """
    ids = sorted(regions)
    if config.metro_only:
        stage1 = [rid for rid in ids if regions[rid].is_metro]
    else:
        stage1 = list(ids)
    survivors = set(stage1)
    rows = {rid: ("metro", rid, "not_metro") for rid in ids if rid not in survivors}
    if not stage1:
        raise EmptyAfterFilter("no region left after the metropolitan filter")

    means = {rid: float(np.mean(case_series[rid].values)) for rid in stage1}
    if config.min_case_filter == "median":
        threshold = float(np.median(np.array([means[rid] for rid in stage1])))
        kind = "median"
    else:
        threshold = float(config.min_case_filter)
        kind = "fixed"

    kept = []
    for rid in stage1:
        m = means[rid]
        if m < threshold:
            rows[rid] = ("case_filter", rid, f"mean_cases {m!r} < {kind} {threshold!r}")
        else:
            kept.append(rid)
            rows[rid] = ("kept", rid, f"mean_cases {m!r} >= {kind} {threshold!r}")
    report = FilterReport(
        n_input=len(ids),
        n_after_metro=len(stage1),
        threshold=threshold,
        threshold_kind=kind,
        n_below_threshold=len(stage1) - len(kept),
        n_kept=len(kept),
        mean_cases=means,
        rows=tuple(rows[rid] for rid in ids),
    )
    if not kept:
        raise EmptyAfterFilter("no region left after the case-count filter")
    return frozenset(kept), report


def apply_lag(mobility, cases, lag_days):
    """Pair mobility on day t with cases on day t + lag.

    Returns ``(mobility[:T - lag], cases[lag:])`` as arrays.
    """
    lag_days = check_positive_int(lag_days, "lag_days", allow_zero=True)
    mob = check_series(mobility, name="mobility")
    cas = check_series(cases, name="cases")
    if mob.size != cas.size:
        raise ValueError(
            f"mobility and cases must share one date grid ({mob.size} != {cas.size} days)"
        )
    T = mob.size
    if lag_days >= T:
        raise LagTooLarge(f"lag {lag_days} leaves nothing of a {T}-day series")
    return mob[: T - lag_days].copy(), cas[lag_days:].copy()


def min_max_normalize(values, *, which=None):
    """Rescale to ``[0, 1]``; the minimum maps to exactly 0 and the maximum to exactly 1."""
    x = check_series(values, name=which or "values")
    lo = x.min()
    hi = x.max()
    if x.size < 2 or hi == lo:
        raise DegenerateSeries(
            f"{which or 'series'} is constant; min-max scaling is undefined", which=which
        )
    return (x - lo) / (hi - lo)


def build_aligned_pair(mobility, cases, config=AnalysisConfig()):
    """Smooth, lag-align and normalize one region's mobility/case pair.

    Mobility is smoothed with a trailing ``config.smooth_window`` mean; cases
    only when ``config.resmooth_cases`` is set.  Each lag-truncated window is
    scaled to ``[0, 1]`` on its own.
    """
    region_id = getattr(mobility, "region_id", None) or getattr(cases, "region_id", "")
    mob = rolling_mean(check_series(mobility, name="mobility"), config.smooth_window)
    cas = check_series(cases, name="cases")
    if config.resmooth_cases:
        cas = rolling_mean(cas, config.smooth_window)
    mob_w, cas_w = apply_lag(mob, cas, config.lag_days)
    return AlignedPair(
        region_id=region_id,
        mobility_norm=min_max_normalize(mob_w, which="mobility"),
        cases_norm=min_max_normalize(cas_w, which="cases"),
        lag_days=config.lag_days,
    )


class MinMaxNormalizer(TransformerMixin, BaseEstimator):
    """Min-max scaling of a single 1-D series.

    Unlike ``sklearn.preprocessing.MinMaxScaler`` this treats its input as one
    sequence rather than a column of samples, and refuses constant input.
    """

    def fit(self, X, y=None):
        x = check_series(X, min_length=2, name="X")
        if x.max() == x.min():
            raise DegenerateSeries("X is constant; min-max scaling is undefined")
        self.data_min_ = float(x.min())
        self.data_max_ = float(x.max())
        return self

    def transform(self, X):
        check_is_fitted(self, ("data_min_", "data_max_"))
        x = check_series(X, name="X")
        return (x - self.data_min_) / (self.data_max_ - self.data_min_)

    def inverse_transform(self, X):
        check_is_fitted(self, ("data_min_", "data_max_"))
        x = check_series(X, name="X")
        return x * (self.data_max_ - self.data_min_) + self.data_min_

"""Per-region DTW scoring, lag sweeps, correlation diagnostics and z-score classes."""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Dict, Optional

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_positive_int, check_same_length, check_series
from .dtw import dtw_distance
from .errors import DegenerateSeries, LagTooLarge, ZeroSpread, ZeroVariance
from .mobility import aggregate_all_mobility, aggregate_region_mobility
from .preprocess import AnalysisConfig, build_aligned_pair, filter_regions

logger = logging.getLogger(__name__)

DEFAULT_BREAKS = (-1.5, -0.5, 0.5, 1.5)
WEAK_CORRELATION = 0.3


@dataclass(frozen=True)
class RegionResult:
    region_id: str
    dtw_distance: Optional[float]
    n: Optional[int]
    lag_days: Optional[int]
    skipped_reason: Optional[str] = None

    def __post_init__(self):
        if (self.dtw_distance is None) == (self.skipped_reason is None):
            raise ValueError("a RegionResult carries either a distance or a skip reason")

    @property
    def scored(self):
        return self.skipped_reason is None


@dataclass(frozen=True)
class LagSweepResult:
    region_id: str
    distances: Dict[int, Optional[float]]
    best_lag: Optional[int]

    @property
    def best_distance(self):
        return None if self.best_lag is None else self.distances[self.best_lag]


@dataclass(frozen=True)
class ClassifiedResult:
    region_id: str
    dtw_distance: float
    z_score: float
    class_label: str


@dataclass(frozen=True)
class DiagnosticsReport:
    n_scored: int
    r_population: float
    r_density: float
    weak_threshold: float = WEAK_CORRELATION

    def strength(self, r):
        return "weak" if abs(r) < self.weak_threshold else "not_weak"

    def lines(self):
        return [
            f"n_scored={self.n_scored}",
            f"pearson_dtw_population={self.r_population!r}",
            f"pearson_dtw_population_strength={self.strength(self.r_population)}",
            f"pearson_dtw_density={self.r_density!r}",
            f"pearson_dtw_density_strength={self.strength(self.r_density)}",
            f"weak_threshold_abs_r={self.weak_threshold!r}",
        ]


def _skip_reason(exc):
    return "degenerate_cases" if exc.which == "cases" else "degenerate_mobility"


def _score(region_id, mobility, cases, config, band):
    try:
        pair = build_aligned_pair(mobility, cases, config)
    except DegenerateSeries as exc:
        n = len(mobility) - config.lag_days
        return RegionResult(region_id, None, n, config.lag_days, _skip_reason(exc))
    d = dtw_distance(pair.mobility_norm, pair.cases_norm, band)
    return RegionResult(region_id, d, pair.n, config.lag_days)


def run_region(region_id, dataset, config=AnalysisConfig(), band=None, mobility=None):
    """Score one region: aggregate mobility, align with cases, take the DTW distance.

    Constant series come back as skipped results instead of raising.
    ``mobility`` may be passed in when it was already aggregated.
    """
    if mobility is None:
        mobility = aggregate_region_mobility(
            dataset.flows, dataset.regions, region_id, dataset.date_range
        )
    return _score(region_id, mobility, dataset.cases[region_id], config, band)


def _map(fn, items, n_jobs):
    if n_jobs is None or n_jobs == 1 or len(items) < 2:
        return [fn(it) for it in items]
    workers = None if n_jobs == -1 else n_jobs
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def run_all(dataset, config=AnalysisConfig(), band=None, n_jobs=None, return_report=False):
    """Filter regions, then score every survivor.

    Results are sorted by region id and do not depend on ``n_jobs``.
    """
    kept, report = filter_regions(dataset.regions, dataset.cases, config)
    mobility = aggregate_all_mobility(dataset.flows, dataset.regions, dataset.date_range)
    ids = sorted(kept)
    results = _map(
        lambda rid: _score(rid, mobility[rid], dataset.cases[rid], config, band), ids, n_jobs
    )
    if return_report:
        return results, report
    return results


def lag_sweep(region_id, dataset, config=AnalysisConfig(), lag_min=0, lag_max=30,
              band=None, mobility=None):
    """DTW distance for every lag in ``lag_min..lag_max`` (inclusive).

    The aligned windows are re-cut and re-normalized for each lag.  Lags where
    a window is constant map to ``None``.  Ties go to the smaller lag.
    """
    lag_min = check_positive_int(lag_min, "lag_min", allow_zero=True)
    lag_max = check_positive_int(lag_max, "lag_max", allow_zero=True)
    if lag_min > lag_max:
        raise ValueError(f"lag_min {lag_min} exceeds lag_max {lag_max}")
    if lag_max >= dataset.n_days:
        raise LagTooLarge(f"lag_max {lag_max} must be below the series length {dataset.n_days}")
    if mobility is None:
        mobility = aggregate_region_mobility(
            dataset.flows, dataset.regions, region_id, dataset.date_range
        )
    cases = dataset.cases[region_id]
    distances = {}
    for lag in range(lag_min, lag_max + 1):
        res = _score(region_id, mobility, cases, replace(config, lag_days=lag), band)
        distances[lag] = res.dtw_distance
    scored = [(d, lag) for lag, d in distances.items() if d is not None]
    best = min(scored)[1] if scored else None
    return LagSweepResult(region_id, distances, best)


def lag_sweep_all(dataset, config=AnalysisConfig(), lag_min=0, lag_max=30, band=None,
                  n_jobs=None):
    kept = filter_regions(dataset.regions, dataset.cases, config)[0]
    mobility = aggregate_all_mobility(dataset.flows, dataset.regions, dataset.date_range)
    ids = sorted(kept)
    return _map(
        lambda rid: lag_sweep(rid, dataset, config, lag_min, lag_max, band, mobility[rid]),
        ids,
        n_jobs,
    )


def pearson(xs, ys):
    """Sample Pearson correlation coefficient."""
    x = check_series(xs, min_length=2, name="xs")
    y = check_series(ys, min_length=2, name="ys")
    check_same_length(x, y, ("xs", "ys"))
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise ZeroVariance("pearson correlation needs non-constant inputs")
    dx = x - x.mean()
    dy = y - y.mean()
    r = float(np.dot(dx, dy) / np.sqrt(np.dot(dx, dx) * np.dot(dy, dy)))
    return min(1.0, max(-1.0, r))


def _scored(results):
    return [r for r in results if r.scored]


def run_diagnostics(results, regions):
    """Correlate DTW distances with population and population density."""
    scored = _scored(results)
    if len(scored) < 2:
        raise ZeroVariance("diagnostics need at least two scored regions")
    d = [r.dtw_distance for r in scored]
    pop = [regions[r.region_id].population for r in scored]
    dens = [regions[r.region_id].density for r in scored]
    return DiagnosticsReport(
        n_scored=len(scored),
        r_population=pearson(d, pop),
        r_density=pearson(d, dens),
    )


def class_labels(breaks=DEFAULT_BREAKS):
    fmt = "{:g}".format
    labels = [f"< {fmt(breaks[0])}"]
    labels += [f"{fmt(lo)}..{fmt(hi)}" for lo, hi in zip(breaks[:-1], breaks[1:])]
    labels.append(f">= {fmt(breaks[-1])}")
    return labels


class StdClassifier(TransformerMixin, BaseEstimator):
    """Standard-deviation classes for a set of distances.

    ``fit`` learns the mean and the sample (n-1) standard deviation,
    ``transform`` returns z-scores and ``predict`` the class label of each
    value.  Classes are lower-closed intervals between ``breaks``.

    Parameters
    ----------
    breaks : sequence of float, default=(-1.5, -0.5, 0.5, 1.5)
        Increasing z-score cut points.
    """

    def __init__(self, breaks=DEFAULT_BREAKS):
        self.breaks = breaks

    def fit(self, X, y=None):
        x = check_series(X, name="X")
        if x.size < 2:
            raise ZeroSpread("z-scores need at least two values")
        if np.ptp(x) == 0:
            raise ZeroSpread("all values are identical; z-scores are undefined")
        b = np.asarray(self.breaks, dtype=float)
        if b.ndim != 1 or b.size < 1 or np.any(np.diff(b) <= 0):
            raise ValueError("breaks must be a non-empty increasing sequence")
        self.mean_ = float(x.mean())
        self.std_ = float(x.std(ddof=1))
        self.labels_ = class_labels(tuple(b))
        return self

    def transform(self, X):
        check_is_fitted(self, ("mean_", "std_"))
        return (check_series(X, name="X") - self.mean_) / self.std_

    def predict(self, X):
        z = self.transform(X)
        idx = np.searchsorted(np.asarray(self.breaks, dtype=float), z, side="right")
        return np.array([self.labels_[k] for k in idx], dtype=object)


def classify_std(results, breaks=DEFAULT_BREAKS):
    """z-score and class label for every scored result, in input order."""
    scored = _scored(results)
    d = np.array([r.dtw_distance for r in scored], dtype=float)
    clf = StdClassifier(breaks).fit(d)
    z = clf.transform(d)
    labels = clf.predict(d)
    return [
        ClassifiedResult(r.region_id, r.dtw_distance, float(zi), str(lab))
        for r, zi, lab in zip(scored, z, labels)
    ]


class MobilityCaseDTW(BaseEstimator):
    """Per-region DTW similarity between mobility and lagged case counts.

    ``fit`` takes a :class:`~warpflow.ingest.Dataset`, filters regions and
    scores every survivor.  Fitted attributes:

    - ``results_``: list of :class:`RegionResult`, sorted by region id
    - ``filter_report_``: :class:`~warpflow.preprocess.FilterReport`
    - ``distances_``: dict region id -> distance for scored regions

    Parameters
    ----------
    lag_days, smooth_window, metro_only, min_case_filter, resmooth_cases
        See :class:`~warpflow.preprocess.AnalysisConfig`.
    band_radius : int or None
        Sakoe-Chiba radius; None disables the band.
    n_jobs : int or None
        Worker threads for per-region work; -1 uses all cores.  Output is
        identical for any value.
    """

    def __init__(self, lag_days=7, smooth_window=7, metro_only=True,
                 min_case_filter="median", resmooth_cases=False, band_radius=None,
                 n_jobs=None):
        self.lag_days = lag_days
        self.smooth_window = smooth_window
        self.metro_only = metro_only
        self.min_case_filter = min_case_filter
        self.resmooth_cases = resmooth_cases
        self.band_radius = band_radius
        self.n_jobs = n_jobs

    def _config(self, dataset):
        return AnalysisConfig(
            lag_days=self.lag_days,
            smooth_window=self.smooth_window,
            date_range=tuple(dataset.date_range),
            min_case_filter=self.min_case_filter,
            metro_only=self.metro_only,
            resmooth_cases=self.resmooth_cases,
        )

    def fit(self, X, y=None):
        config = self._config(X)
        results, report = run_all(X, config, self.band_radius, self.n_jobs, return_report=True)
        self.config_ = config
        self.results_ = results
        self.filter_report_ = report
        self.distances_ = {r.region_id: r.dtw_distance for r in results if r.scored}
        n_skipped = sum(1 for r in results if not r.scored)
        if n_skipped:
            logger.info("%d region(s) skipped as degenerate", n_skipped)
        return self

    def transform(self, X=None):
        """Distances of the fitted regions (NaN where skipped), ordered by region id."""
        check_is_fitted(self, "results_")
        return np.array(
            [np.nan if r.dtw_distance is None else r.dtw_distance for r in self.results_]
        )

    def classify(self, breaks=DEFAULT_BREAKS):
        check_is_fitted(self, "results_")
        return classify_std(self.results_, breaks)

    def diagnostics(self, regions):
        check_is_fitted(self, "results_")
        return run_diagnostics(self.results_, regions)

    def lag_sweep(self, X, lag_min=0, lag_max=30):
        """Sweep lags for every region that passes the filter."""
        return lag_sweep_all(X, self._config(X), lag_min, lag_max, self.band_radius, self.n_jobs)

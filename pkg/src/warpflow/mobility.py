"""Person-flow estimation from device counts and per-region daily mobility.

A flow record's device count is scaled up to persons by the origin's
population over the number of devices observed in the origin that day.  A
region's daily mobility is the sum of every estimated flow whose destination
is the region, which covers both the within-region flow (origin ==
destination) and all inflows.
"""

from collections import defaultdict

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from ._validation import check_positive_int, check_series
from .errors import WindowTooLarge, ZeroDevices
from .series import DailySeries


def estimate_flow(devices_od, population_o, devices_o):
    """Estimated persons moving origin -> destination.

    >>> estimate_flow(10, 1000, 100)
    100.0
    """
    if devices_o <= 0:
        raise ZeroDevices(
            "origin device total is zero; the sampling rate is undefined"
        )
    return devices_od * population_o / devices_o


def _day_index(date_range):
    start, end = date_range
    return start, (end - start).days + 1


def aggregate_region_mobility(flows, regions, target, date_range):
    """Daily within + inflow mobility for ``target`` on ``date_range``.

    Days without any record into ``target`` get 0.0.
    """
    start, n_days = _day_index(date_range)
    totals = np.zeros(n_days)
    for rec in flows:
        if rec.destination != target:
            continue
        k = (rec.date - start).days
        if 0 <= k < n_days:
            pop = regions[rec.origin].population
            totals[k] += estimate_flow(rec.devices_od, pop, rec.devices_o)
    return DailySeries(target, start, totals)


def aggregate_all_mobility(flows, regions, date_range):
    """Same as :func:`aggregate_region_mobility` for every region in one pass.

    Records are summed in the order given, per destination, so the result for
    each region is identical to calling the single-region version.
    """
    start, n_days = _day_index(date_range)
    totals = defaultdict(lambda: np.zeros(n_days))
    for rec in flows:
        k = (rec.date - start).days
        if 0 <= k < n_days:
            pop = regions[rec.origin].population
            totals[rec.destination][k] += estimate_flow(
                rec.devices_od, pop, rec.devices_o
            )
    return {
        rid: DailySeries(rid, start, totals[rid] if rid in totals else np.zeros(n_days))
        for rid in sorted(regions)
    }


def rolling_mean(series, window):
    """Trailing moving average with partial windows at the start.

    ``out[i] = mean(values[max(0, i - window + 1) : i + 1])``, so the output has
    the same length as the input.  Accepts a :class:`DailySeries` (returns
    one) or a plain sequence (returns an ndarray).
    """
    window = check_positive_int(window, "window")
    values = check_series(series, name="series")
    if window > values.size:
        raise WindowTooLarge(
            f"window {window} exceeds series length {values.size}"
        )
    out = np.array(
        [values[max(0, i - window + 1) : i + 1].mean() for i in range(values.size)]
    )
    # float rounding in the sum can land one ulp outside [min, max]
    out = np.clip(out, values.min(), values.max())
    if isinstance(series, DailySeries):
        return series.with_values(out)
    return out


class RollingMean(TransformerMixin, BaseEstimator):
    """Transformer form of :func:`rolling_mean` for 1-D series.

    Parameters
    ----------
    window : int, default=7
        Trailing window length in days.
    """

    def __init__(self, window=7):
        self.window = window

    def fit(self, X, y=None):
        check_positive_int(self.window, "window")
        return self

    def transform(self, X):
        return rolling_mean(X, self.window)

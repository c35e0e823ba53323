from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np


@dataclass(frozen=True)
class DailySeries:
    """Values on a contiguous daily calendar grid for one region.

    ``values[i]`` belongs to ``start_date + i`` days.  The array is stored
    read-only so a series can be shared freely between workers.
    """

    region_id: str
    start_date: date
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        arr = np.array(self.values, dtype=np.float64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("DailySeries needs a non-empty 1-D sequence of values")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self):
        return self.values.size

    @property
    def end_date(self):
        return self.start_date + timedelta(days=len(self) - 1)

    @property
    def dates(self):
        return [self.start_date + timedelta(days=i) for i in range(len(self))]

    def with_values(self, values):
        return DailySeries(self.region_id, self.start_date, values)

    def __eq__(self, other):
        if not isinstance(other, DailySeries):
            return NotImplemented
        return (
            self.region_id == other.region_id
            and self.start_date == other.start_date
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None


def date_grid(start, end):
    """Inclusive list of consecutive dates from ``start`` to ``end``."""
    n = (end - start).days + 1
    return [start + timedelta(days=i) for i in range(max(n, 0))]

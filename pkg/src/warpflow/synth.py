"""Synthetic regions, flows and cases with a known mobility -> cases lag.

Random numbers
--------------
Every draw comes from :class:`random.Random` (Mersenne Twister MT19937),
seeded per stream with the first 8 bytes of
``sha256(f"{seed}/{stream}/{region_index}")`` read big-endian.  Only
``Random.random()`` is used; normal variates are produced here with the
Box-Muller transform.  Both pieces are fixed, so a given seed yields the same
draws on every platform and Python version.

Construction
------------
Region ``i`` gets a population, a mobility baseline and a sinusoid.  Its
mobility series is quantized to whole device counts split between a within
flow and an inflow from region ``i + 1``, so aggregating the emitted flows
gives back the "realized" mobility exactly.  Cases are then derived from the
smoothed realized mobility according to the association kind.
"""

import hashlib
import json
import math
import random
from dataclasses import asdict, dataclass, field, replace
from datetime import date, timedelta
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from .errors import ConfigError
from .ingest import Dataset, FlowRecord, RegionMeta, write_dataset
from .mobility import estimate_flow, rolling_mean
from .series import DailySeries

ASSOCIATIONS = ("lagged_copy", "lagged_scaled", "independent", "inverse")
DEFAULT_START = date(2020, 11, 23)


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of one synthetic scenario.

    ``region_associations`` overrides ``association`` for selected region
    indices; ``non_metro`` and ``degenerate`` list indices of regions flagged
    outside a metro area or given a constant mobility series.
    """

    n_regions: int = 10
    n_days: int = 63
    true_lag: int = 7
    association: str = "lagged_copy"
    noise_sigma: float = 0.0
    seed: int = 0
    start_date: date = DEFAULT_START
    smooth_window: int = 7
    region_associations: Mapping[int, str] = field(default_factory=dict)
    non_metro: Tuple[int, ...] = ()
    degenerate: Tuple[int, ...] = ()

    def __post_init__(self):
        if isinstance(self.start_date, str):
            object.__setattr__(self, "start_date", date.fromisoformat(self.start_date))
        object.__setattr__(
            self,
            "region_associations",
            {int(k): v for k, v in dict(self.region_associations).items()},
        )
        object.__setattr__(self, "non_metro", tuple(int(i) for i in self.non_metro))
        object.__setattr__(self, "degenerate", tuple(int(i) for i in self.degenerate))
        for name in ("n_regions", "n_days", "smooth_window"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if isinstance(self.true_lag, bool) or not isinstance(self.true_lag, int) or self.true_lag < 0:
            raise ConfigError(f"true_lag must be a non-negative integer, got {self.true_lag!r}")
        if self.true_lag >= self.n_days:
            raise ConfigError(
                f"true_lag ({self.true_lag}) must be smaller than n_days ({self.n_days})"
            )
        if not (isinstance(self.noise_sigma, (int, float)) and self.noise_sigma >= 0
                and math.isfinite(self.noise_sigma)):
            raise ConfigError(f"noise_sigma must be a non-negative number, got {self.noise_sigma!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int):
            raise ConfigError(f"seed must be an integer, got {self.seed!r}")
        for assoc in [self.association, *self.region_associations.values()]:
            if assoc not in ASSOCIATIONS:
                raise ConfigError(f"association must be one of {ASSOCIATIONS}, got {assoc!r}")
        for idx in [*self.region_associations, *self.non_metro, *self.degenerate]:
            if not 0 <= idx < self.n_regions:
                raise ConfigError(f"region index {idx} outside 0..{self.n_regions - 1}")

    def association_for(self, region_index):
        return self.region_associations.get(region_index, self.association)

    def to_dict(self):
        d = asdict(self)
        d["start_date"] = self.start_date.isoformat()
        d["region_associations"] = {str(k): v for k, v in sorted(self.region_associations.items())}
        d["non_metro"] = list(self.non_metro)
        d["degenerate"] = list(self.degenerate)
        return d

    @classmethod
    def from_dict(cls, data):
        unknown = set(data) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown scenario key(s): {', '.join(sorted(unknown))}")
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: scenario must be a JSON object")
        try:
            return cls.from_dict(data)
        except TypeError as exc:
            raise ConfigError(f"{path}: {exc}") from None


class SeededStream:
    """Portable uniform/normal draws; see the module docstring."""

    def __init__(self, seed, stream, index=0):
        digest = hashlib.sha256(f"{seed}/{stream}/{index}".encode()).digest()
        self._rng = random.Random(int.from_bytes(digest[:8], "big"))
        self._spare = None

    def uniform(self, lo=0.0, hi=1.0):
        return lo + (hi - lo) * self._rng.random()

    def normal(self):
        if self._spare is not None:
            z, self._spare = self._spare, None
            return z
        u1 = 1.0 - self._rng.random()  # (0, 1], keeps log finite
        u2 = self._rng.random()
        r = math.sqrt(-2.0 * math.log(u1))
        self._spare = r * math.sin(2.0 * math.pi * u2)
        return r * math.cos(2.0 * math.pi * u2)


def region_id_for(index):
    return f"{90001 + index:05d}"


@dataclass(frozen=True)
class _RegionProfile:
    population: int
    land_area: float
    baseline_frac: float
    amplitude_frac: float
    period: float
    phase: float
    sampling: float
    within_share: float


def _profile(spec, index):
    s = SeededStream(spec.seed, "profile", index)
    population = int(round(math.exp(s.uniform(math.log(50_000), math.log(2_000_000)))))
    return _RegionProfile(
        population=population,
        land_area=round(s.uniform(100.0, 2500.0), 1),
        baseline_frac=s.uniform(0.25, 0.5),
        amplitude_frac=s.uniform(0.15, 0.35),
        period=s.uniform(30.0, 60.0),
        phase=s.uniform(0.0, 2.0 * math.pi),
        sampling=s.uniform(0.03, 0.08),
        within_share=s.uniform(0.6, 0.85),
    )


def _wave(profile, n_days, noise, stream):
    base = profile.baseline_frac * profile.population
    amp = profile.amplitude_frac * base
    values = np.empty(n_days)
    for t in range(n_days):
        values[t] = base + amp * math.sin(2.0 * math.pi * t / profile.period + profile.phase)
        if noise > 0:
            values[t] += noise * amp * stream.normal()
    # keep well inside the origin population so device counts stay valid
    return np.clip(values, 0.05 * base, 0.9 * profile.population)


def gen_mobility_series(spec, region_index):
    """Baseline + low-frequency sinusoid + Gaussian noise for one region.

    With ``noise_sigma == 0`` the result is exactly the deterministic wave.
    Regions listed in ``spec.degenerate`` get a constant series.
    """
    profile = _profile(spec, region_index)
    rid = region_id_for(region_index)
    if region_index in spec.degenerate:
        base = profile.baseline_frac * profile.population
        return DailySeries(rid, spec.start_date, np.full(spec.n_days, base))
    stream = SeededStream(spec.seed, "mobility", region_index)
    return DailySeries(rid, spec.start_date, _wave(profile, spec.n_days, spec.noise_sigma, stream))


def _region_index(region_id):
    return int(region_id) - 90001


def gen_lagged_cases(mobility, spec, association=None, noise_window=1):
    """Cases derived from ``mobility`` according to ``association``.

    ``lagged_copy``: ``cases[t] = mobility[t - lag] + noise``, with the first
    ``lag`` days repeating ``mobility[0]``.  ``lagged_scaled`` multiplies the
    lagged copy by a positive per-region constant, ``inverse`` uses
    ``max(mobility) - mobility[t - lag]``, and ``independent`` draws an
    unrelated wave.

    Daily noise is Gaussian with standard deviation ``noise_sigma`` times the
    amplitude (half the peak-to-peak range) of the noiseless cases, then
    passed through a trailing mean of ``noise_window`` days (published case
    counts are weekly averages, so their noise is too).  Results are clipped at zero.
    """
    association = association or spec.association
    if association not in ASSOCIATIONS:
        raise ConfigError(f"unknown association {association!r}")
    values = np.asarray(mobility.values, dtype=np.float64)
    idx = _region_index(mobility.region_id) if mobility.region_id.isdigit() else 0
    stream = SeededStream(spec.seed, "cases", idx)
    lag = spec.true_lag
    n = values.size

    if association == "independent":
        other = _profile(replace(spec, seed=spec.seed + 7919), idx)
        src = _wave(other, n, 0.0, stream)
        src = src * (values.mean() / src.mean())
        shifted = src
    else:
        shifted = np.concatenate((np.full(min(lag, n), values[0]), values[: max(n - lag, 0)]))
        if association == "lagged_scaled":
            shifted = shifted * stream.uniform(0.002, 0.02)
        elif association == "inverse":
            shifted = values.max() - shifted

    # half the peak-to-peak range, the same scale as the mobility sinusoid
    amplitude = 0.5 * float(shifted.max() - shifted.min())
    if spec.noise_sigma > 0 and amplitude > 0:
        noise = np.array([stream.normal() for _ in range(n)])
        if noise_window > 1:
            noise = rolling_mean(noise, min(noise_window, n))
        shifted = shifted + spec.noise_sigma * amplitude * noise
    return DailySeries(mobility.region_id, mobility.start_date, np.maximum(shifted, 0.0))


def _flows_for_day(day, dest_idx, target, profiles, n_regions):
    """Device-count records into ``dest_idx`` whose estimate is close to ``target``."""
    p = profiles[dest_idx]
    dest = region_id_for(dest_idx)
    dev_dest = max(1, int(round(p.population * p.sampling)))
    records = []
    inflow_target = 0.0
    if n_regions > 1:
        src_idx = (dest_idx + 1) % n_regions
        q = profiles[src_idx]
        dev_src = max(1, int(round(q.population * q.sampling)))
        want = (1.0 - p.within_share) * target * dev_src / q.population
        dev_in = min(int(round(want)), int(0.2 * dev_src))
        if dev_in > 0:
            records.append(FlowRecord(day, region_id_for(src_idx), dest, dev_in, dev_src))
            inflow_target = estimate_flow(dev_in, q.population, dev_src)
    dev_within = int(round((target - inflow_target) * dev_dest / p.population))
    dev_within = min(max(dev_within, 0), dev_dest)
    records.append(FlowRecord(day, dest, dest, dev_within, dev_dest))
    return records


@dataclass
class SyntheticData:
    dataset: Dataset
    mobility: Dict[str, DailySeries]
    truth: list

    def write(self, out_dir):
        """Write the three CSVs plus ``truth.json``; returns the paths written."""
        paths = write_dataset(self.dataset, out_dir)
        truth_path = Path(out_dir) / "truth.json"
        truth_path.write_text(json.dumps(self.truth, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        paths["truth"] = truth_path
        return paths


def gen_dataset(spec: ScenarioSpec) -> SyntheticData:
    """Build a full synthetic dataset and its ground-truth manifest.

    ``SyntheticData.mobility`` holds the realized per-region mobility, i.e.
    exactly what aggregating ``dataset.flows`` produces.
    """
    n = spec.n_regions
    profiles = [_profile(spec, i) for i in range(n)]
    grid = [spec.start_date + timedelta(days=t) for t in range(spec.n_days)]
    end = grid[-1]

    regions = {}
    for i, p in enumerate(profiles):
        rid = region_id_for(i)
        regions[rid] = RegionMeta(
            region_id=rid,
            name=f"Synthetic County {i + 1}",
            population=p.population,
            land_area=p.land_area,
            is_metro=i not in spec.non_metro,
        )

    flows = []
    mobility = {}
    cases = {}
    truth = []
    for i in range(n):
        rid = region_id_for(i)
        intended = gen_mobility_series(spec, i)
        realized = np.zeros(spec.n_days)
        for t, day in enumerate(grid):
            recs = _flows_for_day(day, i, intended.values[t], profiles, n)
            for r in recs:
                realized[t] += estimate_flow(r.devices_od, regions[r.origin].population, r.devices_o)
            flows.extend(r for r in recs if r.devices_od > 0)
        mobility[rid] = DailySeries(rid, spec.start_date, realized)
        window = min(spec.smooth_window, spec.n_days)
        smoothed = rolling_mean(mobility[rid], window)
        assoc = spec.association_for(i)
        cases[rid] = gen_lagged_cases(smoothed, spec, assoc, noise_window=window)
        truth.append(
            {
                "region_id": rid,
                "true_lag": spec.true_lag,
                "association": assoc,
                "noise_sigma": spec.noise_sigma,
            }
        )

    flows.sort()
    dataset = Dataset(
        regions=dict(sorted(regions.items())),
        flows=tuple(flows),
        cases=cases,
        date_range=(spec.start_date, end),
    )
    return SyntheticData(dataset=dataset, mobility=mobility, truth=truth)

from pathlib import Path

import pytest

from warpflow.synth import ScenarioSpec, gen_dataset

ROOT = Path(__file__).resolve().parents[1]
DEMO_SCENARIO = ROOT / "scenarios" / "demo.json"


@pytest.fixture
def write_csv(tmp_path):
    """Write ``lines`` (header first) to a CSV under tmp_path and return the path."""

    def _write(name, lines):
        path = tmp_path / name
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
        return path

    return _write


@pytest.fixture(scope="session")
def small_synth():
    spec = ScenarioSpec(
        n_regions=8,
        n_days=40,
        true_lag=4,
        noise_sigma=0.02,
        seed=99,
        region_associations={2: "independent", 5: "inverse"},
        non_metro=(7,),
        degenerate=(3,),
    )
    return gen_dataset(spec)


@pytest.fixture
def synth_files(tmp_path, small_synth):
    return small_synth.write(tmp_path / "data")

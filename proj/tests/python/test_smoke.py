"""End-to-end checks of the python module against known values."""

import json
import math
import os
import subprocess
import sys

import pytest

import semithermo

SQUARE = json.dumps({"generators": [{"num": [[0, 0], [0, 0], [1, 0]], "den": [[1, 0]]}]})
SQUARE_CUBE = json.dumps(
    {
        "generators": [
            {"num": [[0, 0], [0, 0], [1, 0]], "den": [[1, 0]]},
            {"num": [[0, 0], [0, 0], [0, 0], [1, 0]], "den": [[1, 0]]},
        ]
    }
)


def test_version_present():
    assert semithermo.__version__


def test_generator_set_round_trip():
    g = semithermo.GeneratorSet.from_json(SQUARE_CUBE)
    assert g.count == 2
    assert g.degree_sum == 5
    again = semithermo.GeneratorSet.from_json(g.to_json())
    assert again.degree_sum == 5


def test_bad_json_maps_to_value_error():
    with pytest.raises(ValueError):
        semithermo.GeneratorSet.from_json("{not json")
    # Degree 1 generators are rejected at construction.
    mobius = json.dumps({"generators": [{"num": [[0, 0], [1, 0]], "den": [[1, 0]]}]})
    with pytest.raises(ValueError):
        semithermo.GeneratorSet.from_json(mobius)


def test_julia_sample_stays_on_circle():
    g = semithermo.GeneratorSet.from_json(SQUARE)
    pts = semithermo.julia_sample(g, count=2000, seed=7)
    assert len(pts) == 2000
    assert max(abs(abs(p) - 1.0) for p in pts) < 1e-9


def test_julia_sample_seed_reproducible():
    g = semithermo.GeneratorSet.from_json(SQUARE)
    a = semithermo.julia_sample(g, count=500, seed=3)
    b = semithermo.julia_sample(g, count=500, seed=3)
    c = semithermo.julia_sample(g, count=500, seed=4)
    assert a == b
    assert a != c


def test_pressure_of_free_systems():
    g = semithermo.GeneratorSet.from_json(SQUARE)
    out = semithermo.pressure(g, n_max=12)
    assert out["method"] == "exact"
    assert abs(out["estimate"] - math.log(2.0)) < 1e-9
    g2 = semithermo.GeneratorSet.from_json(SQUARE_CUBE)
    out2 = semithermo.pressure(g2, n_max=10)
    assert abs(out2["estimate"] - math.log(5.0)) < 1e-9


def test_pressure_geometric_on_circle():
    g = semithermo.GeneratorSet.from_json(SQUARE)
    psi = json.dumps({"kind": "geometric", "params": {"t": 0.5}})
    out = semithermo.pressure(g, psi, z=complex(1.0, 0.0), n_max=10)
    assert abs(out["estimate"] - 0.5 * math.log(2.0)) < 1e-9


def test_spectrum_small_grid():
    g = semithermo.GeneratorSet.from_json(SQUARE)
    out = semithermo.spectrum(g, cloud_points=12000, cells=256, seed=5)
    assert abs(out["lambda"] - 2.0) < 1e-6
    assert out["leak"] == 0.0
    assert out["residual_h"] <= 1e-9
    assert abs(sum(out["m"]) - 1.0) < 1e-12
    assert min(out["h"]) > 0.0
    assert len(out["centers"]) == len(out["mu"])
    assert abs(sum(out["mu"]) - 1.0) < 1e-9


def test_cli_binary_runs(tmp_path):
    cli = os.environ.get("SEMITHERMO_CLI")
    if not cli:
        pytest.skip("SEMITHERMO_CLI not set")
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "semigroup": json.loads(SQUARE),
                "seed": 5,
                "pressure": {"n_max": 10, "points": 3},
                "julia": {"points": 500, "burn_in": 50, "image_size": 64},
            }
        )
    )
    out_dir = tmp_path / "out"
    proc = subprocess.run(
        [cli, "pressure", "--config", str(cfg), "--out", str(out_dir)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "pressure estimate" in proc.stdout
    rows = (out_dir / "pressure.csv").read_text().splitlines()
    assert rows[-1].startswith("-1,-1,")
    assert abs(float(rows[-1].split(",")[2]) - math.log(2.0)) < 1e-9


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))

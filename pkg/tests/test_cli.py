import json
import math
from pathlib import Path

import pytest

from tools import cli
from tools.export import load_json, read_csv, write_json
from tools.spectra import DISTINCT, EQUAL

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_presets_lists_catalogue(capsys):
    assert cli.main(["presets"]) == cli.EXIT_OK
    catalogue = json.loads(capsys.readouterr().out)
    assert set(catalogue) == {"modular_torus", "perturbed_torus", "schottky"}
    assert catalogue["perturbed_torus"]["params"] == ["s"]


def test_spectrum_outputs(tmp_path, cache_dir):
    out = tmp_path / "torus"
    assert cli.main(["spectrum", "--depth", "6", "--out", str(out)]) == cli.EXIT_OK
    rows = read_csv(out / "length_spectrum.csv")
    assert float(rows[0]["length"]) == pytest.approx(2.0 * math.acosh(1.5), abs=1e-12)
    assert int(rows[0]["multiplicity"]) >= 2
    assert rows[0]["tol"] == "1e-09"
    manifest = load_json(out / "spectrum_manifest.json")
    assert set(manifest["outputs"]) == {"length_spectrum.csv", "length_spectrum.json"}
    assert (cache_dir / "ball_r2_d6.json").exists()


def test_rerun_is_byte_identical(tmp_path):
    for name in ("first", "second"):
        assert cli.main(["spectrum", "--preset", "perturbed_torus(0.1)", "--depth", "4", "--out", str(tmp_path / name)]) == 0
    for name in ("length_spectrum.csv", "length_spectrum.json"):
        assert (tmp_path / "first" / name).read_bytes() == (tmp_path / "second" / name).read_bytes()


def test_no_cache_writes_nothing(tmp_path, cache_dir):
    assert cli.main(["spectrum", "--depth", "3", "--no-cache", "--out", str(tmp_path)]) == 0
    assert not cache_dir.exists()


@pytest.mark.parametrize("argv", [
    ["spectrum", "--grid=0,-1,0.25"],
    ["spectrum", "--grid=0,1"],
    ["spectrum", "--depth", "0"],
    ["spectrum", "--preset", "no_such_group"],
    ["spectrum", "--config", "missing.json"],
    ["no-such-command"],
    ["spectrum", "--depth", "many"],
])
def test_config_errors_exit_2(tmp_path, argv):
    assert cli.main(argv + ["--out", str(tmp_path)] if argv[0] == "spectrum" else argv) == cli.EXIT_CONFIG


def test_depth_cap_exit_3(tmp_path):
    assert cli.main(["spectrum", "--depth", "13", "--out", str(tmp_path)]) == cli.EXIT_DEPTH_CAP


def test_sweep_without_crossing_exit_4(tmp_path):
    argv = ["twist-sweep", "--preset", "schottky", "--grid=-1,1,0.5", "--out", str(tmp_path)]
    assert cli.main(argv) == cli.EXIT_NO_CROSSING


def test_twist_sweep(tmp_path):
    argv = ["twist-sweep", "--config", str(CONFIGS / "modular_torus.json"), "--grid=-30,30,0.5", "--out", str(tmp_path)]
    assert cli.main(argv) == cli.EXIT_OK
    data = load_json(tmp_path / "twist_sweep.json")
    assert data["summary"]["full_range_pass"]
    assert data["summary"]["generic_pass"]
    assert data["summary"]["margin"] > 0.0
    assert data["curve"] == {"generator": "a", "incidence": {"b": 1}}
    assert len(data["separation"]["distances"]) == 121
    assert data["separation"]["increasing_tail"]
    assert data["separation"]["doubles"]
    assert data["summary"]["separation_pass"]
    assert len(data["differences"]) == 2
    pairs = {row["pair"] for row in read_csv(tmp_path / "twist_sweep.csv")}
    assert pairs == {"a b", "b ab", "b aB", "ab aB"}
    assert load_json(tmp_path / "twist_sweep_manifest.json")["summary"] == data["summary"]


@pytest.mark.parametrize(
    "distances, increasing, doubles",
    [
        ([9.0, 3.4, 13.4, 23.4, 33.4], True, True),
        ([9.0, 3.4, 4.0, 5.0, 6.0], True, False),
        ([9.0, 3.4, 13.4, 12.0, 33.4], False, True),
    ],
)
def test_separation_tail(distances, increasing, doubles):
    grid = [-10.0, 0.0, 10.0, 20.0, 30.0]
    assert cli._separation_tail(grid, distances) == {"increasing_tail": increasing, "doubles": doubles}


def test_isoaxial_verdicts(tmp_path):
    config = write_json(tmp_path / "iso.json", {
        "comparisons": [["self", ""], ["conjugate", "ab"], ["isometry", ""]],
        "depth1": 2,
    })
    assert cli.main(["isoaxial", "--config", str(config), "--out", str(tmp_path / "out")]) == 0
    rows = read_csv(tmp_path / "out" / "isoaxial.csv")
    assert [r["verdict"] for r in rows] == [EQUAL, EQUAL, DISTINCT]
    assert [c["kind"] for c in load_json(tmp_path / "out" / "isoaxial.json")["comparisons"]] == ["self", "conjugate", "isometry"]


def test_angles_with_companion(tmp_path):
    argv = [
        "angles", "--preset", "perturbed_torus(0.1)", "--companion", "modular_torus",
        "--depth", "2", "--conj-depth", "2", "--out", str(tmp_path),
    ]
    assert cli.main(argv) == 0
    blocks = load_json(tmp_path / "multiplicity.json")
    assert blocks["primary"]["label"] == "perturbed_torus"
    assert blocks["primary"]["generator_angle_multiplicity"] == 1
    assert blocks["companion"]["label"] == "modular_torus"
    assert blocks["companion"]["generator_angle_multiplicity"] >= 2
    conventions = load_json(tmp_path / "angle_spectrum.json")["conventions"]
    assert "(0, pi)" in conventions["angle"]
    summary = load_json(tmp_path / "angles_manifest.json")["summary"]
    assert set(summary) == {"primary", "companion"}


def test_collar_check(tmp_path):
    argv = ["collar-check", "--companion", "perturbed_torus(0.1)", "--depth", "2", "--conj-depth", "2", "--out", str(tmp_path)]
    assert cli.main(argv) == 0
    reports = load_json(tmp_path / "collar.json")["reports"]
    assert reports["modular_torus"]["holds"]
    assert reports["modular_torus"]["min_product"] == pytest.approx(1.25)
    assert reports["perturbed_torus"]["holds"]

import json
from pathlib import Path

import pytest

from config import DEFAULT_GRID
from tools.experiment import ConfigError, ExperimentConfig, RunManifest, load_config, verify_manifest
from tools.export import write_json
from tools.grp import INDEX_TWO_WORDS, DepthCap, UnknownPreset

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def test_defaults():
    config = load_config()
    assert config.preset == "modular_torus"
    assert config.grid == DEFAULT_GRID
    assert config.effective_conj_depth == config.depth
    assert config.effective_depth2 == 3 * config.depth1
    assert config.pairs == (("a", "b", ""),)


def test_overrides_skip_none():
    config = load_config(overrides={"depth": 5, "conj_depth": None, "grid": [-1, 1, 0.5], "seed": 3})
    assert config.depth == 5
    assert config.conj_depth is None
    assert config.grid == (-1.0, 1.0, 0.5)
    assert config.t_grid() == [-1.0, -0.5, 0.0, 0.5, 1.0]


@pytest.mark.parametrize("overrides", [
    {"bogus": 1},
    {"depth": 0},
    {"depth1": 0},
    {"conj_depth": 0},
    {"grid": [0, -1, 0.25]},
    {"grid": [0, 1, 0]},
    {"grid": [0, 1]},
    {"tol": 0.0},
    {"workers": 0},
    {"depth1": 3, "depth2": 2},
    {"comparisons": [["mirror", ""]]},
    {"pairs": [["a"]]},
    {"separation": ["a"]},
])
def test_config_errors(overrides):
    with pytest.raises(ConfigError):
        load_config(overrides=overrides)


@pytest.mark.parametrize("name", ["no_such_group", "modular_torus(", "perturbed_torus(x)"])
def test_unknown_preset(name):
    with pytest.raises(UnknownPreset):
        load_config(overrides={"preset": name})


def test_unknown_companion():
    with pytest.raises(UnknownPreset):
        load_config(overrides={"companion": "nope"})


def test_depth_cap():
    with pytest.raises(DepthCap):
        load_config(overrides={"depth": 13})
    assert load_config(overrides={"depth": 13, "unsafe_depth": True}).depth == 13


def test_digest_ignores_run_only_fields():
    base = load_config()
    moved = load_config(overrides={"output_dir": "elsewhere", "workers": 4, "use_cache": False})
    assert base.digest() == moved.digest()
    assert base.digest() != load_config(overrides={"seed": 1}).digest()
    assert base.meta()["config_digest"] == base.digest()
    assert set(base.tolerances()) == {"cluster", "axis_match", "classify", "endpoint", "point_key"}


def test_subgroup_words():
    config = ExperimentConfig()
    assert config.subgroup_words("") == INDEX_TWO_WORDS
    assert config.subgroup_words("a, bb ,ab") == ("a", "bb", "ab")


@pytest.mark.parametrize("name", ["modular_torus.json", "perturbed_pair.json", "schottky.json"])
def test_sample_configs_load(name):
    config = load_config(str(CONFIGS / name))
    assert config.rep().rank == 2
    assert all(len(p) == 3 for p in config.pairs)


def test_sample_config_contents():
    torus = load_config(str(CONFIGS / "modular_torus.json"))
    assert torus.separation == ("Bab", "baB")
    assert torus.differences[0] == (("a", "b", ""), ("a", "ab", ""))
    paired = load_config(str(CONFIGS / "perturbed_pair.json"))
    assert paired.rep().params == (("s", 0.1),)
    assert paired.companion_rep().label == "modular_torus"


def test_config_file_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    with pytest.raises(ConfigError):
        load_config(str(broken))


def test_file_then_overrides(tmp_path):
    path = write_json(tmp_path / "c.json", {"preset": "schottky", "depth": 2, "seed": 9})
    config = load_config(str(path), {"depth": 3})
    assert (config.preset, config.depth, config.seed) == ("schottky", 3, 9)


def test_manifest_records_and_verifies(tmp_path):
    config = load_config(overrides={"output_dir": str(tmp_path)})
    manifest = RunManifest.start("spectrum", config)
    with manifest.phase("write"):
        out = write_json(tmp_path / "result.json", {"x": 1})
    manifest.record(out)
    manifest.summary = {"ok": True}
    path = manifest.write(tmp_path)
    assert path.name == "spectrum_manifest.json"
    data = json.loads(path.read_text())
    assert data["config_digest"] == config.digest()
    assert data["summary"] == {"ok": True}
    assert "write" in data["timings"] and data["wall_clock"] >= 0.0
    assert verify_manifest(path) == []
    out.write_text("{}\n")
    assert verify_manifest(path) == ["result.json"]

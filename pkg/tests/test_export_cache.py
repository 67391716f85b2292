import json
import math

from config import CACHE_FORMAT_VERSION
from tools import cache
from tools.export import config_digest, file_digest, jsonable, load_json, read_csv, write_csv, write_json
from tools.grp import enumerate_ball
from tools.spectra import axes_set


def test_write_csv_appends_digest_and_tol(tmp_path):
    path = write_csv(tmp_path / "out" / "rows.csv", ("length", "witnesses"), [(1.5, "a b"), (2.0, None)], "abc123", 1e-9)
    raw = path.read_bytes()
    assert raw.startswith(b"length,witnesses,config_digest,tol\r\n")
    assert raw.count(b"\r\n") == 3
    rows = read_csv(path)
    assert rows[0] == {"length": "1.5", "witnesses": "a b", "config_digest": "abc123", "tol": "1e-09"}
    assert rows[1]["witnesses"] == ""


def test_floats_written_by_repr(tmp_path):
    x = 2.0 * math.acosh(1.5)
    path = write_csv(tmp_path / "x.csv", ("length",), [(x,)], "d", 1e-9)
    assert float(read_csv(path)[0]["length"]) == x


def test_jsonable():
    assert jsonable({"a": (1.0, math.inf, -math.inf), 2: [float("nan")]}) == {"a": [1.0, "inf", "-inf"], "2": ["nan"]}


def test_config_digest_ignores_key_order():
    assert config_digest({"a": 1, "b": [1, 2]}) == config_digest({"b": [1, 2], "a": 1})
    assert config_digest({"a": 1}) != config_digest({"a": 2})
    assert len(config_digest({})) == 16


def test_write_json_is_stable(tmp_path):
    first = write_json(tmp_path / "a.json", {"b": 1, "a": (math.inf,)})
    second = write_json(tmp_path / "b.json", {"a": [math.inf], "b": 1})
    text = first.read_text()
    assert text.endswith("}\n")
    assert text.index('"a"') < text.index('"b"')
    assert file_digest(first) == file_digest(second)
    assert load_json(first) == {"a": ["inf"], "b": 1}


def test_cache_root_follows_env(cache_dir, tmp_path):
    assert cache.cache_root() == cache_dir
    assert cache.cache_root(str(tmp_path / "x")) == tmp_path / "x"


def test_cached_ball_round_trip(cache_dir):
    ball = cache.cached_ball(2)
    path = cache_dir / "ball_r2_d2.json"
    assert path.exists()
    assert len(ball) == 17
    assert cache.load_ball(2) == ball
    assert cache.load_ball(3) is None


def test_stale_ball_is_rebuilt(cache_dir):
    path = cache_dir / "ball_r2_d2.json"
    path.parent.mkdir(parents=True)
    path.write_text(json.dumps({"format": CACHE_FORMAT_VERSION + 1, "kind": "ball", "rank": 2, "depth": 2, "words": []}))
    assert cache.load_ball(2) is None
    ball = cache.cached_ball(2)
    assert ball == enumerate_ball(2)
    assert load_json(path)["format"] == CACHE_FORMAT_VERSION


def test_truncated_ball_is_a_miss(cache_dir):
    cache.cached_ball(2)
    path = cache_dir / "ball_r2_d2.json"
    data = load_json(path)
    data["words"] = data["words"][:-1]
    write_json(path, data)
    assert cache.load_ball(2) is None


def test_cached_axes_set_round_trip(cache_dir, torus):
    built = cache.cached_axes_set(torus, 2)
    files = list(cache_dir.glob("axes_*_d2.json"))
    assert len(files) == 1
    loaded = cache.cached_axes_set(torus, 2)
    assert loaded == built == axes_set(torus, 2)


def test_axes_cache_keyed_by_matrices(cache_dir, torus, perturbed):
    assert cache.rep_key(torus) != cache.rep_key(perturbed)
    cache.cached_axes_set(torus, 2)
    cache.cached_axes_set(perturbed, 2)
    assert len(list(cache_dir.glob("axes_*_d2.json"))) == 2

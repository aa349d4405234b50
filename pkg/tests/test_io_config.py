import numpy as np
import pytest

from frontgate import config as cfg
from frontgate.errors import ConfigError
from frontgate.io import config_hash, read_csv, read_pgm, write_csv, write_json, write_pgm


def test_csv_round_trip_is_lossless(tmp_path):
    vals = np.array([np.pi, 1 / 3, 1e-300, -2.5e17])
    path = write_csv(tmp_path / "a.csv", ["a", "b"], [vals, vals[::-1]])
    header, data = read_csv(path)
    assert header == ["a", "b"]
    assert np.array_equal(data[:, 0], vals)
    assert path.read_text().splitlines()[1].startswith("3.1415926535897931,")


def test_pgm_round_trip(tmp_path):
    vals = np.array([[0.0, 0.5, 1.0], [1.2, -1.0, 0.25]])
    pix, comment = read_pgm(write_pgm(tmp_path / "a.pgm", vals, "hi"))
    assert comment == "hi"
    assert pix.tolist() == [[0, 128, 255], [255, 0, 64]]
    assert (tmp_path / "a.pgm").read_bytes().startswith(b"P5\n# hi\n3 2\n255\n")


def test_json_and_hash_are_deterministic(tmp_path):
    a = write_json(tmp_path / "a.json", {"b": 1, "a": np.float64(0.1)}).read_text()
    b = write_json(tmp_path / "b.json", {"a": 0.1, "b": 1}).read_text()
    assert a == b
    assert config_hash({"x": 1, "y": [1, 2]}) == config_hash({"y": [1, 2], "x": 1})
    assert config_hash({"x": 1}) != config_hash({"x": 2})


def test_validate_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="bogus"):
        cfg.validate("speed", {"model": {"kind": "cubic", "theta": 0.25}, "bogus": 1})
    with pytest.raises(ConfigError):
        cfg.validate("speed", {"model": {"kind": "cubic", "theta": 0.25, "s_f": 0.1}})
    with pytest.raises(ConfigError):
        cfg.validate("barrier", {"model": {"kind": "cubic", "theta": 0.25}, "C": 1})
    with pytest.raises(ConfigError):
        cfg.validate("nope", {})


def test_builders():
    m = cfg.build_model({"kind": "wolbachia", "sigmaFu": 1.0, "eps": 0.1, "d_s": 2.0})
    assert m.params["d_s"] == 2.0
    with pytest.raises(ConfigError):
        cfg.build_model({"kind": "cubic", "theta": 1.5})
    with pytest.raises(ConfigError):
        cfg.build_model({"kind": "wolbachia", "s_h": 0.1, "delta": 3.0})
    law = cfg.build_law({"kind": "wolbachia", "eps": 0.2})
    assert law.h2_integral == pytest.approx(1.0, abs=1e-12)
    assert cfg.build_law(None).name == "constant"
    g = cfg.build_grid({"dx": 0.05})
    assert g.n == 801
    eta = cfg.build_gradient({"kind": "parabolic", "C": 0.5, "L": 6, "sign": -1})
    assert eta(0.0) == -2.0
    with pytest.raises(ConfigError):
        cfg.build_gradient({"kind": "interval_constant", "C": 1})
    init = cfg.build_init({"kind": "propagule", "alpha": 0.8},
                          cfg.build_model({"kind": "cubic", "theta": 0.25}))
    assert init(g).max() == pytest.approx(0.8, abs=1e-6)

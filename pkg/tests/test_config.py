import json

import pytest

from netperturb.config import RunConfig, load_config, validate_config
from netperturb.errors import ConfigError


def test_paper_defaults():
    cfg = validate_config("model = er\nexperiment = size\n")
    assert cfg.models == ("ER",) and cfg.experiments == ("SIZE",)
    assert cfg.sizes == (16, 25, 36, 49, 64, 81, 100)
    assert cfg.q_for("SIZE") == 1000 and cfg.q_for("REMOVAL") == 50
    assert cfg.avg_degree == 5.7 and cfg.n == 100 and cfg.steps == 100
    assert cfg.stride_for("REMOVAL") == 1


def test_desk_profile():
    cfg = validate_config('profile = "desk"')
    assert cfg.q_for("SIZE") == 50 and cfg.stride_for("REWIRING") == 5
    assert cfg.stride_for("SIZE") == 1
    assert cfg.cells()[0] == ("ER", "SIZE") and len(cfg.cells()) == 9


def test_toml_and_bare_values():
    cfg = validate_config('models = ["BA", "geo"]\nexperiments = removal, rewiring\n'
                          "seed = 42  # comment\nstride = 10\nrealizations = 7\n"
                          "access_mode = ring\nlinkage = complete\n")
    assert cfg.models == ("BA", "GEO") and cfg.experiments == ("REMOVAL", "REWIRING")
    assert cfg.seed == 42 and cfg.stride == 10 and cfg.ring_only
    ec = cfg.experiment_config("GEO", "REWIRING")
    assert ec.realizations == 7 and ec.stride == 10 and ec.ring_only


def test_geo_size_not_square():
    with pytest.raises(ConfigError, match="not a perfect square"):
        validate_config("model = GEO\nexperiment = SIZE\nsizes = [16, 20]")


def test_zero_realizations():
    with pytest.raises(ConfigError, match="realizations"):
        validate_config("Q = 0")


def test_all_errors_reported():
    text = 'model = GEO\nsizes = [16, 20]\nQ = 0\nbogus = 1\nn = "x"\nlinkage = ward\n[table]\n'
    with pytest.raises(ConfigError) as info:
        validate_config(text)
    errs = info.value.errors
    assert len(errs) == 6
    for frag in ("tables", "unknown key 'bogus'", "n: expected an integer", "linkage",
                 "realizations", "not a perfect square"):
        assert any(frag in e for e in errs), frag


def test_type_mismatches():
    with pytest.raises(ConfigError) as info:
        validate_config("avg_degree = fast\nring_only = 3\nsizes = [1.5]\nmodel = WS")
    assert len(info.value.errors) == 4


def test_hash_is_stable_and_sensitive():
    a = validate_config("seed = 1")
    assert a.config_hash() == validate_config("seed = 1\n# c").config_hash()
    assert a.config_hash() != validate_config("seed = 2").config_hash()
    assert len(a.config_hash()) == 64


def test_round_trip_through_toml_and_meta(tmp_path):
    cfg = validate_config("profile = desk\nseed = 9\nmodels = BA\ninitial = shared\nD = 3")
    again = validate_config(cfg.to_toml())
    assert again == cfg
    meta = tmp_path / "meta.json"
    meta.write_text(json.dumps({"config": cfg.to_dict()}))
    assert load_config(meta) == cfg


def test_defaults_match_dataclass():
    assert validate_config("") == RunConfig()

import pytest

from anisohardy.config import SUITES, config_from_mapping, default_config, load_config
from anisohardy.errors import ConfigError


def _write(tmp_path, text):
    p = tmp_path / "cfg.yaml"
    p.write_text(text)
    return p


def test_defaults():
    cfg = default_config()
    assert cfg.suites == SUITES
    assert cfg.N == (2, 3) and cfg.p == (1.0, 1.5, 2.0, 4.0)
    assert cfg.gauge_for(3).dim == 3


def test_flags_override_file(tmp_path):
    p = _write(tmp_path, "suite: critical\nseed: 3\noutput:\n  dir: here\n")
    cfg = load_config(p, {"suite": "identities", "seed": None, "dir": "there"})
    assert cfg.suite == "identities" and cfg.seed == 3 and cfg.out_dir == "there"
    assert cfg.suites == ("identities",)


def test_hash_semantics():
    base = default_config().hash
    assert config_from_mapping({"params": {"R": 1}}).hash == base
    assert default_config(dir="elsewhere", plots=True).hash == base
    assert default_config(seed=1).hash != base


@pytest.mark.parametrize("text, line, fragment", [
    ("suite: all\nparams:\n  N: [2]\n  pp: 2\n", 4, "params.pp"),
    ("suite: nope\n", 1, "suite"),
    ("params:\n  p: [2, 0.5]\n", 2, "params.p"),
    ("gauge:\n  family: lq\n  q: 0.5\n", None, "gauge"),
    ("params:\n  weighted_alphas: [-5]\n", 2, "weighted_alphas"),
    ("seed: [1\n", None, "YAML syntax error"),
])
def test_errors_name_field_and_line(tmp_path, text, line, fragment):
    p = _write(tmp_path, text)
    with pytest.raises(ConfigError) as exc:
        load_config(p)
    msg = str(exc.value)
    assert fragment in msg
    if line is not None:
        assert f"cfg.yaml:{line}:" in msg


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "absent.yaml")


def test_gauge_dimension_mismatch():
    with pytest.raises(ConfigError):
        config_from_mapping({"gauge": {"family": "ellipsoidal", "matrix": [[4, 0], [0, 1]]}})


def test_ellipsoidal_two_dimensional_config():
    cfg = config_from_mapping({
        "gauge": {"family": "ellipsoidal", "matrix": [[4, 0], [0, 1]]},
        "params": {"N": [2], "bridge_pairs": [[3, 2]],
                   "alphas": {"subcritical": [0.1, 0.2, 0.3]},
                   "sharpness": {"subcritical": {"N": 2, "p": 1.5}, "critical": {"N": 2},
                                 "halfspace": {"N": 2, "p": 2}}},
    })
    assert cfg.gauge_for(2).value([1.0, 0.0]) == pytest.approx(2.0)


def test_alpha_error_quotes_critical_exponent():
    with pytest.raises(ConfigError, match="critical exponent"):
        config_from_mapping({"params": {"alphas": {"subcritical": [0.6, 0.7]}}})

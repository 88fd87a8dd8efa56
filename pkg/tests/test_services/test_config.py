import pytest

from wavetails.models.config import SimulationConfig
from wavetails.services.config import (
    ConfigError,
    get_table_lines,
    load_config,
    parse_config,
)

MINIMAL = """\
schema_version = 1

[dimension]
l = 1

[[terms]]
p = 3

[[bumps]]
amplitude = 1.0
center = 0.0
half_width = 1.0
smoothness = 8

[grid]
dr = 0.05
r_out = 10.0
t_max = 6.0

[run]
epsilons = [0.05, 0.1]
observers = [1.0]
"""


def test_parse_config():
    config = parse_config(MINIMAL)

    assert isinstance(config, SimulationConfig)
    assert config.l == 1
    assert config.terms[0].p == 3
    assert config.terms[0].c == 1.0
    assert config.grid.cfl == 0.25
    assert config.epsilons == (0.05, 0.1)
    assert config.isolate == "odd"
    assert config.fit.tol_gamma == 0.02


def test_parse_config_free_evolution():
    text = MINIMAL.replace("[[terms]]\np = 3\n", "")

    assert parse_config(text).terms == ()


def test_get_table_lines():
    lines = get_table_lines(MINIMAL + "\n[[terms]]\np = 2\n")

    assert lines["dimension"] == [3]
    assert lines["terms"] == [6, 24]
    assert lines["grid"] == [15]


def test_parse_config_rejects_three_dimensions():
    with pytest.raises(ConfigError, match="line 3: .*l >= 1") as error:
        parse_config(MINIMAL.replace("l = 1", "l = 0"))

    assert error.value.line == 3


def test_parse_config_rejects_linear_terms():
    with pytest.raises(ConfigError, match="line 6: .*p \\+ q") as error:
        parse_config(MINIMAL.replace("p = 3", "p = 1"))

    assert error.value.line == 6


def test_parse_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown key"):
        parse_config(MINIMAL.replace("t_max = 6.0", "t_max = 6.0\nsteps = 3"))


def test_parse_config_rejects_missing_keys():
    with pytest.raises(ConfigError, match="missing key 'smoothness'"):
        parse_config(MINIMAL.replace("smoothness = 8\n", ""))

    with pytest.raises(ConfigError, match="missing key 'dr'"):
        parse_config(MINIMAL.replace("dr = 0.05\n", ""))


def test_parse_config_rejects_unstable_steps():
    text = MINIMAL.replace("t_max = 6.0", "t_max = 6.0\ncfl = 0.6")

    with pytest.raises(ConfigError, match="line 15: .*stable limit") as error:
        parse_config(text)

    assert error.value.line == 15


def test_parse_config_reads_fit_tolerances():
    config = parse_config(MINIMAL + "\n[fit]\ntol_eps = 0.05\n")

    assert config.fit.tol_eps == pytest.approx(0.05)


def test_parse_config_rejects_rough_profiles():
    with pytest.raises(ConfigError, match="too low"):
        parse_config(MINIMAL.replace("smoothness = 8", "smoothness = 3"))


def test_parse_config_rejects_wrong_types():
    with pytest.raises(ConfigError, match="line 6: .*integers"):
        parse_config(MINIMAL.replace("p = 3", 'p = "three"'))

    text = MINIMAL.replace("dr = 0.05\nr_out = 10.0\nt_max = 6.0\n", "")
    text = text.replace("[grid]\n", "").replace(
        "schema_version = 1", "schema_version = 1\ngrid = 1"
    )
    with pytest.raises(ConfigError, match="must be a table"):
        parse_config(text)


def test_parse_config_rejects_invalid_toml():
    with pytest.raises(ConfigError, match="invalid TOML"):
        parse_config(MINIMAL.replace("l = 1", "l = "))


def test_parse_config_rejects_other_schema_versions():
    with pytest.raises(ConfigError, match="schema_version"):
        parse_config(
            MINIMAL.replace("schema_version = 1", "schema_version = 2")
        )


def test_load_config(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text(MINIMAL, encoding="utf-8")

    assert load_config(path).config_hash == parse_config(MINIMAL).config_hash

    with pytest.raises(ConfigError, match="cannot read"):
        load_config(tmp_path / "missing.toml")


def test_reference_configurations_load(configs_directory):
    paths = sorted(configs_directory.glob("*.toml"))

    assert paths
    for path in paths:
        config = load_config(path)
        assert config.grid.r_out >= (
            max(config.observers)
            + config.grid.t_max
            + config.generating.radius
        )

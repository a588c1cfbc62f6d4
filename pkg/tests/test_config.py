import pytest

from irsmatch.config import (
    DEFAULT_NOISE_POWER_DB,
    PRESETS,
    ConfigError,
    ScenarioConfig,
    coerce,
    load_config,
    parse_config_text,
)


def test_defaults():
    cfg = ScenarioConfig()
    assert (cfg.k_users, cfg.l_irs, cfg.m_antennas, cfg.n_elements, cfg.b_bits) == (4, 4, 4, 16, 2)
    assert cfg.noise_power_db == DEFAULT_NOISE_POWER_DB
    assert cfg.fading.zeta ** 2 == pytest.approx(10.0)
    assert cfg.fading.c_nu == pytest.approx(1e-3)
    assert cfg.budget().per_user_power.sum() == pytest.approx(10.0)


@pytest.mark.parametrize("changes", [
    {"k_users": 3},
    {"m_antennas": 2},
    {"trials": 0},
    {"b_bits": 0},
    {"d_r": 1.0},
    {"algorithms": ("proposed", "magic")},
    {"algorithms": ()},
])
def test_invalid_configs(changes):
    with pytest.raises(ConfigError):
        ScenarioConfig().replace(**changes)


def test_parse_text():
    text = """
    # comment line
    k_users = 3
    l_irs = 3
    noise_power_db = -95.5   # inline comment
    trials: 12
    algorithms = proposed, random
    """
    cfg = parse_config_text("\n".join(line.strip() for line in text.splitlines()))
    assert (cfg.k_users, cfg.l_irs, cfg.trials) == (3, 3, 12)
    assert cfg.noise_power_db == -95.5
    assert cfg.algorithms == ("proposed", "random")
    assert cfg.n_elements == 16  # untouched default


def test_parse_uses_base():
    cfg = parse_config_text("trials = 3\n", PRESETS["table1"])
    assert cfg.n_elements == 50 and cfg.trials == 3


@pytest.mark.parametrize("text", ["bogus = 1\n", "k_users = four\n", "trials = 2.5\n", "just words\n"])
def test_parse_errors(text):
    with pytest.raises(ConfigError):
        parse_config_text(text)


def test_coerce():
    assert coerce("trials", "10") == 10
    assert coerce("trials", "1e2") == 100
    assert coerce("d_r", "75") == 75.0
    assert coerce("algorithms", " a , b,") == ("a", "b")


def test_round_trip_text(tmp_path):
    cfg = PRESETS["fig5"].replace(seed=5, algorithms=("proposed", "exhaustive"))
    p = tmp_path / "c.cfg"
    p.write_text(cfg.to_text(), encoding="utf-8")
    assert load_config(p) == cfg


def test_load_missing(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")


def test_presets_valid():
    assert set(PRESETS) >= {"desk", "fig2", "fig3", "table1", "fig5"}
    t = PRESETS["table1"]
    assert (t.k_users, t.m_antennas, t.n_elements, t.total_power_db) == (8, 8, 50, 9.0)

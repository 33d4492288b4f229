import math
from dataclasses import replace

import pytest

from lisim import ConfigError, SystemParams, derive_gains, load_config
from lisim.params import parse_overrides


def test_derive_gains_baseline_values():
    g = derive_gains(SystemParams())
    # frozen from direct evaluation of the path-loss model at the default
    # geometry (mpmath cross-check)
    assert g.beta_d == pytest.approx(5.976826151554656e-10, rel=1e-12)
    assert g.beta_l == pytest.approx(1.6e-11, rel=1e-12)
    assert g.gamma_bar == pytest.approx(1e11, rel=1e-12)
    assert g.gamma_tr == pytest.approx(1e11, rel=1e-12)


def test_power_scale_consistency():
    base = derive_gains(SystemParams())
    up = derive_gains(SystemParams(p_data_dbw=10.0))
    assert up.gamma_bar == pytest.approx(10.0 * base.gamma_bar, rel=1e-12)
    assert up.gamma_tr == base.gamma_tr


def test_derive_gains_deterministic():
    p = SystemParams(p_data_dbw=3.3, d3_m=47.0)
    assert derive_gains(p) == derive_gains(p)


def test_defaults_match_baseline_scenario():
    p = SystemParams()
    assert p.p_data_dbw == 0.0
    assert p.t_c == 196
    assert (p.d1_m, p.d2_m, p.d3_m) == (50.0, 5.0, 60.0)
    assert (p.alpha_direct, p.alpha_cascade) == (3.5, 2.0)
    assert p.c0_db == -30.0
    assert (p.m1, p.m2, p.m3) == (0.5, 0.5, 0.5)
    assert p.noise_dbm == -80.0


@pytest.mark.parametrize("field,value", [
    ("m1", 0.3),
    ("m3", 0.49),
    ("t_c", 2),
    ("d2_m", 0.0),
    ("d1_m", -4.0),
    ("n_trials", 0),
    ("seed", -1),
    ("alpha_direct", 0.0),
])
def test_invariant_violations_name_the_field(field, value):
    with pytest.raises(ConfigError, match=field):
        SystemParams(**{field: value})


def test_nonfinite_power_rejected():
    with pytest.raises(ConfigError, match="p_data_dbw"):
        SystemParams(p_data_dbw=math.inf)


def test_load_config_empty_gives_defaults(tmp_path):
    cfg = tmp_path / "empty.cfg"
    cfg.write_text("")
    assert load_config(cfg) == SystemParams()


def test_load_config_values_and_comments(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(
        "# long-coherence setup\n"
        "t_c = 2000\n"
        "p_data_dbw = 10   # dBW\n"
        "\n"
        "m1 = 1.0\n")
    p = load_config(cfg)
    assert p == replace(SystemParams(), t_c=2000, p_data_dbw=10.0, m1=1.0)


def test_load_config_rejects_bad_m(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("m1 = 0.3\n")
    with pytest.raises(ConfigError, match="m1"):
        load_config(cfg)


def test_load_config_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "typo.cfg"
    cfg.write_text("m_one = 1.0\n")
    with pytest.raises(ConfigError, match="m_one"):
        load_config(cfg)


def test_load_config_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        load_config("/nonexistent/path.cfg")


def test_overrides_win_over_file(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("t_c = 500\nseed = 7\n")
    p = load_config(cfg, parse_overrides(["t_c=900"]))
    assert p.t_c == 900
    assert p.seed == 7


def test_parse_overrides_type_coercion():
    out = parse_overrides(["t_c=250", "m2=2", "p_data_dbw=-5"])
    assert out == {"t_c": 250, "m2": 2.0, "p_data_dbw": -5.0}
    assert isinstance(out["t_c"], int)
    with pytest.raises(ConfigError, match="nope"):
        parse_overrides(["nope=1"])
    with pytest.raises(ConfigError, match="t_c"):
        parse_overrides(["t_c=many"])

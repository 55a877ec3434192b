import json
from pathlib import Path

import pytest

from gearfwm.config import GearConfig, RenderConfig, load_config, resolve_out_dir
from gearfwm.errors import ConfigError
from gearfwm.fwm_process import DetectMode
from gearfwm.runconfig import build_run_config, read_run_document


@pytest.fixture
def script(tmp_path, monkeypatch):
    monkeypatch.delenv("GEARFWM_CONFIG", raising=False)
    return tmp_path / "gear.py"


def test_defaults_without_any_file(script):
    cfg, cfg_dir = load_config(script)
    assert cfg == GearConfig()
    assert cfg_dir == script.parent.resolve()
    assert cfg.render.sampling == "pixel"
    assert cfg.fit.tolerance == 1e-6


def test_local_config_file(script):
    (script.parent / "config.toml").write_text(
        '[gearfwm]\nout_dir = "runs"\n[render]\nn = 256\nsampling = "polar"\n'
        "[fit]\ntolerance = 1e-4\n[sweep]\nworkers = 0\n[log]\nlevel = \"debug\"\n",
        encoding="utf-8",
    )
    cfg, cfg_dir = load_config(script)
    assert cfg.render.n == 256
    assert cfg.render.sampling == "polar"
    assert cfg.render.extent == 2.5
    assert cfg.fit.tolerance == 1e-4
    assert cfg.sweep.workers == 1
    assert cfg.log.level == "DEBUG"
    assert resolve_out_dir(cfg, config_dir=cfg_dir) == cfg_dir / "runs"


def test_env_config_file(script, tmp_path, monkeypatch):
    elsewhere = tmp_path / "etc"
    elsewhere.mkdir()
    (elsewhere / "gear.toml").write_text('[gearfwm]\nout_dir = "o"\n[render]\nbins = 1440\n', encoding="utf-8")
    monkeypatch.setenv("GEARFWM_CONFIG", str(elsewhere / "gear.toml"))
    cfg, cfg_dir = load_config(script)
    assert cfg.render.bins == 1440
    assert cfg_dir == elsewhere.resolve()
    assert resolve_out_dir(cfg, config_dir=cfg_dir) == elsewhere.resolve() / "o"


def test_env_config_missing(script, monkeypatch):
    monkeypatch.setenv("GEARFWM_CONFIG", str(script.parent / "missing.toml"))
    with pytest.raises(ConfigError, match="missing file"):
        load_config(script)


def test_bad_value_names_the_key(script):
    (script.parent / "config.toml").write_text('[render]\nn = "big"\n', encoding="utf-8")
    with pytest.raises(ConfigError, match=r"\[render\]\.n"):
        load_config(script)


def test_bad_choice(script):
    (script.parent / "config.toml").write_text('[render]\nsampling = "spiral"\n', encoding="utf-8")
    with pytest.raises(ConfigError, match="sampling"):
        load_config(script)


def test_broken_toml(script):
    (script.parent / "config.toml").write_text("[render\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        load_config(script)


def test_absolute_out_dir_with_env_var(script, tmp_path, monkeypatch):
    monkeypatch.setenv("GEARFWM_TEST_ROOT", str(tmp_path))
    (script.parent / "config.toml").write_text('[gearfwm]\nout_dir = "$GEARFWM_TEST_ROOT/x"\n', encoding="utf-8")
    cfg, cfg_dir = load_config(script)
    assert resolve_out_dir(cfg, config_dir=cfg_dir) == tmp_path / "x"


def test_default_out_dir_is_under_cwd(script, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    cfg, cfg_dir = load_config(script)
    assert resolve_out_dir(cfg, config_dir=cfg_dir) == Path.cwd() / "gearfwm-out"


def write_doc(tmp_path, doc):
    path = tmp_path / "run.json"
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


def test_run_document_round_trip(tmp_path):
    doc = {
        "l": 20,
        "theta0_deg": 5,
        "theta_deg": 45,
        "beta": 2.1,
        "detect_mode": "full",
        "grid": {"n": 256, "extent": 3.0},
        "annulus": {"r_inner": 1.2, "r_outer": 1.8},
    }
    run = build_run_config(read_run_document(write_doc(tmp_path, doc)), render=RenderConfig())
    assert run.l == 20
    assert run.theta_deg == 45.0
    assert run.detect_mode is DetectMode.FULL
    assert run.grid_n == 256
    assert run.grid().extent == 3.0
    assert run.annulus.r_outer == 1.8
    assert run.prep().delta == pytest.approx(run.theta - run.theta0)


def test_flags_override_document():
    run = build_run_config(
        {"l": 2, "theta_deg": 10},
        render=RenderConfig(n=128),
        overrides={"l": 5, "theta_deg": None, "beta": 1.5},
    )
    assert run.l == 5
    assert run.theta_deg == 10.0
    assert run.beta == 1.5
    assert run.grid_n == 128


def test_l_is_required():
    with pytest.raises(ConfigError, match="'l'"):
        build_run_config({}, render=RenderConfig())


@pytest.mark.parametrize(
    "doc,field",
    [
        ({"l": 2.5}, "'l'"),
        ({"l": True}, "'l'"),
        ({"l": 0}, "'l'"),
        ({"l": 2, "theta_deg": float("nan")}, "'theta_deg'"),
        ({"l": 2, "beta": float("inf")}, "'beta'"),
        ({"l": 2, "beta": -1}, "'beta'"),
        ({"l": 2, "detect_mode": "both"}, "'detect_mode'"),
        ({"l": 2, "grid": {"n": "x"}}, "'grid.n'"),
        ({"l": 2, "annulus": {"r_inner": 2.0, "r_outer": 1.0}}, "'annulus'"),
        ({"l": 2, "annulus": {"r_inner": 1.0}}, "'annulus.r_outer'"),
        ({"l": 2, "colour": "red"}, "colour"),
    ],
)
def test_bad_fields_are_named(doc, field):
    with pytest.raises(ConfigError, match=field):
        build_run_config(doc, render=RenderConfig())


def test_malformed_json_reports_position(tmp_path):
    path = tmp_path / "run.json"
    path.write_text('{"l": 2,\n "beta": }', encoding="utf-8")
    with pytest.raises(ConfigError, match=r"run\.json:2:"):
        read_run_document(path)


def test_json_must_be_object(tmp_path):
    path = tmp_path / "run.json"
    path.write_text("[1, 2]", encoding="utf-8")
    with pytest.raises(ConfigError, match="JSON object"):
        read_run_document(path)

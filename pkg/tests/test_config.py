from __future__ import annotations

import pytest

import relkit.config as config_mod
from relkit.config import DEFAULT_LIMITS, Limits, load_limits
from relkit.services.exceptions import ConfigError


class TestResolveDir:
    def test_from_env_var(self, monkeypatch, tmp_path):
        monkeypatch.setenv("RELKIT_CONFIG_DIR", str(tmp_path))
        result = config_mod._resolve_dir("RELKIT_CONFIG_DIR", "config", kind="config")
        assert result == tmp_path

    def test_project_root_fallback(self, monkeypatch, tmp_path):
        monkeypatch.delenv("RELKIT_CONFIG_DIR", raising=False)
        fake_root = tmp_path / "src" / "relkit"
        fake_root.mkdir(parents=True)
        config_dir = tmp_path / "config"
        config_dir.mkdir()

        monkeypatch.setattr(config_mod, "__file__", str(fake_root / "config.py"))
        result = config_mod._resolve_dir("RELKIT_CONFIG_DIR", "config", kind="config")
        assert result == config_dir

    def test_platformdirs_fallback_config(self, monkeypatch, tmp_path):
        monkeypatch.delenv("RELKIT_CONFIG_DIR", raising=False)
        fake = tmp_path / "nowhere" / "src" / "relkit"
        fake.mkdir(parents=True)
        monkeypatch.setattr(config_mod, "__file__", str(fake / "config.py"))
        result = config_mod._resolve_dir("RELKIT_CONFIG_DIR", "config", kind="config")
        assert "relkit" in str(result)

    def test_platformdirs_fallback_cache(self, monkeypatch, tmp_path):
        monkeypatch.delenv("RELKIT_CACHE_DIR", raising=False)
        fake = tmp_path / "nowhere" / "src" / "relkit"
        fake.mkdir(parents=True)
        monkeypatch.setattr(config_mod, "__file__", str(fake / "config.py"))
        result = config_mod._resolve_dir("RELKIT_CACHE_DIR", ".cache", kind="cache")
        assert "relkit" in str(result)

    def test_cache_dir_follows_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv("RELKIT_CACHE_DIR", str(tmp_path / "c"))
        assert config_mod.get_cache_dir() == tmp_path / "c"


def _write_config(text: str):
    path = config_mod.get_config_dir() / config_mod.CONFIG_FILE
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


class TestLoadLimits:
    def test_defaults(self):
        assert load_limits() == DEFAULT_LIMITS

    def test_file_values(self):
        _write_config("limits:\n  threads: 4\n  persistent_cache: yes\n")
        limits = load_limits()
        assert limits.threads == 4
        assert limits.persistent_cache is True

    def test_env_overrides_file(self, monkeypatch):
        _write_config("limits:\n  threads: 4\n")
        monkeypatch.setenv("RELKIT_THREADS", "2")
        assert load_limits().threads == 2

    def test_overrides_win(self, monkeypatch):
        monkeypatch.setenv("RELKIT_CENSUS_WORK_CAP", "100")
        limits = load_limits({"census_work_cap": 50, "threads": None})
        assert limits.census_work_cap == 50
        assert limits.threads == 1

    def test_boolean_env(self, monkeypatch):
        monkeypatch.setenv("RELKIT_CACHE", "off")
        assert load_limits().persistent_cache is False

    def test_unknown_file_key(self):
        _write_config("limits:\n  speed: 3\n")
        with pytest.raises(ConfigError, match="unknown limit"):
            load_limits()

    def test_unknown_override(self):
        with pytest.raises(ConfigError):
            load_limits({"speed": 3})

    @pytest.mark.parametrize("value", ["abc", "0", "-4"])
    def test_bad_integer(self, monkeypatch, value):
        monkeypatch.setenv("RELKIT_THREADS", value)
        with pytest.raises(ConfigError, match="RELKIT_THREADS"):
            load_limits()

    def test_bad_boolean(self, monkeypatch):
        monkeypatch.setenv("RELKIT_CACHE", "maybe")
        with pytest.raises(ConfigError, match="boolean"):
            load_limits()

    def test_invalid_yaml(self):
        _write_config("limits: [unclosed\n")
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_limits()

    def test_limits_must_be_mapping(self):
        _write_config("limits:\n  - 1\n")
        with pytest.raises(ConfigError, match="mapping"):
            load_limits()

    def test_to_dict(self):
        assert Limits(threads=3).to_dict()["threads"] == 3


def test_write_config_template(tmp_path):
    dest = config_mod.write_config_template(tmp_path / "a" / "relkit.yaml", "limits: {}\n")
    assert dest.read_text() == "limits: {}\n"
    assert not dest.with_suffix(".tmp").exists()

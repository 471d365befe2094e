from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any

import platformdirs
import yaml
from dotenv import load_dotenv

from relkit.services.exceptions import ConfigError

APP_NAME = "relkit"
CONFIG_FILE = "relkit.yaml"


def _resolve_config_dir_for_dotenv() -> Path | None:
    """Resolve config dir for .env loading without depending on env vars from .env itself.

    Only checks sources available before .env is loaded (shell env var, dev layout,
    an existing platformdirs directory).
    """
    from_env = os.environ.get("RELKIT_CONFIG_DIR")
    if from_env:
        return Path(from_env)
    project_root = Path(__file__).resolve().parent.parent.parent
    candidate = project_root / "config"
    if candidate.is_dir():
        return candidate
    pd = Path(platformdirs.user_config_dir(APP_NAME))
    if pd.is_dir():
        return pd
    return None


# Load .env: cwd first (highest priority), then config dir (won't override)
load_dotenv()
_cfg_dir = _resolve_config_dir_for_dotenv()
if _cfg_dir is not None:
    load_dotenv(_cfg_dir / ".env")


def _resolve_dir(env_var: str, default_subdir: str, kind: str) -> Path:
    """Resolve a directory from env var, repo layout, or platform default.

    Priority: 1) env var, 2) dev repo layout, 3) platformdirs user directory.
    """
    from_env = os.environ.get(env_var)
    if from_env:
        return Path(from_env)
    # Development layout: src/relkit/config.py -> ../../.. = project root
    project_root = Path(__file__).resolve().parent.parent.parent
    candidate = project_root / default_subdir
    if candidate.is_dir():
        return candidate
    if kind == "config":
        return Path(platformdirs.user_config_dir(APP_NAME))
    return Path(platformdirs.user_cache_dir(APP_NAME))


def get_config_dir() -> Path:
    """Resolve config directory. Re-evaluated on each call to pick up env changes."""
    return _resolve_dir("RELKIT_CONFIG_DIR", "config", kind="config")


def get_cache_dir() -> Path:
    """Resolve cache directory. Re-evaluated on each call to pick up env changes."""
    return _resolve_dir("RELKIT_CACHE_DIR", ".cache", kind="cache")


def load_yaml(path: Path) -> dict:
    """Load and parse a YAML file, returning the top-level dict."""
    return yaml.safe_load(path.read_text()) or {}


@dataclass(frozen=True)
class Limits:
    """Work and degree caps shared by every search."""

    max_degree_exhaustive: int = 12
    closure_max_degree: int = 10
    census_work_cap: int = 2**30
    census_max_degree: int = 28
    setwise_iteration_cap: int = 10**6
    union_search_cap: int = 2**12
    greedy_step_cap: int = 256
    orbit_universe_cap: int = 2**22
    chain_cap: int = 64
    threads: int = 1
    persistent_cache: bool = False

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


DEFAULT_LIMITS = Limits()

_ENV_VARS = {
    "RELKIT_THREADS": "threads",
    "RELKIT_MAX_DEGREE_EXHAUSTIVE": "max_degree_exhaustive",
    "RELKIT_CLOSURE_MAX_DEGREE": "closure_max_degree",
    "RELKIT_CENSUS_WORK_CAP": "census_work_cap",
    "RELKIT_CENSUS_MAX_DEGREE": "census_max_degree",
    "RELKIT_UNION_SEARCH_CAP": "union_search_cap",
    "RELKIT_CHAIN_CAP": "chain_cap",
    "RELKIT_CACHE": "persistent_cache",
}

_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off", ""}


def _coerce(name: str, value: Any, source: str) -> int | bool:
    if name == "persistent_cache":
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in _TRUE:
            return True
        if text in _FALSE:
            return False
        raise ConfigError(f"{source}: '{name}' must be a boolean, got {value!r}")
    try:
        number = int(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{source}: '{name}' must be an integer, got {value!r}") from None
    if number < 1:
        raise ConfigError(f"{source}: '{name}' must be positive, got {number}")
    return number


def _file_limits() -> dict[str, Any]:
    path = get_config_dir() / CONFIG_FILE
    if not path.is_file():
        return {}
    try:
        data = load_yaml(path)
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML: {e}") from e
    section = data.get("limits") or {}
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: 'limits' must be a mapping")
    return section


def load_limits(overrides: dict[str, Any] | None = None) -> Limits:
    """Resolve caps: defaults < relkit.yaml ``limits`` < RELKIT_* env vars < *overrides*."""
    known = {f.name for f in fields(Limits)}
    values: dict[str, Any] = {}

    for name, value in _file_limits().items():
        if name not in known:
            raise ConfigError(f"{CONFIG_FILE}: unknown limit '{name}'")
        values[name] = _coerce(name, value, CONFIG_FILE)

    for env_var, name in _ENV_VARS.items():
        raw = os.environ.get(env_var)
        if raw is not None:
            values[name] = _coerce(name, raw, env_var)

    for name, value in (overrides or {}).items():
        if value is None:
            continue
        if name not in known:
            raise ConfigError(f"Unknown limit '{name}'")
        values[name] = _coerce(name, value, f"--{name.replace('_', '-')}")

    return replace(DEFAULT_LIMITS, **values)


def write_config_template(dest: Path, template: str) -> Path:
    """Write *template* to *dest* atomically."""
    dest.parent.mkdir(parents=True, exist_ok=True)
    tmp = dest.with_suffix(".tmp")
    tmp.write_text(template)
    os.replace(tmp, dest)
    return dest

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path
import sys
from typing import Any, Callable, Tuple, TypeVar

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import ConfigError

T = TypeVar("T")

SAMPLING_MODES = ("pixel", "polar")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def default_out_dir() -> Path:
    return Path.cwd() / "gearfwm-out"


def _resolve_path(p: str, *, base_dir: Path) -> Path:
    # Expand env vars and ~. If relative, treat relative to config file dir.
    expanded = os.path.expandvars(os.path.expanduser(p))
    path = Path(expanded)
    return path if path.is_absolute() else (base_dir / path)


@dataclass(frozen=True)
class RenderConfig:
    n: int = 512
    extent: float = 2.5
    waist: float = 1.0
    bins: int = 720
    sampling: str = "pixel"  # or "polar" (analytic, no image)
    radial_samples: int = 64


@dataclass(frozen=True)
class FitConfig:
    tolerance: float = 1e-6


@dataclass(frozen=True)
class SweepConfig:
    workers: int = 1


@dataclass(frozen=True)
class LogConfig:
    level: str = "INFO"


@dataclass(frozen=True)
class GearConfig:
    out_dir: str = ""
    render: RenderConfig = field(default_factory=RenderConfig)
    fit: FitConfig = field(default_factory=FitConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    log: LogConfig = field(default_factory=LogConfig)


def _get(tbl: dict, section: str, key: str, conv: Callable[[Any], T], default: T) -> T:
    if key not in tbl:
        return default
    try:
        return conv(tbl[key])
    except (TypeError, ValueError) as e:
        raise ConfigError(f"[{section}].{key}: {e}") from None


def _choice(section: str, key: str, allowed: tuple[str, ...], value: str) -> str:
    value = value.strip()
    if value not in allowed:
        raise ConfigError(f"[{section}].{key} must be one of {', '.join(allowed)}; got {value!r}")
    return value


def _read_toml(path: Path) -> dict:
    try:
        return tomllib.loads(path.read_text(encoding="utf-8"))
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from None


def load_config(script_path: Path) -> Tuple[GearConfig, Path]:
    """Load config.toml next to the entry script, or via GEARFWM_CONFIG."""
    script_dir = script_path.resolve().parent
    cfg_dir = script_dir

    cfg = GearConfig()
    data: dict = {}

    # Prefer local config.toml next to the executing script
    local_cfg = script_dir / "config.toml"
    if local_cfg.exists():
        data = _read_toml(local_cfg)
    else:
        env_cfg = os.environ.get("GEARFWM_CONFIG", "").strip()
        if env_cfg:
            env_path = Path(os.path.expandvars(os.path.expanduser(env_cfg)))
            if not env_path.exists():
                raise ConfigError(f"GEARFWM_CONFIG points to missing file: {env_path}")
            data = _read_toml(env_path)
            cfg_dir = env_path.resolve().parent

    top = data.get("gearfwm", {}) or {}
    render_tbl = data.get("render", {}) or {}
    fit_tbl = data.get("fit", {}) or {}
    sweep_tbl = data.get("sweep", {}) or {}
    log_tbl = data.get("log", {}) or {}

    d = cfg.render
    render = RenderConfig(
        n=_get(render_tbl, "render", "n", int, d.n),
        extent=_get(render_tbl, "render", "extent", float, d.extent),
        waist=_get(render_tbl, "render", "waist", float, d.waist),
        bins=_get(render_tbl, "render", "bins", int, d.bins),
        sampling=_choice("render", "sampling", SAMPLING_MODES, _get(render_tbl, "render", "sampling", str, d.sampling)),
        radial_samples=_get(render_tbl, "render", "radial_samples", int, d.radial_samples),
    )

    fit = FitConfig(tolerance=_get(fit_tbl, "fit", "tolerance", float, cfg.fit.tolerance))
    sweep = SweepConfig(workers=max(1, _get(sweep_tbl, "sweep", "workers", int, cfg.sweep.workers)))
    log = LogConfig(level=_choice("log", "level", LOG_LEVELS, _get(log_tbl, "log", "level", str, cfg.log.level).upper()))

    out = GearConfig(
        out_dir=str(top.get("out_dir", cfg.out_dir)).strip(),
        render=render,
        fit=fit,
        sweep=sweep,
        log=log,
    )
    return out, cfg_dir


def resolve_out_dir(cfg: GearConfig, *, config_dir: Path) -> Path:
    return _resolve_path(cfg.out_dir, base_dir=config_dir) if cfg.out_dir else default_out_dir()

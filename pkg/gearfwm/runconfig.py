"""The JSON run document: one (l, theta0, theta, beta) configuration.

Example::

    {"l": 2, "theta0_deg": 0, "theta_deg": 45, "beta": 2.1,
     "detect_mode": "dominant", "grid": {"n": 512, "extent": 2.5},
     "annulus": {"r_inner": 0.5, "r_outer": 1.5}}

CLI flags override document values, which override the TOML defaults.
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Any, Mapping, Optional

from .config import RenderConfig
from .errors import ConfigError
from .fwm_process import DEFAULT_BETA, DetectMode
from .models import RunConfig
from .pattern_analysis import Annulus

KNOWN_KEYS = {"l", "theta0_deg", "theta_deg", "beta", "detect_mode", "grid", "annulus"}


def read_run_document(path: Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"{path}: {e.strerror or e}") from None
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: run document must be a JSON object")
    return raw


def _int(value: Any, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"field '{name}': expected an integer, got {value!r}")
    return value


def _float(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"field '{name}': expected a number, got {value!r}")
    if not math.isfinite(value):
        raise ConfigError(f"field '{name}': must be finite, got {value!r}")
    return float(value)


def _table(value: Any, name: str) -> Mapping[str, Any]:
    if not isinstance(value, dict):
        raise ConfigError(f"field '{name}': expected an object, got {value!r}")
    return value


def build_run_config(
    doc: Mapping[str, Any],
    *,
    render: RenderConfig,
    overrides: Optional[Mapping[str, Any]] = None,
) -> RunConfig:
    merged = dict(doc)
    for key, value in (overrides or {}).items():
        if value is not None:
            merged[key] = value

    unknown = sorted(set(merged) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown field(s): {', '.join(unknown)}")
    if "l" not in merged:
        raise ConfigError("field 'l': required (set it in the run document or pass --l)")

    l = _int(merged["l"], "l")
    if l == 0:
        raise ConfigError("field 'l': must be non-zero (a Gaussian has no petals)")
    beta = _float(merged.get("beta", DEFAULT_BETA), "beta")
    if beta <= 0:
        raise ConfigError(f"field 'beta': must be positive, got {beta!r}")
    try:
        mode = DetectMode(str(merged.get("detect_mode", DetectMode.DOMINANT.value)))
    except ValueError:
        raise ConfigError(f"field 'detect_mode': expected 'dominant' or 'full', got {merged['detect_mode']!r}") from None

    grid = _table(merged.get("grid", {}), "grid")
    grid_n = _int(grid.get("n", render.n), "grid.n")
    grid_extent = _float(grid.get("extent", render.extent), "grid.extent")

    annulus = None
    if merged.get("annulus") is not None:
        tbl = _table(merged["annulus"], "annulus")
        try:
            annulus = Annulus(
                _float(tbl.get("r_inner"), "annulus.r_inner"),
                _float(tbl.get("r_outer"), "annulus.r_outer"),
            )
        except ValueError as e:
            raise ConfigError(f"field 'annulus': {e}") from None

    return RunConfig(
        l=l,
        theta0_deg=_float(merged.get("theta0_deg", 0.0), "theta0_deg"),
        theta_deg=_float(merged.get("theta_deg", 0.0), "theta_deg"),
        beta=beta,
        detect_mode=mode,
        grid_n=grid_n,
        grid_extent=grid_extent,
        annulus=annulus,
    )

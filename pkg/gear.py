#!/usr/bin/env python3
"""GearFWM entrypoint.

    ./gear.py render --l 2 --theta-deg 45
    ./gear.py sweep --l 2 --steps 7
    ./gear.py fit gearfwm-out/sweep.csv --l 2

Site defaults come from config.toml next to this script, or GEARFWM_CONFIG.
"""

from __future__ import annotations

from pathlib import Path

from gearfwm.cli import main

if __name__ == "__main__":
    raise SystemExit(main(script_path=Path(__file__)))

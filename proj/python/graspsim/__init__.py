"""Deterministic dynamic-grasping benchmark simulator.

Configs are plain dicts shaped like the JSON config file (see
``default_config()``); pass only the keys you want to change.
"""

import csv
import io
import json

from . import _core
from ._core import Error

__all__ = [
    "Error",
    "default_config",
    "generate_trajectory",
    "emit_gcode",
    "simulate_gcode",
    "run_trial",
    "run_benchmark",
    "render_charts_svg",
]


def _cfg(config):
    return None if config is None else json.dumps(config)


def default_config():
    return json.loads(_core.default_config())


def generate_trajectory(seed, n_segments=None, config=None):
    return json.loads(_core.generate_trajectory(seed, n_segments, _cfg(config)))


def emit_gcode(seed, speed, n_segments=None, config=None):
    return _core.emit_gcode(seed, speed, n_segments, _cfg(config))


def simulate_gcode(text, samples=1000, config=None):
    """List of (t, x, y) samples evenly spaced over the program."""
    return _core.simulate_gcode(text, samples, _cfg(config))


def run_trial(seed, speed, cube, perception, n_segments=None, config=None):
    return json.loads(_core.run_trial(seed, speed, cube, perception, n_segments, _cfg(config)))


def _rows(text):
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append({k: (v if v != "" else None) for k, v in row.items()})
    return out


def run_benchmark(config=None, jobs=0):
    """Returns {"cells": [...], "trials": [...], "report_csv": str, "trials_csv": str}.

    Row values are kept as the exact CSV strings; convert as needed.
    """
    report_csv, trials_csv = _core.run_benchmark(_cfg(config), jobs)
    return {
        "cells": _rows(report_csv),
        "trials": _rows(trials_csv),
        "report_csv": report_csv,
        "trials_csv": trials_csv,
    }


def render_charts_svg(report_csv, cube):
    return _core.render_charts_svg(report_csv, cube)

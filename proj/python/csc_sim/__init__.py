"""Collaborative edge caching simulator (C++ core)."""

import json as _json

from . import _core
from ._core import ConfigError, SimulationError, oracle_check, preset_names

__all__ = [
    "ConfigError",
    "SimulationError",
    "default_config",
    "make_instance",
    "oracle_check",
    "preset_names",
    "run_preset",
    "solve",
]


def _text(config):
    if config is None:
        return ""
    if isinstance(config, str):
        return config
    return _json.dumps(config)


def default_config():
    return _json.loads(_core.default_config())


def normalize_config(config=None):
    return _json.loads(_core.normalize_config(_text(config)))


def make_instance(config=None, seed=None):
    out = _core.make_instance(_text(config), seed)
    out["deployment"] = _json.loads(out["deployment"])
    return out


def solve(strategy, config=None, seed=None):
    out = _core.solve(strategy, _text(config), seed)
    if "partition_json" in out:
        out["partition_json"] = _json.loads(out["partition_json"])
    return out


def run_preset(name, config=None, seed=None, out_dir="out"):
    return _core.run_preset(name, _text(config), seed, str(out_dir))

## Copyright (C) 2024  hybridcov contributors
##
## This program is free software; you can redistribute it and/or modify
## it under the terms of the GNU General Public License as published by
## the Free Software Foundation; either version 2 of the License, or
## (at your option) any later version.
##
## This program is distributed in the hope that it will be useful,
## but WITHOUT ANY WARRANTY; without even the implied warranty of
## MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
## GNU General Public License for more details.
##
## You should have received a copy of the GNU General Public License along
## with this program; if not, write to the Free Software Foundation, Inc.,
## 51 Franklin Street, Fifth Floor, Boston, MA 02110-1301 USA.

"""Experiment configuration: presets, the JSON/YAML schema and user defaults.

A configuration document is an object with the keys listed in ``ROOT_KEYS``.
Only ``preset`` is required; everything else overrides the preset.
"""

import dataclasses
import logging
import os

from dataclasses import dataclass
from typing import Optional

import yaml

from hybridcov.analysis import SUPPORT_ALGORITHMS
from hybridcov.channel import ScenarioConfig
from hybridcov.common import CoherenceKind
from hybridcov.exceptions import ConfigurationError
from hybridcov.recovery import NARROWBAND_ESTIMATORS

logger = logging.getLogger(__name__)

_XDG_CONFIG_HOME = os.environ.get("XDG_CONFIG_HOME") or os.path.expanduser(os.path.join("~", ".config"))
_defaults_file_path = os.path.join(_XDG_CONFIG_HOME, "covsim", "defaults.yaml")

SCHEMA_VERSION = 1

ROOT_KEYS = (
    "schema",
    "preset",
    "experiment",
    "scenario",
    "algorithms",
    "trials",
    "t_sweep",
    "snr_sweep",
    "lo_values",
    "metrics",
    "seed",
    "output",
)

CDF = "cdf"
SUCCESS = "success"
NARROWBAND = "narrowband"
MIMO = "mimo"
WIDEBAND = "wideband"

MIMO_ALGORITHMS = ("mode1", "mode2", "mode3", "mode4")

ALGORITHMS = {
    CDF: tuple(k.value for k in CoherenceKind),
    SUCCESS: SUPPORT_ALGORITHMS,
    NARROWBAND: NARROWBAND_ESTIMATORS,
    MIMO: MIMO_ALGORITHMS,
    WIDEBAND: ("wb_dcomp",) + NARROWBAND_ESTIMATORS,
}

METRICS = {
    CDF: ("mean", "pr_below_1"),
    SUCCESS: ("success_iter", "full_support"),
    NARROWBAND: ("eta", "rate_loss"),
    MIMO: ("eta", "rate_loss"),
    WIDEBAND: ("eta", "rate_loss"),
}

DEFAULT_TRIALS = {CDF: 500, SUCCESS: 500, NARROWBAND: 100, MIMO: 100, WIDEBAND: 100}

_ANALYSIS = {"N": 64, "M": 8, "D": 64, "L": 8, "on_grid": True, "snr_db": None}
_ETA_T = [4, 10, 20, 40, 60, 80, 100]
_ETA_ALGORITHMS = ["omp", "somp", "comp", "dsomp", "dcomp"]

PRESETS = {
    "fig2": {
        "description": "SOMP coherence CDFs with a fixed tight frame, finite T and the T -> infinity limit",
        "experiment": CDF,
        "scenario": _ANALYSIS,
        "algorithms": ["rho_s", "rho_s_limit"],
        "t_sweep": [1, 4, 8, 64],
        "lo_values": [0, 3, 7],
    },
    "fig3": {
        "description": "DSOMP coherence CDFs with time-varying tight frames against the closed-form bound",
        "experiment": CDF,
        "scenario": _ANALYSIS,
        "algorithms": ["rho_ds", "rho_ds_bound"],
        "t_sweep": [1, 4, 8, 64, 1024],
        "lo_values": [0, 7],
    },
    "fig4": {
        "description": "DSOMP against DCOMP coherence CDFs after seven correct selections",
        "experiment": CDF,
        "scenario": _ANALYSIS,
        "algorithms": ["rho_ds", "rho_dc"],
        "t_sweep": [1, 4, 8, 64],
        "lo_values": [7],
    },
    "fig5": {
        "description": "Per-iteration conditional success probability of DSOMP and DCOMP",
        "experiment": SUCCESS,
        "scenario": _ANALYSIS,
        "algorithms": ["dsomp", "dcomp"],
        "t_sweep": [1, 4, 8, 64],
    },
    "fig6a": {
        "description": "Narrowband covariance efficiency versus T with M = 16",
        "experiment": NARROWBAND,
        "scenario": {"N": 64, "M": 16, "D": 256, "L": 8, "snr_db": 10.0, "on_grid": False},
        "algorithms": _ETA_ALGORITHMS,
        "t_sweep": _ETA_T,
    },
    "fig6b": {
        "description": "Narrowband covariance efficiency versus T with M = 8",
        "experiment": NARROWBAND,
        "scenario": {"N": 64, "M": 8, "D": 256, "L": 8, "snr_db": 10.0, "on_grid": False},
        "algorithms": _ETA_ALGORITHMS,
        "t_sweep": _ETA_T,
    },
    "fig7": {
        "description": "Multi-antenna mobile station: DCOMP under the four training schedules",
        "experiment": MIMO,
        "scenario": {
            "N": 64,
            "M": 8,
            "D": 256,
            "L": 8,
            "snr_db": 0.0,
            "on_grid": False,
            "N_T": 64,
            "M_T": 8,
            "D_T": 256,
            "N_R": 64,
            "M_R": 8,
            "D_R": 256,
        },
        "algorithms": list(MIMO_ALGORITHMS),
        "t_sweep": [10, 20, 30, 40, 50],
    },
    "fig8": {
        "description": "Wideband OFDM: WB-DCOMP against direct extensions of the narrowband estimators",
        "experiment": WIDEBAND,
        "scenario": {
            "N": 64,
            "M": 8,
            "D": 256,
            "L": 8,
            "snr_db": 0.0,
            "on_grid": False,
            "wideband": True,
            "K": 128,
            "N_cp": 32,
        },
        "algorithms": ["wb_dcomp", "dcomp", "dsomp", "comp", "somp"],
        "t_sweep": [5, 10, 20, 30, 40, 50],
    },
    "custom": {
        "description": "User defined experiment; 'experiment' selects the protocol",
        "experiment": None,
        "scenario": {},
    },
}


@dataclass(frozen=True)
class ExperimentSpec:
    preset: str
    experiment: str
    scenario: ScenarioConfig
    algorithms: tuple
    trials: int
    t_sweep: tuple
    snr_sweep: tuple = ()
    lo_values: tuple = (0,)
    metrics: tuple = ()
    seed: int = 0
    output: Optional[str] = None

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigurationError(field="trials", reason="must be at least 1")
        if not self.t_sweep:
            raise ConfigurationError(field="t_sweep", reason="must not be empty")
        if not self.algorithms:
            raise ConfigurationError(field="algorithms", reason="must not be empty")
        if self.experiment == CDF and not self.lo_values:
            raise ConfigurationError(field="lo_values", reason="must not be empty")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigurationError(field="seed", reason="must be an integer in [0, 2**64)")

    def sweep_points(self):
        """(name, value) pairs: the SNR sweep when given, otherwise the T sweep."""
        if self.snr_sweep:
            return [("snr_db", v) for v in self.snr_sweep]
        return [("T", t) for t in self.t_sweep]


def _fail(name, reason):
    raise ConfigurationError(field=name, reason=reason)


def _int_list(data, name, minimum):
    value = data[name]
    if not isinstance(value, list) or not value:
        _fail(name, "must be a non-empty list")
    for v in value:
        if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
            _fail(name, f"entries must be integers >= {minimum}")
    return tuple(value)


def _scenario(base: dict, overrides) -> ScenarioConfig:
    if not isinstance(overrides, dict):
        _fail("scenario", "must be an object")
    known = {f.name for f in dataclasses.fields(ScenarioConfig)}
    for key in overrides:
        if key not in known:
            _fail(f"scenario.{key}", "unknown key")
    values = dict(base)
    values.update(overrides)
    for key, value in values.items():
        if key in ("on_grid", "wideband"):
            if not isinstance(value, bool):
                _fail(f"scenario.{key}", "must be true or false")
        elif key == "snr_db":
            if value is not None and (isinstance(value, bool) or not isinstance(value, (int, float))):
                _fail("scenario.snr_db", "must be a number or null")
        elif value is not None and (isinstance(value, bool) or not isinstance(value, int)):
            _fail(f"scenario.{key}", "must be an integer")
    return ScenarioConfig(**values)


def spec_from_dict(data, defaults=None) -> ExperimentSpec:
    """Validate a parsed configuration document and apply preset defaults.

    ``defaults`` supplies values (currently only ``seed``) for keys the document omits.
    """
    if not isinstance(data, dict):
        _fail("<root>", "expected an object with at least a 'preset' key")
    for key in data:
        if key not in ROOT_KEYS:
            _fail(key, "unknown key")
    if data.get("schema", SCHEMA_VERSION) != SCHEMA_VERSION:
        _fail("schema", f"unsupported schema version {data.get('schema')!r}, expected {SCHEMA_VERSION}")
    if "preset" not in data:
        _fail("preset", "missing")
    preset = data["preset"]
    if preset not in PRESETS:
        _fail("preset", f"unknown preset {preset!r}, expected one of {', '.join(PRESETS)}")
    base = PRESETS[preset]

    experiment = data.get("experiment", base["experiment"])
    if experiment not in ALGORITHMS:
        _fail("experiment", f"expected one of {', '.join(ALGORITHMS)}")
    if base["experiment"] is not None and experiment != base["experiment"]:
        _fail("experiment", f"preset {preset} runs a {base['experiment']} experiment")

    scenario = _scenario(base["scenario"], data.get("scenario", {}))

    algorithms = data.get("algorithms", base.get("algorithms", list(ALGORITHMS[experiment])))
    if not isinstance(algorithms, list) or not algorithms:
        _fail("algorithms", "must be a non-empty list")
    for name in algorithms:
        if name not in ALGORITHMS[experiment]:
            _fail("algorithms", f"{name!r} is not available for {experiment} experiments")

    metrics = data.get("metrics", list(METRICS[experiment]))
    if not isinstance(metrics, list) or not metrics:
        _fail("metrics", "must be a non-empty list")
    for name in metrics:
        if name not in METRICS[experiment]:
            _fail("metrics", f"{name!r} is not reported by {experiment} experiments")

    trials = data.get("trials", DEFAULT_TRIALS[experiment])
    if isinstance(trials, bool) or not isinstance(trials, int):
        _fail("trials", "must be an integer")

    values = {"t_sweep": base.get("t_sweep", [scenario.T]), "lo_values": base.get("lo_values", [0])}
    values.update({k: data[k] for k in ("t_sweep", "lo_values") if k in data})
    t_sweep = _int_list(values, "t_sweep", 1)
    lo_values = _int_list(values, "lo_values", 0)
    if any(lo >= scenario.L for lo in lo_values):
        _fail("lo_values", f"entries must be below L = {scenario.L}")

    snr_sweep = data.get("snr_sweep", [])
    if not isinstance(snr_sweep, list) or any(isinstance(v, bool) or not isinstance(v, (int, float)) for v in snr_sweep):
        _fail("snr_sweep", "must be a list of numbers")

    seed = data.get("seed", (defaults or {}).get("seed", 0))
    output = data.get("output")
    if output is not None and not isinstance(output, str):
        _fail("output", "must be a path")

    return ExperimentSpec(
        preset=preset,
        experiment=experiment,
        scenario=scenario,
        algorithms=tuple(algorithms),
        trials=trials,
        t_sweep=t_sweep,
        snr_sweep=tuple(float(v) for v in snr_sweep),
        lo_values=lo_values,
        metrics=tuple(metrics),
        seed=seed,
        output=output,
    )


def load_config(path, defaults=None) -> ExperimentSpec:
    """Read and validate a JSON (or YAML) experiment configuration."""
    try:
        with open(path, encoding="utf-8") as config_file:
            data = yaml.safe_load(config_file)
    except OSError as e:
        _fail("path", f"cannot read {path}: {e.strerror}")
    except yaml.YAMLError as e:
        _fail("<root>", f"{path} is not valid JSON or YAML: {e}")
    logger.debug("load %s => %s", path, data)
    if data is None:
        _fail("<root>", f"{path} is empty, expected an object with at least a 'preset' key")
    return spec_from_dict(data, defaults)


def apply_overrides(spec: ExperimentSpec, seed=None, trials=None, output=None) -> ExperimentSpec:
    changes = {k: v for k, v in (("seed", seed), ("trials", trials), ("output", output)) if v is not None}
    return dataclasses.replace(spec, **changes) if changes else spec


def user_defaults() -> dict:
    """Optional per-user defaults (``threads``, ``seed``); problems are logged and ignored."""
    if not os.path.isfile(_defaults_file_path):
        return {}
    try:
        with open(_defaults_file_path) as defaults_file:
            loaded = yaml.safe_load(defaults_file) or {}
    except Exception as e:
        logger.error("failed to load from %s: %s", _defaults_file_path, e)
        return {}
    if not isinstance(loaded, dict):
        logger.error("ignoring %s: expected a mapping", _defaults_file_path)
        return {}
    defaults = {}
    for key in ("threads", "seed"):
        value = loaded.get(key)
        if isinstance(value, int) and not isinstance(value, bool) and value >= 0:
            defaults[key] = value
        elif value is not None:
            logger.warning("ignoring %s in %s: expected a non-negative integer", key, _defaults_file_path)
    return defaults

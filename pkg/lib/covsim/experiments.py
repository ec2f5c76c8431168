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

"""Monte-Carlo orchestration and the CSV result format."""

import csv
import dataclasses
import logging
import math
import sys

from dataclasses import dataclass
from dataclasses import field
from typing import Optional

import numpy as np

from hybridcov import analysis
from hybridcov import channel
from hybridcov import recovery
from hybridcov import sensing
from hybridcov import simulate
from hybridcov.common import KwException
from hybridcov.common import ScheduleMode
from hybridcov.metrics import evaluate_estimate

from covsim import configuration
from covsim.tasks import TrialRunner

logger = logging.getLogger(__name__)

HEADER = ("preset", "algorithm", "sweep_name", "sweep_value", "metric", "mean", "stderr", "trials", "seed")

_DYNAMIC = ("dsomp", "dcomp", "wb_dcomp")


@dataclass(frozen=True)
class ResultRow:
    preset: str
    algorithm: str
    sweep_name: str
    sweep_value: object
    metric: str
    mean: float
    stderr: float
    trials: int
    seed: int


@dataclass
class ResultTable:
    rows: list = field(default_factory=list)
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.error is not None


def _mean_stderr(values):
    values = np.asarray(values, dtype=float)
    if len(values) < 2:
        return float(np.mean(values)), 0.0
    return float(np.mean(values)), float(np.std(values, ddof=1) / math.sqrt(len(values)))


def _point_scenario(spec, sweep_name, value):
    if sweep_name == "snr_db":
        return dataclasses.replace(spec.scenario, snr_db=float(value))
    return dataclasses.replace(spec.scenario, T=int(value))


def _cdf_trial(spec, cfg, dictionary):
    dynamic = any(a in ("rho_ds", "rho_dc") for a in spec.algorithms)

    def trial(index, rng):
        out = {}
        for lo in spec.lo_values:
            params = analysis.CoherenceParams(N=cfg.N, M=cfg.M, L=cfg.L, L_o=lo, T=cfg.T, D=cfg.D)
            draw = analysis.draw_coherence_instance(params, rng, frames=cfg.T if dynamic else 1, dictionary=dictionary)
            for kind in spec.algorithms:
                out[f"{kind}@Lo={lo}"] = analysis.evaluate_coherence(kind, draw)
        return out

    return trial


def _success_trial(spec, cfg, dictionary):
    params = analysis.RecoveryParams(N=cfg.N, M=cfg.M, L=cfg.L, T=cfg.T, D=cfg.D)

    def trial(index, rng):
        state = rng.bit_generator.state
        out = {}
        for algorithm in spec.algorithms:
            rng.bit_generator.state = state
            out[algorithm] = analysis.success_run_length(algorithm, params, rng, dictionary)
        return out

    return trial


def _report(out, name, spec, report):
    if "eta" in spec.metrics:
        out[(name, "eta")] = report.eta
    if "rate_loss" in spec.metrics:
        out[(name, "rate_loss")] = report.rate_loss_pct


def _narrowband_trial(spec, cfg, dictionary):
    def trial(index, rng):
        realization = channel.draw_channel(cfg, rng, dictionary)
        varying = sensing.draw_ensemble(cfg, rng, time_varying=True, dictionary=dictionary)
        fixed = sensing.draw_ensemble(cfg, rng, time_varying=False, dictionary=dictionary)
        measured = {
            True: simulate.simulate_narrowband(realization, varying, cfg.snr_db, rng),
            False: simulate.simulate_narrowband(realization, fixed, cfg.snr_db, rng),
        }
        truth = realization.true_covariance()
        out = {}
        for name in spec.algorithms:
            dynamic = name in _DYNAMIC
            ensemble = varying if dynamic else fixed
            estimate = recovery.estimate_covariance(name, ensemble.phi, measured[dynamic].snapshots().T, cfg.L, dictionary)
            _report(out, name, spec, evaluate_estimate(estimate.covariance, truth, cfg.L, _rate_snr(cfg)))
        return out

    return trial


def _wideband_trial(spec, cfg, dictionary):
    def trial(index, rng):
        realization = channel.draw_channel(cfg, rng, dictionary)
        varying = sensing.draw_ensemble(cfg, rng, time_varying=True, dictionary=dictionary)
        fixed = sensing.draw_ensemble(cfg, rng, time_varying=False, dictionary=dictionary)
        measured = {
            True: simulate.simulate_wideband(realization, varying, cfg.snr_db, rng),
            False: simulate.simulate_wideband(realization, fixed, cfg.snr_db, rng),
        }
        truth = realization.true_covariance()
        out = {}
        for name in spec.algorithms:
            dynamic = name in _DYNAMIC
            ensemble = varying if dynamic else fixed
            if name == "wb_dcomp":
                estimate = recovery.wb_dcomp(ensemble.phi, measured[True].y, cfg.L, dictionary)
            else:
                estimate = recovery.stacked_direct(name, ensemble.phi, measured[dynamic].y, cfg.L, dictionary)
            _report(out, name, spec, evaluate_estimate(estimate.covariance, truth, cfg.L, _rate_snr(cfg)))
        return out

    return trial


def _mimo_trial(spec, cfg, dictionary):
    def trial(index, rng):
        realization = channel.draw_mimo_channel(cfg, rng, dictionary)
        truth = realization.true_covariance()
        out = {}
        state = rng.bit_generator.state
        for name in spec.algorithms:
            rng.bit_generator.state = state
            mode = ScheduleMode(int(name[-1]))
            ensemble = sensing.draw_mimo_ensemble(cfg, mode, rng, dictionary)
            measured = simulate.simulate_mimo(realization, ensemble, cfg.snr_db, rng)
            estimate = recovery.dcomp(ensemble.sensing(), measured.y[:, :, 0], cfg.L, dictionary)
            _report(out, name, spec, evaluate_estimate(estimate.covariance, truth, cfg.L, _rate_snr(cfg)))
        return out

    return trial


def _rate_snr(cfg):
    return 0.0 if cfg.snr_db is None else cfg.snr_db


_TRIALS = {
    configuration.CDF: _cdf_trial,
    configuration.SUCCESS: _success_trial,
    configuration.NARROWBAND: _narrowband_trial,
    configuration.WIDEBAND: _wideband_trial,
    configuration.MIMO: _mimo_trial,
}


def _dictionary(spec, cfg):
    if spec.experiment == configuration.MIMO:
        return channel.build_mimo_dictionary(cfg)
    return channel.build_dictionary(cfg.N, cfg.D)


def _summarize(spec, cfg, sweep_name, value, results):
    def row(algorithm, metric, mean, stderr, trials):
        return ResultRow(spec.preset, algorithm, sweep_name, value, metric, mean, stderr, trials, spec.seed)

    rows = []
    keys = list(results[0])
    if spec.experiment == configuration.CDF:
        for key in keys:
            samples = np.array([r[key] for r in results], dtype=float)
            if "mean" in spec.metrics:
                rows.append(row(key, "mean", *_mean_stderr(samples), len(samples)))
            if "pr_below_1" in spec.metrics:
                rows.append(row(key, "pr_below_1", *_mean_stderr(samples < 1.0), len(samples)))
    elif spec.experiment == configuration.SUCCESS:
        for algorithm in keys:
            runs = np.array([r[algorithm] for r in results], dtype=int)
            if "success_iter" in spec.metrics:
                rates = analysis.success_rates(runs, cfg.L)
                for n, rate in enumerate(rates, start=1):
                    reached = int(np.sum(runs >= n - 1))
                    stderr = math.sqrt(rate * (1.0 - rate) / reached) if reached else float("nan")
                    rows.append(row(algorithm, f"success_iter_{n}", float(rate), stderr, reached))
            if "full_support" in spec.metrics:
                rows.append(row(algorithm, "full_support", *_mean_stderr(runs == cfg.L), len(runs)))
    else:
        for algorithm, metric in keys:
            rows.append(row(algorithm, metric, *_mean_stderr([r[(algorithm, metric)] for r in results]), len(results)))
    return rows


def run_experiment(spec, threads=1) -> ResultTable:
    """Run every sweep point of ``spec`` and return one row per algorithm, metric and point.

    A failing sweep point stops the run; the rows gathered so far are kept and
    followed by a row whose metric is ``error``.
    """
    runner = TrialRunner(threads, name=spec.preset)
    table = ResultTable()
    for sweep_name, value in spec.sweep_points():
        try:
            cfg = _point_scenario(spec, sweep_name, value)
            trial = _TRIALS[spec.experiment](spec, cfg, _dictionary(spec, cfg))
            logger.info("%s: %s = %s, %d trials", spec.preset, sweep_name, value, spec.trials)
            results = runner(trial, spec.seed, spec.trials, label=f"{spec.preset} {sweep_name}={value}")
            table.rows.extend(_summarize(spec, cfg, sweep_name, value, results))
        except (KwException, np.linalg.LinAlgError) as e:
            logger.error("%s: %s = %s failed: %s", spec.preset, sweep_name, value, e)
            table.rows.append(ResultRow(spec.preset, "*", sweep_name, value, "error", math.nan, math.nan, 0, spec.seed))
            table.error = f"{sweep_name} = {value}: {type(e).__name__}: {e}"
            break
    return table


def _format(value):
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_csv(table: ResultTable, path=None):
    """Write ``table`` as UTF-8 CSV to ``path`` (standard output when None)."""
    rows = table.rows if isinstance(table, ResultTable) else table

    def write(stream):
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(HEADER)
        for r in rows:
            writer.writerow([_format(getattr(r, name)) for name in HEADER])

    if path is None:
        write(sys.stdout)
        return
    with open(path, "w", encoding="utf-8", newline="") as out:
        write(out)


def _number(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def read_csv(path) -> ResultTable:
    """Read a table written by ``emit_csv``."""
    table = ResultTable()
    with open(path, encoding="utf-8", newline="") as source:
        reader = csv.reader(source)
        header = tuple(next(reader))
        if header != HEADER:
            raise ValueError(f"{path}: unexpected header {header}")
        for record in reader:
            preset, algorithm, sweep_name, sweep_value, metric, mean, stderr, trials, seed = record
            table.rows.append(
                ResultRow(
                    preset,
                    algorithm,
                    sweep_name,
                    _number(sweep_value),
                    metric,
                    float(mean),
                    float(stderr),
                    int(trials),
                    int(seed),
                )
            )
    return table

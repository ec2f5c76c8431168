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

"""Dump one channel realization and a summary of its sensing ensemble as JSON."""

import dataclasses
import json

import numpy as np

from hybridcov import channel
from hybridcov import sensing
from hybridcov.common import ScheduleMode

from covsim import configuration
from covsim.tasks import trial_rng


def _complex(a):
    a = np.asarray(a)
    return {"re": np.real(a).tolist(), "im": np.imag(a).tolist()}


def _real(a):
    return None if a is None else np.asarray(a, dtype=float).tolist()


def realization_summary(spec, seed, frames=None) -> dict:
    cfg = spec.scenario if frames is None else dataclasses.replace(spec.scenario, T=frames)
    rng = trial_rng(seed, 0)
    out = {"preset": spec.preset, "experiment": spec.experiment, "seed": seed, "scenario": dataclasses.asdict(cfg)}
    if spec.experiment == configuration.MIMO:
        realization = channel.draw_mimo_channel(cfg, rng)
        ensemble = sensing.draw_mimo_ensemble(cfg, ScheduleMode.FULLY_VARYING, rng)
        out["ensemble"] = {"mode": ensemble.mode.name, "frames": ensemble.frames, "rows": ensemble.theta.shape[1]}
    else:
        realization = channel.draw_channel(cfg, rng)
        ensemble = sensing.draw_ensemble(cfg, rng, time_varying=True)
        coherence, welch = sensing.frame_metrics(ensemble.phi[0])
        out["ensemble"] = {
            "frames": ensemble.frames,
            "rows": ensemble.phi.shape[1],
            "coherence": coherence,
            "welch_bound": welch,
            "frame_gram_diagonal": _real(np.real(np.diagonal(ensemble.phi[0] @ ensemble.phi[0].conj().T))),
        }
    out["channel"] = {
        "on_grid": realization.on_grid,
        "support": None if realization.support is None else realization.support.tolist(),
        "aoas": _real(realization.aoas),
        "omegas": _real(realization.omegas),
        "aods": _real(realization.aods),
        "delays": _real(realization.delays),
        "path_powers": _real(realization.path_powers()),
        "gains": _complex(realization.gains),
    }
    return out


def run(args):
    defaults = configuration.user_defaults()
    spec = configuration.load_config(args.config, defaults)
    spec = configuration.apply_overrides(spec, seed=args.seed)
    print(json.dumps(realization_summary(spec, spec.seed, args.frames), indent=2))

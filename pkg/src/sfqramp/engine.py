"""Schedule-cost engine selection: compiled extension if available, NumPy twin otherwise.

Set SFQRAMP_PURE_PYTHON=1 to force the NumPy implementation (used by the
benchmark and the equivalence tests). Both implementations share one
contract: `best_train(times, r)` returns the minimum process infidelity over
train lengths together with the best length, for sorted kick times inside
[0, r * period].
"""

from __future__ import annotations

import math
import os

import numpy as np

from .dynamics import kick_unitary, target_unitary
from .model import QubitModel
from ._engine_py import PyScheduleEngine

try:
    from ._engine_cy import CompiledScheduleEngine
except ImportError:
    CompiledScheduleEngine = None

__all__ = ["HAVE_COMPILED", "make_engine", "train_length_limit"]

HAVE_COMPILED = CompiledScheduleEngine is not None

_FORCE_PYTHON = os.environ.get("SFQRAMP_PURE_PYTHON", "") not in ("", "0")


def train_length_limit(theta_targ: float, theta_kick: float) -> int:
    """Upper edge of the exhaustive train-length search window.

    The naive kick count is theta_targ / theta_kick; ramps only ever remove
    net rotation from the train, so a small margin above the naive count
    covers every optimum encountered.
    """
    return int(math.ceil(theta_targ / theta_kick)) + 4


def make_engine(
    model: QubitModel,
    coupling: str,
    theta_kick: float,
    theta_targ: float,
    nt_max: int | None = None,
    pure_python: bool | None = None,
):
    """Build the schedule-cost engine for one (model, coupling, angles) setup."""
    if nt_max is None:
        nt_max = train_length_limit(theta_targ, theta_kick)
    kick = kick_unitary(model, coupling, theta_kick)
    u_targ = target_unitary(coupling, theta_targ)
    use_python = _FORCE_PYTHON if pure_python is None else pure_python
    cls = PyScheduleEngine if (use_python or not HAVE_COMPILED) else CompiledScheduleEngine
    return cls(np.asarray(model.omegas, dtype=float), kick, u_targ, model.period, nt_max)

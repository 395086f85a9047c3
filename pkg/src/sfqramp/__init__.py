"""SFQ pulse-schedule synthesis, optimization, and encoding for fluxonium gates."""

from .model import (
    CircuitParams,
    CoherenceRates,
    QubitModel,
    build_fock_operators,
    diagonalize_model,
    matrix_element,
)
from .schedule import ClockGrid, Discarded, Ramp, Schedule, snap_to_clock
from .dynamics import (
    ErrorBudget,
    PauliDecomposition,
    error_budget,
    process_fidelity,
    propagate,
    target_unitary,
)
from .open_system import liouvillian, open_fidelity, propagate_open
from .optimizer import GateSpec, OptimizationResult, RampResult, optimize_gate
from .encoding import EncodedSchedule, EncodingParams, bit_cost, decode, encode
from .engine import HAVE_COMPILED, make_engine

__version__ = "0.1.0"

__all__ = [
    "CircuitParams",
    "ClockGrid",
    "CoherenceRates",
    "Discarded",
    "EncodedSchedule",
    "EncodingParams",
    "ErrorBudget",
    "GateSpec",
    "HAVE_COMPILED",
    "OptimizationResult",
    "PauliDecomposition",
    "QubitModel",
    "Ramp",
    "RampResult",
    "Schedule",
    "bit_cost",
    "build_fock_operators",
    "decode",
    "diagonalize_model",
    "encode",
    "error_budget",
    "make_engine",
    "matrix_element",
    "open_fidelity",
    "liouvillian",
    "optimize_gate",
    "process_fidelity",
    "propagate",
    "propagate_open",
    "snap_to_clock",
    "target_unitary",
    "__version__",
]

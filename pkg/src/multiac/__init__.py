"""Time-optimal control of N-level systems with multiple avoided crossings.

Library layout:

- linalg: small dense Hermitian eigendecomposition and unitary exponential
- model: the crossing-chain Hamiltonian family and its spectrum
- fields: piecewise-constant control fields and the standard generators
- propagation: exact stepwise state evolution, fidelities, populations
- krotov: the iterative field optimizer
- qsl: minimal-time estimation by time sweeps and parameter sweeps
- rwa: the analytic two-stage rotating-frame solution
- cli: config-driven reproduction harness
"""
from .fields import (
    ControlField,
    TimeGrid,
    dominant_frequency,
    initial_guess,
    rwa_field,
    sudden_switch,
    sudden_switch_time,
)
from .krotov import OptimizationProblem, OptimizationRecord, control_hamiltonian, optimize
from .linalg import eigh, expm_unitary
from .model import SpectrumModel, hamiltonian, scan_spectrum, split
from .propagation import (
    StateTrajectory,
    basis_state,
    fidelity,
    forward_backward_consistency,
    propagate,
)
from .qsl import QslEstimate, classify_run, estimate_qsl, sweep_epsilon, sweep_K
from .rwa import (
    RwaParameters,
    analytic_propagator,
    calibrate_amplitude,
    effective_hamiltonian,
    renormalized_rates,
)

__all__ = [
    "ControlField",
    "OptimizationProblem",
    "OptimizationRecord",
    "QslEstimate",
    "RwaParameters",
    "SpectrumModel",
    "StateTrajectory",
    "TimeGrid",
    "analytic_propagator",
    "basis_state",
    "calibrate_amplitude",
    "classify_run",
    "control_hamiltonian",
    "dominant_frequency",
    "effective_hamiltonian",
    "eigh",
    "estimate_qsl",
    "expm_unitary",
    "fidelity",
    "forward_backward_consistency",
    "hamiltonian",
    "initial_guess",
    "optimize",
    "propagate",
    "renormalized_rates",
    "rwa_field",
    "scan_spectrum",
    "split",
    "sudden_switch",
    "sudden_switch_time",
    "sweep_K",
    "sweep_epsilon",
]

__version__ = "0.1.0"

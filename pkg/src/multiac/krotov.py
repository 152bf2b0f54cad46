"""Iterative optimal-control loop: forward/backward sweeps with an
immediate field update at every time slice.

The update lam(t) += Im{<chi(t)|Hc|psi(t)>}/alpha(t) is applied during the
forward sweep, before propagating through the slice; this sequential scheme
is what makes the infidelity monotone non-increasing.
"""
import io
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import _kernels
from .fields import ControlField
from .linalg import check_normalized
from .model import base_and_control


class MonotonicityError(RuntimeError):
    """Infidelity increased between iterations beyond tolerance."""


def control_hamiltonian(model):
    """dH/dlam: diagonal projector onto the even diabatic states."""
    _, c = base_and_control(model)
    return np.diag(c).astype(complex)


@dataclass
class OptimizationProblem:
    model: object
    psi0: np.ndarray
    goal: np.ndarray
    T: float
    guess: ControlField
    alpha: object = 1.0  # scalar or per-slice array, weight of the field penalty
    max_iters: int = 10000
    convergence_threshold: float = 1e-4
    monotonic_tol: float = 1e-9
    stall_iters: int = 50

    def alpha_profile(self):
        alpha = np.broadcast_to(
            np.asarray(self.alpha, dtype=float), (self.guess.grid.M,)
        ).copy()
        if np.any(alpha <= 0):
            raise ValueError("alpha must be positive everywhere")
        return alpha

    def validate(self):
        psi0 = np.asarray(self.psi0, dtype=complex)
        goal = np.asarray(self.goal, dtype=complex)
        if psi0.shape != (self.model.N,) or goal.shape != (self.model.N,):
            raise ValueError("state dimensions do not match the model")
        check_normalized(psi0)
        check_normalized(goal)
        if abs(self.guess.grid.T - self.T) > 1e-9 * max(self.T, 1.0):
            raise ValueError(
                f"guess grid spans {self.guess.grid.T}, problem expects T={self.T}"
            )
        return psi0, goal


@dataclass
class OptimizationRecord:
    infidelities: np.ndarray
    final_field: ControlField
    iterations_used: int
    converged: bool
    stalled: bool = False
    threshold: float = dc_field(default=1e-4)

    def to_csv(self, path_or_buf):
        rows = ["iteration,infidelity"]
        for m, v in enumerate(self.infidelities):
            rows.append(f"{m},{v:.17g}")
        text = "\n".join(rows) + "\n"
        if isinstance(path_or_buf, io.IOBase):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)


def optimize(problem: OptimizationProblem) -> OptimizationRecord:
    """Run the optimization loop until the infidelity threshold or max_iters."""
    psi0, goal = problem.validate()
    alpha = problem.alpha_profile()
    Hb, c = base_and_control(problem.model)
    infid, lam, status = _kernels.krotov_kernel(
        Hb,
        c,
        problem.guess.values,
        problem.guess.grid.dt,
        psi0,
        goal,
        alpha,
        problem.max_iters,
        problem.convergence_threshold,
        problem.monotonic_tol,
        problem.stall_iters,
    )
    if status == 3:
        m = len(infid) - 1
        raise MonotonicityError(
            f"infidelity rose from {infid[m - 1]:.6e} to {infid[m]:.6e} "
            f"at iteration {m} (tolerance {problem.monotonic_tol:.1e})"
        )
    return OptimizationRecord(
        infidelities=infid,
        final_field=ControlField(grid=problem.guess.grid, values=lam),
        iterations_used=len(infid),
        converged=(status == 0),
        stalled=(status == 2),
        threshold=problem.convergence_threshold,
    )

"""State propagation under piecewise-constant fields."""
import io
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .fields import ControlField, TimeGrid
from .linalg import check_normalized
from .model import base_and_control


@dataclass
class StateTrajectory:
    """States at every grid time plus diabatic populations."""

    grid: TimeGrid
    states: np.ndarray  # shape (M+1, N)

    @property
    def populations(self):
        return np.abs(self.states) ** 2

    @property
    def final_state(self):
        return self.states[-1]

    def to_csv(self, path_or_buf):
        N = self.states.shape[1]
        rows = ["t," + ",".join(f"P_{k}" for k in range(N))]
        for t, p in zip(self.grid.times, self.populations):
            rows.append(",".join(f"{x:.17g}" for x in (t, *p)))
        text = "\n".join(rows) + "\n"
        if isinstance(path_or_buf, io.IOBase):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)


def propagate(model, field: ControlField, psi0, direction="forward"):
    """Evolve psi0 under the field, one exact unitary per time slice.

    forward: psi0 is the state at t=0.  backward: psi0 is the state at t=T
    and the returned trajectory is still indexed in physical time order.
    """
    if direction not in ("forward", "backward"):
        raise ValueError(f"direction must be forward or backward, got {direction!r}")
    psi0 = np.asarray(psi0, dtype=complex)
    check_normalized(psi0)
    if psi0.shape != (model.N,):
        raise ValueError(f"state dimension {psi0.shape} does not match N={model.N}")
    Hb, c = base_and_control(model)
    traj = _kernels.propagate_kernel(
        Hb, c, field.values, field.grid.dt, psi0, direction == "forward"
    )
    return StateTrajectory(grid=field.grid, states=traj)


def fidelity(psi, goal):
    """|<goal|psi>|^2 for normalized states."""
    check_normalized(psi)
    check_normalized(goal)
    return float(np.abs(np.vdot(goal, psi)) ** 2)


def forward_backward_consistency(model, field, psi0):
    """Round-trip residual ||backward(forward(psi0)(T))(0) - psi0||."""
    fwd = propagate(model, field, psi0, "forward")
    back = propagate(model, field, fwd.final_state, "backward")
    return float(np.linalg.norm(back.states[0] - np.asarray(psi0, dtype=complex)))


def basis_state(N, k):
    """The diabatic basis vector |k> as a complex array."""
    psi = np.zeros(N, dtype=complex)
    psi[k] = 1.0
    return psi

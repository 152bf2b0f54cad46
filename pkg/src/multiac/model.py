"""The N-level multi-avoided-crossing Hamiltonian family.

H(lam) is affine in the control parameter: H(lam) = H_base + lam * diag(c),
where c is 1 on even diabatic states and 0 on odd ones.  The spectrum shows
an avoided crossing of gap deltas[n] at lam = n * epsilon0 for each n, while
degeneracies between non-adjacent states are exact by construction.
"""
import io
from dataclasses import dataclass, field

import numpy as np

from .linalg import eigh


@dataclass(frozen=True)
class SpectrumModel:
    """Parameters (N, epsilon0, deltas) of the N-level crossing chain."""

    N: int
    epsilon0: float
    deltas: tuple

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"need at least two levels, got N={self.N}")
        deltas = tuple(float(d) for d in self.deltas)
        if len(deltas) != self.N - 1:
            raise ValueError(
                f"deltas must have N-1 = {self.N - 1} entries, got {len(deltas)}"
            )
        if any(d < 0 for d in deltas):
            raise ValueError("gap parameters must be non-negative")
        object.__setattr__(self, "deltas", deltas)

    @property
    def ac_positions(self):
        """Control-parameter values lam_n = n * epsilon0 of the N-1 crossings."""
        return [n * self.epsilon0 for n in range(self.N - 1)]


def base_and_control(model):
    """Return (H_base, c) with hamiltonian(model, lam) = H_base + lam*diag(c).

    c is the diagonal of the control Hamiltonian dH/dlam.
    """
    N = model.N
    Hb = np.zeros((N, N), dtype=complex)
    c = np.zeros(N)
    for n in range(0, (N - 1) // 2 + 1):
        Hb[2 * n, 2 * n] = -n * model.epsilon0
        c[2 * n] = 1.0
    for n in range(0, (N - 2) // 2 + 1):
        Hb[2 * n + 1, 2 * n + 1] = n * model.epsilon0
    for n in range(N - 1):
        Hb[n, n + 1] = model.deltas[n] / 2
        Hb[n + 1, n] = model.deltas[n] / 2
    return Hb, c


def hamiltonian(model, lam):
    """The N x N Hamiltonian matrix at control value lam."""
    Hb, c = base_and_control(model)
    return Hb + lam * np.diag(c).astype(complex)


def split(model, lam):
    """Decompose hamiltonian(model, lam) into (H_D diagonal, H_ND couplings)."""
    H = hamiltonian(model, lam)
    H_D = np.diag(np.diag(H))
    return H_D, H - H_D


@dataclass
class SpectrumScan:
    """Eigenvalue branches over a lam grid plus located crossing gaps."""

    lambdas: np.ndarray
    energies: np.ndarray  # shape (len(lambdas), N), ascending per row
    ac_locations: list = field(default_factory=list)  # (lam_min, gap) per crossing
    covers_crossings: bool = True

    def to_csv(self, path_or_buf):
        n_levels = self.energies.shape[1]
        header = "lambda," + ",".join(f"E_{k}" for k in range(n_levels))
        rows = [header]
        for lam, row in zip(self.lambdas, self.energies):
            rows.append(",".join(f"{x:.17g}" for x in (lam, *row)))
        text = "\n".join(rows) + "\n"
        if isinstance(path_or_buf, io.IOBase):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)


def _golden_minimize(f, a, b, tol=1e-10, max_iter=200):
    """Golden-section minimum of a unimodal scalar function on [a, b]."""
    invphi = (np.sqrt(5.0) - 1) / 2
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def crossing_gap(model, n):
    """(lam_min, gap) of the n-th avoided crossing.

    The two branches tracked are the eigenvalues closest to the common
    diabatic energy of states |n> and |n+1> at lam_n; spectator branches at
    the same lam sit at least ~epsilon0/2 away in energy within the search
    window lam_n +/- epsilon0/4, so they never get picked up.
    """
    lam_n = n * model.epsilon0
    Hb, c = base_and_control(model)
    e_star = (Hb[n, n] + lam_n * c[n]).real

    def gap_at(lam):
        E, _ = eigh(Hb + lam * np.diag(c))
        order = np.argsort(np.abs(E - e_star))
        pair = np.sort(E[order[:2]])
        return pair[1] - pair[0]

    half = model.epsilon0 / 4 if model.epsilon0 > 0 else 1.0
    return _golden_minimize(gap_at, lam_n - half, lam_n + half)


def scan_spectrum(model, lambda_grid):
    """Eigenvalues of hamiltonian(model, lam) over an ascending lam grid."""
    lambda_grid = np.asarray(lambda_grid, dtype=float)
    if lambda_grid.size == 0:
        raise ValueError("lambda grid must be nonempty")
    if np.any(np.diff(lambda_grid) < 0):
        raise ValueError("lambda grid must be ascending")
    Hb, c = base_and_control(model)
    energies = np.empty((lambda_grid.size, model.N))
    for i, lam in enumerate(lambda_grid):
        energies[i], _ = eigh(Hb + lam * np.diag(c))
    covers = (lambda_grid[0] <= -model.epsilon0) and (
        lambda_grid[-1] >= (model.N - 1) * model.epsilon0
    )
    ac_locations = [crossing_gap(model, n) for n in range(model.N - 1)]
    return SpectrumScan(
        lambdas=lambda_grid,
        energies=energies,
        ac_locations=ac_locations,
        covers_crossings=covers,
    )

"""Dense complex linear algebra for small Hermitian systems.

Everything here assumes small (N <= ~12) dense matrices, so exact
eigendecomposition is always the cheapest correct tool.
"""
import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10
NORM_TOL = 1e-12


class NonHermitianError(ValueError):
    """Input matrix is not Hermitian within tolerance."""


class UnitarityError(RuntimeError):
    """A matrix that must be unitary failed the U†U = I check."""


def check_hermitian(H, tol=HERMITIAN_TOL):
    """Raise NonHermitianError if H deviates from its conjugate transpose."""
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        raise NonHermitianError(f"expected a square matrix, got shape {H.shape}")
    dev = np.max(np.abs(H - H.conj().T))
    if dev > tol:
        raise NonHermitianError(
            f"matrix is not Hermitian: max |H - H†| = {dev:.3e} > {tol:.1e}"
        )


def check_unitary(U, tol=UNITARY_TOL):
    """Raise UnitarityError if ||U†U - I||_F exceeds tol."""
    U = np.asarray(U)
    n = U.shape[0]
    dev = np.linalg.norm(U.conj().T @ U - np.eye(n))
    if dev > tol:
        raise UnitarityError(f"unitarity violated: ||U†U - I||_F = {dev:.3e}")


def check_normalized(psi, tol=1e-10):
    """Raise ValueError unless |psi| = 1 within tol."""
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state not normalized: |psi| = {nrm!r}")


def eigh(H, tol=HERMITIAN_TOL):
    """Eigendecomposition of a Hermitian matrix.

    Returns (eigenvalues, eigenvectors) with eigenvalues ascending and
    eigenvectors as columns of a unitary matrix, so that
    H = V @ diag(E) @ V†.
    """
    check_hermitian(H, tol)
    return np.linalg.eigh(H)


def expm_unitary(H, dt, tol=HERMITIAN_TOL):
    """exp(-i H dt) for Hermitian H, via eigendecomposition.

    Exact (to roundoff) for any dt, which is what makes piecewise-constant
    propagation exact per step.
    """
    E, V = eigh(H, tol)
    return (V * np.exp(-1j * E * dt)) @ V.conj().T

"""Minimal-time estimation by sweeping the total evolution time.

Each candidate T gets one optimization run; the run is classified as
convergent (the infidelity reached the threshold, or its smoothed tail is
still accelerating downward) or stuck (it flattened out above threshold).
The smallest convergent T in the sweep is the speed-limit estimate, with
the grid spacing as its resolution.
"""
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .fields import initial_guess, sudden_switch_time
from .krotov import OptimizationProblem, optimize
from .propagation import basis_state

CONVERGENT = "convergent"
STUCK = "stuck"


def classify_run(record, tail_window=None):
    """Label an optimization record convergent or stuck.

    Applies a 5-point moving average to the infidelity history, takes the
    discrete second difference, and averages it over the last tail_window
    iterations (default: the last 20%).  Negative tail curvature, or a run
    that already reached the threshold, counts as convergent.
    """
    infid = np.asarray(record.infidelities)
    if record.converged or (infid.size and infid.min() < record.threshold):
        return CONVERGENT
    if tail_window is None:
        tail_window = max(10, infid.size // 5)
    if infid.size < 3 * tail_window:
        raise ValueError(
            f"record too short to classify: {infid.size} iterations "
            f"< 3 * tail_window = {3 * tail_window}"
        )
    kernel = np.ones(5) / 5
    smooth = np.convolve(infid, kernel, mode="valid")
    curvature = np.diff(smooth, 2)
    tail = curvature[-tail_window:]
    return CONVERGENT if tail.mean() < 0 else STUCK


@dataclass
class QslEstimate:
    T_values: np.ndarray
    classifications: list
    T_qsl: float
    resolution: float
    out_of_range: bool = False

    @property
    def ok(self):
        return not self.out_of_range


def _default_guess_factory(model, K, T):
    return initial_guess(model, K, T)


def _run_single(args):
    (model, K, T, guess_factory, alpha, max_iters, threshold) = args
    guess = guess_factory(model, K, T)
    problem = OptimizationProblem(
        model=model,
        psi0=basis_state(model.N, 0),
        goal=basis_state(model.N, K),
        T=T,
        guess=guess,
        alpha=alpha,
        max_iters=max_iters,
        convergence_threshold=threshold,
    )
    return optimize(problem)


def estimate_qsl(
    model,
    K,
    T_range,
    grid_points=21,
    guess_factory=None,
    alpha=1.0,
    max_iters=10000,
    threshold=1e-4,
    workers=1,
):
    """Sweep T over [T_range[0], T_range[1]] and bracket the minimal time.

    The range should straddle the stepped-protocol duration so the sweep
    contains both stuck and convergent runs; if it does not, the estimate
    is flagged out_of_range.
    """
    if guess_factory is None:
        guess_factory = _default_guess_factory
    lo, hi = T_range
    if not lo < hi:
        raise ValueError(f"empty sweep range {T_range}")
    T_values = np.linspace(lo, hi, grid_points)
    tasks = [
        (model, K, float(T), guess_factory, alpha, max_iters, threshold)
        for T in T_values
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_run_single, tasks))
    else:
        records = [_run_single(t) for t in tasks]
    classifications = [classify_run(r) for r in records]
    resolution = float(T_values[1] - T_values[0]) if grid_points > 1 else 0.0
    convergent_T = [T for T, cl in zip(T_values, classifications) if cl == CONVERGENT]
    out_of_range = len(convergent_T) in (0, len(T_values))
    T_qsl = float(min(convergent_T)) if convergent_T else float("nan")
    return QslEstimate(
        T_values=T_values,
        classifications=classifications,
        T_qsl=T_qsl,
        resolution=resolution,
        out_of_range=out_of_range,
    )


def estimate_qsl_relative(model, K, factors=(0.7, 1.1), **kwargs):
    """estimate_qsl with the range given as multiples of the stepped time."""
    TS = sudden_switch_time(model, K)
    return estimate_qsl(model, K, (factors[0] * TS, factors[1] * TS), **kwargs)


def sweep_epsilon(model_family, K, epsilon_values, factors=(0.7, 1.1), **kwargs):
    """Per-epsilon0 estimates; model_family maps epsilon0 to a model."""
    rows = []
    for eps0 in epsilon_values:
        model = model_family(eps0)
        TS = sudden_switch_time(model, K)
        est = estimate_qsl_relative(model, K, factors=factors, **kwargs)
        rows.append(
            {
                "epsilon0": float(eps0),
                "T_qsl": est.T_qsl,
                "T_S": TS,
                "ratio": est.T_qsl / TS,
                "resolution": est.resolution,
            }
        )
    return rows


def sweep_K(epsilon0, delta, K_values, factors=(0.7, 1.1), **kwargs):
    """Ratio T_qsl / T_S^(K) for a ladder of processes with equal gaps."""
    from .model import SpectrumModel

    rows = []
    for K in K_values:
        model = SpectrumModel(N=K + 1, epsilon0=epsilon0, deltas=(delta,) * K)
        TS = sudden_switch_time(model, K)
        est = estimate_qsl_relative(model, K, factors=factors, **kwargs)
        rows.append(
            {
                "K": int(K),
                "T_qsl": est.T_qsl,
                "T_S": TS,
                "ratio": est.T_qsl / TS,
                "resolution": est.resolution,
            }
        )
    return rows


def sweep_to_csv(rows, path_or_buf):
    """Write sweep rows ({epsilon0|K}, T_qsl, T_S, ratio, resolution) as CSV."""
    if not rows:
        raise ValueError("empty sweep output")
    cols = list(rows[0].keys())
    lines = [",".join(cols)]
    for row in rows:
        lines.append(",".join(f"{row[c]:.17g}" for c in cols))
    text = "\n".join(lines) + "\n"
    if isinstance(path_or_buf, io.IOBase):
        path_or_buf.write(text)
    else:
        with open(path_or_buf, "w") as fh:
            fh.write(text)

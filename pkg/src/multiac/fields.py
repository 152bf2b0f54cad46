"""Control fields on a uniform time grid.

A field is piecewise constant: values[k] holds on [t_k, t_{k+1}).  Symbolic
generators sample their analytic form at interval midpoints, so that the
zero-smoothing limit of the smoothed guess reproduces the sudden-switch
steps exactly.
"""
import io
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.signal


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of M intervals on [0, T]."""

    T: float
    M: int

    def __post_init__(self):
        if self.M < 2:
            raise ValueError(f"need at least 2 steps, got M={self.M}")
        if self.T <= 0:
            raise ValueError(f"total time must be positive, got T={self.T}")

    @property
    def dt(self):
        return self.T / self.M

    @property
    def times(self):
        """The M+1 slice boundaries t_k = k*dt."""
        return np.linspace(0.0, self.T, self.M + 1)

    @property
    def midpoints(self):
        return (np.arange(self.M) + 0.5) * self.dt


@dataclass
class ControlField:
    """A sampled control field lam(t), one value per grid interval."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.M,):
            raise ValueError(
                f"expected {self.grid.M} field values, got shape {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("field values must be finite")
        self.values = values

    def to_csv(self, path_or_buf):
        rows = ["t,lambda"]
        for t, v in zip(self.grid.midpoints, self.values):
            rows.append(f"{t:.17g},{v:.17g}")
        text = "\n".join(rows) + "\n"
        if isinstance(path_or_buf, io.IOBase):
            path_or_buf.write(text)
        else:
            with open(path_or_buf, "w") as fh:
                fh.write(text)

    @classmethod
    def from_csv(cls, path_or_buf):
        if isinstance(path_or_buf, io.IOBase):
            lines = path_or_buf.read().splitlines()
        else:
            with open(path_or_buf) as fh:
                lines = fh.read().splitlines()
        data = [line.split(",") for line in lines[1:] if line]
        t = np.array([float(r[0]) for r in data])
        v = np.array([float(r[1]) for r in data])
        M = len(v)
        dt = t[1] - t[0]
        grid = TimeGrid(T=dt * M, M=M)
        return cls(grid=grid, values=v)


def sudden_switch_time(model, K):
    """Total duration sum_n pi/deltas[n], n = 0..K-1, of the stepped protocol."""
    if not 1 <= K <= model.N - 1:
        raise ValueError(f"K must be in [1, {model.N - 1}], got {K}")
    return float(sum(np.pi / model.deltas[n] for n in range(K)))


def default_steps(model, T, steps_per_period=40, min_steps=128):
    """Number of grid intervals resolving the epsilon0 oscillation.

    Keeps dt <= (2*pi/epsilon0)/steps_per_period, with a floor for models
    where epsilon0 is small and the constraint would be loose.
    """
    if model.epsilon0 > 0:
        dt_max = (2 * np.pi / model.epsilon0) / steps_per_period
        return max(min_steps, int(np.ceil(T / dt_max)))
    return max(min_steps, 2000)


def _switch_times(model, K, T):
    """Plateau switch times of the sudden-switch shape rescaled to span T."""
    stage = np.array([np.pi / model.deltas[n] for n in range(K)])
    return np.cumsum(stage)[:-1] * (T / stage.sum())


def _plateau_shape(model, K, T, t):
    """The rescaled sudden-switch shape lam^(S)(b*t) evaluated at times t."""
    lam = np.zeros_like(t)
    for s in _switch_times(model, K, T):
        lam += np.where(t >= s, model.epsilon0, 0.0)
    return lam


def sudden_switch(model, K, steps=None):
    """Stepped field: lam = n*epsilon0 for a duration pi/deltas[n] each."""
    T = sudden_switch_time(model, K)
    M = steps if steps is not None else default_steps(model, T)
    grid = TimeGrid(T=T, M=M)
    return ControlField(grid=grid, values=_plateau_shape(model, K, T, grid.midpoints))


def initial_guess(model, K, T, smoothing=0.02, slope=0.01, steps=None):
    """Smoothed, rescaled sudden-switch shape used to seed the optimizer.

    The steps are crossfaded with tanh ramps of width smoothing*T and a
    linear ramp rising to slope*epsilon0 is added; both perturbations force
    the optimizer to do real work instead of starting at the optimum.
    smoothing -> 0, slope = 0, T = sudden_switch_time reproduces
    sudden_switch exactly.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    sudden_switch_time(model, K)  # validates K
    M = steps if steps is not None else default_steps(model, T)
    grid = TimeGrid(T=T, M=M)
    t = grid.midpoints
    lam = np.zeros(M)
    w = smoothing * T
    for s in _switch_times(model, K, T):
        if w > 0:
            lam += model.epsilon0 * 0.5 * (1 + np.tanh((t - s) / w))
        else:
            lam += np.where(t >= s, model.epsilon0, 0.0)
    lam += slope * model.epsilon0 * t / T
    return ControlField(grid=grid, values=lam)


def linear_guess(model, K, T, steps=None):
    """Straight line connecting the first and last crossing positions."""
    M = steps if steps is not None else default_steps(model, T)
    grid = TimeGrid(T=T, M=M)
    lam_end = (K - 1) * model.epsilon0
    return ControlField(grid=grid, values=lam_end * grid.midpoints / T)


def sinusoidal_guess(model, K, T, steps=None):
    """Half-sine dipping to -(K-1)*epsilon0: parity deliberately flipped.

    Starts and ends at lam = 0 but swings to the opposite side of the
    crossing ladder, which makes it a poor seed by construction.
    """
    M = steps if steps is not None else default_steps(model, T)
    grid = TimeGrid(T=T, M=M)
    amp = (K - 1) * model.epsilon0
    return ControlField(grid=grid, values=-amp * np.sin(np.pi * grid.midpoints / T))


def default_switch_time(model, K, T):
    """Stage switch time splitting T proportionally to the plateau durations."""
    stage = np.array([np.pi / model.deltas[n] for n in range(K)])
    return float(T * stage[0] / stage.sum())


def rwa_field(model, T, t_m, lambda_A, omega=None, phi=0.0, phi_tilde=0.0, steps=None):
    """Two-plateau field with a cosine oscillation mounted on each plateau."""
    if not 0 < t_m < T:
        raise ValueError(f"switch time must satisfy 0 < t_m < T, got {t_m}")
    if omega is None:
        omega = model.epsilon0
    M = steps if steps is not None else default_steps(model, T)
    grid = TimeGrid(T=T, M=M)
    t = grid.midpoints
    first = lambda_A * np.cos(omega * t + phi)
    second = model.epsilon0 + lambda_A * np.cos(omega * (t - t_m) + phi_tilde)
    return ControlField(grid=grid, values=np.where(t < t_m, first, second))


def _rolling_median(x, window):
    """Median filter used as the plateau-baseline estimator.

    The median preserves sharp steps while rejecting an oscillation whose
    period is shorter than the window.
    """
    window = min(window, 2 * x.size - 1)
    if window % 2 == 0:
        window += 1
    half = window // 2
    # reflect so an oscillation keeps its statistics across the edges
    padded = np.pad(x, half, mode="reflect")
    out = np.empty_like(x)
    for i in range(x.size):
        out[i] = np.median(padded[i : i + window])
    return out


def dominant_frequency(field, baseline_window=None):
    """(f_eps, A_max) of the oscillation riding on a stepped field.

    f_eps is the location of the largest nonzero-frequency peak of the
    residual's averaged (Welch) periodogram, refined by parabolic
    interpolation.  Averaging short segments keeps the peak honest when the
    oscillation's envelope or phase changes across the field's plateaus;
    a single full-length DFT splits such a peak into sidelobes.  A_max is
    the largest excursion from a second baseline whose median window spans
    three detected periods, so the baseline neither tracks the oscillation
    nor wobbles with it.  A constant field is flagged with a warning and
    returns (0, 0).
    """
    v = field.values
    if np.ptp(v) == 0:
        warnings.warn("dominant_frequency called on a constant field")
        return 0.0, 0.0
    M = field.grid.M
    if baseline_window is None:
        baseline_window = max(5, M // 8)
    residual = v - _rolling_median(v, baseline_window)
    nperseg = max(16, min(M, M // 3))
    freqs, power = scipy.signal.welch(
        residual,
        fs=1.0 / field.grid.dt,
        window="hann",
        nperseg=nperseg,
        noverlap=nperseg // 2,
        nfft=max(1024, 8 * nperseg),
        detrend=False,
    )
    power[0] = 0.0
    k = int(np.argmax(power))
    f_eps = freqs[k]
    if 1 <= k < power.size - 1:
        ym, y0, yp = power[k - 1], power[k], power[k + 1]
        denom = ym - 2 * y0 + yp
        if denom != 0:
            f_eps += 0.5 * (ym - yp) / denom * (freqs[1] - freqs[0])
    if f_eps > 0:
        period_samples = 1.0 / (f_eps * field.grid.dt)
        window = min(M, max(5, int(round(3 * period_samples))))
        residual = v - _rolling_median(v, window)
    return float(f_eps), float(np.max(np.abs(residual)))

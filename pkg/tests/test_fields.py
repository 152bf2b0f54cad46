import io

import numpy as np
import pytest

from multiac.fields import (
    ControlField,
    TimeGrid,
    default_steps,
    default_switch_time,
    dominant_frequency,
    initial_guess,
    linear_guess,
    rwa_field,
    sinusoidal_guess,
    sudden_switch,
    sudden_switch_time,
)
from multiac.model import SpectrumModel

MODEL3 = SpectrumModel(N=3, epsilon0=10.0, deltas=(1.0, 1.0))


def test_grid_basics():
    g = TimeGrid(T=2.0, M=4)
    assert g.dt == 0.5
    assert np.allclose(g.times, [0, 0.5, 1.0, 1.5, 2.0])
    assert np.allclose(g.midpoints, [0.25, 0.75, 1.25, 1.75])


def test_grid_validation():
    with pytest.raises(ValueError):
        TimeGrid(T=1.0, M=1)
    with pytest.raises(ValueError):
        TimeGrid(T=0.0, M=10)


def test_field_shape_and_finiteness_checks():
    g = TimeGrid(T=1.0, M=4)
    with pytest.raises(ValueError):
        ControlField(grid=g, values=np.zeros(5))
    with pytest.raises(ValueError):
        ControlField(grid=g, values=np.array([0, 1, np.nan, 2.0]))


def test_field_csv_round_trip():
    rng = np.random.default_rng(2)
    f = ControlField(grid=TimeGrid(T=np.pi, M=37), values=rng.normal(size=37))
    buf = io.StringIO()
    f.to_csv(buf)
    buf.seek(0)
    g = ControlField.from_csv(buf)
    assert g.grid.M == 37
    assert abs(g.grid.T - np.pi) < 1e-14
    assert np.array_equal(g.values, f.values)


def test_sudden_switch_time_values():
    assert abs(sudden_switch_time(MODEL3, 1) - np.pi) < 1e-14
    assert abs(sudden_switch_time(MODEL3, 2) - 2 * np.pi) < 1e-14
    m = SpectrumModel(N=3, epsilon0=10.0, deltas=(1.0, 2.0))
    assert abs(sudden_switch_time(m, 2) - 1.5 * np.pi) < 1e-14
    with pytest.raises(ValueError):
        sudden_switch_time(MODEL3, 3)
    with pytest.raises(ValueError):
        sudden_switch_time(MODEL3, 0)


def test_default_steps_resolves_fast_scale():
    for e0 in [2.0, 10.0, 100.0]:
        m = SpectrumModel(N=3, epsilon0=e0, deltas=(1.0, 1.0))
        T = 2 * np.pi
        M = default_steps(m, T)
        assert M >= 128
        assert T / M <= (2 * np.pi / e0) / 40 + 1e-12


def test_sudden_switch_is_two_plateaus():
    f = sudden_switch(MODEL3, 2)
    vals = np.unique(f.values)
    assert np.allclose(vals, [0.0, 10.0])
    # equal couplings: switch exactly at T/2
    half = f.grid.M // 2
    assert np.all(f.values[:half] == 0.0)
    assert np.all(f.values[half:] == 10.0)


def test_smoothed_guess_reduces_to_sudden_switch():
    T = sudden_switch_time(MODEL3, 2)
    f = initial_guess(MODEL3, 2, T, smoothing=0.0, slope=0.0, steps=200)
    g = sudden_switch(MODEL3, 2, steps=200)
    assert np.allclose(f.values, g.values)


def test_smoothed_guess_stays_near_shape():
    T = sudden_switch_time(MODEL3, 2)
    f = initial_guess(MODEL3, 2, T)
    assert abs(f.values[0]) < 1e-3 * MODEL3.epsilon0 + 0.1 * MODEL3.epsilon0
    assert f.values[-1] > 0.9 * MODEL3.epsilon0
    assert np.all(np.diff(f.values) >= -1e-12)  # monotone ramp-up


def test_linear_guess_endpoints():
    f = linear_guess(MODEL3, 2, T=4.0, steps=100)
    assert f.values[0] < f.values[-1]
    assert abs(f.values[-1] - 10.0 * (1 - 0.5 / 100)) < 1e-12


def test_sinusoidal_guess_has_flipped_parity():
    f = sinusoidal_guess(MODEL3, 2, T=4.0, steps=100)
    assert np.all(f.values <= 0)
    assert abs(f.values.min() + 10.0) < 1e-2


def test_default_switch_time_splits_by_stage_duration():
    assert abs(default_switch_time(MODEL3, 2, 6.0) - 3.0) < 1e-14
    m = SpectrumModel(N=3, epsilon0=10.0, deltas=(1.0, 3.0))
    # stages pi and pi/3: first stage gets 3/4 of T
    assert abs(default_switch_time(m, 2, 8.0) - 6.0) < 1e-12


def test_rwa_field_plateaus_and_oscillation():
    T, t_m, lamA = 6.0, 3.0, 2.0
    f = rwa_field(MODEL3, T, t_m, lamA, steps=4000)
    t = f.grid.midpoints
    first = f.values[t < t_m]
    second = f.values[t >= t_m]
    assert np.all(np.abs(first) <= lamA + 1e-12)
    assert np.all(np.abs(second - 10.0) <= lamA + 1e-12)
    assert abs(np.max(first) - lamA) < 1e-3
    with pytest.raises(ValueError):
        rwa_field(MODEL3, T, T + 1.0, lamA)


def test_rwa_field_zero_amplitude_is_sudden_switch():
    T = 6.0
    f = rwa_field(MODEL3, T, 3.0, 0.0, steps=500)
    assert np.allclose(np.unique(f.values), [0.0, 10.0])


def test_dominant_frequency_flat_baseline():
    T, M = 2 * np.pi, 4096
    grid = TimeGrid(T=T, M=M)
    t = grid.midpoints
    f_true, amp = 10.0 / (2 * np.pi), 0.8
    f = ControlField(grid=grid, values=5.0 + amp * np.cos(2 * np.pi * f_true * t))
    f_eps, a_max = dominant_frequency(f)
    assert abs(f_eps - f_true) / f_true < 0.02
    assert abs(a_max - amp) < 0.05 * amp


def test_dominant_frequency_stepped_baseline():
    # the median baseline keeps the step out of the spectrum; the excursion
    # estimate can double right at the step, so only bracket it
    T, M = 2 * np.pi, 4096
    grid = TimeGrid(T=T, M=M)
    t = grid.midpoints
    f_true, amp = 10.0 / (2 * np.pi), 0.8
    base = np.where(t < T / 2, 0.0, 10.0)
    f = ControlField(grid=grid, values=base + amp * np.cos(2 * np.pi * f_true * t))
    f_eps, a_max = dominant_frequency(f)
    assert abs(f_eps - f_true) / f_true < 0.02
    assert amp * 0.95 <= a_max <= amp * 2.2


def test_dominant_frequency_constant_field_warns():
    f = ControlField(grid=TimeGrid(T=1.0, M=64), values=np.full(64, 3.0))
    with pytest.warns(UserWarning):
        f_eps, a_max = dominant_frequency(f)
    assert f_eps == 0.0 and a_max == 0.0

"""Command-line reproducibility harness.

Each subcommand reads one YAML config (plus optional key=value overrides),
runs deterministically, and writes CSV data plus convenience SVG plots into
the configured output directory.  The CSVs are the contract; plots are for
eyeballing.

Exit codes: 0 success, 2 config/usage error, 3 numerical-invariant
violation.
"""
import sys
from pathlib import Path

import click
import numpy as np

from .config import ConfigError, ExperimentConfig
from .fields import (
    default_switch_time,
    dominant_frequency,
    initial_guess,
    linear_guess,
    sinusoidal_guess,
    sudden_switch_time,
)
from .krotov import MonotonicityError, OptimizationProblem, optimize
from .linalg import UnitarityError
from .model import scan_spectrum
from .propagation import basis_state, propagate
from .qsl import estimate_qsl_relative, sweep_epsilon, sweep_K, sweep_to_csv
from .rwa import RwaParameters, calibrate_amplitude, compare_with_numeric

EXIT_NUMERICAL = 3


def _load_config(config_path, overrides):
    try:
        cfg = ExperimentConfig.load(config_path)
        if overrides:
            cfg = cfg.with_overrides(overrides)
        return cfg
    except (ConfigError, OSError) as exc:
        raise click.UsageError(str(exc))


def _outdir(cfg):
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _plot(fig, path):
    fig.savefig(path, format="svg")


def _mpl():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def _guess_for(cfg, model, T):
    steps = None
    if cfg.guess_family == "sudden-smooth":
        return initial_guess(
            model, cfg.K, T, smoothing=cfg.smoothing, slope=cfg.slope, steps=steps
        )
    if cfg.guess_family == "linear":
        return linear_guess(model, cfg.K, T, steps=steps)
    return sinusoidal_guess(model, cfg.K, T, steps=steps)


@click.group()
def main():
    """Desk-scale time-optimal control of multi-crossing level systems."""


@main.command()
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--set", "overrides", multiple=True, help="key=value config override")
def spectrum(config_path, overrides):
    """Write the energy spectrum vs control parameter."""
    cfg = _load_config(config_path, overrides)
    model = cfg.model()
    out = _outdir(cfg)
    span = max(model.epsilon0, 1.0)
    grid = np.linspace(-1.5 * span, (model.N - 0.5) * span, 801)
    scan = scan_spectrum(model, grid)
    scan.to_csv(out / "spectrum.csv")
    plt = _mpl()
    fig, ax = plt.subplots()
    for k in range(model.N):
        ax.plot(scan.lambdas, scan.energies[:, k])
    ax.set_xlabel("control parameter")
    ax.set_ylabel("energy")
    _plot(fig, out / "spectrum.svg")
    plt.close(fig)
    for n, (lam, gap) in enumerate(scan.ac_locations):
        click.echo(f"crossing {n}: lambda = {lam:.6g}, gap = {gap:.6g}")


def run_optimization(cfg):
    """One optimization run from a config; shared by the CLI and tests."""
    model = cfg.model()
    T = cfg.T_factor * sudden_switch_time(model, cfg.K)
    guess = _guess_for(cfg, model, T)
    problem = OptimizationProblem(
        model=model,
        psi0=basis_state(model.N, 0),
        goal=basis_state(model.N, cfg.K),
        T=T,
        guess=guess,
        alpha=cfg.alpha0,
        max_iters=cfg.max_iters,
        convergence_threshold=cfg.threshold,
    )
    record = optimize(problem)
    return model, guess, record


@main.command("optimize")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--set", "overrides", multiple=True, help="key=value config override")
def optimize_cmd(config_path, overrides):
    """Run one field optimization and dump its history and final field."""
    cfg = _load_config(config_path, overrides)
    out = _outdir(cfg)
    try:
        model, guess, record = run_optimization(cfg)
    except (MonotonicityError, UnitarityError) as exc:
        click.echo(f"numerical invariant violated: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    guess.to_csv(out / "field_initial.csv")
    record.final_field.to_csv(out / "field_final.csv")
    record.to_csv(out / "infidelity.csv")
    traj = propagate(model, record.final_field, basis_state(model.N, 0))
    traj.to_csv(out / "populations.csv")
    f_eps, a_max = dominant_frequency(record.final_field)
    with open(out / "summary.csv", "w") as fh:
        fh.write("converged,iterations,final_infidelity,f_eps,A_max\n")
        fh.write(
            f"{int(record.converged)},{record.iterations_used},"
            f"{record.infidelities[-1]:.17g},{f_eps:.17g},{a_max:.17g}\n"
        )
    plt = _mpl()
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(6, 7))
    ax1.plot(guess.grid.midpoints, guess.values, label="guess")
    ax1.plot(record.final_field.grid.midpoints, record.final_field.values,
             label="optimized")
    ax1.set_xlabel("t")
    ax1.set_ylabel("control field")
    ax1.legend()
    ax2.semilogy(record.infidelities)
    ax2.set_xlabel("iteration")
    ax2.set_ylabel("infidelity")
    _plot(fig, out / "optimize.svg")
    plt.close(fig)
    click.echo(
        f"converged={record.converged} iterations={record.iterations_used} "
        f"infidelity={record.infidelities[-1]:.3e} f_eps={f_eps:.4g} A_max={a_max:.4g}"
    )


@main.command("qsl-sweep")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--set", "overrides", multiple=True, help="key=value config override")
def qsl_sweep(config_path, overrides):
    """Sweep total time, crossing distance, or process order."""
    cfg = _load_config(config_path, overrides)
    out = _outdir(cfg)
    model = cfg.model()
    kw = dict(
        alpha=cfg.alpha0,
        max_iters=cfg.max_iters,
        threshold=cfg.threshold,
        workers=cfg.workers,
    )
    try:
        if cfg.sweep_kind == "time":
            est = estimate_qsl_relative(
                model,
                cfg.K,
                factors=(cfg.sweep_lo, cfg.sweep_hi),
                grid_points=cfg.sweep_points,
                **kw,
            )
            TS = sudden_switch_time(model, cfg.K)
            rows = [
                {
                    "K": cfg.K,
                    "T_qsl": est.T_qsl,
                    "T_S": TS,
                    "ratio": est.T_qsl / TS,
                    "resolution": est.resolution,
                }
            ]
            with open(out / "classifications.csv", "w") as fh:
                fh.write("T,classification\n")
                for T, cl in zip(est.T_values, est.classifications):
                    fh.write(f"{T:.17g},{cl}\n")
        elif cfg.sweep_kind == "epsilon":
            if not cfg.sweep_values:
                raise click.UsageError("epsilon sweep needs sweep_values")
            family = lambda e0: cfg.model().__class__(
                N=cfg.N, epsilon0=float(e0), deltas=tuple(cfg.deltas)
            )
            rows = sweep_epsilon(
                family,
                cfg.K,
                cfg.sweep_values,
                factors=(cfg.sweep_lo, cfg.sweep_hi),
                grid_points=cfg.sweep_points,
                **kw,
            )
        else:
            if not cfg.sweep_values:
                raise click.UsageError("K sweep needs sweep_values")
            rows = sweep_K(
                cfg.epsilon0,
                cfg.deltas[0],
                [int(k) for k in cfg.sweep_values],
                factors=(cfg.sweep_lo, cfg.sweep_hi),
                grid_points=cfg.sweep_points,
                **kw,
            )
    except (MonotonicityError, UnitarityError) as exc:
        click.echo(f"numerical invariant violated: {exc}", err=True)
        sys.exit(EXIT_NUMERICAL)
    sweep_to_csv(rows, out / "qsl_sweep.csv")
    plt = _mpl()
    fig, ax = plt.subplots()
    xkey = "epsilon0" if cfg.sweep_kind == "epsilon" else "K"
    ax.plot([r[xkey] for r in rows], [r["ratio"] for r in rows], "o-")
    ax.set_xlabel(xkey)
    ax.set_ylabel("T_qsl / T_S")
    _plot(fig, out / "qsl_sweep.svg")
    plt.close(fig)
    for r in rows:
        click.echo(",".join(f"{k}={v}" for k, v in r.items()))


@main.command("rwa-compare")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--set", "overrides", multiple=True, help="key=value config override")
def rwa_compare(config_path, overrides):
    """Analytic two-stage propagator vs numeric propagation, same field."""
    cfg = _load_config(config_path, overrides)
    if cfg.N != 3 or cfg.K != 2:
        raise click.UsageError("the analytic comparison is defined for N=3, K=2")
    out = _outdir(cfg)
    model = cfg.model()
    T = cfg.T_factor * sudden_switch_time(model, 2)
    t_m = (cfg.t_m_factor * T if cfg.t_m_factor is not None
           else default_switch_time(model, 2, T))
    lambda_A = (cfg.lambda_A if cfg.lambda_A is not None
                else calibrate_amplitude(model, T, t_m))
    params = RwaParameters(lambda_A=lambda_A, omega=model.epsilon0, t_m=t_m, T=T)
    times, analytic, numeric, max_dev = compare_with_numeric(model, params)
    with open(out / "rwa_traces.csv", "w") as fh:
        heads = [f"P_{k}_analytic" for k in range(3)] + [
            f"P_{k}_numeric" for k in range(3)
        ]
        fh.write("t," + ",".join(heads) + "\n")
        for i, t in enumerate(times):
            vals = list(analytic[i]) + list(numeric[i])
            fh.write(",".join(f"{x:.17g}" for x in (t, *vals)) + "\n")
    with open(out / "rwa_summary.csv", "w") as fh:
        fh.write("lambda_A,t_m,T,max_deviation\n")
        fh.write(f"{lambda_A:.17g},{t_m:.17g},{T:.17g},{max_dev:.17g}\n")
    plt = _mpl()
    fig, ax = plt.subplots()
    for k in range(3):
        ax.plot(times, numeric[:, k], label=f"P_{k} numeric")
        ax.plot(times, analytic[:, k], "--", label=f"P_{k} analytic")
    ax.set_xlabel("t")
    ax.set_ylabel("population")
    ax.legend(fontsize=7)
    _plot(fig, out / "rwa_compare.svg")
    plt.close(fig)
    click.echo(f"lambda_A={lambda_A:.6g} max_deviation={max_dev:.4g}")


if __name__ == "__main__":
    main()

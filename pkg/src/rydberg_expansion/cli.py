"""
Command Line Module

Click front end. Every sub-command resolves a scenario, runs it and writes one
CSV or JSON artifact.

Usage:
    rydberg-expansion gamma-table --preset table1
    rydberg-expansion pexc --preset fig1 --format json
    rydberg-expansion density-sweep -c scenario.env --set rho=1e10

Exit status: 0 on success, 2 for configuration errors, 3 for numerical failures.
"""
import logging
import math
import sys

import click
import numpy as np
import pandas as pd

import rydberg_expansion
from rydberg_expansion import config as scenario_config
from rydberg_expansion.correlation import (
    chirp_family,
    correlation_family,
    correlation_peak,
    detuning_family,
    has_positive_correlation,
)
from rydberg_expansion.data import write_artifact
from rydberg_expansion.errors import ConfigError, DivergentIntegralError, NumericalError
from rydberg_expansion.expansion import (
    expand,
    gamma_constant,
    i4_averaged,
    i4_montecarlo,
    pexc_series,
)
from rydberg_expansion.interactions import AngularForm, InteractionKernel
from rydberg_expansion.oracle import propagate, trajectory_frame
from rydberg_expansion.pulse import PulseShape, pulse_area
from rydberg_expansion.saturation import SaturationModel, density_sweep, intensity_sweep

_logger = logging.getLogger(__name__)

EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

GAMMA_KERNELS = (
    ("isotropic_c3", InteractionKernel(3, 1.0)),
    ("aligned_dipole", InteractionKernel(3, 1.0, AngularForm.ALIGNED_DIPOLE)),
    ("c6", InteractionKernel(6, 1.0)),
)


def _gamma_table(cfg):
    rows = []
    for shape in PulseShape:
        row = {"pulse": shape.value}
        for name, kernel in GAMMA_KERNELS:
            row[name] = gamma_constant(shape, kernel)
        rows.append(row)
    return pd.DataFrame(rows), {}


def _gas_model(cfg):
    pulse, kernel = cfg.pulse(), cfg.kernel()
    gamma = gamma_constant(pulse.shape, kernel, pulse=pulse)
    return pulse, kernel, SaturationModel.from_inputs(gamma, cfg["rho"], kernel, pulse.T)


def _pexc(cfg):
    pulse, kernel, model = _gas_model(cfg)
    x = np.linspace(0.0, cfg["intensity.max"], cfg["intensity.points"])
    frame = intensity_sweep(model, x).rename(columns={"P": "P_model"})
    frame.insert(2, "P_series", pexc_series(pulse, kernel, cfg["rho"], x, warn=False))
    summary = dict(model.to_record(), W=pulse_area(pulse))
    summary.update(expand(pulse, kernel=kernel, rho=cfg["rho"]).to_record())
    return frame, summary


def _saturation(cfg):
    _, _, model = _gas_model(cfg)
    return pd.DataFrame([model.to_record()]), {}


def _density_sweep(cfg):
    pulse, kernel, model = _gas_model(cfg)
    grid = np.linspace(0.0, cfg["rho"], cfg["density.points"])
    return density_sweep(model.gamma, kernel, pulse.T, grid), {"gamma": model.gamma}


def _correlation(cfg):
    pulse, kernel = cfg.pulse(), cfg.kernel()
    positive = [g * 1e6 for g in cfg["correlation.bandwidths_mhz"]]
    negative = [g * 1e6 for g in cfg["correlation.negative_bandwidths_mhz"]]
    detunings = [d * 1e6 for d in cfg["correlation.detunings_mhz"]]
    if positive or negative:
        base = cfg["pulse.bandwidth_mhz"]
        if base is None:
            raise ConfigError([("pulse.bandwidth_mhz", None,
                                "a chirp family needs the base bandwidth")])
        family = chirp_family(base * 1e6, positive, negative, pulse.shape)
    elif detunings:
        family = detuning_family(pulse, detunings)
    else:
        family = [(pulse.shape.value, pulse)]
    grid = np.geomspace(cfg["correlation.r_min_um"], cfg["correlation.r_max_um"],
                        cfg["correlation.points"])
    theta = math.radians(cfg["correlation.theta_deg"])
    curves = correlation_family(family, kernel, grid, theta=theta, workers=cfg.workers)
    summary = {}
    for curve in curves:
        r_peak, p_peak = correlation_peak(curve, kernel, theta=theta)
        summary[f"{curve.label}.peak_R_um"] = r_peak
        summary[f"{curve.label}.peak_P"] = p_peak
        summary[f"{curve.label}.positive"] = has_positive_correlation(curve)
    return pd.concat([curve.to_frame() for curve in curves], ignore_index=True), summary


def _oracle(cfg):
    pulse = cfg.pulse()
    n = cfg["oracle.n_atoms"]
    couplings = np.full((n, n), cfg["oracle.coupling"])
    np.fill_diagonal(couplings, 0.0)
    times = np.linspace(pulse.tau0, pulse.tau_end, cfg["oracle.points"])
    trajectory = propagate(n, couplings, pulse, cfg["oracle.omega"], times,
                           hard_blockade=cfg["oracle.hard_blockade"])
    omega = cfg["oracle.omega"]
    series = expand(pulse, couplings=couplings[0, 1:])
    summary = {"P_final": float(trajectory.populations()[-1, 0]),
               "P_series": series.c2 * omega ** 2 + series.c4 * omega ** 4}
    return trajectory_frame(trajectory), summary


def _mc_validate(cfg):
    pulse, kernel = cfg.pulse(), cfg.kernel()
    try:
        averaged = i4_averaged(pulse, kernel, cfg["rho"])
    except DivergentIntegralError as error:
        _logger.warning("No gas average to compare with: %s", error)
        averaged = None
    estimate = i4_montecarlo(pulse, kernel, cfg["rho"], cfg["mc.geometry"],
                             cfg["mc.samples"], cfg.seed, n_atoms=cfg["mc.n_atoms"],
                             padding=cfg["mc.padding"], workers=cfg.workers,
                             progress=cfg["progress"])
    record = estimate.to_record()
    if averaged is None:
        record["averaged"] = math.nan
        return pd.DataFrame([record]), {"averaged": "divergent"}
    record.update(averaged=averaged,
                  deviation_sigma=(estimate.mean - averaged) / estimate.stderr
                  if estimate.stderr > 0 else 0.0)
    return pd.DataFrame([record]), {}


HANDLERS = {
    "gamma-table": _gamma_table,
    "pexc": _pexc,
    "correlation": _correlation,
    "saturation": _saturation,
    "density-sweep": _density_sweep,
    "oracle": _oracle,
    "mc-validate": _mc_validate,
}

HELP = {
    "gamma-table": "Blockade constant gamma for every pulse shape and kernel.",
    "pexc": "Excitation fraction against I / I_sat.",
    "correlation": "Pair correlation P(R) for one pulse or a pulse family.",
    "saturation": "Saturated excitation fraction of a gas.",
    "density-sweep": "Saturated excitation fraction against density.",
    "oracle": "Exact propagation of a few uniformly coupled atoms.",
    "mc-validate": "Monte Carlo estimate of I4 against the ensemble average.",
}


def validate(command, **options):
    """Resolves and validates a scenario without running it."""
    return scenario_config.resolve(command, **options)


def run_scenario(cfg):
    """
    Runs a resolved scenario and writes its artifact.

    Returns:
        Path: The written artifact.
    """
    _logger.info("Running %s (preset %s)", cfg.command, cfg.preset)
    frame, summary = HANDLERS[cfg.command](cfg)
    return write_artifact(frame, cfg.output_path(), cfg.as_dict(), summary, cfg.fmt)


@click.group()
@click.option("--quiet", "log_level", flag_value=logging.WARNING, default=True)
@click.option("-v", "--verbose", "log_level", flag_value=logging.INFO)
@click.option("-vv", "--very-verbose", "log_level", flag_value=logging.DEBUG)
@click.version_option(rydberg_expansion.__version__)
def main(log_level: int):
    """Low-intensity expansion of Rydberg excitation dynamics."""
    logging.basicConfig(
        stream=sys.stdout,
        level=log_level,
        datefmt="%Y-%m-%d %H:%M",
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )


def _make_command(name):
    @main.command(name=name, help=HELP[name])
    @click.option("--preset", help="named parameter set")
    @click.option("-c", "--config", "config_path", type=click.Path(exists=True),
                  help="path to key=value config file")
    @click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
                  help="override one configuration key")
    @click.option("--out", "output", type=click.Path(dir_okay=False),
                  help="artifact path")
    @click.option("--format", "fmt", type=click.Choice(scenario_config.FORMATS))
    @click.option("--workers", type=int)
    @click.option("--seed", type=int)
    @click.option("--check", is_flag=True, help="validate and print the configuration")
    def command(preset, config_path, overrides, output, fmt, workers, seed, check):
        try:
            cfg = validate(name, preset=preset, config_path=config_path,
                           overrides=overrides, seed=seed, workers=workers,
                           output=output, fmt=fmt)
        except ConfigError as exc:
            for line in exc.describe():
                click.echo(f"error: {line}", err=True)
            sys.exit(EXIT_CONFIG)

        if check:
            for key, value in sorted(cfg.as_dict().items()):
                click.echo(f"{key} = {value}")
            return
        try:
            path = run_scenario(cfg)
        except ConfigError as exc:
            for line in exc.describe():
                click.echo(f"error: {line}", err=True)
            sys.exit(EXIT_CONFIG)
        except NumericalError as exc:
            _logger.error("%s failed: %s", name, exc)
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_NUMERICAL)
        click.echo(str(path))

    return command


for _name in scenario_config.COMMANDS:
    _make_command(_name)


if __name__ == "__main__":
    main()

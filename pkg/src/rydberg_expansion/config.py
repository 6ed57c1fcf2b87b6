"""
Scenario Configuration Module

A scenario is one command plus a flat set of dotted keys (``pulse.shape``,
``kernel.c_au``, ``rho``, ...). Values are resolved in the order preset, config file,
``--set KEY=VALUE`` overrides, explicit flags, then validated into a frozen
:class:`ScenarioConfig`.

Config files use the ``key=value`` syntax of '.env' files and are read with the
python-dotenv parser, so diagnostics can name the offending line.

Functions:
    - read_config_file: Parses a config file into (key, value, line) triples.
    - resolve: Merges all sources and validates them.

Usage:
    from rydberg_expansion.config import resolve
    config = resolve("pexc", preset="fig1", overrides=["rho=1e10"])
"""
import math
from dataclasses import dataclass, field
from pathlib import Path

from dotenv.parser import parse_stream

from rydberg_expansion import environment, paths
from rydberg_expansion.errors import BandwidthError, ConfigError
from rydberg_expansion.interactions import AngularForm, Geometry, InteractionKernel
from rydberg_expansion.presets import PRESETS, preset_names
from rydberg_expansion.pulse import PulseShape, PulseSpec, duration_from_bandwidth

COMMANDS = ("gamma-table", "pexc", "correlation", "saturation", "density-sweep",
            "oracle", "mc-validate")
FORMATS = ("csv", "json")


def _text(value):
    return str(value).strip()


def _float(value):
    number = float(_text(value))
    if not math.isfinite(number):
        raise ValueError("expected a finite number")
    return number


def _positive(value):
    number = _float(value)
    if number <= 0.0:
        raise ValueError("must be positive")
    return number


def _non_negative(value):
    number = _float(value)
    if number < 0.0:
        raise ValueError("must be non-negative")
    return number


def _count(value):
    text = _text(value)
    try:
        number = int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None
    if number < 1:
        raise ValueError("must be at least 1")
    return number


def _integer(value):
    text = _text(value)
    try:
        return int(text)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


def _choice(*allowed):
    def parse(value):
        text = _text(value)
        if text not in allowed:
            raise ValueError(f"expected one of {', '.join(allowed)}, got {text!r}")
        return text
    return parse


def _int_choice(*allowed):
    def parse(value):
        number = _integer(value)
        if number not in allowed:
            raise ValueError(f"expected one of {', '.join(map(str, allowed))}, got {number}")
        return number
    return parse


def _float_list(value):
    if isinstance(value, (list, tuple)):
        return tuple(_float(item) for item in value)
    text = _text(value)
    return tuple(_float(item) for item in text.split(",") if item.strip())


def _flag(value):
    text = _text(value).lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


@dataclass(frozen=True)
class Option:
    parse: object
    default: object = None
    help: str = ""


OPTIONS = {
    "pulse.shape": Option(_choice(*(s.value for s in PulseShape)), "gaussian",
                          "envelope shape"),
    "pulse.T": Option(_positive, None, "duration scale T in seconds"),
    "pulse.bandwidth_mhz": Option(_positive, None, "spectral FWHM in MHz"),
    "pulse.base_bandwidth_mhz": Option(_positive, None,
                                       "transform-limited part of the bandwidth"),
    "pulse.chirp_sign": Option(_int_choice(1, -1), 1, "sign of the chirp"),
    "pulse.chirp": Option(_float, 0.0, "chirp coefficient when T is given"),
    "pulse.detuning_mhz": Option(_float, 0.0, "detuning Delta / 2 pi in MHz"),
    "pulse.window": Option(_positive, 4.0, "half width of the Gaussian window"),
    "kernel.s": Option(_int_choice(3, 6), 6, "interaction exponent"),
    "kernel.c_au": Option(_float, None, "signed C_s in atomic units"),
    "kernel.angular": Option(_choice(*(a.value for a in AngularForm)), "isotropic",
                             "angular form"),
    "rho": Option(_non_negative, None, "density in cm^-3"),
    "intensity.max": Option(_positive, 1.0, "largest I / I_sat of the curve"),
    "intensity.points": Option(_count, 201, "points of the intensity grid"),
    "density.points": Option(_count, 101, "points of the density grid up to rho"),
    "correlation.r_min_um": Option(_positive, 0.5, "smallest separation"),
    "correlation.r_max_um": Option(_positive, 20.0, "largest separation"),
    "correlation.points": Option(_count, 200, "points of the separation grid"),
    "correlation.theta_deg": Option(_float, 0.0, "angle to the dipole axis"),
    "correlation.bandwidths_mhz": Option(_float_list, (), "positive chirp family"),
    "correlation.negative_bandwidths_mhz": Option(_float_list, (),
                                                  "negative chirp family"),
    "correlation.detunings_mhz": Option(_float_list, (), "detuning family"),
    "oracle.n_atoms": Option(_count, 3, "number of atoms"),
    "oracle.coupling": Option(_float, 1.0, "scaled coupling of every pair"),
    "oracle.omega": Option(_float, 1.0, "scaled Rabi amplitude"),
    "oracle.points": Option(_count, 101, "output times"),
    "oracle.hard_blockade": Option(_positive, 1e5, "|k| treated as infinite"),
    "mc.samples": Option(_count, 200, "number of sampled ensembles"),
    "mc.geometry": Option(_choice(*(g.value for g in Geometry)), "sphere",
                          "sampling region"),
    "mc.n_atoms": Option(_count, None, "atoms per ensemble"),
    "mc.padding": Option(_positive, 5.0, "region radius in blockade radii"),
    "progress": Option(_flag, False, "show progress bars"),
}

# keys that must be set for each command, besides the pulse duration
REQUIRED = {
    "gamma-table": (),
    "pexc": ("kernel.c_au", "rho"),
    "correlation": ("kernel.c_au",),
    "saturation": ("kernel.c_au", "rho"),
    "density-sweep": ("kernel.c_au", "rho"),
    "oracle": (),
    "mc-validate": ("kernel.c_au", "rho"),
}


@dataclass(frozen=True)
class ScenarioConfig:
    """Fully resolved scenario; ``settings`` holds every key of OPTIONS."""

    command: str
    settings: dict = field(repr=False)
    preset: str = None
    seed: int = 0
    workers: int = 1
    output: Path = None
    fmt: str = "csv"

    def __getitem__(self, key):
        return self.settings[key]

    def as_dict(self):
        """Resolved configuration echoed into every artifact."""
        record = {"command": self.command, "preset": self.preset, "seed": self.seed,
                  "workers": self.workers, "format": self.fmt}
        for key, value in self.settings.items():
            record[key] = list(value) if isinstance(value, tuple) else value
        return record

    def pulse(self):
        """PulseSpec from either ``pulse.T`` or ``pulse.bandwidth_mhz``."""
        s = self.settings
        shape = PulseShape(s["pulse.shape"])
        window = {}
        if shape is PulseShape.GAUSSIAN:
            window = {"tau0": -s["pulse.window"], "tau_end": s["pulse.window"]}
        if s["pulse.T"] is not None:
            pulse = PulseSpec(shape, s["pulse.T"], chirp=s["pulse.chirp"], **window)
        else:
            gamma = s["pulse.bandwidth_mhz"] * 1e6
            base = s["pulse.base_bandwidth_mhz"]
            fraction = 0.0
            if base is not None:
                fraction = s["pulse.chirp_sign"] * (1.0 - base * 1e6 / gamma)
            pulse = duration_from_bandwidth(shape, gamma, fraction, **window)
        if s["pulse.detuning_mhz"]:
            pulse = pulse.with_detuning(s["pulse.detuning_mhz"] * 1e6)
        return pulse

    def kernel(self):
        s = self.settings
        if s["kernel.c_au"] in (None, 0.0):
            return InteractionKernel.non_interacting(s["kernel.s"])
        return InteractionKernel(s["kernel.s"], s["kernel.c_au"], s["kernel.angular"])

    def output_path(self):
        if self.output is not None:
            return Path(self.output)
        name = self.preset or self.command
        return paths.output_dir() / f"{name}.{self.fmt}"


def read_config_file(path):
    """
    Reads ``key=value`` bindings from ``path``.

    Returns:
        list: (key, value, line) triples in file order.

    Raises:
        ConfigError: For unreadable lines or keys without a value.
    """
    bindings, problems = [], []
    with open(path, encoding="utf-8") as stream:
        for binding in parse_stream(stream):
            line = binding.original.line
            if binding.error:
                problems.append(("config", line,
                                 f"cannot parse {binding.original.string.strip()!r}"))
            elif binding.key is None:
                continue
            elif binding.value is None:
                problems.append((binding.key, line, "missing value"))
            else:
                bindings.append((binding.key, binding.value, line))
    if problems:
        raise ConfigError(problems)
    return bindings


def _split_override(text):
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError([("--set", None, f"expected KEY=VALUE, got {text!r}")])
    return key.strip(), value.strip()


def _check_semantics(command, settings, problems):
    for key in REQUIRED[command]:
        if settings[key] is None:
            problems.append((key, None, f"required by the {command} command"))

    needs_pulse = command != "gamma-table"
    has_T = settings["pulse.T"] is not None
    has_gamma = settings["pulse.bandwidth_mhz"] is not None
    if needs_pulse and has_T == has_gamma:
        problems.append(("pulse.T", None, "set exactly one of pulse.T and "
                                          "pulse.bandwidth_mhz"))
    base = settings["pulse.base_bandwidth_mhz"]
    if base is not None and has_gamma and base > settings["pulse.bandwidth_mhz"]:
        problems.append(("pulse.base_bandwidth_mhz", None,
                         "transform-limited part exceeds the bandwidth"))
    aligned = settings["kernel.angular"] == AngularForm.ALIGNED_DIPOLE.value
    if aligned and settings["kernel.s"] != 3:
        problems.append(("kernel.angular", None, "aligned dipoles need kernel.s = 3"))
    if settings["kernel.c_au"] == 0.0 and "kernel.c_au" in REQUIRED[command]:
        problems.append(("kernel.c_au", None, "must be non-zero"))
    if settings["correlation.r_min_um"] >= settings["correlation.r_max_um"]:
        problems.append(("correlation.r_min_um", None, "must be below r_max_um"))
    if command == "oracle":
        limit = environment.oracle_max_atoms()
        if settings["oracle.n_atoms"] > limit:
            problems.append(("oracle.n_atoms", None,
                             f"at most {limit} atoms (RYDBERG_ORACLE_MAX_N)"))


def resolve(command, *, preset=None, config_path=None, overrides=(), seed=None,
            workers=None, output=None, fmt=None):
    """
    Merges preset, config file, overrides and flags into a ScenarioConfig.

    Args:
        command (str): One of COMMANDS.
        preset (str): Name from presets.PRESETS.
        config_path (str or Path): key=value file.
        overrides (iterable): ``KEY=VALUE`` strings.
        seed, workers, output, fmt: Explicit flags; None keeps earlier values.

    Returns:
        ScenarioConfig: Validated configuration.

    Raises:
        ConfigError: Listing every problem found.
    """
    if command not in COMMANDS:
        raise ConfigError([("command", None, f"unknown command {command!r}; "
                                             f"available: {', '.join(COMMANDS)}")])
    raw = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError([("preset", None, f"unknown preset {preset!r}; "
                                                f"available: {', '.join(preset_names())}")])
        values = dict(PRESETS[preset])
        owner = values.pop("command")
        if owner != command:
            raise ConfigError([("preset", None,
                                f"preset {preset!r} belongs to the {owner} command")])
        raw.update({key: (value, None) for key, value in values.items()})
    if config_path is not None:
        raw.update({key: (value, line) for key, value, line in read_config_file(config_path)})
    for text in overrides:
        key, value = _split_override(text)
        raw[key] = (value, None)

    flags = {"seed": seed, "workers": workers, "output": output, "format": fmt}
    for key in flags:
        if key in raw and flags[key] is None:
            flags[key] = raw[key][0]
    problems = []
    settings = {}
    for key, (value, line) in raw.items():
        if key not in OPTIONS and key not in flags:
            problems.append((key, line, "unknown key"))
    for key, option in OPTIONS.items():
        if key not in raw:
            settings[key] = option.default
            continue
        value, line = raw[key]
        try:
            settings[key] = option.parse(value)
        except ValueError as exc:
            problems.append((key, line, str(exc)))
            settings[key] = option.default

    try:
        seed_value = 0 if flags["seed"] is None else _integer(flags["seed"])
        if seed_value < 0:
            raise ValueError("must be non-negative")
    except ValueError as exc:
        problems.append(("seed", None, str(exc)))
        seed_value = 0
    try:
        workers_value = (environment.default_workers() if flags["workers"] is None
                         else _count(flags["workers"]))
    except ValueError as exc:
        problems.append(("workers", None, str(exc)))
        workers_value = 1
    fmt_value = "csv" if flags["format"] is None else _text(flags["format"])
    if fmt_value not in FORMATS:
        problems.append(("format", None, f"expected one of {', '.join(FORMATS)}"))

    if not problems:
        _check_semantics(command, settings, problems)
    config = ScenarioConfig(command, settings, preset, seed_value, workers_value,
                            None if flags["output"] is None else Path(flags["output"]),
                            fmt_value)
    if not problems and command != "gamma-table":
        for name, build in (("pulse", config.pulse), ("kernel", config.kernel)):
            try:
                build()
            except (BandwidthError, ValueError) as exc:
                problems.append((name, None, str(exc)))
    if problems:
        raise ConfigError(problems)
    return config

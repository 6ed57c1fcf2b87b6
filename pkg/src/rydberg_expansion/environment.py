"""
Environment Settings Module

This module loads key-value pairs from a '.env' file located in the current directory
and exposes the process-wide settings read from the environment.

Functions:
    - env_int: Reads a positive integer setting from the environment.
    - default_workers: Worker count used when a scenario does not set one.
    - max_atoms: Largest atom ensemble that will be sampled.
    - oracle_max_atoms: Largest atom number the exact propagator accepts.

Variables:
    - RYDBERG_OUTPUT_DIR: Directory for artifacts (see paths.output_dir).
    - RYDBERG_WORKERS: Default worker count.
    - RYDBERG_MAX_ATOMS: Atom-count cap for ensembles.
    - RYDBERG_ORACLE_MAX_N: Atom-count cap for the exact propagator.

Note:
    The '.env' file is optional; process environment variables take precedence.
"""
import os

from dotenv import load_dotenv

from rydberg_expansion.errors import ConfigError

# load key-value pairs from .env file located in the current directory
load_dotenv(".env")

DEFAULT_MAX_ATOMS = 2_000_000
DEFAULT_ORACLE_MAX_ATOMS = 14


def env_int(name, default):
    """
    Reads a positive integer from the environment.

    Args:
        name (str): Variable name.
        default (int): Value when the variable is unset or empty.

    Returns:
        int: The setting.
    """
    text = os.environ.get(name, "").strip()
    if not text:
        return default
    try:
        value = int(text)
    except ValueError:
        raise ConfigError([(name, None, f"expected an integer, got {text!r}")]) from None
    if value < 1:
        raise ConfigError([(name, None, "must be at least 1")])
    return value


def default_workers():
    return env_int("RYDBERG_WORKERS", 1)


def max_atoms():
    return env_int("RYDBERG_MAX_ATOMS", DEFAULT_MAX_ATOMS)


def oracle_max_atoms():
    return env_int("RYDBERG_ORACLE_MAX_N", DEFAULT_ORACLE_MAX_ATOMS)

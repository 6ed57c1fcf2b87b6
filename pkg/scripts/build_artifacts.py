#!/usr/bin/env python
import logging
import sys
from pathlib import Path

import click

import rydberg_expansion
from rydberg_expansion.cli import run_scenario, validate
from rydberg_expansion.paths import DATA_DIR
from rydberg_expansion.presets import PRESETS, preset_names


@click.command()
@click.option(
    "-o",
    "--out-dir",
    "out_dir",
    type=click.Path(file_okay=False),
    default=str(DATA_DIR),
    show_default=True,
    help="directory receiving one artifact per preset",
)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default="csv")
@click.option("--only", multiple=True, type=click.Choice(preset_names()),
              help="restrict to these presets")
@click.option("--quiet", "log_level", flag_value=logging.WARNING, default=True)
@click.option("-v", "--verbose", "log_level", flag_value=logging.INFO)
@click.option("-vv", "--very-verbose", "log_level", flag_value=logging.DEBUG)
@click.version_option(rydberg_expansion.__version__)
def main(out_dir: str, fmt: str, only: tuple, log_level: int):
    """Regenerates the artifact of every preset."""
    logging.basicConfig(
        stream=sys.stdout,
        level=log_level,
        datefmt="%Y-%m-%d %H:%M",
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )
    failures = 0
    for name in only or preset_names():
        output = Path(out_dir) / f"{name}.{fmt}"
        try:
            cfg = validate(PRESETS[name]["command"], preset=name, output=output, fmt=fmt)
            path = run_scenario(cfg)
            logging.info("Successfully saved preset %s to %s.", name, path)
        except Exception:
            failures += 1
            logging.exception("Preset %s failed.", name)
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()

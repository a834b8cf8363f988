#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
Toy Waves - a verification lab for a damped toy water-wave model.

This is the main entry point for the application.
"""

import logging
import sys
from typing import Optional, Sequence

import click

from .core.errors import ConfigError
from .utils.config import RunConfig, emit_config, load_config, parse_assignments
from .utils.experiments import EXIT_USAGE, EXPERIMENTS, run, sweep

logger = logging.getLogger(__name__)

LOG_LEVELS = (logging.WARNING, logging.INFO, logging.DEBUG)


def _load(config_path: Optional[str], assignments: Sequence[str]) -> RunConfig:
    config = load_config(config_path)
    if assignments:
        logger.debug("Applying %d overrides", len(assignments))
        config = config.with_overrides(parse_assignments(assignments))
    return config


def _fail(exc: ConfigError):
    click.echo(f"Error: {exc}", err=True)
    sys.exit(EXIT_USAGE)


config_option = click.option("--config", "config_path", type=click.Path(dir_okay=False),
                             help="Configuration document.")
set_option = click.option("--set", "assignments", multiple=True, metavar="KEY=VALUE",
                          help="Override a configuration key (repeatable).")
out_option = click.option("--out", "out_dir", type=click.Path(file_okay=False),
                          help="Output directory (overrides run.output).")


@click.group()
@click.option("-v", "--verbose", count=True, help="More logging (-v info, -vv debug).")
def cli(verbose: int):
    """Damped toy water-wave simulator and verification lab."""
    logging.basicConfig(
        level=LOG_LEVELS[min(verbose, len(LOG_LEVELS) - 1)],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


@cli.command("run")
@config_option
@set_option
@out_option
@click.option("--record-baselines", is_flag=True,
              help="Write measured bands into the committed baseline file.")
def run_command(config_path, assignments, out_dir, record_baselines):
    """Run the configured experiment."""
    try:
        config = _load(config_path, assignments)
    except ConfigError as exc:
        _fail(exc)
    sys.exit(run(config, out_dir, record_baselines))


@cli.command("sweep")
@config_option
@set_option
@out_option
@click.option("--param", "parameter", required=True, help="Key to sweep.")
@click.option("--values", "values", required=True, help="Comma-separated values.")
@click.option("--threads", type=int, default=None, help="Worker threads (default TOYWAVES_THREADS).")
def sweep_command(config_path, assignments, out_dir, parameter, values, threads):
    """Run the configured experiment once per parameter value."""
    try:
        config = _load(config_path, assignments)
        result = sweep(config, parameter, [v.strip() for v in values.split(",") if v.strip()],
                       out_dir, threads)
    except ConfigError as exc:
        _fail(exc)
    if result.slope is not None:
        click.echo(f"log-log slope: {result.slope:.6g}")
    sys.exit(result.exit_code)


@cli.command("show-config")
@config_option
@set_option
def show_config_command(config_path, assignments):
    """Print the effective configuration document."""
    try:
        config = _load(config_path, assignments)
    except ConfigError as exc:
        _fail(exc)
    click.echo(emit_config(config), nl=False)


@cli.command("list")
def list_command():
    """List the available experiments."""
    for name, experiment in EXPERIMENTS.items():
        click.echo(f"{name:18s} {experiment.description}")


def main():
    """
    Main entry point.
    """
    cli()


if __name__ == "__main__":
    main()

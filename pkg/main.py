"""
Command line entry point for the complex multiplicative cascade toolkit.
"""

import json
import sys
from pathlib import Path

import click
from loguru import logger

from src.config import settings
from src.exceptions import ConfigError
from src.services.orchestrator import orchestrator

EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_VERIFY_FAILED = 3


def setup_logging(debug: bool = False):
    """Setup logging configuration."""
    log_level = "DEBUG" if debug else settings.log_level

    # Remove default logger
    logger.remove()

    # Console logs go to stderr; stdout carries command results
    logger.add(
        sys.stderr,
        level=log_level,
        format="<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | <cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> - <level>{message}</level>"
    )

    if settings.log_dir:
        log_dir = Path(settings.log_dir)
        log_dir.mkdir(parents=True, exist_ok=True)
        logger.add(
            log_dir / "cascade.log",
            level=log_level,
            rotation="1 day",
            retention="30 days",
            format="{time:YYYY-MM-DD HH:mm:ss} | {level: <8} | {name}:{function}:{line} - {message}"
        )


def run_options(f):
    """Flags shared by the run subcommands."""
    f = click.option('--threads', type=click.IntRange(min=0), default=None,
                     help='Worker threads (default: CASCADE_THREADS, else physical cores)')(f)
    f = click.option('--out', type=click.Path(file_okay=False), default=None,
                     help='Output directory (default: config output_dir, else CASCADE_OUTPUT_DIR)')(f)
    f = click.option('--seed', type=click.IntRange(min=0, max=2**64 - 1), default=None,
                     help='Master seed, overrides the config file')(f)
    f = click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), required=True,
                     help='Run config (JSON)')(f)
    return f


def fail(error: Exception):
    """Logs the error and exits with the matching code."""
    logger.error(f"{type(error).__name__}: {error}")
    click.echo(f"Error: {error}", err=True)
    sys.exit(EXIT_CONFIG if isinstance(error, ConfigError) else EXIT_ERROR)


@click.group()
@click.option('--debug', is_flag=True, help='Enable debug mode')
def cli(debug):
    """Complex multiplicative cascades on [0, 1]: simulation, convergence and multifractal analysis."""
    setup_logging(debug)
    logger.debug(f"Starting cascade toolkit in {settings.environment} mode")


@cli.command()
@run_options
def simulate(config_path, seed, out, threads):
    """Write coupled sample paths F_n for the configured generations."""
    try:
        context = orchestrator.prepare(config_path, seed, out, threads)
        files = orchestrator.cmd_simulate(context)
    except Exception as e:
        fail(e)
    for name in files:
        click.echo(str(context.writer.out_dir / name))


@cli.command()
@run_options
def phi(config_path, seed, out, threads):
    """Compute phi(p), the convergence verdict, gamma* and beta_critical."""
    try:
        context = orchestrator.prepare(config_path, seed, out, threads)
        report = orchestrator.cmd_phi(context)
    except Exception as e:
        fail(e)
    click.echo(f"Verdict: {report.verdict.kind.value}")
    click.echo(f"  p*: {report.verdict.p_star}")
    click.echo(f"  gamma*: {report.verdict.gamma_star}")
    click.echo(f"  beta_critical: {report.beta_critical}")
    for estimate in report.empirical:
        click.echo(f"  empirical phi({estimate.p}): {estimate.slope:.6f} +/- {estimate.stderr:.6f}")


@cli.command()
@run_options
def spectrum(config_path, seed, out, threads):
    """Estimate the large deviation spectrum of F_{n_max}."""
    try:
        context = orchestrator.prepare(config_path, seed, out, threads)
        report = orchestrator.cmd_spectrum(context)
    except Exception as e:
        fail(e)
    click.echo(f"Headline epsilon: {report.headline_epsilon}")
    click.echo(f"Regularity estimate: {report.gamma_regularity}")
    for point in report.structure:
        click.echo(f"  tau({point.q}) = {point.tau:.6f} +/- {point.stderr:.6f}")


@cli.command()
@run_options
def verify(config_path, seed, out, threads):
    """Run the statistical checks; exits 3 when any check fails."""
    try:
        context = orchestrator.prepare(config_path, seed, out, threads)
        report = orchestrator.cmd_verify(context)
    except Exception as e:
        fail(e)
    for check in report.checks:
        status = "skipped" if check.skipped else ("pass" if check.passed else "FAIL")
        click.echo(f"  {check.name}: {status}")
    if not report.passed:
        click.echo("Verification failed", err=True)
        sys.exit(EXIT_VERIFY_FAILED)
    click.echo("All checks passed")


@cli.command()
@click.option('--out', type=click.Path(file_okay=False), default='schemas', help='Output directory')
def schema(out):
    """Write JSON Schemas of the run config and the reports."""
    for name in orchestrator.export_schemas(out):
        click.echo(str(Path(out) / name))


@cli.command()
@click.option('--config', 'config_path', type=click.Path(exists=True, dir_okay=False), required=True,
              help='Run config (JSON)')
def info(config_path):
    """Show the resolved settings and the closed-form verdict of a config."""
    try:
        summary = orchestrator.describe(config_path)
    except Exception as e:
        fail(e)

    click.echo("\n=== Settings ===")
    click.echo(f"  threads: {settings.threads or 'physical cores'}")
    click.echo(f"  replicas: {settings.replicas}")
    click.echo(f"  confidence sigmas: {settings.confidence_sigmas}")
    click.echo("\n=== Model ===")
    click.echo(json.dumps(summary, indent=2, default=str))


if __name__ == '__main__':
    cli()

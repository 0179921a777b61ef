#!/usr/bin/env python3
"""
Command-line front end for the transmission and resonance tools.

Usage:
    python cli.py scan --config fig8.cfg --out results
    python cli.py roots --config fig7.cfg --k-max 20
    python cli.py classify --config generic.cfg
    python cli.py preset fig7 --out results
    python cli.py report --config delta.cfg

Exit codes: 0 success, 2 scenario/parse error, 3 numeric failure.
"""

import functools
import logging
import sys
from pathlib import Path

import click

import config as settings
from junction import InvalidParameter, classify_junction
from resonance import ResonanceError, analyze_resonances, classify_relation
from scattering_single import perfect_transmission_wavenumber
from scenarios import (
    PRESETS,
    NumericFailure,
    OutputKind,
    ScanMode,
    ScenarioError,
    emit_report,
    parse_scenario,
    run_preset,
    run_scan,
    write_plot_script,
    write_scan_csv,
)

logger = logging.getLogger(__name__)

PARSE_ERROR_EXIT = 2
NUMERIC_ERROR_EXIT = 3


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


def handle_errors(command):
    """Map domain exceptions onto the documented exit codes."""
    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (InvalidParameter, ResonanceError, NumericFailure) as e:
            _fail(str(e), NUMERIC_ERROR_EXIT)
        except ScenarioError as e:
            _fail(str(e), PARSE_ERROR_EXIT)
    return wrapper


def _load(config_path: str, k_max=None, samples=None):
    text = Path(config_path).read_text(encoding="utf-8")
    return parse_scenario(text, overrides={"k_max": k_max, "samples": samples})


config_option = click.option(
    "--config", "config_path", required=True,
    type=click.Path(exists=True, dir_okay=False), help="Scenario document (key = value lines).",
)
out_option = click.option(
    "--out", "out_dir", type=click.Path(file_okay=False), default=None,
    help="Output directory (default: RESONANCE_OUTPUT_DIR).",
)
k_max_option = click.option("--k-max", type=float, default=None, help="Override k_max.")
samples_option = click.option("--samples", type=int, default=None, help="Override the sample count.")


@click.group()
@click.version_option(settings.TOOL_VERSION, prog_name="resonance-transmission")
def cli():
    """Transmission through one or two point interactions and its perfect-transmission resonances."""
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


@cli.command()
@config_option
@out_option
@k_max_option
@samples_option
@handle_errors
def scan(config_path, out_dir, k_max, samples):
    """Sample T on a uniform k grid and write the requested outputs."""
    scenario = _load(config_path, k_max, samples)
    table = run_scan(scenario)

    out = Path(out_dir if out_dir is not None else settings.OUTPUT_DIR)
    stem = Path(config_path).stem
    written = []
    if OutputKind.CSV in scenario.outputs or OutputKind.PLOTSCRIPT in scenario.outputs:
        csv_path = write_scan_csv(table, out / f"{stem}_scan.csv")
        written.append(csv_path)
        if OutputKind.PLOTSCRIPT in scenario.outputs:
            written.append(write_plot_script(out / f"{stem}_scan.gp", table, csv_path.name,
                                             f"{stem} ({scenario.mode.value})"))
    if OutputKind.REPORT in scenario.outputs:
        report_path = out / f"{stem}_report.txt"
        report_path.write_text(emit_report(scenario), encoding="utf-8")
        written.append(report_path)

    for path in written:
        click.echo(str(path))


@cli.command()
@config_option
@k_max_option
@handle_errors
def roots(config_path, k_max):
    """List perfect-transmission wavenumbers in (0, k_max]."""
    scenario = _load(config_path, k_max)

    if scenario.mode == ScanMode.SINGLE:
        k_star = perfect_transmission_wavenumber(scenario.junctions[0])
        if k_star is not None and k_star <= scenario.k_max:
            click.echo(f"{k_star!r},InverseSqrt")
        return

    report = analyze_resonances(scenario.double_config, scenario.k_max)
    click.echo(f"# relation: {report.relation.tag.value}")
    for root in report.roots:
        click.echo(f"{root.k!r},{root.kind.value}")


@cli.command()
@config_option
@handle_errors
def classify(config_path):
    """Print the boundary class of each junction and the relation between them."""
    scenario = _load(config_path)
    for index, junction in enumerate(scenario.junctions, start=1):
        click.echo(f"j{index}: {classify_junction(junction).tag.value}")
    if scenario.mode == ScanMode.DOUBLE:
        click.echo(f"relation: {classify_relation(scenario.double_config).tag.value}")


@cli.command()
@click.argument("name", type=click.Choice(sorted(PRESETS)))
@out_option
@handle_errors
def preset(name, out_dir):
    """Regenerate the curve data, root list and plot script of a reference figure."""
    for path in run_preset(name, out_dir):
        click.echo(str(path))


@cli.command()
@config_option
@k_max_option
@handle_errors
def report(config_path, k_max):
    """Print a human-readable summary of the scenario."""
    scenario = _load(config_path, k_max)
    click.echo(emit_report(scenario), nl=False)


if __name__ == "__main__":
    cli()

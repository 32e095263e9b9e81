from __future__ import annotations

import functools
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Any, Optional

import click
import numpy as np
from click import Context
from click import Group as Cli
from devtools import debug

from .config import RunConfig, load_run_config
from .errors import ConfigurationError, M1Error, RealizabilityError
from .output import (
    RunSummary,
    write_axis_lineout,
    write_fields,
    write_history,
    write_radial_profile,
    write_residual_log,
    write_summary,
)
from .scenarios import SCENARIOS, Scenario
from .stepping import (
    Discretization,
    RunState,
    Scheme,
    discretize,
    run_steady,
    run_transient,
)
from .utils import ensure_directory

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"
# max f reported for the flash at 512 nodes per axis
FLASH_REFERENCE_MAX_F = 1.0 - 2.32e-9


class ClickPath(click.Path):
    def coerce_path_result(self, rv):
        path = super().coerce_path_result(rv)
        return Path(path)


def _parse_assignments(ctx, param, values) -> dict[str, str]:
    result = {}
    for item in values:
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise click.BadParameter(f"expected KEY=VALUE, got {item!r}", ctx=ctx, param=param)
        result[key.strip()] = value.strip()

    return result


@dataclass(repr=False)
class M1Solver:
    config_path: Optional[Path] = None
    output_dir: Optional[Path] = None

    def resolve(self, cli_values: dict[str, Any]) -> tuple[RunConfig, Scenario]:
        values = dict(cli_values)
        if self.output_dir is not None:
            values["output_dir"] = self.output_dir

        config = load_run_config(values, self.config_path)
        scenario = config.build_scenario()
        return config.resolved(scenario), scenario

    def cmd_run(self, cli_values: dict[str, Any]) -> list[Path]:
        config, scenario = self.resolve(cli_values)
        run_dir = ensure_directory(config.output_dir / scenario.name)

        discretization = discretize(scenario, config.nodes)
        written: list[Path] = []

        def snapshot(state: RunState, disc: Discretization):
            if config.output_every and state.step % config.output_every == 0:
                path = run_dir / f"fields_{state.step:06d}.vtk"
                title = f"{scenario.name} t={state.t:.6e}"
                written.append(write_fields(state.u, disc.mesh, path, title))

        runner = run_steady if config.steady else run_transient
        error: Optional[M1Error] = None
        try:
            state = runner(config, scenario, snapshot, discretization)
        except RealizabilityError as err:
            error = err
            state = None

        if state is not None:
            mesh = discretization.mesh
            title = f"{scenario.name} t={state.t:.6e}"
            written.append(write_fields(state.u, mesh, run_dir / "fields_final.vtk", title))
            written.append(write_history(state.history, run_dir / "history.csv"))
            if config.steady:
                written.append(write_residual_log(state.residual_history, run_dir / "residual.csv"))
            if "radial" in config.profiles:
                path = run_dir / "radial.csv"
                written.append(write_radial_profile(state.u, mesh, path, scenario.center))
            if "axis" in config.profiles:
                path = run_dir / "axis.csv"
                written.append(write_axis_lineout(state.u, mesh, path, 0, scenario.center))

        summary = self.summarize(config, scenario, discretization, state, error)
        summary.files = [str(path) for path in written]
        written.append(write_summary(summary, run_dir / "summary.json"))

        if error is not None:
            raise error

        return written

    @staticmethod
    def summarize(
        config: RunConfig,
        scenario: Scenario,
        discretization: Discretization,
        state: Optional[RunState],
        error: Optional[M1Error] = None,
    ) -> RunSummary:
        history = state.history if state is not None else []
        initial = history[0] if history else None
        final = history[-1] if history else None

        summary = RunSummary(
            scenario=scenario.describe(),
            scheme=config.scheme.value,
            nodes=config.nodes,
            dt=state.dt if state is not None else 0.0,
            steps=state.step if state is not None else 0,
            t=state.t if state is not None else 0.0,
            initial_mass=initial.mass if initial else float("nan"),
            final_mass=final.mass if final else float("nan"),
            min_psi0=state.min_psi0 if state is not None else float("nan"),
            max_flux_ratio=state.max_flux_ratio if state is not None else float("nan"),
            mean_limited_fraction=(
                float(np.mean([r.limited_fraction for r in history])) if history else 0.0
            ),
            realizability_violations=0 if error is None else 1,
            steady=config.steady,
            error=str(error) if error is not None else None,
        )
        if state is not None and config.steady:
            summary.converged = state.converged
            summary.residual = state.residual

        if scenario.name == "flash" and state is not None:
            logger.info(
                "flash: max f over the run %.12f (reference at 512 nodes per axis: %.12f)",
                state.max_flux_ratio,
                FLASH_REFERENCE_MAX_F,
            )

        return summary

    def cmd_scenarios(self) -> list[str]:
        lines = []
        for name, cls in SCENARIOS.items():
            scenario = cls()
            mode = f"t_final={scenario.t_final:g}"
            lines.append(
                f"{name:<12} d={scenario.dim} nodes={scenario.nodes} cfl={scenario.cfl:g} "
                f"{mode} boundary={scenario.boundary.value}  {cls.summary}"
            )

        return lines


@click.group()
@click.option(
    "--log-level",
    type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"], case_sensitive=False),
    default="INFO",
    show_default=True,
)
@click.option(
    "--config",
    "config_path",
    metavar="PATH",
    type=ClickPath(exists=True, dir_okay=False),
    help="flat key = value run configuration",
)
@click.option(
    "--output-dir",
    metavar="PATH",
    type=ClickPath(file_okay=False),
    envvar="M1_OUTPUT_DIR",
    help="output root [env: M1_OUTPUT_DIR]",
)
@click.pass_context
def cli(ctx: Context, log_level: str, config_path: Optional[Path], output_dir: Optional[Path]):
    logging.basicConfig(level=log_level.upper(), format=LOG_FORMAT)

    ctx.obj = M1Solver(config_path=config_path, output_dir=output_dir)


if TYPE_CHECKING:
    cli: Cli


def run_options(func):
    options = [
        click.option("--scenario", type=click.Choice(list(SCENARIOS))),
        click.option("--source", type=click.Choice(["isotropic", "anisotropic"])),
        click.option("--nodes", type=int, help="nodes per axis"),
        click.option("--cfl", type=float),
        click.option("--t-final", type=float),
        click.option("--steady", is_flag=True, default=False, help="pseudo-time steady run"),
        click.option("--tol", type=float),
        click.option("--max-steps", type=int),
        click.option("--scheme", type=click.Choice([s.value for s in Scheme])),
        click.option("--output-every", type=int, help="write fields every k steps"),
        click.option("--profile", "profiles", multiple=True, type=click.Choice(["radial", "axis"])),
        click.option(
            "--set",
            "scenario_overrides",
            multiple=True,
            metavar="KEY=VALUE",
            callback=_parse_assignments,
            help="override a scenario field",
        ),
    ]
    for option in reversed(options):
        func = option(func)

    return func


def _usage_errors(func):
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ConfigurationError as err:
            raise click.UsageError(str(err)) from err
        except M1Error as err:
            raise click.ClickException(str(err)) from err

    return wrapper


@cli.command("run", help="run a benchmark scenario")
@run_options
@click.pass_obj
@_usage_errors
def cli_run(solver: M1Solver, **cli_values):
    for path in solver.cmd_run(cli_values):
        click.echo(path)


@cli.command("scenarios", help="list the available scenarios and their defaults")
@click.pass_obj
def cli_scenarios(solver: M1Solver):
    for line in solver.cmd_scenarios():
        click.echo(line)


@cli.command("show-config", help="print the resolved run configuration")
@run_options
@click.pass_obj
@_usage_errors
def cli_show_config(solver: M1Solver, **cli_values):
    config, scenario = solver.resolve(cli_values)
    debug(config, scenario.describe())

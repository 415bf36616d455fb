"""
    Command-line toolkit for the Lipschitz geometry of Outer space: distances,
    candidates, certified geodesics, primitive loop complex projections and
    the contraction / progress experiments.
"""
from typing import Annotated, Optional

import typer

from app.core.config import LOG_LEVEL
from app.core.logging_config import configure_logging

# --- Import your router(s) ---
from app.cli.commands import geometry
from app.cli.commands import experiments
from app.cli.commands import constants

# --- Main Typer Application Instance ---
app = typer.Typer(
    name="outspace",
    help="Lipschitz geometry of Outer space: metric, geodesics, PL projections and experiments.",
    no_args_is_help=True,
    add_completion=False,
)


def include_router(application: typer.Typer, router: typer.Typer) -> None:
    """ Registers every command of a command module on the main application. """
    application.registered_commands.extend(router.registered_commands)


@app.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="DEBUG, INFO, WARNING, ...")] = None,
):
    """ Configures logging once for every command. """
    configure_logging(log_level.upper() if log_level else LOG_LEVEL)


# --- Include your command routers ---
include_router(app, geometry.router)
include_router(app, experiments.router)
include_router(app, constants.router)


if __name__ == "__main__":
    app()

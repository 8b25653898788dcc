"""
Sets the command-line application settings.

It sets up the Typer application, the logging of every run and registers
the subcommands. Logs go to stderr through rich, so stdout stays free for
piping.

"""

import logging

import typer
from rich.console import Console
from rich.logging import RichHandler

from core.routers import include_routers
from core.secrets import env



description = """
Numerical lab for mean curvature flow in arbitrary codimension.

Evolves truncated distance functions with the level-set scheme, runs the
graphical flow experiments, builds smooth approximations of point clouds at
a scale r and verifies the distance identities of the analytic families.
Every subcommand reads a JSON configuration and writes CSV reports, a
summary and the effective configuration into its output directory.
"""



# Logging settings
logging.basicConfig(
    level=env.log_level.upper(),
    format="%(message)s",
    datefmt="[%X]",
    handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
)


# Application definition
app = typer.Typer(
    name=env.app_name,
    help=description,
    add_completion=False,
    no_args_is_help=True,
    pretty_exceptions_enable=False,
)


# Commands added
include_routers(app)


# Remove debug messages from PIL
logging.getLogger("PIL").setLevel(logging.WARNING)

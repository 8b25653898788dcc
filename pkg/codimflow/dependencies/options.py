from pathlib import Path
from typing import Annotated

import typer

from codimflow.models.utils.enums import VerifyCheck, VerifyFamily



# Option: JSON configuration of the run
ConfigOption = Annotated[Path|None, typer.Option(
    "--config", exists=True, dir_okay=False, readable=True,
    help="JSON configuration file.",
)]

# Option: output directory, CODIMFLOW_OUT when omitted
OutOption = Annotated[Path|None, typer.Option(
    "--out", file_okay=False, help="Output directory of the artifacts.",
)]

# Option: seed of every random draw
SeedOption = Annotated[int, typer.Option("--seed", help="Seed echoed into every artifact.")]

# Option: cap of the worker pool
ThreadsOption = Annotated[int|None, typer.Option(
    "--threads", min=1, help="Largest number of worker threads.",
)]

# Option: repeatable key.sub=value edits of the configuration
OverrideOption = Annotated[list[str]|None, typer.Option(
    "--override", help="Configuration edit key.sub=value, applied before validation.",
)]

# Options of the verify subcommand
FamilyOption = Annotated[VerifyFamily|None, typer.Option("--family", help="Analytic family.")]
CheckOption = Annotated[VerifyCheck|None, typer.Option("--check", help="Check to run.")]

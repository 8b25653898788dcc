"""
Groups all subcommands of the application.

It serves as the central place to register the commands of the routers
modules. To extend the command line, import the command function from its
module and register it here.

Usage:
1. Import the command from its router module.
2. Register it with `app.command(name)(command)`.

Example:
from codimflow.routers.module import command
app.command("module")(command)

"""

import typer

# Add all commands from routers
from codimflow.routers.flow import flow
from codimflow.routers.gen import gen
from codimflow.routers.graphflow import graphflow
from codimflow.routers.multiscale import multiscale
from codimflow.routers.reifenberg import reifenberg
from codimflow.routers.verify import verify



def include_routers(app:typer.Typer) -> typer.Typer:
    app.command("flow")(flow)
    app.command("graphflow")(graphflow)
    app.command("reifenberg")(reifenberg)
    app.command("multiscale")(multiscale)
    app.command("verify")(verify)
    app.command("gen")(gen)
    return app

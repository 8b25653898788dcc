import typer

from codimflow.dependencies.context import RunContext, exit_codes, experiment_spec
from codimflow.dependencies.options import (
    ConfigOption,
    OutOption,
    OverrideOption,
    SeedOption,
    ThreadsOption,
)
from codimflow.models.utils.enums import Experiment, GraphExperiment
from codimflow.numerics import graphflow as numerics
from codimflow.schemas.experiments import GraphflowConfig
from codimflow.schemas.reports import CheckReport



def run_experiment(cfg:GraphflowConfig, seed:int) -> CheckReport:
    """Dispatch a graphical flow experiment."""

    match cfg.experiment:
        case GraphExperiment.SMALL_DATA:
            return numerics.small_data_estimate_experiment(
                cfg.eps, cfg.tau, r=cfg.r, M=cfg.M, trials=cfg.trials, k=cfg.k, m=cfg.m,
                beta=cfg.beta, h=cfg.h, seed=seed,
            )
        case GraphExperiment.LADDER:
            return numerics.epsilon_ladder(
                cfg.epsilons, tau=cfg.tau, r=cfg.r, k=cfg.k, m=cfg.m, h=cfg.h, seed=seed,
                snapshots=cfg.snapshots, alpha=cfg.holder_alpha, pairs=cfg.pairs,
                exhaustive=cfg.exhaustive,
            )
        case GraphExperiment.INTERPOLATION:
            beta = cfg.beta if cfg.beta is not None else 0.01
            return numerics.interpolation_check(cfg.alpha, beta, r=cfg.r, delta=cfg.delta)
        case GraphExperiment.LINEARIZATION:
            return numerics.linearization_check(cfg.linear_eps, t_end=cfg.t_end, nodes=cfg.nodes, m=cfg.m)
        case GraphExperiment.EXTENSION:
            return numerics.extension_law_check(
                cfg.family, k=cfg.k, radius=cfg.radius, h=cfg.grid_h,
                window=cfg.window, tolerance=cfg.tolerance,
            )



def graphflow(
    config:ConfigOption=None,
    out:OutOption=None,
    seed:SeedOption=0,
    threads:ThreadsOption=None,
    override:OverrideOption=None
) -> None:
    """Run a graphical mean curvature flow experiment."""

    with exit_codes():
        spec = experiment_spec(Experiment.GRAPHFLOW, config, out, seed, override, threads)
        ctx = RunContext(spec, GraphflowConfig)
        report = run_experiment(ctx.config, ctx.seed)
        code = ctx.finish([report])
    raise typer.Exit(code)

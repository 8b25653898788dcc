import typer

from codimflow.dependencies.context import RunContext, exit_codes, experiment_spec
from codimflow.dependencies.options import (
    ConfigOption,
    OutOption,
    OverrideOption,
    SeedOption,
    ThreadsOption,
)
from codimflow.models.utils.enums import Experiment
from codimflow.numerics.shapes import source_cloud
from codimflow.numerics.smoothcheck import multiscale_uniform_estimates
from codimflow.schemas.experiments import MultiscaleConfig



def multiscale(
    config:ConfigOption=None,
    out:OutOption=None,
    seed:SeedOption=0,
    threads:ThreadsOption=None,
    override:OverrideOption=None
) -> None:
    """Measure the curvature and distance constants of the flows of X^r across scales."""

    with exit_codes():
        spec = experiment_spec(Experiment.MULTISCALE, config, out, seed, override, threads)
        ctx = RunContext(spec, MultiscaleConfig)
        cfg:MultiscaleConfig = ctx.config
        spacing = cfg.spacing if cfg.spacing is not None else min(cfg.scales) / 20
        X = source_cloud(cfg.shape, cfg.n, cfg.k, spacing, ctx.base_dir)
        report = multiscale_uniform_estimates(
            X, cfg.scales, h=cfg.h, horizon=cfg.horizon, times=cfg.times, c3=cfg.c3,
            seed_ratio=cfg.seed_ratio, guard=cfg.guard, padding=cfg.padding, probes=cfg.probes,
        )
        code = ctx.finish([report])
    raise typer.Exit(code)

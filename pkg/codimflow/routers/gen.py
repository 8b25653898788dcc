import typer

from codimflow.dependencies.context import RunContext, exit_codes, experiment_spec
from codimflow.dependencies.options import (
    ConfigOption,
    OutOption,
    OverrideOption,
    SeedOption,
    ThreadsOption,
)
from codimflow.models.clouds import PointCloud
from codimflow.models.utils.enums import Experiment
from codimflow.numerics.shapes import source_cloud
from codimflow.schemas.experiments import GenConfig
from codimflow.schemas.reports import CheckReport
from codimflow.utils.files import write_cloud



def gen(
    config:ConfigOption=None,
    out:OutOption=None,
    seed:SeedOption=0,
    threads:ThreadsOption=None,
    override:OverrideOption=None
) -> None:
    """Generate a point-cloud file from a shape descriptor."""

    with exit_codes():
        spec = experiment_spec(Experiment.GEN, config, out, seed, override, threads)
        ctx = RunContext(spec, GenConfig)
        cfg:GenConfig = ctx.config
        cloud = source_cloud(cfg.shape, cfg.n, cfg.k, cfg.spacing, ctx.base_dir, cfg.lower, cfg.upper)
        if cfg.noise > 0:
            points = cloud.points + ctx.rng.normal(0.0, cfg.noise, cloud.points.shape)
            cloud = PointCloud(n=cloud.n, k=cloud.k, points=points, boundary=cloud.boundary)
        path = write_cloud(ctx.out / cfg.name, cloud, ctx.provenance)
        report = CheckReport(
            check="gen", case=cfg.shape.kind.value,
            metrics={"points": len(cloud.points), "noise": cfg.noise},
            passed=True, notes=[f"written to {path.name}"],
        )
        code = ctx.finish([report])
    raise typer.Exit(code)

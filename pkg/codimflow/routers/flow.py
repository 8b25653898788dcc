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
from codimflow.numerics.levelset import run_flow, zero_set
from codimflow.schemas.flows import FlowConfig
from codimflow.schemas.reports import CheckReport
from codimflow.utils.files import write_cloud, write_grid
from codimflow.utils.raster import write_slice
from core.errors import ConfigError



def flow(
    config:ConfigOption=None,
    out:OutOption=None,
    seed:SeedOption=0,
    threads:ThreadsOption=None,
    override:OverrideOption=None
) -> None:
    """Run a level-set flow; write diagnostics, snapshots, zero sets and slices."""

    with exit_codes():
        spec = experiment_spec(Experiment.FLOW, config, out, seed, override, threads)
        ctx = RunContext(spec, FlowConfig)
        cfg:FlowConfig = ctx.config
        if cfg.n >= 3 and any(item.axes is None for item in cfg.output.slices):
            raise ConfigError("Slices of grids with n >= 3 need an explicit axis pair", n=cfg.n)

        record = run_flow(cfg, base_dir=ctx.base_dir)
        for index, grid in enumerate(record.snapshots):
            stem = f"t{index:03d}"
            if cfg.output.snapshots:
                write_grid(ctx.out / f"grid_{stem}.txt", grid, ctx.provenance)
            if cfg.output.zero_sets:
                write_cloud(ctx.out / f"zero_{stem}.txt", zero_set(grid, cfg.band, cfg.k), ctx.provenance)
            for number, item in enumerate(cfg.output.slices):
                if item.times is None or any(abs(grid.time - t) < 1e-12 for t in item.times):
                    write_slice(ctx.out / f"slice{number}_{stem}.pgm", grid, item,
                                ctx.provenance, cfg.output.png)

        report = CheckReport(
            check="flow", case=cfg.shape.kind.value,
            metrics={"steps": len(record.diagnostics) - 1, "final_time": record.final.time,
                     "extinction_time": record.extinction_time,
                     "extinction_estimate": record.extinction_estimate,
                     "boundary_ok": record.boundary_ok,
                     "snapshots": len(record.snapshots)},
            passed=record.boundary_ok is not False,
            notes=[f"{cfg.envelope.value} envelope end below |grad u| = {cfg.gradient_floor:.6g}"]
                  + [f"snapshot t{index:03d} at t={grid.time:.6g}" for index, grid in enumerate(record.snapshots)],
        )
        tables = {"diagnostics": [row.model_dump() for row in record.diagnostics]}
        if record.gradient_deviation:
            tables["gradient_deviation"] = [{"t": t, "mean_deviation": value}
                                            for t, value in record.gradient_deviation.items()]
        code = ctx.finish([report], tables)
    raise typer.Exit(code)

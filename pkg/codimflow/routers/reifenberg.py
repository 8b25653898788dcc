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
from codimflow.numerics import reifenberg as numerics
from codimflow.numerics.shapes import source_cloud
from codimflow.schemas.experiments import ReifenbergConfig
from codimflow.schemas.reports import CheckReport
from codimflow.utils.files import write_cloud
from core.errors import CodimflowError, ConfigError



def reifenberg(
    config:ConfigOption=None,
    out:OutOption=None,
    seed:SeedOption=0,
    threads:ThreadsOption=None,
    override:OverrideOption=None
) -> None:
    """Build the smooth approximation X^r of a cloud and verify it."""

    with exit_codes():
        spec = experiment_spec(Experiment.REIFENBERG, config, out, seed, override, threads)
        ctx = RunContext(spec, ReifenbergConfig)
        cfg:ReifenbergConfig = ctx.config
        r = cfg.scale
        spacing = cfg.spacing if cfg.spacing is not None else r / 20
        X = source_cloud(cfg.shape, cfg.n, cfg.k, spacing, ctx.base_dir)
        reports, tables = [], {}

        if cfg.profile_scale is not None:
            try:
                rows = numerics.reifenberg_profile(X, cfg.profile_scale)
                tables["profile"] = [row.model_dump() for row in rows]
                reports.append(CheckReport(
                    check="profile", case=cfg.shape.kind.value,
                    metrics={"profile_max": numerics.profile_max(rows), "levels": len(rows)},
                    passed=True,
                ))
            except ConfigError:
                raise
            except CodimflowError as error:
                reports.append(ctx.failure("profile", cfg.shape.kind.value, error))

        try:
            approximation = numerics.construct_approximation(X, r, cfg.seed_ratio * r, cfg.guard)
            write_cloud(ctx.out / "approximation.txt", approximation.cloud, ctx.provenance)
            reports.append(numerics.verify_approx(
                X, approximation.cloud, r, approximation.seed_spacing, approximation.delta,
                cfg.dh_tolerance, cfg.curvature_tolerance,
            ))
            if cfg.cross_scale:
                reports.append(numerics.cross_scale_graph_check(
                    X, r, cfg.seed_ratio, cfg.guard, coarse=approximation,
                ))
        except ConfigError:
            raise
        except CodimflowError as error:
            reports.append(ctx.failure("approx", f"r={r:g}", error))
        code = ctx.finish(reports, tables)
    raise typer.Exit(code)

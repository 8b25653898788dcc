import numpy as np
import typer

from codimflow.dependencies.context import RunContext, exit_codes, experiment_spec
from codimflow.dependencies.options import (
    CheckOption,
    ConfigOption,
    FamilyOption,
    OutOption,
    OverrideOption,
    SeedOption,
    ThreadsOption,
)
from codimflow.models.flows import AnalyticFlow
from codimflow.models.utils.enums import Experiment, VerifyCheck
from codimflow.numerics import levelset, smoothcheck
from codimflow.numerics.graphflow import extension_law_check
from codimflow.numerics.shapes import FlowShape
from codimflow.schemas.experiments import VerifyConfig
from codimflow.schemas.flows import GridSpec
from codimflow.schemas.reports import CheckReport
from core.errors import CodimflowError, ConfigError



# Fixtures

def _grid(cfg:VerifyConfig, n:int) -> GridSpec:
    half = cfg.grid_h * np.ceil(cfg.half_width / cfg.grid_h)
    return GridSpec.box([-half] * n, [half] * n, cfg.grid_h)



def _shifted(flow:AnalyticFlow, offset:float) -> AnalyticFlow:
    """Same family with the radius grown by `offset`, or a plane moved
    along its first normal axis."""

    if flow.sphere_dim:
        return flow.model_copy(update={"radius": flow.radius + offset})
    center = np.zeros(flow.n)
    center[flow.k] = offset
    return flow.model_copy(update={"center": center})



def _avoidance(cfg:VerifyConfig) -> CheckReport:
    flow = smoothcheck.family_flow(cfg.family, cfg.ball_radius)
    shape = FlowShape(n=flow.n, k=flow.k, flows=[flow])
    p = np.zeros(flow.n)
    if not flow.sphere_dim:
        p[flow.k] = cfg.ball_radius
    report = levelset.avoidance_check(shape, p, flow.k, cfg.t_avoid, _grid(cfg, flow.n))
    return report.model_copy(update={"case": cfg.family.value})



def _contraction(cfg:VerifyConfig) -> list[CheckReport]:
    flow = smoothcheck.family_flow(cfg.family, cfg.ball_radius)
    grid = _grid(cfg, flow.n)
    pair = [FlowShape(n=flow.n, k=flow.k, flows=[item]) for item in (flow, _shifted(flow, cfg.offset))]
    cap = min(levelset.init_distance(shape, grid).cap for shape in pair)
    u0, v0 = (levelset.init_distance(shape, grid, cap) for shape in pair)
    contraction = levelset.contraction_check(u0, v0, flow.k, cfg.t_end)
    comparison = levelset.comparison_check(u0, levelset.offset_grid(u0, cfg.offset), flow.k, cfg.t_end)
    return [report.model_copy(update={"case": cfg.family.value}) for report in (contraction, comparison)]



def run_check(cfg:VerifyConfig, seed:int) -> list[CheckReport]:
    """Run one verification check on one analytic family."""

    flow = smoothcheck.family_flow(cfg.family, cfg.radius)
    match cfg.check:
        case VerifyCheck.TUBE:
            return [smoothcheck.tube_suite(flow, cfg.samples or 20, cfg.t, cfg.fd_step, seed)]
        case VerifyCheck.PDE:
            rng = np.random.default_rng(seed)
            samples = smoothcheck.random_tube_samples(flow, cfg.samples or 100, cfg.t, rng)
            points = np.array([sample.point for sample in samples])
            return [smoothcheck.distance_pde_residual(flow, points, cfg.t, cfg.fd_step)]
        case VerifyCheck.SUBSOLUTION:
            return [smoothcheck.subsolution_residual(flow, cfg.c1, cfg.c2, tuple(cfg.t_range), seed=seed)]
        case VerifyCheck.ALPHA:
            alpha = smoothcheck.alpha_constant(cfg.c1, cfg.c2, flow.k)
            return [CheckReport(check="alpha", case=f"k={flow.k}", passed=alpha > 0,
                                metrics={"alpha": alpha, "c1": cfg.c1, "c2": cfg.c2})]
        case VerifyCheck.AVOIDANCE:
            return [_avoidance(cfg)]
        case VerifyCheck.CONTRACTION:
            return _contraction(cfg)
        case VerifyCheck.SANDWICH:
            return [smoothcheck.uniqueness_sandwich_experiment(
                flow, _grid(cfg, flow.n), cfg.times, c1=cfg.sandwich_c1, c2=cfg.c2,
            )]
        case VerifyCheck.EXTENSION:
            return [extension_law_check(flow.family, k=flow.k, n=flow.n, radius=cfg.radius, h=cfg.grid_h)]
        case VerifyCheck.OPERATOR:
            return [smoothcheck.operator_property_suite(cfg.trials, seed)]



def verify(
    family:FamilyOption=None,
    check:CheckOption=None,
    config:ConfigOption=None,
    out:OutOption=None,
    seed:SeedOption=0,
    threads:ThreadsOption=None,
    override:OverrideOption=None
) -> None:
    """Check distance identities, subsolution and solver properties on an analytic family."""

    with exit_codes():
        spec = experiment_spec(Experiment.VERIFY, config, out, seed, override, threads)
        ctx = RunContext(spec, VerifyConfig, flags={"family": family, "check": check})
        cfg:VerifyConfig = ctx.config
        try:
            reports = run_check(cfg, ctx.seed)
        except ConfigError:
            raise
        except CodimflowError as error:
            reports = [ctx.failure(cfg.check.value, cfg.family.value, error)]
        for report in reports:
            if not report.passed:
                typer.echo(f"FAIL {report.check} {report.case}: {report.metrics}", err=True)
        code = ctx.finish(reports)
    raise typer.Exit(code)

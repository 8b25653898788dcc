from pathlib import Path
from typing import Annotated, Any

from pydantic import BaseModel, Field, model_validator

from codimflow.models.utils.enums import (
    Experiment,
    FlowFamily,
    GraphExperiment,
    VerifyCheck,
    VerifyFamily,
)
from codimflow.schemas import utils
from codimflow.schemas.flows import ShapeSpec, Strict



# Graphical flow schemas

class GraphflowConfig(Strict):
    """Graphical flow experiment.

    Attributes:
      - experiment (GraphExperiment): which experiment to run.
      - eps, tau (float): small-data size ε and time fraction τ.
      - r (float): radius of the domain ball.
      - M (float): allowed gradient growth.
      - trials (int): random trials of the small-data experiment.
      - k, m (int): domain dimension and codimension.
      - beta (float): height bound as a fraction of r.
      - h (float): grid spacing; the experiment default when omitted.
      - epsilons (list[float]): sizes of the ε-ladder.
      - snapshots (int): snapshots kept per ladder rung.
      - holder_alpha (float), pairs (int), exhaustive (bool): seminorm sampling.
      - alpha (float), delta (float): curvature bound and smallness of the
        interpolation check.
      - linear_eps, t_end (float), nodes (int), tolerance (float): periodic
        linearization check.
      - family (FlowFamily), radius (float), grid_h (float), window (float):
        extension-law fixture.
    """

    experiment: GraphExperiment
    eps: Annotated[float, Field(ge=0, le=0.05)] = 0.02
    tau: Annotated[float, Field(gt=0, le=0.1)] = 0.05
    r: Annotated[float, Field(gt=0)] = 1.0
    M: Annotated[float, Field(ge=1)] = 1.1
    trials: Annotated[int, Field(ge=1)] = 20
    k: Annotated[int, Field(ge=1, le=2)] = 1
    m: Annotated[int, Field(ge=1)] = 1
    beta: Annotated[float, Field(gt=0)]|None = None
    h: Annotated[float, Field(gt=0)]|None = None
    epsilons: list[float] = [0.04, 0.02, 0.01]
    snapshots: Annotated[int, Field(ge=2)] = 11
    holder_alpha: Annotated[float, Field(gt=0, lt=1)] = 0.5
    pairs: Annotated[int, Field(ge=1)] = 4096
    exhaustive: bool = False
    alpha: Annotated[float, Field(gt=0)] = 1.0
    delta: Annotated[float, Field(gt=0)] = 0.1
    linear_eps: Annotated[float, Field(gt=0)] = 1e-3
    t_end: Annotated[float, Field(gt=0)] = 0.5
    nodes: Annotated[int, Field(ge=8)] = 64
    tolerance: Annotated[float, Field(gt=0)] = 0.05
    family: FlowFamily = FlowFamily.SPHERE
    radius: Annotated[float, Field(gt=0)] = 1.0
    grid_h: Annotated[float, Field(gt=0)] = 1 / 32
    window: Annotated[float, Field(gt=0, lt=1)] = 0.6

    @model_validator(mode="before")
    def validate_schema(cls, values:Any) -> Any:
        values = utils.check_ascending(values, "epsilons")
        return values



# Point-cloud schemas

class CloudSource(Strict):
    """A point cloud X: an analytic shape sampled with `spacing`, a Koch-like
    curve or a cloud file."""

    n: Annotated[int, Field(ge=2, le=8)]
    k: Annotated[int, Field(ge=1)]
    shape: ShapeSpec
    spacing: Annotated[float, Field(gt=0)]|None = None

    @model_validator(mode="after")
    def validate_dimensions(self):
        if not self.k < self.n:
            raise ValueError("The cloud dimension k must be smaller than n.")
        return self


class ReifenbergConfig(CloudSource):
    """Smooth approximation X^r of a cloud and its verification.

    Attributes:
      - scale (float): r.
      - seed_ratio (float): seed spacing of the construction, as a fraction of r.
      - guard (float): largest allowed flatness over r, 2r, 4r, 8r.
      - dh_tolerance, curvature_tolerance (float): pass thresholds of
        d_H/r and |A|·r.
      - profile_scale (float): R of the flatness profile; skipped when omitted.
      - cross_scale (bool): also compare X^r with X^(r/4).
    """

    scale: Annotated[float, Field(gt=0)]
    seed_ratio: Annotated[float, Field(gt=0, le=0.5)] = 0.1
    guard: Annotated[float, Field(gt=0, lt=1)] = 0.05
    dh_tolerance: Annotated[float, Field(gt=0)] = 0.02
    curvature_tolerance: Annotated[float, Field(gt=0)] = 0.02
    profile_scale: Annotated[float, Field(gt=0)]|None = None
    cross_scale: bool = False


class MultiscaleConfig(CloudSource):
    """Uniform estimates of the level-set flows of X^r over several scales."""

    scales: Annotated[list[float], Field(min_length=1)]
    h: Annotated[float, Field(gt=0)]|None = None
    horizon: Annotated[float, Field(gt=0)]|None = None
    times: Annotated[int, Field(ge=1)] = 5
    c3: Annotated[float, Field(ge=0)] = 1.0
    seed_ratio: Annotated[float, Field(gt=0, le=0.5)] = 0.1
    guard: Annotated[float, Field(gt=0, lt=1)] = 0.05
    padding: Annotated[float, Field(gt=0)] = 0.5
    probes: Annotated[int, Field(ge=1)] = 32

    @model_validator(mode="before")
    def validate_schema(cls, values:Any) -> Any:
        values = utils.check_ascending(values, "scales")
        return values


class GenConfig(CloudSource):
    """Point-cloud generator. `noise` adds seeded Gaussian jitter of that
    standard deviation; `lower` and `upper` crop unbounded shapes."""

    noise: Annotated[float, Field(ge=0)] = 0.0
    lower: list[float]|None = None
    upper: list[float]|None = None
    name: str = "cloud.txt"



# Verification schemas

class VerifyConfig(Strict):
    """Identities and solver checks on the analytic families.

    Attributes:
      - family (VerifyFamily), check (VerifyCheck): usually given on the
        command line.
      - radius (float): radius of the analytic flow.
      - samples (int): tube samples (20) or PDE points (100) when omitted.
      - t (float): time of the tube and PDE identities.
      - fd_step (float): step of the finite differences of closed forms.
      - c1, c2 (float), t_range (list[float]): subsolution constants.
      - sandwich_c1 (float), times (list[float]): sandwich experiment.
      - ball_radius (float), t_avoid (float): avoidance fixture.
      - offset (float), t_end (float): contraction fixture.
      - grid_h (float), half_width (float): level-set grid [-w, w]^n.
      - trials (int): operator property trials.
    """

    family: VerifyFamily = VerifyFamily.CIRCLE
    check: VerifyCheck = VerifyCheck.TUBE
    radius: Annotated[float, Field(gt=0)] = 1.0
    samples: Annotated[int, Field(ge=1)]|None = None
    t: Annotated[float, Field(ge=0)] = 0.0
    fd_step: Annotated[float, Field(gt=0, le=0.01)] = 1e-3
    c1: Annotated[float, Field(gt=0)] = 0.35
    c2: Annotated[float, Field(ge=0)] = 0.0
    t_range: Annotated[list[float], Field(min_length=2, max_length=2)] = [0.01, 0.09]
    sandwich_c1: Annotated[float, Field(gt=0)] = 0.08
    times: list[float] = [0.2]
    ball_radius: Annotated[float, Field(gt=0)] = 0.5
    t_avoid: Annotated[float, Field(gt=0)] = 0.05
    offset: Annotated[float, Field(gt=0)] = 0.05
    t_end: Annotated[float, Field(gt=0)] = 0.05
    grid_h: Annotated[float, Field(gt=0)] = 1 / 32
    half_width: Annotated[float, Field(gt=0)] = 1.5
    trials: Annotated[int, Field(ge=1)] = 1000

    @model_validator(mode="before")
    def validate_schema(cls, values:Any) -> Any:
        values = utils.check_ascending(values, "times")
        values = utils.check_ascending(values, "t_range")
        return values



# Run schemas

class ExperimentSpec(BaseModel):
    """One invocation of the command line.

    Attributes:
      - name (Experiment): subcommand.
      - config (Path): JSON configuration file.
      - out (Path): output directory.
      - seed (int): seed of every random draw, echoed in every artifact.
      - overrides (list[str]): key.sub=value edits applied before validation.
      - threads (int): cap of the worker pool.
    """

    name: Experiment
    config: Path|None = None
    out: Path
    seed: int = 0
    overrides: list[str] = []
    threads: Annotated[int, Field(ge=1)]|None = None

    @model_validator(mode="before")
    def validate_schema(cls, values:Any) -> Any:
        values = utils.check_overrides(values)
        return values

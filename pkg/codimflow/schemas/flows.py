from typing import Annotated, Any, Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from codimflow.models.utils.enums import EnvelopeEnd, ShapeKind
from codimflow.schemas import utils



class Strict(BaseModel):
    """Configuration base: unknown keys are rejected."""
    model_config = ConfigDict(extra="forbid")



# Grid and shape schemas

class GridSpec(Strict):
    """Uniform grid. Either `origin` and `shape`, or `lower`, `upper` and `h`."""

    origin: list[float]
    shape: list[Annotated[int, Field(ge=3)]]
    h: Annotated[float, Field(gt=0)]

    @model_validator(mode="before")
    def validate_schema(cls, values:Any) -> Any:
        values = utils.check_grid_bounds(values)
        if len(values.get("origin", [])) != len(values.get("shape", [])):
            raise ValueError("origin and shape must have the same length.")
        return values

    @classmethod
    def box(cls, lower:list[float], upper:list[float], h:float) -> "GridSpec":
        return cls(lower=lower, upper=upper, h=h)

    @property
    def n(self) -> int:
        return len(self.shape)

    @property
    def lower(self) -> np.ndarray:
        return np.asarray(self.origin, dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return self.lower + self.h * (np.asarray(self.shape) - 1)


class ShapeSpec(Strict):
    """Initial set descriptor.

    Attributes:
      - kind (ShapeKind): analytic family, segment, Koch-like curve or cloud file.
      - k (int): dimension of the sphere, plane or cylinder; defaults to the
        flow dimension.
      - j (int): dimension of the round factor of a cylinder.
      - center (list[float]): translation; the origin when omitted.
      - radius (float): sphere and cylinder radius; scale of a Koch curve.
      - radii (list[float]): radii of concentric spheres.
      - orientation (list[list[float]]): orthogonal frame, columns are axes.
      - start, end (list[float]): segment endpoints.
      - theta (float), depth (int): Koch-like generator parameters.
      - path (str): point-cloud file.
    """

    kind: ShapeKind
    k: Annotated[int|None, Field(ge=0)] = None
    j: Annotated[int|None, Field(ge=1)] = None
    center: list[float]|None = None
    radius: Annotated[float, Field(gt=0)] = 1.0
    radii: list[Annotated[float, Field(gt=0)]]|None = None
    orientation: list[list[float]]|None = None
    start: list[float]|None = None
    end: list[float]|None = None
    theta: float = 0.1
    depth: Annotated[int, Field(ge=0, le=10)] = 5
    path: str|None = None

    @model_validator(mode="before")
    def validate_schema(cls, values:Any) -> Any:
        values = utils.check_shape_fields(values)
        return values



# Output schemas

class SliceSpec(Strict):
    """2D slice of a grid snapshot. `axes` is required when n >= 3; the
    other axes are fixed at `index` (their middle node when omitted)."""

    axes: Annotated[list[int], Field(min_length=2, max_length=2)]|None = None
    index: list[int]|None = None
    times: list[float]|None = None


class OutputPlan(Strict):
    snapshots: bool = True
    zero_sets: bool = True
    slices: list[SliceSpec] = []
    png: bool = False



# Flow schemas

class FlowConfig(Strict):
    """Level-set flow run.

    Attributes:
      - n, k (int): ambient and flow dimensions.
      - grid (GridSpec): computational grid.
      - shape (ShapeSpec): initial set X.
      - cap (float|"auto"): truncation level of the distance field.
      - dt (float|"auto"): time step; "auto" recomputes the stable step.
      - t_end (float): final time.
      - snapshots (list[float]): times at which grids are kept.
      - eps_grad (float): gradient floor, h when omitted.
      - threshold (float): zero-band threshold, 1.5h when omitted.
      - envelope (EnvelopeEnd): end of the degenerate envelope used where
        the gradient vanishes.
      - n_dirs (int): directions sampled by the envelope.
      - stop_at_extinction (bool): end the run once the set is extinct.
      - redistance_diagnostic (bool): report mean ||∇u| - 1| on the band.
    """

    n: int
    k: int
    grid: GridSpec
    shape: ShapeSpec
    cap: Annotated[float, Field(gt=0)]|Literal["auto"] = "auto"
    dt: Annotated[float, Field(gt=0)]|Literal["auto"] = "auto"
    t_end: Annotated[float, Field(ge=0)]
    snapshots: list[float] = []
    eps_grad: float|None = None
    threshold: float|None = None
    envelope: EnvelopeEnd = EnvelopeEnd.LOWER
    n_dirs: Annotated[int, Field(ge=8)] = 64
    stop_at_extinction: bool = False
    redistance_diagnostic: bool = False
    output: OutputPlan = OutputPlan()

    @model_validator(mode="before")
    def validate_schema(cls, values:Any) -> Any:
        values = utils.check_codimension(values)
        values = utils.check_positive(values, "eps_grad", "threshold")
        values = utils.check_times(values, "snapshots", "t_end")
        return values

    @model_validator(mode="after")
    def validate_grid_dimension(self):
        if self.grid.n != self.n:
            raise ValueError("The grid must have n axes.")
        return self

    @property
    def gradient_floor(self) -> float:
        return self.eps_grad if self.eps_grad is not None else self.grid.h

    @property
    def band(self) -> float:
        return self.threshold if self.threshold is not None else 1.5 * self.grid.h

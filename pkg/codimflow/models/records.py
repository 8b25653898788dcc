from pydantic import BaseModel, ConfigDict

from codimflow.models.grids import GraphField, ScalarGrid
from codimflow.schemas.reports import DiagnosticRow



class FlowRecord(BaseModel):
    """Result of a level-set run.

    Attributes:
      - k (int): flow dimension.
      - threshold (float): zero-band threshold used by the diagnostics.
      - snapshots (list[ScalarGrid]): grids at the requested times, the
        initial and the final grid included.
      - diagnostics (list[DiagnosticRow]): one row per step, t = 0 first.
      - extinction_time (float): first recorded time at which min u exceeds
        the zero-band threshold everywhere; None while the set survives.
      - extinction_estimate (float): time at which the post-extinction rise
        of min u extrapolates back to zero.
      - boundary_ok (bool): the zero band kept a distance of at least
        cap - threshold from the grid boundary; None for unbounded shapes.
      - gradient_deviation (dict[float, float]): mean ||∇u| - 1| on the
        zero band per snapshot time, when requested.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    k: int
    threshold: float
    snapshots: list[ScalarGrid]
    diagnostics: list[DiagnosticRow]
    extinction_time: float|None = None
    extinction_estimate: float|None = None
    boundary_ok: bool|None = None
    gradient_deviation: dict[float, float] = {}

    @property
    def final(self) -> ScalarGrid:
        return self.snapshots[-1]

    def radius_series(self) -> list[tuple[float, float]]:
        return [(row.t, row.measured_radius) for row in self.diagnostics
                if row.measured_radius is not None]



class GraphHistory(BaseModel):
    """Snapshots of a graphical flow run.

    Attributes:
      - snapshots (list[GraphField]): fields at the requested times, the
        initial field first.
      - gradient_norms (list[tuple[float, float]]): (t, ‖∇u‖_∞) after every step.
      - steps (int): number of explicit steps taken.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    snapshots: list[GraphField]
    gradient_norms: list[tuple[float, float]] = []
    steps: int = 0

    @property
    def initial(self) -> GraphField:
        return self.snapshots[0]

    @property
    def final(self) -> GraphField:
        return self.snapshots[-1]

    def gradient_growth(self) -> float:
        """Largest ‖∇u(t)‖_∞ / ‖∇u₀‖_∞ over the run (0 for flat data)."""

        start = self.gradient_norms[0][1] if self.gradient_norms else 0.0
        if start == 0:
            return 0.0
        return max(value for _, value in self.gradient_norms) / start

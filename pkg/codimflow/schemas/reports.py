from typing import Any

from pydantic import BaseModel, ConfigDict



# Row schemas

class DiagnosticRow(BaseModel):
    """One step of a level-set run. `wall_ms` is excluded from determinism
    comparisons."""
    model_config = ConfigDict(frozen=True)

    t: float
    min_u: float
    zero_count: int
    components: int
    measured_radius: float|None = None
    dt: float
    wall_ms: float


class CheckRow(BaseModel):
    check: str
    case: str
    metric: str
    value: float|None
    bound: float|None = None
    passed: bool



# Report schemas

class CheckReport(BaseModel):
    """Outcome of one numerical check.

    Attributes:
      - check (str): operation that produced the report.
      - case (str): fixture or family the check ran on.
      - metrics (dict): measured values.
      - bounds (dict): tolerances the metrics with the same key are held to.
      - passed (bool): overall verdict.
      - notes (list[str]): conventions and guard decisions taken by the run.
      - series (list[dict]): optional table, one dict per row.
    """

    check: str
    case: str = ""
    metrics: dict[str, float|int|bool|None] = {}
    bounds: dict[str, float] = {}
    passed: bool
    notes: list[str] = []
    series: list[dict[str, Any]] = []

    def rows(self) -> list[CheckRow]:
        rows = []
        for metric, value in self.metrics.items():
            if isinstance(value, bool):
                value = float(value)
            rows.append(CheckRow(
                check=self.check, case=self.case, metric=metric,
                value=value, bound=self.bounds.get(metric), passed=self.passed
            ))
        return rows

    def worst_ratio(self) -> float|None:
        """Largest metric/bound ratio over the bounded metrics."""

        ratios = [
            abs(self.metrics[key]) / bound for key, bound in self.bounds.items()
            if bound > 0 and isinstance(self.metrics.get(key), (int, float))
            and not isinstance(self.metrics.get(key), bool)
        ]
        return max(ratios) if ratios else None


class ProfileRow(BaseModel):
    """Largest flatness over an r/4-net at one dyadic scale r."""
    model_config = ConfigDict(frozen=True)

    scale: float
    flatness: float|None
    centers: int



# Measurement schemas

class Seminorms(BaseModel):
    """Weighted parabolic seminorms of a graphical flow history."""
    model_config = ConfigDict(frozen=True)

    holder_du: float
    weighted_d2u: float
    alpha: float
    samples: int
    pairs: int


class Nonlinearity(BaseModel):
    """Weighted norms of N = a^{ij} u_ij over a graphical flow history."""
    model_config = ConfigDict(frozen=True)

    sup_weighted: float
    holder_weighted: float
    alpha: float
    samples: int
    pairs: int



# Provenance

class Provenance(BaseModel):
    """Header fields written at the top of every artifact."""
    model_config = ConfigDict(frozen=True)

    tool: str = "codimflow"
    version: str
    config_sha256: str
    seed: int

    def fields(self) -> str:
        return (f"tool={self.tool}; version={self.version}; "
                f"config_sha256={self.config_sha256}; seed={self.seed}")


class ReportSummary(BaseModel):
    """What `emit_report` wrote and the verdict of the run."""

    checks: int
    failed: int
    files: list[str] = []

    @property
    def passed(self) -> bool:
        return self.failed == 0

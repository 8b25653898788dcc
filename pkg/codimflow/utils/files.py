"""
Plain-text formats of point clouds and grid snapshots.

Every file starts with one header line, `<format> v1; key=value; ...`, to
which the provenance fields of the run are appended. Values are written
with 17 significant digits so that files reproduce the arrays exactly.

  - codimflow-cloud v1; n=; k=; boundary=B  then one point per line,
    comma-separated; the last B lines are boundary points.
  - codimflow-grid v1; n=; shape=; origin=; h=; t=; cap=  then the node
    values in row-major order, one per line.

"""

from pathlib import Path

import numpy as np

from codimflow.models.clouds import PointCloud
from codimflow.models.grids import ScalarGrid
from codimflow.schemas.reports import Provenance
from core.errors import ConfigError



CLOUD_FORMAT = "codimflow-cloud v1"
GRID_FORMAT = "codimflow-grid v1"



# Helpers

def _number(value:float) -> str:
    return f"{value:.17g}"


def _numbers(values) -> str:
    return ",".join(_number(float(v)) for v in np.ravel(values))


def _header(magic:str, fields:dict, provenance:Provenance|None) -> str:
    parts = [magic] + [f"{key}={value}" for key, value in fields.items()]
    if provenance is not None:
        parts.append(provenance.fields())
    return "; ".join(parts)



def parse_header(line:str, magic:str) -> dict[str, str]:
    """Return the key=value fields of a header line of the given format."""

    parts = [part.strip() for part in line.strip().split(";")]
    if not parts or parts[0] != magic:
        raise ConfigError("Unexpected file header", expected=magic, found=parts[0] if parts else "")
    fields = {}
    for part in parts[1:]:
        key, sep, value = part.partition("=")
        if not sep:
            raise ConfigError("Malformed header field", field=part)
        fields[key.strip()] = value.strip()
    return fields



def _read_lines(path:Path) -> list[str]:
    try:
        return Path(path).read_text().splitlines()
    except OSError as error:
        raise ConfigError("Cannot read file", path=str(path), reason=error.strerror) from error


def _write_lines(path:Path, lines:list[str]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    return path


def _ints(text:str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(","))


def _floats(text:str) -> list[float]:
    return [float(v) for v in text.split(",")]



# Point clouds

def write_cloud(path:Path, cloud:PointCloud, provenance:Provenance|None=None) -> Path:
    boundary = cloud.boundary if cloud.boundary is not None else np.zeros((0, cloud.n))
    header = _header(CLOUD_FORMAT, {"n": cloud.n, "k": cloud.k, "boundary": len(boundary)}, provenance)
    body = [_numbers(point) for point in cloud.points] + [_numbers(point) for point in boundary]
    return _write_lines(path, [header, *body])



def read_cloud(path:Path) -> PointCloud:
    lines = [line for line in _read_lines(path) if line.strip()]
    if not lines:
        raise ConfigError("Empty cloud file", path=str(path))
    fields = parse_header(lines[0], CLOUD_FORMAT)
    try:
        n, k = int(fields["n"]), int(fields["k"])
        count = int(fields.get("boundary", 0))
        rows = np.array([_floats(line) for line in lines[1:]], dtype=float).reshape(-1, n)
    except (KeyError, ValueError) as error:
        raise ConfigError("Malformed cloud file", path=str(path), reason=str(error)) from error
    if count > len(rows):
        raise ConfigError("Cloud file lists more boundary points than points", path=str(path))
    points = rows[: len(rows) - count]
    boundary = rows[len(rows) - count:] if count else None
    return PointCloud(n=n, k=k, points=points, boundary=boundary)



# Grid snapshots

def write_grid(path:Path, grid:ScalarGrid, provenance:Provenance|None=None) -> Path:
    fields = {
        "n": grid.n,
        "shape": ",".join(str(m) for m in grid.shape),
        "origin": _numbers(grid.origin),
        "h": _number(grid.h),
        "t": _number(grid.time),
        "cap": _number(grid.cap),
    }
    body = [_number(value) for value in grid.data.ravel()]
    return _write_lines(path, [_header(GRID_FORMAT, fields, provenance), *body])



def read_grid(path:Path) -> ScalarGrid:
    lines = [line for line in _read_lines(path) if line.strip()]
    if not lines:
        raise ConfigError("Empty grid file", path=str(path))
    fields = parse_header(lines[0], GRID_FORMAT)
    try:
        data = np.array([float(line) for line in lines[1:]])
        return ScalarGrid(
            n=int(fields["n"]), shape=_ints(fields["shape"]), origin=_floats(fields["origin"]),
            h=float(fields["h"]), data=data, time=float(fields["t"]),
            cap=float(fields.get("cap", data.max() if len(data) else 1.0)),
        )
    except (KeyError, ValueError) as error:
        raise ConfigError("Malformed grid file", path=str(path), reason=str(error)) from error

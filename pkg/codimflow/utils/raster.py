"""
Two-dimensional slices of grid snapshots as PGM (P2) rasters, with an
optional PNG preview.

Gray levels map u affinely: gray = round(255 * min(u, cap) / cap), so the
zero set is black. Image rows follow the first slice axis and columns the
second one.

"""

from pathlib import Path

import numpy as np
from PIL import Image

from codimflow.models.grids import ScalarGrid
from codimflow.schemas.flows import SliceSpec
from codimflow.schemas.reports import Provenance
from core.errors import ConfigError



def slice_axes(grid:ScalarGrid, spec:SliceSpec) -> tuple[int, int]:
    if spec.axes is None:
        if grid.n >= 3:
            raise ConfigError("Slices of grids with n >= 3 need an explicit axis pair", n=grid.n)
        return 0, 1
    a, b = spec.axes
    if a == b or not (0 <= a < grid.n and 0 <= b < grid.n):
        raise ConfigError("Slice axes must be two distinct grid axes", axes=spec.axes, n=grid.n)
    return a, b



def extract_slice(grid:ScalarGrid, spec:SliceSpec) -> np.ndarray:
    """Values on the plane of the two slice axes, other axes fixed at `index`
    (their middle node when omitted)."""

    a, b = slice_axes(grid, spec)
    index = list(spec.index) if spec.index is not None else [m // 2 for m in grid.shape]
    if len(index) != grid.n:
        raise ConfigError("Slice index must have one entry per axis", index=index, n=grid.n)
    selection = [slice(None) if axis in (a, b) else int(index[axis]) for axis in range(grid.n)]
    plane = grid.data[tuple(selection)]
    return plane if a < b else plane.T



def gray_levels(values:np.ndarray, cap:float) -> np.ndarray:
    return np.rint(255 * np.clip(values, 0.0, cap) / cap).astype(np.uint8)



def write_slice(
    path:Path,
    grid:ScalarGrid,
    spec:SliceSpec,
    provenance:Provenance|None=None,
    png:bool=False
) -> list[Path]:
    """Write `path` as a P2 raster and, when asked, a PNG next to it."""

    a, b = slice_axes(grid, spec)
    gray = gray_levels(extract_slice(grid, spec), grid.cap)
    lines = ["P2"]
    if provenance is not None:
        lines.append(f"# provenance: {provenance.fields()}")
    lines += [
        f"# gray = round(255 * min(u, cap) / cap), cap={grid.cap:.17g}",
        f"# rows: axis {a}, columns: axis {b}, t={grid.time:.17g}",
        f"{gray.shape[1]} {gray.shape[0]}",
        "255",
    ]
    lines += [" ".join(str(int(v)) for v in row) for row in gray]

    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")
    written = [path]
    if png:
        preview = path.with_suffix(".png")
        Image.fromarray(gray, mode="L").save(preview)
        written.append(preview)
    return written

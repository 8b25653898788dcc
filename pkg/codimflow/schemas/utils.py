import math
from typing import Any



def check_positive(values:Any, *field_names:str) -> Any:
    """Validates that the given numeric fields are positive when present."""

    for name in field_names:
        value = values.get(name)
        if isinstance(value, (int, float)) and not value > 0:
            raise ValueError(f"{name} must be positive.")
    return values



def check_codimension(values:Any) -> Any:
    """Validates that 1 <= k <= n - 1 and that 2 <= n <= 4."""

    n, k = values.get("n"), values.get("k")
    if n is None or k is None: return values
    if not 2 <= n <= 4:
        raise ValueError("Level-set flows run in dimensions 2 to 4.")
    if not 1 <= k <= n - 1:
        raise ValueError("The flow dimension k must satisfy 1 <= k <= n - 1.")
    return values



def check_grid_bounds(values:Any) -> Any:
    """Builds origin and shape from `lower`, `upper` and `h` when given."""

    values = dict(values)
    lower, upper = values.pop("lower", None), values.pop("upper", None)
    if lower is None and upper is None: return values
    h = values.get("h")
    if lower is None or upper is None or h is None:
        raise ValueError("A grid box needs lower, upper and h.")
    if len(lower) != len(upper):
        raise ValueError("lower and upper must have the same length.")
    shape = []
    for low, high in zip(lower, upper):
        cells = (high - low) / h
        if cells <= 0 or abs(cells - round(cells)) > 1e-9 * max(1.0, cells):
            raise ValueError("The grid box must be a whole number of cells wide.")
        shape.append(int(round(cells)) + 1)
    values["origin"] = list(lower)
    values["shape"] = shape
    return values



def check_times(values:Any, field_name:str, end_name:str) -> Any:
    """Validates that the listed times lie in [0, end]."""

    times = values.get(field_name) or []
    end = values.get(end_name)
    if end is None: return values
    if any(not 0 <= t <= end for t in times):
        raise ValueError(f"Every value of {field_name} must lie in [0, {end_name}].")
    values[field_name] = sorted(times)
    return values



def check_shape_fields(values:Any) -> Any:
    """Validates that a shape descriptor carries the fields of its kind."""

    required = {
        "spheres": ("radii",),
        "segment": ("start", "end"),
        "cloud": ("path",),
        "cylinder": ("j",),
    }
    kind = values.get("kind")
    kind = getattr(kind, "value", kind)
    for name in required.get(kind, ()):
        if values.get(name) is None:
            raise ValueError(f"A {kind} shape needs the {name} field.")
    theta = values.get("theta")
    if kind == "koch" and theta is not None and not 0 <= theta < math.pi / 4:
        raise ValueError("The Koch bend angle must lie in [0, pi/4).")
    return values



def check_overrides(values:Any) -> Any:
    """Validates that every override has the form key.sub=value."""

    for item in values.get("overrides") or []:
        key, sep, _ = str(item).partition("=")
        if not sep or not key.strip():
            raise ValueError(f"Override {item!r} must have the form key=value.")
    return values



def check_ascending(values:Any, field_name:str) -> Any:
    """Validates that a list of numbers is positive and sorts it."""

    items = values.get(field_name)
    if items is None: return values
    if any(not v > 0 for v in items):
        raise ValueError(f"Every value of {field_name} must be positive.")
    values[field_name] = sorted(items)
    return values

import numpy as np
from pydantic import BaseModel, ConfigDict



class Base(BaseModel):
    """Base model for the numerical values of the lab (grids, clouds, frames)."""
    model_config = ConfigDict(
        arbitrary_types_allowed=True,
        frozen=True,
    )



def frozen_array(values, dtype=float) -> np.ndarray:
    """Return a read-only float array owning its data."""

    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array

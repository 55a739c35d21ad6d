"""Small shared helpers: JSON coercion and shared defaults."""

from __future__ import annotations

import numpy as np

DEFAULT_SEED = 123456789
DEFAULT_BOX = (-10.0, 10.0)
DEFAULT_SAMPLES = 10_000
DEFAULT_BOUND = 10**6


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays and tuples for json.dumps."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj

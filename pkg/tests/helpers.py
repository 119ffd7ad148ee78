import numpy as np


def results_equal(a, b) -> bool:
    """Deep equality across the result shapes the apps return."""
    if isinstance(a, dict):
        return set(a) == set(b) and all(results_equal(a[k], b[k]) for k in a)
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return np.array_equal(np.asarray(a), np.asarray(b))
    if isinstance(a, (set, frozenset)):
        return a == b
    if isinstance(a, (list, tuple)):
        return len(a) == len(b) and all(results_equal(p, q) for p, q in zip(a, b))
    return a == b

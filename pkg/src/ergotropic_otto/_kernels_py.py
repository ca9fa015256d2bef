"""Pure numpy kernels; same signatures and results as the compiled ones."""
from functools import lru_cache
from itertools import permutations

import numpy as np

_CHUNK = 1 << 16


@lru_cache(maxsize=4)
def _all_permutations(d):
    perms = np.array(list(permutations(range(d))), dtype=np.int8 if d < 128 else np.intp)
    perms.setflags(write=False)
    return perms


def min_permutation_cost(weights, values):
    """Minimum of ``sum_i weights[i] * values[perm[i]]`` over all permutations.

    Returns ``(cost, minimizer)``.
    """
    weights = np.ascontiguousarray(weights, dtype=float)
    values = np.ascontiguousarray(values, dtype=float)
    if weights.shape != values.shape:
        raise ValueError("weights and values differ in length")
    d = len(weights)
    if d == 0:
        return 0.0, np.empty(0, dtype=np.intp)
    perms = _all_permutations(d)
    best_cost, best = np.inf, None
    for start in range(0, len(perms), _CHUNK):
        block = perms[start:start + _CHUNK]
        costs = values[block] @ weights
        k = int(np.argmin(costs))
        if costs[k] < best_cost:
            best_cost, best = float(costs[k]), block[k]
    return best_cost, best.astype(np.intp)


def _search_right(cdf, u):
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)


def sample_counts(cdf_joint, cdf_a, cdf_b, uniforms):
    """Histogram of ``(initial state, n', m')`` draws by inverse CDF."""
    uniforms = np.asarray(uniforms, dtype=float)
    if uniforms.ndim != 2 or uniforms.shape[1] != 3:
        raise ValueError("uniforms must have three columns")
    size, da, db = len(cdf_joint), len(cdf_a), len(cdf_b)
    i = _search_right(np.asarray(cdf_joint), uniforms[:, 0])
    a = _search_right(np.asarray(cdf_a), uniforms[:, 1])
    b = _search_right(np.asarray(cdf_b), uniforms[:, 2])
    flat = np.bincount((i * da + a) * db + b, minlength=size * da * db)
    return flat.astype(np.int64).reshape(size, da, db)

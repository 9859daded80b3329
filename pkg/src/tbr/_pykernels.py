"""Pure-numpy implementations of the per-ball hot kernels.

This is the fallback lane used when the compiled extension is unavailable
(or when TBR_KERNEL_BACKEND=py).  Both lanes must produce bit-identical
results: accumulation visits balls in input order in either case.
"""

import numpy as np


def flat_bin_index(ev, la, ev_min, ev_width, n_ev, la_min, la_width, n_la):
    """Row-major flat cell index for each (ev, la) pair.

    Bins are half-open [lo, lo + width); the top edge of each axis folds
    into the last bin.  Inputs must already be inside the grid ranges.
    """
    i = ((np.asarray(ev, dtype=np.float64) - ev_min) / ev_width).astype(np.int64)
    j = ((np.asarray(la, dtype=np.float64) - la_min) / la_width).astype(np.int64)
    np.minimum(i, n_ev - 1, out=i)
    np.minimum(j, n_la - 1, out=j)
    return i * n_la + j


def accumulate(idx, values, n_bins):
    """Per-bin (sum, count) of ``values`` grouped by ``idx``."""
    idx = np.asarray(idx, dtype=np.int64)
    sums = np.bincount(idx, weights=np.asarray(values, dtype=np.float64),
                       minlength=n_bins)
    counts = np.bincount(idx, minlength=n_bins).astype(np.int64)
    return sums, counts


def subtract_lookup(idx, values, table):
    """values[k] - table[idx[k]] (NaN table entries propagate)."""
    idx = np.asarray(idx, dtype=np.int64)
    return np.asarray(values, dtype=np.float64) - table[idx]

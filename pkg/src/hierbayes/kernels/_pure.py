"""Pure-numpy fallback for the ball-counting kernel."""

import numpy as np

BACKEND = "pure"


def ball_counts(samples, center, sq_thresholds):
    """Count rows of ``samples`` within squared Euclidean distance of ``center``.

    ``sq_thresholds`` must be ascending; returns one cumulative count per
    threshold.
    """
    samples = np.asarray(samples, dtype=float)
    center = np.asarray(center, dtype=float)
    diff = samples - center
    sq = np.einsum("ij,ij->i", diff, diff)
    sq.sort()
    return np.searchsorted(sq, sq_thresholds, side="right").astype(np.int64)

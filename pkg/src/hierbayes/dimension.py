"""Local metric dimension from Hellinger-ball measures.

The estimator counts samples inside Hellinger balls over a geometric radius
grid and fits the slope of -log P(ball) against log(1/eps) by weighted least
squares.  Radii whose ball holds fewer than ``min_hits`` samples are dropped
so that the Monte Carlo resolution limit is explicit.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .seeding import SeedSpec, as_seed

MAX_HELLINGER = np.sqrt(2.0)


class InsufficientResolutionError(ValueError):
    pass


@dataclass
class DimensionEstimate:
    dim: float
    epsilons: np.ndarray
    log_ball_measures: np.ndarray  # -log P(ball) per retained epsilon
    slope_r2: float
    hits_per_epsilon: np.ndarray
    sample_count: int
    flags: list = field(default_factory=list)


def geometric_eps_grid(eps_max=0.5, ratio=0.5, count=12):
    """Decreasing radius grid eps_max, eps_max*ratio, ..."""
    if not 0 < ratio < 1 or eps_max <= 0:
        raise ValueError("need eps_max > 0 and 0 < ratio < 1")
    if count < 3:
        raise ValueError("need at least 3 scales for a slope fit")
    return eps_max * ratio ** np.arange(count)


def gaussian_sq_radius(eps, sigma):
    """Squared Euclidean radius equivalent to a Hellinger-ball radius eps.

    For equal-covariance isotropic Gaussians with std ``sigma``,
    hellinger(d) <= eps  iff  ||d||^2 <= -8 sigma^2 log(1 - eps^2/2).
    """
    eps = np.asarray(eps, dtype=float)
    thr = np.full(eps.shape, np.inf)
    small = eps < MAX_HELLINGER
    thr[small] = -8.0 * sigma**2 * np.log1p(-0.5 * eps[small] ** 2)
    return thr


def ball_measure(sampler, hellinger_fn, center, eps, samples, seed: SeedSpec):
    """Fraction of sampled points within Hellinger distance eps of ``center``.

    ``sampler(size, rng)`` draws from the measure; ``hellinger_fn(points,
    center)`` returns squared Hellinger distances.  Returns (p_hat, binomial
    std error).
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    rng = as_seed(seed).rng()
    pts = sampler(samples, rng)
    dsq = np.asarray(hellinger_fn(pts, center), dtype=float)
    hits = int(np.count_nonzero(dsq <= eps * eps))
    p = hits / samples
    return p, np.sqrt(p * (1.0 - p) / samples)


def _fit_slope(x, y, weights):
    w = np.asarray(weights, dtype=float)
    xm = np.average(x, weights=w)
    ym = np.average(y, weights=w)
    sxx = np.sum(w * (x - xm) ** 2)
    slope = np.sum(w * (x - xm) * (y - ym)) / sxx
    resid = y - ym - slope * (x - xm)
    ss_res = np.sum(w * resid**2)
    ss_tot = np.sum(w * (y - ym) ** 2)
    r2 = 1.0 if ss_tot == 0 else 1.0 - ss_res / ss_tot
    return slope, max(0.0, min(1.0, r2))


def estimate_from_counts(eps_grid, counts, total, min_hits=30, min_r2=0.95):
    """Dimension fit given per-epsilon ball hit counts (shared sample pool)."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    counts = np.asarray(counts, dtype=np.int64)
    keep = counts >= min_hits
    if keep.sum() < 3:
        raise InsufficientResolutionError(
            f"only {int(keep.sum())} radii retain >= {min_hits} hits; "
            "increase samples or enlarge the radius grid"
        )
    eps = eps_grid[keep]
    hits = counts[keep]
    p = hits / total
    y = -np.log(p)
    x = np.log(1.0 / eps)
    # binomial weights: var(-log p_hat) ~ (1-p)/(p N)
    weights = hits / np.maximum(1.0 - p, 1e-12)
    slope, r2 = _fit_slope(x, y, weights)
    flags = [] if r2 >= min_r2 else ["low_fit"]
    return DimensionEstimate(
        dim=max(0.0, float(slope)),
        epsilons=eps,
        log_ball_measures=y,
        slope_r2=float(r2),
        hits_per_epsilon=hits,
        sample_count=total,
        flags=flags,
    )


def estimate_local_dimension(
    sampler,
    center,
    eps_grid,
    samples,
    seed: SeedSpec,
    *,
    gaussian_sigma=None,
    hellinger_fn=None,
    min_hits=30,
    chunk=1_000_000,
    min_r2=0.95,
) -> DimensionEstimate:
    """Local metric dimension of the sampled measure at ``center``.

    The fast path (``gaussian_sigma``) applies to families whose Hellinger
    distance is the equal-covariance Gaussian closed form of the point
    coordinates; ball membership then reduces to squared-Euclidean
    thresholds handled by the compiled counting kernel.  Otherwise
    ``hellinger_fn(points, center)`` must return squared Hellinger
    distances.  Sampling is streamed in chunks keyed by stream_id, so the
    result is identical regardless of chunk size.
    """
    seed = as_seed(seed)
    eps_grid = np.sort(np.asarray(eps_grid, dtype=float))[::-1]
    if gaussian_sigma is None and hellinger_fn is None:
        raise ValueError("pass gaussian_sigma or hellinger_fn")
    center = np.atleast_1d(np.asarray(center, dtype=float))
    asc = eps_grid[::-1]
    counts = np.zeros(eps_grid.shape[0], dtype=np.int64)
    if gaussian_sigma is not None:
        thr = gaussian_sq_radius(asc, gaussian_sigma)
        finite = np.isfinite(thr)
    done = 0
    stream = 0
    while done < samples:
        take = min(chunk, samples - done)
        pts = np.ascontiguousarray(
            np.atleast_2d(sampler(take, seed.stream(seed.stream_id + stream).rng())),
            dtype=float,
        )
        if gaussian_sigma is not None:
            c = np.zeros_like(asc, dtype=np.int64)
            c[finite] = kernels.ball_counts(pts, center, np.ascontiguousarray(thr[finite]))
            c[~finite] = take
        else:
            dsq = np.asarray(hellinger_fn(pts, center), dtype=float)
            dsq.sort()
            c = np.searchsorted(dsq, asc * asc, side="right")
        counts += c[::-1]
        done += take
        stream += 1
    return estimate_from_counts(
        eps_grid, counts, samples, min_hits=min_hits, min_r2=min_r2
    )

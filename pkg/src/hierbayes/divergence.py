"""Hellinger and Kullback-Leibler divergences: closed forms and Monte Carlo.

Conventions: KL values are in nats; squared Hellinger values live in [0, 2].
For equal-covariance isotropic Gaussians N(m1, s^2 I), N(m2, s^2 I):

    hellinger_sq = 2 (1 - exp(-||m1 - m2||^2 / (8 s^2)))
    kl           = ||m1 - m2||^2 / (2 s^2)

so kl >= hellinger_sq / 2 always and hellinger_sq ~ ||d||^2 / (4 s^2) as the
means approach each other.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .seeding import SeedSpec, as_seed


@dataclass
class DivergenceEstimate:
    value: float
    std_error: float = 0.0
    method: str = "closed_form"  # closed_form | monte_carlo | quadrature
    sample_count: int = 0
    flags: list = field(default_factory=list)

    def __post_init__(self):
        if self.method != "monte_carlo" and self.std_error != 0.0:
            raise ValueError("std_error must be 0 for non-Monte-Carlo methods")


@dataclass
class DominationCertificate:
    """Empirical constant alpha with kl <= alpha * hellinger_sq on tested pairs."""

    alpha: float
    tested_pairs: int
    max_ratio_observed: float
    unbounded: bool = False


def _sqdist(mean1, mean2):
    m1 = np.atleast_1d(np.asarray(mean1, dtype=float))
    m2 = np.atleast_1d(np.asarray(mean2, dtype=float))
    if m1.shape != m2.shape:
        raise ValueError("mean vectors must have equal length")
    d = m1 - m2
    return float(d @ d)


def hellinger_sq_gaussian(mean1, mean2, sigma: float) -> DivergenceEstimate:
    """Squared Hellinger distance between N(mean1, sigma^2 I) and N(mean2, sigma^2 I)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    val = 2.0 * (1.0 - np.exp(-_sqdist(mean1, mean2) / (8.0 * sigma**2)))
    return DivergenceEstimate(float(val))


def kl_gaussian_equal_cov(mean1, mean2, sigma: float) -> DivergenceEstimate:
    """KL divergence between N(mean1, sigma^2 I) and N(mean2, sigma^2 I)."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    return DivergenceEstimate(_sqdist(mean1, mean2) / (2.0 * sigma**2))


def hellinger_sq_gaussian_batch(centers, point, sigma):
    """Vectorized squared Hellinger distances from ``point`` to rows of ``centers``."""
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    diff = centers - np.asarray(point, dtype=float)
    sq = np.einsum("ij,ij->i", diff, diff)
    return 2.0 * (1.0 - np.exp(-sq / (8.0 * sigma**2)))


def kl_gaussian_batch(centers, point, sigma):
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    diff = centers - np.asarray(point, dtype=float)
    return np.einsum("ij,ij->i", diff, diff) / (2.0 * sigma**2)


def _spd_factor(cov, name):
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    if not np.allclose(cov, cov.T):
        raise ValueError(f"{name} is not symmetric")
    try:
        return cov, np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as e:
        eigs = np.linalg.eigvalsh(cov)
        raise ValueError(f"{name} is not positive definite (min eig {eigs.min():g})") from e


def kl_gaussian_general(mean1, cov1, mean2, cov2) -> DivergenceEstimate:
    """KL( N(mean1,cov1) || N(mean2,cov2) ) for SPD covariance matrices."""
    m1 = np.atleast_1d(np.asarray(mean1, dtype=float))
    m2 = np.atleast_1d(np.asarray(mean2, dtype=float))
    cov1, chol1 = _spd_factor(cov1, "cov1")
    cov2, chol2 = _spd_factor(cov2, "cov2")
    d = m1.shape[0]
    sol = np.linalg.solve(chol2, np.linalg.solve(chol2, cov1).T)
    trace = np.trace(sol)
    y = np.linalg.solve(chol2, m1 - m2)
    quad = float(y @ y)
    logdet = 2.0 * (np.sum(np.log(np.diag(chol2))) - np.sum(np.log(np.diag(chol1))))
    return DivergenceEstimate(0.5 * (trace + quad - d + logdet))


def kl_monte_carlo(
    p_log_density, q_log_density, p_sampler, samples: int, seed: SeedSpec
) -> DivergenceEstimate:
    """Monte Carlo estimate of KL(p || q) as mean of log p - log q under p.

    ``p_sampler(size, rng)`` draws from p.  A zero q-density at any sampled
    point is a support violation: the estimate is reported as +inf with a
    flag instead of being clipped.
    """
    rng = as_seed(seed).rng()
    x = p_sampler(samples, rng)
    terms = np.asarray(p_log_density(x), dtype=float) - np.asarray(
        q_log_density(x), dtype=float
    )
    if np.any(np.isposinf(terms)):
        return DivergenceEstimate(
            np.inf, 0.0, "monte_carlo", samples, flags=["support_violation"]
        )
    value = float(terms.mean())
    se = float(terms.std(ddof=1) / np.sqrt(samples)) if samples > 1 else np.inf
    return DivergenceEstimate(value, se, "monte_carlo", samples)


def entropy_quantized(dist) -> float:
    """Shannon entropy in bits of a finite distribution (array of probs or Discrete)."""
    probs = np.asarray(getattr(dist, "probs", dist), dtype=float)
    p = probs[probs > 0]
    return float(-(p * np.log2(p)).sum())


def kl_discrete(p, q) -> float:
    """Exact KL (nats) between finite distributions; +inf on support violation."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    mask = p > 0
    if np.any(q[mask] == 0):
        return np.inf
    return float(np.sum(p[mask] * (np.log(p[mask]) - np.log(q[mask]))))


def check_feynman_inequality(w_probs, v_probs, u):
    """Check -E_V log E_W e^u <= -log E_W e^{E_V u} on a finite (W,V) product.

    ``u`` is a |W| x |V| matrix; W and V are independent with the given
    marginals.  Returns (holds, lhs, rhs).
    """
    w_probs = np.asarray(w_probs, dtype=float)
    v_probs = np.asarray(v_probs, dtype=float)
    u = np.asarray(u, dtype=float)
    if u.shape != (w_probs.shape[0], v_probs.shape[0]):
        raise ValueError("u must be |W| x |V|")
    logw = np.log(w_probs)
    inner = logsumexp(u + logw[:, None], axis=0)  # log E_W e^{u(.,v)}
    lhs = -float(v_probs @ inner)
    rhs = -float(logsumexp(u @ v_probs + logw))
    return lhs <= rhs + 1e-12, lhs, rhs


def fit_domination_constant(
    hyper_sampler, hellinger_sq_fn, kl_fn, pair_count: int, seed: SeedSpec
) -> DominationCertificate:
    """Empirical alpha = max over sampled hyper-parameter pairs of kl / hellinger_sq.

    The ratio is 1 by convention when both divergences vanish.  A zero
    Hellinger distance with positive KL makes the certificate unbounded.
    """
    rng = as_seed(seed).rng()
    a = np.atleast_2d(hyper_sampler(pair_count, rng))
    b = np.atleast_2d(hyper_sampler(pair_count, rng))
    dh = np.asarray([hellinger_sq_fn(x, y) for x, y in zip(a, b)], dtype=float)
    dk = np.asarray([kl_fn(x, y) for x, y in zip(a, b)], dtype=float)
    ratios = np.ones_like(dh)
    pos = dh > 0
    ratios[pos] = dk[pos] / dh[pos]
    unbounded = bool(np.any((dh == 0) & (dk > 0)))
    max_ratio = np.inf if unbounded else float(ratios.max(initial=1.0))
    return DominationCertificate(
        alpha=max_ratio,
        tested_pairs=pair_count,
        max_ratio_observed=max_ratio,
        unbounded=unbounded,
    )

"""Three-tier probability models: hyper-prior -> prior family -> likelihood family.

A :class:`HierarchicalModel` bundles a density + sampler for each tier.
Densities are stated relative to a declared reference measure per space:
Lebesgue for Euclidean spaces, counting measure for finite/quantized ones.
All densities are handled in natural-log space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .seeding import SeedSpec, as_seed

LOG_ZERO = -np.inf


class Gaussian:
    """Isotropic or full-covariance Gaussian on R^dim (Lebesgue reference)."""

    measure = "lebesgue"

    def __init__(self, mean, cov=None, std=None):
        self.mean = np.atleast_1d(np.asarray(mean, dtype=float))
        d = self.mean.shape[0]
        if std is not None:
            if cov is not None:
                raise ValueError("pass cov or std, not both")
            std = float(std)
            if std <= 0:
                raise ValueError("std must be positive")
            self._iso_std = std
            self.cov = std * std * np.eye(d)
            self._chol = std * np.eye(d)
        else:
            self.cov = np.atleast_2d(np.asarray(cov, dtype=float))
            if self.cov.shape != (d, d):
                raise ValueError("covariance shape mismatch")
            try:
                self._chol = np.linalg.cholesky(self.cov)
            except np.linalg.LinAlgError as e:
                raise ValueError("covariance must be symmetric positive definite") from e
            self._iso_std = None
        self._log_norm = -0.5 * d * np.log(2 * np.pi) - np.sum(
            np.log(np.diag(self._chol))
        )

    @property
    def dim(self):
        return self.mean.shape[0]

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        x2 = np.atleast_2d(x) - self.mean
        if self._iso_std is not None:
            q = np.sum(x2 * x2, axis=1) / self._iso_std**2
        else:
            y = np.linalg.solve(self._chol, x2.T)
            q = np.sum(y * y, axis=0)
        out = self._log_norm - 0.5 * q
        return out[0] if squeeze else out

    def sample(self, size, rng):
        z = rng.standard_normal((size, self.dim))
        return self.mean + z @ self._chol.T


class PointMass:
    """Degenerate distribution at a single point.

    Permitted only in designated point-mass instances; log_density uses a
    counting-measure convention (0 at the atom, -inf elsewhere).
    """

    measure = "counting"

    def __init__(self, value):
        self.value = np.atleast_1d(np.asarray(value, dtype=float))

    @property
    def dim(self):
        return self.value.shape[0]

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim <= 1
        x2 = np.atleast_2d(x)
        hit = np.all(x2 == self.value, axis=1)
        out = np.where(hit, 0.0, LOG_ZERO)
        return out[0] if squeeze else out

    def sample(self, size, rng):
        return np.tile(self.value, (size, 1))


class UniformBox:
    """Uniform distribution on an axis-aligned box (Lebesgue reference)."""

    measure = "lebesgue"

    def __init__(self, lo, hi):
        self.lo = np.atleast_1d(np.asarray(lo, dtype=float))
        self.hi = np.atleast_1d(np.asarray(hi, dtype=float))
        if self.lo.shape != self.hi.shape or np.any(self.hi <= self.lo):
            raise ValueError("box must be nonempty")
        self._log_dens = -np.sum(np.log(self.hi - self.lo))

    @property
    def dim(self):
        return self.lo.shape[0]

    def log_density(self, x):
        x = np.asarray(x, dtype=float)
        squeeze = x.ndim == 1
        x2 = np.atleast_2d(x)
        inside = np.all((x2 >= self.lo) & (x2 <= self.hi), axis=1)
        out = np.where(inside, self._log_dens, LOG_ZERO)
        return out[0] if squeeze else out

    def sample(self, size, rng):
        return rng.uniform(self.lo, self.hi, size=(size, self.dim))


class Discrete:
    """Finite distribution over integer codes 0..K-1 (counting reference)."""

    measure = "counting"

    def __init__(self, probs):
        self.probs = np.asarray(probs, dtype=float)
        if np.any(self.probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = self.probs.sum()
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"probabilities must sum to 1 (got {total!r})")
        with np.errstate(divide="ignore"):
            self._log_probs = np.log(self.probs)

    @property
    def dim(self):
        return 1

    @property
    def support_size(self):
        return self.probs.shape[0]

    def log_density(self, x):
        idx = np.asarray(x)
        squeeze = idx.ndim == 0
        out = self._log_probs[np.atleast_1d(idx).astype(int).ravel()]
        return out[0] if squeeze else out

    def sample(self, size, rng):
        return rng.choice(self.support_size, size=size, p=self.probs)


@dataclass
class SampleMatrix:
    """An (n,m)-sample: row i holds m observations drawn from task i."""

    entries: np.ndarray  # (n, m) or (n, m, obs_dim)

    def __post_init__(self):
        self.entries = np.asarray(self.entries)
        if self.entries.ndim not in (2, 3):
            raise ValueError("entries must be (n, m) or (n, m, obs_dim)")
        if self.n < 1:
            raise ValueError("need at least one task row")

    @property
    def n(self):
        return self.entries.shape[0]

    @property
    def m(self):
        return self.entries.shape[1]

    def row(self, i):
        return self.entries[i]

    def column(self, j):
        return self.entries[:, j]


@dataclass
class HierarchicalModel:
    """The hyper-prior / prior-family / likelihood-family triple.

    ``prior_family(pi)`` and ``likelihood_family(theta)`` return distribution
    objects with ``log_density`` and ``sample``.  ``hyper_support`` guards
    ``prior_family`` against hyper-parameters outside the declared support.
    """

    hyper_prior: object
    prior_family: Callable
    likelihood_family: Callable
    space_dims: dict = field(default_factory=dict)
    reference_measures: dict = field(default_factory=dict)
    hyper_support: Callable | None = None

    def check_hyper(self, pi):
        if self.hyper_support is not None and not self.hyper_support(pi):
            raise ValueError(f"hyper-parameter outside hyper-prior support: {pi!r}")


def sample_tasks(model: HierarchicalModel, pi, n: int, seed: SeedSpec) -> np.ndarray:
    """Draw n i.i.d. task parameters from p(.|pi)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    model.check_hyper(pi)
    rng = as_seed(seed).rng()
    return model.prior_family(pi).sample(n, rng)


def sample_observations(
    model: HierarchicalModel, thetas, m: int, seed: SeedSpec
) -> SampleMatrix:
    """Draw an (n,m)-sample: row i holds m i.i.d. draws from p(.|theta_i)."""
    if m < 0:
        raise ValueError("m must be >= 0")
    seed = as_seed(seed)
    thetas = np.asarray(thetas)
    n = thetas.shape[0]
    rows = []
    for i in range(n):
        # per-task stream so rows are independent and individually reproducible
        rng = seed.stream(seed.stream_id * (n + 1) + i + 1).rng()
        like = model.likelihood_family(thetas[i])
        draws = like.sample(m, rng) if m > 0 else np.empty((0, like.dim))
        rows.append(np.asarray(draws))
    entries = np.stack(rows, axis=0) if n else np.empty((0, m))
    return SampleMatrix(entries)


def log_density(model: HierarchicalModel, level: str, condition, query):
    """Natural-log density w.r.t. the declared reference measure.

    ``level`` selects the tier: "hyper" (condition ignored), "prior"
    (condition is a hyper-parameter) or "likelihood" (condition is a task
    parameter).  Returns -inf at zero-density points.
    """
    if level == "hyper":
        dist = model.hyper_prior
    elif level == "prior":
        model.check_hyper(condition)
        dist = model.prior_family(condition)
    elif level == "likelihood":
        dist = model.likelihood_family(condition)
    else:
        raise ValueError(f"unknown level {level!r}")
    return dist.log_density(query)

"""Posterior and predictive computations over hierarchical instances.

Every operation routes to a closed form when the instance admits one,
falls back to deterministic quadrature over the hyper-parameter when the
hyper-prior is low dimensional, and only then to Monte Carlo.  The chosen
route is always recorded on the returned object.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .model import Discrete, Gaussian, PointMass, UniformBox
from .seeding import SeedSpec, as_seed
from .zoo import (
    ABGaussianModel,
    DiscreteHierarchicalModel,
    MlpLdrModel,
    SharedMeanGaussianModel,
)


@dataclass
class PosteriorRepresentation:
    """A posterior over hyper-parameters (or stacked task parameters).

    ``kind`` is one of ``closed_form`` (``distribution`` holds a Gaussian or
    point mass), ``grid`` (``nodes`` (G, d) with normalized ``log_weights``),
    or ``monte_carlo`` (equally weighted ``nodes``).
    """

    kind: str
    distribution: object | None = None
    nodes: np.ndarray | None = None
    log_weights: np.ndarray | None = None
    meta: dict = field(default_factory=dict)

    def mean(self):
        if self.kind == "closed_form":
            return np.atleast_1d(np.asarray(self.distribution.mean, dtype=float))
        w = (
            np.exp(self.log_weights)
            if self.log_weights is not None
            else np.full(self.nodes.shape[0], 1.0 / self.nodes.shape[0])
        )
        return w @ self.nodes

    def expect(self, fn):
        """Posterior expectation of a vectorized function of the parameter."""
        if self.kind == "closed_form":
            raise ValueError("expect() needs a grid/monte_carlo representation")
        vals = np.asarray(fn(self.nodes), dtype=float)
        if self.log_weights is not None:
            return float(np.exp(self.log_weights) @ vals)
        return float(vals.mean())


# ---------------------------------------------------------------------------
# hyper-parameter grids


def _simpson_log_weights(lo, hi, count):
    """Simpson-rule nodes and log weights on [lo, hi] (count odd)."""
    if count % 2 == 0:
        count += 1
    xs = np.linspace(lo, hi, count)
    w = np.ones(count)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (hi - lo) / (count - 1) / 3.0
    return xs, np.log(w)


def hyper_grid(model, nodes_per_axis=2001, span_sigmas=10.0):
    """Quadrature grid for the hyper-prior: (nodes (G, b), log p(node) + log w)."""
    hyper = model.hyper_prior
    if isinstance(hyper, Discrete):
        nodes = np.arange(hyper.probs.shape[0], dtype=float)[:, None]
        return nodes, np.log(hyper.probs)
    if isinstance(hyper, PointMass):
        return np.atleast_2d(hyper.value), np.zeros(1)
    if isinstance(hyper, UniformBox):
        lows, highs = hyper.lo, hyper.hi
    elif isinstance(hyper, Gaussian):
        std = np.sqrt(np.diag(hyper.cov))
        lows = hyper.mean - span_sigmas * std
        highs = hyper.mean + span_sigmas * std
    else:
        raise TypeError(f"no grid rule for hyper-prior {type(hyper).__name__}")
    b = lows.shape[0]
    if b > 2:
        raise ValueError("quadrature grids are only built for b <= 2")
    axes = [_simpson_log_weights(lows[j], highs[j], nodes_per_axis) for j in range(b)]
    if b == 1:
        nodes = axes[0][0][:, None]
        logw = axes[0][1]
    else:
        g0, g1 = np.meshgrid(axes[0][0], axes[1][0], indexing="ij")
        nodes = np.column_stack([g0.ravel(), g1.ravel()])
        logw = (axes[0][1][:, None] + axes[1][1][None, :]).ravel()
    return nodes, logw + hyper.log_density(nodes)


def _prior_log_density_at_nodes(model, nodes, thetas):
    """(G,) array: sum_i log p(theta_i | node) for every grid node."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    out = np.empty(nodes.shape[0])
    discrete = isinstance(model, DiscreteHierarchicalModel)
    for g, node in enumerate(nodes):
        prior = model.prior_family(int(node[0]) if discrete else node)
        out[g] = float(np.sum(prior.log_density(thetas)))
    return out


# ---------------------------------------------------------------------------
# core operations


def mixture_prior_log_density(
    model,
    thetas,
    method="auto",
    *,
    grid_nodes=2001,
    mc_samples=100_000,
    seed: SeedSpec | int = 0,
):
    """log of the induced prior density at an n-tuple of tasks.

    Returns (value, method_used).  ``method`` may be ``auto``, ``closed_form``,
    ``grid``, or ``monte_carlo``.
    """
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    if method in ("auto", "closed_form") and hasattr(model, "mixture_log_density"):
        try:
            return model.mixture_log_density(thetas), "closed_form"
        except ValueError:
            if method == "closed_form":
                raise
    if method == "closed_form":
        raise ValueError("no closed form for this instance")
    if method in ("auto", "grid"):
        try:
            nodes, logw = hyper_grid(model, grid_nodes)
        except ValueError:
            if method == "grid":
                raise
        else:
            return (
                float(logsumexp(logw + _prior_log_density_at_nodes(model, nodes, thetas))),
                "grid",
            )
    rng = as_seed(seed).rng()
    pis = model.hyper_prior.sample(mc_samples, rng)
    pis = np.atleast_2d(pis)
    logs = _prior_log_density_at_nodes(model, pis, thetas)
    return float(logsumexp(logs) - np.log(mc_samples)), "monte_carlo"


def posterior_over_priors(
    model, thetas, method="auto", *, grid_nodes=2001
) -> PosteriorRepresentation:
    """Posterior over the hyper-parameter given an n-tuple of task parameters."""
    thetas = np.atleast_2d(np.asarray(thetas, dtype=float))
    n = thetas.shape[0]
    if isinstance(model, SharedMeanGaussianModel) and method in ("auto", "closed_form"):
        spec = model.spec
        if isinstance(model.hyper_prior, PointMass):
            return PosteriorRepresentation("closed_form", PointMass(model.pi_star))
        if spec.hyper == "gaussian":
            # conjugate: precision 1/tau^2 + n/sigma_pi^2 per coordinate
            s2, t2 = spec.sigma_pi**2, spec.tau**2
            shrink = n * t2 / (s2 + n * t2)
            mean = shrink * thetas.mean(axis=0)
            var = s2 * t2 / (s2 + n * t2)
            return PosteriorRepresentation(
                "closed_form", Gaussian(mean, std=np.sqrt(var))
            )
    if method == "closed_form":
        raise ValueError("no closed-form posterior for this instance")
    nodes, logw = hyper_grid(model, grid_nodes)
    logpost = logw + _prior_log_density_at_nodes(model, nodes, thetas)
    logpost -= logsumexp(logpost)
    return PosteriorRepresentation("grid", nodes=nodes, log_weights=logpost)


def posterior_over_tasks(model, observations, m, mode="hierarchical"):
    """Posterior over the task parameters given an (n, m) observation matrix.

    For the linear-Gaussian instance ``observations`` are per-task column
    means flattened to (R, n * obs_dim) and a Gaussian
    PosteriorRepresentation (vectorized over R) is returned.  For the finite
    instance ``observations`` is an (n, m) integer matrix and the exact grid
    over task tuples is returned.
    """
    if isinstance(model, ABGaussianModel):
        zbar = np.atleast_2d(np.asarray(observations, dtype=float))
        n = zbar.shape[1] // model.obs_dim
        means, cov = model.posterior_over_stacked(n, m, zbar, mode)
        return PosteriorRepresentation(
            "closed_form",
            Gaussian(means[0], cov=cov),
            meta={"means": means, "cov": cov, "n": n, "m": m},
        )
    if isinstance(model, DiscreteHierarchicalModel):
        obs = np.asarray(observations, dtype=int)
        n = obs.shape[0]
        T = model.theta_probs.shape[1]
        mix = model.mixture_over_task_tuples(n)
        loglik_per_task = np.zeros((n, T))
        logz = np.log(model.z_probs)
        for i in range(n):
            for t in range(T):
                loglik_per_task[i, t] = logz[t, obs[i]].sum()
        loglik = np.zeros((T,) * n)
        for i in range(n):
            shape = [1] * n
            shape[i] = T
            loglik = loglik + loglik_per_task[i].reshape(shape)
        with np.errstate(divide="ignore"):
            logpost = np.log(mix) + loglik
        flat = logpost.reshape(-1)
        flat = flat - logsumexp(flat)
        nodes = np.asarray(
            [np.unravel_index(idx, (T,) * n) for idx in range(T**n)], dtype=float
        )
        return PosteriorRepresentation("grid", nodes=nodes, log_weights=flat)
    raise TypeError(f"no task posterior for {type(model).__name__}")


def predictive_log_density(model, observations, m, new_column, mode="hierarchical"):
    """log predictive density of one new observation per task.

    The finite instance sums the exact task posterior against the likelihood;
    the linear-Gaussian instance uses the Gaussian predictive.
    """
    if isinstance(model, ABGaussianModel):
        zbar = np.atleast_2d(np.asarray(observations, dtype=float))
        n = zbar.shape[1] // model.obs_dim
        pred_mean, pred_cov = model.predictive_next_column(n, m, zbar, mode)
        g = Gaussian(pred_mean[0], cov=pred_cov)
        new_flat = np.asarray(new_column, dtype=float).reshape(-1)
        # evaluate each replicate's predictive at the matching new column
        chol = np.linalg.cholesky(pred_cov)
        diffs = np.atleast_2d(new_flat) - pred_mean
        sol = np.linalg.solve(chol, diffs.T)
        quad = np.sum(sol**2, axis=0)
        logdet = 2 * np.sum(np.log(np.diag(chol)))
        d = pred_cov.shape[0]
        vals = -0.5 * (d * np.log(2 * np.pi) + logdet + quad)
        return float(vals[0]) if vals.shape[0] == 1 else vals
    if isinstance(model, DiscreteHierarchicalModel):
        post = posterior_over_tasks(model, observations, m)
        obs = np.asarray(observations, dtype=int)
        n = obs.shape[0]
        new = np.asarray(new_column, dtype=int)
        logz = np.log(model.z_probs)
        loglik = np.asarray(
            [
                sum(logz[int(node[i]), new[i]] for i in range(n))
                for node in post.nodes
            ]
        )
        return float(logsumexp(post.log_weights + loglik))
    raise TypeError(f"no predictive density for {type(model).__name__}")


# ---------------------------------------------------------------------------
# MLP classifier helpers


def mlp_classifier_log_likelihood(model: MlpLdrModel, theta, data):
    """Bernoulli log likelihood of labelled pairs under the network.

    Returns (value, flags): a confident wrong label yields -inf with a
    ``certain_miss`` flag rather than an exception.
    """
    val = model.log_likelihood(theta, data)
    flags = [] if np.isfinite(val) else ["certain_miss"]
    return val, flags


def mlp_predictive_class_probability(model: MlpLdrModel, posterior, x):
    """Posterior-averaged P(y=1 | x) from a grid/MC posterior over weights."""
    if posterior.kind == "closed_form":
        raise ValueError("need weighted samples over network weights")
    probs = np.asarray([model.output(node, x)[0] for node in posterior.nodes])
    if posterior.log_weights is not None:
        return float(np.exp(posterior.log_weights) @ probs)
    return float(probs.mean())

"""Risk curves, per-task information, and the information bounds.

All expectations over environments/tasks are Monte Carlo, but whatever can
be integrated out analytically is: the linear-Gaussian risk estimators draw
only the task parameters (and, for the predictive path, the per-task sample
means, which are sufficient), then evaluate the remaining integrals in
closed form.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .divergence import DivergenceEstimate
from .seeding import SeedSpec, as_seed
from .zoo import (
    ABGaussianModel,
    DiscreteHierarchicalModel,
    QuantizedLDRModel,
    SharedMeanGaussianModel,
)

LN2 = np.log(2.0)


@dataclass
class RiskRecord:
    n: int
    m: int
    value: float
    std_error: float
    estimator: str
    mode: str = "hierarchical"
    replicates: int = 0
    extra: dict = field(default_factory=dict)


@dataclass
class BoundTriple:
    n: int
    lower: float
    middle: float
    upper: float
    lower_se: float
    upper_se: float
    method: str
    extra: dict = field(default_factory=dict)

    @property
    def ordered(self):
        return self.lower <= self.middle <= self.upper


# ---------------------------------------------------------------------------
# KL between the conditional and induced priors on task n-tuples


def kl_true_vs_mixture(
    model,
    pi_star,
    n,
    method="auto",
    *,
    mc_samples=20_000,
    seed: SeedSpec | int = 0,
    mixture_method="auto",
):
    """D_K( P_{Theta^n | pi_star} || P_{Theta^n} ) as a DivergenceEstimate."""
    if method in ("auto", "closed_form") and hasattr(
        model, "kl_true_vs_mixture_closed"
    ):
        try:
            val = model.kl_true_vs_mixture_closed(pi_star, n)
            return DivergenceEstimate(float(val), 0.0, "closed_form", 0)
        except ValueError:
            if method == "closed_form":
                raise
    if method == "closed_form":
        raise ValueError("no closed form for this instance")
    from .inference import mixture_prior_log_density

    rng = as_seed(seed).rng()
    pi_star = np.atleast_1d(np.asarray(pi_star, dtype=float))
    prior = model.prior_family(pi_star)
    terms = np.empty(mc_samples)
    for r in range(mc_samples):
        thetas = prior.sample(n, rng)
        num = float(np.sum(prior.log_density(thetas)))
        den, _ = mixture_prior_log_density(model, thetas, mixture_method)
        terms[r] = num - den
    return DivergenceEstimate(
        float(terms.mean()),
        float(terms.std(ddof=1) / np.sqrt(mc_samples)),
        "monte_carlo",
        mc_samples,
    )


def per_task_information(
    model, pi_star, n, *, base="bits", allow_differential=False, **kl_kwargs
):
    """(1/n) D_K + H: amortized environment information plus the per-task
    entropy.  Absolute entropies are only meaningful for instances with a
    genuinely discrete per-task block, so other instances are rejected
    unless ``allow_differential`` is set explicitly.
    """
    if isinstance(model, DiscreteHierarchicalModel):
        true = model.task_tuple_probs(pi_star, n)
        mix = model.mixture_over_task_tuples(n)
        mask = true > 0
        with np.errstate(divide="ignore"):
            dk_nats = float(np.sum(true[mask] * (np.log(true[mask]) - np.log(mix[mask]))))
        p1 = model.theta_probs[int(pi_star)]
        h_bits = float(-np.sum(p1[p1 > 0] * np.log2(p1[p1 > 0])))
        kl = DivergenceEstimate(dk_nats, 0.0, "enumeration", 0)
    elif isinstance(model, QuantizedLDRModel):
        h_bits = float(model.entropy_bits_per_prior)
        kl = kl_true_vs_mixture(model.as_shared_mean(), pi_star, n, **kl_kwargs)
    elif allow_differential:
        h_bits = 0.0
        kl = kl_true_vs_mixture(model, pi_star, n, **kl_kwargs)
    else:
        raise ValueError(
            "absolute per-task information needs a discrete task block; "
            "pass allow_differential=True to report the KL term alone"
        )
    dk = kl.value / (n * LN2) if base == "bits" else kl.value / n
    h = h_bits if base == "bits" else h_bits * LN2
    return dk + h, kl


# ---------------------------------------------------------------------------
# linear-Gaussian risk estimators


def instantaneous_risk(
    model: ABGaussianModel,
    n,
    m,
    replicates,
    seed: SeedSpec | int,
    *,
    estimator="evidence",
    mode="hierarchical",
):
    """Expected extra log loss on the (m+1)-th observation per task, /n.

    ``evidence`` draws task tuples only and differences the closed-form
    evidence KLs; ``predictive`` additionally draws the per-task sample
    means and scores the closed-form Gaussian predictive against the truth.
    Both are unbiased for the same quantity.
    """
    rng = as_seed(seed).rng()
    x_a, x_b = model.sample_theta_tuples(n, replicates, rng)
    if estimator == "evidence":
        vals = (
            model.evidence_kl(x_a, x_b, m + 1, mode)
            - model.evidence_kl(x_a, x_b, m, mode)
        ) / n
    elif estimator == "predictive":
        w_true = np.concatenate([x_a, x_b], axis=-1).reshape(replicates, -1)
        D = model.stacked_design(n)
        true_means = w_true @ D.T
        if m > 0:
            zbar = true_means + (model.spec.sigma_z / np.sqrt(m)) * rng.standard_normal(
                true_means.shape
            )
        else:
            zbar = np.zeros_like(true_means)
        pred_mean, pred_cov = model.predictive_next_column(n, m, zbar, mode)
        sz2 = model.spec.sigma_z**2
        d = pred_cov.shape[0]
        chol = np.linalg.cholesky(pred_cov)
        logdet = 2 * np.sum(np.log(np.diag(chol)))
        sol_diff = np.linalg.solve(chol, (true_means - pred_mean).T)
        quad = np.sum(sol_diff**2, axis=0)
        inv = np.linalg.solve(chol.T, np.linalg.solve(chol, np.eye(d)))
        trace = sz2 * np.trace(inv)
        vals = 0.5 * (trace - d + logdet - d * np.log(sz2) + quad) / n
    else:
        raise ValueError(f"unknown estimator {estimator!r}")
    return RiskRecord(
        n=n,
        m=m,
        value=float(vals.mean()),
        std_error=float(vals.std(ddof=1) / np.sqrt(replicates)),
        estimator=estimator,
        mode=mode,
        replicates=replicates,
    )


def cumulative_risk(
    model: ABGaussianModel,
    n,
    m,
    replicates,
    seed: SeedSpec | int,
    *,
    mode="hierarchical",
):
    """Sum of instantaneous risks over the first m observations, /n.

    Telescopes to (1/n) E[ evidence KL at m ], so a single closed-form
    evaluation per sampled environment suffices.
    """
    rng = as_seed(seed).rng()
    x_a, x_b = model.sample_theta_tuples(n, replicates, rng)
    vals = model.evidence_kl(x_a, x_b, m, mode) / n
    return RiskRecord(
        n=n,
        m=m,
        value=float(vals.mean()),
        std_error=float(vals.std(ddof=1) / np.sqrt(replicates)),
        estimator="evidence",
        mode=mode,
        replicates=replicates,
    )


def hierarchical_vs_independent(
    model: ABGaussianModel, n, m, replicates, seed: SeedSpec | int
):
    """Paired comparison of cumulative risks (same sampled environments)."""
    rng = as_seed(seed).rng()
    x_a, x_b = model.sample_theta_tuples(n, replicates, rng)
    hier = model.evidence_kl(x_a, x_b, m, "hierarchical") / n
    indep = model.evidence_kl(x_a, x_b, m, "independent") / n
    ratio = hier.mean() / indep.mean()
    # delta-method standard error for the ratio of paired means
    cov = np.cov(hier, indep)
    gh, gi = 1.0 / indep.mean(), -hier.mean() / indep.mean() ** 2
    var = (
        gh * gh * cov[0, 0] + 2 * gh * gi * cov[0, 1] + gi * gi * cov[1, 1]
    ) / replicates
    return {
        "hierarchical": RiskRecord(
            n, m, float(hier.mean()), float(hier.std(ddof=1) / np.sqrt(replicates)),
            "evidence", "hierarchical", replicates,
        ),
        "independent": RiskRecord(
            n, m, float(indep.mean()), float(indep.std(ddof=1) / np.sqrt(replicates)),
            "evidence", "independent", replicates,
        ),
        "ratio": float(ratio),
        "ratio_se": float(np.sqrt(max(var, 0.0))),
    }


# ---------------------------------------------------------------------------
# information bounds


def _log_mean_exp_inner(vals, axis):
    return logsumexp(vals, axis=axis) - np.log(vals.shape[axis])


def sandwich_bounds(
    model,
    n,
    seed: SeedSpec | int,
    *,
    outer=200,
    inner=2000,
    middle="auto",
):
    """Monte Carlo lower/upper bounds around the environment information.

    lower  = -E_{pi*} log E_pi exp(-(n/4) hellinger_sq(pi, pi*))
    middle = I(hyper; n tasks)      (closed form when available)
    upper  = -E_{pi*} log E_pi exp(-n kl(pi, pi*))

    Outer draws share the inner cloud; standard errors are over the outer
    draws only (the inner average enters through a log, so its noise is
    folded into the outer spread).
    """
    rng = as_seed(seed).rng()
    outers = np.atleast_2d(model.sample_hyper(outer, rng))
    inners = np.atleast_2d(model.sample_hyper(inner, rng))
    if isinstance(model, SharedMeanGaussianModel):
        s2 = model.spec.sigma_pi**2
        d2 = (
            np.sum(outers**2, axis=1)[:, None]
            + np.sum(inners**2, axis=1)[None, :]
            - 2.0 * outers @ inners.T
        )
        d2 = np.maximum(d2, 0.0)
        hell = 2.0 * (1.0 - np.exp(-d2 / (8.0 * s2)))
        kl = d2 / (2.0 * s2)
    else:
        hell = np.asarray(
            [[model.hellinger_sq(o, i) for i in inners] for o in outers]
        )
        kl = np.asarray([[model.kl(o, i) for i in inners] for o in outers])
    lo_terms = -_log_mean_exp_inner(-(n / 4.0) * hell, axis=1)
    up_terms = -_log_mean_exp_inner(-float(n) * kl, axis=1)
    lower = float(lo_terms.mean())
    upper = float(up_terms.mean())
    lower_se = float(lo_terms.std(ddof=1) / np.sqrt(outer))
    upper_se = float(up_terms.std(ddof=1) / np.sqrt(outer))
    if middle == "auto" and hasattr(model, "mutual_information_closed"):
        mid = float(model.mutual_information_closed(n))
        method = "mc_bounds/closed_middle"
    elif np.isscalar(middle) or isinstance(middle, float):
        mid = float(middle)
        method = "mc_bounds/supplied_middle"
    else:
        raise ValueError("need a closed-form or supplied middle value")
    return BoundTriple(n, lower, mid, upper, lower_se, upper_se, method)


def pointwise_kl_upper_bound(model, pi_star, n, seed: SeedSpec | int, *, inner=4000):
    """-log E_pi exp(-n kl(pi, pi_star)): an upper bound on the KL between
    the conditional and induced priors on task n-tuples, per hyper draw."""
    rng = as_seed(seed).rng()
    inners = np.atleast_2d(model.sample_hyper(inner, rng))
    pi_star = np.atleast_1d(np.asarray(pi_star, dtype=float))
    if isinstance(model, SharedMeanGaussianModel):
        d2 = np.sum((inners - pi_star[None, :]) ** 2, axis=1)
        kl = d2 / (2.0 * model.spec.sigma_pi**2)
    else:
        kl = np.asarray([model.kl(i, pi_star) for i in inners])
    return float(-(_log_mean_exp_inner(-float(n) * kl, axis=0)))

"""Acceptance gate: every primary criterion at its stated tolerance.

Each test prints one PASS/FAIL line (visible with ``pytest -s`` or on
failure) and asserts the same condition, so the suite both documents and
enforces the acceptance bar.
"""

import numpy as np
import pytest

from hierbayes.cli import fit_slope
from hierbayes.dimension import estimate_local_dimension, geometric_eps_grid
from hierbayes.divergence import (
    check_feynman_inequality,
    hellinger_sq_gaussian,
    kl_gaussian_equal_cov,
    kl_gaussian_general,
    kl_monte_carlo,
)
from hierbayes.inference import posterior_over_tasks, predictive_log_density
from hierbayes.model import Gaussian
from hierbayes.risk import (
    cumulative_risk,
    hierarchical_vs_independent,
    instantaneous_risk,
    per_task_information,
    pointwise_kl_upper_bound,
    sandwich_bounds,
)
from hierbayes.seeding import SeedSpec
from hierbayes.zoo import (
    ABGaussianModel,
    ABModelSpec,
    DiscreteHierarchicalModel,
    MlpLdrModel,
    MlpLdrSpec,
    QuantizedLDRModel,
    QuantizedLDRSpec,
    SharedMeanGaussianModel,
    SharedMeanGaussianSpec,
    fisher_matrix_numeric,
    local_domination_probe,
)


def _report(name, ok, detail):
    print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# criterion 1: KL-rate law


def test_criterion_1_kl_rate_law():
    ns = [64, 128, 256, 512, 1024]
    details = []
    ok = True
    for b in (1, 2):
        model = SharedMeanGaussianModel(SharedMeanGaussianSpec(b=b, sigma_pi=1.0, tau=1.0))
        pi_star = model.sample_hyper(1, SeedSpec(b).rng())[0]
        ys = [model.kl_true_vs_mixture_closed(pi_star, n) for n in ns]
        slope, _, _ = fit_slope(np.log(ns), ys)
        target = b / 2.0
        good = abs(slope - target) <= 0.15 * target
        ok &= good
        details.append(f"b={b} slope={slope:.4f} target={target}")
    _report("criterion-1 kl-rate-law", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# criterion 2: Monte Carlo / oracle agreement


def test_criterion_2_mc_oracle_agreement():
    details = []
    ok = True
    for i, n in enumerate([1, 2, 4, 8, 16]):
        # conditional vs induced prior on n tasks: both explicit Gaussians
        pi_star = 0.7
        p = Gaussian(np.full(n, pi_star), cov=np.eye(n))
        q = Gaussian(np.zeros(n), cov=np.eye(n) + np.ones((n, n)))
        exact = kl_gaussian_general(p.mean, p.cov, q.mean, q.cov).value
        est = kl_monte_carlo(p.log_density, q.log_density, p.sample, 100_000,
                             SeedSpec(20 + i))
        good = abs(est.value - exact) <= 3 * est.std_error
        ok &= good
        details.append(f"n={n} |mc-exact|={abs(est.value - exact):.4f} 3se={3*est.std_error:.4f}")
    _report("criterion-2 mc-oracle", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# criterion 3: dimension estimator + product law


def test_criterion_3_dimension_estimator():
    details = []
    ok = True
    for b in (1, 2, 3):
        model = SharedMeanGaussianModel(SharedMeanGaussianSpec(b=b))
        est = estimate_local_dimension(
            lambda size, rng: np.atleast_2d(model.sample_hyper(size, rng)),
            np.zeros(b), geometric_eps_grid(0.5, 0.5, 12), 1_000_000,
            SeedSpec(30 + b), gaussian_sigma=1.0,
        )
        good = abs(est.dim - b) <= 0.2 * b
        ok &= good
        details.append(f"b={b} dim={est.dim:.3f}")
    for a, b, n, samples, eps_max, ratio, count in (
        (1, 1, 1, 4_000_000, 0.35, 0.5**0.5, 8),
        (1, 2, 3, 20_000_000, 0.25, 2.0**-0.25, 12),
    ):
        model = ABGaussianModel(ABModelSpec(a=a, b=b, sigma_pi=0.005))

        def sampler(size, rng, model=model, n=n):
            x_a, x_b = model.sample_theta_tuples(n, size, rng)
            return model.task_metric_embedding(model.flatten_tasks(x_a, x_b))

        center = model.task_metric_embedding(np.zeros((1, n * (a + b))))[0]
        est = estimate_local_dimension(
            sampler, center, geometric_eps_grid(eps_max, ratio, count),
            samples, SeedSpec(40 + n), gaussian_sigma=model.spec.sigma_z,
            chunk=2_000_000,
        )
        target = n * a + b
        good = abs(est.dim - target) <= 0.3
        ok &= good
        details.append(f"(a,b,n)=({a},{b},{n}) dim={est.dim:.3f} target={target}")
    _report("criterion-3 dimension", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# criterion 4: risk rates


def test_criterion_4_risk_rates():
    reps, m = 10_000, 200
    details = []
    ok = True
    model = ABGaussianModel(ABModelSpec(a=1, b=4, sigma_pi=0.003))
    for i, n in enumerate([1, 2, 5, 10]):
        rec = instantaneous_risk(model, n, m, reps, SeedSpec(50 + i))
        target = (1 + 4 / n) / 2.0
        good = abs(m * rec.value - target) <= 0.10 * target
        ok &= good
        details.append(f"n={n} mRbar={m*rec.value:.3f} target={target:.2f}")
    known = ABGaussianModel(ABModelSpec(a=1, b=4, sigma_pi=0.003, tau=0.0))
    for i, n in enumerate([1, 2, 5, 10]):
        rec = instantaneous_risk(known, n, m, reps, SeedSpec(60 + i))
        good = abs(m * rec.value - 0.5) <= 0.10 * 0.5
        ok &= good
        details.append(f"known n={n} mRbar={m*rec.value:.3f} target=0.5")
    res = hierarchical_vs_independent(model, 10, m, reps, SeedSpec(70))
    target = (1 + 4 / 10) / (1 + 4)
    good = abs(res["ratio"] - target) <= 0.20 * target
    ok &= good
    details.append(f"ratio n=10: {res['ratio']:.3f} target={target:.3f}")
    _report("criterion-4 risk-rates", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# criterion 5: cumulative-loss slope


def test_criterion_5_cumulative_loss_slope():
    model = ABGaussianModel(ABModelSpec(a=1, b=1, sigma_pi=0.003))
    ms = [64, 128, 256, 512]
    details = []
    ok = True
    for i, n in enumerate([1, 4]):
        recs = [cumulative_risk(model, n, m, 10_000, SeedSpec(80 + 10 * i + j))
                for j, m in enumerate(ms)]
        slope, _, _ = fit_slope(
            np.log(ms), [r.value for r in recs], [r.std_error for r in recs]
        )
        target = (1 + 1 / n) / 2.0
        good = abs(slope - target) <= 0.15 * target
        ok &= good
        details.append(f"n={n} slope={slope:.3f} target={target}")
    _report("criterion-5 cumulative-slope", ok, "; ".join(details))


# ---------------------------------------------------------------------------
# criterion 6: bound suite


def test_criterion_6_bound_suite():
    model = SharedMeanGaussianModel(SharedMeanGaussianSpec(b=1))
    ok = True
    worst = ""
    for n in range(1, 33):
        tri = sandwich_bounds(model, n, SeedSpec(100 + n), outer=200, inner=2000)
        ok_lo = tri.lower <= tri.middle + 3 * tri.lower_se
        ok_up = tri.middle <= tri.upper + 3 * tri.upper_se
        pi = model.sample_hyper(1, SeedSpec(200 + n).rng())[0]
        bound = pointwise_kl_upper_bound(model, pi, n, SeedSpec(300 + n), inner=4000)
        dk = model.kl_true_vs_mixture_closed(pi, n)
        ok_udk = dk <= bound + 3 * abs(bound) / np.sqrt(4000) + 1e-9
        if not (ok_lo and ok_up and ok_udk):
            worst = f"n={n} lo={tri.lower:.3f} mid={tri.middle:.3f} up={tri.upper:.3f} udk={bound - dk:.4f}"
        ok &= ok_lo and ok_up and ok_udk
    rng = np.random.default_rng(123)
    for _ in range(1000):
        nw, nv = rng.integers(2, 6, 2)
        holds, lhs, rhs = check_feynman_inequality(
            rng.dirichlet(np.ones(nw)), rng.dirichlet(np.ones(nv)),
            rng.standard_normal((nw, nv)) * rng.uniform(0.1, 5.0),
        )
        ok &= holds
    pairs = rng.standard_normal((1000, 2, 3)) * 2
    sigmas = rng.uniform(0.1, 3.0, 1000)
    for (x, y), s in zip(pairs, sigmas):
        ok &= kl_gaussian_equal_cov(x, y, s).value >= 0.5 * hellinger_sq_gaussian(x, y, s).value
    _report("criterion-6 bound-suite", ok,
            worst or "sandwich+udk n=1..32, feynman x1000, kl>=hell/2 x1000")


# ---------------------------------------------------------------------------
# criterion 7: identities


def test_criterion_7_identities():
    details = []
    ok = True
    # rec identity, exact on a quantized (finite) instance
    finite = DiscreteHierarchicalModel(
        pi_probs=[0.3, 0.7],
        theta_probs=[[0.6, 0.3, 0.1], [0.2, 0.2, 0.6]],
        z_probs=[[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]],
    )
    rec_err = 0.0
    for pi_star in (0, 1):
        for n in (1, 2, 3):
            info_bits, _ = per_task_information(finite, pi_star, n)
            true = finite.task_tuple_probs(pi_star, n)
            mix = finite.mixture_over_task_tuples(n)
            direct = float(-np.sum(true * np.log2(mix))) / n
            rec_err = max(rec_err, abs(info_bits - direct))
    ok &= rec_err <= 1e-10
    details.append(f"rec-identity err={rec_err:.2e}")
    # known-prior flatness: information = entropy exactly, for every n
    q = QuantizedLDRModel(QuantizedLDRSpec(w_ldr=2, w_out=4, k=8, tau=0.0))
    flat_err = max(
        abs(per_task_information(q, np.zeros(2), n)[0] - 32.0) for n in (1, 3, 7)
    )
    ok &= flat_err <= 1e-10
    details.append(f"flatness err={flat_err:.2e}")
    # evidence telescoping exact on grid instances
    obs = np.array([[0, 1, 0], [1, 0, 1]])
    post2 = posterior_over_tasks(finite, obs[:, :2], 2)
    tele_err = 0.0
    mix = finite.mixture_over_task_tuples(2)
    zp = np.asarray(finite.z_probs)

    def log_ev(cols):
        lik = np.ones((3, 3))
        for j in range(cols.shape[1]):
            lik *= zp[:, cols[0, j]][:, None] * zp[:, cols[1, j]][None, :]
        return np.log(np.sum(mix * lik))

    tele_err = abs(
        log_ev(obs) - log_ev(obs[:, :2])
        - predictive_log_density(finite, obs[:, :2], 2, obs[:, 2])
    )
    ok &= tele_err <= 1e-10
    details.append(f"telescoping err={tele_err:.2e}")
    # Bayes consistency on the same grid instance
    bayes_err = abs(float(np.exp(post2.log_weights).sum()) - 1.0)
    ok &= bayes_err <= 1e-10
    details.append(f"bayes-consistency err={bayes_err:.2e}")
    # numerical Fisher within 2% of analytic
    ab = ABGaussianModel(ABModelSpec(a=1, b=1, design_seed=2))
    theta = np.array([0.4, -0.7])
    like = ab.likelihood_family(theta)
    J, _ = fisher_matrix_numeric(ab.log_likelihood, theta, like.sample,
                                 200_000, 1e-4, SeedSpec(400))
    fisher_err = np.abs(J - ab.fisher_matrix()).max() / np.abs(ab.fisher_matrix()).max()
    ok &= fisher_err <= 0.02
    details.append(f"fisher rel-err={fisher_err:.4f}")
    # MLP local domination: passes canonicalized, fails with witness otherwise
    mlp = MlpLdrModel(MlpLdrSpec(input_dim=2, hidden_dim=2))
    theta = np.array([0.8, 0.3, -0.4, 0.9, 0.7, -0.6])
    orbit = mlp.symmetry_transforms(theta, max_count=8)
    with_c = local_domination_probe(
        mlp.hellinger_sq, theta, [0.1, 0.05, 0.025], 40, SeedSpec(500),
        canonical_map=mlp.canonicalize, extra_candidates=orbit,
    )
    without_c = local_domination_probe(
        mlp.hellinger_sq, theta, [0.1, 0.05, 0.025], 40, SeedSpec(500),
        extra_candidates=orbit,
    )
    ok &= with_c.passed and not without_c.passed and without_c.witness is not None
    details.append(
        f"domination canonical={with_c.passed} raw={without_c.passed} "
        f"witness={'yes' if without_c.witness is not None else 'no'}"
    )
    _report("criterion-7 identities", ok, "; ".join(details))

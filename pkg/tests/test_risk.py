"""Risk estimators and information bounds against dense-matrix oracles."""

import numpy as np
import pytest

from hierbayes.divergence import kl_gaussian_general
from hierbayes.risk import (
    cumulative_risk,
    hierarchical_vs_independent,
    instantaneous_risk,
    kl_true_vs_mixture,
    per_task_information,
    pointwise_kl_upper_bound,
    sandwich_bounds,
)
from hierbayes.seeding import SeedSpec
from hierbayes.zoo import (
    ABGaussianModel,
    ABModelSpec,
    DiscreteHierarchicalModel,
    QuantizedLDRModel,
    QuantizedLDRSpec,
    SharedMeanGaussianModel,
    SharedMeanGaussianSpec,
)

LN2 = np.log(2.0)


def _shared(b=1, **kw):
    return SharedMeanGaussianModel(SharedMeanGaussianSpec(b=b, **kw))


# ---------------------------------------------------------------------------
# conditional-vs-mixture KL


def test_kl_true_vs_mixture_frozen_value():
    # b=1, sigma=tau=1, pi*=0, n=1: 0.5*(ln 2 - 1/2)
    est = kl_true_vs_mixture(_shared(), [0.0], 1)
    assert est.method == "closed_form"
    assert est.value == pytest.approx(0.09657359027997264, rel=1e-12)  # frozen


def test_kl_true_vs_mixture_closed_vs_dense_oracle():
    # oracle: KL between n-task joint Gaussians built as explicit matrices
    model = _shared(sigma_pi=0.7, tau=1.4)
    pi_star, n = np.array([0.9]), 5
    s2, t2 = 0.49, 1.96
    mean1 = np.full(n, 0.9)
    cov1 = s2 * np.eye(n)
    cov2 = s2 * np.eye(n) + t2 * np.ones((n, n))
    oracle = kl_gaussian_general(mean1, cov1, np.zeros(n), cov2).value
    est = kl_true_vs_mixture(model, pi_star, n)
    assert est.value == pytest.approx(oracle, rel=1e-10)


def test_kl_true_vs_mixture_mc_agrees():
    model = _shared()
    exact = kl_true_vs_mixture(model, [0.5], 2).value
    mc = kl_true_vs_mixture(model, [0.5], 2, "monte_carlo", mc_samples=4000, seed=1)
    assert abs(mc.value - exact) <= 3 * mc.std_error


def test_kl_rate_approaches_half_dim():
    # closed-form D_K / ln n -> b/2
    for b in (1, 2):
        model = _shared(b=b)
        pi = np.full(b, 0.3)
        vals = [model.kl_true_vs_mixture_closed(pi, n) / np.log(n) for n in (10**3, 10**6)]
        assert abs(vals[1] - b / 2) < abs(vals[0] - b / 2)
        assert vals[1] == pytest.approx(b / 2, rel=0.08)


def test_in_probability_convergence_surrogate():
    # fraction of hyper draws with |D_K/ln n - b/2| < 0.15 b/2 is nondecreasing
    model = _shared()
    rng = SeedSpec(100).rng()
    pis = model.sample_hyper(40, rng)
    fracs = []
    for n in (64, 256, 1024):
        ratios = np.array(
            [model.kl_true_vs_mixture_closed(p, n) / np.log(n) for p in pis]
        )
        fracs.append(np.mean(np.abs(ratios - 0.5) < 0.15 * 0.5))
    assert fracs == sorted(fracs)
    assert fracs[-1] > 0.8


# ---------------------------------------------------------------------------
# rec identity / known-prior flatness on quantized + finite instances


def test_rec_identity_exact_on_finite_instance():
    # Rbar = (1/n) D_K + H(true prior), vs direct enumeration of -E log mixture
    model = DiscreteHierarchicalModel(
        pi_probs=[0.3, 0.7],
        theta_probs=[[0.6, 0.3, 0.1], [0.2, 0.2, 0.6]],
        z_probs=[[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]],
    )
    for pi_star in (0, 1):
        for n in (1, 2, 3):
            info_bits, kl = per_task_information(model, pi_star, n)
            true = model.task_tuple_probs(pi_star, n)
            mix = model.mixture_over_task_tuples(n)
            direct_bits = float(-np.sum(true * np.log2(mix))) / n
            assert info_bits == pytest.approx(direct_bits, abs=1e-10)


def test_known_prior_flatness_quantized():
    # tau=0: the induced prior equals the true prior, so the per-task
    # information is exactly the entropy k * w_out bits, independent of n
    model = QuantizedLDRModel(QuantizedLDRSpec(w_ldr=2, w_out=4, k=8, tau=0.0))
    assert model.entropy_bits_per_prior == 32
    for n in (1, 3, 7):
        info_bits, kl = per_task_information(model, np.zeros(2), n)
        assert kl.value == 0.0
        assert info_bits == pytest.approx(32.0, abs=1e-12)


def test_per_task_information_rejects_continuous_without_optin():
    with pytest.raises(ValueError, match="discrete"):
        per_task_information(_shared(), [0.0], 2)
    val, kl = per_task_information(_shared(), [0.0], 2, allow_differential=True)
    assert val == pytest.approx(kl.value / (2 * LN2))


def test_quantized_information_grows_with_kl():
    model = QuantizedLDRModel(QuantizedLDRSpec(w_ldr=1, w_out=2, k=3, sigma_pi=0.5))
    i1, _ = per_task_information(model, [0.0], 1)
    i8, _ = per_task_information(model, [0.0], 8)
    assert i1 > 6.0  # entropy floor plus positive amortized KL
    assert i8 < i1  # amortization: per-task cost decreases with n
    assert i8 > 6.0


# ---------------------------------------------------------------------------
# evidence KL closed form vs dense-matrix oracle


def _dense_evidence_kl_oracle(model, x_a, x_b, n, m, mode):
    """KL(N(Dw, sz2 I) || N(D mu0, D cov0 D^T + sz2 I)) on all n*m stacked obs."""
    spec = model.spec
    mu0, cov0 = model.prior_over_stacked(n, mode)
    D1 = model.stacked_design(n)  # one column of observations
    # m columns: replicate the design
    Dm = np.vstack([D1] * m)
    w = np.concatenate([np.concatenate([x_a[0, i], x_b[0, i]]) for i in range(n)])
    mean1 = Dm @ w
    cov1 = spec.sigma_z**2 * np.eye(n * model.obs_dim * m)
    mean2 = Dm @ mu0
    cov2 = Dm @ cov0 @ Dm.T + cov1
    return kl_gaussian_general(mean1, cov1, mean2, cov2).value


@pytest.mark.parametrize("mode", ["hierarchical", "independent"])
@pytest.mark.parametrize("n,m", [(1, 1), (2, 3), (3, 2)])
def test_evidence_kl_matches_dense_oracle(mode, n, m):
    model = ABGaussianModel(
        ABModelSpec(a=1, b=2, sigma_pi=0.3, sigma_z=0.9, tau=1.2, s_a=1.5,
                    design_seed=5)
    )
    rng = SeedSpec(6).rng()
    x_a, x_b = model.sample_theta_tuples(n, 1, rng)
    fast = model.evidence_kl(x_a, x_b, m, mode)[0]
    oracle = _dense_evidence_kl_oracle(model, x_a, x_b, n, m, mode)
    assert fast == pytest.approx(oracle, rel=1e-9)


def test_evidence_kl_known_prior_tau_zero():
    model = ABGaussianModel(ABModelSpec(a=2, b=1, tau=0.0, design_seed=7))
    rng = SeedSpec(8).rng()
    x_a, x_b = model.sample_theta_tuples(2, 1, rng)
    fast = model.evidence_kl(x_a, x_b, 3, "hierarchical")[0]
    oracle = _dense_evidence_kl_oracle(model, x_a, x_b, 2, 3, "hierarchical")
    assert fast == pytest.approx(oracle, rel=1e-9)
    # with tau=0 hierarchical and independent coincide
    indep = model.evidence_kl(x_a, x_b, 3, "independent")[0]
    assert fast == pytest.approx(indep, rel=1e-12)


def test_evidence_kl_zero_at_m_zero():
    model = ABGaussianModel(ABModelSpec(a=1, b=1))
    rng = SeedSpec(9).rng()
    x_a, x_b = model.sample_theta_tuples(2, 3, rng)
    np.testing.assert_array_equal(model.evidence_kl(x_a, x_b, 0), np.zeros(3))


def test_cumulative_equals_sum_of_instantaneous():
    # telescoping: per-environment, exact to 1e-10
    model = ABGaussianModel(ABModelSpec(a=1, b=1, design_seed=3))
    n, M = 2, 6
    rng = SeedSpec(10).rng()
    x_a, x_b = model.sample_theta_tuples(n, 4, rng)
    total = sum(
        (model.evidence_kl(x_a, x_b, m + 1) - model.evidence_kl(x_a, x_b, m)) / n
        for m in range(M)
    )
    direct = model.evidence_kl(x_a, x_b, M) / n
    np.testing.assert_allclose(total, direct, atol=1e-10)


def test_predictive_and_evidence_estimators_agree():
    model = ABGaussianModel(ABModelSpec(a=1, b=2, sigma_pi=0.05, design_seed=4))
    ev = instantaneous_risk(model, 3, 10, 4000, SeedSpec(11), estimator="evidence")
    pred = instantaneous_risk(model, 3, 10, 4000, SeedSpec(12), estimator="predictive")
    se = np.hypot(ev.std_error, pred.std_error)
    assert abs(ev.value - pred.value) <= 4 * se


def test_risk_decreases_with_n_and_m():
    model = ABGaussianModel(ABModelSpec(a=1, b=4, sigma_pi=0.003))
    r_small = instantaneous_risk(model, 1, 50, 3000, SeedSpec(13))
    r_tasks = instantaneous_risk(model, 10, 50, 3000, SeedSpec(13))
    r_data = instantaneous_risk(model, 1, 400, 3000, SeedSpec(13))
    assert r_tasks.value < r_small.value
    assert r_data.value < r_small.value


def test_hierarchical_vs_independent_b_zero_ratio_one():
    model = ABGaussianModel(ABModelSpec(a=2, b=0))
    res = hierarchical_vs_independent(model, 4, 20, 500, SeedSpec(14))
    assert res["ratio"] == pytest.approx(1.0, abs=1e-12)


def test_cumulative_risk_matches_closed_expectation():
    # E[cumulative] has a closed form; check the MC mean against it
    model = ABGaussianModel(ABModelSpec(a=1, b=1, sigma_pi=0.3, design_seed=6))
    n, m = 2, 8
    rec = cumulative_risk(model, n, m, 40_000, SeedSpec(15))
    spec = model.spec
    sz2, sp2, t2, sa2 = 1.0, 0.09, 1.0, 1.0
    # E over theta^n: quadratic terms integrate to their variances
    lam_c, lam_g = sz2 + m * sp2, sz2 + m * sp2 + n * m * t2
    a_part = n * 0.5 * (-m * sa2 / (sz2 + m * sa2) + m * sa2 / (sz2 + m * sa2)
                        + np.log1p(m * sa2 / sz2))
    # E[(beta - bar)^2 sum] = (n-1) sp2 per coord; E[bar^2] = sp2/n + t2
    t_term = -(n - 1) * m * sp2 / lam_c - (m * sp2 + n * m * t2) / lam_g
    l_term = (n - 1) * np.log1p(m * sp2 / sz2) + np.log1p((m * sp2 + n * m * t2) / sz2)
    q_term = m * (n - 1) * sp2 / lam_c + n * m * (sp2 / n + t2) / lam_g
    expected = (a_part + 0.5 * (t_term + l_term + q_term)) / n
    assert abs(rec.value - expected) <= 4 * rec.std_error


# ---------------------------------------------------------------------------
# bounds


def test_sandwich_bounds_ordering_n_1_to_32():
    model = _shared()
    for n in range(1, 33):
        tri = sandwich_bounds(model, n, SeedSpec(16 + n), outer=100, inner=1000)
        assert tri.lower <= tri.middle + 3 * tri.lower_se
        assert tri.middle <= tri.upper + 3 * tri.upper_se


def test_sandwich_middle_two_point_quadrature_oracle():
    # two-point discrete hyper-prior: closed bounds via direct summation
    model = _shared()
    tri = sandwich_bounds(model, 4, SeedSpec(50), outer=400, inner=4000)
    assert tri.middle == pytest.approx(0.5 * np.log(5.0), rel=1e-12)
    assert tri.ordered


def test_pointwise_kl_upper_bound_dominates():
    model = _shared()
    rng = SeedSpec(60).rng()
    for n in (1, 4, 16):
        for _ in range(3):
            pi = model.sample_hyper(1, rng)[0]
            bound = pointwise_kl_upper_bound(model, pi, n, SeedSpec(61), inner=4000)
            dk = model.kl_true_vs_mixture_closed(pi, n)
            se = abs(bound) / np.sqrt(4000)
            assert dk <= bound + 3 * se + 1e-9


def test_bounds_bracket_tightens_sensibly():
    model = _shared()
    tri1 = sandwich_bounds(model, 1, SeedSpec(70), outer=300, inner=3000)
    tri32 = sandwich_bounds(model, 32, SeedSpec(71), outer=300, inner=3000)
    assert tri32.middle > tri1.middle  # information grows with n

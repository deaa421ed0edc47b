"""Concrete hierarchical-model instances.

* SharedMeanGaussianModel: priors N(pi, sigma_pi^2 I) indexed by their mean;
  everything needed for the KL-rate and bound experiments is closed form.
* ABGaussianModel: linear-Gaussian observations with a per-task parameters
  and b shared (smoothed-delta) hyper-parameters; risk curves, evidence KLs
  and posteriors are closed form.
* QuantizedLDRModel: Gaussian hyper-weights plus k-bit-quantized uniform
  output weights, so absolute entropies are honest Shannon entropies.
* MlpLdrModel: toy one-hidden-layer sigmoidal network used only for the
  Fisher / local-domination probes.
* DiscreteHierarchicalModel: small finite instance for brute-force oracles.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logsumexp

from .model import Discrete, Gaussian, HierarchicalModel, PointMass, UniformBox
from .seeding import SeedSpec, as_seed

# ---------------------------------------------------------------------------
# shared-mean Gaussian


@dataclass(frozen=True)
class SharedMeanGaussianSpec:
    b: int
    sigma_pi: float = 1.0
    tau: float = 1.0
    pi_star: tuple | None = None
    hyper: str = "gaussian"  # gaussian | uniform | point
    box_halfwidth: float = 1.0
    sigma_z: float = 1.0

    def __post_init__(self):
        if self.sigma_pi <= 0:
            raise ValueError("sigma_pi must be positive")
        if self.tau < 0:
            raise ValueError("tau must be nonnegative")
        if self.hyper not in ("gaussian", "uniform", "point"):
            raise ValueError(f"unknown hyper-prior kind {self.hyper!r}")
        if self.box_halfwidth <= 0:
            raise ValueError("box must be nonempty")


class SharedMeanGaussianModel(HierarchicalModel):
    def __init__(self, spec: SharedMeanGaussianSpec):
        self.spec = spec
        b = spec.b
        self.pi_star = np.zeros(b) if spec.pi_star is None else np.asarray(
            spec.pi_star, dtype=float
        )
        if spec.hyper == "gaussian" and spec.tau > 0:
            hyper = Gaussian(np.zeros(b), std=spec.tau)
        elif spec.hyper == "uniform":
            hw = spec.box_halfwidth
            hyper = UniformBox(-hw * np.ones(b), hw * np.ones(b))
        else:
            hyper = PointMass(self.pi_star)
        super().__init__(
            hyper_prior=hyper,
            prior_family=lambda pi: Gaussian(pi, std=spec.sigma_pi),
            likelihood_family=lambda th: Gaussian(th, std=spec.sigma_z),
            space_dims={"hyper": b, "task": b, "obs": b},
            reference_measures={
                "hyper": "counting" if isinstance(hyper, PointMass) else "lebesgue",
                "task": "lebesgue",
                "obs": "lebesgue",
            },
            hyper_support=lambda pi: np.isfinite(
                hyper.log_density(np.asarray(pi, dtype=float))
            ),
        )

    # --- divergence hooks -------------------------------------------------
    def hellinger_sq(self, pi1, pi2):
        d = np.asarray(pi1, dtype=float) - np.asarray(pi2, dtype=float)
        return float(2.0 * (1.0 - np.exp(-(d @ d) / (8.0 * self.spec.sigma_pi**2))))

    def kl(self, pi1, pi2):
        d = np.asarray(pi1, dtype=float) - np.asarray(pi2, dtype=float)
        return float((d @ d) / (2.0 * self.spec.sigma_pi**2))

    def sample_hyper(self, size, rng):
        return self.hyper_prior.sample(size, rng)

    # --- closed forms (Gaussian hyper-prior) ------------------------------
    def _require_gaussian_hyper(self):
        if not (self.spec.hyper == "gaussian" and self.spec.tau > 0):
            raise ValueError("closed form requires a Gaussian hyper-prior with tau > 0")

    def mixture_cov_1d(self, n):
        """Per-coordinate covariance of the induced prior on n task values."""
        self._require_gaussian_hyper()
        s2, t2 = self.spec.sigma_pi**2, self.spec.tau**2
        return s2 * np.eye(n) + t2 * np.ones((n, n))

    def mixture_log_density(self, thetas):
        """Closed-form log of the induced prior at an n-tuple of tasks."""
        thetas = np.atleast_2d(np.asarray(thetas, dtype=float))  # (n, b)
        if isinstance(self.hyper_prior, PointMass):
            prior = self.prior_family(self.pi_star)
            return float(np.sum(prior.log_density(thetas)))
        self._require_gaussian_hyper()
        n = thetas.shape[0]
        s2, t2 = self.spec.sigma_pi**2, self.spec.tau**2
        denom = s2 + n * t2
        logdet = n * np.log(s2) + np.log1p(n * t2 / s2)
        total = -0.5 * self.spec.b * (n * np.log(2 * np.pi) + logdet)
        sq = np.sum(thetas * thetas)
        colsums = thetas.sum(axis=0)
        total += -0.5 * (sq - (t2 / denom) * float(colsums @ colsums)) / s2
        return float(total)

    def kl_true_vs_mixture_closed(self, pi_star, n):
        """D_K between the fixed-hyper prior on n tasks and the induced prior."""
        if isinstance(self.hyper_prior, PointMass):
            return 0.0
        self._require_gaussian_hyper()
        pi_star = np.asarray(pi_star, dtype=float)
        s2, t2 = self.spec.sigma_pi**2, self.spec.tau**2
        denom = s2 + n * t2
        b = self.spec.b
        return 0.5 * (
            b * np.log1p(n * t2 / s2) + n * (pi_star @ pi_star - b * t2) / denom
        )

    def mutual_information_closed(self, n):
        if isinstance(self.hyper_prior, PointMass):
            return 0.0
        self._require_gaussian_hyper()
        return 0.5 * self.spec.b * np.log1p(n * self.spec.tau**2 / self.spec.sigma_pi**2)


# ---------------------------------------------------------------------------
# linear-Gaussian a:b model


@dataclass(frozen=True)
class ABModelSpec:
    a: int
    b: int
    sigma_pi: float = 0.01  # smoothing width of the shared-block delta
    sigma_z: float = 1.0
    tau: float = 1.0  # hyper-prior std; 0 means the prior is known
    s_a: float = 1.0  # per-task parameter scale
    obs_dim: int | None = None
    design_seed: int = 0
    pi_star: tuple | None = None

    def __post_init__(self):
        if self.a < 0 or self.b < 0 or self.a + self.b < 1:
            raise ValueError("need a + b >= 1 parameters")
        if self.sigma_pi <= 0 or self.sigma_z <= 0 or self.s_a <= 0:
            raise ValueError("scales must be positive")
        if self.obs_dim is not None and self.obs_dim < self.a + self.b:
            raise ValueError("obs_dim must be >= a + b")


def _random_orthonormal(rows, cols, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q * np.sign(np.diag(r))


class ABGaussianModel(HierarchicalModel):
    """z = A x_a + C x_b + noise, with x_b tied to the hyper-parameter pi."""

    def __init__(self, spec: ABModelSpec, A=None, C=None):
        self.spec = spec
        a, b = spec.a, spec.b
        obs_dim = spec.obs_dim or (a + b)
        if A is None and C is None:
            M = _random_orthonormal(obs_dim, a + b, spec.design_seed)
            A, C = M[:, :a], M[:, a:]
        self.A = np.asarray(A, dtype=float).reshape(obs_dim, a)
        self.C = np.asarray(C, dtype=float).reshape(obs_dim, b)
        self.M = np.hstack([self.A, self.C])
        if np.linalg.matrix_rank(self.M) < a + b:
            raise ValueError("[A|C] must have full column rank (Fisher singularity)")
        self.obs_dim = obs_dim
        self.pi_star = np.zeros(b) if spec.pi_star is None else np.asarray(
            spec.pi_star, dtype=float
        )
        if spec.tau > 0:
            hyper = Gaussian(np.zeros(b), std=spec.tau)
        else:
            hyper = PointMass(self.pi_star)

        def prior_family(pi):
            pi = np.atleast_1d(np.asarray(pi, dtype=float))
            mean = np.concatenate([np.zeros(a), pi])
            cov = np.diag(
                np.concatenate(
                    [np.full(a, spec.s_a**2), np.full(b, spec.sigma_pi**2)]
                )
            )
            return Gaussian(mean, cov=cov)

        super().__init__(
            hyper_prior=hyper,
            prior_family=prior_family,
            likelihood_family=lambda th: Gaussian(
                self.M @ np.asarray(th, dtype=float), std=spec.sigma_z
            ),
            space_dims={"hyper": b, "task": a + b, "obs": obs_dim},
            reference_measures={
                "hyper": "counting" if spec.tau == 0 else "lebesgue",
                "task": "lebesgue",
                "obs": "lebesgue",
            },
            hyper_support=lambda pi: np.isfinite(
                hyper.log_density(np.asarray(pi, dtype=float))
            ),
        )

    @property
    def hyper_mean(self):
        return self.pi_star if self.spec.tau == 0 else np.zeros(self.spec.b)

    # --- sampling ----------------------------------------------------------
    def sample_theta_tuples(self, n, size, rng, pi=None):
        """(x_a, x_b) arrays of shape (size, n, a) and (size, n, b).

        ``pi=None`` draws the shared block through the hyper-prior (the
        mixture measure); a fixed ``pi`` gives the conditional measure.
        """
        a, b = self.spec.a, self.spec.b
        x_a = self.spec.s_a * rng.standard_normal((size, n, a))
        if pi is None:
            pis = self.hyper_prior.sample(size, rng)[:, None, :]
        else:
            pis = np.asarray(pi, dtype=float).reshape(1, 1, b)
        x_b = pis + self.spec.sigma_pi * rng.standard_normal((size, n, b))
        return x_a, x_b

    def flatten_tasks(self, x_a, x_b):
        return np.concatenate([x_a, x_b], axis=-1).reshape(x_a.shape[0], -1)

    def task_metric_embedding(self, flat):
        """Coordinates in which Euclidean distance feeds the Gaussian
        Hellinger closed form with std sigma_z (per-task blocks mapped
        through [A|C])."""
        flat = np.atleast_2d(np.asarray(flat, dtype=float))
        k = self.spec.a + self.spec.b
        n = flat.shape[1] // k
        blocks = flat.reshape(flat.shape[0], n, k)
        return np.einsum("ok,rnk->rno", self.M, blocks).reshape(flat.shape[0], -1)

    # --- Fisher ------------------------------------------------------------
    def fisher_matrix(self):
        return self.M.T @ self.M / self.spec.sigma_z**2

    def log_likelihood(self, theta, z):
        """Log density of observation rows ``z`` given one task parameter."""
        return self.likelihood_family(theta).log_density(z)

    # --- evidence KL closed form -------------------------------------------
    def _rank_one_kl(self, mu, s2, m):
        """KL of N(mu 1_m, sz^2 I) from N(0, sz^2 I + s2 J_m), per scalar mean."""
        sz2 = self.spec.sigma_z**2
        denom = sz2 + m * s2
        return 0.5 * (
            -m * s2 / denom + m * mu**2 / denom + np.log1p(m * s2 / sz2)
        )

    def evidence_kl(self, x_a, x_b, m, mode="hierarchical"):
        """D_K( P_{Z^{(n,m)} | theta^n} || learner's marginal on Z^{(n,m)} ).

        ``x_a``: (R, n, a), ``x_b``: (R, n, b).  The hierarchical learner's
        marginal couples tasks through the hyper-prior; the independent
        learner uses the product of single-task mixtures.
        """
        if m == 0:
            return np.zeros(x_a.shape[0])
        spec = self.spec
        n = x_a.shape[1]
        sz2 = spec.sigma_z**2
        sp2, t2, sa2 = spec.sigma_pi**2, spec.tau**2, spec.s_a**2
        # per-task parameters: rank-one blocks per coordinate
        kl = np.sum(self._rank_one_kl(x_a, sa2, m), axis=(1, 2))
        beta = x_b - self.hyper_mean
        if mode == "independent":
            kl += np.sum(self._rank_one_kl(beta, sp2 + t2, m), axis=(1, 2))
            return kl
        if mode != "hierarchical":
            raise ValueError(f"unknown mode {mode!r}")
        # shared block: nested compound symmetry with eigenvalues
        # sz2 (within columns), sz2 + m sp2 (task contrasts),
        # sz2 + m sp2 + n m t2 (grand mean)
        lam_c = sz2 + m * sp2
        lam_g = sz2 + m * sp2 + n * m * t2
        trace = -(n - 1) * m * sp2 / lam_c - (m * sp2 + n * m * t2) / lam_g
        logdet = (n - 1) * np.log1p(m * sp2 / sz2) + np.log1p(
            (m * sp2 + n * m * t2) / sz2
        )
        beta_bar = beta.mean(axis=1, keepdims=True)
        quad = (
            m * np.sum((beta - beta_bar) ** 2, axis=(1, 2)) / lam_c
            + n * m * np.sum(beta_bar[:, 0, :] ** 2, axis=1) / lam_g
        )
        kl += 0.5 * (spec.b * (trace + logdet) + quad)
        return kl

    # --- posterior / predictive machinery ----------------------------------
    def prior_over_stacked(self, n, mode="hierarchical"):
        """Mean and covariance of w = (x_a,1, x_b,1, ..., x_a,n, x_b,n)."""
        spec = self.spec
        k = spec.a + spec.b
        mu = np.tile(np.concatenate([np.zeros(spec.a), self.hyper_mean]), n)
        within = np.diag(
            np.concatenate(
                [np.full(spec.a, spec.s_a**2), np.full(spec.b, spec.sigma_pi**2)]
            )
        )
        cov = np.kron(np.eye(n), within)
        if spec.tau > 0:
            t2 = spec.tau**2
            if mode == "hierarchical":
                sel = np.zeros((k, spec.b))
                sel[spec.a :, :] = np.eye(spec.b)
                cross = np.kron(np.ones((n, n)), sel @ sel.T * t2)
                cov = cov + cross
            else:
                cov += np.kron(
                    np.eye(n),
                    np.diag(np.concatenate([np.zeros(spec.a), np.full(spec.b, t2)])),
                )
        return mu, cov

    def stacked_design(self, n):
        return np.kron(np.eye(n), self.M)

    def posterior_over_stacked(self, n, m, zbar_flat, mode="hierarchical"):
        """Gaussian posterior over the stacked task parameters.

        ``zbar_flat``: per-task column means, flattened to (R, n*obs_dim)
        (R replicates share the same covariance).  Returns (means (R, n*k),
        cov (n*k, n*k)).
        """
        mu0, cov0 = self.prior_over_stacked(n, mode)
        if m == 0:
            reps = np.atleast_2d(zbar_flat).shape[0] if zbar_flat is not None else 1
            return np.tile(mu0, (reps, 1)), cov0
        D = self.stacked_design(n)
        prec0 = np.linalg.inv(cov0)
        prec = prec0 + (m / self.spec.sigma_z**2) * (D.T @ D)
        cov = np.linalg.inv(prec)
        cov = 0.5 * (cov + cov.T)
        rhs = prec0 @ mu0 + (m / self.spec.sigma_z**2) * (
            np.atleast_2d(zbar_flat) @ D
        )
        means = rhs @ cov.T
        return means, cov

    def predictive_next_column(self, n, m, zbar_flat, mode="hierarchical"):
        """Gaussian predictive for the next column (one new obs per task)."""
        means, cov = self.posterior_over_stacked(n, m, zbar_flat, mode)
        D = self.stacked_design(n)
        pred_mean = means @ D.T
        pred_cov = D @ cov @ D.T + self.spec.sigma_z**2 * np.eye(n * self.obs_dim)
        return pred_mean, pred_cov


# ---------------------------------------------------------------------------
# quantized-output LDR model


@dataclass(frozen=True)
class QuantizedLDRSpec:
    w_ldr: int
    w_out: int
    k: int
    sigma_pi: float = 0.1
    tau: float = 1.0
    out_range: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.sigma_pi <= 0:
            raise ValueError("sigma_pi must be positive")


class QuantizedLDRModel(HierarchicalModel):
    """Gaussian priors over the shared weights, uniform k-bit grid over the
    output weights (identical across priors, so it cancels in every
    divergence but carries the per-task entropy k * w_out bits)."""

    def __init__(self, spec: QuantizedLDRSpec):
        self.spec = spec
        levels = 2**spec.k
        lo, hi = spec.out_range
        self.out_grid = lo + (hi - lo) * (np.arange(levels) + 0.5) / levels
        self.n_codes = levels**spec.w_out  # never materialized: can be huge
        if spec.tau > 0:
            hyper = Gaussian(np.zeros(spec.w_ldr), std=spec.tau)
        else:
            hyper = PointMass(np.zeros(spec.w_ldr))
        super().__init__(
            hyper_prior=hyper,
            prior_family=lambda pi: Gaussian(pi, std=spec.sigma_pi),
            likelihood_family=lambda th: Gaussian(
                np.atleast_1d(th)[: spec.w_ldr], std=1.0
            ),
            space_dims={"hyper": spec.w_ldr, "task": spec.w_ldr, "obs": spec.w_ldr},
            reference_measures={
                "hyper": "lebesgue" if spec.tau > 0 else "counting",
                "task": "lebesgue*counting",
                "obs": "lebesgue",
            },
        )

    @property
    def entropy_bits_per_prior(self):
        """Shannon entropy of the quantized output block, in bits."""
        return self.spec.k * self.spec.w_out

    def as_shared_mean(self):
        """The continuous shared-weight block as a shared-mean instance.

        Valid for every divergence between priors: the quantized block is
        identical across priors, so it contributes affinity 1 / KL 0.
        """
        return SharedMeanGaussianModel(
            SharedMeanGaussianSpec(
                b=self.spec.w_ldr,
                sigma_pi=self.spec.sigma_pi,
                tau=self.spec.tau,
                hyper="gaussian" if self.spec.tau > 0 else "point",
            )
        )


# ---------------------------------------------------------------------------
# toy sigmoidal MLP with a shared hidden layer


@dataclass(frozen=True)
class MlpLdrSpec:
    input_dim: int
    hidden_dim: int
    canonicalize: bool = True
    probe_inputs: int = 64
    probe_seed: int = 0


class MlpLdrModel:
    """f(x) = logistic(v . tanh(W x)): W is the shared representation,
    v the per-task output weights.  Hellinger distances are exact sums over
    a fixed finite probe-input grid."""

    def __init__(self, spec: MlpLdrSpec):
        self.spec = spec
        rng = np.random.default_rng(spec.probe_seed)
        self.x_grid = rng.standard_normal((spec.probe_inputs, spec.input_dim))
        self.dim = spec.hidden_dim * spec.input_dim + spec.hidden_dim

    def unpack(self, theta):
        theta = np.asarray(theta, dtype=float)
        h, d = self.spec.hidden_dim, self.spec.input_dim
        return theta[: h * d].reshape(h, d), theta[h * d :]

    def pack(self, W, v):
        return np.concatenate([W.ravel(), v])

    def output(self, theta, x=None):
        W, v = self.unpack(theta)
        x = self.x_grid if x is None else np.atleast_2d(x)
        return expit(np.tanh(x @ W.T) @ v)

    def canonicalize(self, theta):
        """Representative of the sign-flip/permutation orbit: make each
        unit's largest-magnitude incoming weight positive, then sort units
        by first-incoming-weight magnitude."""
        W, v = self.unpack(theta)
        W, v = W.copy(), v.copy()
        for j in range(W.shape[0]):
            lead = np.argmax(np.abs(W[j]))
            if W[j, lead] < 0:
                W[j] = -W[j]
                v[j] = -v[j]
        order = np.argsort(np.abs(W[:, 0]), kind="stable")
        return self.pack(W[order], v[order])

    def symmetry_transforms(self, theta, max_count=32, seed=0):
        """Distinct non-identity orbit members via sign flips/permutations."""
        W, v = self.unpack(theta)
        h = W.shape[0]
        out = []
        flips = itertools.product([1.0, -1.0], repeat=h)
        perms = itertools.permutations(range(h))
        for flip, perm in itertools.islice(
            itertools.product(flips, perms), max_count + 1
        ):
            s = np.asarray(flip)
            p = list(perm)
            cand = self.pack(W[p] * s[:, None], v[p] * s)
            if not np.array_equal(cand, theta):
                out.append(cand)
        return out[:max_count]

    def hellinger_sq(self, theta1, theta2):
        """Exact squared Hellinger distance between the label distributions,
        averaged over the probe inputs (inputs are not modelled)."""
        f1, f2 = self.output(theta1), self.output(theta2)
        return float(
            np.mean(
                (np.sqrt(f1) - np.sqrt(f2)) ** 2
                + (np.sqrt(1 - f1) - np.sqrt(1 - f2)) ** 2
            )
        )

    def log_likelihood(self, theta, data):
        """Bernoulli log likelihood over (x, y) pairs; -inf when the network
        is fully confident and wrong."""
        xs = np.atleast_2d(np.asarray([d[0] for d in data], dtype=float))
        ys = np.asarray([d[1] for d in data], dtype=float)
        f = self.output(theta, xs)
        with np.errstate(divide="ignore"):
            terms = ys * np.log(f) + (1 - ys) * np.log1p(-f)
        return float(np.sum(terms))

    def sample_observation(self, theta, size, rng):
        idx = rng.integers(self.x_grid.shape[0], size=size)
        xs = self.x_grid[idx]
        f = self.output(theta, xs)
        ys = (rng.random(size) < f).astype(float)
        return idx, xs, ys


# ---------------------------------------------------------------------------
# small finite instance for brute-force oracles


class DiscreteHierarchicalModel(HierarchicalModel):
    def __init__(self, pi_probs, theta_probs, z_probs):
        self.pi_probs = np.asarray(pi_probs, dtype=float)
        self.theta_probs = np.asarray(theta_probs, dtype=float)  # (P, T)
        self.z_probs = np.asarray(z_probs, dtype=float)  # (T, Zc)
        for name, arr in (("pi", self.pi_probs[None]), ("theta", self.theta_probs),
                          ("z", self.z_probs)):
            if np.any(np.abs(arr.sum(axis=-1) - 1.0) > 1e-12):
                raise ValueError(f"{name} probabilities must sum to 1")
        super().__init__(
            hyper_prior=Discrete(self.pi_probs),
            prior_family=lambda pi: Discrete(self.theta_probs[int(pi)]),
            likelihood_family=lambda th: Discrete(self.z_probs[int(th)]),
            space_dims={
                "hyper": self.pi_probs.shape[0],
                "task": self.theta_probs.shape[1],
                "obs": self.z_probs.shape[1],
            },
            reference_measures={"hyper": "counting", "task": "counting", "obs": "counting"},
            hyper_support=lambda pi: 0 <= int(pi) < self.pi_probs.shape[0],
        )

    def mixture_over_task_tuples(self, n):
        """Exact induced prior over Theta^n, as an array of shape (T,)*n."""
        T = self.theta_probs.shape[1]
        out = np.zeros((T,) * n)
        for p, w in enumerate(self.pi_probs):
            prod = np.ones(())
            for _ in range(n):
                prod = np.multiply.outer(prod, self.theta_probs[p])
            out += w * prod
        return out

    def task_tuple_probs(self, pi, n):
        prod = np.ones(())
        for _ in range(n):
            prod = np.multiply.outer(prod, self.theta_probs[int(pi)])
        return prod


# ---------------------------------------------------------------------------
# construction and probes


def build_instance(spec):
    if isinstance(spec, SharedMeanGaussianSpec):
        return SharedMeanGaussianModel(spec)
    if isinstance(spec, ABModelSpec):
        return ABGaussianModel(spec)
    if isinstance(spec, QuantizedLDRSpec):
        return QuantizedLDRModel(spec)
    if isinstance(spec, MlpLdrSpec):
        return MlpLdrModel(spec)
    raise TypeError(f"unknown spec type {type(spec).__name__}")


def fisher_matrix_numeric(
    log_likelihood, theta, sampler, samples, fd_step, seed: SeedSpec
):
    """Monte Carlo Fisher matrix from central-finite-difference scores.

    ``log_likelihood(theta, z)`` scores a single observation; ``sampler(size,
    rng)`` draws observations at the probed ``theta``.  Returns (J, min
    eigenvalue).
    """
    theta = np.asarray(theta, dtype=float)
    rng = as_seed(seed).rng()
    zs = sampler(samples, rng)
    d = theta.shape[0]
    scores = np.empty((samples, d))
    for kdim in range(d):
        step = np.zeros(d)
        step[kdim] = fd_step
        up = np.asarray([log_likelihood(theta + step, z) for z in zs])
        dn = np.asarray([log_likelihood(theta - step, z) for z in zs])
        with np.errstate(invalid="ignore"):
            scores[:, kdim] = (up - dn) / (2 * fd_step)
    if not np.all(np.isfinite(scores)):
        raise ValueError(
            f"non-finite finite differences at step {fd_step:g}; adjust fd_step"
        )
    J = scores.T @ scores / samples
    return J, float(np.linalg.eigvalsh(J).min())


@dataclass
class DominationProbe:
    c_lo: float
    c_hi: float
    passed: bool
    witness: tuple | None = None
    ratios_per_radius: dict = field(default_factory=dict)


def local_domination_probe(
    hellinger_sq_fn,
    theta,
    radii,
    pairs_per_radius,
    seed: SeedSpec,
    *,
    canonical_map=None,
    extra_candidates=(),
    condition_bound=1e3,
):
    """Empirical check that sqrt(hellinger) and the Euclidean metric dominate
    each other near ``theta``.

    Samples perturbations on spheres of shrinking ``radii`` and records
    hellinger^(1/2) / ||theta - theta'|| (distances taken between canonical
    representatives when ``canonical_map`` is given).  ``extra_candidates``
    lets callers inject adversarial pairs such as symmetry-orbit points: a
    zero Hellinger distance at positive parameter distance is a failure with
    that witness.
    """
    rng = as_seed(seed).rng()
    theta = np.asarray(theta, dtype=float)
    canon = canonical_map or (lambda t: t)
    theta_c = np.asarray(canon(theta), dtype=float)
    ratios_per_radius = {}
    witness = None
    all_ratios = []

    def ratio_of(cand):
        nonlocal witness
        cand = np.asarray(cand, dtype=float)
        dist = float(np.linalg.norm(np.asarray(canon(cand), dtype=float) - theta_c))
        if dist == 0.0:
            return None  # same orbit point: excluded (0/0)
        dh = float(hellinger_sq_fn(theta, cand))
        r = np.sqrt(max(dh, 0.0)) / dist
        if r == 0.0 and witness is None:
            witness = (theta.copy(), cand)
        return r

    for radius in radii:
        rs = []
        for _ in range(pairs_per_radius):
            u = rng.standard_normal(theta.shape[0])
            u /= np.linalg.norm(u)
            r = ratio_of(theta + radius * u)
            if r is not None:
                rs.append(r)
        ratios_per_radius[float(radius)] = rs
        all_ratios.extend(rs)
    for cand in extra_candidates:
        r = ratio_of(cand)
        if r is not None:
            all_ratios.append(r)
    c_lo, c_hi = float(np.min(all_ratios)), float(np.max(all_ratios))
    passed = witness is None and c_lo > 0 and c_hi / c_lo <= condition_bound
    return DominationProbe(c_lo, c_hi, passed, witness, ratios_per_radius)

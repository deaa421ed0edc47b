"""hierbayes: hierarchical Bayesian bias learning at desk scale.

A small library plus CLI harness for two-level Bayesian models (hyper-prior
over priors over task parameters): exact and Monte Carlo divergences, local
metric dimension from Hellinger ball counts, multi-task risk curves with
closed-form conjugate machinery, and information-theoretic bound checks.
"""

from .kernels import BACKEND as KERNEL_BACKEND

__version__ = "0.1.0"

__all__ = ["KERNEL_BACKEND", "__version__"]

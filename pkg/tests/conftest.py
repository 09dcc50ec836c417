"""Shared builders for the test suite."""

import numpy as np

from diffusim import ModelParams


def two_group_params(alpha: float = 1.0) -> ModelParams:
    """The bundled two-group scenario's rates (same values as table2.cfg)."""
    return ModelParams(
        m=2,
        n_total=100.0,
        alpha=alpha,
        b=0.01,
        d=0.01,
        rho=0.2,
        delta=0.03,
        phi=0.03,
        eps=np.array([0.4, 0.6]),
        gamma=np.array([0.4, 0.7]),
    )


def single_group_params(alpha: float = 2.0) -> ModelParams:
    """A small single-group chain used for exact-propagation checks."""
    return ModelParams(
        m=1,
        n_total=20.0,
        alpha=alpha,
        b=0.0,
        d=0.02,
        rho=0.2,
        delta=0.03,
        phi=0.03,
        eps=0.5,
        gamma=0.5,
    )


def random_params(rng: np.random.Generator, m: int) -> ModelParams:
    """A random valid parameter draw with strictly positive rates."""
    return ModelParams(
        m=m,
        n_total=float(rng.uniform(50.0, 500.0)),
        alpha=float(rng.uniform(0.5, 5.0)),
        b=rng.uniform(0.005, 0.05, m),
        d=rng.uniform(0.005, 0.05, m),
        rho=rng.uniform(0.05, 0.3, m),
        delta=rng.uniform(0.01, 0.1, m),
        phi=rng.uniform(0.01, 0.1, m),
        eps=rng.uniform(0.1, 1.0, m),
        gamma=rng.uniform(0.1, 1.0, m),
    )

"""Model parameters, state containers, the activation force, and equilibria.

The population is split into m groups per state: susceptible S_i, active
A_i and deactivated D_i. Per-capita flows are

    activation    S_i -> A_i   driven by the active groups (see
                               :func:`force_of_activation`),
    withdrawal    S_i -> D_i   at rate rho_i,
    deactivation  A_i -> D_i   at rate phi_i,
    return        D_i -> S_i   at rate delta_i,

plus a constant birth inflow b_i into S_i and a natural death rate d_i
applied to every compartment.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .errors import ConvergenceError, DomainError

__all__ = [
    "ModelParams",
    "ContinuousState",
    "EquilibriumPoint",
    "force_of_activation",
    "ode_rhs",
    "disease_free_equilibrium",
    "endemic_equilibrium",
]


def _rate_array(name: str, value, m: int) -> np.ndarray:
    """Coerce a scalar or length-m sequence to a read-only float array."""
    arr = np.asarray(value, dtype=float)
    if arr.ndim == 0:
        arr = np.full(m, float(arr))
    else:
        arr = np.array(arr, dtype=float)
    if arr.shape != (m,):
        raise DomainError(f"{name}: expected scalar or length-{m} vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: entries must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name}: entries must be nonnegative")
    arr.setflags(write=False)
    return arr


def _state_array(name: str, value, m: int | None = None) -> np.ndarray:
    arr = np.array(np.asarray(value, dtype=float), dtype=float)
    if arr.ndim == 0 and m is not None:
        arr = np.full(m, float(arr))
    if arr.ndim != 1:
        raise DomainError(f"{name}: expected a 1-d vector, got shape {arr.shape}")
    if m is not None and arr.shape != (m,):
        raise DomainError(f"{name}: expected length {m}, got {arr.shape[0]}")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{name}: entries must be finite")
    if np.any(arr < 0):
        raise DomainError(f"{name}: entries must be nonnegative")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class ModelParams:
    """All scenario rates and sizes; the single source of truth for a run.

    Scalars broadcast to length-m arrays. Every rate must be finite and
    nonnegative; ``n_total`` (the reference population in the activation
    force) must be positive.

    Args:
        m: number of groups per state.
        n_total: reference population size N.
        alpha: global contact-intensity scalar.
        b: per-group birth inflow into S.
        d: per-group natural death rate.
        rho: per-group withdrawal rate S -> D.
        delta: per-group return rate D -> S.
        phi: per-group deactivation rate A -> D.
        eps: per-group susceptibility weight.
        gamma: per-group infectiousness weight.
    """

    m: int
    n_total: float
    alpha: float
    b: np.ndarray
    d: np.ndarray
    rho: np.ndarray
    delta: np.ndarray
    phi: np.ndarray
    eps: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        if not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise DomainError(f"m must be a positive integer, got {self.m!r}")
        object.__setattr__(self, "m", int(self.m))
        n = float(self.n_total)
        if not np.isfinite(n) or n <= 0:
            raise DomainError(f"n_total must be positive and finite, got {self.n_total!r}")
        object.__setattr__(self, "n_total", n)
        a = float(self.alpha)
        if not np.isfinite(a) or a < 0:
            raise DomainError(f"alpha must be nonnegative and finite, got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)
        for name in ("b", "d", "rho", "delta", "phi", "eps", "gamma"):
            object.__setattr__(self, name, _rate_array(name, getattr(self, name), self.m))

    def with_alpha(self, alpha: float) -> "ModelParams":
        return replace(self, alpha=alpha)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ModelParams):
            return NotImplemented
        return (
            self.m == other.m
            and self.n_total == other.n_total
            and self.alpha == other.alpha
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("b", "d", "rho", "delta", "phi", "eps", "gamma")
            )
        )


@dataclass(frozen=True, eq=False)
class ContinuousState:
    """Real-valued compartment vector at time t: s, a and dd per group."""

    t: float
    s: np.ndarray
    a: np.ndarray
    dd: np.ndarray

    def __post_init__(self):
        s = _state_array("s", self.s)
        a = _state_array("a", self.a, s.shape[0])
        dd = _state_array("dd", self.dd, s.shape[0])
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "dd", dd)

    @property
    def m(self) -> int:
        return self.s.shape[0]

    def total(self) -> float:
        """Total population across all groups and states."""
        return float(self.s.sum() + self.a.sum() + self.dd.sum())


@dataclass(frozen=True, eq=False)
class EquilibriumPoint:
    """A stationary point of the flow, tagged disease_free or endemic."""

    s_star: np.ndarray
    a_star: np.ndarray
    d_star: np.ndarray
    kind: str

    def __post_init__(self):
        if self.kind not in ("disease_free", "endemic"):
            raise DomainError(f"kind must be 'disease_free' or 'endemic', got {self.kind!r}")


def force_of_activation(params: ModelParams, a: np.ndarray) -> np.ndarray:
    """Pairwise activation pressure matrix for active counts ``a``.

    Entry (i, j) is the rate at which one group-i susceptible is activated
    by the group-j actives:

        lam[i, j] = alpha * eps_i * gamma_j * a_j / n_total

    Args:
        params: model parameters.
        a: length-m vector of active counts (or densities).

    Returns:
        The m-by-m matrix lam, entrywise nonnegative.
    """
    a = _state_array("a", a, params.m)
    return params.alpha * np.outer(params.eps, params.gamma * a) / params.n_total


def ode_rhs(params: ModelParams, state: ContinuousState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Time derivative of (s, a, dd) under the mean-field flow.

    Per group i, with lam from :func:`force_of_activation`:

        s' = b_i - sum_j lam_ij s_i - (d_i + rho_i) s_i + delta_i dd_i
        a' = sum_j lam_ij s_i - (d_i + phi_i) a_i
        dd' = phi_i a_i + rho_i s_i - (d_i + delta_i) dd_i

    Summed over states, each group obeys the balance
    s' + a' + dd' = b_i - d_i (s + a + dd).

    Returns:
        Tuple (ds, da, ddd) of length-m arrays.
    """
    if state.m != params.m:
        raise DomainError(f"state has {state.m} groups, params expect {params.m}")
    y = np.concatenate([state.s, state.a, state.dd])
    dy = _rhs_flat(params, y)
    m = params.m
    return dy[:m], dy[m : 2 * m], dy[2 * m :]


def _rhs_flat(params: ModelParams, y: np.ndarray) -> np.ndarray:
    """Flow on the flat vector y = concat(s, a, dd). No validation."""
    m = params.m
    s = y[:m]
    a = y[m : 2 * m]
    dd = y[2 * m :]
    # row sums of the activation matrix times s_i, computed without
    # materializing the m-by-m matrix
    act = (params.alpha / params.n_total) * float(params.gamma @ a) * params.eps * s
    ds = params.b - act - (params.d + params.rho) * s + params.delta * dd
    da = act - (params.d + params.phi) * a
    ddd = params.phi * a + params.rho * s - (params.d + params.delta) * dd
    return np.concatenate([ds, da, ddd])


def _rk4_step(y: np.ndarray, h: float, f: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
    """One classic fourth-order Runge-Kutta step of size h."""
    k1 = f(y)
    k2 = f(y + 0.5 * h * k1)
    k3 = f(y + 0.5 * h * k2)
    k4 = f(y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def disease_free_equilibrium(params: ModelParams) -> EquilibriumPoint:
    """Closed-form stationary point with no actives.

    With a_i = 0 the per-group balance solves to

        s*_i = b_i (d_i + delta_i) / (d_i (d_i + delta_i + rho_i))
        d*_i = b_i rho_i          / (d_i (d_i + delta_i + rho_i))

    Requires every d_i > 0 (otherwise no finite stationary point exists).
    """
    if np.any(params.d <= 0):
        raise DomainError("disease-free equilibrium requires every death rate d_i > 0")
    denom = params.d * (params.d + params.delta + params.rho)
    s_star = params.b * (params.d + params.delta) / denom
    d_star = params.b * params.rho / denom
    return EquilibriumPoint(s_star=s_star, a_star=np.zeros(params.m), d_star=d_star, kind="disease_free")


def endemic_equilibrium(
    params: ModelParams,
    seed_state: ContinuousState,
    *,
    tol: float = 1e-9,
    horizon: float = 2e4,
    step: float = 0.05,
    extinction_threshold: float = 1e-3,
) -> EquilibriumPoint:
    """Long-run attractor reached from ``seed_state``.

    Integrates the flow until the max-norm of the derivative drops below
    ``tol``. The returned point is tagged endemic when its total active
    mass exceeds ``extinction_threshold``, disease_free otherwise.

    Raises:
        DomainError: if the seed has no active mass at all.
        ConvergenceError: if stationarity is not reached within
            ``horizon`` time units; carries the last state reached.
    """
    if seed_state.m != params.m:
        raise DomainError(f"seed state has {seed_state.m} groups, params expect {params.m}")
    if float(seed_state.a.sum()) <= 0:
        raise DomainError("endemic search needs a seed with some active mass")
    m = params.m
    y = np.concatenate([seed_state.s, seed_state.a, seed_state.dd])
    f = lambda v: _rhs_flat(params, v)
    t = 0.0
    n_steps = int(horizon / step)
    for _ in range(n_steps):
        if float(np.max(np.abs(f(y)))) < tol:
            break
        y = _rk4_step(y, step, f)
        np.maximum(y, 0.0, out=y)
        t += step
    else:
        last = ContinuousState(t=t, s=y[:m], a=y[m : 2 * m], dd=y[2 * m :])
        raise ConvergenceError(
            f"no stationary point within horizon {horizon} (residual "
            f"{float(np.max(np.abs(f(y)))):.3e} > tol {tol:.1e})",
            last_state=last,
        )
    s, a, dd = y[:m], y[m : 2 * m], y[2 * m :]
    kind = "endemic" if float(a.sum()) > extinction_threshold else "disease_free"
    return EquilibriumPoint(s_star=s, a_star=a, d_star=dd, kind=kind)

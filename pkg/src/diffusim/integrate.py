"""Fixed-step deterministic integration of the mean-field flow.

Classic fourth-order Runge-Kutta with a fixed step. After each full step
any compartment driven below zero is clamped back to zero and the event
is counted; a run needing the clamp on more than 0.1% of its steps is
rejected as numerically unsound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericError
from .logistic import LogisticConfig, effective_params_for_total
from .model import ContinuousState, ModelParams, _rhs_flat, _rk4_step
from .trajectory import TrajectoryTable

__all__ = [
    "IntegrationConfig",
    "integrate",
    "extinction_time_deterministic",
]

# fraction of steps allowed to hit the negativity clamp before the run
# is rejected
_CLAMP_BUDGET = 1e-3


def _multiple_of(big: float, small: float, names: str) -> int:
    ratio = big / small
    k = int(round(ratio))
    if k < 1 or abs(ratio - k) > 1e-9 * max(1.0, abs(ratio)):
        raise DomainError(f"{names}: {big!r} is not an integer multiple of {small!r}")
    return k


@dataclass(frozen=True)
class IntegrationConfig:
    """Step size, horizon, sampling cadence and extinction threshold."""

    step: float = 0.01
    horizon: float = 200.0
    sample_every: float = 1.0
    extinction_threshold: float = 1e-3

    def __post_init__(self):
        for name in ("step", "horizon", "sample_every", "extinction_threshold"):
            v = float(getattr(self, name))
            if not np.isfinite(v) or v <= 0:
                raise DomainError(f"{name} must be positive and finite, got {v!r}")
            object.__setattr__(self, name, v)
        if not (self.step <= self.sample_every <= self.horizon):
            raise DomainError(
                f"need step <= sample_every <= horizon, got "
                f"{self.step!r}, {self.sample_every!r}, {self.horizon!r}"
            )
        _multiple_of(self.sample_every, self.step, "sample_every/step")


def integrate(
    params: ModelParams,
    init: ContinuousState,
    cfg: IntegrationConfig,
    logistic: LogisticConfig | None = None,
) -> TrajectoryTable:
    """Integrate the flow from ``init`` and sample every ``sample_every``.

    Args:
        params: model parameters.
        init: starting state (its ``t`` is taken as 0).
        cfg: step/horizon/sampling settings.
        logistic: optional density-dependent birth/death coupling.

    Returns:
        TrajectoryTable sampled at 0, sample_every, 2*sample_every, ...

    Raises:
        NumericError: on a non-finite state (reports the time of blowup)
            or when more than 0.1% of steps needed the negativity clamp.
    """
    if init.m != params.m:
        raise DomainError(f"init has {init.m} groups, params expect {params.m}")
    h = cfg.step
    stride = _multiple_of(cfg.sample_every, cfg.step, "sample_every/step")
    n_steps = int(np.floor(cfg.horizon / h + 1e-9))
    n_samples = n_steps // stride + 1

    if logistic is not None and logistic.enabled:
        def f(v: np.ndarray) -> np.ndarray:
            return _rhs_flat(effective_params_for_total(params, logistic, float(v.sum())), v)
    else:
        def f(v: np.ndarray) -> np.ndarray:
            return _rhs_flat(params, v)

    m = params.m
    y = np.concatenate([init.s, init.a, init.dd]).astype(float)
    out = np.empty((n_samples, 3 * m))
    out[0] = y
    clamped = 0
    sample_idx = 1
    for j in range(1, n_steps + 1):
        y = _rk4_step(y, h, f)
        if not np.all(np.isfinite(y)):
            raise NumericError(f"state became non-finite at t = {j * h:g}")
        if np.any(y < 0):
            clamped += 1
            np.maximum(y, 0.0, out=y)
        if j % stride == 0:
            out[sample_idx] = y
            sample_idx += 1
    if n_steps > 0 and clamped > _CLAMP_BUDGET * n_steps:
        raise NumericError(
            f"negativity clamp hit on {clamped}/{n_steps} steps "
            f"(> {_CLAMP_BUDGET:.1%}); decrease the step size"
        )
    times = np.arange(n_samples) * (stride * h)
    return TrajectoryTable(
        times=times,
        s=out[:, :m],
        a=out[:, m : 2 * m],
        dd=out[:, 2 * m :],
        clamped_steps=clamped,
    )


def extinction_time_deterministic(traj: TrajectoryTable, threshold: float) -> float | None:
    """Earliest sampled time after which total activity stays below ``threshold``.

    Returns None when the final sample is still at or above the threshold
    (activity never dies out within the trajectory). A trajectory that
    never reaches the threshold returns its first sample time.
    """
    if not np.isfinite(threshold) or threshold <= 0:
        raise DomainError(f"threshold must be positive and finite, got {threshold!r}")
    total = traj.total_active()
    above = np.flatnonzero(total >= threshold)
    if above.size == 0:
        return float(traj.times[0])
    last_above = int(above[-1])
    if last_above == total.shape[0] - 1:
        return None
    return float(traj.times[last_above + 1])

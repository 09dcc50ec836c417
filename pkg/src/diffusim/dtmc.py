"""Discrete-time Markov-chain engine for the group-structured model.

The chain advances in fixed epochs of length dt with at most one event
per epoch. Event kinds, their per-epoch probabilities (rate times dt)
and the state updates:

    activate(i)    S_i -> A_i   sum_j lam_ij(a) * s_i
    deactivate(i)  A_i -> D_i   (phi_i + d_i) * a_i   [paper_literal]
                                phi_i * a_i           [full]
    return(i)      D_i -> S_i   delta_i * dd_i
    withdraw(i)    S_i -> D_i   (d_i + rho_i) * s_i   [paper_literal]
                                rho_i * s_i           [full]
    death_s(i)     S_i -> gone  d_i * s_i             [full only]
    death_a(i)     A_i -> gone  d_i * a_i             [full only]
    death_d(i)     D_i -> gone  d_i * dd_i            [full only]
    birth(i)       +1 in S_i    b_i                   [full only]
    no_event                    1 - sum of the above

"paper_literal" keeps the population constant: births are disabled
(b is ignored in this mode, which is only defined for b = 0) and deaths
are folded into the deactivate/withdraw channels, both of which land in
D. "full" carries births and deaths explicitly, so the population
varies. The two modes generate identical chains when b = d = 0.

Reproducibility contract:

* Events are enumerated in the canonical order activate(1..m),
  deactivate(1..m), return(1..m), withdraw(1..m), then in full mode
  death_s(1..m), death_a(1..m), death_d(1..m), birth(1..m), and finally
  no_event. Each epoch consumes exactly one uniform double from the
  replica's generator and selects the event by cumulative probability in
  that order.
* Replica r of an ensemble owns numpy's PCG64 seeded with
  derive_replica_seed(seed, r): the SplitMix64 finalizer applied to
  (seed + (r + 1) * 0x9E3779B97F4A7C15) mod 2^64.
* Ensemble reductions run over fixed-size replica chunks combined in
  index order, so results are independent of the thread count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse

from .errors import ConfigError, DomainError, NumericError, StepSizeError
from .integrate import _multiple_of
from .logistic import LogisticConfig
from .model import ModelParams
from .trajectory import TrajectoryTable

__all__ = [
    "PAPER_LITERAL",
    "FULL",
    "Event",
    "DiscreteState",
    "TransitionTable",
    "ExtinctionSummary",
    "ExactPropagation",
    "canonical_events",
    "derive_replica_seed",
    "event_probabilities",
    "max_stable_dt",
    "simulate_replica",
    "monte_carlo_mean",
    "extinction_time_stochastic",
    "exact_propagation",
]

PAPER_LITERAL = "paper_literal"
FULL = "full"

_GOLDEN = 0x9E3779B97F4A7C15
_MASK64 = (1 << 64) - 1

# ensembles are simulated in fixed chunks of this many replicas; the chunk
# size is part of the reproducibility contract (results are reduced in
# chunk order, never in thread-completion order)
_CHUNK_REPLICAS = 256
# per-block uniform buffer budget, in doubles
_UNIFORM_BUDGET = 8_000_000
_BLOCK_EPOCH_CAP = 4096


def derive_replica_seed(seed: int, index: int) -> int:
    """Per-replica 64-bit seed: SplitMix64 finalizer over (seed, index)."""
    z = (int(seed) + (int(index) + 1) * _GOLDEN) & _MASK64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _MASK64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _MASK64
    z ^= z >> 31
    return z


class Event(NamedTuple):
    """One transition kind; group is 1-based, None for no_event."""

    kind: str
    group: int | None


def _check_mode(mode: str) -> None:
    if mode not in (PAPER_LITERAL, FULL):
        raise DomainError(f"mode must be '{PAPER_LITERAL}' or '{FULL}', got {mode!r}")


def canonical_events(m: int, mode: str) -> tuple[Event, ...]:
    """All events in the documented selection order, no_event last."""
    _check_mode(mode)
    kinds = ["activate", "deactivate", "return", "withdraw"]
    if mode == FULL:
        kinds += ["death_s", "death_a", "death_d", "birth"]
    events = [Event(kind, i) for kind in kinds for i in range(1, m + 1)]
    events.append(Event("no_event", None))
    return tuple(events)


def _count_array(name: str, value, m: int | None = None) -> np.ndarray:
    arr = np.asarray(value)
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise DomainError(f"{name}: counts must be whole numbers")
    elif arr.dtype.kind not in "iu":
        raise DomainError(f"{name}: counts must be integers")
    arr = np.array(arr, dtype=np.int64)
    if arr.ndim == 0 and m is not None:
        arr = np.full(m, int(arr), dtype=np.int64)
    if arr.ndim != 1:
        raise DomainError(f"{name}: expected a 1-d vector")
    if m is not None and arr.shape != (m,):
        raise DomainError(f"{name}: expected length {m}, got {arr.shape[0]}")
    if np.any(arr < 0):
        raise DomainError(f"{name}: counts must be nonnegative")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class DiscreteState:
    """Integer compartment counts per group."""

    s: np.ndarray
    a: np.ndarray
    dd: np.ndarray

    def __post_init__(self):
        s = _count_array("s", self.s)
        a = _count_array("a", self.a, s.shape[0])
        dd = _count_array("dd", self.dd, s.shape[0])
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "dd", dd)

    @property
    def m(self) -> int:
        return self.s.shape[0]

    def total(self) -> int:
        return int(self.s.sum() + self.a.sum() + self.dd.sum())


@dataclass(frozen=True, eq=False)
class TransitionTable:
    """One-epoch event probabilities in canonical order, no_event last.

    no_event is defined as 1 minus the ordered sum of the event entries,
    so re-summing the values in table order gives exactly 1.0.
    """

    probabilities: dict[Event, float]
    dt: float

    def total_event_probability(self) -> float:
        return sum(p for ev, p in self.probabilities.items() if ev.kind != "no_event")

    @property
    def no_event(self) -> float:
        return self.probabilities[Event("no_event", None)]


def _delta_tables(m: int, mode: str) -> np.ndarray:
    """Per-event increments to the flat (s, a, dd) state, one row per event."""
    events = canonical_events(m, mode)
    k = len(events)
    ds = np.zeros((k, m), dtype=np.int64)
    da = np.zeros((k, m), dtype=np.int64)
    ddd = np.zeros((k, m), dtype=np.int64)
    for row, ev in enumerate(events[:-1]):
        g = ev.group - 1
        if ev.kind == "activate":
            ds[row, g] = -1
            da[row, g] = 1
        elif ev.kind == "deactivate":
            da[row, g] = -1
            ddd[row, g] = 1
        elif ev.kind == "return":
            ddd[row, g] = -1
            ds[row, g] = 1
        elif ev.kind == "withdraw":
            ds[row, g] = -1
            ddd[row, g] = 1
        elif ev.kind == "death_s":
            ds[row, g] = -1
        elif ev.kind == "death_a":
            da[row, g] = -1
        elif ev.kind == "death_d":
            ddd[row, g] = -1
        elif ev.kind == "birth":
            ds[row, g] = 1
    return np.hstack([ds, da, ddd])


class _Engine:
    """Vectorized one-epoch stepper over a batch of replicas."""

    def __init__(self, params: ModelParams, mode: str, dt: float, logistic: LogisticConfig | None):
        _check_mode(mode)
        dt = float(dt)
        if not np.isfinite(dt) or dt <= 0:
            raise DomainError(f"dt must be positive and finite, got {dt!r}")
        if logistic is not None and not logistic.enabled:
            logistic = None
        if logistic is not None and mode == PAPER_LITERAL:
            raise DomainError("logistic coupling needs full mode; paper_literal holds N constant")
        self.params = params
        self.mode = mode
        self.dt = dt
        self.logistic = logistic
        m = params.m
        self.m = m
        self.n_events = 8 * m if mode == FULL else 4 * m
        self.delta = _delta_tables(m, mode)
        self.gamma = params.gamma
        # activation: prob = alpha*eps_i*(gamma . a)/den * s_i * dt, with
        # den = n_total (constant modes) or the replica population (logistic)
        self.act_num = params.alpha * dt * params.eps
        self.act_const = self.act_num / params.n_total
        if mode == PAPER_LITERAL:
            c_deact = (params.phi + params.d) * dt
            self.c_withd = (params.d + params.rho) * dt
        else:
            c_deact = params.phi * dt
            self.c_withd = params.rho * dt
        # deactivate and return columns line up with the (a, dd) half of the
        # flat state, the death columns with all of it, so each is one multiply
        self.c_mid = np.concatenate([c_deact, params.delta * dt])
        self.c_death3 = np.concatenate([params.d, params.d, params.d]) * dt
        self.c_birth = params.b * dt

    def make_buffers(self, r: int) -> tuple[np.ndarray, np.ndarray]:
        """Probability and cumulative buffers for an r-replica batch.

        Constant columns (births outside the logistic coupling) are filled
        here once; fill_probabilities never touches them.
        """
        p = np.zeros((r, self.n_events))
        if self.mode == FULL and self.logistic is None:
            p[:, 7 * self.m :] = self.c_birth
        return p, np.empty_like(p)

    def fill_probabilities(self, state: np.ndarray, s: np.ndarray, a: np.ndarray, dd: np.ndarray, p: np.ndarray) -> None:
        """Write the per-event probability stack for ``state`` into ``p``.

        ``s``, ``a`` and ``dd`` must be the column views of ``state`` and
        ``p`` must come from :meth:`make_buffers` for the same batch size.
        """
        m = self.m
        w = a @ self.gamma
        if self.logistic is None:
            np.multiply(s, self.act_const, out=p[:, :m])
            p[:, :m] *= w[:, None]
            np.multiply(state[:, m:], self.c_mid, out=p[:, m : 3 * m])
            np.multiply(s, self.c_withd, out=p[:, 3 * m : 4 * m])
            if self.mode == FULL:
                np.multiply(state, self.c_death3, out=p[:, 4 * m : 7 * m])
        else:
            lg = self.logistic
            total = state.sum(axis=1).astype(float)
            den = np.where(total > 0, total, 1.0)  # rates all vanish at N = 0
            np.multiply(s, self.act_num, out=p[:, :m])
            p[:, :m] *= (w / den)[:, None]
            np.multiply(state[:, m:], self.c_mid, out=p[:, m : 3 * m])
            np.multiply(s, self.c_withd, out=p[:, 3 * m : 4 * m])
            death = (lg.growth_rate * self.dt / lg.capacity) * total
            np.multiply(state, death[:, None], out=p[:, 4 * m : 7 * m])
            p[:, 7 * m :] = ((lg.growth_rate * self.dt / m) * total)[:, None]

    def probabilities(self, s: np.ndarray, a: np.ndarray, dd: np.ndarray) -> np.ndarray:
        """Event probability stack, shape (replicas, n_events)."""
        state = np.hstack([s, a, dd])
        p, _ = self.make_buffers(state.shape[0])
        self.fill_probabilities(state, state[:, : self.m], state[:, self.m : 2 * self.m], state[:, 2 * self.m :], p)
        return p

    def step(
        self,
        state: np.ndarray,
        s: np.ndarray,
        a: np.ndarray,
        dd: np.ndarray,
        u: np.ndarray,
        t: float,
        p: np.ndarray,
        q: np.ndarray,
    ) -> None:
        """Advance every replica by one epoch in place; u is one uniform each.

        ``s``, ``a`` and ``dd`` must be the column views of ``state``;
        ``p`` and ``q`` the buffers from :meth:`make_buffers`.
        """
        self.fill_probabilities(state, s, a, dd, p)
        np.cumsum(p, axis=1, out=q)
        worst = float(q[:, -1].max())
        if worst > 1.0:
            raise StepSizeError(
                f"summed event probability {worst:.6g} > 1 at t = {t:g}; decrease dt"
            )
        idx = (q < u[:, None]).sum(axis=1)
        state += self.delta[idx]


def event_probabilities(params: ModelParams, state: DiscreteState, dt: float, mode: str) -> TransitionTable:
    """One-epoch transition table at ``state``.

    Probabilities appear in the canonical event order; no_event is the
    complement of their ordered sum.

    Raises:
        StepSizeError: if the summed event probability exceeds 1 at this
            state (dt too large).
    """
    if state.m != params.m:
        raise DomainError(f"state has {state.m} groups, params expect {params.m}")
    eng = _Engine(params, mode, dt, None)
    row = eng.probabilities(state.s[None, :], state.a[None, :], state.dd[None, :])[0]
    cum = np.cumsum(row)
    total = float(cum[-1]) if row.size else 0.0
    if total > 1.0:
        raise StepSizeError(f"summed event probability {total:.6g} > 1; decrease dt")
    events = canonical_events(params.m, mode)
    probs = {ev: float(p) for ev, p in zip(events[:-1], row)}
    probs[events[-1]] = 1.0 - total
    return TransitionTable(probabilities=probs, dt=float(dt))


def max_stable_dt(params: ModelParams, n: float, safety: float = 0.9, *, horizon: float = math.inf) -> float:
    """Largest epoch length guaranteed valid for compartment counts up to n.

    Bounds the total event rate by maximizing every channel independently
    with all compartment counts at ``n`` (full-mode channels included, so
    the bound covers both modes) and returns safety divided by the bound.
    With every rate zero the bound is vacuous and ``horizon`` is returned.
    """
    n = float(n)
    if not np.isfinite(n) or n < 1:
        raise DomainError(f"n must be at least 1, got {n!r}")
    safety = float(safety)
    if not (0 < safety <= 1):
        raise DomainError(f"safety must be in (0, 1], got {safety!r}")
    r_act = params.alpha * float(params.eps.sum()) * float(params.gamma.sum()) * n * n / params.n_total
    r_lin = n * float(
        (params.phi + params.d).sum()
        + params.delta.sum()
        + (params.rho + params.d).sum()
        + params.d.sum()
    ) + float(params.b.sum())
    r_max = r_act + r_lin
    if r_max == 0.0:
        return horizon
    return safety / r_max


@dataclass
class _RunOutput:
    traj: np.ndarray | None = None        # (replicas, samples, 3m) counts
    sums: np.ndarray | None = None        # (samples, 3m) sum over replicas
    sumsq: np.ndarray | None = None       # (samples, 3m) sum of squares
    ext_epoch: np.ndarray | None = None   # (replicas,) first epoch with no actives, -1 if none
    final: tuple[np.ndarray, np.ndarray, np.ndarray] | None = None


def _run_replicas(
    params: ModelParams,
    mode: str,
    logistic: LogisticConfig | None,
    init: DiscreteState,
    dt: float,
    n_epochs: int,
    seeds: list[int],
    *,
    stride: int = 0,
    want_traj: bool = False,
    want_moments: bool = False,
    want_extinction: bool = False,
    want_final: bool = False,
    stop_when_extinct: bool = False,
) -> _RunOutput:
    """Advance a batch of replicas; each consumes one uniform per epoch."""
    eng = _Engine(params, mode, dt, logistic)
    m = params.m
    n_rep = len(seeds)
    state = np.empty((n_rep, 3 * m), dtype=np.int64)
    state[:, :m] = init.s
    state[:, m : 2 * m] = init.a
    state[:, 2 * m :] = init.dd
    s = state[:, :m]
    a = state[:, m : 2 * m]
    dd = state[:, 2 * m :]
    gens = [np.random.Generator(np.random.PCG64(int(sd))) for sd in seeds]
    orig = np.arange(n_rep)

    out = _RunOutput()
    n_samples = (n_epochs // stride + 1) if stride else 0
    if want_traj:
        out.traj = np.empty((n_rep, n_samples, 3 * m), dtype=np.int64)
        out.traj[:, 0] = state
    if want_moments:
        out.sums = np.zeros((n_samples, 3 * m))
        out.sumsq = np.zeros((n_samples, 3 * m))
        _accumulate_moments(out, 0, state)
    if want_extinction:
        out.ext_epoch = np.full(n_rep, -1, dtype=np.int64)
        out.ext_epoch[a.sum(axis=1) == 0] = 0

    block_cap = max(64, min(_BLOCK_EPOCH_CAP, _UNIFORM_BUDGET // max(n_rep, 1)))
    epoch = 0
    p_buf, q_buf = eng.make_buffers(n_rep)
    while epoch < n_epochs and len(gens) > 0:
        block = min(block_cap, n_epochs - epoch)
        uniforms = np.empty((len(gens), block))
        for i, g in enumerate(gens):
            uniforms[i] = g.random(block)
        for j in range(block):
            eng.step(state, s, a, dd, uniforms[:, j], epoch * dt, p_buf, q_buf)
            epoch += 1
            if want_extinction:
                fresh = (a.sum(axis=1) == 0) & (out.ext_epoch[orig] < 0)
                if fresh.any():
                    out.ext_epoch[orig[fresh]] = epoch
            if stride and epoch % stride == 0:
                t_idx = epoch // stride
                if want_traj:
                    out.traj[:, t_idx] = state
                if want_moments:
                    _accumulate_moments(out, t_idx, state)
        if stop_when_extinct:
            live = out.ext_epoch[orig] < 0
            if not live.all():
                state = np.ascontiguousarray(state[live])
                s = state[:, :m]
                a = state[:, m : 2 * m]
                dd = state[:, 2 * m :]
                orig = orig[live]
                gens = [g for g, keep in zip(gens, live) if keep]
                p_buf, q_buf = eng.make_buffers(len(gens))
    if want_final:
        out.final = (s.copy(), a.copy(), dd.copy())
    return out


def _accumulate_moments(out: _RunOutput, t_idx: int, state: np.ndarray) -> None:
    # counts are integers, so these float sums are exact and independent of
    # summation order (well inside 2**53)
    out.sums[t_idx] += state.sum(axis=0)
    out.sumsq[t_idx] += np.square(state).sum(axis=0)


def _resolve_threads(threads: int | None) -> int:
    if threads is None:
        env = os.environ.get("DIFFUSION_THREADS")
        if env is None or env.strip() == "":
            threads = 0
        else:
            try:
                threads = int(env)
            except ValueError:
                raise ConfigError(f"DIFFUSION_THREADS must be an integer, got {env!r}") from None
    threads = int(threads)
    if threads < 0:
        raise DomainError(f"thread count must be nonnegative, got {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def _map_chunks(fn, n_chunks: int, threads: int) -> list:
    if threads <= 1 or n_chunks <= 1:
        return [fn(i) for i in range(n_chunks)]
    with ThreadPoolExecutor(max_workers=min(threads, n_chunks)) as ex:
        return list(ex.map(fn, range(n_chunks)))


def _epochs_and_stride(dt: float, horizon: float, sample_every: float | None) -> tuple[int, int]:
    dt = float(dt)
    horizon = float(horizon)
    if not np.isfinite(dt) or dt <= 0:
        raise DomainError(f"dt must be positive and finite, got {dt!r}")
    if not np.isfinite(horizon) or horizon < 0:
        raise DomainError(f"horizon must be nonnegative and finite, got {horizon!r}")
    n_epochs = int(np.floor(horizon / dt + 1e-9))
    if sample_every is None:
        stride = 1
    else:
        stride = _multiple_of(float(sample_every), dt, "sample_every/dt")
    return n_epochs, stride


def _validate_chain_inputs(
    params: ModelParams, init: DiscreteState, mode: str, logistic: LogisticConfig | None
) -> None:
    _check_mode(mode)
    if init.m != params.m:
        raise DomainError(f"init has {init.m} groups, params expect {params.m}")
    if mode == PAPER_LITERAL and abs(init.total() - params.n_total) > 1e-9:
        raise DomainError(
            f"paper_literal mode keeps the population constant: initial total "
            f"{init.total()} must equal n_total {params.n_total:g}"
        )


def simulate_replica(
    params: ModelParams,
    init: DiscreteState,
    dt: float,
    horizon: float,
    mode: str = FULL,
    seed: int = 0,
    *,
    sample_every: float | None = None,
    logistic: LogisticConfig | None = None,
) -> TrajectoryTable:
    """One chain trajectory, bit-reproducible from ``seed``.

    Records the state every ``sample_every`` time units (every epoch when
    None). The same inputs give the same trajectory on every run. The
    seed is used as given, so replica r of an ensemble run with master
    seed s is reproduced by ``seed=derive_replica_seed(s, r)``.
    """
    _validate_chain_inputs(params, init, mode, logistic)
    n_epochs, stride = _epochs_and_stride(dt, horizon, sample_every)
    out = _run_replicas(
        params, mode, logistic, init, dt, n_epochs, [int(seed)],
        stride=stride, want_traj=True,
    )
    m = params.m
    tr = out.traj[0].astype(float)
    n_samples = tr.shape[0]
    times = np.arange(n_samples) * (stride * dt)
    return TrajectoryTable(times=times, s=tr[:, :m], a=tr[:, m : 2 * m], dd=tr[:, 2 * m :])


def _replica_chunks(n_replicas: int) -> list[tuple[int, int]]:
    return [(lo, min(lo + _CHUNK_REPLICAS, n_replicas)) for lo in range(0, n_replicas, _CHUNK_REPLICAS)]


def monte_carlo_mean(
    params: ModelParams,
    init: DiscreteState,
    dt: float,
    horizon: float,
    mode: str = FULL,
    n_replicas: int = 100,
    seed: int = 0,
    *,
    sample_every: float | None = None,
    logistic: LogisticConfig | None = None,
    threads: int | None = None,
) -> TrajectoryTable:
    """Mean trajectory over independent replicas, with sample spread.

    Replica r uses the generator seeded by derive_replica_seed(seed, r);
    the result is identical to averaging ``simulate_replica`` over those
    seeds, and does not depend on the thread count. Spread is the sample
    standard deviation (ddof 1; all zeros when n_replicas is 1).
    """
    if n_replicas < 1:
        raise DomainError(f"n_replicas must be at least 1, got {n_replicas}")
    _validate_chain_inputs(params, init, mode, logistic)
    n_epochs, stride = _epochs_and_stride(dt, horizon, sample_every)
    threads = _resolve_threads(threads)
    chunks = _replica_chunks(n_replicas)

    def run(ci: int) -> _RunOutput:
        lo, hi = chunks[ci]
        seeds = [derive_replica_seed(seed, r) for r in range(lo, hi)]
        return _run_replicas(
            params, mode, logistic, init, dt, n_epochs, seeds,
            stride=stride, want_moments=True,
        )

    results = _map_chunks(run, len(chunks), threads)
    sums = results[0].sums
    sumsq = results[0].sumsq
    for res in results[1:]:
        sums = sums + res.sums
        sumsq = sumsq + res.sumsq
    n = float(n_replicas)
    mean = sums / n
    if n_replicas == 1:
        sd = np.zeros_like(mean)
    else:
        var = (sumsq - n * mean * mean) / (n - 1.0)
        sd = np.sqrt(np.maximum(var, 0.0))
    m = params.m
    n_samples = mean.shape[0]
    times = np.arange(n_samples) * (stride * dt)
    return TrajectoryTable(
        times=times,
        s=mean[:, :m],
        a=mean[:, m : 2 * m],
        dd=mean[:, 2 * m :],
        sd_s=sd[:, :m],
        sd_a=sd[:, m : 2 * m],
        sd_dd=sd[:, 2 * m :],
    )


@dataclass(frozen=True, eq=False)
class ExtinctionSummary:
    """Per-replica extinction times plus their mean and spread.

    ``times`` holds the first time with no actives anywhere, NaN for
    replicas still active at the horizon (censored). ``mean``/``spread``
    cover uncensored replicas only; both are None when every replica was
    censored.
    """

    times: np.ndarray
    mean: float | None
    spread: float | None
    n_censored: int
    horizon: float
    dt: float


def extinction_time_stochastic(
    params: ModelParams,
    init: DiscreteState,
    dt: float,
    horizon: float,
    mode: str = FULL,
    n_replicas: int = 100,
    seed: int = 0,
    *,
    logistic: LogisticConfig | None = None,
    threads: int | None = None,
) -> ExtinctionSummary:
    """First-passage times to a state with no actives, over an ensemble.

    Uses the same per-replica seed derivation as :func:`monte_carlo_mean`,
    so replica r sees the same chain prefix in both drivers.
    """
    if n_replicas < 1:
        raise DomainError(f"n_replicas must be at least 1, got {n_replicas}")
    _validate_chain_inputs(params, init, mode, logistic)
    n_epochs, _ = _epochs_and_stride(dt, horizon, None)
    threads = _resolve_threads(threads)
    chunks = _replica_chunks(n_replicas)

    def run(ci: int) -> _RunOutput:
        lo, hi = chunks[ci]
        seeds = [derive_replica_seed(seed, r) for r in range(lo, hi)]
        return _run_replicas(
            params, mode, logistic, init, dt, n_epochs, seeds,
            want_extinction=True, stop_when_extinct=True,
        )

    results = _map_chunks(run, len(chunks), threads)
    epochs = np.concatenate([res.ext_epoch for res in results])
    times = np.where(epochs >= 0, epochs * dt, np.nan)
    done = times[np.isfinite(times)]
    n_censored = int(n_replicas - done.size)
    if done.size == 0:
        mean = spread = None
    else:
        mean = float(done.mean())
        spread = float(done.std(ddof=1)) if done.size > 1 else 0.0
    return ExtinctionSummary(
        times=times, mean=mean, spread=spread,
        n_censored=n_censored, horizon=float(horizon), dt=float(dt),
    )


@dataclass(frozen=True, eq=False)
class ExactPropagation:
    """Exact law of the single-group constant-population chain.

    ``states`` lists (s, a) pairs in lexicographic order (d is the
    remainder); ``final_p`` is the probability vector after the last
    step; ``e_s``/``e_a``/``e_d`` are expected counts per step and
    ``mass`` the total probability per step.
    """

    states: np.ndarray
    times: np.ndarray
    e_s: np.ndarray
    e_a: np.ndarray
    e_d: np.ndarray
    mass: np.ndarray
    final_p: np.ndarray


def exact_propagation(params: ModelParams, init: DiscreteState, dt: float, n_steps: int) -> ExactPropagation:
    """Propagate the full state distribution of the m = 1 chain exactly.

    Builds the sparse one-epoch kernel (at most 5 nonzeros per column)
    from :func:`event_probabilities` over every reachable state
    {(s, a): s + a <= N} and applies it ``n_steps`` times to a point mass
    at ``init``. Runs in paper_literal mode (constant N).

    Raises:
        NumericError: if the probability mass drifts from 1 by more than
            1e-12 at any step.
    """
    if params.m != 1:
        raise DomainError(f"exact propagation supports m = 1 only, got m = {params.m}")
    _validate_chain_inputs(params, init, PAPER_LITERAL, None)
    if n_steps < 0:
        raise DomainError(f"n_steps must be nonnegative, got {n_steps}")
    n = init.total()

    # lexicographic (s, a) enumeration of {(s, a): s + a <= N}
    states = np.array([(s, a) for s in range(n + 1) for a in range(n + 1 - s)], dtype=np.int64)
    index = {(int(s), int(a)): i for i, (s, a) in enumerate(states)}

    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for col, (s0, a0) in enumerate(states):
        st = DiscreteState(s=[int(s0)], a=[int(a0)], dd=[int(n - s0 - a0)])
        table = event_probabilities(params, st, dt, PAPER_LITERAL)
        stay = 0.0
        for ev, p in table.probabilities.items():
            if ev.kind == "no_event":
                stay += p
                continue
            if p == 0.0:
                continue
            if ev.kind == "activate":
                dest = (int(s0) - 1, int(a0) + 1)
            elif ev.kind == "deactivate":
                dest = (int(s0), int(a0) - 1)
            elif ev.kind == "return":
                dest = (int(s0) + 1, int(a0))
            else:  # withdraw
                dest = (int(s0) - 1, int(a0))
            rows.append(index[dest])
            cols.append(col)
            vals.append(p)
        rows.append(col)
        cols.append(col)
        vals.append(stay)
    kernel = scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(states.shape[0], states.shape[0])
    )

    p = np.zeros(states.shape[0])
    p[index[(int(init.s[0]), int(init.a[0]))]] = 1.0
    s_vals = states[:, 0].astype(float)
    a_vals = states[:, 1].astype(float)
    e_s = np.empty(n_steps + 1)
    e_a = np.empty(n_steps + 1)
    mass = np.empty(n_steps + 1)
    for step in range(n_steps + 1):
        if step > 0:
            p = kernel @ p
        mass[step] = p.sum()
        if abs(mass[step] - 1.0) > 1e-12:
            raise NumericError(
                f"probability mass drifted to {mass[step]!r} at step {step}"
            )
        e_s[step] = s_vals @ p
        e_a[step] = a_vals @ p
    e_d = n - e_s - e_a
    times = np.arange(n_steps + 1) * dt
    return ExactPropagation(
        states=states, times=times, e_s=e_s, e_a=e_a, e_d=e_d, mass=mass, final_p=p
    )

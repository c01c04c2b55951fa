"""Closed-form dynamics of single-qubit spiking neurons and their classical
leaky integrate-and-fire reference.

The quantum neuron keeps its excited-state population ``alpha`` in [0, 1] as
the analogue of a membrane potential.  An input spike applies an X-rotation
of angle ``theta`` on top of a memory rotation that reinstates the previous
population; the absence of a spike lets the population relax for a delay
``tau`` governed by the relaxation constant ``t1``.  Crossing the firing
threshold emits a binary spike and resets the population to the ground
state.

Every kernel in this module is a pure function over numpy arrays (scalars
included) and is safe to evaluate elementwise in parallel.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "DecayMode",
    "QlifConfig",
    "QlifState",
    "QlifInput",
    "LifConfig",
    "LifState",
    "memory_angle",
    "decay_angle",
    "qlif_step",
    "qlif_step_backward",
    "lif_step",
    "run_qlif_trace",
    "run_lif_trace",
    "NeuronTrace",
    "write_trace_csv",
    "write_trace_json",
]

# Absolute slack accepted on population domain checks; anything further out
# signals corrupted upstream state rather than float drift.
DOMAIN_TOLERANCE = 1e-12


class DecayMode(str, Enum):
    """How the no-spike relaxation acts on the population.

    ROTATION realizes the decay as a counter-rotation gate compacted with the
    memory gate, which is the closed form the two-gate circuit implements.
    EXPONENTIAL applies pure exponential population decay, i.e. the
    amplitude-damping channel.  The two are not algebraically equal; see
    ``qlif_step``.
    """

    ROTATION = "rotation"
    EXPONENTIAL = "exponential"


@dataclass(frozen=True)
class QlifConfig:
    """Static parameters of a quantum spiking neuron."""

    threshold: float = 0.5
    t1: float = 1.0
    decay_mode: DecayMode = DecayMode.ROTATION
    epsilon: float = 1e-6

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if not self.t1 > 0.0:
            raise ValueError(f"t1 must be positive, got {self.t1}")
        if not 0.0 < self.epsilon < 1e-3:
            raise ValueError(f"epsilon must lie in (0, 1e-3), got {self.epsilon}")
        # Accept plain strings for convenience at the CLI/service boundary.
        if not isinstance(self.decay_mode, DecayMode):
            object.__setattr__(self, "decay_mode", DecayMode(self.decay_mode))


@dataclass
class QlifState:
    """Mutable per-neuron state: the stored excited-state population."""

    alpha: float = 0.0


@dataclass(frozen=True)
class QlifInput:
    """One timestep of drive: binary spike flag, rotation angle, delay."""

    x: int
    theta: float
    tau: float

    def __post_init__(self):
        if self.x not in (0, 1):
            raise ValueError(f"x must be 0 or 1, got {self.x}")
        if self.tau < 0:
            raise ValueError(f"tau must be non-negative, got {self.tau}")


@dataclass(frozen=True)
class LifConfig:
    """Classical leaky integrate-and-fire parameters."""

    beta: float
    u_thr: float

    def __post_init__(self):
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")


@dataclass
class LifState:
    """Membrane potential plus the previous output spike (drives the reset)."""

    u: float = 0.0
    s_prev: int = 0


def _checked_population(alpha, name="alpha"):
    a = np.asarray(alpha, dtype=np.float64)
    if np.any(a < -DOMAIN_TOLERANCE) or np.any(a > 1.0 + DOMAIN_TOLERANCE):
        bad = a[(a < -DOMAIN_TOLERANCE) | (a > 1.0 + DOMAIN_TOLERANCE)]
        raise ValueError(
            f"{name} outside [0, 1] beyond tolerance {DOMAIN_TOLERANCE:g}: "
            f"{np.ravel(bad)[:4]}"
        )
    return np.clip(a, 0.0, 1.0)


def memory_angle(alpha):
    """Rotation angle that reinstates a measured population ``alpha``.

    Returns ``2 * arcsin(sqrt(alpha))``, in [0, pi].  Raises ValueError for
    populations outside [0, 1] beyond a 1e-12 slack.
    """
    a = _checked_population(alpha)
    return 2.0 * np.arcsin(np.sqrt(a))


def decay_angle(alpha, tau, t1):
    """Counter-rotation angle for relaxation over a delay ``tau``.

    Returns ``-2 * arcsin(sqrt(alpha * exp(-tau / t1)))``, in [-pi, 0].
    """
    a = _checked_population(alpha)
    tau = np.asarray(tau, dtype=np.float64)
    if np.any(tau < 0):
        raise ValueError("tau must be non-negative")
    if not t1 > 0:
        raise ValueError("t1 must be positive")
    return -2.0 * np.arcsin(np.sqrt(a * np.exp(-tau / t1)))


def qlif_step(alpha, x, theta, tau, cfg: QlifConfig):
    """Advance quantum neurons one timestep.

    All array arguments broadcast together; scalars work too.

    On a spike (``x == 1``) the new population is ``sin^2((theta + phi) / 2)``
    with ``phi`` the memory angle of the current population; the delay plays
    no role.  Without a spike the population relaxes, either through the
    compacted counter-rotation ``sin^2((gamma + phi) / 2)`` (ROTATION mode)
    or through plain exponential decay ``alpha * exp(-tau / t1)``
    (EXPONENTIAL mode).  The two relaxation laws genuinely differ: from
    alpha = 0.5 with tau/t1 = ln 2, ROTATION yields (2 - sqrt(3))/4 while
    EXPONENTIAL yields 0.25.

    A spike is emitted iff the new population strictly exceeds the firing
    threshold, in which case the stored population resets to the ground
    state.

    Returns ``(alpha_new, spike, alpha_pre_reset)`` where ``alpha_pre_reset``
    is the population before the fire-and-reset rule is applied (recorded by
    forward traces for training).
    """
    a = _checked_population(alpha)
    x = np.asarray(x, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    # Negative delays are unphysical; learned aggregates are clamped here.
    tau = np.maximum(np.asarray(tau, dtype=np.float64), 0.0)

    phi = 2.0 * np.arcsin(np.sqrt(a))
    spiked_pop = np.sin((theta + phi) / 2.0) ** 2
    if cfg.decay_mode is DecayMode.ROTATION:
        gamma = -2.0 * np.arcsin(np.sqrt(a * np.exp(-tau / cfg.t1)))
        # sin^2 is even, so the sign of the (x - 1) branch factor is
        # immaterial.
        decayed_pop = np.sin((gamma + phi) / 2.0) ** 2
    else:
        decayed_pop = a * np.exp(-tau / cfg.t1)

    spike_mask = x == 1.0
    alpha_pre = np.where(spike_mask, spiked_pop, decayed_pop)
    # Absorb float drift at the boundaries so arcsin stays in domain.
    alpha_pre = np.clip(alpha_pre, 0.0, 1.0)

    spike = (alpha_pre > cfg.threshold).astype(np.float64)
    alpha_new = np.where(spike == 1.0, 0.0, alpha_pre)
    return alpha_new, spike, alpha_pre


def qlif_step_backward(alpha, x, theta, tau, cfg: QlifConfig):
    """Analytic partials of the pre-reset population ``alpha'``.

    Returns ``(d_alpha, d_theta, d_tau)``, the derivatives of ``alpha'``
    with respect to the incoming population, the rotation angle and the
    delay, for the branch selected by ``x``.  Broadcasts like ``qlif_step``.

    The arcsin chain has square-root singularities at populations 0 and 1;
    the populations inside those denominators are clamped to
    ``[epsilon, 1 - epsilon]``.  The delay clamp ``max(tau, 0)`` passes
    gradient only where the pre-clamp delay is positive.
    """
    a = _checked_population(alpha)
    x = np.asarray(x, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    tau_raw = np.asarray(tau, dtype=np.float64)
    tau_pos = np.maximum(tau_raw, 0.0)
    eps = cfg.epsilon

    a_safe = np.clip(a, eps, 1.0 - eps)
    phi = 2.0 * np.arcsin(np.sqrt(a))
    dphi_da = 1.0 / np.sqrt(a_safe * (1.0 - a_safe))

    # Spike branch: alpha' = sin^2((theta + phi)/2).
    half_sin = 0.5 * np.sin(theta + phi)
    spike_d_theta = half_sin
    spike_d_alpha = half_sin * dphi_da

    k = np.exp(-tau_pos / cfg.t1)
    tau_gate = (tau_raw > 0.0).astype(np.float64)
    if cfg.decay_mode is DecayMode.ROTATION:
        # alpha' = sin^2(A), A = arcsin(sqrt(a)) - arcsin(sqrt(a*k)).
        ak = np.clip(a * k, 0.0, 1.0)
        ak_safe = np.clip(ak, eps, 1.0 - eps)
        A = np.arcsin(np.sqrt(a)) - np.arcsin(np.sqrt(ak))
        sin_2A = np.sin(2.0 * A)
        decay_d_alpha = sin_2A * (
            0.5 / np.sqrt(a_safe * (1.0 - a_safe))
            - 0.5 * k / np.sqrt(ak_safe * (1.0 - ak_safe))
        )
        decay_d_tau = sin_2A * np.sqrt(ak) / (2.0 * cfg.t1 * np.sqrt(1.0 - ak_safe)) * tau_gate
    else:
        decay_d_alpha = k
        decay_d_tau = -(a / cfg.t1) * k * tau_gate

    spike_mask = x == 1.0
    d_alpha = np.where(spike_mask, spike_d_alpha, decay_d_alpha)
    d_theta = np.where(spike_mask, spike_d_theta, 0.0)
    d_tau = np.where(spike_mask, 0.0, decay_d_tau)
    return d_alpha, d_theta, d_tau


def lif_step(u, s_prev, x, w, cfg: LifConfig):
    """Advance classical LIF neurons one timestep.

    ``u' = beta * u + w * x - s_prev * u_thr`` (decay + input + subtraction
    reset); a spike is emitted iff ``u'`` strictly exceeds ``u_thr``.
    Returns ``(u_new, spike)``.
    """
    u = np.asarray(u, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    s_prev = np.asarray(s_prev, dtype=np.float64)
    u_new = cfg.beta * u + w * x - s_prev * cfg.u_thr
    spike = (u_new > cfg.u_thr).astype(np.float64)
    return u_new, spike


@dataclass
class NeuronTrace:
    """Per-timestep record of a single neuron run.

    ``value`` holds the pre-reset population for the quantum neuron or the
    membrane potential for the classical one.
    """

    t: np.ndarray
    x: np.ndarray
    value: np.ndarray
    spike: np.ndarray
    kind: str = "qlif"

    def __len__(self):
        return len(self.t)

    def records(self):
        """Rows of (t, x, alpha_pre_reset, spike) as plain Python values."""
        return [
            {
                "t": int(t),
                "x": int(x),
                "alpha_pre_reset": float(v),
                "spike": int(s),
            }
            for t, x, v, s in zip(self.t, self.x, self.value, self.spike)
        ]


def run_qlif_trace(xs, thetas, taus, cfg: QlifConfig) -> NeuronTrace:
    """Run one quantum neuron over a spike train from the ground state.

    ``thetas`` and ``taus`` may be scalars (held fixed) or per-step arrays.
    """
    xs = np.asarray(xs, dtype=np.float64)
    n = len(xs)
    thetas = np.broadcast_to(np.asarray(thetas, dtype=np.float64), (n,))
    taus = np.broadcast_to(np.asarray(taus, dtype=np.float64), (n,))
    values = np.zeros(n)
    spikes = np.zeros(n)
    alpha = 0.0
    for t in range(n):
        alpha, spike, pre = qlif_step(alpha, xs[t], thetas[t], taus[t], cfg)
        values[t] = pre
        spikes[t] = spike
    return NeuronTrace(np.arange(n), xs.astype(int), values, spikes.astype(int))


def run_lif_trace(xs, ws, cfg: LifConfig) -> NeuronTrace:
    """Run one classical LIF neuron over a spike train from rest."""
    xs = np.asarray(xs, dtype=np.float64)
    n = len(xs)
    ws = np.broadcast_to(np.asarray(ws, dtype=np.float64), (n,))
    values = np.zeros(n)
    spikes = np.zeros(n)
    u, s_prev = 0.0, 0.0
    for t in range(n):
        u, spike = lif_step(u, s_prev, xs[t], ws[t], cfg)
        values[t] = u
        spikes[t] = spike
        s_prev = spike
    return NeuronTrace(np.arange(n), xs.astype(int), values, spikes.astype(int), kind="lif")


def write_trace_csv(path, trace: NeuronTrace):
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=["t", "x", "alpha_pre_reset", "spike"])
        writer.writeheader()
        writer.writerows(trace.records())


def write_trace_json(path, trace: NeuronTrace):
    with open(path, "w") as fh:
        json.dump(trace.records(), fh, indent=2)
        fh.write("\n")

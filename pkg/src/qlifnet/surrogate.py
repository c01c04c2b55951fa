"""Arctan surrogate for the spike step function.

The hard spike is a step in the population and blocks gradients entirely
(the dead-neuron problem).  The backward pass substitutes
``(1/pi) / (1 + (alpha*pi)^2)`` for d(spike)/d(alpha).  ``soft_spike`` is
the antiderivative of that substitute; running the network on soft spike
values makes the surrogate the true derivative of the forward map, which is
what makes finite-difference gradient checks well-posed.
"""

from __future__ import annotations

import numpy as np

__all__ = ["surrogate_grad", "soft_spike", "soft_spike_centered"]

_PI2 = np.pi * np.pi


def surrogate_grad(alpha):
    """Surrogate d(spike)/d(population): ``(1/pi) / (1 + (alpha*pi)^2)``."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return (1.0 / np.pi) / (1.0 + (alpha * np.pi) ** 2)


def soft_spike(alpha):
    """Antiderivative of ``surrogate_grad``: ``arctan(pi*alpha) / pi^2``."""
    alpha = np.asarray(alpha, dtype=np.float64)
    return np.arctan(np.pi * alpha) / _PI2


def soft_spike_centered(x):
    """Soft spike centered at zero crossing, for membrane-potential neurons.

    ``0.5 + arctan(pi*x) / pi^2`` where ``x = u - u_thr``; its derivative is
    ``surrogate_grad(x)``.
    """
    x = np.asarray(x, dtype=np.float64)
    return 0.5 + np.arctan(np.pi * x) / _PI2

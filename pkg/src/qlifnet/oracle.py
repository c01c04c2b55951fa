"""Exact single-qubit density-matrix simulator.

Serves as the independent oracle for the closed-form neuron kernel: each
neuron update is replayed as an explicit 2x2 quantum operation (rotation
gates and the amplitude-damping channel) and the excited-state populations
are compared.  Deliberately framework-free dense complex arithmetic so the
oracle stays auditable and shares no code with the kernel under test.
"""

from __future__ import annotations

import numpy as np

from .neuron import DecayMode, QlifConfig, memory_angle, qlif_step

__all__ = [
    "ground_state",
    "density_matrix_from_population",
    "check_density_matrix",
    "apply_rx",
    "amplitude_damp",
    "excited_population",
    "verify_step",
    "verify_battery",
]

HERMITICITY_TOL = 1e-12


def ground_state() -> np.ndarray:
    """|0><0| as a 2x2 complex density matrix."""
    rho = np.zeros((2, 2), dtype=np.complex128)
    rho[0, 0] = 1.0
    return rho


def density_matrix_from_population(alpha: float) -> np.ndarray:
    """State of excited population ``alpha`` prepared by a single rotation.

    Built as R_X(memory_angle(alpha)) |0><0| R_X(...)^dagger, i.e. exactly
    the reinstatement the compact circuit performs.
    """
    return apply_rx(ground_state(), memory_angle(alpha))


def check_density_matrix(rho: np.ndarray, tol: float = HERMITICITY_TOL):
    """Raise if ``rho`` is not Hermitian, unit-trace, positive semidefinite."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValueError(f"expected 2x2 matrix, got shape {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho)}, expected 1")
    eigvals = np.linalg.eigvalsh(rho)
    if np.min(eigvals) < -tol:
        raise ValueError(f"density matrix has negative eigenvalue {np.min(eigvals)}")


def _rx_unitary(angle: float) -> np.ndarray:
    c = np.cos(angle / 2.0)
    s = -1j * np.sin(angle / 2.0)
    return np.array([[c, s], [s, c]], dtype=np.complex128)


def apply_rx(rho: np.ndarray, angle: float) -> np.ndarray:
    """Conjugate ``rho`` by the X-rotation of the given angle."""
    u = _rx_unitary(angle)
    return u @ rho @ u.conj().T


def amplitude_damp(rho: np.ndarray, tau: float, t1: float) -> np.ndarray:
    """Relaxation channel for an idle period ``tau`` with time constant ``t1``.

    Kraus channel with decay probability ``p = 1 - exp(-tau/t1)``: the
    excited population shrinks by ``exp(-tau/t1)`` and coherences by
    ``sqrt(1 - p)``.
    """
    if tau < 0:
        raise ValueError("tau must be non-negative")
    if not t1 > 0:
        raise ValueError("t1 must be positive")
    p = 1.0 - np.exp(-tau / t1)
    k0 = np.array([[1.0, 0.0], [0.0, np.sqrt(1.0 - p)]], dtype=np.complex128)
    k1 = np.array([[0.0, np.sqrt(p)], [0.0, 0.0]], dtype=np.complex128)
    return k0 @ rho @ k0.conj().T + k1 @ rho @ k1.conj().T


def excited_population(rho: np.ndarray) -> float:
    """<1| rho |1> as a real number."""
    return float(rho[1, 1].real)


def verify_step(alpha: float, x: int, theta: float, tau: float, cfg: QlifConfig) -> float:
    """Residual between the closed-form update and the explicit circuit.

    Reinstates ``alpha`` on |0><0| with a memory rotation, then applies the
    spike rotation (``x = 1``) or the relaxation step (``x = 0``) as actual
    matrix operations, and returns ``|population - kernel alpha'|``.  In
    ROTATION mode the relaxation is replayed as the literal counter-rotation
    gate; in EXPONENTIAL mode as the amplitude-damping channel.
    """
    rho = density_matrix_from_population(alpha)
    if x == 1:
        rho = apply_rx(rho, theta)
    elif cfg.decay_mode is DecayMode.ROTATION:
        gamma = -2.0 * np.arcsin(np.sqrt(alpha * np.exp(-tau / cfg.t1)))
        rho = apply_rx(rho, gamma)
    else:
        rho = amplitude_damp(rho, tau, cfg.t1)
    check_density_matrix(rho)
    _, _, alpha_pre = qlif_step(alpha, x, theta, tau, cfg)
    return abs(excited_population(rho) - float(alpha_pre))


def verify_battery(samples: int, seed: int, t1: float = 1.0, threshold: float = 0.5):
    """Random residual sweeps for the spike branch and both decay modes.

    Returns a list of summary dicts with keys ``branch``, ``mode``,
    ``samples``, ``max_residual``, ``mean_residual``.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    cfg_rotation = QlifConfig(threshold=threshold, t1=t1, decay_mode=DecayMode.ROTATION)
    cfg_exponential = QlifConfig(threshold=threshold, t1=t1, decay_mode=DecayMode.EXPONENTIAL)

    rows = []

    # Spike branch: both modes share it, so one sweep covers them.
    residuals = np.empty(samples)
    for i in range(samples):
        alpha = rng.uniform(0.0, 1.0)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        residuals[i] = verify_step(alpha, 1, theta, 0.0, cfg_rotation)
    rows.append(_summary("spike", "both", residuals))

    for mode, cfg in (("rotation", cfg_rotation), ("exponential", cfg_exponential)):
        residuals = np.empty(samples)
        for i in range(samples):
            alpha = rng.uniform(0.0, 1.0)
            tau = rng.uniform(0.0, 5.0 * t1)
            residuals[i] = verify_step(alpha, 0, 0.0, tau, cfg)
        rows.append(_summary("no-spike", mode, residuals))
    return rows


def _summary(branch, mode, residuals):
    return {
        "branch": branch,
        "mode": mode,
        "samples": int(len(residuals)),
        "max_residual": float(np.max(residuals)),
        "mean_residual": float(np.mean(residuals)),
    }

"""Dense complex linear-algebra and integration kernel for small level systems.

Everything here operates on plain ``numpy`` arrays of shape ``(d, d)`` with
``d`` between 2 and 8.  Hermitian and unitary properties are enforced by the
explicit check helpers rather than by a wrapper type; callers validate at the
boundaries where the tags matter.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-9


@dataclass(frozen=True)
class TimeGrid:
    """Uniform time grid, in units of 1/omega_bar."""

    t_start: float
    t_end: float
    steps: int

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"t_end={self.t_end} must exceed t_start={self.t_start}")
        if self.steps < 2:
            raise ValueError(f"steps={self.steps} must be >= 2")

    @property
    def h(self) -> float:
        return (self.t_end - self.t_start) / self.steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(self.t_start, self.t_end, self.steps + 1)


def hermiticity_defect(M: np.ndarray) -> float:
    """max |M - M^dagger| over entries."""
    return float(np.abs(M - M.conj().T).max())


def unitarity_defect(M: np.ndarray) -> float:
    """max |M^dagger M - I| over entries."""
    d = M.shape[-1]
    return float(np.abs(M.conj().T @ M - np.eye(d)).max())


def is_hermitian(M: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_defect(M) < tol


def is_unitary(M: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    return unitarity_defect(M) < tol


def expm_hermitian(H: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i*H*dt) for Hermitian H, via eigendecomposition.

    Rejects non-Hermitian input (beyond HERMITIAN_TOL scaled by the matrix
    magnitude) with the measured defect in the message.
    """
    scale = max(1.0, float(np.abs(H).max()))
    defect = hermiticity_defect(H)
    if defect > HERMITIAN_TOL * scale:
        raise ValueError(
            f"expm_hermitian: input not Hermitian, defect {defect:.3e} "
            f"(tolerance {HERMITIAN_TOL * scale:.3e})"
        )
    w, V = np.linalg.eigh(H)
    return (V * np.exp(-1j * w * dt)) @ V.conj().T


def expm_hermitian_batch(H: np.ndarray, dt: float) -> np.ndarray:
    """Batched exp(-i*H_k*dt) for a stack of Hermitian matrices (n, d, d)."""
    w, V = np.linalg.eigh(H)
    phases = np.exp(-1j * w * dt)
    return np.einsum("nij,nj,nkj->nik", V, phases, V.conj())


def rk4_propagate(
    deriv: Callable[[float, np.ndarray], np.ndarray],
    y0: np.ndarray,
    grid: TimeGrid,
) -> np.ndarray:
    """Classical fixed-step RK4 for dy/dt = deriv(t, y); returns y(t_end).

    Aborts with the failing step index if the state goes non-finite.
    """
    y = np.array(y0, dtype=complex)
    h = grid.h
    t = grid.t_start
    for k in range(grid.steps):
        k1 = deriv(t, y)
        k2 = deriv(t + h / 2, y + (h / 2) * k1)
        k3 = deriv(t + h / 2, y + (h / 2) * k2)
        k4 = deriv(t + h, y + h * k3)
        y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise RuntimeError(f"rk4_propagate: non-finite state at step {k}")
        t += h
    return y


def rk4_step_nodes(y: np.ndarray, A0: np.ndarray, A1: np.ndarray, A2: np.ndarray, h: float) -> np.ndarray:
    """One RK4 step of dy/dt = A(t) @ y with A sampled at t, t+h/2, t+h.

    Used by the propagation engines, which precompute generator samples on
    the half-step lattice for speed; equivalent to rk4_propagate on a linear
    right-hand side.
    """
    k1 = A0 @ y
    k2 = A1 @ (y + (h / 2) * k1)
    k3 = A1 @ (y + (h / 2) * k2)
    k4 = A2 @ (y + h * k3)
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def quad_trapz(samples: np.ndarray, grid: TimeGrid) -> float:
    """Trapezoidal integral of uniformly sampled values over the grid."""
    f = np.asarray(samples, dtype=float)
    if f.shape != (grid.steps + 1,):
        raise ValueError(f"expected {grid.steps + 1} samples, got {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ValueError("quad_trapz: non-finite samples")
    return float(grid.h * (0.5 * f[0] + f[1:-1].sum() + 0.5 * f[-1]))

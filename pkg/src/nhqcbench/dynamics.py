"""Propagation engines with trajectory capture.

Two independent numerical routes are maintained everywhere:

* the production path: fixed-step RK4 on dU/dt = -iH(t)U (or the Lindblad
  right-hand side), with generator samples precomputed on the half-step
  lattice;
* the oracle path: time-ordered products of exact slice exponentials
  (eigendecomposition for unitary slices, a fourth-order commutator-free
  Magnus product of superoperator exponentials for open slices).

Golden values are produced by the oracle path; tests hold the two routes
together.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .numkit import expm_hermitian_batch, rk4_step_nodes
from .system import (
    ErrorModel,
    LevelSystem,
    PulseSchedule,
    hamiltonian_nodes,
    segment_hamiltonian_nodes,
)

UNITARY_SAMPLES = 2000
LINDBLAD_SAMPLES = 4000
ORACLE_SLICES = 100_000
ORACLE_LINDBLAD_SLICES = 4000

TRACE_TOL = 1e-8
POSITIVITY_TOL = -1e-9
UNITARITY_DRIFT_TOL = 1e-8


def default_samples(kind: str) -> int:
    """Default integrator step counts; NHQC_SAMPLES overrides both."""
    env = os.environ.get("NHQC_SAMPLES")
    if env:
        return int(env)
    return UNITARY_SAMPLES if kind == "unitary" else LINDBLAD_SAMPLES


def six_axial_states(system: LevelSystem) -> np.ndarray:
    """|0>, |1>, |+x>, |-x>, |+y>, |-y> embedded in the system dimension."""
    r = 1 / np.sqrt(2)
    qubit = [
        (1, 0),
        (0, 1),
        (r, r),
        (r, -r),
        (r, 1j * r),
        (r, -1j * r),
    ]
    return np.stack([system.embed_qubit(q) for q in qubit])


def monitor_index(system: LevelSystem) -> int:
    """Level whose population is tracked: the excited level, or the ancilla
    |100> for the three-qubit system."""
    if system.excited_index is not None:
        return system.excited_index
    return 4


@dataclass(frozen=True)
class Trajectory:
    """Sampled evolution: propagators U(t) for unitary runs, density
    matrices rho(t) (possibly a batch) for open runs.

    excited_population[i] is the monitored-level population at times[i]:
    for unitary runs the maximum over the six axial initial states, for
    open runs the maximum over the propagated batch.
    """

    times: np.ndarray
    operators: np.ndarray
    excited_population: np.ndarray
    kind: str

    @property
    def final(self) -> np.ndarray:
        return self.operators[-1]


def jump_operators(system: LevelSystem) -> tuple[np.ndarray, np.ndarray]:
    """Combined lowering operator and the three-level dephasing operator,
    exactly as printed (one sigma_minus, not per-transition channels)."""
    if system.excited_index is None:
        raise ValueError("no excited level: decoherence channels undefined "
                         "for the three-qubit system")
    d, e = system.dim, system.excited_index
    sm = np.zeros((d, d), dtype=complex)
    sz = np.zeros((d, d), dtype=complex)
    sz[e, e] = 1.0
    for k in range(d):
        if k == e:
            continue
        sm[k, e] = 1.0
        sz[k, k] = -1.0
    return sm, sz


def allocate_steps(schedule: PulseSchedule, total_steps: int, floor: int = 8) -> list[int]:
    """Whole RK4 steps per segment, proportional to duration, each at least
    `floor`; steps never straddle a segment boundary (drive phases may jump
    there, which would spoil the integrator's order)."""
    T = schedule.total_duration
    alloc = [max(floor, int(round(total_steps * seg.duration / T)))
             for seg in schedule.segments]
    return alloc


def _segment_node_times(schedule: PulseSchedule, alloc: list[int]):
    """Per-segment (local half-step lattice, step size, step count)."""
    for seg, n in zip(schedule.segments, alloc):
        h = seg.duration / n
        yield np.linspace(0.0, seg.duration, 2 * n + 1), h, n


def propagate_unitary(
    schedule: PulseSchedule, err: ErrorModel = ErrorModel(), samples: int | None = None
) -> Trajectory:
    """RK4 propagator trajectory, integrated segment by segment."""
    if err.open_system:
        raise ValueError("propagate_unitary requires gamma_minus = gamma_z = 0")
    steps = samples or default_samples("unitary")
    alloc = allocate_steps(schedule, steps)
    d = schedule.system.dim
    U = np.eye(d, dtype=complex)
    ops = [U]
    times = [0.0]
    t_offset = 0.0
    for si, (lattice, h, n) in enumerate(_segment_node_times(schedule, alloc)):
        H = segment_hamiltonian_nodes(schedule, si, lattice, err)
        for k in range(n):
            A0 = -1j * H[2 * k]
            A1 = -1j * H[2 * k + 1]
            A2 = -1j * H[2 * k + 2]
            U = rk4_step_nodes(U, A0, A1, A2, h)
            if not np.all(np.isfinite(U)):
                raise RuntimeError(f"propagate_unitary: non-finite state in segment {si} step {k}")
            ops.append(U)
            times.append(t_offset + lattice[2 * k + 2])
        t_offset += schedule.segments[si].duration
    ops = np.stack(ops)
    times = np.asarray(times)
    drift = np.abs(ops @ ops.conj().transpose(0, 2, 1) - np.eye(d)).max()
    if drift > UNITARITY_DRIFT_TOL:
        raise RuntimeError(f"unitarity drift {drift:.3e} exceeds {UNITARITY_DRIFT_TOL}")
    states = six_axial_states(schedule.system)
    mon = monitor_index(schedule.system)
    amps = ops[:, mon, :] @ states.T  # (n, 6)
    pe = np.abs(amps).max(axis=1) ** 2
    return Trajectory(times=times, operators=ops, excited_population=pe, kind="unitary")


def _validate_density(rho: np.ndarray, where: str) -> None:
    tr = np.trace(rho, axis1=-2, axis2=-1)
    if np.abs(tr - 1.0).max() > TRACE_TOL:
        raise RuntimeError(f"trace deviates by {np.abs(tr - 1).max():.3e} {where}")
    herm = np.abs(rho - rho.conj().swapaxes(-1, -2)).max()
    if herm > 1e-8:
        raise RuntimeError(f"Hermiticity defect {herm:.3e} {where}")
    wmin = np.linalg.eigvalsh(rho).min()
    if wmin < POSITIVITY_TOL:
        raise RuntimeError(f"negative eigenvalue {wmin:.3e} {where}")


def lindblad_rhs_factory(system: LevelSystem, err: ErrorModel):
    """Returns rhs(H, rho) implementing -i[H,rho] + (1/2) sum G_j L(sigma_j)
    with L(A) = 2 A rho A^+ - A^+A rho - rho A^+A."""
    channels = []
    if err.open_system:
        sm, sz = jump_operators(system)
        for G, A in ((err.gamma_minus, sm), (err.gamma_z, sz)):
            if G > 0:
                channels.append((G, A, A.conj().T, A.conj().T @ A))

    def rhs(H: np.ndarray, rho: np.ndarray) -> np.ndarray:
        out = -1j * (H @ rho - rho @ H)
        for G, A, Ad, AdA in channels:
            out += G * (A @ rho @ Ad - 0.5 * (AdA @ rho + rho @ AdA))
        return out

    return rhs


def propagate_lindblad(
    schedule: PulseSchedule,
    err: ErrorModel,
    rho0: np.ndarray,
    samples: int | None = None,
    validate: bool = True,
) -> Trajectory:
    """RK4 density-matrix trajectory; rho0 may be (d, d) or a batch (m, d, d).

    Trace, Hermiticity and positivity are enforced at every stored sample;
    violations abort rather than clip.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    batch = rho0.ndim == 3
    rho = rho0 if batch else rho0[None, :, :]
    d = schedule.system.dim
    if rho.shape[-2:] != (d, d):
        raise ValueError(f"rho0 shape {rho0.shape} does not match dim {d}")
    _validate_density(rho, "in rho0")

    steps = samples or default_samples("lindblad")
    alloc = allocate_steps(schedule, steps)
    rhs = lindblad_rhs_factory(schedule.system, err)
    ops = [rho]
    times = [0.0]
    t_offset = 0.0
    for si, (lattice, h, n) in enumerate(_segment_node_times(schedule, alloc)):
        H = segment_hamiltonian_nodes(schedule, si, lattice, err)
        for k in range(n):
            H0, H1, H2 = H[2 * k], H[2 * k + 1], H[2 * k + 2]
            k1 = rhs(H0, rho)
            k2 = rhs(H1, rho + (h / 2) * k1)
            k3 = rhs(H1, rho + (h / 2) * k2)
            k4 = rhs(H2, rho + h * k3)
            rho = rho + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            if not np.all(np.isfinite(rho)):
                raise RuntimeError(f"propagate_lindblad: non-finite state in segment {si} step {k}")
            ops.append(rho)
            times.append(t_offset + lattice[2 * k + 2])
        t_offset += schedule.segments[si].duration
    ops = np.stack(ops)
    times = np.asarray(times)
    if validate:
        _validate_density(ops, "during evolution")
    mon = monitor_index(schedule.system)
    pe = ops[..., mon, mon].real.max(axis=1)
    if not batch:
        ops = ops[:, 0]
    return Trajectory(times=times, operators=ops, excited_population=pe, kind="lindblad")


# ---------------------------------------------------------------------------
# oracle routes
# ---------------------------------------------------------------------------


def oracle_propagate_unitary(
    schedule: PulseSchedule, err: ErrorModel = ErrorModel(), slices: int = ORACLE_SLICES
) -> np.ndarray:
    """U(T) as a time-ordered product of midpoint slice exponentials, sliced
    per segment (exact for piecewise-constant drives up to roundoff)."""
    alloc = allocate_steps(schedule, slices, floor=16)
    d = schedule.system.dim
    U = np.eye(d, dtype=complex)
    for si, seg in enumerate(schedule.segments):
        n = alloc[si]
        h = seg.duration / n
        mids = (np.arange(n) + 0.5) * h
        Hs = segment_hamiltonian_nodes(schedule, si, mids, err)
        Us = expm_hermitian_batch(Hs, h)
        for k in range(n):
            U = Us[k] @ U
    return U


def lindblad_superoperator(system: LevelSystem, err: ErrorModel, H: np.ndarray) -> np.ndarray:
    """Matrix of rho -> -i[H,rho] + dissipator on row-major-vectorized rho."""
    d = system.dim
    eye = np.eye(d)
    L = -1j * (np.kron(H, eye) - np.kron(eye, H.T))
    if err.open_system:
        sm, sz = jump_operators(system)
        for G, A in ((err.gamma_minus, sm), (err.gamma_z, sz)):
            if G > 0:
                AdA = A.conj().T @ A
                L += G * (np.kron(A, A.conj()) - 0.5 * (np.kron(AdA, eye) + np.kron(eye, AdA.T)))
    return L


_CF4_A = 0.25 + np.sqrt(3) / 6
_CF4_B = 0.25 - np.sqrt(3) / 6
_CF4_C1 = 0.5 - np.sqrt(3) / 6
_CF4_C2 = 0.5 + np.sqrt(3) / 6


def oracle_propagate_lindblad(
    schedule: PulseSchedule,
    err: ErrorModel,
    rho0: np.ndarray,
    slices: int = ORACLE_LINDBLAD_SLICES,
) -> np.ndarray:
    """rho(T) via a 4th-order commutator-free Magnus product of exact
    superoperator exponentials (independent of the RK4 route)."""
    rho0 = np.asarray(rho0, dtype=complex)
    batch = rho0.ndim == 3
    d = schedule.system.dim
    alloc = allocate_steps(schedule, slices, floor=16)
    P = np.eye(d * d, dtype=complex)
    for si, seg in enumerate(schedule.segments):
        n = alloc[si]
        h = seg.duration / n
        t0 = np.arange(n) * h
        H1 = segment_hamiltonian_nodes(schedule, si, t0 + _CF4_C1 * h, err)
        H2 = segment_hamiltonian_nodes(schedule, si, t0 + _CF4_C2 * h, err)
        for k in range(n):
            L1 = lindblad_superoperator(schedule.system, err, H1[k])
            L2 = lindblad_superoperator(schedule.system, err, H2[k])
            E1 = scipy.linalg.expm(h * (_CF4_A * L1 + _CF4_B * L2))
            E2 = scipy.linalg.expm(h * (_CF4_B * L1 + _CF4_A * L2))
            P = E2 @ E1 @ P
    if batch:
        return np.stack([(P @ r.reshape(-1)).reshape(d, d) for r in rho0])
    return (P @ rho0.reshape(-1)).reshape(d, d)

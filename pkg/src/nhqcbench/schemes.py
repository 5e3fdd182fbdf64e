"""Builders turning a SchemeSpec into a concrete PulseSchedule.

Each builder emits:

* the drive segments (envelope/phase/detuning in omega_bar units),
* the ideal 2x2 target gate exp(-i(gamma/2) n.sigma),
* an analytic auxiliary frame (t -> 3 orthonormal vectors) for the
  holonomy checks, cyclic on the computational rows.

Phase conventions: the two-interval loop uses first-half drive phase 0 and
second-half phase pi-gamma, which composes to e^{i gamma}|b><b| + |d><d| on
the computational space.  Composite loops with an even loop count may
equivalently use -gamma/N per loop (the two differ by a bright-sector sign
that cancels pairwise); the builder picks whichever matches the published
parameter table while keeping the composite gate exact.

The shortened-path and time-optimal constructions imprint e^{-i gamma} on
whichever superposition they drive, so those builders drive the +n axis
eigenvector (the dark state of the two-interval loop); the computational
gate is then the same rotation as the other schemes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .system import (
    DriveSegment,
    ErrorModel,
    GateAngles,
    GeneratorSegment,
    LevelSystem,
    PulseSchedule,
    SchemeSpec,
    bright_dark_basis,
)

PI = np.pi

SCHEME_LABELS = {
    "SL": "SL-NHQC",
    "SS": "SS-NHQC",
    "PS": "PS-NHQC",
    "C": "C-NHQC",
    "DC": "DC-NHQC",
    "TO": "TO-UNHQC",
    "S": "S-NHQC",
    "CDD": "CDD-NHQC",
    "STA": "STA-NHQC",
    "DFS3": "DFS3-NHQC",
}

_SX = np.array([[0, 1], [1, 0]], dtype=complex)
_SY = np.array([[0, -1j], [1j, 0]])
_SZ = np.array([[1, 0], [0, -1]], dtype=complex)


def rotation_gate(gamma: float, theta: float = 0.0, phi: float = 0.0) -> np.ndarray:
    """exp(-i(gamma/2) n.sigma) with n = (sin t cos p, sin t sin p, cos t)."""
    n = np.array([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)])
    ns = n[0] * _SX + n[1] * _SY + n[2] * _SZ
    return np.cos(gamma / 2) * np.eye(2) - 1j * np.sin(gamma / 2) * ns


def _const(value: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda t: np.full(np.shape(t), float(value))


def _zero(t: np.ndarray) -> np.ndarray:
    return np.zeros(np.shape(t))


# ---------------------------------------------------------------------------
# two-interval loops (SL) and their composites (C, DC)
# ---------------------------------------------------------------------------


def _g_matrix(xi: float) -> np.ndarray:
    """Unit bright-excited coupling [[0, e^{i xi}], [e^{-i xi}, 0]]."""
    return np.array([[0, np.exp(1j * xi)], [np.exp(-1j * xi), 0]])


def _loop_pieces_gate(pieces: list[tuple[float, float]]) -> np.ndarray:
    """Block gate of a chain of (drive phase, pulse area) pieces at t end."""
    U = np.eye(2, dtype=complex)
    for phase, area in pieces:
        G = _g_matrix(-phase)
        U = (np.cos(area) * np.eye(2) - 1j * np.sin(area) * G) @ U
    return U


def _lambda_frame(
    system: LevelSystem,
    parked: np.ndarray,
    driven: np.ndarray,
    block: Callable[[float], np.ndarray],
    total: float,
    return_phase: float,
) -> Callable[[float], np.ndarray]:
    """Cyclic frame for a loop driving `driven` against |e>, parking `parked`.

    block(t) is the analytic 2x2 propagator in (driven, e) coordinates; the
    diagonal return phases (+return_phase on the driven column) are stripped
    linearly so the computational rows close exactly.
    """
    e_full = system.basis_state(system.excited_index)

    def frame(t: float) -> np.ndarray:
        U = block(t)
        s = t / total
        col_w = U[:, 0] * np.exp(-1j * return_phase * s)
        col_e = U[:, 1] * np.exp(+1j * return_phase * s)
        nu2 = col_w[0] * driven + col_w[1] * e_full
        nu3 = col_e[0] * driven + col_e[1] * e_full
        return np.stack([parked, nu2, nu3])

    return frame


def _piecewise_const_block(
    pieces: list[tuple[float, float]], omega_bar: float
) -> tuple[Callable[[float], np.ndarray], float]:
    """Analytic block propagator for constant-envelope pieces (phase, area)."""
    durations = [area / omega_bar for _, area in pieces]
    bounds = np.concatenate([[0.0], np.cumsum(durations)])
    boundary_U = [np.eye(2, dtype=complex)]
    for phase, area in pieces:
        G = _g_matrix(-phase)
        step = np.cos(area) * np.eye(2) - 1j * np.sin(area) * G
        boundary_U.append(step @ boundary_U[-1])

    def block(t: float) -> np.ndarray:
        t = min(max(t, 0.0), bounds[-1])
        k = int(np.searchsorted(bounds[1:-1], t, side="right"))
        a_loc = omega_bar * (t - bounds[k])
        G = _g_matrix(-pieces[k][0])
        return (np.cos(a_loc) * np.eye(2) - 1j * np.sin(a_loc) * G) @ boundary_U[k]

    return block, float(bounds[-1])


def _build_loop_schedule(
    spec: SchemeSpec, pieces: list[tuple[float, float]], label: str
) -> PulseSchedule:
    """Assemble a constant-envelope multi-piece loop on the Lambda system."""
    system = LevelSystem.lambda3()
    ang = spec.angles
    ob = spec.omega_bar
    segments = tuple(
        DriveSegment(
            duration=area / ob,
            envelope=_const(ob),
            phase=_const(phase),
            detuning=_zero,
            bright_axis=(ang.theta, ang.phi),
        )
        for phase, area in pieces
    )
    b2, d2 = bright_dark_basis(ang)
    b_full, d_full = system.embed_qubit(b2), system.embed_qubit(d2)
    block, total = _piecewise_const_block(pieces, ob)
    Ublk = _loop_pieces_gate(pieces)
    return_phase = float(np.angle(Ublk[0, 0]))
    frame = _lambda_frame(system, d_full, b_full, block, total, return_phase)
    target = rotation_gate(ang.gamma, ang.theta, ang.phi)
    return PulseSchedule(
        system=system,
        segments=segments,
        target=target,
        scheme_label=label,
        omega_bar=ob,
        frame=frame,
        geometric_phase=ang.gamma,
        notes={"pieces": pieces},
    )


def build_sl(spec: SchemeSpec) -> PulseSchedule:
    """Two equal intervals, areas pi/2, phases 0 then pi - gamma."""
    g = spec.angles.gamma
    pieces = [(0.0, PI / 2), (PI - g, PI / 2)]
    return _build_loop_schedule(spec, pieces, SCHEME_LABELS["SL"])


def build_c(spec: SchemeSpec) -> PulseSchedule:
    """N concatenated copies of the elementary two-interval loop at angle
    gamma/N (second-half phase pi - gamma/N, same as the single loop).

    The published table lists -gamma/N for the second halves; that variant
    composes to the same ideal gate for even N but accumulates Rabi error
    faster than the single loop, losing the composite's robustness benefit,
    so the elementary-gate convention is used throughout.
    """
    N = spec.loops
    gl = spec.angles.gamma / N
    pieces = []
    for _ in range(N):
        pieces += [(0.0, PI / 2), (PI - gl, PI / 2)]
    return _build_loop_schedule(spec, pieces, SCHEME_LABELS["C"])


def build_dc(spec: SchemeSpec) -> PulseSchedule:
    """Two-interval loop with pi-area corrective insertions at T/4 and 5T/4.

    Insertion phases phi0 + pi/2 and phi0 - gamma - pi/2 relative to the
    first-interval phase phi0 = 0; the inserted dynamical phases cancel.
    """
    g = spec.angles.gamma
    pieces = [
        (0.0, PI / 4),
        (PI / 2, PI / 2),
        (0.0, PI / 4),
        (PI - g, PI / 4),
        (-g - PI / 2, PI / 2),
        (PI - g, PI / 4),
    ]
    return _build_loop_schedule(spec, pieces, SCHEME_LABELS["DC"])


# ---------------------------------------------------------------------------
# single-shot detuned loop (SS)
# ---------------------------------------------------------------------------


def build_ss(spec: SchemeSpec) -> PulseSchedule:
    """Constant detuned drive: coupling cos(g_ss), |e><e| term 2 sin(g_ss),
    duration pi (all in units of omega_bar); rotation angle pi sin(g_ss) + pi.
    """
    system = LevelSystem.lambda3()
    ang = spec.angles
    ob = spec.omega_bar
    gss = spec.gamma_ss
    coupling = ob * np.cos(gss)
    if abs(coupling) < 1e-12:
        raise ValueError("gamma_ss = pi/2 leaves no drive; choose |gamma_ss| < pi/2")
    delta = 2 * ob * np.sin(gss)
    duration = PI / ob
    # driven superposition cos(t/2)|0> + sin(t/2) e^{i p}|1>, i.e. the +n axis
    # eigenvector; realized via the complementary bright axis.
    axis = (PI - ang.theta, ang.phi + PI)
    seg = DriveSegment(
        duration=duration,
        envelope=_const(coupling),
        phase=_const(0.0),
        detuning=_const(delta),
        bright_axis=axis,
    )
    phi_gate = PI * np.sin(gss) + PI
    # block evolution with constant H = coupling*G(0) + delta*|e><e|
    half = delta / 2.0
    rot = np.sqrt(coupling**2 + half**2)
    m = np.array([[-half, coupling], [coupling, half]]) / rot  # traceless part / rot

    def block(t: float) -> np.ndarray:
        return np.exp(-1j * half * t) * (
            np.cos(rot * t) * np.eye(2) - 1j * np.sin(rot * t) * m
        )

    b2, d2 = bright_dark_basis(ang)
    b_full, d_full = system.embed_qubit(b2), system.embed_qubit(d2)
    w_full = system.embed_qubit(
        [np.sin(axis[0] / 2), -np.cos(axis[0] / 2) * np.exp(1j * axis[1])]
    )
    return_phase = float(np.angle(block(duration)[0, 0]))
    frame = _lambda_frame(system, b_full, w_full, block, duration, return_phase)
    target = rotation_gate(phi_gate, ang.theta, ang.phi)
    return PulseSchedule(
        system=system,
        segments=(seg,),
        target=target,
        scheme_label=SCHEME_LABELS["SS"],
        omega_bar=ob,
        frame=frame,
        geometric_phase=phi_gate,
        notes={"gamma_ss": gss, "rotation_angle": phi_gate},
    )


# ---------------------------------------------------------------------------
# pulse shaping (PS)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PsDesign:
    """Shaped two-interval design: per-segment profiles of the mixing angle
    chi, global-phase f, solved azimuth varphi, the published quadrature
    pair (omega_R, omega_I), the physical coupling envelope, and the drive
    phase.  Segment-local time in [0, segment_duration].
    """

    varsigma: float
    segment_duration: float
    chi: tuple[Callable, Callable]
    chi_dot: tuple[Callable, Callable]
    f: tuple[Callable, Callable]
    varphi: tuple[Callable, Callable]
    omega_ps: tuple[Callable, Callable]
    envelope: tuple[Callable, Callable]
    phase: tuple[Callable, Callable]
    coupling_area: float


def _ps_profiles(varsigma: float, Ts: float, gamma: float, chi_profile: str):
    """Per-segment closed forms. Segment 0 sweeps chi 0 -> pi, segment 1
    mirrors back pi -> 0; the azimuth restarts at -pi/2 - gamma on segment 1.
    phi(chi) = phi_start - (4 varsigma / 3) sin^3(chi) solves
    d(phi)/dt = -df/dt cos(chi) exactly for f = varsigma(2 chi - sin 2 chi).
    """
    if chi_profile == "half_pi":
        chis = (
            lambda s: PI * np.sin(PI * s / (2 * Ts)) ** 2,
            lambda s: PI * np.cos(PI * s / (2 * Ts)) ** 2,
        )
        chidots = (
            lambda s: PI * np.sin(PI * s / Ts) * (PI / (2 * Ts)),
            lambda s: -PI * np.sin(PI * s / Ts) * (PI / (2 * Ts)),
        )
    elif chi_profile == "full_sine":
        chis = (
            lambda s: PI * np.sin(PI * s / Ts) ** 2,
            lambda s: PI * np.sin(PI * s / Ts) ** 2,
        )
        chidots = (
            lambda s: PI * np.sin(2 * PI * s / Ts) * (PI / Ts),
            lambda s: PI * np.sin(2 * PI * s / Ts) * (PI / Ts),
        )
    else:
        raise ValueError(f"unknown chi_profile {chi_profile!r}")

    starts = (-PI / 2, -PI / 2 - gamma)

    def make(seg):
        chi, chid = chis[seg], chidots[seg]

        def f(s):
            c = chi(s)
            return varsigma * (2 * c - np.sin(2 * c))

        def varphi(s):
            return starts[seg] - (4 * varsigma / 3) * np.sin(chi(s)) ** 3

        def quadratures(s):
            c, cd = chi(s), chid(s)
            fd = 4 * varsigma * np.sin(c) ** 2 * cd
            vp = varphi(s)
            omR = np.cos(vp) * np.sin(c) * fd - np.sin(vp) * cd
            omI = np.sin(vp) * np.sin(c) * fd + np.cos(vp) * cd
            return omR, omI

        def omega_ps(s):
            omR, omI = quadratures(s)
            return np.sqrt(omR**2 + omI**2)

        def envelope(s):
            return 0.5 * omega_ps(s)

        def phase(s):
            omR, omI = quadratures(s)
            return np.arctan2(omI, omR)

        return chi, chid, f, varphi, omega_ps, envelope, phase

    return [make(0), make(1)]


def ps_design(varsigma: float, tau: float, angles: GateAngles, chi_profile: str = "half_pi") -> PsDesign:
    """Shaped design over total duration tau (two equal segments)."""
    if varsigma < 0:
        raise ValueError("varsigma must be >= 0")
    if tau <= 0:
        raise ValueError("tau must be positive")
    Ts = tau / 2
    made = _ps_profiles(varsigma, Ts, angles.gamma, chi_profile)
    # coupling area per segment by quadrature of the closed form
    s = np.linspace(0.0, Ts, 20001)
    area = 0.0
    for seg in range(2):
        env = made[seg][5](s)
        area += float(np.trapezoid(env, s))
    return PsDesign(
        varsigma=varsigma,
        segment_duration=Ts,
        chi=(made[0][0], made[1][0]),
        chi_dot=(made[0][1], made[1][1]),
        f=(made[0][2], made[1][2]),
        varphi=(made[0][3], made[1][3]),
        omega_ps=(made[0][4], made[1][4]),
        envelope=(made[0][5], made[1][5]),
        phase=(made[0][6], made[1][6]),
        coupling_area=area,
    )


def build_ps(spec: SchemeSpec) -> PulseSchedule:
    """Shaped two-interval loop; duration set so the time-averaged coupling
    equals omega_bar (the shape fixes the area, the area fixes the time).
    """
    system = LevelSystem.lambda3()
    ang = spec.angles
    ob = spec.omega_bar
    ref = ps_design(spec.varsigma, 2.0, ang, spec.chi_profile)  # unit segments
    total = ref.coupling_area / ob
    design = ps_design(spec.varsigma, total, ang, spec.chi_profile)
    Ts = design.segment_duration
    segments = tuple(
        DriveSegment(
            duration=Ts,
            envelope=design.envelope[k],
            phase=design.phase[k],
            detuning=_zero,
            bright_axis=(ang.theta, ang.phi),
        )
        for k in range(2)
    )
    b2, d2 = bright_dark_basis(ang)
    b_full, d_full = system.embed_qubit(b2), system.embed_qubit(d2)
    g = ang.gamma

    def designed_column(seg: int, s: float) -> np.ndarray:
        chi = design.chi[seg](s)
        f = design.f[seg](s)
        vp = design.varphi[seg](s)
        return np.exp(-1j * f / 2) * np.array(
            [np.exp(-1j * vp / 2) * np.cos(chi / 2), np.exp(1j * vp / 2) * np.sin(chi / 2)]
        )

    # physical trajectory constants gluing the two designed segments
    c0 = 1.0 / np.exp(1j * np.angle(designed_column(0, 0.0)[0]))
    psi_mid = c0 * designed_column(0, Ts)
    d20 = designed_column(1, 0.0)
    glue = int(np.argmax(np.abs(d20)))
    c1 = psi_mid[glue] / d20[glue]

    def block(t: float) -> np.ndarray:
        if t <= Ts:
            col = c0 * designed_column(0, t)
        else:
            col = c1 * designed_column(1, min(t - Ts, Ts))
        partner = np.array([-np.conj(col[1]), np.conj(col[0])])
        return np.stack([col, partner], axis=1)

    frame = _lambda_frame(system, d_full, b_full, block, total, g)
    target = rotation_gate(g, ang.theta, ang.phi)
    return PulseSchedule(
        system=system,
        segments=segments,
        target=target,
        scheme_label=SCHEME_LABELS["PS"],
        omega_bar=ob,
        frame=frame,
        geometric_phase=g,
        notes={"varsigma": spec.varsigma, "chi_profile": spec.chi_profile,
               "coupling_area": design.coupling_area},
    )


# ---------------------------------------------------------------------------
# time-optimal loop (TO)
# ---------------------------------------------------------------------------


def brachistochrone_tau(gamma: float, omega0: float) -> float:
    """Minimal loop time 2 sqrt(pi^2 - (pi - gamma)^2) / omega0 for a drive
    of amplitude omega0 (bright-excited coupling omega0/2)."""
    if omega0 <= 0:
        raise ValueError("omega0 must be positive")
    if not 0 < gamma < 2 * PI:
        raise ValueError("gamma must lie in (0, 2*pi)")
    return 2 * np.sqrt(PI**2 - (PI - gamma) ** 2) / omega0


def build_to(spec: SchemeSpec) -> PulseSchedule:
    """Constant drive with linear phase 2(gamma - pi) t / tau at the minimal
    loop time; drives the +n axis eigenvector.  Unconventional: the
    dynamical phase is nonzero but proportional to the geometric phase.
    """
    system = LevelSystem.lambda3()
    ang = spec.angles
    ob = spec.omega_bar
    g = ang.gamma
    # time-averaged coupling = omega_bar -> drive amplitude 2*omega_bar
    tau = brachistochrone_tau(g, 2 * ob)
    lam = ob  # coupling magnitude
    omega_rot = 2 * (g - PI) / tau

    def phase(t):
        return omega_rot * np.asarray(t, dtype=float)

    axis = (PI - ang.theta, ang.phi + PI)
    seg = DriveSegment(
        duration=tau,
        envelope=_const(lam),
        phase=phase,
        detuning=_zero,
        bright_axis=axis,
    )
    # rotating-frame closed form in (driven, e) block coordinates
    Lam = np.sqrt(lam**2 + omega_rot**2 / 4)
    p = np.array([lam, 0.0, -omega_rot / 2]) / Lam
    psig = p[0] * _SX + p[2] * _SZ

    def block_raw(t: float) -> np.ndarray:
        R = np.diag([np.exp(-1j * omega_rot * t / 2), np.exp(1j * omega_rot * t / 2)])
        V = np.cos(Lam * t) * np.eye(2) - 1j * np.sin(Lam * t) * psig
        return R @ V

    # dynamical-phase integral along the driven trajectory (closed form)
    dyn_scale = -(lam**2 * omega_rot) / (2 * Lam**2)

    def dyn_phase_integral(t: float) -> float:
        return dyn_scale * (t - np.sin(2 * Lam * t) / (2 * Lam))

    phi_d_total = dyn_phase_integral(tau)
    c_prop = g / phi_d_total  # frame phase share making the frame cyclic

    b2, d2 = bright_dark_basis(ang)
    b_full = system.embed_qubit(b2)
    w_full = system.embed_qubit(
        [np.sin(axis[0] / 2), -np.cos(axis[0] / 2) * np.exp(1j * axis[1])]
    )
    e_full = system.basis_state(system.excited_index)

    def frame(t: float) -> np.ndarray:
        U = block_raw(t)
        theta_t = c_prop * dyn_phase_integral(t)
        col_w = U[:, 0] * np.exp(1j * theta_t)
        col_e = U[:, 1] * np.exp(-1j * g * t / tau)
        nu2 = col_w[0] * w_full + col_w[1] * e_full
        nu3 = col_e[0] * w_full + col_e[1] * e_full
        return np.stack([b_full, nu2, nu3])

    ratio = phi_d_total / (g - phi_d_total)  # dynamical / geometric, constant in t
    target = rotation_gate(g, ang.theta, ang.phi)
    coupling_area = lam * tau
    return PulseSchedule(
        system=system,
        segments=(seg,),
        target=target,
        scheme_label=SCHEME_LABELS["TO"],
        omega_bar=ob,
        frame=frame,
        geometric_phase=g,
        notes={
            "tau": tau,
            "dyn_geo_ratio": ratio,
            "dynamical_phase": -phi_d_total,
            "area_conventions_pi": {
                "coupling": coupling_area / PI,
                "amplitude_envelope": 2 * coupling_area / PI,
                "published": 0.43,
            },
        },
    )


# ---------------------------------------------------------------------------
# shortened-path loop (S) and its composite decoupling variant (CDD)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PathParams:
    """Circle path on the bright sphere: polar alpha(t), azimuth beta(t),
    mixing chi(t), diagonal gauge rate zeta_dot(t), circle parameter ell,
    and the geometric phase of the enclosed cap."""

    tau: float
    beta0: float
    ell: float
    geometric_phase: float
    alpha: Callable
    beta: Callable
    alpha_dot: Callable
    beta_dot: Callable
    chi: Callable
    zeta_dot: Callable


def circle_path_params(gamma: float, beta0: float, tau: float) -> PathParams:
    """Closed circular path through the pole enclosing geometric phase gamma.

    beta(t) = beta0 + pi sin^2(pi t / (2 tau)),
    alpha(t) = 2 arctan[ell sin(beta - beta0)],
    ell = sqrt(2 pi gamma - gamma^2) / (pi - gamma), gamma in (0, pi).
    """
    if not 0 < gamma < PI:
        raise ValueError(
            f"gamma={gamma} unsupported: the circle parameter ell is singular at "
            "gamma = pi; use gamma in (0, pi)"
        )
    if tau <= 0:
        raise ValueError("tau must be positive")
    ell = np.sqrt(2 * PI * gamma - gamma**2) / (PI - gamma)

    def beta(t):
        return beta0 + PI * np.sin(PI * t / (2 * tau)) ** 2

    def beta_dot(t):
        return PI * np.sin(PI * t / tau) * (PI / (2 * tau))

    def alpha(t):
        return 2 * np.arctan(ell * np.sin(beta(t) - beta0))

    def alpha_dot(t):
        x = beta(t) - beta0
        return 2 * ell * np.cos(x) * beta_dot(t) / (1 + (ell * np.sin(x)) ** 2)

    def chi(t):
        ad = alpha_dot(t)
        bs = beta_dot(t) * np.sin(alpha(t))
        return np.arctan2(ad, bs)

    def zeta_dot(t):
        return 0.5 * beta_dot(t) * (3 + np.cos(alpha(t)))

    return PathParams(
        tau=tau,
        beta0=beta0,
        ell=ell,
        geometric_phase=gamma,
        alpha=alpha,
        beta=beta,
        alpha_dot=alpha_dot,
        beta_dot=beta_dot,
        chi=chi,
        zeta_dot=zeta_dot,
    )


def circle_segment_area(gamma: float) -> float:
    """Coupling area of one circle loop: half the spherical arc length,
    sqrt(gamma(2 pi - gamma)); exact for the circle parameterization."""
    return float(np.sqrt(gamma * (2 * PI - gamma)))


def _circle_drive_segment(path: PathParams, angles: GateAngles) -> DriveSegment:
    """Drive segment realizing the inverse-engineered circle Hamiltonian.

    The driven ray is the +n axis eigenvector; the constant phase offset
    (phi + pi) maps our bright-axis convention onto the construction's
    second frame vector, keeping frame and drive phases aligned.
    """
    axis = (PI - angles.theta, angles.phi + PI)
    offset = angles.phi + PI

    def envelope(t):
        bs = path.beta_dot(t) * np.sin(path.alpha(t))
        return 0.5 * np.sqrt(bs**2 + path.alpha_dot(t) ** 2)

    def phase(t):
        return path.beta(t) + path.chi(t) + offset

    def detuning(t):
        return -path.beta_dot(t) * (1 + np.cos(path.alpha(t)))

    return DriveSegment(
        duration=path.tau,
        envelope=envelope,
        phase=phase,
        detuning=detuning,
        bright_axis=axis,
    )


def _circle_frame_vectors(
    system: LevelSystem, path: PathParams, angles: GateAngles
) -> Callable[[float], np.ndarray]:
    """The construction's auxiliary triple for one circle segment."""
    b2, d2 = bright_dark_basis(angles)
    mu1 = system.embed_qubit(b2)  # parked ray, equals the printed first vector
    v = -system.embed_qubit(d2)  # the printed second vector at t = 0
    e = system.basis_state(system.excited_index)

    def vectors(t: float) -> np.ndarray:
        al = path.alpha(t)
        be = path.beta(t)
        mu2 = np.cos(al / 2) * v + np.sin(al / 2) * np.exp(1j * be) * e
        mu3 = np.sin(al / 2) * np.exp(-1j * be) * v - np.cos(al / 2) * e
        return np.stack([mu1, mu2, mu3])

    return vectors


def inverse_engineer_hamiltonian(path: PathParams, angles: GateAngles,
                                 omega_bar: float = 1.0,
                                 label: str | None = None) -> PulseSchedule:
    """Single circle-loop schedule from an explicit path."""
    system = LevelSystem.lambda3()
    seg = _circle_drive_segment(path, angles)
    vectors = _circle_frame_vectors(system, path, angles)
    target = rotation_gate(path.geometric_phase, angles.theta, angles.phi)
    return PulseSchedule(
        system=system,
        segments=(seg,),
        target=target,
        scheme_label=label or SCHEME_LABELS["S"],
        omega_bar=omega_bar,
        frame=lambda t: vectors(min(max(t, 0.0), path.tau)),
        geometric_phase=path.geometric_phase,
        notes={"ell": path.ell, "beta0": path.beta0},
    )


def build_s(spec: SchemeSpec) -> PulseSchedule:
    ang = spec.angles
    if not 0 < ang.gamma < PI:
        raise ValueError("S scheme requires gamma in (0, pi); the circle "
                         "parameter ell is singular at gamma = pi")
    tau = circle_segment_area(ang.gamma) / spec.omega_bar
    path = circle_path_params(ang.gamma, spec.beta0, tau)
    sched = inverse_engineer_hamiltonian(path, ang, spec.omega_bar)
    return sched


def build_cdd(spec: SchemeSpec) -> PulseSchedule:
    """N circle segments at angle gamma/N, the even segments with beta0
    advanced by pi (paths mirror-symmetric about the pole)."""
    ang = spec.angles
    N = spec.loops
    gl = ang.gamma / N
    if not 0 < gl < PI:
        raise ValueError("CDD requires gamma/N in (0, pi)")
    tau_seg = circle_segment_area(gl) / spec.omega_bar
    system = LevelSystem.lambda3()
    paths = [
        circle_path_params(gl, spec.beta0 + (PI if k % 2 else 0.0), tau_seg)
        for k in range(N)
    ]
    segments = tuple(_circle_drive_segment(p, ang) for p in paths)
    frames = [_circle_frame_vectors(system, p, ang) for p in paths]
    bounds = np.concatenate([[0.0], np.cumsum([tau_seg] * N)])

    def frame(t: float) -> np.ndarray:
        t = min(max(t, 0.0), bounds[-1])
        k = int(np.searchsorted(bounds[1:-1], t, side="right"))
        return frames[k](t - bounds[k])

    target = rotation_gate(ang.gamma, ang.theta, ang.phi)
    return PulseSchedule(
        system=system,
        segments=segments,
        target=target,
        scheme_label=SCHEME_LABELS["CDD"],
        omega_bar=spec.omega_bar,
        frame=frame,
        geometric_phase=ang.gamma,
        notes={"loops": N, "segment_angle": gl, "beta0": spec.beta0},
    )


# ---------------------------------------------------------------------------
# transitionless tripod (STA)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StaPath:
    """Orange-slice path on the tripod parameter sphere: polar theta(t) and
    azimuth phi(t) over three steps (down the phi=0 meridian, around the
    pole, back up the phi=phi1 meridian)."""

    phi1: float
    durations: tuple[float, float, float]
    theta: tuple[Callable, Callable, Callable]
    theta_dot: tuple[Callable, Callable, Callable]
    phi: tuple[Callable, Callable, Callable]
    phi_dot: tuple[Callable, Callable, Callable]


def sta_path(phi1: float, tau: float) -> StaPath:
    T = tau / 3

    def ramp(s):
        return np.sin(PI * s / (2 * T)) ** 2

    def ramp_dot(s):
        return PI * np.sin(PI * s / T) / (2 * T)

    return StaPath(
        phi1=phi1,
        durations=(T, T, T),
        theta=(
            lambda s: PI * ramp(s),
            lambda s: PI * np.ones(np.shape(s)),
            lambda s: PI * (1 - ramp(s)),
        ),
        theta_dot=(
            lambda s: PI * ramp_dot(s),
            lambda s: np.zeros(np.shape(s)),
            lambda s: -PI * ramp_dot(s),
        ),
        phi=(
            lambda s: np.zeros(np.shape(s)),
            lambda s: phi1 * ramp(s),
            lambda s: phi1 * np.ones(np.shape(s)),
        ),
        phi_dot=(
            lambda s: np.zeros(np.shape(s)),
            lambda s: phi1 * ramp_dot(s),
            lambda s: np.zeros(np.shape(s)),
        ),
    )


def sta_schedule(phi1: float, tau: float, omega_bar: float = 1.0) -> PulseSchedule:
    """Three-step transitionless tripod schedule for the phase-shift gate.

    The counter-diabatic term forces exact evolution along the dark channel
    at any speed; the accumulated phase on |1> equals the connection
    quadrature -integral(phi_dot sin^2(theta/2)), measured, not assumed.
    """
    if not 0 <= phi1 < 2 * PI:
        raise ValueError("phi1 must lie in [0, 2*pi)")
    if tau <= 0:
        raise ValueError("tau must be positive")
    system = LevelSystem.tripod4()
    path = sta_path(phi1, tau)
    omega_t = omega_bar
    e = system.basis_state(3)
    k1 = system.basis_state(1)
    k2 = system.basis_state(2)

    def make_step(step: int) -> GeneratorSegment:
        th, thd = path.theta[step], path.theta_dot[step]
        ph, phd = path.phi[step], path.phi_dot[step]

        def drive(s: float) -> np.ndarray:
            t_, td_ = float(th(s)), float(thd(s))
            p_, pd_ = float(ph(s)), float(phd(s))
            B = -np.sin(t_ / 2) * np.exp(-1j * p_) * k1 + np.cos(t_ / 2) * k2
            D = np.cos(t_ / 2) * np.exp(-1j * p_) * k1 + np.sin(t_ / 2) * k2
            H0 = omega_t * np.outer(e, B.conj())
            H0 = H0 + H0.conj().T
            bd = td_ / 2 + 1j * (pd_ / 2) * np.sin(t_)  # <B|dD/dt>
            Hcd = 1j * bd * np.outer(B, D.conj())
            Hcd = Hcd + Hcd.conj().T
            Hcd += (pd_ / 2) * np.sin(t_ / 2) ** 2 * (
                np.outer(B, B.conj()) - np.outer(e, e.conj())
            )
            return H0 + Hcd

        def diagonal(s: float) -> np.ndarray:
            return np.zeros((4, 4), dtype=complex)

        return GeneratorSegment(
            duration=path.durations[step],
            drive=drive,
            diagonal=diagonal,
            envelope=_const(omega_t),
        )

    segments = tuple(make_step(k) for k in range(3))

    # phase-shift magnitude from the connection quadrature along the path
    gamma1 = 0.0
    for step in range(3):
        s = np.linspace(0.0, path.durations[step], 4001)
        integrand = path.phi_dot[step](s) * np.sin(path.theta[step](s) / 2) ** 2
        gamma1 -= float(np.trapezoid(integrand, s))

    bounds = np.concatenate([[0.0], np.cumsum(path.durations)])

    def frame(t: float) -> np.ndarray:
        t = min(max(t, 0.0), bounds[-1])
        step = int(np.searchsorted(bounds[1:-1], t, side="right"))
        s = t - bounds[step]
        t_, p_ = float(path.theta[step](s)), float(path.phi[step](s))
        nu1 = system.basis_state(0)
        nu2 = np.cos(t_ / 2) * k1 + np.sin(t_ / 2) * np.exp(1j * p_) * k2
        nu3 = -np.sin(t_ / 2) * k1 + np.cos(t_ / 2) * np.exp(1j * p_) * k2
        return np.stack([nu1, nu2, nu3])

    target = np.diag([1.0, np.exp(1j * gamma1)]).astype(complex)
    return PulseSchedule(
        system=system,
        segments=segments,
        target=target,
        scheme_label=SCHEME_LABELS["STA"],
        omega_bar=omega_bar,
        frame=frame,
        geometric_phase=gamma1,
        notes={"phi1": phi1, "gamma1": gamma1},
    )


def build_sta(spec: SchemeSpec) -> PulseSchedule:
    return sta_schedule(spec.phi1, PI / spec.omega_bar, spec.omega_bar)


# ---------------------------------------------------------------------------
# three-qubit subspace demo (DFS3)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DfsCouplings:
    """Exchange-coupling assignment for the three-qubit gate: both pairs
    share one pulse J(t) with x/y components set by the axis angle phi."""

    phi: float
    j12x: float
    j12y: float
    j13x: float
    j13y: float

    @classmethod
    def from_phi(cls, phi: float) -> "DfsCouplings":
        return cls(
            phi=phi,
            j12x=np.cos(phi / 2),
            j12y=-np.sin(phi / 2),
            j13x=-np.cos(phi / 2),
            j13y=-np.sin(phi / 2),
        )


def _pair_coupling(op_a: np.ndarray, op_b: np.ndarray, pair: tuple[int, int]) -> np.ndarray:
    mats = [np.eye(2, dtype=complex)] * 3
    mats[pair[0]] = op_a
    mats[pair[1]] = op_b
    return np.kron(np.kron(mats[0], mats[1]), mats[2])


def dfs3_unit_hamiltonian(phi: float) -> np.ndarray:
    """8x8 exchange Hamiltonian at unit J: XY plus antisymmetric terms."""
    c = DfsCouplings.from_phi(phi)
    H = np.zeros((8, 8), dtype=complex)
    for (jx, jy), pair in (((c.j12x, c.j12y), (0, 1)), ((c.j13x, c.j13y), (0, 2))):
        xx = _pair_coupling(_SX, _SX, pair)
        yy = _pair_coupling(_SY, _SY, pair)
        xy = _pair_coupling(_SX, _SY, pair)
        yx = _pair_coupling(_SY, _SX, pair)
        H += 0.5 * (jx * (xx + yy) + jy * (xy - yx))
    return H


def dfs3_schedule(phi: float, pulse_shape: str | Callable = "const",
                  omega_bar: float = 1.0) -> PulseSchedule:
    """Three-qubit schedule: single-excitation subspace {100, 010, 001} hosts
    an effective bright-ancilla loop; cyclic when integral(J) = pi/sqrt(2).
    """
    system = LevelSystem.three_qubit8()
    duration = PI / (np.sqrt(2) * omega_bar)
    if pulse_shape == "zero":
        # degenerate control-off case: identity gate, no area requirement
        def J(t):
            return np.zeros(np.shape(t))

        def J_area(t):
            return np.zeros(np.shape(t))
    elif pulse_shape == "const":
        def J(t):
            return omega_bar * np.ones(np.shape(t))

        def J_area(t):
            return omega_bar * np.asarray(t, dtype=float)
    elif pulse_shape == "sin2":
        def J(t):
            return 2 * omega_bar * np.sin(PI * np.asarray(t) / duration) ** 2

        def J_area(t):
            t = np.asarray(t, dtype=float)
            return 2 * omega_bar * (t / 2 - duration * np.sin(2 * PI * t / duration) / (4 * PI))
    elif callable(pulse_shape):
        J = pulse_shape
        s = np.linspace(0.0, duration, 40001)
        js = np.asarray(J(s), dtype=float)
        if js.min() < 0:
            raise ValueError("pulse_shape must be non-negative")
        area = float(np.trapezoid(js, s))
        if abs(area - PI / np.sqrt(2)) > 1e-6:
            raise ValueError(
                f"pulse area {area:.8f} deviates from pi/sqrt(2) by more than 1e-6"
            )
        cum = np.concatenate([[0.0], np.cumsum((js[1:] + js[:-1]) / 2 * (s[1] - s[0]))])

        def J_area(t):
            return np.interp(np.asarray(t, dtype=float), s, cum)
    else:
        raise ValueError(f"unknown pulse shape {pulse_shape!r}")

    H_unit = dfs3_unit_hamiltonian(phi)

    seg = GeneratorSegment(
        duration=duration,
        drive=lambda s: float(J(s)) * H_unit,
        diagonal=lambda s: np.zeros((8, 8), dtype=complex),
        envelope=J,
    )

    # logical frame: bright/dark combinations of |010>, |001> against |100>
    zero_l = system.basis_state(2)
    one_l = system.basis_state(1)
    anc = system.basis_state(4)
    B = (np.exp(1j * phi / 2) * zero_l - np.exp(-1j * phi / 2) * one_l) / np.sqrt(2)
    D = (np.exp(1j * phi / 2) * zero_l + np.exp(-1j * phi / 2) * one_l) / np.sqrt(2)

    def frame(t: float) -> np.ndarray:
        t = min(max(t, 0.0), duration)
        A = np.sqrt(2) * float(J_area(t))  # accumulated bright-coupling area
        h = A / PI
        psi_b = (np.cos(A) * B - 1j * np.sin(A) * anc) * np.exp(-1j * PI * h)
        psi_a = (-1j * np.sin(A) * B + np.cos(A) * anc) * np.exp(-1j * PI * h)
        return np.stack([D, psi_b, psi_a])

    # logical gate: pi rotation about -(cos phi, sin phi, 0)
    if pulse_shape == "zero":
        target = np.eye(2, dtype=complex)
    else:
        n = -np.array([np.cos(phi), np.sin(phi), 0.0])
        ns = n[0] * _SX + n[1] * _SY + n[2] * _SZ
        target = -1j * ns  # exp(-i (pi/2) n.sigma)
    return PulseSchedule(
        system=system,
        segments=(seg,),
        target=target,
        scheme_label=SCHEME_LABELS["DFS3"],
        omega_bar=omega_bar,
        frame=frame,
        geometric_phase=PI,
        notes={"phi": phi, "pulse_shape": pulse_shape if isinstance(pulse_shape, str) else "custom"},
    )


def build_dfs3(spec: SchemeSpec) -> PulseSchedule:
    return dfs3_schedule(spec.dfs_phi, "const", spec.omega_bar)


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

_BUILDERS = {
    "SL": build_sl,
    "SS": build_ss,
    "PS": build_ps,
    "C": build_c,
    "DC": build_dc,
    "TO": build_to,
    "S": build_s,
    "CDD": build_cdd,
    "STA": build_sta,
    "DFS3": build_dfs3,
}


def build_schedule(spec: SchemeSpec) -> PulseSchedule:
    """Build the pulse schedule for a scheme spec; raises ValueError for
    unknown tags or parameter domains a scheme cannot realize."""
    try:
        builder = _BUILDERS[spec.scheme]
    except KeyError:
        raise ValueError(
            f"unknown scheme {spec.scheme!r}; known: {', '.join(sorted(_BUILDERS))}"
        ) from None
    return builder(spec)

"""Numerical integration of the Cartesian normal form and of the reduced flow.

These routines act as an independent oracle for the algebraic modules:
section fixed points, return times and time averages are measured from
trajectories of Hamilton's equations for

    K = (1+delta)/2 (P1^2+Q1^2) + 1/2 (P2^2+Q2^2)
        + alpha1/4 (P1^2+Q1^2)^2 + alpha2/4 (P2^2+Q2^2)^2
        + alpha3/4 (P1^2+Q1^2)(P2^2+Q2^2)
        + alpha4/2 [4 P1 Q1 P2 Q2 + (P1^2-Q1^2)(P2^2-Q2^2)].

The section used throughout is ``Q2 = 0`` with ``P2 > 0``.  The normal
mode NM1 (``P1 = Q1 = 0``) pierces it at the origin.
"""

from __future__ import annotations

import cmath
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DriftError, InvalidParameter, InvalidSeed, StepFailure
from .params import ReducedParams, alphas_from_reduced
from .reduced import (
    Family,
    LemonPoint,
    ParabolaSpec,
    contact_lower,
    contact_upper,
    parabola_x,
    quartic_Q,
    reduced_hamiltonian,
    torus_arcs,
)

RTOL = 1e-12
ATOL = 1e-15
DRIFT_TOL = 1e-9
METHOD = "DOP853"


@dataclass(frozen=True)
class State4:
    P1: float
    P2: float
    Q1: float
    Q2: float

    def as_array(self) -> np.ndarray:
        return np.array([self.P1, self.P2, self.Q1, self.Q2], dtype=float)

    @classmethod
    def from_array(cls, y) -> "State4":
        return cls(float(y[0]), float(y[1]), float(y[2]), float(y[3]))


@dataclass(frozen=True)
class Invariants:
    """Oscillator invariants plus derived lemon and Lissajous coordinates.

    ``J`` and ``psi`` are None on the normal modes, where the phase
    difference is undefined (``angles_defined`` is then False).
    """

    I0: float
    I1: float
    I2: float
    I3: float
    X: float
    Y: float
    Z: float
    J: float | None
    psi: float | None

    @property
    def angles_defined(self) -> bool:
        return self.psi is not None


@dataclass(frozen=True)
class SectionPoint:
    Q1: float
    P1: float
    t: float


@dataclass
class Trajectory:
    t: np.ndarray
    y: np.ndarray
    sol: object
    drift_K: float
    drift_I0: float


class _Coeffs:
    __slots__ = ("d1", "a1", "a2", "a3", "a4")

    def __init__(self, rp: ReducedParams):
        a = alphas_from_reduced(rp)
        self.d1 = 1.0 + a.delta
        self.a1, self.a2, self.a3, self.a4 = a.alpha1, a.alpha2, a.alpha3, a.alpha4


def _k(c: _Coeffs, P1, P2, Q1, Q2):
    s1 = P1 * P1 + Q1 * Q1
    s2 = P2 * P2 + Q2 * Q2
    return (
        0.5 * c.d1 * s1
        + 0.5 * s2
        + 0.25 * c.a1 * s1 * s1
        + 0.25 * c.a2 * s2 * s2
        + 0.25 * c.a3 * s1 * s2
        + 0.5 * c.a4 * (4.0 * P1 * Q1 * P2 * Q2 + (P1 * P1 - Q1 * Q1) * (P2 * P2 - Q2 * Q2))
    )


def _rhs(c: _Coeffs, y):
    P1, P2, Q1, Q2 = y[0], y[1], y[2], y[3]
    s1 = P1 * P1 + Q1 * Q1
    s2 = P2 * P2 + Q2 * Q2
    d1 = P1 * P1 - Q1 * Q1
    d2 = P2 * P2 - Q2 * Q2
    f1 = c.d1 + c.a1 * s1 + 0.5 * c.a3 * s2
    f2 = 1.0 + c.a2 * s2 + 0.5 * c.a3 * s1
    h = 0.5 * c.a4
    dK_dP1 = f1 * P1 + h * (4.0 * Q1 * P2 * Q2 + 2.0 * P1 * d2)
    dK_dQ1 = f1 * Q1 + h * (4.0 * P1 * P2 * Q2 - 2.0 * Q1 * d2)
    dK_dP2 = f2 * P2 + h * (4.0 * P1 * Q1 * Q2 + 2.0 * P2 * d1)
    dK_dQ2 = f2 * Q2 + h * (4.0 * P1 * Q1 * P2 - 2.0 * Q2 * d1)
    return [-dK_dQ1, -dK_dQ2, dK_dP1, dK_dP2]


def k_cartesian(rp: ReducedParams, s: State4) -> float:
    return _k(_Coeffs(rp), s.P1, s.P2, s.Q1, s.Q2)


def vector_field(rp: ReducedParams, s: State4) -> State4:
    """Time derivative (dP1, dP2, dQ1, dQ2)."""
    return State4.from_array(_rhs(_Coeffs(rp), s.as_array()))


def _invariants_arr(y):
    P1, P2, Q1, Q2 = y[0], y[1], y[2], y[3]
    I0 = 0.5 * (P1 * P1 + P2 * P2 + Q1 * Q1 + Q2 * Q2)
    I1 = P1 * P2 + Q1 * Q2
    I2 = Q1 * P2 - Q2 * P1
    I3 = 0.5 * (P1 * P1 - P2 * P2 + Q1 * Q1 - Q2 * Q2)
    return I0, I1, I2, I3


def invariants_of(s: State4, tol: float = 1e-14) -> Invariants:
    I0, I1, I2, I3 = _invariants_arr(s.as_array())
    X = I1 * I1 - I2 * I2
    Y = 2.0 * I1 * I2
    J = 0.5 * (I0 + I3)
    if J <= tol * max(I0, 1e-300) or I0 - J <= tol * max(I0, 1e-300):
        return Invariants(I0, I1, I2, I3, X, Y, I3, None, None)
    return Invariants(I0, I1, I2, I3, X, Y, I3, J, math.atan2(I2, I1))


def state_from_invariants(E: float, I1: float, I2: float, I3: float) -> State4:
    """Cartesian state with ``Q2 = 0, P2 > 0`` realizing the given invariants."""
    J2 = 0.5 * (E - I3)
    if not J2 > 0:
        raise InvalidParameter("the section Q2 = 0, P2 > 0 misses NM2 (Z = +E)")
    P2 = math.sqrt(2.0 * J2)
    return State4(P1=I1 / P2, P2=P2, Q1=I2 / P2, Q2=0.0)


def state_from_lemon(E: float, X: float, Y: float, Z: float) -> State4:
    """One of the two Cartesian preimages (on the section) of a lemon point."""
    w = cmath.sqrt(complex(X, Y))
    return state_from_invariants(E, w.real, w.imag, Z)


def seed_state(E: float, Q1: float, P1: float) -> State4:
    """Section seed ``(Q1, P1)`` completed with ``Q2 = 0`` and ``P2 > 0`` on ``I0 = E``."""
    rest = 2.0 * E - Q1 * Q1 - P1 * P1
    if rest < 0:
        raise InvalidSeed(f"seed ({Q1}, {P1}) lies outside the energy level E={E}")
    return State4(P1=P1, P2=math.sqrt(rest), Q1=Q1, Q2=0.0)


# ---------------------------------------------------------------------------
# integration

def _drifts(c, ys):
    K = np.array([_k(c, *y) for y in ys.T])
    I0 = 0.5 * np.sum(ys * ys, axis=0)
    dK = np.max(np.abs(K - K[0])) / max(abs(K[0]), 1e-300)
    dI = np.max(np.abs(I0 - I0[0])) / max(abs(I0[0]), 1e-300)
    return float(dK), float(dI)


def integrate(
    rp: ReducedParams,
    s0: State4,
    tEnd: float,
    rtol: float = RTOL,
    atol: float = ATOL,
    n_out: int = 2001,
    dense: bool = False,
    drift_tol: float | None = DRIFT_TOL,
) -> Trajectory:
    """Integrate Hamilton's equations on ``[0, tEnd]`` with an 8th-order scheme.

    The relative drift of K and I0 over the output grid is measured and
    reported; when ``drift_tol`` is given a larger drift raises
    :class:`DriftError`.
    """
    if not tEnd > 0:
        raise InvalidParameter("tEnd must be positive")
    c = _Coeffs(rp)
    t_eval = np.linspace(0.0, tEnd, n_out)
    res = solve_ivp(
        lambda t, y: _rhs(c, y), (0.0, tEnd), s0.as_array(), method=METHOD,
        rtol=rtol, atol=atol, t_eval=t_eval, dense_output=dense,
    )
    if not res.success:
        raise StepFailure(res.message)
    dK, dI = _drifts(c, res.y)
    if drift_tol is not None and max(dK, dI) > drift_tol:
        raise DriftError(f"drift K={dK:.3e}, I0={dI:.3e} exceeds {drift_tol:.1e}")
    return Trajectory(res.t, res.y, res.sol, dK, dI)


def _q2_event(t, y):
    return y[3]


_q2_event.direction = 1.0


def _section_crossings(c: _Coeffs, y0, n: int, t_skip: float = 0.5, rtol=RTOL, atol=ATOL):
    """First ``n`` upward crossings of Q2 = 0 after ``t_skip`` (states and times)."""
    out_t, out_y = [], []
    t0, y = 0.0, np.asarray(y0, dtype=float)
    chunk = 2.0 * math.pi * (n + 2) * 1.5
    for _ in range(100):
        res = solve_ivp(
            lambda t, yy: _rhs(c, yy), (t0, t0 + chunk), y, method=METHOD,
            rtol=rtol, atol=atol, events=_q2_event, dense_output=True,
        )
        if not res.success:
            raise StepFailure(res.message)
        for te in res.t_events[0]:
            if te <= t_skip:
                continue
            # Newton polish on the dense interpolant
            tt = te
            for _ in range(3):
                ye = res.sol(tt)
                dq = _rhs(c, ye)[3]
                if dq == 0:
                    break
                tt -= ye[3] / dq
            out_t.append(tt)
            out_y.append(res.sol(tt))
            if len(out_t) == n:
                return np.array(out_t), np.array(out_y)
        t0, y = res.t[-1], res.y[:, -1]
    raise StepFailure("section not reached")


def _poincare_one(args):
    rp, E, seed, nCross = args
    c = _Coeffs(rp)
    ts, ys = _section_crossings(c, seed.as_array(), nCross)
    return [SectionPoint(float(y[2]), float(y[0]), float(t)) for t, y in zip(ts, ys)]


def resolve_threads(threads: int | None = None) -> int:
    env = os.environ.get("RESONANCE_ATLAS_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return max(1, int(threads or 1))


def poincare(rp: ReducedParams, E: float, seeds, nCross: int, threads: int | None = None, level_tol: float = 1e-10):
    """Section points ``(Q1, P1)`` for each seed.

    Seeds are ``State4`` on ``I0 = E`` or ``(Q1, P1)`` pairs completed by
    :func:`seed_state`.
    """
    states = []
    for s in seeds:
        if isinstance(s, State4):
            I0 = invariants_of(s).I0
            if abs(I0 - E) > level_tol * max(E, 1e-300):
                raise InvalidSeed(f"seed has I0={I0}, expected {E}")
            states.append(s)
        else:
            states.append(seed_state(E, float(s[0]), float(s[1])))
    jobs = [(rp, E, s, nCross) for s in states]
    n = resolve_threads(threads)
    if n > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            return list(ex.map(_poincare_one, jobs))
    return [_poincare_one(j) for j in jobs]


def default_seeds(E: float, n: int) -> list[tuple[float, float]]:
    """Seeds along ``Q1 = 0``, ``P1`` in ``(-sqrt(2E), sqrt(2E))``."""
    r = math.sqrt(2.0 * E)
    return [(0.0, float(p)) for p in np.linspace(-r, r, n + 2)[1:-1]]


# ---------------------------------------------------------------------------
# section fixed points

@dataclass(frozen=True)
class FixedPoint:
    family: Family
    Q1: float
    P1: float
    index: int | None


def section_fixed_points(rp: ReducedParams, E: float) -> list[FixedPoint]:
    """Fixed points of the section map predicted by the reduced geometry."""
    out = [FixedPoint(Family.NM1, 0.0, 0.0, None)]
    for fn in (contact_upper, contact_lower):
        try:
            cp = fn(rp, E)
        except Exception:
            cp = None
        if cp is None:
            continue
        for sgn in (1.0, -1.0):
            s = state_from_lemon(E, cp.X, 0.0, cp.Z)
            out.append(FixedPoint(cp.family, sgn * s.Q1, sgn * s.P1, cp.index))
    return out


def return_map(rp: ReducedParams, E: float, Q1: float, P1: float, n: int = 1):
    """Image of a section point after ``n`` returns."""
    c = _Coeffs(rp)
    _, ys = _section_crossings(c, seed_state(E, Q1, P1).as_array(), n)
    return float(ys[-1][2]), float(ys[-1][0])


@dataclass(frozen=True)
class Linearization:
    trace: float
    det: float
    elliptic: bool


def linearize_fixed_point(rp: ReducedParams, E: float, Q1: float, P1: float, eps: float | None = None) -> Linearization:
    """Jacobian of the return map from four neighbouring seeds."""
    if eps is None:
        eps = 1e-6 * math.sqrt(2.0 * E)
    cols = []
    for dq, dp in ((eps, 0.0), (0.0, eps)):
        a = return_map(rp, E, Q1 + dq, P1 + dp)
        b = return_map(rp, E, Q1 - dq, P1 - dp)
        cols.append(((a[0] - b[0]) / (2 * eps), (a[1] - b[1]) / (2 * eps)))
    M = np.array(cols).T
    tr = float(np.trace(M))
    return Linearization(tr, float(np.linalg.det(M)), abs(tr) < 2.0)


# ---------------------------------------------------------------------------
# torus measurements

@dataclass(frozen=True)
class TorusMeasurement:
    T2: float
    omega1_exaf: float
    omega1_angle: float
    E: float


def torus_initial_state(rp: ReducedParams, E: float, h: float, component: int = 0) -> State4:
    """State on the torus ``(E, h)`` at the middle of its Z-range."""
    spec = ParabolaSpec(rp, E, h)
    arcs = torus_arcs(spec)
    if not arcs:
        raise InvalidParameter(f"no regular torus at E={E}, h={h}")
    arc = arcs[component]
    Z = 0.5 * (arc.Z1 + arc.Z2)
    X = parabola_x(spec, Z)
    Y = math.sqrt(max(quartic_Q(spec, Z), 0.0))
    return state_from_lemon(E, X, Y, Z)


def measure_torus(rp: ReducedParams, s0: State4, rtol: float = RTOL, atol: float = ATOL) -> TorusMeasurement:
    """Reduced period and fast frequency from one reduced cycle.

    The reduced period is the time between two upward zero crossings of
    ``Y = 2 I1 I2``.  The fast frequency is obtained twice: from the
    time average of ``1 + Delta + 2 A1 E + B Z + 2 C E cos(2 psi)`` and
    from the mean rate of ``(phi1 + phi2)/2`` with ``phi = atan2(P, Q)``.
    """
    c = _Coeffs(rp)
    E = invariants_of(s0).I0
    B, C = rp.B, rp.C

    def rhs(t, y):
        f = _rhs(c, y)
        _, I1, I2, I3 = _invariants_arr(y)
        r = I1 * I1 + I2 * I2
        avg = B * I3 + 2.0 * C * E * (I1 * I1 - I2 * I2) / r
        P1, P2, Q1, Q2 = y[0], y[1], y[2], y[3]
        dphi1 = (Q1 * f[0] - P1 * f[2]) / (P1 * P1 + Q1 * Q1)
        dphi2 = (Q2 * f[1] - P2 * f[3]) / (P2 * P2 + Q2 * Q2)
        return f + [avg, 0.5 * (dphi1 + dphi2)]

    def ev(t, y):
        _, I1, I2, _ = _invariants_arr(y)
        return 2.0 * I1 * I2

    ev.direction = 1.0
    y0 = list(s0.as_array()) + [0.0, 0.0]
    hits = []
    t0 = 0.0
    span = 400.0
    for _ in range(200):
        res = solve_ivp(rhs, (t0, t0 + span), y0, method=METHOD, rtol=rtol, atol=atol, events=ev)
        if not res.success:
            raise StepFailure(res.message)
        for te, ye in zip(res.t_events[0], res.y_events[0]):
            if te > 1e-9:
                hits.append((te, ye))
        if len(hits) >= 2:
            break
        t0, y0 = res.t[-1], res.y[:, -1]
        span *= 2.0
    if len(hits) < 2:
        raise StepFailure("reduced period not detected")
    (ta, ya), (tb, yb) = hits[0], hits[1]
    T = tb - ta
    w_exaf = 1.0 + rp.Delta + 2.0 * rp.A1 * E + (yb[4] - ya[4]) / T
    w_angle = -(yb[5] - ya[5]) / T
    return TorusMeasurement(T, w_exaf, w_angle, E)


def measure_mode_frequency(rp: ReducedParams, E: float, family: Family, periods: int = 20) -> float:
    """Angular frequency of a normal-mode trajectory from its zero crossings."""
    if family is Family.NM1:
        s0, idx = State4(0.0, math.sqrt(2.0 * E), 0.0, 0.0), 3
    elif family is Family.NM2:
        s0, idx = State4(math.sqrt(2.0 * E), 0.0, 0.0, 0.0), 2
    else:
        raise InvalidParameter("normal modes only")
    c = _Coeffs(rp)

    def ev(t, y):
        return y[idx]

    ev.direction = 1.0
    res = solve_ivp(lambda t, y: _rhs(c, y), (0.0, 2.0 * math.pi * (periods + 2)), s0.as_array(),
                    method=METHOD, rtol=RTOL, atol=ATOL, events=ev)
    te = res.t_events[0]
    te = te[te > 1e-9]
    return 2.0 * math.pi * (len(te) - 1) / (te[-1] - te[0])


# ---------------------------------------------------------------------------
# reduced flow on the lemon

@dataclass
class LemonTrajectory:
    t: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    Z: np.ndarray
    E: float
    drift_H: float
    drift_L: float


def lemon_vector_field(rp: ReducedParams, E: float, X: float, Y: float, Z: float):
    """``(dX, dY, dZ)`` from the brackets {X,Y} = 8 sqrt(X^2+Y^2) Z, {Y,Z} = 4X, {Z,X} = 4Y."""
    g = rp.p(E) + 2.0 * rp.A * Z
    rho = math.sqrt(X * X + Y * Y)
    dX = -4.0 * Y * g
    dY = -8.0 * rp.C * rho * Z + 4.0 * X * g
    dZ = 4.0 * rp.C * Y
    return dX, dY, dZ


def reduced_flow(rp: ReducedParams, p0: LemonPoint, tEnd: float, n_out: int = 2001,
                 rtol: float = RTOL, atol: float = ATOL, drift_tol: float | None = DRIFT_TOL) -> LemonTrajectory:
    E = p0.E
    scale4 = max(E**4, 1e-300)
    if abs(p0.constraint()) > 1e-10 * scale4:
        raise InvalidParameter("initial point is not on the lemon")

    def rhs(t, y):
        return lemon_vector_field(rp, E, y[0], y[1], y[2])

    t_eval = np.linspace(0.0, tEnd, n_out)
    res = solve_ivp(rhs, (0.0, tEnd), [p0.X, p0.Y, p0.Z], method=METHOD, rtol=rtol, atol=atol, t_eval=t_eval)
    if not res.success:
        raise StepFailure(res.message)
    X, Y, Z = res.y
    H = reduced_hamiltonian(rp, E, X, Z)
    L = X * X + Y * Y - ((E + Z) * (E - Z)) ** 2
    hscale = max(abs(H[0]), E * E * max(abs(rp.A), abs(rp.C), 1e-300))
    dH = float(np.max(np.abs(H - H[0])) / hscale)
    dL = float(np.max(np.abs(L)) / scale4)
    if drift_tol is not None and max(dH, dL) > drift_tol:
        raise DriftError(f"reduced flow drift H={dH:.3e}, L={dL:.3e}")
    return LemonTrajectory(res.t, X, Y, Z, E, dH, dL)


def saddle_connection_distance(rp: ReducedParams, E: float, tEnd: float, offset: float = 1e-6) -> float:
    """Closest approach to NM2 of the reduced orbit leaving NM1 on the level h1.

    Returns the minimal distance in units of E; a small value indicates a
    separatrix joining the two vertices.
    """
    from .reduced import h_nm1

    spec = ParabolaSpec(rp, E, h_nm1(rp, E))
    Z = -E + offset * E
    X = parabola_x(spec, Z)
    Q = quartic_Q(spec, Z)
    if Q < 0:
        raise InvalidParameter("NM1 is not a saddle at this energy")
    tr = reduced_flow(rp, LemonPoint(X, math.sqrt(Q), Z, E), tEnd, n_out=20001, drift_tol=None)
    d = np.sqrt(tr.X**2 + tr.Y**2 + (tr.Z - E) ** 2)
    return float(np.min(d) / E)

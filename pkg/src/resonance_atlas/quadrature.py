"""Actions, periods and rotation numbers of the invariant tori.

A regular torus at ``(E, h)`` projects onto an interval ``[Z1, Z2]`` on
which ``Q(Z) >= 0``.  With ``Z = Z1 + (Z2 - Z1) sin(theta)**2`` the
inverse square-root endpoint singularities cancel exactly:
``dZ / sqrt(Q) = 2 dtheta / sqrt(G)``, where ``G = Q / ((Z - Z1)(Z2 - Z))``
is obtained by deflating the two quadratic factors of Q analytically.

Orientation: the closed-cycle prefactors carry ``1/C``.  Periods and the
rotation number are reported for the positive orientation; the sign of
C is kept in ``FrequencyReport.orientation`` so that
``dJ2/dh = orientation * T2 / (2 pi)`` and
``-dJ2/dE (fixed K) = orientation * W``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import integrate

from .errors import DegenerateRoots, NonRegularValue, NotApplicable, PoleOnPath
from .params import ReducedParams
from .reduced import (
    Arc,
    Family,
    ParabolaSpec,
    TorusArc,
    contact,
    parabola_x,
    q_factors,
    torus_arcs,
)

QUAD_OPTS = dict(epsabs=1e-13, epsrel=1e-12, limit=200)
DOUBLE_ROOT_SEP = 1e-5
POLE_TOL = 1e-10


@dataclass(frozen=True)
class TorusCoords:
    """A point of the energy-momentum image, plus which torus of the fibre.

    ``component`` indexes the tori of a disconnected fibre in order of
    increasing Z; it may be omitted when the fibre is a single torus.
    """

    E: float
    h: float
    rp: ReducedParams
    component: int | None = None

    @property
    def spec(self) -> ParabolaSpec:
        return ParabolaSpec(self.rp, self.E, self.h)


@dataclass(frozen=True)
class FrequencyReport:
    omega1: float
    omega2: float
    W: float
    T2: float
    J2: float
    orientation: int = 1


@dataclass(frozen=True)
class FrequencyValue:
    """Frequency magnitude; ``imaginary`` marks an unstable family."""

    value: float
    imaginary: bool = False


@dataclass(frozen=True)
class ResidueReport:
    T: float
    imaginary: bool
    a0: float
    radicand: float
    sign_adjusted: bool = False


def torus_arc(t: TorusCoords, check_gap: bool = True) -> TorusArc:
    """Turning-point interval of the selected torus."""
    if not t.E > 0:
        raise NonRegularValue("E must be positive")
    if t.rp.C == 0:
        raise NonRegularValue("C = 0")
    arcs = torus_arcs(t.spec)
    if not arcs:
        raise NonRegularValue(f"no regular torus at E={t.E}, h={t.h}")
    if t.component is None:
        if len(arcs) > 1:
            raise NonRegularValue(f"fibre has {len(arcs)} tori; choose a component")
        arc = arcs[0]
    else:
        if not 0 <= t.component < len(arcs):
            raise NonRegularValue(f"component {t.component} out of range ({len(arcs)} tori)")
        arc = arcs[t.component]
    if check_gap and arc.Z2 - arc.Z1 < DOUBLE_ROOT_SEP * t.E:
        raise DegenerateRoots("turning points nearly coincide; use residue_period")
    return arc


def n_components(rp: ReducedParams, E: float, h: float) -> int:
    return len(torus_arcs(ParabolaSpec(rp, E, h)))


def _deflated(t: TorusCoords, arc: TorusArc):
    """Callable ``G(Z) = Q(Z) / ((Z - Z1)(Z2 - Z))``, positive on the arc."""
    up, lo = q_factors(t.spec)
    f = {Arc.Upper: up, Arc.Lower: lo}
    f1, f2 = f[arc.arc1], f[arc.arc2]
    Z1, Z2 = arc.Z1, arc.Z2
    if arc.arc1 is arc.arc2:
        other = lo if f1 is up else up
        c = f1.c
        return lambda Z: -c * other(Z)
    return lambda Z: -(f1.c * (Z + Z1) + f1.b) * (f2.c * (Z + Z2) + f2.b)


def _theta_integral(t: TorusCoords, arc: TorusArc, g):
    """``int_{Z1}^{Z2} g(Z) dZ / sqrt(Q)`` via the sine-squared substitution."""
    G = _deflated(t, arc)
    Z1, dZ = arc.Z1, arc.Z2 - arc.Z1

    def integrand(th):
        Z = Z1 + dZ * math.sin(th) ** 2
        return 2.0 * g(Z) / math.sqrt(G(Z))

    val, _ = integrate.quad(integrand, 0.0, 0.5 * math.pi, **QUAD_OPTS)
    return val


def period_T2(t: TorusCoords) -> float:
    """Reduced period ``|(1/4C) oint dZ/sqrt(Q)|``."""
    arc = torus_arc(t)
    I = _theta_integral(t, arc, lambda Z: 1.0)
    return I / (2.0 * abs(t.rp.C))


def rotation_W(t: TorusCoords) -> float:
    """Rotation number ``omega1 / omega2`` (positive orientation)."""
    arc = torus_arc(t)
    E = t.E
    if min(arc.Z1 + E, E - arc.Z2) <= POLE_TOL * E:
        raise PoleOnPath("turning point at a vertex")
    rp = t.rp
    base = 1.0 + rp.Delta + 2.0 * rp.A1 * E
    spec = t.spec

    def g(Z):
        return base + rp.B * Z + 2.0 * rp.C * E * parabola_x(spec, Z) / (E * E - Z * Z)

    I = _theta_integral(t, arc, g)
    return I / (4.0 * math.pi * abs(rp.C))


def action_J2(t: TorusCoords) -> float:
    """Nontrivial action ``-(1/8 pi) oint arccos(Xcal / (E^2 - Z^2)) dZ``.

    The angle ``Theta = arccos(Xcal/(E^2-Z^2))`` is 0 at an upper-arc
    turning point and pi at a lower-arc one.  Integrating
    ``Theta - pi`` near lower-arc endpoints (the continuous branch there)
    keeps J2 smooth in (E, h), so that its derivatives reproduce the
    period and the rotation number.
    """
    arc = torus_arc(t)
    G = _deflated(t, arc)
    spec = t.spec
    Z1, dZ = arc.Z1, arc.Z2 - arc.Z1

    def integrand(th):
        s, c = math.sin(th), math.cos(th)
        Z = Z1 + dZ * s * s
        sqrtQ = dZ * s * c * math.sqrt(G(Z))
        ang = math.atan2(sqrtQ, parabola_x(spec, Z))
        return ang * 2.0 * dZ * s * c

    val, _ = integrate.quad(integrand, 0.0, 0.5 * math.pi, **QUAD_OPTS)
    J = -val / (4.0 * math.pi)
    if arc.arc2 is Arc.Lower:
        J += 0.25 * arc.Z2
    if arc.arc1 is Arc.Lower:
        J -= 0.25 * arc.Z1
    return J


def frequencies(t: TorusCoords) -> FrequencyReport:
    T2 = period_T2(t)
    W = rotation_W(t)
    w2 = 2.0 * math.pi / T2
    return FrequencyReport(
        omega1=w2 * W,
        omega2=w2,
        W=W,
        T2=T2,
        J2=action_J2(t),
        orientation=1 if t.rp.C > 0 else -1,
    )


# ---------------------------------------------------------------------------
# periodic orbits

def _require_contact(rp, E, family):
    cp = contact(rp, E, family)
    if cp is None:
        raise NotApplicable(f"no {family.value} contact at E={E}")
    return cp


def omega2_periodic(rp: ReducedParams, E: float, family: Family) -> FrequencyValue:
    """Small-oscillation frequency around a periodic family in the reduced system."""
    _require_contact(rp, E, family)
    A, B, C, D = rp.A, rp.B, rp.C, rp.Delta
    k = A - C if family is Family.Inclined else A + C
    pref = 2.0 * C / (C - A) if family is Family.Inclined else 2.0 * C / (C + A)
    rad = 4.0 * pref * ((2.0 * k - B) * E - D) * (D + (2.0 * k + B) * E)
    return FrequencyValue(math.sqrt(abs(rad)), rad < 0)


def omega1_periodic(rp: ReducedParams, E: float, family: Family) -> float:
    """Fast frequency along a normal mode or a periodic family.

    NM1 is the vertex Z = -E (all energy in the second oscillator), so its
    frequency has no detuning shift; NM2 (Z = +E) carries ``2 Delta``.
    """
    A, B, C, D, A1 = rp.A, rp.B, rp.C, rp.Delta, rp.A1
    if family is Family.NM1:
        return 1.0 + 2.0 * (A1 + A - B) * E
    if family is Family.NM2:
        return 1.0 + 2.0 * D + 2.0 * (A1 + A + B) * E
    _require_contact(rp, E, family)
    p = rp.p(E)
    if family is Family.Inclined:
        return 1.0 + D + 2.0 * (A1 + C) * E + B * p / (2.0 * (C - A))
    return 1.0 + D + 2.0 * (A1 - C) * E - B * p / (2.0 * (C + A))


def residue_period(rp: ReducedParams, E: float, family: Family) -> ResidueReport:
    """Limit of T2 as the torus shrinks onto the periodic orbit.

    ``T = 2 pi / sqrt(a0 (Z1 - Zc)(Zc - Z2))`` with ``a0 = 16 (C-A)(C+A)`` and
    ``Z1, Z2`` the roots of the factor of Q not touching at ``Zc``.  The
    product is evaluated as ``-F_other(Zc) / c_other``, which stays real
    even when those roots are complex.  With this a0 the radicand is
    positive exactly for stable families, so no sign flip is needed.
    """
    cp = _require_contact(rp, E, family)
    up, lo = q_factors(ParabolaSpec(rp, E, cp.h))
    other = lo if family is Family.Inclined else up
    a0 = 16.0 * (rp.C - rp.A) * (rp.C + rp.A)
    prod = -other(cp.Z) / other.c
    rad = a0 * prod
    if rad <= 0:
        return ResidueReport(math.inf if rad == 0 else 2.0 * math.pi / math.sqrt(-rad), True, a0, rad)
    return ResidueReport(2.0 * math.pi / math.sqrt(rad), False, a0, rad)

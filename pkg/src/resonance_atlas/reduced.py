"""Geometry of the reduced phase space.

The lemon space at fixed ``E`` is ``X**2 + Y**2 = (E**2 - Z**2)**2`` with
``|Z| <= E``.  Level sets of the reduced Hamiltonian
``H = C X + (B E + Delta) Z + A Z**2`` are parabolas ``X = Xcal(Z)`` in the
(Z, X) plane; their tangencies with the upper arc ``X = E**2 - Z**2`` give
inclined orbits and those with the lower arc ``X = -(E**2 - Z**2)`` give
loop orbits.  The vertices ``Z = -E`` and ``Z = +E`` are the normal modes
NM1 and NM2.

The quartic ``Q(Z) = (E**2 - Z**2)**2 - Xcal(Z)**2`` factors as
``F_up(Z) * F_lo(Z)`` with ``F_up = E**2 - Z**2 - Xcal`` and
``F_lo = E**2 - Z**2 + Xcal``.  Most routines below work with the two
quadratic factors, which keeps root finding exact and lets quadratures
deflate the turning points analytically.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DegenerateContact, InvalidParameter, UseDegenerateBranch
from .params import DEFAULT_TOL, ReducedParams

ROOT_MERGE_TOL = 1e-6


class Family(enum.Enum):
    NM1 = "NM1"
    NM2 = "NM2"
    Inclined = "Inclined"
    Loop = "Loop"


class Arc(enum.Enum):
    Upper = "upper"
    Lower = "lower"


@dataclass(frozen=True)
class LemonPoint:
    X: float
    Y: float
    Z: float
    E: float

    def constraint(self) -> float:
        """Residual of ``X^2 + Y^2 - (E+Z)^2 (E-Z)^2``."""
        return self.X**2 + self.Y**2 - ((self.E + self.Z) * (self.E - self.Z)) ** 2


@dataclass(frozen=True)
class ContactPoint:
    """Isolated tangency of a level parabola with one arc of the lemon."""

    Z: float
    X: float
    h: float
    family: Family
    index: int
    psi: float

    @property
    def stable(self) -> bool:
        return self.index > 0


@dataclass(frozen=True)
class ParabolaSpec:
    rp: ReducedParams
    E: float
    h: float

    def __post_init__(self):
        if not (math.isfinite(self.E) and math.isfinite(self.h)):
            raise InvalidParameter("E and h must be finite")
        if self.E < 0:
            raise InvalidParameter("E must be non-negative")


def _band(rp: ReducedParams) -> float:
    return DEFAULT_TOL * max(abs(rp.A), abs(rp.C), 1.0)


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def reduced_hamiltonian(rp: ReducedParams, E, X, Z):
    """``C X + (B E + Delta) Z + A Z**2`` (array friendly)."""
    return rp.C * X + (rp.B * E + rp.Delta) * Z + rp.A * Z * Z


def parabola_x(spec: ParabolaSpec, Z):
    """X coordinate of the level parabola at ``Z``."""
    rp = spec.rp
    if rp.C == 0:
        raise UseDegenerateBranch("C = 0: the level set is not a parabola in X")
    return (spec.h - rp.p(spec.E) * Z - rp.A * Z * Z) / rp.C


def vertex(spec: ParabolaSpec) -> tuple[float, float]:
    """Apex ``(Z_V, X_V)`` of the level parabola."""
    rp = spec.rp
    if rp.A == 0 or rp.C == 0:
        raise UseDegenerateBranch("A = 0 or C = 0: the level set has no vertex")
    p = rp.p(spec.E)
    return -p / (2.0 * rp.A), (spec.h + p * p / (4.0 * rp.A)) / rp.C


def h_nm1(rp: ReducedParams, E):
    """Reduced energy of normal mode NM1 (vertex Z = -E)."""
    return E * ((rp.A - rp.B) * E - rp.Delta)


def h_nm2(rp: ReducedParams, E):
    """Reduced energy of normal mode NM2 (vertex Z = +E)."""
    return E * ((rp.A + rp.B) * E + rp.Delta)


def _check_contact_pre(rp: ReducedParams, E: float):
    if not E > 0:
        raise InvalidParameter("E must be positive")
    if abs(rp.C) <= _band(rp):
        raise UseDegenerateBranch("C = 0: no isolated contacts")


def contact_upper(rp: ReducedParams, E: float) -> ContactPoint | None:
    """Tangency with the upper arc (inclined orbits), if it exists."""
    _check_contact_pre(rp, E)
    if abs(rp.A - rp.C) <= _band(rp):
        raise DegenerateContact("A = C: the upper arc is tangent everywhere or nowhere")
    Z = rp.p(E) / (2.0 * (rp.C - rp.A))
    if not -E < Z < E:
        return None
    return ContactPoint(
        Z=Z,
        X=E * E - Z * Z,
        h=rp.C * E * E + (rp.C - rp.A) * Z * Z,
        family=Family.Inclined,
        index=_sign(rp.C * (rp.C - rp.A)),
        psi=0.0,
    )


def contact_lower(rp: ReducedParams, E: float) -> ContactPoint | None:
    """Tangency with the lower arc (loop orbits), if it exists."""
    _check_contact_pre(rp, E)
    if abs(rp.A + rp.C) <= _band(rp):
        raise DegenerateContact("A = -C: the lower arc is tangent everywhere or nowhere")
    Z = -rp.p(E) / (2.0 * (rp.A + rp.C))
    if not -E < Z < E:
        return None
    return ContactPoint(
        Z=Z,
        X=-(E * E - Z * Z),
        h=-rp.C * E * E - (rp.A + rp.C) * Z * Z,
        family=Family.Loop,
        index=_sign(rp.C * (rp.A + rp.C)),
        psi=0.5 * math.pi,
    )


def contact(rp: ReducedParams, E: float, family: Family) -> ContactPoint | None:
    if family is Family.Inclined:
        return contact_upper(rp, E)
    if family is Family.Loop:
        return contact_lower(rp, E)
    raise InvalidParameter(f"{family} is not a contact family")


# ---------------------------------------------------------------------------
# existence intervals in E

def _band_interval(p: float, q: float, d: float) -> tuple[float, float] | None:
    """Open set ``{E > 0 : |p E + d| < q E}`` as ``(lo, hi)`` or None."""
    lo, hi = 0.0, math.inf
    # (p + q) E + d > 0  and  (q - p) E - d > 0
    for a, c in ((p + q, d), (q - p, -d)):
        if a > 0:
            lo = max(lo, -c / a)
        elif a < 0:
            hi = min(hi, -c / a)
        elif c <= 0:
            return None
    if lo < hi:
        return lo, hi
    return None


def existence_interval(rp: ReducedParams, family: Family) -> tuple[float, float] | None:
    """E-interval where the contact of ``family`` lies strictly inside the arc."""
    if family is Family.Inclined:
        if abs(rp.A - rp.C) <= _band(rp) or abs(rp.C) <= _band(rp):
            return None
        return _band_interval(rp.B, 2.0 * abs(rp.C - rp.A), rp.Delta)
    if family is Family.Loop:
        if abs(rp.A + rp.C) <= _band(rp) or abs(rp.C) <= _band(rp):
            return None
        return _band_interval(rp.B, 2.0 * abs(rp.A + rp.C), rp.Delta)
    raise InvalidParameter(f"{family} is not a contact family")


def nm_unstable_interval(rp: ReducedParams, family: Family) -> tuple[float, float] | None:
    """E-interval where the normal mode is unstable (hyperbolic vertex).

    Near the vertex the reduced energy changes as
    ``zeta * (2 C E cos(theta) + s)`` with ``s = (B - 2A) E + Delta`` at NM1
    and ``s = -((B + 2A) E + Delta)`` at NM2; the mode is unstable when the
    bracket changes sign, i.e. ``|s| < 2 |C| E``.
    """
    if family is Family.NM1:
        return _band_interval(rp.B - 2.0 * rp.A, 2.0 * abs(rp.C), rp.Delta)
    if family is Family.NM2:
        return _band_interval(rp.B + 2.0 * rp.A, 2.0 * abs(rp.C), rp.Delta)
    raise InvalidParameter(f"{family} is not a normal mode")


def nm_slope(rp: ReducedParams, E: float, family: Family) -> float:
    """Coefficient ``s`` above; positive means the vertex is a local minimum when stable."""
    if family is Family.NM1:
        return (rp.B - 2.0 * rp.A) * E + rp.Delta
    return -((rp.B + 2.0 * rp.A) * E + rp.Delta)


def nm_stable(rp: ReducedParams, E: float, family: Family) -> bool:
    return abs(nm_slope(rp, E, family)) > 2.0 * abs(rp.C) * E


def _inside(interval, E) -> bool:
    return interval is not None and interval[0] < E < interval[1]


# ---------------------------------------------------------------------------
# quartic Q and its factors

@dataclass(frozen=True)
class Quadratic:
    """``c Z**2 + b Z + a`` with its arc label."""

    c: float
    b: float
    a: float
    arc: Arc

    def __call__(self, Z):
        return (self.c * Z + self.b) * Z + self.a

    def derivative(self, Z):
        return 2.0 * self.c * Z + self.b

    def scale(self) -> float:
        return max(abs(self.c), abs(self.b), abs(self.a))


def q_factors(spec: ParabolaSpec) -> tuple[Quadratic, Quadratic]:
    """``(F_up, F_lo)`` with ``Q = F_up * F_lo``."""
    rp, E, h = spec.rp, spec.E, spec.h
    if rp.C == 0:
        raise UseDegenerateBranch("C = 0")
    p = rp.p(E)
    r = rp.A / rp.C
    up = Quadratic(r - 1.0, p / rp.C, E * E - h / rp.C, Arc.Upper)
    lo = Quadratic(-r - 1.0, -p / rp.C, E * E + h / rp.C, Arc.Lower)
    return up, lo


def quartic_Q(spec: ParabolaSpec, Z):
    """``(E^2 - Z^2)^2 - Xcal(Z)^2``."""
    x = parabola_x(spec, Z)
    r = spec.E**2 - Z * Z
    return r * r - x * x


@dataclass(frozen=True)
class QRoot:
    value: float
    multiplicity: int
    arcs: tuple[Arc, ...]


@dataclass(frozen=True)
class RootReport:
    roots: tuple[QRoot, ...]
    n_complex: int
    degenerate: bool

    def values(self) -> list[float]:
        return [r.value for r in self.roots]


def _quadratic_roots(f: Quadratic, E: float):
    """Real roots of one factor: (list of (value, multiplicity), n_complex, identically_zero)."""
    # coefficients scale like 1, E, E^2; compare each against its own unit
    unit = max(1.0, abs(f.c))
    tiny = 1e-12
    if abs(f.c) <= tiny * unit:
        if abs(f.b) <= tiny * unit * E:
            return [], 0, abs(f.a) <= tiny * unit * E * E
        return [(-f.a / f.b, 1)], 0, False
    disc = f.b * f.b - 4.0 * f.c * f.a
    sep_tol = ROOT_MERGE_TOL * max(E, 1e-300)
    if disc < 0:
        # complex pair, unless the imaginary parts are within the merge band
        if -disc <= (sep_tol * f.c) ** 2:
            return [(-f.b / (2.0 * f.c), 2)], 0, False
        return [], 2, False
    sq = math.sqrt(disc)
    if sq <= sep_tol * abs(f.c):
        return [(-f.b / (2.0 * f.c), 2)], 0, False
    # numerically stable pair
    qq = -0.5 * (f.b + math.copysign(sq, f.b))
    r1 = qq / f.c
    r2 = f.a / qq if qq != 0 else -r1
    return sorted([(r1, 1), (r2, 1)]), 0, False


def roots_Q(spec: ParabolaSpec) -> RootReport:
    """All real roots of Q with multiplicities, sorted ascending."""
    up, lo = q_factors(spec)
    tagged = []
    n_complex = 0
    degenerate = False
    for f in (up, lo):
        rts, nc, zero = _quadratic_roots(f, spec.E)
        n_complex += nc
        degenerate = degenerate or zero
        tagged.extend((v, m, f.arc) for v, m in rts)
    tagged.sort(key=lambda t: t[0])
    merged: list[QRoot] = []
    sep_tol = ROOT_MERGE_TOL * max(spec.E, 1e-300)
    for v, m, arc in tagged:
        if merged and abs(v - merged[-1].value) <= sep_tol:
            last = merged[-1]
            merged[-1] = QRoot(last.value, last.multiplicity + m, last.arcs + (arc,))
        else:
            merged.append(QRoot(v, m, (arc,)))
    return RootReport(tuple(merged), n_complex, degenerate)


@dataclass(frozen=True)
class TorusArc:
    """Z-range ``[Z1, Z2]`` swept by one invariant torus and the arcs hit at its ends."""

    Z1: float
    Z2: float
    arc1: Arc
    arc2: Arc


def torus_arcs(spec: ParabolaSpec) -> list[TorusArc]:
    """Connected components of ``{Q >= 0} within (-E, E)`` bounded by simple roots.

    Inside the open interval, ``Q >= 0`` is equivalent to both factors
    being non-negative, so each component is an interval whose endpoints
    are simple roots of ``F_up`` (upper arc) or ``F_lo`` (lower arc).
    Components touching a vertex or a double root are skipped: they do
    not correspond to regular tori.
    """
    E = spec.E
    report = roots_Q(spec)
    if report.degenerate or E <= 0:
        return []
    up, lo = q_factors(spec)
    pts = [(r.value, r) for r in report.roots if -E < r.value < E]
    breaks = [(-E, None)] + pts + [(E, None)]
    out = []
    for (za, ra), (zb, rb) in zip(breaks[:-1], breaks[1:]):
        mid = 0.5 * (za + zb)
        if not (up(mid) > 0 and lo(mid) > 0):
            continue
        if ra is None or rb is None or ra.multiplicity != 1 or rb.multiplicity != 1:
            continue
        out.append(TorusArc(za, zb, ra.arcs[0], rb.arcs[0]))
    return out


# ---------------------------------------------------------------------------
# degenerate stratum A = 0

@dataclass(frozen=True)
class DegenerateReport:
    """Straight-line level sets when A = 0.

    Threshold values are raw formula values: negative means the event
    does not occur for E > 0 and ``inf`` means it is pushed to infinity.
    """

    m: float
    h_bar: float
    E1U: float
    E2U: float
    E1L: float
    E2L: float
    simultaneous: bool

    def present(self) -> dict[str, float]:
        return {
            k: v
            for k, v in (("E1U", self.E1U), ("E2U", self.E2U), ("E1L", self.E1L), ("E2L", self.E2L))
            if v >= 0 and math.isfinite(v)
        }


def _ratio(num: float, den: float) -> float:
    if den == 0:
        return math.inf if num != 0 else 0.0
    return num / den


def degenerate_line_analysis(rp: ReducedParams, E: float) -> DegenerateReport:
    """Level lines ``X = (h - (B E + Delta) Z) / C`` of the A = 0 stratum.

    ``h_bar`` is the level of the line through the vertex NM1, the
    critical value beyond which the line can meet the upper arc only once.
    """
    if abs(rp.A) > _band(rp):
        raise InvalidParameter("degenerate_line_analysis requires A = 0")
    if rp.C == 0:
        raise UseDegenerateBranch("C = 0")
    p = rp.p(E)
    e1u = _ratio(-rp.Delta, rp.B + 2.0 * rp.C)
    e2u = _ratio(-rp.Delta, rp.B - 2.0 * rp.C)
    return DegenerateReport(
        m=-p / rp.C,
        h_bar=-p * E,
        E1U=e1u,
        E2U=e2u,
        E1L=e2u,
        E2L=e1u,
        simultaneous=True,
    )

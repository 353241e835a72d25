"""Application presets: elliptical-equipotential galaxies, disk-star
levitation, collinear Lagrange points and the Henon-Heiles unfolding."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import InvalidC2, InvalidParameter, NotApplicable
from .params import (
    Alphas,
    NaturalCoefficients,
    ReducedParams,
    alphas_from_natural,
    reduced_from_alphas,
)

L_MAX = math.exp(-0.5)


# ---------------------------------------------------------------------------
# elliptical equipotentials

@dataclass(frozen=True)
class GalacticModel:
    """Potential with self-similar elliptical equipotentials.

    ``alpha`` is the radial profile parameter in (-1, 2]; ``b`` the axis
    ratio of the equipotentials.
    """

    alpha: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.alpha) and math.isfinite(self.b)):
            raise InvalidParameter("alpha and b must be finite")
        if not -1.0 < self.alpha <= 2.0:
            raise InvalidParameter(f"alpha must lie in (-1, 2], got {self.alpha}")
        if not self.b > 0:
            raise InvalidParameter(f"b must be positive, got {self.b}")


@dataclass(frozen=True)
class GalacticThresholds:
    e1L: float
    e2L: float
    e1U: float | None
    e2U: float | None
    order: int
    # exact reduced coefficients at this (alpha, b); inclined orbits are
    # excluded at leading order because A = C at b = 1
    A: float
    C: float
    inclined_forbidden_leading_order: bool = True


def galactic_alphas(m: GalacticModel) -> tuple[Alphas, ReducedParams]:
    """Normal-form coefficients after scaling both oscillators to unit frequency."""
    k = m.alpha - 2.0
    a = Alphas(
        alpha1=3.0 * m.b * k / 16.0,
        alpha2=3.0 * k / (16.0 * m.b),
        alpha3=k / 4.0,
        alpha4=k / 16.0,
        delta=m.b - 1.0,
    )
    return a, reduced_from_alphas(a)


def galactic_generic_first_order(m: GalacticModel) -> tuple[float, float]:
    """Loop thresholds from the generic formulas, coefficients frozen at b = 1.

    Returns ``(e1L, e2L)`` evaluated as ``Delta / (+-2(A+C) - B)`` with
    ``Delta = (b-1)/2`` and A, B, C taken at exact resonance.
    """
    _, rp0 = galactic_alphas(GalacticModel(m.alpha, 1.0))
    D = 0.5 * (m.b - 1.0)
    s = 2.0 * (rp0.A + rp0.C)
    if s == 0:
        raise NotApplicable("harmonic profile: no quartic coupling")
    return D / (s - rp0.B), D / (-s - rp0.B)


def galactic_thresholds(m: GalacticModel, order: int = 1) -> GalacticThresholds:
    """Loop and inclined thresholds to first or second order in the detuning."""
    if m.alpha == 2.0:
        raise InvalidParameter("alpha = 2 is the harmonic case; thresholds diverge")
    if order not in (1, 2):
        raise InvalidParameter("order must be 1 or 2")
    _, rp = galactic_alphas(m)
    a, u = m.alpha, 1.0 - m.b
    e1 = 4.0 * u / (2.0 - a)
    e2 = -e1
    if order == 2:
        e1 += 2.0 * (2.0 + 3.0 * a) / (a - 2.0) ** 2 * u * u
        e2 += 2.0 * (5.0 * a - 2.0) / (a - 2.0) ** 2 * u * u
    eu = 8.0 / (6.0 - 3.0 * a) if order == 1 else None
    return GalacticThresholds(e1, e2, eu, eu, order, rp.A, rp.C)


# ---------------------------------------------------------------------------
# levitation in axisymmetric disks

class LevitationBranch(enum.Enum):
    """Which normal mode loses stability: the thin tube (delta < 0) or the disk orbit."""

    ThinTube = "ThinTube"
    Disk = "Disk"
    ExactResonance = "ExactResonance"


@dataclass(frozen=True)
class LevitationModel:
    alpha: float
    b: float
    L: float

    def __post_init__(self):
        GalacticModel(self.alpha, self.b)
        if not (math.isfinite(self.L) and 0.0 < self.L <= L_MAX * (1.0 + 1e-15)):
            raise InvalidParameter(f"L must lie in (0, {L_MAX}], got {self.L}")


@dataclass(frozen=True)
class LevitationReport:
    Rc: float
    beta: float
    kappa: float
    nu: float
    delta: float
    E_tilde: float
    E_alpha: float
    coefficients: dict


def levitation_detuning(alpha: float, b: float) -> float:
    return b * math.sqrt(2.0 + alpha) - 1.0


def expansion_coefficients(alpha: float, b: float) -> dict:
    """Coefficients ``c_jk`` of the rescaled effective potential around the circular orbit."""
    a = alpha
    return {
        "c20": (2.0 + a) / 2.0,
        "c02": 1.0 / (2.0 * b * b),
        "c30": -(10.0 + 3.0 * a - a * a) / 6.0,
        "c12": -(2.0 - a) / (2.0 * b * b),
        "c40": -(54.0 + 11.0 * a - 6.0 * a * a + a**3) / 24.0,
        "c22": -(6.0 - 5.0 * a - a * a) / (4.0 * b * b),
        "c04": -(2.0 - a) / (8.0 * b**4),
    }


def fictitious_energy(alpha: float, L: float) -> float:
    """Rescaled energy of the meridional motion; logarithmic form at alpha = 0."""
    if alpha == 0.0:
        return math.log(L_MAX / L)
    beta = -2.0 * alpha / (2.0 + alpha)
    return (1.0 - (L / L_MAX) ** beta) / beta


def levitation_model(alpha: float, b: float, L: float) -> LevitationReport:
    m = LevitationModel(alpha, b, L)
    a = m.alpha
    beta = -2.0 * a / (2.0 + a)
    tscale = L ** (beta + 1.0)
    E_alpha = 0.0 if a == 0.0 else (0.5 + 1.0 / a) * math.exp(-a / (2.0 + a))
    return LevitationReport(
        Rc=L ** (2.0 / (2.0 + a)),
        beta=beta,
        kappa=math.sqrt(2.0 + a) / tscale,
        nu=1.0 / (b * tscale),
        delta=levitation_detuning(a, b),
        E_tilde=fictitious_energy(a, L),
        E_alpha=E_alpha,
        coefficients=expansion_coefficients(a, b),
    )


def _branch(delta: float) -> LevitationBranch:
    if delta < 0:
        return LevitationBranch.ThinTube
    if delta > 0:
        return LevitationBranch.Disk
    return LevitationBranch.ExactResonance


def levitation_branch_L(alpha: float, b: float, branch: LevitationBranch) -> float:
    """Closed-form critical L on a given branch, first order in the detuning.

    Either branch may be evaluated on either side of resonance, so the two
    can be compared where they meet.  A non-positive base of the power
    (far from resonance) is reported as NotApplicable.
    """
    GalacticModel(alpha, b)
    if branch is LevitationBranch.ExactResonance:
        return L_MAX
    d = levitation_detuning(alpha, b)
    tube = branch is LevitationBranch.ThinTube
    a = alpha
    if a == 0.0:
        s2b = math.sqrt(2.0) * b
        return math.exp(-29.0 / 10.0 + 12.0 / 5.0 * s2b) if tube else math.exp(5.5 - 6.0 * s2b)
    den = 2.0 + a - a * a
    if den == 0.0:
        # alpha = 2: the critical energy is infinite off resonance
        return L_MAX if d == 0.0 else 0.0
    base = 1.0 - 24.0 * a * d / (5.0 * den) if tube else 1.0 + 12.0 * a * d / den
    if base <= 0:
        raise NotApplicable(f"first-order formula breaks down (base {base:.3g})")
    return L_MAX * base ** (-(2.0 + a) / (2.0 * a))


def levitation_critical_L(alpha: float, b: float) -> tuple[float, LevitationBranch]:
    """Critical angular momentum below which inclined orbits exist.

    The branch is selected by the sign of the detuning.
    """
    GalacticModel(alpha, b)
    br = _branch(levitation_detuning(alpha, b))
    return levitation_branch_L(alpha, b, br), br


def levitation_critical_energy(alpha: float, b: float) -> float:
    """First-order critical fictitious energy for either sign of the detuning."""
    d = levitation_detuning(alpha, b)
    a = alpha
    den = 2.0 + a - a * a
    if den == 0.0:
        raise NotApplicable("alpha = 2: no quartic coupling")
    if d < 0:
        return 12.0 * (2.0 + a) / (5.0 * (-den)) * d
    return 6.0 * (2.0 + a) / den * d


def critical_L_from_energy(alpha: float, E_tilde: float) -> float:
    """Invert the energy-angular-momentum relation."""
    if alpha == 0.0:
        return L_MAX * math.exp(-E_tilde)
    beta = -2.0 * alpha / (2.0 + alpha)
    base = 1.0 - beta * E_tilde
    if base <= 0:
        raise NotApplicable("energy outside the range of the relation")
    return L_MAX * base ** (1.0 / beta)


# ---------------------------------------------------------------------------
# collinear Lagrange points

@dataclass(frozen=True)
class LagrangeLinear:
    c2: float
    lam: float
    omega1: float
    omega2: float
    detuning: float


def lagrange_linear(c2: float) -> LagrangeLinear:
    """Saddle rate and the two centre frequencies at a collinear point."""
    if not (math.isfinite(c2) and c2 > 0):
        raise InvalidC2(f"c2 must be positive, got {c2}")
    disc = 9.0 * c2 * c2 - 8.0 * c2
    if disc < 0:
        raise InvalidC2(f"9 c2^2 - 8 c2 < 0 for c2={c2}")
    r = math.sqrt(disc)
    lam2 = 0.5 * (-2.0 + c2 + r)
    w12 = 0.5 * (2.0 - c2 + r)
    if lam2 < 0 or w12 <= 0:
        raise InvalidC2(f"negative radicand for c2={c2}")
    lam, w1, w2 = math.sqrt(lam2), math.sqrt(w12), math.sqrt(c2)
    return LagrangeLinear(c2, lam, w1, w2, (w1 - w2) / w2)


# ---------------------------------------------------------------------------
# Henon-Heiles unfolding

HENON_HEILES = NaturalCoefficients(b30=-1.0 / 3.0, b12=1.0)


def henon_heiles_params(delta: float = 0.0) -> ReducedParams:
    return reduced_from_alphas(alphas_from_natural(HENON_HEILES, delta))


@dataclass(frozen=True)
class DistortedContact:
    Z: float
    X: float
    h: float
    arc: str
    elliptic: bool


@dataclass(frozen=True)
class DistortedReport:
    C: float
    lam: float
    E: float
    contacts: tuple[DistortedContact, ...]
    degenerate_arc: str | None
    degenerate_h: float | None
    pole: float | None
    pole_in_range: bool

    @property
    def upper_separation(self) -> float:
        """Energy gap between the two upper-arc contacts."""
        hs = [c.h for c in self.contacts if c.arc == "upper"]
        return max(hs) - min(hs) if len(hs) == 2 else 0.0


def distorted_x(C: float, lam: float, h: float, Z):
    """Level curve ``X(Z)`` of ``C (X + Z^2) + lam Z X = h``."""
    return (h - C * Z * Z) / (C + lam * Z)


def hh_distorted_contacts(C: float, lam: float, E: float) -> DistortedReport:
    """Tangencies of ``C (X + Z^2) + lam Z X`` with both arcs of the lemon.

    At ``lam = 0`` the Hamiltonian is constant on the upper arc, which is
    then a whole line of critical points.  For ``lam != 0`` the upper arc
    carries two isolated contacts at ``Z = +-E/sqrt(3)``.
    """
    if not (math.isfinite(C) and math.isfinite(lam) and math.isfinite(E)):
        raise InvalidParameter("C, lam and E must be finite")
    if C == 0:
        raise InvalidParameter("C must be non-zero")
    if not E > 0:
        raise InvalidParameter("E must be positive")
    pole = -C / lam if lam != 0 else None
    pole_in = pole is not None and abs(pole) <= E
    out = []
    if lam != 0:
        for Z in (-E / math.sqrt(3.0), E / math.sqrt(3.0)):
            h = C * E * E + lam * Z * (E * E - Z * Z)
            out.append(DistortedContact(Z, E * E - Z * Z, h, "upper", lam * Z * (C + lam * Z) > 0))
    # lower arc: 3 lam Z^2 + 4 C Z - lam E^2 = 0
    if lam == 0:
        zs = [0.0]
    else:
        disc = 4.0 * C * C + 3.0 * lam * lam * E * E
        r = math.sqrt(disc)
        zs = [(-2.0 * C + s * r) / (3.0 * lam) for s in (1.0, -1.0)]
    for Z in zs:
        if abs(Z) < E:
            X = -(E * E - Z * Z)
            h = C * (X + Z * Z) + lam * Z * X
            out.append(DistortedContact(Z, X, h, "lower", (4.0 * C + 6.0 * lam * Z) * (C + lam * Z) > 0))
    out.sort(key=lambda c: (c.arc, c.Z))
    return DistortedReport(
        C=C, lam=lam, E=E, contacts=tuple(out),
        degenerate_arc="upper" if lam == 0 else None,
        degenerate_h=C * E * E if lam == 0 else None,
        pole=pole, pole_in_range=pole_in,
    )


# ---------------------------------------------------------------------------
# stability of the bifurcating families

def stability_ratio(a: Alphas) -> float:
    """``2 alpha4 / (alpha1 + alpha2 - alpha3)``, equal to C/A."""
    den = a.alpha1 + a.alpha2 - a.alpha3
    if den == 0:
        raise NotApplicable("A = 0")
    return 2.0 * a.alpha4 / den


def stability_ratio_natural(n: NaturalCoefficients) -> float:
    num = 2.0 * (n.b22 - 2.0 * n.b12**2 + n.b12 * n.b30)
    den = 6.0 * (n.b40 + n.b04) - 4.0 * n.b22 + n.b12**2 + 12.0 * n.b12 * n.b30 - 15.0 * n.b30**2
    if den == 0:
        raise NotApplicable("A = 0")
    return num / den


def stable_families_only(a: Alphas) -> bool:
    """True when every bifurcating family in general position is stable."""
    return abs(stability_ratio(a)) > 1.0

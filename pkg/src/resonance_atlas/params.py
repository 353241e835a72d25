"""Coefficient conversions and case classification.

The chain is natural potential coefficients -> normal-form alphas ->
reduced parameters (A, B, C, Delta, A1).  The reduced Hamiltonian on
the lemon space reads ``C X + (B E + Delta) Z + A Z**2``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import asdict, dataclass

from .errors import DegenerateGerm, InvalidParameter, NotApplicable

DEFAULT_TOL = 1e-12


def _check_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise InvalidParameter(f"{name} must be finite, got {v!r}")


@dataclass(frozen=True)
class NaturalCoefficients:
    """Cubic (b30, b12) and quartic (b40, b22, b04) potential coefficients."""

    b30: float = 0.0
    b12: float = 0.0
    b40: float = 0.0
    b22: float = 0.0
    b04: float = 0.0

    def __post_init__(self):
        _check_finite(**asdict(self))


@dataclass(frozen=True)
class Alphas:
    """Normal-form quartic coefficients and the detuning delta."""

    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    delta: float = 0.0

    def __post_init__(self):
        _check_finite(**asdict(self))


@dataclass(frozen=True)
class ReducedParams:
    """Control parameters of the reduced Hamiltonian.

    Attributes
    ----------
    A, B, C : float
        Geometric coefficients of ``C X + (B E + Delta) Z + A Z**2``.
    Delta : float
        Half the detuning.
    A1 : float
        Coefficient of ``E**2`` in the full normal form; shifts energies
        only but enters the fast frequency.
    """

    A: float
    B: float
    C: float
    Delta: float
    A1: float = 0.0

    def __post_init__(self):
        _check_finite(**asdict(self))

    def p(self, E):
        """Linear coefficient ``B E + Delta`` of the reduced Hamiltonian."""
        return self.B * E + self.Delta


@dataclass(frozen=True)
class Germ:
    mu: float
    eps1: int
    eps2: int


class CaseTag(enum.Enum):
    Reference = "Reference"
    CompA = "CompA"
    CompB = "CompB"
    CompC = "CompC"
    DegenerateAeqC = "DegenerateAeqC"
    DegenerateAeqMinusC = "DegenerateAeqMinusC"
    DegenerateCzero = "DegenerateCzero"
    DegenerateAzero = "DegenerateAzero"

    @property
    def degenerate(self) -> bool:
        return self.name.startswith("Degenerate")


class Reflection(enum.Enum):
    Identity = "I"
    R1 = "R1"
    R2 = "R2"
    R2R1 = "R2oR1"


@dataclass(frozen=True)
class ReflectionLabel:
    """A reflection of the lemon section with its fixed-point relabeling.

    R1 (Z -> -Z) exchanges the vertices Q1 and Q2; R2 (X -> -X) exchanges
    the upper and lower contact points.
    """

    reflection: Reflection
    swap_vertices: bool
    swap_arcs: bool

    def relabel(self, name: str) -> str:
        """Image of a fixed-point label in {"Q1", "Q2", "QU", "QL"}."""
        table = {}
        if self.swap_vertices:
            table.update({"Q1": "Q2", "Q2": "Q1"})
        if self.swap_arcs:
            table.update({"QU": "QL", "QL": "QU"})
        if name not in ("Q1", "Q2", "QU", "QL"):
            raise InvalidParameter(f"unknown fixed point label {name!r}")
        return table.get(name, name)


def alphas_from_natural(nat: NaturalCoefficients, delta: float) -> Alphas:
    """Normal-form alphas of a natural system with the given potential."""
    _check_finite(delta=delta)
    b30, b12, b40, b22, b04 = nat.b30, nat.b12, nat.b40, nat.b22, nat.b04
    a1 = 1.5 * (b40 - 2.5 * b30**2)
    a2 = 0.5 * (3.0 * b04 - (5.0 / 6.0) * b12**2)
    a3 = b22 - b12 * (3.0 * b30 + (2.0 / 3.0) * b12)
    a4 = 0.25 * (b22 + b12 * (b30 - 2.0 * b12))
    return Alphas(a1, a2, a3, a4, delta)


def reduced_from_alphas(a: Alphas) -> ReducedParams:
    return ReducedParams(
        A=(a.alpha1 + a.alpha2 - a.alpha3) / 4.0,
        B=(a.alpha1 - a.alpha2) / 2.0,
        C=a.alpha4 / 2.0,
        Delta=a.delta / 2.0,
        A1=(a.alpha1 + a.alpha2 + a.alpha3) / 4.0,
    )


def alphas_from_reduced(rp: ReducedParams) -> Alphas:
    """Inverse of :func:`reduced_from_alphas`."""
    s = rp.A + rp.A1
    return Alphas(
        alpha1=s + rp.B,
        alpha2=s - rp.B,
        alpha3=2.0 * (rp.A1 - rp.A),
        alpha4=2.0 * rp.C,
        delta=2.0 * rp.Delta,
    )


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def germ_coefficients(rp: ReducedParams) -> Germ:
    """Coefficients of the central singularity ``eps1 x^4 + mu x^2 y^2 + eps2 y^4``."""
    A, C = rp.A, rp.C
    band = DEFAULT_TOL * max(abs(A), abs(C), 1.0)
    if abs(A - C) <= band or abs(A + C) <= band:
        raise DegenerateGerm(f"germ undefined for A = +-C (A={A}, C={C})")
    return Germ(mu=2.0 * A / math.sqrt(abs(A * A - C * C)), eps1=_sign(A - C), eps2=_sign(A + C))


def classify_case(rp: ReducedParams, tol: float = DEFAULT_TOL) -> CaseTag:
    """Sign quadrant of (A, C) or the degenerate stratum it lies on."""
    if tol < 0:
        raise InvalidParameter("tol must be non-negative")
    A, C = rp.A, rp.C
    band = tol * max(abs(A), abs(C), 1.0)
    if abs(A - C) <= band:
        return CaseTag.DegenerateAeqC
    if abs(A + C) <= band:
        return CaseTag.DegenerateAeqMinusC
    if abs(C) <= band:
        return CaseTag.DegenerateCzero
    if abs(A) <= band:
        return CaseTag.DegenerateAzero
    if A < 0:
        return CaseTag.Reference if C > 0 else CaseTag.CompA
    return CaseTag.CompB if C < 0 else CaseTag.CompC


def symmetry_map(tag: CaseTag) -> ReflectionLabel:
    """Reflection carrying the reference-case picture onto ``tag``."""
    if tag.degenerate:
        raise NotApplicable(f"no reflection for degenerate case {tag.value}")
    return {
        CaseTag.Reference: ReflectionLabel(Reflection.Identity, False, False),
        CaseTag.CompA: ReflectionLabel(Reflection.R2, False, True),
        CaseTag.CompB: ReflectionLabel(Reflection.R1, True, False),
        CaseTag.CompC: ReflectionLabel(Reflection.R2R1, True, True),
    }[tag]


def params_from_mapping(data: dict) -> tuple[ReducedParams, list[str]]:
    """Build ReducedParams from the JSON layout used by the CLI.

    Accepts ``{"natural": {...}, "delta": x}`` or ``{"reduced": {...}}``.
    Returns the parameters and a list of warnings.
    """
    warnings: list[str] = []
    if not isinstance(data, dict):
        raise InvalidParameter("parameter bundle must be a JSON object")
    if "natural" in data and "reduced" in data:
        raise InvalidParameter("give either 'natural' or 'reduced', not both")
    if "natural" in data:
        nat_raw = data["natural"]
        keys = ("b30", "b12", "b40", "b22", "b04")
        missing = [k for k in keys if k not in nat_raw]
        if missing:
            raise InvalidParameter(f"natural coefficients missing {missing}")
        nat = NaturalCoefficients(**{k: float(nat_raw[k]) for k in keys})
        delta = float(data.get("delta", 0.0))
        if "delta" not in data:
            warnings.append("delta missing, defaulted to 0")
        return reduced_from_alphas(alphas_from_natural(nat, delta)), warnings
    if "reduced" in data:
        red = data["reduced"]
        missing = [k for k in ("A", "B", "C", "Delta") if k not in red]
        if missing:
            raise InvalidParameter(f"reduced parameters missing {missing}")
        if "A1" not in red:
            warnings.append("A1 missing, defaulted to 0")
        return (
            ReducedParams(
                float(red["A"]), float(red["B"]), float(red["C"]),
                float(red["Delta"]), float(red.get("A1", 0.0)),
            ),
            warnings,
        )
    raise InvalidParameter("expected a 'natural' or 'reduced' block")

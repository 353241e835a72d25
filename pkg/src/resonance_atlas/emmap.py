"""Energy-momentum map: critical branches, chambers and value classification.

Critical values at fixed E are the energies of the two vertices (normal
modes) and of the isolated contact points.  Between consecutive critical
values the fibre consists of regular tori; each such interval is a
chamber.  A normal mode whose vertex is not an extremum still
contributes an internal critical value (its separatrix level).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .bifurcation import thresholds
from .errors import InvalidParameter, NotApplicable
from .params import DEFAULT_TOL, ReducedParams
from .reduced import (
    Family,
    contact_lower,
    contact_upper,
    existence_interval,
    h_nm1,
    h_nm2,
    nm_slope,
    nm_stable,
    nm_unstable_interval,
)

VALUE_TOL = 1e-12


class BranchKind(enum.Enum):
    NM1 = "NM1"
    NM2 = "NM2"
    InclinedEnvelope = "InclinedEnvelope"
    LoopEnvelope = "LoopEnvelope"


_BRANCH_FAMILY = {
    BranchKind.NM1: Family.NM1,
    BranchKind.NM2: Family.NM2,
    BranchKind.InclinedEnvelope: Family.Inclined,
    BranchKind.LoopEnvelope: Family.Loop,
}


class TorusFamily(enum.Enum):
    AroundNM1 = "AroundNM1"
    AroundNM2 = "AroundNM2"
    AroundInclined = "AroundInclined"
    AroundLoop = "AroundLoop"
    AroundNormalModes = "AroundNormalModes"


@dataclass(frozen=True)
class Branch:
    kind: BranchKind
    samples: tuple[tuple[float, float], ...]
    stable_ranges: tuple[tuple[float, float], ...]

    def is_stable(self, E: float) -> bool:
        return any(lo <= E <= hi for lo, hi in self.stable_ranges)


@dataclass(frozen=True)
class CriticalValue:
    """Critical value of the reduced Hamiltonian at fixed E."""

    kind: BranchKind
    h: float
    stable: bool
    # +1 local minimum, -1 local maximum, 0 saddle-type
    extremum: int


@dataclass(frozen=True)
class Chamber:
    E: float
    h_lower: float
    h_upper: float
    lower: BranchKind
    upper: BranchKind
    torus_family: TorusFamily

    @property
    def height(self) -> float:
        return self.h_upper - self.h_lower

    @property
    def e_range(self) -> tuple[float, float]:
        return (self.E, self.E)


class ValueStatus(enum.Enum):
    Regular = "Regular"
    CriticalBoundary = "CriticalBoundary"
    Empty = "Empty"


@dataclass(frozen=True)
class RegularityReport:
    status: ValueStatus
    branch: BranchKind | None = None
    chamber: Chamber | None = None


def _band(rp):
    return DEFAULT_TOL * max(abs(rp.A), abs(rp.C), 1.0)


def _require_families(rp: ReducedParams):
    if abs(rp.C) <= _band(rp):
        raise NotApplicable("C = 0: no family structure")


def _complement(interval, eMax):
    """[0, eMax] minus the open interval."""
    if interval is None:
        return ((0.0, eMax),)
    lo, hi = interval
    out = []
    if lo > 0:
        out.append((0.0, min(lo, eMax)))
    if hi < eMax:
        out.append((hi, eMax))
    return tuple((a, b) for a, b in out if b > a or (a == b == 0.0))


def _clip(interval, eMax):
    if interval is None or interval[0] >= eMax:
        return None
    return interval[0], min(interval[1], eMax)


def critical_values(rp: ReducedParams, E: float) -> list[CriticalValue]:
    """Critical values at fixed E > 0, sorted by h."""
    _require_families(rp)
    out = []
    for kind, fam, hfun in ((BranchKind.NM1, Family.NM1, h_nm1), (BranchKind.NM2, Family.NM2, h_nm2)):
        st = nm_stable(rp, E, fam)
        ext = (1 if nm_slope(rp, E, fam) > 0 else -1) if st else 0
        out.append(CriticalValue(kind, hfun(rp, E), st, ext))
    band = _band(rp)
    if abs(rp.A - rp.C) > band:
        cu = contact_upper(rp, E)
        if cu is not None:
            ext = (1 if rp.A - rp.C > 0 else -1) if cu.stable else 0
            out.append(CriticalValue(BranchKind.InclinedEnvelope, cu.h, cu.stable, ext))
    if abs(rp.A + rp.C) > band:
        cl = contact_lower(rp, E)
        if cl is not None:
            ext = (1 if rp.A + rp.C > 0 else -1) if cl.stable else 0
            out.append(CriticalValue(BranchKind.LoopEnvelope, cl.h, cl.stable, ext))
    out.sort(key=lambda cv: cv.h)
    return out


def branches(rp: ReducedParams, eMax: float, n: int) -> list[Branch]:
    """Critical branches sampled uniformly in E, plus exact threshold points."""
    _require_families(rp)
    if not eMax > 0:
        raise InvalidParameter("eMax must be positive")
    if n < 2:
        raise InvalidParameter("need at least two samples")
    grid = np.linspace(0.0, eMax, n)
    extra = [v for v in thresholds(rp).as_dict().values() if v is not None]
    out = []
    for kind, hfun in ((BranchKind.NM1, h_nm1), (BranchKind.NM2, h_nm2)):
        fam = _BRANCH_FAMILY[kind]
        es = np.unique(np.concatenate([grid, [e for e in extra if e <= eMax and e > 0]]))
        samples = tuple((float(e), float(hfun(rp, e))) for e in es)
        stable = _complement(_clip(nm_unstable_interval(rp, fam), eMax), eMax)
        out.append(Branch(kind, samples, stable))
    for kind, cfun in ((BranchKind.InclinedEnvelope, contact_upper), (BranchKind.LoopEnvelope, contact_lower)):
        fam = _BRANCH_FAMILY[kind]
        interval = _clip(existence_interval(rp, fam), eMax)
        if interval is None:
            out.append(Branch(kind, (), ()))
            continue
        lo, hi = interval
        es = np.unique(np.concatenate([[lo, hi], grid[(grid > lo) & (grid < hi)]]))
        samples = []
        for e in es:
            if e <= 0:
                continue
            cp = cfun(rp, float(e))
            if cp is None:
                # endpoint: contact sits on the vertex
                Zc = -rp.p(e) / (2.0 * (rp.A + rp.C)) if fam is Family.Loop else rp.p(e) / (2.0 * (rp.C - rp.A))
                h = (h_nm1 if Zc < 0 else h_nm2)(rp, float(e))
            else:
                h = cp.h
            samples.append((float(e), float(h)))
        stable_flag = rp.C * ((rp.C - rp.A) if fam is Family.Inclined else (rp.A + rp.C)) > 0
        out.append(Branch(kind, tuple(samples), ((lo, hi),) if stable_flag else ()))
    return out


def _label(lower: CriticalValue, upper: CriticalValue) -> TorusFamily:
    names = {
        BranchKind.NM1: TorusFamily.AroundNM1,
        BranchKind.NM2: TorusFamily.AroundNM2,
        BranchKind.InclinedEnvelope: TorusFamily.AroundInclined,
        BranchKind.LoopEnvelope: TorusFamily.AroundLoop,
    }
    lo_ok = lower.stable and lower.extremum > 0
    hi_ok = upper.stable and upper.extremum < 0
    nm = (BranchKind.NM1, BranchKind.NM2)
    if lo_ok and hi_ok and lower.kind in nm and upper.kind in nm:
        return TorusFamily.AroundNormalModes
    if lo_ok and hi_ok:
        # prefer the periodic family over a normal mode
        return names[upper.kind] if lower.kind in nm else names[lower.kind]
    if lo_ok:
        return names[lower.kind]
    if hi_ok:
        return names[upper.kind]
    return TorusFamily.AroundNormalModes


def chambers(rp: ReducedParams, E: float) -> list[Chamber]:
    """Vertical slice of the image at E, split at every critical value.

    Coincident critical values (for instance h1 = h2 at the global
    bifurcation) produce a chamber of zero height, kept so that the
    vanishing family stays visible.
    """
    if not E > 0:
        raise InvalidParameter("E must be positive")
    cvs = critical_values(rp, E)
    out = []
    for lo, hi in zip(cvs[:-1], cvs[1:]):
        out.append(Chamber(E, lo.h, hi.h, lo.kind, hi.kind, _label(lo, hi)))
    return out


def is_threshold_slice(rp: ReducedParams, E: float, tol: float = 1e-12) -> bool:
    """True when E sits on a threshold or on the h1 = h2 crossing."""
    ts = thresholds(rp)
    return any(v is not None and abs(E - v) <= tol * max(1.0, v) for k, v in ts.as_dict().items() if k != "hGB")


def h1_h2_crossing(rp: ReducedParams) -> float | None:
    """Positive E where h1(E) = h2(E), i.e. E = -Delta/B."""
    if rp.B == 0:
        return None
    e = -rp.Delta / rp.B
    return e if e > 0 else None


def count_chambers(rp: ReducedParams, E: float) -> int:
    """Number of chambers of positive height."""
    return sum(1 for c in chambers(rp, E) if c.height > VALUE_TOL * max(E * E, 1e-300))


def classify_value(rp: ReducedParams, E: float, h: float) -> RegularityReport:
    if not E > 0:
        return RegularityReport(ValueStatus.Empty if h != 0 else ValueStatus.CriticalBoundary)
    cvs = critical_values(rp, E)
    scale = max(max(abs(cv.h) for cv in cvs), E * E, 1e-300)
    tol = VALUE_TOL * scale
    for cv in cvs:
        if abs(h - cv.h) <= tol:
            return RegularityReport(ValueStatus.CriticalBoundary, cv.kind)
    if h < cvs[0].h or h > cvs[-1].h:
        return RegularityReport(ValueStatus.Empty)
    for ch in chambers(rp, E):
        if ch.h_lower < h < ch.h_upper:
            return RegularityReport(ValueStatus.Regular, None, ch)
    return RegularityReport(ValueStatus.Empty)


@dataclass(frozen=True)
class Domain:
    """E-interval on which the slice of the image has fixed outer boundaries.

    Normal-mode boundaries are lumped as ``"NM"`` (the slice runs from
    ``min(h1, h2)`` or up to ``max(h1, h2)``); the crossing ``h1 = h2``
    therefore does not split a domain.
    """

    e_lo: float
    e_hi: float
    lower: str
    upper: str


def _outer(rp, E):
    cvs = critical_values(rp, E)
    nm = (BranchKind.NM1, BranchKind.NM2)
    name = lambda k: "NM" if k in nm else k.value
    return name(cvs[0].kind), name(cvs[-1].kind)


def domains(rp: ReducedParams, eMax: float) -> list[Domain]:
    """Decomposition of the image over ``0 < E < eMax`` into domains."""
    if not eMax > 0:
        raise InvalidParameter("eMax must be positive")
    _require_families(rp)
    cuts = [0.0, eMax]
    cuts += [v for k, v in thresholds(rp).as_dict().items() if k != "hGB" and v is not None and 0 < v < eMax]
    e12 = h1_h2_crossing(rp)
    if e12 is not None and e12 < eMax:
        cuts.append(e12)
    cuts = sorted(set(cuts))
    out: list[Domain] = []
    for a, b in zip(cuts[:-1], cuts[1:]):
        lo, hi = _outer(rp, 0.5 * (a + b))
        if out and (out[-1].lower, out[-1].upper) == (lo, hi):
            out[-1] = Domain(out[-1].e_lo, b, lo, hi)
        else:
            out.append(Domain(a, b, lo, hi))
    return out

"""Bifurcation thresholds, event sequences and the catastrophe map."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import InvalidParameter, NotApplicable
from .params import DEFAULT_TOL, Germ, ReducedParams, germ_coefficients
from .reduced import Family, existence_interval

STRUCTURAL_BAND = 1e-9


@dataclass(frozen=True)
class ThresholdSet:
    """Critical energies; ``None`` marks an absent threshold."""

    e1U: float | None = None
    e2U: float | None = None
    e1L: float | None = None
    e2L: float | None = None
    eGB: float | None = None
    hGB: float | None = None

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in ("e1U", "e2U", "e1L", "e2L", "eGB", "hGB")}

    def family_thresholds(self) -> dict[str, float]:
        return {k: v for k, v in self.as_dict().items() if k in ("e1U", "e2U", "e1L", "e2L") and v is not None}


class EventKind(enum.Enum):
    FromNM1 = "FromNM1"
    ToNM2 = "ToNM2"
    FromNM2 = "FromNM2"
    ToNM1 = "ToNM1"
    Global = "Global"


class EventFamily(enum.Enum):
    InclinedStable = "InclinedStable"
    InclinedUnstable = "InclinedUnstable"
    LoopStable = "LoopStable"
    LoopUnstable = "LoopUnstable"
    None_ = "None"


@dataclass(frozen=True)
class BifurcationEvent:
    e: float
    kind: EventKind
    family: EventFamily

    @property
    def label(self) -> str:
        """Compact tag: mode number plus U/u (inclined) or L/l (loop), or GB."""
        if self.kind is EventKind.Global:
            return "GB"
        mode = "1" if self.kind in (EventKind.FromNM1, EventKind.ToNM1) else "2"
        letter = {
            EventFamily.InclinedStable: "U",
            EventFamily.InclinedUnstable: "u",
            EventFamily.LoopStable: "L",
            EventFamily.LoopUnstable: "l",
        }[self.family]
        return mode + letter

    @property
    def stable(self) -> bool | None:
        if self.family is EventFamily.None_:
            return None
        return self.family in (EventFamily.InclinedStable, EventFamily.LoopStable)


def _band(rp):
    return DEFAULT_TOL * max(abs(rp.A), abs(rp.C), 1.0)


def _positive(num: float, den: float) -> float | None:
    if den == 0:
        return None
    v = num / den
    return v if v > 0 and math.isfinite(v) else None


def thresholds(rp: ReducedParams) -> ThresholdSet:
    """Energies at which inclined or loop families branch from a normal mode.

    A family whose arc is degenerate (A = C for inclined, A = -C for loops)
    has no isolated contact, so its thresholds are reported absent.  With
    C = 0 no family exists at all.
    """
    if abs(rp.C) <= _band(rp):
        raise NotApplicable("C = 0: only normal modes exist")
    A, B, C, D = rp.A, rp.B, rp.C, rp.Delta
    kw = {}
    if abs(A - C) > _band(rp):
        kw["e1U"] = _positive(D, 2.0 * (A - C) - B)
        kw["e2U"] = _positive(D, 2.0 * (C - A) - B)
    if abs(A + C) > _band(rp):
        kw["e1L"] = _positive(D, 2.0 * (A + C) - B)
        kw["e2L"] = _positive(D, -2.0 * (A + C) - B)
    egb = _positive(-D, B)
    if egb is not None:
        kw["eGB"] = egb
        kw["hGB"] = A * egb * egb
    return ThresholdSet(**kw)


def _family_label(rp: ReducedParams, fam: Family) -> EventFamily:
    if fam is Family.Inclined:
        stable = rp.C * (rp.C - rp.A) > 0
        return EventFamily.InclinedStable if stable else EventFamily.InclinedUnstable
    stable = rp.C * (rp.A + rp.C) > 0
    return EventFamily.LoopStable if stable else EventFamily.LoopUnstable


def global_bifurcation_applies(rp: ReducedParams) -> bool:
    """Both normal modes are unstable at eGB exactly when |A| < |C|."""
    return abs(rp.A) < abs(rp.C)


def sequence(rp: ReducedParams, eMax: float) -> list[BifurcationEvent]:
    """Ordered bifurcation events with ``0 < e <= eMax``.

    The birth/death direction is read off the existence interval of the
    family: a threshold at the lower end of the interval is a birth.
    """
    if not eMax > 0:
        raise InvalidParameter("eMax must be positive")
    ts = thresholds(rp)
    events = []
    for fam, keys in ((Family.Inclined, ("e1U", "e2U")), (Family.Loop, ("e1L", "e2L"))):
        interval = existence_interval(rp, fam)
        label = _family_label(rp, fam)
        for key in keys:
            e = getattr(ts, key)
            if e is None or e > eMax or interval is None:
                continue
            at_nm1 = key.startswith("e1")
            born = abs(e - interval[0]) <= abs(e - interval[1])
            if at_nm1:
                kind = EventKind.FromNM1 if born else EventKind.ToNM1
            else:
                kind = EventKind.FromNM2 if born else EventKind.ToNM2
            events.append(BifurcationEvent(e, kind, label))
    if ts.eGB is not None and ts.eGB <= eMax and global_bifurcation_applies(rp):
        events.append(BifurcationEvent(ts.eGB, EventKind.Global, EventFamily.None_))
    events.sort(key=lambda ev: ev.e)
    return events


# ---------------------------------------------------------------------------
# catastrophe map

def catastrophe_coords(rp: ReducedParams, E: float) -> tuple[float, float]:
    """``(C/A, Z_V/E)`` with ``Z_V = -(B E + Delta)/(2A)``."""
    if abs(rp.A) <= _band(rp):
        raise NotApplicable("A = 0: the catastrophe map is undefined")
    if not E > 0:
        raise InvalidParameter("E must be positive")
    return rp.C / rp.A, -rp.p(E) / (2.0 * rp.A * E)


@dataclass(frozen=True)
class RegionReport:
    n_families: int
    n_stable: int
    inclined: bool
    loop: bool
    inclined_stable: bool
    loop_stable: bool
    structurally_stable: bool


_CROSSINGS = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))


def region_classify(coupling: float, asymmetry: float) -> RegionReport:
    """Families present at a point of the catastrophe map.

    Inclined orbits exist for ``|s| < |c - 1|`` and loops for
    ``|s| < |c + 1|``; they are stable when ``c (c - 1) > 0`` and
    ``c (c + 1) > 0`` respectively (c = C/A, s = asymmetry).
    """
    c, s = coupling, asymmetry
    inc = abs(s) < abs(c - 1.0)
    loop = abs(s) < abs(c + 1.0)
    inc_st = c * (c - 1.0) > 0
    loop_st = c * (c + 1.0) > 0
    on_crossing = any(abs(c - x) <= STRUCTURAL_BAND and abs(s - y) <= STRUCTURAL_BAND for x, y in _CROSSINGS)
    return RegionReport(
        n_families=int(inc) + int(loop),
        n_stable=int(inc and inc_st) + int(loop and loop_st),
        inclined=inc,
        loop=loop,
        inclined_stable=inc_st,
        loop_stable=loop_st,
        structurally_stable=not on_crossing,
    )


def bifurcation_lines(coupling):
    """Asymmetry values of the lines 1U, 2U, 1L, 2L at the given coupling."""
    return {
        "1U": coupling - 1.0,
        "2U": 1.0 - coupling,
        "1L": -1.0 - coupling,
        "2L": 1.0 + coupling,
    }


BOUNDARY = "boundary"


def region_labels(coupling, asymmetry):
    """Region label ``"n_families:n_stable"`` on a sweep grid.

    Cells crossed by a bifurcation line (vertical distance below the
    asymmetry spacing) are labeled ``BOUNDARY``, so that regions meeting
    only at the structurally unstable crossings are not merged.
    """
    import numpy as np

    cs = np.asarray(coupling, dtype=float)
    ss = np.asarray(asymmetry, dtype=float)
    ds = abs(ss[1] - ss[0]) if len(ss) > 1 else 0.0
    out = np.empty((len(cs), len(ss)), dtype=object)
    for i, c in enumerate(cs):
        lines = bifurcation_lines(float(c)).values()
        for j, s in enumerate(ss):
            if any(abs(s - v) < ds for v in lines):
                out[i, j] = BOUNDARY
            else:
                r = region_classify(float(c), float(s))
                out[i, j] = f"{r.n_families}:{r.n_stable}"
    return out.astype(str)


def region_components(coupling, asymmetry, labels):
    """Count 4-connected components of each label on a sweep grid.

    ``labels`` is an array of shape (len(coupling), len(asymmetry));
    returns ``{label: n_components}`` ignoring ``BOUNDARY`` cells.
    """
    import numpy as np
    from scipy import ndimage

    labels = np.asarray(labels)
    out = {}
    for lab in np.unique(labels):
        if lab == BOUNDARY:
            continue
        _, n = ndimage.label(labels == lab)
        out[lab.item() if hasattr(lab, "item") else lab] = int(n)
    return out


# ---------------------------------------------------------------------------
# versal unfolding

@dataclass(frozen=True)
class Unfolding:
    u1: float
    u2: float
    u3: float
    germ: Germ = field(repr=True)


def unfolding(rp: ReducedParams, E: float) -> Unfolding:
    try:
        g = germ_coefficients(rp)
    except NotApplicable as exc:
        raise NotApplicable(str(exc)) from exc
    A, B, C, D = rp.A, rp.B, rp.C, rp.Delta
    u1 = (D + (B - 2.0 * (A - C)) * E) / math.sqrt(abs(A - C))
    u2 = (D + (B - 2.0 * (A + C)) * E) / math.sqrt(abs(A + C))
    return Unfolding(u1, u2, 0.0, g)


def evaluate_F(x, y, u: Unfolding):
    g = u.germ
    x2, y2 = x * x, y * y
    return g.eps1 * x2 * x2 + (g.mu + u.u3) * x2 * y2 + g.eps2 * y2 * y2 + u.u1 * x2 + u.u2 * y2


def critical_points_F(u: Unfolding) -> list[tuple[float, float]]:
    """Critical points of F from the factored gradient."""
    g = u.germ
    pts = [(0.0, 0.0)]
    xx = -u.u1 / (2.0 * g.eps1)
    if xx > 0:
        r = math.sqrt(xx)
        pts += [(r, 0.0), (-r, 0.0)]
    yy = -u.u2 / (2.0 * g.eps2)
    if yy > 0:
        r = math.sqrt(yy)
        pts += [(0.0, r), (0.0, -r)]
    mu = g.mu + u.u3
    det = 4.0 * g.eps1 * g.eps2 - mu * mu
    if det != 0:
        X = (-u.u1 * 2.0 * g.eps2 + mu * u.u2) / det
        Y = (-u.u2 * 2.0 * g.eps1 + mu * u.u1) / det
        if X > 0 and Y > 0:
            a, b = math.sqrt(X), math.sqrt(Y)
            pts += [(a, b), (a, -b), (-a, b), (-a, -b)]
    return pts

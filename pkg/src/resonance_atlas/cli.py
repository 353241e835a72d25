"""Command-line front end.

Exit codes: 0 success, 2 usage or invalid input, 3 operation not
applicable to the given parameters, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import apps, bifurcation, dynamics, emmap, quadrature
from .errors import (
    InvalidParameter,
    NonRegularValue,
    NotApplicable,
    PoleOnPath,
    ResonanceError,
    StepFailure,
)
from .params import ReducedParams, params_from_mapping

COMMANDS = ("thresholds", "sequence", "catastrophe", "emmap", "poincare", "freq", "torus", "app")
PRESETS = ("galactic", "levitation", "lagrange", "henon-heiles")
EXIT_USAGE, EXIT_NA, EXIT_NUMERIC = 2, 3, 4


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: Path | None = None
    fmt: str | None = None
    threads: int = 1
    options: dict = field(default_factory=dict)


@dataclass
class Artifact:
    """One output table or document."""

    name: str
    header: list[str] | None = None
    rows: list[list] | None = None
    doc: dict | None = None
    svg: str | None = None


# ---------------------------------------------------------------------------
# formatting

def fmt_num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(fmt_num(v) for v in r) + "\n")
    return buf.getvalue()


def _json_default(o):
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if hasattr(o, "value"):
        return o.value
    raise TypeError(type(o))


def to_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n"


class Svg:
    """Tiny SVG builder mapping data coordinates onto a fixed canvas."""

    def __init__(self, xlim, ylim, width=480, height=360, pad=40):
        self.x0, self.x1 = xlim
        self.y0, self.y1 = ylim
        if self.x1 == self.x0:
            self.x1 = self.x0 + 1.0
        if self.y1 == self.y0:
            self.y1 = self.y0 + 1.0
        self.w, self.h, self.pad = width, height, pad
        self.items: list[str] = []

    def _p(self, x, y):
        px = self.pad + (x - self.x0) / (self.x1 - self.x0) * (self.w - 2 * self.pad)
        py = self.h - self.pad - (y - self.y0) / (self.y1 - self.y0) * (self.h - 2 * self.pad)
        return f"{px:.2f},{py:.2f}"

    def polyline(self, xs, ys, cls="stable"):
        pts = " ".join(self._p(x, y) for x, y in zip(xs, ys))
        if pts:
            self.items.append(f'<polyline class="{cls}" points="{pts}"/>')

    def points(self, xs, ys, cls="pt"):
        for x, y in zip(xs, ys):
            px, py = self._p(x, y).split(",")
            self.items.append(f'<circle class="{cls}" cx="{px}" cy="{py}" r="0.8"/>')

    def render(self) -> str:
        style = (
            "<style>polyline{fill:none;stroke:#000;stroke-width:1}"
            ".unstable{stroke-dasharray:4 3}.pt{fill:#000}</style>"
        )
        frame = f'<rect x="{self.pad}" y="{self.pad}" width="{self.w - 2 * self.pad}" height="{self.h - 2 * self.pad}" fill="none" stroke="#888"/>'
        body = "\n".join(self.items)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.w}" height="{self.h}">\n'
            f"{style}\n{frame}\n{body}\n</svg>\n"
        )


# ---------------------------------------------------------------------------
# commands

def _rp(cfg: RunConfig) -> tuple[ReducedParams, list[str]]:
    if not cfg.params:
        raise InvalidParameter("this command needs --config with a parameter bundle")
    return params_from_mapping(cfg.params)


def _opt(cfg, key, default=None, required=False):
    v = cfg.options.get(key)
    if v is None:
        if required:
            raise InvalidParameter(f"missing option --{key.replace('_', '-')}")
        return default
    return v


def cmd_thresholds(cfg):
    rp, warn = _rp(cfg)
    ts = bifurcation.thresholds(rp)
    doc = dict(ts.as_dict(), warnings=warn, global_bifurcation=bifurcation.global_bifurcation_applies(rp))
    rows = [[k, v] for k, v in ts.as_dict().items()]
    return [Artifact("thresholds", ["name", "value"], rows, doc)]


def cmd_sequence(cfg):
    rp, warn = _rp(cfg)
    emax = float(_opt(cfg, "emax", required=True))
    evs = bifurcation.sequence(rp, emax)
    rows = [[i, e.label, e.e, e.kind.value, e.family.value, e.stable] for i, e in enumerate(evs)]
    doc = {"events": [dict(zip(["index", "label", "e", "kind", "family", "stable"], r)) for r in rows], "warnings": warn}
    return [Artifact("sequence", ["index", "label", "e", "kind", "family", "stable"], rows, doc)]


def cmd_catastrophe(cfg):
    n = int(_opt(cfg, "n", 300))
    span = float(_opt(cfg, "range", 3.0))
    if n < 2 or not span > 0:
        raise InvalidParameter("need n >= 2 and range > 0")
    cs = np.linspace(-span, span, n)
    ss = np.linspace(-span, span, n)
    rows = []
    for c in cs:
        for s in ss:
            rep = bifurcation.region_classify(float(c), float(s))
            rows.append([c, s, rep.n_families, rep.n_stable, rep.inclined, rep.loop, rep.structurally_stable])
    comps = bifurcation.region_components(cs, ss, bifurcation.region_labels(cs, ss))
    svg = Svg((-span, span), (-span, span))
    for name, line in bifurcation.bifurcation_lines(np.array([-span, span])).items():
        svg.polyline([-span, span], list(line), "stable" if name.endswith("U") else "unstable")
    doc = {"grid": [n, n], "range": span, "region_components": comps}
    header = ["coupling", "asymmetry", "n_families", "n_stable", "inclined", "loop", "structurally_stable"]
    return [Artifact("catastrophe", header, rows, doc, svg.render())]


def cmd_emmap(cfg):
    rp, warn = _rp(cfg)
    emax = float(_opt(cfg, "emax", required=True))
    n = int(_opt(cfg, "n", 200))
    brs = emmap.branches(rp, emax, n)
    rows = []
    es_all, hs_all = [], []
    for br in brs:
        for e, h in br.samples:
            rows.append([br.kind.value, e, h, br.is_stable(e)])
            es_all.append(e)
            hs_all.append(h)
    svg = Svg((0.0, emax), (min(hs_all, default=0.0), max(hs_all, default=1.0)))
    for br in brs:
        if not br.samples:
            continue
        seg, cur = [], None
        for e, h in br.samples:
            st = br.is_stable(e)
            if cur is not None and st != cur and seg:
                svg.polyline(*zip(*seg), "stable" if cur else "unstable")
                seg = [seg[-1]]
            seg.append((e, h))
            cur = st
        svg.polyline(*zip(*seg), "stable" if cur else "unstable")
    slices = []
    for e in _opt(cfg, "slices", []) or []:
        for ch in emmap.chambers(rp, float(e)):
            slices.append({"E": ch.E, "h_lower": ch.h_lower, "h_upper": ch.h_upper,
                           "lower": ch.lower.value, "upper": ch.upper.value,
                           "family": ch.torus_family.value})
    doc = {"branches": [{"kind": b.kind.value, "stable_ranges": b.stable_ranges, "n": len(b.samples)} for b in brs],
           "chambers": slices, "warnings": warn}
    return [Artifact("emmap", ["branch", "E", "h", "stable"], rows, doc, svg.render())]


def cmd_poincare(cfg):
    rp, warn = _rp(cfg)
    E = float(_opt(cfg, "E", required=True))
    nseeds = int(_opt(cfg, "seeds", 10))
    ncross = int(_opt(cfg, "ncross", 200))
    if nseeds < 1 or ncross < 1:
        raise InvalidParameter("seeds and ncross must be positive")
    seeds = dynamics.default_seeds(E, nseeds)
    secs = dynamics.poincare(rp, E, seeds, ncross, threads=cfg.threads)
    rows, xs, ys = [], [], []
    for i, pts in enumerate(secs):
        for k, p in enumerate(pts):
            rows.append([i, k, p.Q1, p.P1, p.t])
            xs.append(p.Q1)
            ys.append(p.P1)
    r = math.sqrt(2.0 * E)
    svg = Svg((-r, r), (-r, r), 400, 400)
    svg.points(xs, ys)
    fps = [{"family": f.family.value, "Q1": f.Q1, "P1": f.P1, "index": f.index}
           for f in dynamics.section_fixed_points(rp, E)]
    doc = {"E": E, "seeds": nseeds, "ncross": ncross, "fixed_points": fps, "warnings": warn}
    return [Artifact("poincare", ["seed_id", "crossing_index", "Q1", "P1", "t"], rows, doc, svg.render())]


def _freq_cell(args):
    rp, E, h = args
    try:
        nc = quadrature.n_components(rp, E, h)
        if nc == 0:
            return [E, h, 0, None, None, None, None, None, "Empty"]
        fr = quadrature.frequencies(quadrature.TorusCoords(E, h, rp, 0))
        return [E, h, nc, fr.omega1, fr.omega2, fr.W, fr.T2, fr.J2, "Regular"]
    except (NonRegularValue, PoleOnPath) as exc:
        return [E, h, None, None, None, None, None, None, type(exc).__name__]


def cmd_freq(cfg):
    rp, warn = _rp(cfg)
    e0, e1 = (float(v) for v in _opt(cfg, "e_range", required=True))
    ne = int(_opt(cfg, "ne", 10))
    nh = int(_opt(cfg, "nh", 10))
    if ne < 1 or nh < 1 or not 0 < e0 <= e1:
        raise InvalidParameter("need 0 < e0 <= e1 and positive grid sizes")
    jobs = []
    for E in np.linspace(e0, e1, ne):
        cvs = emmap.critical_values(rp, float(E))
        lo, hi = cvs[0].h, cvs[-1].h
        # interior grid; the critical boundaries themselves are excluded
        for k in range(nh):
            jobs.append((rp, float(E), lo + (hi - lo) * (k + 0.5) / nh))
    n = dynamics.resolve_threads(cfg.threads)
    if n > 1:
        with ProcessPoolExecutor(max_workers=n) as ex:
            rows = list(ex.map(_freq_cell, jobs, chunksize=8))
    else:
        rows = [_freq_cell(j) for j in jobs]
    header = ["E", "h", "n_components", "omega1", "omega2", "W", "T2", "J2", "status"]
    return [Artifact("freq", header, rows, {"rows": len(rows), "warnings": warn})]


def cmd_torus(cfg):
    rp, warn = _rp(cfg)
    E = float(_opt(cfg, "E", required=True))
    h = float(_opt(cfg, "h", required=True))
    comp = _opt(cfg, "component")
    tc = quadrature.TorusCoords(E, h, rp, None if comp is None else int(comp))
    fr = quadrature.frequencies(tc)
    doc = {"E": E, "h": h, "component": comp, "J2": fr.J2, "T2": fr.T2, "W": fr.W,
           "omega1": fr.omega1, "omega2": fr.omega2, "orientation": fr.orientation, "warnings": warn}
    rows = [[E, h, fr.J2, fr.T2, fr.W, fr.omega1, fr.omega2]]
    return [Artifact("torus", ["E", "h", "J2", "T2", "W", "omega1", "omega2"], rows, doc)]


def _app_galactic(model):
    m = apps.GalacticModel(float(model.get("alpha", 0.0)), float(model.get("b", 1.0)))
    a, rp = apps.galactic_alphas(m)
    rows = []
    doc = {"alphas": a.__dict__, "reduced": rp.__dict__}
    for order in (1, 2):
        t = apps.galactic_thresholds(m, order)
        rows += [[order, "e1L", t.e1L], [order, "e2L", t.e2L]]
        if t.e1U is not None:
            rows += [[order, "e1U", t.e1U], [order, "e2U", t.e2U]]
        doc[f"order{order}"] = t.__dict__
    return rows, ["order", "threshold", "value"], doc


def _app_levitation(model):
    alpha, b = float(model.get("alpha", 0.0)), float(model.get("b", 1.0))
    L, br = apps.levitation_critical_L(alpha, b)
    doc = {"alpha": alpha, "b": b, "L_crit": L, "branch": br.value, "delta": apps.levitation_detuning(alpha, b)}
    rows = [["L_crit", L], ["delta", doc["delta"]], ["branch", br.value]]
    if "L" in model:
        rep = apps.levitation_model(alpha, b, float(model["L"]))
        doc["model"] = rep.__dict__
        rows += [["E_tilde", rep.E_tilde], ["kappa", rep.kappa], ["nu", rep.nu]]
    return rows, ["quantity", "value"], doc


def _app_lagrange(model):
    ll = apps.lagrange_linear(float(model.get("c2", 1.0)))
    rows = [["lambda", ll.lam], ["omega1", ll.omega1], ["omega2", ll.omega2], ["detuning", ll.detuning]]
    return rows, ["quantity", "value"], ll.__dict__


def _app_henon_heiles(model):
    rp = apps.henon_heiles_params(float(model.get("delta", 0.0)))
    lam = float(model.get("lambda", 0.4))
    E = float(model.get("E", 0.1))
    c, s = rp.C / rp.A, -rp.p(E) / (2.0 * rp.A * E)
    rep = apps.hh_distorted_contacts(rp.C, lam, E)
    rows = [[ct.arc, ct.Z, ct.X, ct.h, ct.elliptic] for ct in rep.contacts]
    doc = {"catastrophe_point": [c, s], "reduced": rp.__dict__, "lambda": lam, "E": E,
           "contacts": [ct.__dict__ for ct in rep.contacts], "degenerate_arc": rep.degenerate_arc,
           "pole": rep.pole, "pole_in_range": rep.pole_in_range}
    return rows, ["arc", "Z", "X", "h", "elliptic"], doc


def cmd_app(cfg):
    preset = _opt(cfg, "preset", required=True)
    fn = {"galactic": _app_galactic, "levitation": _app_levitation,
          "lagrange": _app_lagrange, "henon-heiles": _app_henon_heiles}.get(preset)
    if fn is None:
        raise InvalidParameter(f"unknown preset {preset!r}")
    rows, header, doc = fn(cfg.params or {})
    return [Artifact(f"app-{preset}", header, rows, doc)]


HANDLERS = {
    "thresholds": cmd_thresholds, "sequence": cmd_sequence, "catastrophe": cmd_catastrophe,
    "emmap": cmd_emmap, "poincare": cmd_poincare, "freq": cmd_freq, "torus": cmd_torus, "app": cmd_app,
}
DEFAULT_FORMAT = {"thresholds": "json", "torus": "json", "app": "csv"}


# ---------------------------------------------------------------------------
# driver

def _emit(cfg: RunConfig, arts: list[Artifact], stdout) -> None:
    fmt = cfg.fmt or DEFAULT_FORMAT.get(cfg.command, "csv")
    for art in arts:
        if fmt == "json":
            text = to_json(art.doc if art.doc is not None else {"header": art.header, "rows": art.rows})
        elif fmt == "svg":
            if art.svg is None:
                raise InvalidParameter(f"{cfg.command} has no SVG output")
            text = art.svg
        else:
            if art.rows is None:
                raise InvalidParameter(f"{cfg.command} has no CSV output")
            text = to_csv(art.header, art.rows)
        if cfg.out is None:
            stdout.write(text)
        else:
            cfg.out.mkdir(parents=True, exist_ok=True)
            (cfg.out / f"{art.name}.{fmt}").write_text(text)


def run(cfg: RunConfig, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr

    def fail(code, exc):
        stderr.write(to_json({"error": type(exc).__name__, "message": str(exc), "exit": code}))
        return code

    if cfg.command not in HANDLERS:
        return fail(EXIT_USAGE, InvalidParameter(f"unknown command {cfg.command!r}"))
    try:
        arts = HANDLERS[cfg.command](cfg)
        _emit(cfg, arts, stdout)
    except NotApplicable as exc:
        return fail(EXIT_NA, exc)
    except InvalidParameter as exc:
        return fail(EXIT_USAGE, exc)
    except (StepFailure, NonRegularValue, PoleOnPath, FloatingPointError, ZeroDivisionError) as exc:
        return fail(EXIT_NUMERIC, exc)
    except ResonanceError as exc:
        return fail(EXIT_NUMERIC, exc)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON parameter bundle or preset model")
    common.add_argument("--out", type=Path, help="output directory (default: stdout)")
    common.add_argument("--format", choices=("csv", "json", "svg"), dest="fmt")
    common.add_argument("--threads", type=int, default=1)

    p = argparse.ArgumentParser(prog="resonance-atlas", description="1:1 resonance normal-form analysis")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("thresholds", parents=[common])
    s = sub.add_parser("sequence", parents=[common])
    s.add_argument("--emax", type=float, required=True)
    s = sub.add_parser("catastrophe", parents=[common])
    s.add_argument("--n", type=int, default=300)
    s.add_argument("--range", type=float, default=3.0)
    s = sub.add_parser("emmap", parents=[common])
    s.add_argument("--emax", type=float, required=True)
    s.add_argument("--n", type=int, default=200)
    s.add_argument("--slices", type=float, nargs="*")
    s = sub.add_parser("poincare", parents=[common])
    s.add_argument("--E", type=float, required=True)
    s.add_argument("--seeds", type=int, default=10)
    s.add_argument("--ncross", type=int, default=200)
    s = sub.add_parser("freq", parents=[common])
    s.add_argument("--e-range", type=float, nargs=2, required=True, dest="e_range")
    s.add_argument("--ne", type=int, default=10)
    s.add_argument("--nh", type=int, default=10)
    s = sub.add_parser("torus", parents=[common])
    s.add_argument("--E", type=float, required=True)
    s.add_argument("--h", type=float, required=True)
    s.add_argument("--component", type=int)
    s = sub.add_parser("app", parents=[common])
    s.add_argument("preset", choices=PRESETS)
    return p


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    params = {}
    if ns.config is not None:
        try:
            params = json.loads(Path(ns.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidParameter(f"cannot read config {ns.config}: {exc}") from exc
    skip = {"command", "config", "out", "fmt", "threads"}
    options = {k: v for k, v in vars(ns).items() if k not in skip}
    return RunConfig(ns.command, params, ns.out, ns.fmt, ns.threads, options)


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
    except InvalidParameter as exc:
        sys.stderr.write(to_json({"error": type(exc).__name__, "message": str(exc), "exit": EXIT_USAGE}))
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())

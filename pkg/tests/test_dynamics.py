import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import directed_hausdorff

from resonance_atlas.bifurcation import sequence
from resonance_atlas.dynamics import (
    State4,
    integrate,
    invariants_of,
    k_cartesian,
    lemon_vector_field,
    linearize_fixed_point,
    measure_torus,
    poincare,
    reduced_flow,
    resolve_threads,
    return_map,
    saddle_connection_distance,
    section_fixed_points,
    seed_state,
    state_from_lemon,
    torus_initial_state,
    vector_field,
)
from resonance_atlas.emmap import chambers
from resonance_atlas.errors import InvalidParameter, InvalidSeed
from resonance_atlas.quadrature import TorusCoords, n_components, period_T2, rotation_W
from resonance_atlas.reduced import (
    Family,
    LemonPoint,
    ParabolaSpec,
    contact_lower,
    contact_upper,
    h_nm1,
    h_nm2,
    nm_stable,
    parabola_x,
    quartic_Q,
    reduced_hamiltonian,
)

from conftest import SUB1, SUB2

coord = st.floats(min_value=-0.3, max_value=0.3, allow_nan=False)


def _shift(rp, E):
    return (1 + rp.Delta) * E + rp.A1 * E * E


@pytest.mark.parametrize("rp", [SUB1, SUB2], ids=["sub1", "sub2"])
def test_k_at_normal_modes(rp):
    E = 0.07
    r = math.sqrt(2 * E)
    assert k_cartesian(rp, State4(0, 0, 0, 0)) == 0.0
    nm1 = State4(P1=r, P2=0, Q1=0, Q2=0)
    nm2 = State4(P1=0, P2=r, Q1=0, Q2=0)
    assert k_cartesian(rp, nm1) - _shift(rp, E) == pytest.approx(h_nm2(rp, E), abs=1e-15)
    assert k_cartesian(rp, nm2) - _shift(rp, E) == pytest.approx(h_nm1(rp, E), abs=1e-15)


def test_invariants_on_modes():
    E = 0.05
    r = math.sqrt(2 * E)
    inv = invariants_of(State4(0, r, 0, 0))
    assert (inv.I1, inv.I2) == (0, 0) and inv.I3 == pytest.approx(-E) and not inv.angles_defined
    inv = invariants_of(State4(r, 0, 0, 0))
    assert inv.I3 == pytest.approx(E) and inv.psi is None


@given(coord, coord, coord, coord)
def test_invariant_identity(P1, P2, Q1, Q2):
    inv = invariants_of(State4(P1, P2, Q1, Q2))
    assert inv.I1**2 + inv.I2**2 + inv.I3**2 == pytest.approx(inv.I0**2, rel=1e-12, abs=1e-15)


@settings(max_examples=50)
@given(coord, coord, coord, coord)
def test_lemon_image_and_hamiltonian(P1, P2, Q1, Q2):
    s = State4(P1, P2, Q1, Q2)
    inv = invariants_of(s)
    E = inv.I0
    assert inv.X**2 + inv.Y**2 == pytest.approx((E * E - inv.Z**2) ** 2, rel=1e-10, abs=1e-16)
    # K reduces to the lemon Hamiltonian up to the E-only shift
    for rp in (SUB1, SUB2):
        h = reduced_hamiltonian(rp, E, inv.X, inv.Z)
        assert k_cartesian(rp, s) - _shift(rp, E) == pytest.approx(h, rel=1e-10, abs=1e-16)


@settings(max_examples=50)
@given(coord, coord, coord, coord)
def test_vector_field_is_hamiltonian(P1, P2, Q1, Q2):
    s = State4(P1, P2, Q1, Q2)
    f = vector_field(SUB1, s)
    d = 1e-7
    grads = []
    for k in ("P1", "P2", "Q1", "Q2"):
        a = dict(P1=P1, P2=P2, Q1=Q1, Q2=Q2)
        b = dict(a)
        a[k] += d
        b[k] -= d
        grads.append((k_cartesian(SUB1, State4(**a)) - k_cartesian(SUB1, State4(**b))) / (2 * d))
    gP1, gP2, gQ1, gQ2 = grads
    for got, want in ((f.Q1, gP1), (f.Q2, gP2), (f.P1, -gQ1), (f.P2, -gQ2)):
        assert got == pytest.approx(want, abs=1e-8)


def test_normal_mode_stays_on_mode():
    E = 0.035
    tr = integrate(SUB1, State4(0.0, math.sqrt(2 * E), 0.0, 0.0), 500.0)
    assert np.max(np.abs(tr.y[0])) <= 1e-10 and np.max(np.abs(tr.y[2])) <= 1e-10
    tr = integrate(SUB1, State4(math.sqrt(2 * E), 0.0, 0.0, 0.0), 500.0)
    assert np.max(np.abs(tr.y[1])) <= 1e-10 and np.max(np.abs(tr.y[3])) <= 1e-10


@pytest.mark.parametrize("rp", [SUB1, SUB2], ids=["sub1", "sub2"])
def test_conservation_along_integration(rp):
    s0 = seed_state(0.05, 0.1, 0.2)
    tr = integrate(rp, s0, 2000.0)
    assert tr.drift_K <= 1e-9 and tr.drift_I0 <= 1e-9
    with pytest.raises(InvalidParameter):
        integrate(rp, s0, 0.0)


def test_equivariance_under_reflections():
    s0 = seed_state(0.05, 0.07, -0.2)
    y0 = s0.as_array()
    base = integrate(SUB2, s0, 300.0).y
    for m in (np.array([-1, 1, -1, 1]), np.array([1, -1, 1, -1]), np.array([-1, -1, -1, -1])):
        img = integrate(SUB2, State4.from_array(m * y0), 300.0).y
        assert np.max(np.abs(img - m[:, None] * base)) < 1e-10


def test_inclined_fixed_point_is_stationary():
    E = 0.035
    cu = contact_upper(SUB1, E)
    s = state_from_lemon(E, cu.X, 0.0, cu.Z)
    inv = invariants_of(s)
    assert inv.J == pytest.approx((E + cu.Z) / 2, rel=1e-12) and inv.psi == pytest.approx(0.0, abs=1e-12)
    pts = poincare(SUB1, E, [(s.Q1, s.P1)], 50)[0]
    assert len(pts) == 50
    assert max(math.hypot(p.Q1 - s.Q1, p.P1 - s.P1) for p in pts) < 1e-6


def test_seed_on_nm1_gives_single_point():
    pts = poincare(SUB1, 0.035, [(0.0, 0.0)], 10)[0]
    assert all(abs(p.Q1) < 1e-14 and abs(p.P1) < 1e-14 for p in pts)


def test_invalid_seeds():
    with pytest.raises(InvalidSeed):
        seed_state(0.01, 0.2, 0.0)
    with pytest.raises(InvalidSeed):
        poincare(SUB1, 0.01, [State4(0.2, 0.1, 0.0, 0.0)], 3)


def test_section_points_stay_on_level():
    E = 0.035
    out = poincare(SUB1, E, [(0.0, 0.05), (0.0, -0.12)], 20, threads=2)
    for seed, pts in zip(((0.0, 0.05), (0.0, -0.12)), out):
        s0 = seed_state(E, *seed)
        K0 = k_cartesian(SUB1, s0)
        for p in pts:
            s = seed_state(E, p.Q1, p.P1)
            assert k_cartesian(SUB1, s) == pytest.approx(K0, rel=1e-10)


def test_thread_override(monkeypatch):
    monkeypatch.setenv("RESONANCE_ATLAS_THREADS", "3")
    assert resolve_threads(1) == 3
    monkeypatch.delenv("RESONANCE_ATLAS_THREADS")
    assert resolve_threads(None) == 1 and resolve_threads(4) == 4


def _census(rp, E):
    ell = hyp = 0
    for fp in section_fixed_points(rp, E):
        img = return_map(rp, E, fp.Q1, fp.P1)
        assert math.hypot(img[0] - fp.Q1, img[1] - fp.P1) < 1e-8
        if linearize_fixed_point(rp, E, fp.Q1, fp.P1).elliptic:
            ell += 1
        else:
            hyp += 1
    return ell, hyp


@pytest.mark.parametrize(
    "E,want",
    # (elliptic, hyperbolic) on the section; NM2 does not cross Q2 = 0
    [(0.024, (1, 0)), (0.028, (2, 1)), (0.035, (3, 2)), (0.041, (3, 0))],
)
def test_fixed_point_census_subcase1(E, want):
    assert _census(SUB1, E) == want


@pytest.mark.parametrize("E", [0.024, 0.028, 0.035, 0.041])
def test_census_matches_sequence_prediction(E):
    ell, hyp = _census(SUB1, E)
    n_inc = n_loop = 0
    for ev in sequence(SUB1, E):
        d = 1 if ev.label[0] == "1" else -1
        if ev.label[1] in "Uu":
            n_inc += d
        else:
            n_loop += d
    nm1 = 1 if nm_stable(SUB1, E, Family.NM1) else 0
    # inclined family stable, loop family unstable in this sub-case
    assert (ell, hyp) == (2 * n_inc + nm1, 2 * n_loop + 1 - nm1)


def test_global_bifurcation_saddle_connection():
    assert saddle_connection_distance(SUB2, 0.1, 400.0) < 1e-3
    assert saddle_connection_distance(SUB2, 0.09, 400.0) > 1e-2


@pytest.mark.parametrize("rp,E", [(SUB1, 0.035), (SUB2, 0.105)])
def test_contacts_and_vertices_are_equilibria(rp, E):
    for cp in (contact_upper(rp, E), contact_lower(rp, E)):
        if cp is None:
            continue
        v = lemon_vector_field(rp, E, cp.X, 0.0, cp.Z)
        assert max(map(abs, v)) < 1e-8 * E**2
    for Z in (-E, E):
        assert lemon_vector_field(rp, E, 0.0, 0.0, Z) == (0.0, 0.0, 0.0)


@pytest.mark.parametrize("rp,E", [(SUB1, 0.035), (SUB2, 0.105)])
def test_reduced_flow_conservation(rp, E):
    spec = ParabolaSpec(rp, E, chambers(rp, E)[0].h_lower + 0.4 * chambers(rp, E)[0].height)
    Z = 0.0
    for Z in np.linspace(-0.9 * E, 0.9 * E, 41):
        if quartic_Q(spec, Z) > 0:
            break
    tr = reduced_flow(rp, LemonPoint(parabola_x(spec, Z), math.sqrt(quartic_Q(spec, Z)), Z, E), 3000.0)
    assert tr.drift_H <= 1e-9 and tr.drift_L <= 1e-9
    with pytest.raises(InvalidParameter):
        reduced_flow(rp, LemonPoint(1.0, 0.0, 0.0, E), 1.0)


@pytest.mark.parametrize("rp,E", [(SUB1, 0.035), (SUB2, 0.105)])
def test_pushforward_matches_reduced_flow(rp, E):
    for ch in chambers(rp, E):
        h = ch.h_lower + 0.5 * ch.height
        if n_components(rp, E, h) != 1:
            continue
        T = period_T2(TorusCoords(E, h, rp))
        s0 = torus_initial_state(rp, E, h)
        inv = invariants_of(s0)
        full = integrate(rp, s0, T, n_out=4001)
        I = [invariants_of(State4.from_array(y)) for y in full.y.T]
        a = np.array([[q.X, q.Y, q.Z] for q in I])
        red = reduced_flow(rp, LemonPoint(inv.X, inv.Y, inv.Z, E), T, n_out=4001)
        b = np.column_stack([red.X, red.Y, red.Z])
        d = max(directed_hausdorff(a, b)[0], directed_hausdorff(b, a)[0])
        assert d < 1e-5 * E


@pytest.mark.parametrize("rp,E", [(SUB1, 0.035), (SUB1, 0.01), (SUB2, 0.105)])
def test_measured_period_matches_quadrature(rp, E):
    for ch in chambers(rp, E):
        h = ch.h_lower + 0.45 * ch.height
        for k in range(n_components(rp, E, h)):
            t = TorusCoords(E, h, rp, k if n_components(rp, E, h) > 1 else None)
            m = measure_torus(rp, torus_initial_state(rp, E, h, k))
            assert m.T2 == pytest.approx(period_T2(t), rel=1e-4)
            w2 = 2 * math.pi / period_T2(t)
            assert m.omega1_exaf == pytest.approx(w2 * rotation_W(t), rel=1e-6)
            assert m.omega1_angle == pytest.approx(m.omega1_exaf, rel=1e-6)

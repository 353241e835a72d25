import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from resonance_atlas.errors import DegenerateContact, InvalidParameter, UseDegenerateBranch
from resonance_atlas.params import ReducedParams
from resonance_atlas.reduced import (
    Arc,
    Family,
    LemonPoint,
    ParabolaSpec,
    contact_lower,
    contact_upper,
    degenerate_line_analysis,
    existence_interval,
    h_nm1,
    h_nm2,
    nm_stable,
    parabola_x,
    quartic_Q,
    reduced_hamiltonian,
    roots_Q,
    torus_arcs,
    vertex,
)

from conftest import SUB1, SUB2, generic_params


def _arc_values(rp, E, sign, n=200001):
    Z = np.linspace(-E, E, n)
    X = sign * (E * E - Z * Z)
    return Z, reduced_hamiltonian(rp, E, X, Z)


def test_parabola_examples():
    assert parabola_x(ParabolaSpec(ReducedParams(-1, 0, 1, 0), 0.3, 0.0), 2.0) == pytest.approx(4.0)
    assert parabola_x(ParabolaSpec(SUB1, 0.035, 0.0), 0.0) == 0.0
    cu = contact_upper(SUB1, 0.035)
    assert parabola_x(ParabolaSpec(SUB1, 0.035, cu.h), cu.Z) == pytest.approx(0.035**2 - cu.Z**2, rel=1e-12)
    with pytest.raises(UseDegenerateBranch):
        parabola_x(ParabolaSpec(ReducedParams(1, 0, 0, 0), 0.1, 0.0), 0.0)


def test_vertex_examples():
    assert vertex(ParabolaSpec(SUB2, 0.1, 0.0))[0] == pytest.approx(0.0, abs=1e-15)
    assert vertex(ParabolaSpec(ReducedParams(1, 0, 0.3, 0), 0.7, 0.2))[0] == 0.0
    spec = ParabolaSpec(SUB1, 0.02, 0.001)
    zv, xv = vertex(spec)
    assert zv == pytest.approx((6 * 0.02 - 0.2) / (2 * 11 / 15), rel=1e-12)
    d = 1e-6
    assert (parabola_x(spec, zv + d) - parabola_x(spec, zv - d)) / (2 * d) == pytest.approx(0.0, abs=1e-9)
    assert parabola_x(spec, zv) == pytest.approx(xv, rel=1e-12)
    with pytest.raises(UseDegenerateBranch):
        vertex(ParabolaSpec(ReducedParams(0.0, 1, 0.3, 0), 0.1, 0.0))


def test_contact_upper_matches_grid_extremum():
    E = 0.035
    cu = contact_upper(SUB1, E)
    assert cu.Z == pytest.approx(0.005357, abs=5e-7)
    assert cu.h == pytest.approx(2.718e-4, rel=1e-3)
    assert cu.index == 1 and cu.stable
    Z, H = _arc_values(SUB1, E, +1)
    k = np.argmax(H)
    assert Z[k] == pytest.approx(cu.Z, abs=2 * E / 200000)
    assert H[k] == pytest.approx(cu.h, rel=1e-9)


def test_contact_upper_absent_below_threshold():
    E = 0.02
    assert contact_upper(SUB1, E) is None
    Z, H = _arc_values(SUB1, E, +1, 20001)
    k = np.argmax(H)
    assert k in (0, len(Z) - 1)


def test_contact_lower_examples():
    cl = contact_lower(SUB1, 0.035)
    assert cl.index == -1 and cl.X == pytest.approx(-(0.035**2 - cl.Z**2))
    assert contact_lower(SUB2, 0.105).index == 1
    rp = ReducedParams(-0.4, 0.0, 0.3, 0.0)
    E = 0.2
    cl, cu = contact_lower(rp, E), contact_upper(rp, E)
    assert cl.Z == 0.0 and cl.h == pytest.approx(-rp.C * E * E)
    assert cu.Z == 0.0 and cu.h == pytest.approx(rp.C * E * E)


def test_contact_degenerate_and_bad_E():
    with pytest.raises(DegenerateContact):
        contact_upper(ReducedParams(-1 / 16, 0, -1 / 16, -1 / 4), 0.5)
    with pytest.raises(DegenerateContact):
        contact_lower(ReducedParams(0.2, 0, -0.2, 0), 0.5)
    with pytest.raises(InvalidParameter):
        contact_upper(SUB1, 0.0)


@settings(max_examples=200, deadline=None)
@given(generic_params(), st.floats(min_value=0.01, max_value=1.0))
def test_contact_is_tangency_and_index_law(rp, E):
    for fn, sign, fam in ((contact_upper, 1, Family.Inclined), (contact_lower, -1, Family.Loop)):
        cp = fn(rp, E)
        interval = existence_interval(rp, fam)
        inside = interval is not None and interval[0] < E < interval[1]
        assert (cp is not None) == inside
        if cp is None:
            continue
        # h restricted to the arc is stationary at the contact
        d = 1e-6 * E
        g = lambda z: reduced_hamiltonian(rp, E, sign * (E * E - z * z), z)
        assert abs(g(cp.Z + d) - g(cp.Z - d)) / (2 * d) < 1e-7 * max(1.0, abs(rp.B) + abs(rp.A) + abs(rp.C))
        spec = ParabolaSpec(rp, E, cp.h)
        assert abs(quartic_Q(spec, cp.Z)) < 1e-12 * E**4
        want = np.sign(rp.C * (rp.C - rp.A)) if fam is Family.Inclined else np.sign(rp.C * (rp.A + rp.C))
        assert cp.index == want


def test_quartic_at_vertices_negative():
    spec = ParabolaSpec(SUB1, 0.035, 1e-4)
    for z in (-0.035, 0.035):
        assert quartic_Q(spec, z) == pytest.approx(-parabola_x(spec, z) ** 2)
        assert quartic_Q(spec, z) < 0


def test_roots_generic_chamber_two_simple_roots():
    E = 0.035
    h = 0.5 * (contact_upper(SUB1, E).h + contact_lower(SUB1, E).h)
    spec = ParabolaSpec(SUB1, E, h)
    rep = roots_Q(spec)
    inside = [r for r in rep.roots if -E < r.value < E]
    assert len(inside) == 2 and all(r.multiplicity == 1 for r in inside)
    # grid sign-change oracle
    Z = np.linspace(-E, E, 100001)
    q = quartic_Q(spec, Z)
    changes = Z[:-1][np.sign(q[:-1]) != np.sign(q[1:])]
    assert len(changes) == 2
    for zc, r in zip(changes, inside):
        assert zc == pytest.approx(r.value, abs=3 * E / 100000)
    # polynomial oracle
    coeff = np.polynomial.polynomial.Polynomial.fit(Z, q, 4).convert().coef
    pr = np.sort(np.roots(coeff[::-1]).real[np.abs(np.roots(coeff[::-1]).imag) < 1e-9])
    assert any(abs(p - inside[0].value) < 1e-8 for p in pr)


def test_roots_double_at_contact():
    E = 0.035
    cu = contact_upper(SUB1, E)
    rep = roots_Q(ParabolaSpec(SUB1, E, cu.h))
    dbl = [r for r in rep.roots if r.multiplicity == 2]
    assert len(dbl) == 1 and dbl[0].value == pytest.approx(cu.Z, abs=1e-12) and dbl[0].arcs == (Arc.Upper,)


def test_roots_degenerate_factor_flag():
    rp = ReducedParams(-0.3, 0.0, 0.3, 0.0)
    E = 0.1
    rep = roots_Q(ParabolaSpec(rp, E, -rp.C * E * E))
    assert rep.degenerate


def test_roots_above_maximum_empty():
    E = 0.035
    spec = ParabolaSpec(SUB1, E, contact_upper(SUB1, E).h + 1.0)
    assert not [r for r in roots_Q(spec).roots if -E < r.value < E]
    assert torus_arcs(spec) == []


def test_normal_mode_energies():
    E = 0.1
    assert reduced_hamiltonian(SUB2, E, 0.0, -E) == pytest.approx(h_nm1(SUB2, E))
    assert reduced_hamiltonian(SUB2, E, 0.0, E) == pytest.approx(h_nm2(SUB2, E))
    assert h_nm1(SUB2, E) == pytest.approx(-1e-3, rel=1e-12)
    assert h_nm2(SUB2, E) == pytest.approx(-1e-3, rel=1e-12)


def test_normal_mode_stability_from_grid():
    # a stable vertex is an extremum of H over the lemon near the vertex
    for E in (0.01, 0.027, 0.035, 0.045):
        for fam, z0, h0 in ((Family.NM1, -E, h_nm1(SUB1, E)), (Family.NM2, E, h_nm2(SUB1, E))):
            z = z0 - np.sign(z0) * np.linspace(1e-6, 1e-3, 50) * E
            up = reduced_hamiltonian(SUB1, E, E * E - z * z, z) - h0
            lo = reduced_hamiltonian(SUB1, E, -(E * E - z * z), z) - h0
            same_sign = np.all(np.sign(up) == np.sign(lo))
            assert same_sign == nm_stable(SUB1, E, fam)


def test_lemon_point_constraint():
    E, Z = 0.3, 0.1
    p = LemonPoint(0.05, math.sqrt((E * E - Z * Z) ** 2 - 0.05**2), Z, E)
    assert abs(p.constraint()) < 1e-16


def test_degenerate_line_analysis():
    rep = degenerate_line_analysis(ReducedParams(0.0, 0.0, 1.0, -0.2), 0.1)
    assert rep.E1U == pytest.approx(0.1)
    assert rep.E2U < 0 and "E2U" not in rep.present()
    assert rep.m == pytest.approx(0.2)
    assert rep.E1U == rep.E2L and rep.E1L == rep.E2U and rep.simultaneous
    rep = degenerate_line_analysis(ReducedParams(0.0, 0.7, 0.4, 0.0), 0.3)
    assert rep.E1U == 0.0 and rep.E2U == 0.0
    assert rep.m == pytest.approx(-0.7 * 0.3 / 0.4)
    rep = degenerate_line_analysis(ReducedParams(0.0, 2.0, 1.0, -0.2), 0.1)
    assert rep.E2U == math.inf
    with pytest.raises(InvalidParameter):
        degenerate_line_analysis(SUB1, 0.1)


def test_degenerate_line_threshold_from_contact_search():
    # with A = 0 the inclined contact leaves through NM1 exactly at E1U
    rp = ReducedParams(0.0, 0.0, 1.0, -0.2)
    t = degenerate_line_analysis(rp, 0.1).E1U
    assert contact_upper(rp, t * (1 + 1e-6)) is not None
    assert contact_upper(rp, t * (1 - 1e-6)) is None


def test_degenerate_line_level_through_nm1():
    rp = ReducedParams(0.0, 0.5, 0.3, -0.2)
    E = 0.2
    rep = degenerate_line_analysis(rp, E)
    assert rep.h_bar == pytest.approx(h_nm1(rp, E), rel=1e-12)

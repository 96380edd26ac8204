"""Horocyclic sweeps: construction, h extraction, flatness classes."""

import io
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from h3frames.errors import DegenerateFrameError, NotHorocyclicError
from h3frames.examples import get_example
from h3frames.frames import (
    ReductionType,
    invariant_field,
    reduction_type,
    verify_framed,
)
from h3frames.horocyclic import (
    Curve4,
    HoroClass,
    HoroTag,
    HorocyclicData,
    build_horocyclic,
    classify_horocyclic,
    extract_h,
    horocyclic_alpha_beta,
    horocyclic_invariants,
    integrate_frame_curves,
    invariant_form_classify,
    load_h_profile,
    verify_horocyclic_data,
)
from h3frames.minkowski import minkowski_dot4
from h3frames.singularities import (
    SingularityClass,
    classify_singularity,
    find_singular_points,
    horocyclic_classify_singularity,
)
from h3frames.surface import Domain

ON_H3_TOL = 1e-12
BRIDGE_TOL = 1e-7
ORACLE_TOL = 1e-8
ROUND_TRIP_TOL = 1e-6

INVARIANT_NAMES = ("a1", "a2", "b1", "b2", "c1", "c2", "e1", "e2", "f1", "f2", "g1", "g2")

E0 = np.array([1.0, 0.0, 0.0, 0.0])
E1 = np.array([0.0, 1.0, 0.0, 0.0])
E2 = np.array([0.0, 0.0, 1.0, 0.0])


def _helix_data():
    """a0 boosts in the x1-x2 plane; the exact curvature tuple is (1,0,0,0,0,0)."""
    a0 = Curve4(
        value=lambda u: np.array([math.cosh(u), math.sinh(u), 0.0, 0.0]),
        d=lambda u: np.array([math.sinh(u), math.cosh(u), 0.0, 0.0]),
    )
    a1 = Curve4(
        value=lambda u: np.array([math.sinh(u), math.cosh(u), 0.0, 0.0]),
        d=lambda u: np.array([math.cosh(u), math.sinh(u), 0.0, 0.0]),
    )
    a2 = Curve4(value=lambda u: E2.copy(), d=lambda u: np.zeros(4))
    one = lambda u: 1.0
    zero = lambda u: 0.0
    return HorocyclicData(a0=a0, a1=a1, a2=a2, h=(one, zero, zero, zero, zero, zero))


def _const_h(values):
    return tuple((lambda c: lambda u: float(c))(c) for c in values)


GENERIC_H = (0.3, 0.7, 0.2, -0.1, 0.5, 0.4)

# profile -> (h functions, expected tag); the generalized cone uses a
# non-constant h5 so the constant-ratio test cannot poach it.
PROFILES = {
    "horo_flat": (_const_h((1, 0, 0.4, 1, 0.3, 0.5)), HoroTag.HORO_FLAT),
    "generalized_horo_cone": (
        _const_h((0, 0, 0, 0)) + (lambda u: math.sin(u) + 2.0, lambda u: 1.0),
        HoroTag.GENERALIZED_HORO_CONE,
    ),
    "single_vertex": (_const_h((0, 0, 0, 0, 0, 1)), HoroTag.HORO_CONE_SINGLE_VERTEX),
    "two_vertices": (_const_h((0, 0, 0, 0, 2, 1)), HoroTag.HORO_CONE_TWO_VERTICES),
    "conical_horosphere": (_const_h((0, 0, 0, 0, 1, 0)), HoroTag.CONICAL_HOROSPHERE),
    "generic": (_const_h(GENERIC_H), HoroTag.GENERIC),
}

DOMAIN = Domain(-1.0, 1.0, -1.2, 1.2, nu=9, nv=9)


def _integrated(h_funcs, step=1e-3):
    return integrate_frame_curves(h_funcs, E0, E1, E2, -1.0, 1.0, step=step)


# ---------------------------------------------------------------------------
# extract_h
# ---------------------------------------------------------------------------


def test_extract_h_helix():
    data = _helix_data()
    for u in (-0.8, 0.0, 0.3, 1.1):
        got = extract_h(data.a0, data.a1, data.a2, u)
        assert np.allclose(got, [1.0, 0.0, 0.0, 0.0, 0.0, 0.0], atol=1e-9)


def test_extract_h_constant_frame_is_zero():
    a0 = Curve4(value=lambda u: E0.copy())
    a1 = Curve4(value=lambda u: E1.copy())
    a2 = Curve4(value=lambda u: E2.copy())
    assert np.allclose(extract_h(a0, a1, a2, 0.25), np.zeros(6), atol=1e-12)


def test_extract_h_rejects_degenerate_frame():
    a0 = Curve4(value=lambda u: E0.copy())
    bad = Curve4(value=lambda u: 2.0 * E1)  # not unit
    a2 = Curve4(value=lambda u: E2.copy())
    with pytest.raises(DegenerateFrameError):
        extract_h(a0, bad, a2, 0.0)


# ---------------------------------------------------------------------------
# surface construction
# ---------------------------------------------------------------------------


def test_built_surface_lies_on_hyperboloid():
    fs = build_horocyclic(_helix_data(), DOMAIN)
    worst = max(
        abs(minkowski_dot4(fs.x.value(u, v), fs.x.value(u, v)) + 1.0)
        for u in DOMAIN.u_grid()
        for v in DOMAIN.v_grid()
    )
    assert worst < ON_H3_TOL


def test_built_surface_is_properly_framed():
    fs = build_horocyclic(_helix_data(), DOMAIN)
    summary = verify_framed(fs)
    assert summary.max_gram_residual < 1e-10
    assert summary.max_offspan_residual < 1e-8
    assert summary.max_constraint_residual < 1e-8


def test_built_surface_reduces_to_v_family_everywhere():
    fs = build_horocyclic(_integrated(_const_h(GENERIC_H)), DOMAIN)
    field = invariant_field(fs)
    tags = {
        reduction_type(field(u, v)).tag
        for u in DOMAIN.u_grid()[::2]
        for v in DOMAIN.v_grid()[::2]
    }
    assert tags == {ReductionType.FAMILY_V}


def test_build_rejects_degenerate_curve_data():
    bad = HorocyclicData(
        a0=Curve4(value=lambda u: E0.copy()),
        a1=Curve4(value=lambda u: 3.0 * E1),
        a2=Curve4(value=lambda u: E2.copy()),
        h=_const_h((0, 0, 0, 0, 0, 0)),
    )
    with pytest.raises(DegenerateFrameError):
        build_horocyclic(bad, DOMAIN)


def test_closed_form_invariants_match_extraction():
    for data in (_helix_data(), _integrated(_const_h(GENERIC_H))):
        fs = build_horocyclic(data, DOMAIN)
        oracle = horocyclic_invariants(data)
        field = invariant_field(fs)
        worst = 0.0
        for u in DOMAIN.u_grid()[::2]:
            for v in DOMAIN.v_grid()[::2]:
                o, g = oracle(u, v), field(u, v)
                worst = max(
                    worst,
                    max(abs(getattr(o, n) - getattr(g, n)) for n in INVARIANT_NAMES),
                )
        assert worst < ORACLE_TOL


def test_alpha_beta_closed_form():
    data = _integrated(_const_h(GENERIC_H))
    ab = horocyclic_alpha_beta(data)
    oracle = horocyclic_invariants(data)
    for u in (-0.7, 0.1, 0.9):
        for v in (-1.0, 0.0, 0.8):
            a, b = ab(u, v)
            q = oracle(u, v)
            assert a == pytest.approx(q.alpha, abs=1e-14)
            assert b == pytest.approx(q.beta, abs=1e-14)
    # spot value: alpha = v h1 - h2 - v h4 at v = 1
    h1, h2, _, h4, _, _ = GENERIC_H
    assert ab(0.0, 1.0)[0] == pytest.approx(h1 - h2 - h4, abs=1e-12)


@settings(max_examples=150, deadline=None)
@given(
    h=st.tuples(*([st.floats(-3, 3)] * 6)),
    v=st.floats(-2, 2),
)
def test_bridge_identities_hold_for_closed_forms(h, v):
    """The invariant combinations that recover h1..h6 are exact identities."""
    data = HorocyclicData(
        a0=Curve4(value=lambda u: E0.copy()),
        a1=Curve4(value=lambda u: E1.copy()),
        a2=Curve4(value=lambda u: E2.copy()),
        h=_const_h(h),
    )
    q = horocyclic_invariants(data)(0.0, v)
    h1, h2, h3, h4, h5, h6 = h
    scale = 1.0 + max(abs(c) for c in h) * (1.0 + v * v)
    tol = 1e-12 * scale
    assert abs((q.c1 + q.g1) - (h4 - h1)) < tol
    assert abs((q.b1 - v * (q.c1 + q.g1)) - h2) < tol
    assert abs((q.a1 - q.e1) - (h3 + h6)) < tol
    assert abs((q.f1 - v * (q.a1 - q.e1)) - h5) < tol
    assert abs(((v * v + 2.0) * q.a1 - v * v * q.e1 - 2.0 * v * q.f1) - 2.0 * h3) < tol


def test_bridge_identities_on_built_surface():
    h_funcs = _const_h(GENERIC_H)
    fs = build_horocyclic(_integrated(h_funcs), DOMAIN)
    field = invariant_field(fs)
    worst = 0.0
    for u in DOMAIN.u_grid()[::2]:
        hs = [f(u) for f in h_funcs]
        for v in DOMAIN.v_grid()[::2]:
            q = field(u, v)
            checks = (
                (q.c1 + q.g1) - (hs[3] - hs[0]),
                (q.b1 - v * (q.c1 + q.g1)) - hs[1],
                (q.a1 - q.e1) - (hs[2] + hs[5]),
                (q.f1 - v * (q.a1 - q.e1)) - hs[4],
                ((v * v + 2.0) * q.a1 - v * v * q.e1 - 2.0 * v * q.f1) - 2.0 * hs[2],
            )
            worst = max(worst, max(abs(c) for c in checks))
    assert worst < BRIDGE_TOL


# ---------------------------------------------------------------------------
# curve integration
# ---------------------------------------------------------------------------


def test_integrate_then_extract_recovers_h():
    h_funcs = (
        lambda u: 0.3 * math.sin(u) + 0.1,
        lambda u: 0.7,
        lambda u: 0.2 * u,
        lambda u: -0.1,
        lambda u: 0.5 * math.cos(u),
        lambda u: 0.4,
    )
    data = _integrated(h_funcs)
    worst = 0.0
    for u in np.linspace(-0.95, 0.95, 9):
        got = extract_h(data.a0, data.a1, data.a2, u)
        worst = max(worst, max(abs(g - f(u)) for g, f in zip(got, h_funcs)))
    assert worst < ROUND_TRIP_TOL


def test_integrated_curves_stay_orthonormal_between_nodes():
    # sample off the integration nodes too: the pointwise polish must hold
    # everywhere, not just where the integrator stopped
    data = _integrated(_const_h(GENERIC_H))
    us = np.linspace(-1.0, 1.0, 101) + 2.71e-4
    assert verify_horocyclic_data(data, us[:-1]) < 1e-12


def test_integrate_rejects_bad_inputs():
    with pytest.raises(ValueError):
        integrate_frame_curves(_const_h((0, 0, 0)), E0, E1, E2, 0.0, 1.0)
    with pytest.raises(ValueError):
        integrate_frame_curves(_const_h(GENERIC_H), E0, E1, E2, 1.0, 1.0)
    with pytest.raises(DegenerateFrameError):
        integrate_frame_curves(_const_h(GENERIC_H), E0, 2.0 * E1, E2, 0.0, 1.0)


# ---------------------------------------------------------------------------
# flatness classification
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("name", sorted(PROFILES))
def test_classify_h_form(name):
    h_funcs, want = PROFILES[name]
    us = np.linspace(-1.0, 1.0, 11)
    samples = np.array([[f(u) for f in h_funcs] for u in us])
    got = classify_horocyclic(samples)
    assert got.tag is want
    if want is HoroTag.HORO_CONE_TWO_VERTICES:
        assert got.two_vertex_ratio == pytest.approx(2.0, abs=1e-12)
    else:
        assert got.two_vertex_ratio is None


def test_classify_flat_tuple_with_h3_zero():
    samples = np.array([[1.0, 0.0, 0.0, 1.0, 0.3, 0.5]] * 5)
    assert classify_horocyclic(samples).tag is HoroTag.HORO_FLAT


def test_classify_needs_two_samples():
    with pytest.raises(ValueError):
        classify_horocyclic(np.zeros((1, 6)))
    with pytest.raises(ValueError):
        classify_horocyclic(np.zeros((3, 5)))


@pytest.mark.parametrize("name", sorted(PROFILES))
def test_invariant_form_agrees_with_h_form(name):
    h_funcs, want = PROFILES[name]
    fs = build_horocyclic(_integrated(h_funcs), DOMAIN)
    got = invariant_form_classify(invariant_field(fs), DOMAIN)
    assert got.tag is want
    if want is HoroTag.HORO_CONE_TWO_VERTICES:
        assert got.two_vertex_ratio == pytest.approx(2.0, abs=1e-6)


def test_invariant_form_rejects_non_horocyclic_field():
    entry = get_example("cross_cap")
    small = Domain(0.1, 0.4, 0.1, 0.4, nu=3, nv=3)
    with pytest.raises(NotHorocyclicError):
        invariant_form_classify(invariant_field(entry.framed), small)


def test_horoclass_is_plain_dataclass():
    c = HoroClass(HoroTag.GENERIC)
    assert c.two_vertex_ratio is None
    assert c == HoroClass(HoroTag.GENERIC)


# ---------------------------------------------------------------------------
# singularities of a horocyclic sweep
# ---------------------------------------------------------------------------


def test_singular_point_location_and_classifier_agreement():
    # b1 = h2 = u vanishes on u = 0; a1 = 0.5 (1 + v^2/2) - v vanishes at
    # v = 2 - sqrt(2); the bracket a1_u b1_v - a1_v b1_u is nonzero there.
    h_funcs = (
        lambda u: 0.0,
        lambda u: u,
        lambda u: 0.5,
        lambda u: 0.0,
        lambda u: -1.0,
        lambda u: 0.0,
    )
    dom = Domain(-1.0, 1.0, -1.5, 1.5, nu=21, nv=21)
    fs = build_horocyclic(_integrated(h_funcs), dom)

    pts = find_singular_points(fs)
    assert len(pts) == 1
    u0, v0 = pts[0]
    assert math.hypot(u0 - 0.0, v0 - (2.0 - math.sqrt(2.0))) < 1e-8

    generic = classify_singularity(fs, u0, v0)
    horo = horocyclic_classify_singularity(invariant_field(fs), u0, v0)
    assert generic.classification is SingularityClass.CROSS_CAP
    assert horo.classification is generic.classification
    assert horo.diagnostics.D == pytest.approx(generic.diagnostics.D, abs=1e-9)
    for a, b in zip(
        horo.diagnostics.independence_pair, generic.diagnostics.independence_pair
    ):
        assert a == pytest.approx(b, abs=1e-9)
    # closed-form bracket at the root: -(0.5 v - 1)
    assert abs(generic.diagnostics.D) == pytest.approx(1.0 - 0.5 * v0, abs=1e-5)


# ---------------------------------------------------------------------------
# h-profile CSV and the example registry
# ---------------------------------------------------------------------------

_PROFILE_TEXT = None


def _profile_text():
    global _PROFILE_TEXT
    if _PROFILE_TEXT is None:
        rows = ["u,h1,h2,h3,h4,h5,h6"]
        for u in np.linspace(-1.0, 1.0, 21):
            vals = (u, 0.3 * math.sin(u) + 0.1, 0.7, 0.2 * u, -0.1,
                    0.5 * math.cos(u), 0.4)
            rows.append(",".join(format(x, ".17g") for x in vals))
        _PROFILE_TEXT = "\n".join(rows) + "\n"
    return _PROFILE_TEXT


def test_profile_loader_reproduces_nodes():
    prof = load_h_profile(io.StringIO(_profile_text()))
    assert prof.u_min == -1.0 and prof.u_max == 1.0
    for i, u in enumerate(prof.u):
        assert np.allclose(prof.at(u), prof.values[i], atol=1e-14)
    # spline of a smooth function: mid-sample error stays small
    assert prof.h_funcs[4](0.37) == pytest.approx(0.5 * math.cos(0.37), abs=1e-6)


def test_profile_loader_validation():
    with pytest.raises(ValueError, match="header"):
        load_h_profile(io.StringIO("u,h1,h2,h3,h4,h5\n0,0,0,0,0,0\n1,0,0,0,0,0\n"))
    with pytest.raises(ValueError, match="increasing"):
        load_h_profile(
            io.StringIO("u,h1,h2,h3,h4,h5,h6\n1,0,0,0,0,0,0\n0,0,0,0,0,0,0\n")
        )
    with pytest.raises(ValueError, match="malformed"):
        load_h_profile(
            io.StringIO("u,h1,h2,h3,h4,h5,h6\n0,x,0,0,0,0,0\n1,0,0,0,0,0,0\n")
        )
    with pytest.raises(ValueError):
        load_h_profile(io.StringIO("u,h1,h2,h3,h4,h5,h6\n0,0,0,0,0,0,0\n"))


def test_example_from_profile(tmp_path):
    path = tmp_path / "profile.csv"
    path.write_text(_profile_text())
    entry = get_example(f"horocyclic:{path}")

    summary = verify_framed(entry.framed)
    assert summary.max_gram_residual < 1e-10
    assert summary.max_offspan_residual < 1e-8
    assert summary.max_constraint_residual < 1e-8

    dom = entry.framed.domain
    field = invariant_field(entry.framed)
    worst = 0.0
    for u in dom.u_grid()[::4]:
        for v in dom.v_grid()[::4]:
            o, g = entry.oracle_invariants(u, v), field(u, v)
            worst = max(
                worst, max(abs(getattr(o, n) - getattr(g, n)) for n in INVARIANT_NAMES)
            )
    assert worst < ORACLE_TOL
    a, b = entry.oracle_alpha_beta(0.3, 0.8)
    q = entry.oracle_invariants(0.3, 0.8)
    assert (a, b) == (q.alpha, q.beta)

"""The built-in example surfaces: defining properties, derivative
consistency, and the closed-form invariant oracles."""

import math

import numpy as np
import pytest

from h3frames.errors import PreconditionError
from h3frames.examples import (
    corank_one_alpha_beta,
    corank_one_surface,
    cross_cap_oracle,
    cross_cap_surface,
    example_names,
    get_example,
    ruled_a_oracle,
    ruled_b_oracle,
)
from h3frames.frames import invariants_at
from h3frames.minkowski import minkowski_dot4

CLOSED_VS_FD_TOL = 1e-7
ORACLE_TOL = 1e-10
FD_STEP = 1e-5

GRID_EXAMPLES = ("cross_cap", "corank_one", "ruled_A", "ruled_B")


def _sample_points(domain, n=5, margin=0.05):
    us = np.linspace(domain.u_min + margin, domain.u_max - margin, n)
    vs = np.linspace(domain.v_min + margin, domain.v_max - margin, n)
    return [(u, v) for u in us for v in vs]


def _fd_first(value, u, v, h=FD_STEP):
    du = (value(u + h, v) - value(u - h, v)) / (2.0 * h)
    dv = (value(u, v + h) - value(u, v - h)) / (2.0 * h)
    return du, dv


@pytest.mark.parametrize("name", GRID_EXAMPLES)
def test_closed_firsts_match_finite_differences(name):
    """Every hand-coded derivative must agree with differencing its value."""
    ex = get_example(name)
    fs = ex.framed
    for label, m in (("x", fs.x), ("nu1", fs.nu1), ("nu2", fs.nu2)):
        if not m.has_closed_firsts:
            continue
        for u, v in _sample_points(fs.domain):
            du_fd, dv_fd = _fd_first(m.value, u, v)
            assert np.max(np.abs(m.du(u, v) - du_fd)) < CLOSED_VS_FD_TOL, (
                f"{name}.{label} du mismatch at {(u, v)}"
            )
            assert np.max(np.abs(m.dv(u, v) - dv_fd)) < CLOSED_VS_FD_TOL, (
                f"{name}.{label} dv mismatch at {(u, v)}"
            )


def test_cross_cap_base_point_form():
    fs = cross_cap_surface()
    for u, v in _sample_points(fs.domain):
        x = fs.x.value(u, v)
        W = u * u + v ** 4 + u * u * v * v + 1.0
        assert np.allclose(x, [math.sqrt(W), u, v * v, u * v], atol=1e-15)
        assert abs(minkowski_dot4(x, x) + 1.0) < 1e-12


@pytest.mark.parametrize("name", ("ruled_A", "ruled_B"))
def test_ruled_generators_are_pseudo_orthonormal(name):
    """x = cosh(v) gamma + sinh(v) delta needs <gamma,gamma> = -1,
    <delta,delta> = 1, <gamma,delta> = 0; the surface then stays on the
    hyperboloid for every v."""
    fs = get_example(name).framed
    for u in np.linspace(-math.pi, math.pi, 17):
        gamma = fs.x.value(u, 0.0)
        # x_v at v = 0 is exactly delta.
        delta = fs.x.dv(u, 0.0)
        assert abs(minkowski_dot4(gamma, gamma) + 1.0) < 1e-12
        assert abs(minkowski_dot4(delta, delta) - 1.0) < 1e-12
        assert abs(minkowski_dot4(gamma, delta)) < 1e-12
        n1 = fs.nu1.value(u, 0.0)
        assert abs(minkowski_dot4(n1, n1) - 1.0) < 1e-12
        assert abs(minkowski_dot4(n1, gamma)) < 1e-12
        assert abs(minkowski_dot4(n1, delta)) < 1e-12


@pytest.mark.parametrize(
    "name,oracle",
    (
        ("cross_cap", cross_cap_oracle),
        ("ruled_A", ruled_a_oracle),
        ("ruled_B", ruled_b_oracle),
    ),
)
def test_extracted_invariants_match_oracle(name, oracle):
    fs = get_example(name).framed
    for u, v in _sample_points(fs.domain, n=7):
        got = invariants_at(fs, u, v).as_dict()
        want = oracle(u, v).as_dict()
        for k in got:
            assert got[k] == pytest.approx(want[k], abs=ORACLE_TOL), (
                f"{name} {k} at {(u, v)}"
            )


def test_alpha_beta_oracles_match_field():
    for name in GRID_EXAMPLES:
        ex = get_example(name)
        if ex.oracle_alpha_beta is None:
            continue
        fs = ex.framed
        for u, v in _sample_points(fs.domain, n=4):
            inv = invariants_at(fs, u, v)
            alpha, beta = ex.oracle_alpha_beta(u, v)
            assert inv.alpha == pytest.approx(alpha, abs=ORACLE_TOL)
            assert inv.beta == pytest.approx(beta, abs=ORACLE_TOL)


# Frozen oracle rows.  These literals were produced by the closed forms at
# the time the formulas were verified against independent frame extraction;
# they guard both routes against silent edits.
_FROZEN = {
    ("cross_cap", (0.5, -0.3)): {
        "a1": 0.0,
        "a2": -0.5975846633059372,
        "b1": 0.0,
        "b2": -0.47891314261057566,
        "c1": 0.9263141700254184,
        "c2": -0.10266490163305259,
        "e1": 0.0,
        "e2": -0.04292867236195937,
        "f1": 0.08303267121152375,
        "f2": -0.009202645601358734,
        "g1": 0.0,
        "g2": 1.0340188201966813,
        "alpha": 0.4436240302115802,
        "beta": -0.5535511414101583,
    },
    ("ruled_A", (0.7, 0.4)): {
        "a1": -0.314985323417662,
        "a2": 0.0,
        "b1": -1.585068725307562,
        "b2": 0.0,
        "c1": 0.0,
        "c2": 1.0,
        "e1": 0.0,
        "e2": 0.0,
        "f1": 0.8290200914039489,
        "f2": 0.0,
        "g1": -2.3478592087150667,
        "g2": 0.0,
        "alpha": -1.585068725307562,
        "beta": 0.314985323417662,
    },
    ("ruled_B", (0.7, 0.4)): {
        "a1": 0.0,
        "a2": 0.0,
        "b1": -1.3100026944038974,
        "b2": 0.0,
        "c1": 2.677962637032473,
        "c2": -1.0,
        "e1": 0.7668497623282428,
        "e2": 0.0,
        "f1": 0.0,
        "f2": 0.0,
        "g1": -3.4478385902891957,
        "g2": 0.0,
        "alpha": 1.3100026944038974,
        "beta": 0.0,
    },
}


@pytest.mark.parametrize("key", sorted(_FROZEN, key=str))
def test_frozen_oracle_rows(key):
    name, (u, v) = key
    got = get_example(name).oracle_invariants(u, v).as_dict()
    for k, want in _FROZEN[key].items():
        assert got[k] == pytest.approx(want, abs=1e-14), f"{name} {k}"


def test_default_corank_one_is_the_cross_cap():
    cc = get_example("cross_cap")
    co = get_example("corank_one")
    for u, v in _sample_points(cc.framed.domain, n=4):
        assert np.max(np.abs(cc.framed.x.value(u, v) - co.framed.x.value(u, v))) < 1e-14
        a_cc, b_cc = cc.oracle_alpha_beta(u, v)
        a_co, b_co = co.oracle_alpha_beta(u, v)
        assert a_cc == pytest.approx(a_co, abs=1e-13)
        assert b_cc == pytest.approx(b_co, abs=1e-13)


def test_corank_one_rejects_nonsingular_origin():
    f = lambda u, v: v
    f_v = lambda u, v: 1.0  # f_v(0,0) != 0: origin would not be singular
    zero = lambda u, v: 0.0
    with pytest.raises(PreconditionError):
        corank_one_surface(f, zero, zero, f_v, zero, zero)
    # check_origin=False builds it anyway
    fs = corank_one_surface(f, zero, zero, f_v, zero, zero, check_origin=False)
    assert fs.x.value(0.1, 0.2).shape == (4,)


def test_corank_one_custom_instance_alpha_beta():
    """f = v^2 + u v, g = u v: alpha/beta closed forms vs extraction."""
    f = lambda u, v: v * v + u * v
    g = lambda u, v: u * v
    f_u = lambda u, v: v
    f_v = lambda u, v: 2.0 * v + u
    g_u = lambda u, v: v
    g_v = lambda u, v: u
    fs = corank_one_surface(f, g, f_u, f_v, g_u, g_v)
    ab = corank_one_alpha_beta(f, g, f_u, f_v, g_u, g_v)
    for u, v in _sample_points(fs.domain, n=4):
        inv = invariants_at(fs, u, v)
        alpha, beta = ab(u, v)
        # e/f/g come through finite differences inside the normal maps, but
        # alpha/beta only involve a, b, c - closed-form accurate.
        assert inv.alpha == pytest.approx(alpha, abs=1e-9)
        assert inv.beta == pytest.approx(beta, abs=1e-9)


def test_known_singularities_kill_alpha_beta():
    """At every advertised singular point the wedge coefficients vanish."""
    for name in ("cross_cap", "ruled_A"):
        ex = get_example(name)
        assert ex.known_singularities
        for u0, v0, tag in ex.known_singularities:
            alpha, beta = ex.oracle_alpha_beta(u0, v0)
            assert abs(alpha) < 1e-12 and abs(beta) < 1e-12, (name, u0, v0)
            assert tag == "cross_cap"


def test_ruled_b_singular_along_v_zero():
    ex = get_example("ruled_B")
    for u in np.linspace(-3.0, 3.0, 13):
        alpha, beta = ex.oracle_alpha_beta(u, 0.0)
        assert abs(alpha) < 1e-12 and abs(beta) < 1e-12
    # ... and nowhere off that line
    alpha, beta = ex.oracle_alpha_beta(0.3, 0.5)
    assert math.hypot(alpha, beta) > 1e-3


def test_registry_names_and_unknown():
    names = example_names()
    for required in ("cross_cap", "corank_one", "ruled_A", "ruled_B"):
        assert required in names
    with pytest.raises(KeyError):
        get_example("moebius_band")

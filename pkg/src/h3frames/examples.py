"""Built-in example surfaces with closed-form frames and oracle invariants.

Each entry bundles a framed surface over a default domain with, where
available, closed-form oracle callables for the twelve invariants and for
(alpha, beta), plus the locations of known isolated singular points.  The
long expressions are transcribed in exactly one place - here - and the test
suite checks them against their defining properties (unit normals, pseudo
orthogonality, frame reconstruction) rather than trusting them blindly.

Registry names: ``cross_cap``, ``corank_one``, ``ruled_A``, ``ruled_B`` and
``horocyclic:<profile.csv>`` (curve data loaded from an h-profile file).
"""

from __future__ import annotations

import dataclasses
import math
from typing import Callable, Optional

import numpy as np

from .errors import PreconditionError
from .frames import FramedSurface, Invariants
from .surface import Domain, ParametricMap4

__all__ = [
    "ExampleEntry",
    "example_names",
    "get_example",
    "cross_cap_surface",
    "cross_cap_oracle",
    "corank_one_surface",
    "corank_one_alpha_beta",
    "ruled_a_surface",
    "ruled_a_oracle",
    "ruled_b_surface",
    "ruled_b_oracle",
]

SQ3 = math.sqrt(3.0)


@dataclasses.dataclass(frozen=True)
class ExampleEntry:
    name: str
    framed: FramedSurface
    oracle_invariants: Optional[Callable[[float, float], Invariants]] = None
    oracle_alpha_beta: Optional[Callable[[float, float], tuple[float, float]]] = None
    known_singularities: tuple[tuple[float, float, str], ...] = ()
    notes: str = ""


# ---------------------------------------------------------------------------
# Cross cap:  x = (sqrt(W), u, v^2, u v),  W = u^2 + v^4 + u^2 v^2 + 1.
# ---------------------------------------------------------------------------


def _cc_W(u, v):
    return u * u + v ** 4 + u * u * v * v + 1.0


def cross_cap_surface(domain: Optional[Domain] = None) -> FramedSurface:
    """The standard cross cap with closed-form first derivatives."""

    def x(u, v):
        return np.array([math.sqrt(_cc_W(u, v)), u, v * v, u * v])

    def xu(u, v):
        return np.array([u * (1.0 + v * v) / math.sqrt(_cc_W(u, v)), 1.0, 0.0, v])

    def xv(u, v):
        return np.array(
            [(2.0 * v ** 3 + u * u * v) / math.sqrt(_cc_W(u, v)), 0.0, 2.0 * v, u]
        )

    def n1(u, v):
        P = math.sqrt(v ** 4 + 1.0)
        return np.array(
            [v * v * math.sqrt(_cc_W(u, v)) / P, u * v * v / P, P, u * v ** 3 / P]
        )

    def n1u(u, v):
        P = math.sqrt(v ** 4 + 1.0)
        return np.array(
            [
                u * v * v * (1.0 + v * v) / (math.sqrt(_cc_W(u, v)) * P),
                v * v / P,
                0.0,
                v ** 3 / P,
            ]
        )

    def n1v(u, v):
        W = _cc_W(u, v)
        sW = math.sqrt(W)
        P2 = v ** 4 + 1.0
        P = math.sqrt(P2)
        P3 = P2 * P
        return np.array(
            [
                2.0 * v * sW / P
                + v * v * (2.0 * v ** 3 + u * u * v) / (sW * P)
                - 2.0 * v ** 5 * sW / P3,
                2.0 * u * v / P3,
                2.0 * v ** 3 / P,
                u * v * v * (v ** 4 + 3.0) / P3,
            ]
        )

    def n2(u, v):
        Q = math.sqrt(v * v + 1.0)
        return np.array([0.0, v / Q, 0.0, -1.0 / Q])

    def n2u(u, v):
        return np.zeros(4)

    def n2v(u, v):
        Q3 = (v * v + 1.0) ** 1.5
        return np.array([0.0, 1.0 / Q3, 0.0, v / Q3])

    dom = domain or Domain(-0.9, 0.9, -0.9, 0.9, nu=21, nv=21)
    return FramedSurface(
        x=ParametricMap4(value=x, du=xu, dv=xv),
        nu1=ParametricMap4(value=n1, du=n1u, dv=n1v),
        nu2=ParametricMap4(value=n2, du=n2u, dv=n2v),
        domain=dom,
    )


def cross_cap_oracle(u: float, v: float) -> Invariants:
    """Closed-form invariants of the cross cap."""
    W = _cc_W(u, v)
    sW = math.sqrt(W)
    P = math.sqrt(v ** 4 + 1.0)
    Q = math.sqrt(v * v + 1.0)
    poly = 1.0 - v ** 4 - 2.0 * v * v
    return Invariants(
        a1=0.0,
        a2=2.0 * v / P,
        b1=0.0,
        b2=-u / Q,
        c1=P * Q / sW,
        c2=u * v * poly / (sW * P * Q),
        e1=0.0,
        e2=-u * v * v / (P * Q),
        f1=v * v * Q / sW,
        f2=u * v ** 3 * poly / ((v ** 4 + 1.0) * sW * Q),
        g1=0.0,
        g2=sW / ((v * v + 1.0) * P),
    )


def cross_cap_alpha_beta(u: float, v: float) -> tuple[float, float]:
    sW = math.sqrt(_cc_W(u, v))
    return (
        u * math.sqrt(v ** 4 + 1.0) / sW,
        2.0 * v * math.sqrt(v * v + 1.0) / sW,
    )


# ---------------------------------------------------------------------------
# Corank-one family:  x = (sqrt(u^2 + f^2 + g^2 + 1), u, f, g).
# ---------------------------------------------------------------------------


def corank_one_surface(
    f: Callable[[float, float], float],
    g: Callable[[float, float], float],
    f_u: Callable[[float, float], float],
    f_v: Callable[[float, float], float],
    g_u: Callable[[float, float], float],
    g_v: Callable[[float, float], float],
    domain: Optional[Domain] = None,
    check_origin: bool = True,
) -> FramedSurface:
    """Corank-one family for user functions f, g.

    The construction assumes f_v(0,0) = g_v(0,0) = 0 (so the origin is a
    singular point of the base map); this is checked unless
    ``check_origin=False``.  Normal fields carry no closed-form derivatives
    - the e/f/g invariants come out through finite differences.
    """
    if check_origin and (abs(f_v(0.0, 0.0)) > 1e-12 or abs(g_v(0.0, 0.0)) > 1e-12):
        raise PreconditionError(
            "corank-one family needs f_v(0,0) = g_v(0,0) = 0, got "
            f"f_v = {f_v(0.0, 0.0):.3e}, g_v = {g_v(0.0, 0.0):.3e}"
        )

    def S(u, v):
        return u * u + f(u, v) ** 2 + g(u, v) ** 2 + 1.0

    def x(u, v):
        return np.array([math.sqrt(S(u, v)), u, f(u, v), g(u, v)])

    def xu(u, v):
        fv_, gv_ = f(u, v), g(u, v)
        fu_, gu_ = f_u(u, v), g_u(u, v)
        return np.array(
            [(u + fv_ * fu_ + gv_ * gu_) / math.sqrt(S(u, v)), 1.0, fu_, gu_]
        )

    def xv(u, v):
        fv_, gv_ = f(u, v), g(u, v)
        fvv, gvv = f_v(u, v), g_v(u, v)
        return np.array(
            [(fv_ * fvv + gv_ * gvv) / math.sqrt(S(u, v)), 0.0, fvv, gvv]
        )

    def _Q(u, v):
        return (g(u, v) - u * g_u(u, v)) ** 2 + g_u(u, v) ** 2 + 1.0

    def n2(u, v):
        return ((u * g_u(u, v) - g(u, v)) * x(u, v) + np.array(
            [0.0, g_u(u, v), 0.0, -1.0]
        )) / math.sqrt(_Q(u, v))

    def _bar1(u, v):
        fv_, gv_ = f(u, v), g(u, v)
        fu_ = f_u(u, v)
        return np.array(
            [
                (fv_ - u * fu_) * math.sqrt(S(u, v)),
                u * fv_ - (1.0 + u * u) * fu_,
                1.0 + fv_ * fv_ - u * fv_ * fu_,
                fv_ * gv_ - u * gv_ * fu_,
            ]
        )

    def _k(u, v):
        fv_, gv_ = f(u, v), g(u, v)
        fu_, gu_ = f_u(u, v), g_u(u, v)
        num = -(gv_ * fv_ + gu_ * fu_) + u * (gu_ * fv_ + gv_ * fu_) - u * u * fu_ * gu_
        return num / _Q(u, v)

    def _p(u, v):
        fv_, gv_ = f(u, v), g(u, v)
        fu_, gu_ = f_u(u, v), g_u(u, v)
        return (
            (fv_ - u * fu_) ** 2
            + (gv_ - u * gu_) ** 2
            + (fu_ * gv_ - gu_ * fv_) ** 2
            + fu_ * fu_
            + gu_ * gu_
            + 1.0
        )

    def n1(u, v):
        # nu1 = sqrt(Q)/sqrt(p) (bar1 - k bar2) with bar2 unnormalized.
        bar2 = (u * g_u(u, v) - g(u, v)) * x(u, v) + np.array(
            [0.0, g_u(u, v), 0.0, -1.0]
        )
        return (
            math.sqrt(_Q(u, v))
            / math.sqrt(_p(u, v))
            * (_bar1(u, v) - _k(u, v) * bar2)
        )

    dom = domain or Domain(-0.9, 0.9, -0.9, 0.9, nu=21, nv=21)
    return FramedSurface(
        x=ParametricMap4(value=x, du=xu, dv=xv),
        nu1=ParametricMap4(value=n1),
        nu2=ParametricMap4(value=n2),
        domain=dom,
    )


def corank_one_alpha_beta(
    f, g, f_u, f_v, g_u, g_v
) -> Callable[[float, float], tuple[float, float]]:
    """Closed-form (alpha, beta) for the corank-one family."""

    def ab(u, v):
        fv_, gv_ = f(u, v), g(u, v)
        fu_, gu_ = f_u(u, v), g_u(u, v)
        fvv, gvv = f_v(u, v), g_v(u, v)
        S = u * u + fv_ * fv_ + gv_ * gv_ + 1.0
        Q = (gv_ - u * gu_) ** 2 + gu_ * gu_ + 1.0
        p = (
            (fv_ - u * fu_) ** 2
            + (gv_ - u * gu_) ** 2
            + (fu_ * gv_ - gu_ * fv_) ** 2
            + fu_ * fu_
            + gu_ * gu_
            + 1.0
        )
        q = gvv * (
            -(gv_ * fv_ + gu_ * fu_) + u * (gu_ * fv_ + gv_ * fu_) - u * u * fu_ * gu_
        ) + fvv * Q
        return (
            gvv * math.sqrt(p) / (math.sqrt(S) * math.sqrt(Q)),
            q / (math.sqrt(S) * math.sqrt(Q)),
        )

    return ab


def _default_corank_one() -> tuple[FramedSurface, Callable]:
    # f = v^2, g = u v reproduces the cross cap.
    f = lambda u, v: v * v
    g = lambda u, v: u * v
    f_u = lambda u, v: 0.0
    f_v = lambda u, v: 2.0 * v
    g_u = lambda u, v: v
    g_v = lambda u, v: u
    return (
        corank_one_surface(f, g, f_u, f_v, g_u, g_v),
        corank_one_alpha_beta(f, g, f_u, f_v, g_u, g_v),
    )


# ---------------------------------------------------------------------------
# Hyperbolic ruled surfaces over the closed spherical curve gamma.
# ---------------------------------------------------------------------------


def _gamma(u):
    return np.array(
        [
            13.0 / 5.0,
            (9.0 * math.cos(u) - 3.0 * math.cos(3.0 * u)) / 5.0,
            (9.0 * math.sin(u) - 3.0 * math.sin(3.0 * u)) / 5.0,
            6.0 * SQ3 * math.cos(u) / 5.0,
        ]
    )


def _gamma_p(u):
    return np.array(
        [
            0.0,
            (-9.0 * math.sin(u) + 9.0 * math.sin(3.0 * u)) / 5.0,
            (9.0 * math.cos(u) - 9.0 * math.cos(3.0 * u)) / 5.0,
            -6.0 * SQ3 * math.sin(u) / 5.0,
        ]
    )


def _w(u):
    return 144.0 * math.sin(u) ** 2 + 25.0


def _w_p(u):
    return 144.0 * math.sin(2.0 * u)


def _delta_a(u):
    # Spacelike director of the first ruled surface: N(u) / (5 sqrt(w)).
    N = np.array(
        [
            -156.0 * math.sin(u),
            -97.0 * math.sin(2.0 * u) + 18.0 * math.sin(4.0 * u),
            -50.0 * math.sin(u) ** 2 - 144.0 * math.sin(u) ** 4 + 25.0,
            -36.0 * SQ3 * math.sin(2.0 * u),
        ]
    )
    return N / (5.0 * math.sqrt(_w(u)))


def _delta_a_p(u):
    N = np.array(
        [
            -156.0 * math.sin(u),
            -97.0 * math.sin(2.0 * u) + 18.0 * math.sin(4.0 * u),
            -50.0 * math.sin(u) ** 2 - 144.0 * math.sin(u) ** 4 + 25.0,
            -36.0 * SQ3 * math.sin(2.0 * u),
        ]
    )
    Np = np.array(
        [
            -156.0 * math.cos(u),
            -194.0 * math.cos(2.0 * u) + 72.0 * math.cos(4.0 * u),
            -50.0 * math.sin(2.0 * u) - 576.0 * math.sin(u) ** 3 * math.cos(u),
            -72.0 * SQ3 * math.cos(2.0 * u),
        ]
    )
    d = 5.0 * math.sqrt(_w(u))
    dp = 5.0 * _w_p(u) / (2.0 * math.sqrt(_w(u)))
    return Np / d - N * dp / (d * d)


def _nu1_ruled(u):
    return np.array(
        [24.0 * math.cos(u), 13.0 * math.cos(2.0 * u), 13.0 * math.sin(2.0 * u), 13.0 * SQ3]
    ) / (2.0 * math.sqrt(_w(u)))


def _nu1_ruled_p(u):
    A = np.array(
        [24.0 * math.cos(u), 13.0 * math.cos(2.0 * u), 13.0 * math.sin(2.0 * u), 13.0 * SQ3]
    )
    Ap = np.array(
        [-24.0 * math.sin(u), -26.0 * math.sin(2.0 * u), 26.0 * math.cos(2.0 * u), 0.0]
    )
    w = _w(u)
    return Ap / (2.0 * math.sqrt(w)) - A * _w_p(u) / (4.0 * w ** 1.5)


def _delta_b(u):
    return np.array(
        [0.0, -SQ3 / 2.0 * math.cos(2.0 * u), -SQ3 / 2.0 * math.sin(2.0 * u), 0.5]
    )


def _delta_b_p(u):
    return np.array(
        [0.0, SQ3 * math.sin(2.0 * u), -SQ3 * math.cos(2.0 * u), 0.0]
    )


def _ruled_surface(delta, delta_p, nu1, nu1_p, nu2, nu2_p, domain) -> FramedSurface:
    def x(u, v):
        return math.cosh(v) * _gamma(u) + math.sinh(v) * delta(u)

    def xu(u, v):
        return math.cosh(v) * _gamma_p(u) + math.sinh(v) * delta_p(u)

    def xv(u, v):
        return math.sinh(v) * _gamma(u) + math.cosh(v) * delta(u)

    zero4 = lambda u, v: np.zeros(4)
    return FramedSurface(
        x=ParametricMap4(value=x, du=xu, dv=xv),
        nu1=ParametricMap4(
            value=lambda u, v: nu1(u), du=lambda u, v: nu1_p(u), dv=zero4
        ),
        nu2=ParametricMap4(
            value=lambda u, v: nu2(u), du=lambda u, v: nu2_p(u), dv=zero4
        ),
        domain=domain,
    )


_RULED_DOMAIN = Domain(-math.pi, math.pi, -1.0, 1.0, nu=41, nv=21, u_period=2.0 * math.pi)


def ruled_a_surface(domain: Optional[Domain] = None) -> FramedSurface:
    """Ruled surface with two isolated cross cap singular points."""
    return _ruled_surface(
        _delta_a, _delta_a_p, _nu1_ruled, _nu1_ruled_p, _delta_b, _delta_b_p,
        domain or _RULED_DOMAIN,
    )


def ruled_a_oracle(u: float, v: float) -> Invariants:
    """Closed-form invariants of the first ruled surface.

    The a1 (and hence beta) denominator is the full 144 sin^2 u + 25, not
    its square root; the squared version fails the frame reconstruction
    identity, see the unit tests pinning a1(pi/2, v) = -(5/13) sinh v.
    """
    w = _w(u)
    r = math.sqrt(432.0 * math.sin(u) ** 2 + 75.0)
    return Invariants(
        a1=-65.0 * math.sinh(v) / w,
        a2=0.0,
        b1=(-12.0 * SQ3 * math.sin(u) * math.cosh(v) + math.sinh(v) * r) / 5.0,
        b2=0.0,
        c1=0.0,
        c2=1.0,
        e1=0.0,
        e2=0.0,
        f1=65.0 * math.cosh(v) / w,
        f2=0.0,
        g1=(12.0 * SQ3 * math.sin(u) * math.sinh(v) - math.cosh(v) * r) / 5.0,
        g2=0.0,
    )


def ruled_b_surface(domain: Optional[Domain] = None) -> FramedSurface:
    """Ruled surface whose singular set is the whole line v = 0."""
    return _ruled_surface(
        _delta_b, _delta_b_p, _nu1_ruled, _nu1_ruled_p, _delta_a, _delta_a_p,
        domain or _RULED_DOMAIN,
    )


def ruled_b_oracle(u: float, v: float) -> Invariants:
    """Closed-form invariants of the second ruled surface."""
    w = _w(u)
    r = math.sqrt(432.0 * math.sin(u) ** 2 + 75.0)
    return Invariants(
        a1=0.0,
        a2=0.0,
        b1=-r * math.sinh(v) / 5.0,
        b2=0.0,
        c1=12.0 * SQ3 * math.sin(u) / 5.0,
        c2=-1.0,
        e1=65.0 / w,
        e2=0.0,
        f1=0.0,
        f2=0.0,
        g1=-r * math.cosh(v) / 5.0,
        g2=0.0,
    )


# ---------------------------------------------------------------------------
# Registry.
# ---------------------------------------------------------------------------


def example_names() -> tuple[str, ...]:
    return ("cross_cap", "corank_one", "ruled_A", "ruled_B", "horocyclic:<profile.csv>")


def get_example(name: str, **kwargs) -> ExampleEntry:
    """Look up a built-in example by CLI name.

    ``corank_one`` accepts keyword callables (f, g, f_u, f_v, g_u, g_v) to
    override the default instance f = v^2, g = u v.  ``horocyclic:<path>``
    loads an h-profile CSV and integrates the generating curves.
    Unknown names raise ``KeyError``.
    """
    if name == "cross_cap":
        return ExampleEntry(
            name=name,
            framed=cross_cap_surface(kwargs.get("domain")),
            oracle_invariants=cross_cap_oracle,
            oracle_alpha_beta=cross_cap_alpha_beta,
            known_singularities=((0.0, 0.0, "cross_cap"),),
        )
    if name == "corank_one":
        if "f" in kwargs:
            fns = {k: kwargs[k] for k in ("f", "g", "f_u", "f_v", "g_u", "g_v")}
            framed = corank_one_surface(**fns, domain=kwargs.get("domain"))
            ab = corank_one_alpha_beta(**fns)
        else:
            framed, ab = _default_corank_one()
        return ExampleEntry(
            name=name,
            framed=framed,
            oracle_alpha_beta=ab,
            known_singularities=((0.0, 0.0, "cross_cap"),),
            notes="default instance f = v^2, g = u v coincides with cross_cap",
        )
    if name == "ruled_A":
        return ExampleEntry(
            name=name,
            framed=ruled_a_surface(kwargs.get("domain")),
            oracle_invariants=ruled_a_oracle,
            oracle_alpha_beta=lambda u, v: (
                ruled_a_oracle(u, v).alpha,
                ruled_a_oracle(u, v).beta,
            ),
            known_singularities=((0.0, 0.0, "cross_cap"), (math.pi, 0.0, "cross_cap")),
        )
    if name == "ruled_B":
        return ExampleEntry(
            name=name,
            framed=ruled_b_surface(kwargs.get("domain")),
            oracle_invariants=ruled_b_oracle,
            oracle_alpha_beta=lambda u, v: (
                ruled_b_oracle(u, v).alpha,
                ruled_b_oracle(u, v).beta,
            ),
            known_singularities=(),
            notes="singular along the whole line v = 0 (not isolated points)",
        )
    if name.startswith("horocyclic:"):
        from .horocyclic import horocyclic_example_from_profile

        return horocyclic_example_from_profile(name.split(":", 1)[1], **kwargs)
    raise KeyError(
        f"unknown example {name!r}; available: {', '.join(example_names())}"
    )

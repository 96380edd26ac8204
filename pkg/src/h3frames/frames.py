"""Moving frames and basic invariants of framed surfaces in H^3.

A framed surface is a map ``x`` into the hyperboloid together with two
spacelike unit normal fields ``nu1``, ``nu2`` such that
``{x, nu1, nu2, nu3}`` with ``nu3 = x ^ nu1 ^ nu2`` is a pseudo-orthonormal
moving frame.  The twelve basic invariants are the connection coefficients
of that frame:

    x_u   =  a1 nu1 + b1 nu2 + c1 nu3
    nu1_u =  a1 x + e1 nu2 + f1 nu3
    nu2_u =  b1 x - e1 nu1 + g1 nu3
    nu3_u =  c1 x - f1 nu1 - g1 nu2

and the same with index 2 for v-derivatives.  The derived quantities

    alpha = b1 c2 - b2 c1,     beta = c1 a2 - c2 a1

vanish simultaneously exactly at the singular points of x.
"""

from __future__ import annotations

import dataclasses
import enum
import io
import math
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateAnglesError, DegenerateFrameError, PreconditionError
from .minkowski import (
    frame_gram_residual,
    minkowski_dot4,
    minkowski_norm,
    wedge3,
)
from .surface import Domain, ParametricMap4, first_partials

__all__ = [
    "FRAME_TOL",
    "GRAM_DEGENERATE_TOL",
    "FramedSurface",
    "FrameAt",
    "Invariants",
    "ReflectVariant",
    "ReductionType",
    "ReductionResult",
    "FamilyCurvatureU",
    "FamilyCurvatureV",
    "FramedResidualSummary",
    "IntegrabilityResiduals",
    "Line",
    "fixed_u",
    "fixed_v",
    "FrameTrajectory",
    "frame_at",
    "basic_invariants",
    "invariants_at",
    "invariant_field",
    "verify_framed",
    "integrability_residuals",
    "reflect",
    "rotate_frame",
    "rotated_invariants",
    "reparametrize_invariants",
    "construct_frame_from_normal",
    "reduction_type",
    "reduction_type_grid",
    "family_curvatures",
    "integrate_frame_along_line",
    "INVARIANT_CSV_HEADER",
    "write_invariants_csv",
]

#: Default tolerance for frame-quality comparisons.
FRAME_TOL = 1e-8
#: Pseudo-orthonormality residual beyond which invariant extraction refuses.
GRAM_DEGENERATE_TOL = 1e-4

INVARIANT_CSV_HEADER = "u,v,a1,a2,b1,b2,c1,c2,e1,e2,f1,f2,g1,g2,alpha,beta"


@dataclasses.dataclass(frozen=True)
class FramedSurface:
    """Surface map plus the two normal fields and the working domain."""

    x: ParametricMap4
    nu1: ParametricMap4
    nu2: ParametricMap4
    domain: Domain


@dataclasses.dataclass(frozen=True)
class FrameAt:
    """Frame vectors and first derivatives at a single parameter point."""

    u: float
    v: float
    x: np.ndarray
    nu1: np.ndarray
    nu2: np.ndarray
    nu3: np.ndarray
    xu: np.ndarray
    xv: np.ndarray
    nu1u: np.ndarray
    nu1v: np.ndarray
    nu2u: np.ndarray
    nu2v: np.ndarray

    def gram_residual(self) -> float:
        return frame_gram_residual(self.x, self.nu1, self.nu2, self.nu3)


@dataclasses.dataclass(frozen=True)
class Invariants:
    """The twelve connection coefficients at one point.

    ``alpha`` and ``beta`` are derived, so they are exposed as properties
    and always consistent with the defining 2x2 determinants.
    """

    a1: float
    a2: float
    b1: float
    b2: float
    c1: float
    c2: float
    e1: float
    e2: float
    f1: float
    f2: float
    g1: float
    g2: float

    @property
    def alpha(self) -> float:
        return self.b1 * self.c2 - self.b2 * self.c1

    @property
    def beta(self) -> float:
        return self.c1 * self.a2 - self.c2 * self.a1

    def constraint_residual(self) -> float:
        """|a1 b2 - a2 b1|, zero for any honest framed surface."""
        return abs(self.a1 * self.b2 - self.a2 * self.b1)

    def row(self, index: int) -> tuple[float, float, float, float, float, float]:
        """(a, b, c, e, f, g) with derivative index 1 (u) or 2 (v)."""
        if index == 1:
            return (self.a1, self.b1, self.c1, self.e1, self.f1, self.g1)
        if index == 2:
            return (self.a2, self.b2, self.c2, self.e2, self.f2, self.g2)
        raise ValueError(f"index must be 1 or 2, got {index}")

    def as_dict(self) -> dict[str, float]:
        d = {k: getattr(self, k) for k in _INVARIANT_NAMES}
        d["alpha"] = self.alpha
        d["beta"] = self.beta
        return d


_INVARIANT_NAMES = ("a1", "a2", "b1", "b2", "c1", "c2", "e1", "e2", "f1", "f2", "g1", "g2")


def frame_at(fs: FramedSurface, u: float, v: float) -> FrameAt:
    """Evaluate the moving frame and its first derivatives at (u, v)."""
    x, xu, xv = first_partials(fs.x, u, v)
    n1, n1u, n1v = first_partials(fs.nu1, u, v)
    n2, n2u, n2v = first_partials(fs.nu2, u, v)
    return FrameAt(
        u=u,
        v=v,
        x=x,
        nu1=n1,
        nu2=n2,
        nu3=wedge3(x, n1, n2),
        xu=xu,
        xv=xv,
        nu1u=n1u,
        nu1v=n1v,
        nu2u=n2u,
        nu2v=n2v,
    )


def basic_invariants(frame: FrameAt, gram_tol: float = GRAM_DEGENERATE_TOL) -> Invariants:
    """Extract the twelve invariants from a frame by pseudo inner products.

    Raises :class:`DegenerateFrameError` when the frame fails
    pseudo-orthonormality beyond ``gram_tol`` - extracted coefficients would
    be meaningless.
    """
    resid = frame.gram_residual()
    if resid > gram_tol:
        raise DegenerateFrameError(
            f"frame at ({frame.u}, {frame.v}) has Gram residual {resid:.3e} "
            f"> {gram_tol:.3e}"
        )
    n1, n2, n3 = frame.nu1, frame.nu2, frame.nu3
    return Invariants(
        a1=minkowski_dot4(frame.xu, n1),
        a2=minkowski_dot4(frame.xv, n1),
        b1=minkowski_dot4(frame.xu, n2),
        b2=minkowski_dot4(frame.xv, n2),
        c1=minkowski_dot4(frame.xu, n3),
        c2=minkowski_dot4(frame.xv, n3),
        e1=minkowski_dot4(frame.nu1u, n2),
        e2=minkowski_dot4(frame.nu1v, n2),
        f1=minkowski_dot4(frame.nu1u, n3),
        f2=minkowski_dot4(frame.nu1v, n3),
        g1=minkowski_dot4(frame.nu2u, n3),
        g2=minkowski_dot4(frame.nu2v, n3),
    )


def invariants_at(fs: FramedSurface, u: float, v: float, gram_tol: float = GRAM_DEGENERATE_TOL) -> Invariants:
    return basic_invariants(frame_at(fs, u, v), gram_tol=gram_tol)


def invariant_field(fs: FramedSurface, gram_tol: float = GRAM_DEGENERATE_TOL) -> Callable[[float, float], Invariants]:
    """Invariants as a function of (u, v)."""
    return lambda u, v: invariants_at(fs, u, v, gram_tol=gram_tol)


@dataclasses.dataclass(frozen=True)
class FramedResidualSummary:
    """Worst-case residuals of the framed-surface axioms over a grid."""

    max_gram_residual: float
    max_offspan_residual: float  # |<x ^ x_u ^ x_v, nu3>|
    max_constraint_residual: float  # |a1 b2 - a2 b1|


def verify_framed(fs: FramedSurface, domain: Optional[Domain] = None) -> FramedResidualSummary:
    """Check the framed-surface axioms on the sampling grid.

    The off-span residual measures the nu3-component of x ^ x_u ^ x_v,
    which must vanish: the derivative wedge lies in span{nu1, nu2}.  It is
    computed from the raw derivatives, independently of the extracted
    invariants, so it cross-checks the constraint residual.
    """
    dom = domain or fs.domain
    max_gram = 0.0
    max_off = 0.0
    max_con = 0.0
    for v in dom.v_grid():
        for u in dom.u_grid():
            fr = frame_at(fs, u, v)
            max_gram = max(max_gram, fr.gram_residual())
            w = wedge3(fr.x, fr.xu, fr.xv)
            max_off = max(max_off, abs(minkowski_dot4(w, fr.nu3)))
            inv = basic_invariants(fr)
            max_con = max(max_con, inv.constraint_residual())
    return FramedResidualSummary(max_gram, max_off, max_con)


@dataclasses.dataclass(frozen=True)
class IntegrabilityResiduals:
    """Signed left-minus-right residuals of the six compatibility equations.

    Arrays are indexed ``[iv, iu]`` following the v-major grid convention.
    """

    u: np.ndarray
    v: np.ndarray
    r: tuple[np.ndarray, ...]  # six arrays
    h: float

    @property
    def max_abs(self) -> tuple[float, ...]:
        return tuple(float(np.max(np.abs(ri))) for ri in self.r)

    @property
    def max_overall(self) -> float:
        return max(self.max_abs)


def integrability_residuals(
    fs: FramedSurface,
    domain: Optional[Domain] = None,
    h: float = 1e-5,
    gram_tol: float = GRAM_DEGENERATE_TOL,
) -> IntegrabilityResiduals:
    """Evaluate the six integrability residuals over the sampling grid.

    Invariant derivatives are 2-point central differences with step ``h``;
    the grid must be evaluable with that margin.
    """
    if h <= 0:
        raise ValueError("step h must be positive")
    dom = domain or fs.domain
    field = invariant_field(fs, gram_tol=gram_tol)
    ug, vg = dom.u_grid(), dom.v_grid()
    out = [np.empty((len(vg), len(ug))) for _ in range(6)]
    for iv, v in enumerate(vg):
        for iu, u in enumerate(ug):
            q = field(u, v)
            pu = field(u + h, v)
            mu = field(u - h, v)
            pv = field(u, v + h)
            mv = field(u, v - h)
            d_u = {k: (getattr(pu, k) - getattr(mu, k)) / (2.0 * h) for k in _INVARIANT_NAMES}
            d_v = {k: (getattr(pv, k) - getattr(mv, k)) / (2.0 * h) for k in _INVARIANT_NAMES}
            out[0][iv, iu] = (d_v["a1"] - q.b1 * q.e2 - q.c1 * q.f2) - (
                d_u["a2"] - q.b2 * q.e1 - q.c2 * q.f1
            )
            out[1][iv, iu] = (d_v["b1"] + q.a1 * q.e2 - q.c1 * q.g2) - (
                d_u["b2"] + q.a2 * q.e1 - q.c2 * q.g1
            )
            out[2][iv, iu] = (d_v["c1"] + q.a1 * q.f2 + q.b1 * q.g2) - (
                d_u["c2"] + q.a2 * q.f1 + q.b2 * q.g1
            )
            out[3][iv, iu] = (d_v["e1"] - q.f1 * q.g2) - (d_u["e2"] - q.f2 * q.g1)
            out[4][iv, iu] = (d_v["f1"] + q.e1 * q.g2 + q.a1 * q.c2) - (
                d_u["f2"] + q.e2 * q.g1 + q.a2 * q.c1
            )
            out[5][iv, iu] = (d_v["g1"] - q.e1 * q.f2 + q.b1 * q.c2) - (
                d_u["g2"] - q.e2 * q.f1 + q.b2 * q.c1
            )
    return IntegrabilityResiduals(u=ug, v=vg, r=tuple(out), h=h)


class ReflectVariant(enum.Enum):
    NEG_NU1 = "neg_nu1"
    NEG_BOTH = "neg_both"
    SWAP = "swap"


def reflect(inv: Invariants, variant: ReflectVariant) -> Invariants:
    """Invariants after a discrete symmetry of the normal pair.

    ``NEG_NU1``: (nu1, nu2) -> (-nu1, nu2);  ``NEG_BOTH``: -> (-nu1, -nu2);
    ``SWAP``: -> (nu2, nu1).  All three are involutions.
    """
    if variant is ReflectVariant.NEG_NU1:
        return Invariants(
            a1=-inv.a1, a2=-inv.a2, b1=inv.b1, b2=inv.b2, c1=-inv.c1, c2=-inv.c2,
            e1=-inv.e1, e2=-inv.e2, f1=inv.f1, f2=inv.f2, g1=-inv.g1, g2=-inv.g2,
        )
    if variant is ReflectVariant.NEG_BOTH:
        return Invariants(
            a1=-inv.a1, a2=-inv.a2, b1=-inv.b1, b2=-inv.b2, c1=inv.c1, c2=inv.c2,
            e1=inv.e1, e2=inv.e2, f1=-inv.f1, f2=-inv.f2, g1=-inv.g1, g2=-inv.g2,
        )
    if variant is ReflectVariant.SWAP:
        return Invariants(
            a1=inv.b1, a2=inv.b2, b1=inv.a1, b2=inv.a2, c1=-inv.c1, c2=-inv.c2,
            e1=-inv.e1, e2=-inv.e2, f1=-inv.g1, f2=-inv.g2, g1=-inv.f1, g2=-inv.f2,
        )
    raise ValueError(f"unknown reflect variant: {variant!r}")


def rotated_invariants(
    inv: Invariants, theta: float, theta_u: float, theta_v: float
) -> Invariants:
    """Invariants after rotating the normal pair by the angle theta.

    The rotation is nu1 -> cos(theta) nu1 - sin(theta) nu2,
    nu2 -> sin(theta) nu1 + cos(theta) nu2 with theta = theta(u, v);
    ``theta_u`` / ``theta_v`` are its partial derivatives at the point.
    """
    ct, st = math.cos(theta), math.sin(theta)
    return Invariants(
        a1=inv.a1 * ct - inv.b1 * st,
        a2=inv.a2 * ct - inv.b2 * st,
        b1=inv.a1 * st + inv.b1 * ct,
        b2=inv.a2 * st + inv.b2 * ct,
        c1=inv.c1,
        c2=inv.c2,
        e1=inv.e1 - theta_u,
        e2=inv.e2 - theta_v,
        f1=inv.f1 * ct - inv.g1 * st,
        f2=inv.f2 * ct - inv.g2 * st,
        g1=inv.f1 * st + inv.g1 * ct,
        g2=inv.f2 * st + inv.g2 * ct,
    )


def rotate_frame(
    fs: FramedSurface,
    theta: Callable[[float, float], float],
    theta_u: Optional[Callable[[float, float], float]] = None,
    theta_v: Optional[Callable[[float, float], float]] = None,
) -> FramedSurface:
    """Framed surface with the normal pair rotated pointwise by theta(u, v).

    The base map is untouched; nu3 is unchanged by construction.  When the
    original normal maps carry closed-form first derivatives, the rotated
    maps do too (product rule); missing theta derivatives are filled in by
    central differences with the map's h1 step.
    """
    h = fs.nu1.h1

    def th_u(u, v):
        if theta_u is not None:
            return theta_u(u, v)
        return (theta(u + h, v) - theta(u - h, v)) / (2.0 * h)

    def th_v(u, v):
        if theta_v is not None:
            return theta_v(u, v)
        return (theta(u, v + h) - theta(u, v - h)) / (2.0 * h)

    def val1(u, v):
        t = theta(u, v)
        return math.cos(t) * fs.nu1.value(u, v) - math.sin(t) * fs.nu2.value(u, v)

    def val2(u, v):
        t = theta(u, v)
        return math.sin(t) * fs.nu1.value(u, v) + math.cos(t) * fs.nu2.value(u, v)

    if fs.nu1.has_closed_firsts and fs.nu2.has_closed_firsts:

        def _parts(u, v):
            t = theta(u, v)
            return math.cos(t), math.sin(t), fs.nu1.value(u, v), fs.nu2.value(u, v)

        def d1u(u, v):
            ct, st, n1, n2 = _parts(u, v)
            return ct * fs.nu1.du(u, v) - st * fs.nu2.du(u, v) - th_u(u, v) * (
                st * n1 + ct * n2
            )

        def d1v(u, v):
            ct, st, n1, n2 = _parts(u, v)
            return ct * fs.nu1.dv(u, v) - st * fs.nu2.dv(u, v) - th_v(u, v) * (
                st * n1 + ct * n2
            )

        def d2u(u, v):
            ct, st, n1, n2 = _parts(u, v)
            return st * fs.nu1.du(u, v) + ct * fs.nu2.du(u, v) + th_u(u, v) * (
                ct * n1 - st * n2
            )

        def d2v(u, v):
            ct, st, n1, n2 = _parts(u, v)
            return st * fs.nu1.dv(u, v) + ct * fs.nu2.dv(u, v) + th_v(u, v) * (
                ct * n1 - st * n2
            )

        m1 = ParametricMap4(value=val1, du=d1u, dv=d1v, h1=fs.nu1.h1, h2=fs.nu1.h2, domain=fs.nu1.domain)
        m2 = ParametricMap4(value=val2, du=d2u, dv=d2v, h1=fs.nu2.h1, h2=fs.nu2.h2, domain=fs.nu2.domain)
    else:
        m1 = ParametricMap4(value=val1, h1=fs.nu1.h1, h2=fs.nu1.h2, domain=fs.nu1.domain)
        m2 = ParametricMap4(value=val2, h1=fs.nu2.h1, h2=fs.nu2.h2, domain=fs.nu2.domain)

    return FramedSurface(x=fs.x, nu1=m1, nu2=m2, domain=fs.domain)


def reparametrize_invariants(inv: Invariants, jac) -> Invariants:
    """Invariants after a parameter change with Jacobian ``jac``.

    ``jac`` is the 2x2 matrix [[u_p, v_p], [u_q, v_q]] of the old parameters
    with respect to the new ones; both invariant rows transform linearly by
    left multiplication, and (alpha, beta) pick up det(jac) automatically.
    """
    j = np.asarray(jac, dtype=float)
    if j.shape != (2, 2):
        raise ValueError(f"jacobian must be 2x2, got {j.shape}")
    if not np.all(np.isfinite(j)):
        raise ValueError("jacobian entries must be finite")
    out = {}
    for name in ("a", "b", "c", "e", "f", "g"):
        r1 = getattr(inv, name + "1")
        r2 = getattr(inv, name + "2")
        out[name + "1"] = j[0, 0] * r1 + j[0, 1] * r2
        out[name + "2"] = j[1, 0] * r1 + j[1, 1] * r2
    return Invariants(**out)


def construct_frame_from_normal(
    x_map: ParametricMap4,
    nu_map: ParametricMap4,
    u: float,
    v: float,
    tol: float = FRAME_TOL,
    angle_tol: float = 1e-12,
) -> tuple[np.ndarray, np.ndarray]:
    """Split one unit normal field into an orthonormal pair at (u, v).

    Writes nu = (n1, n2, n3, n4) in spherical angles for its spatial part,
    seeds two explicit tangent candidates and pseudo-orthonormalizes them
    against x; the output pair satisfies x ^ nu1 ^ nu2 = nu.

    Preconditions (checked within ``tol``): x on the upper hyperboloid
    sheet, nu unit spacelike with <x, nu> = 0.  Raises
    :class:`DegenerateAnglesError` when the spherical angles are undefined,
    i.e. n2 = n3 = 0 within ``angle_tol``.
    """
    x = np.asarray(x_map.value(u, v), dtype=float)
    nu = np.asarray(nu_map.value(u, v), dtype=float)
    if abs(minkowski_dot4(x, x) + 1.0) > tol or x[0] <= 0:
        raise PreconditionError(
            f"base point at ({u}, {v}) is not on the upper hyperboloid: "
            f"<x,x> = {minkowski_dot4(x, x):.6e}, x1 = {x[0]:.6e}"
        )
    if abs(minkowski_dot4(nu, nu) - 1.0) > tol:
        raise PreconditionError(
            f"normal at ({u}, {v}) is not unit spacelike: <nu,nu> = "
            f"{minkowski_dot4(nu, nu):.6e}"
        )
    if abs(minkowski_dot4(x, nu)) > tol:
        raise PreconditionError(
            f"normal at ({u}, {v}) is not orthogonal to x: <x,nu> = "
            f"{minkowski_dot4(x, nu):.6e}"
        )

    rho = math.hypot(nu[1], nu[2])
    if rho <= angle_tol:
        raise DegenerateAnglesError(
            f"spherical angles undefined at ({u}, {v}): normal has "
            f"n2 = n3 = 0 (rho = {rho:.3e})"
        )
    # Spatial part of nu in spherical coordinates:
    #   (n2, n3, n4) = s (sin t sin p, sin t cos p, cos t),  s = sqrt(1 + n1^2).
    t = math.atan2(rho, nu[3])
    p = math.atan2(nu[1], nu[2])

    bar1 = np.array([0.0, math.cos(t) * math.sin(p), math.cos(t) * math.cos(p), -math.sin(t)])
    bar2 = np.array([0.0, math.cos(p), -math.sin(p), 0.0])

    k = -minkowski_dot4(bar1, x)
    t1 = bar1 - k * x
    n1sq = minkowski_dot4(t1, t1)  # = 1 + k^2 > 0
    nu1 = t1 / math.sqrt(n1sq)

    k1 = -minkowski_dot4(bar2, x)
    k2 = minkowski_dot4(bar2, t1) / n1sq
    t2 = bar2 - k1 * x - k2 * t1
    n2sq = minkowski_dot4(t2, t2)
    if n2sq <= 0:
        raise DegenerateAnglesError(
            f"second tangent candidate degenerates at ({u}, {v}): <t2,t2> = {n2sq:.3e}"
        )
    nu2 = t2 / math.sqrt(n2sq)
    return nu1, nu2


class ReductionType(enum.Enum):
    FRAMED_A_ZERO = "framed_a_zero"
    FRAMED_B_ZERO = "framed_b_zero"
    FAMILY_U = "family_u"
    FAMILY_V = "family_v"
    ROTATABLE_TO_FRAMED = "rotatable_to_framed"
    GENERIC = "generic"


@dataclasses.dataclass(frozen=True)
class ReductionResult:
    tag: ReductionType
    theta: Optional[float] = None


def reduction_type(inv: Invariants, tol: float = FRAME_TOL) -> ReductionResult:
    """Classify which reduced form the invariants already have.

    The one-parameter family conditions are the most specific
    descriptions and are tested first: a2 = b2 = 0 tags a v-family,
    then a1 = b1 = 0 a u-family.  A surface can satisfy a family and a
    framed condition simultaneously (e.g. the a-row vanishing on top of
    one of the above); the family tag is deliberately reported in that
    case so a surface carries one stable tag across an entire grid.
    After the family tests come the plain framed tags (a-row zero, then
    b-row zero).  Failing all of those, invariants whose (a, b) rows
    are proportional are rotatable to the a-row-zero form and the angle
    theta that kills the rotated a-row is reported; anything else is
    generic.
    """
    if abs(inv.a2) <= tol and abs(inv.b2) <= tol:
        return ReductionResult(ReductionType.FAMILY_V)
    if abs(inv.a1) <= tol and abs(inv.b1) <= tol:
        return ReductionResult(ReductionType.FAMILY_U)
    if abs(inv.a1) <= tol and abs(inv.a2) <= tol:
        return ReductionResult(ReductionType.FRAMED_A_ZERO)
    if abs(inv.b1) <= tol and abs(inv.b2) <= tol:
        return ReductionResult(ReductionType.FRAMED_B_ZERO)
    if inv.constraint_residual() <= tol:
        if math.hypot(inv.a1, inv.b1) > tol:
            theta = math.atan2(inv.a1, inv.b1)
        elif math.hypot(inv.a2, inv.b2) > tol:
            theta = math.atan2(inv.a2, inv.b2)
        else:
            theta = 0.0
        return ReductionResult(ReductionType.ROTATABLE_TO_FRAMED, theta=theta)
    return ReductionResult(ReductionType.GENERIC)


def reduction_type_grid(
    fs: FramedSurface, domain: Optional[Domain] = None, tol: float = FRAME_TOL
):
    """Reduction tags and rotation angles over the grid.

    The rotation angle is only defined modulo pi; to make the returned
    field usable as a continuous rotation, each grid row (fixed v) is
    unwrapped by multiples of pi against its left neighbour.
    """
    dom = domain or fs.domain
    field = invariant_field(fs)
    ug, vg = dom.u_grid(), dom.v_grid()
    tags = [[None] * len(ug) for _ in vg]
    thetas = np.zeros((len(vg), len(ug)))
    for iv, v in enumerate(vg):
        prev = None
        for iu, u in enumerate(ug):
            res = reduction_type(field(u, v), tol=tol)
            tags[iv][iu] = res.tag
            th = res.theta if res.theta is not None else 0.0
            if prev is not None:
                k = round((prev - th) / math.pi)
                th = th + k * math.pi
            thetas[iv, iu] = th
            prev = th
    return tags, thetas


@dataclasses.dataclass(frozen=True)
class FamilyCurvatureU:
    """Curvature-type data of a u-family (a1 = b1 = 0 direction)."""

    m: float
    n: float
    a: float
    b: float
    P: float
    Q: float
    M: float
    N: float
    A: float
    B: float


@dataclasses.dataclass(frozen=True)
class FamilyCurvatureV:
    """Curvature-type data of a v-family (a2 = b2 = 0 direction)."""

    m: float
    n: float
    a: float
    b: float
    P: float
    Q: float
    M: float
    N: float
    A: float
    B: float


def family_curvatures(inv: Invariants, direction: str, tol: float = FRAME_TOL):
    """Relabel the invariants as one-parameter family data.

    ``direction='u'`` requires a1 = b1 = 0 within ``tol`` (the u-lines are
    the degenerate direction); ``direction='v'`` requires a2 = b2 = 0.
    With these labels alpha = -m Q, beta = m P for the u-direction and
    alpha = m Q, beta = -m P for the v-direction.
    """
    if direction == "u":
        if abs(inv.a1) > tol or abs(inv.b1) > tol:
            raise PreconditionError(
                f"u-family needs a1 = b1 = 0 within {tol}, got "
                f"a1 = {inv.a1:.3e}, b1 = {inv.b1:.3e}"
            )
        return FamilyCurvatureU(
            m=inv.c1, n=inv.e1, a=inv.f1, b=inv.g1,
            P=inv.a2, Q=inv.b2, M=inv.c2, N=inv.e2, A=inv.f2, B=inv.g2,
        )
    if direction == "v":
        if abs(inv.a2) > tol or abs(inv.b2) > tol:
            raise PreconditionError(
                f"v-family needs a2 = b2 = 0 within {tol}, got "
                f"a2 = {inv.a2:.3e}, b2 = {inv.b2:.3e}"
            )
        return FamilyCurvatureV(
            m=inv.c2, n=inv.e2, a=inv.f2, b=inv.g2,
            P=inv.a1, Q=inv.b1, M=inv.c1, N=inv.e1, A=inv.f1, B=inv.g1,
        )
    raise ValueError(f"direction must be 'u' or 'v', got {direction!r}")


@dataclasses.dataclass(frozen=True)
class Line:
    """Coordinate line: u varies at fixed v, or v varies at fixed u."""

    kind: str  # "fixed_u" | "fixed_v"
    value: float


def fixed_u(u0: float) -> Line:
    return Line("fixed_u", u0)


def fixed_v(v0: float) -> Line:
    return Line("fixed_v", v0)


@dataclasses.dataclass(frozen=True)
class FrameTrajectory:
    """Result of integrating the frame ODE along a coordinate line."""

    t: np.ndarray  # parameter values (the varying coordinate)
    frames: np.ndarray  # shape (len(t), 4, 4), rows (x, nu1, nu2, nu3)
    max_gram_drift: float

    @property
    def final(self) -> np.ndarray:
        return self.frames[-1]


def _frame_ode_matrix(row: Sequence[float]) -> np.ndarray:
    a, b, c, e, f, g = row
    return np.array(
        [
            [0.0, a, b, c],
            [a, 0.0, e, f],
            [b, -e, 0.0, g],
            [c, -f, -g, 0.0],
        ]
    )


def integrate_frame_along_line(
    inv_field: Callable[[float, float], Invariants],
    initial: FrameAt,
    line: Line,
    span: float,
    step: float,
) -> FrameTrajectory:
    """Integrate the linear frame system along a coordinate line with RK4.

    ``initial`` provides the starting frame; its (u, v) must sit on the
    line.  The Gram drift of the integrated frames against diag(-1,1,1,1)
    is tracked and the worst value reported.
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    if line.kind == "fixed_v":
        t0, fixed = initial.u, line.value
        pt = lambda t: (t, fixed)
        row_index = 1
    elif line.kind == "fixed_u":
        t0, fixed = initial.v, line.value
        pt = lambda t: (fixed, t)
        row_index = 2
    else:
        raise ValueError(f"unknown line kind {line.kind!r}")

    def rhs(t, y):
        u, v = pt(t)
        inv = inv_field(u, v)
        row = inv.row(row_index)
        if not all(math.isfinite(c) for c in row):
            raise PreconditionError(
                f"non-finite invariants at ({u}, {v}): {row}"
            )
        return _frame_ode_matrix(row) @ y

    n_full, rem = divmod(abs(span), step)
    steps = [math.copysign(step, span)] * int(n_full)
    if rem > 1e-15 * max(1.0, abs(span)):
        steps.append(math.copysign(rem, span))

    y = np.vstack([initial.x, initial.nu1, initial.nu2, initial.nu3])
    ts = [t0]
    frames = [y.copy()]
    drift = frame_gram_residual(*y)
    t = t0
    for dt in steps:
        k1 = rhs(t, y)
        k2 = rhs(t + dt / 2.0, y + dt / 2.0 * k1)
        k3 = rhs(t + dt / 2.0, y + dt / 2.0 * k2)
        k4 = rhs(t + dt, y + dt * k3)
        y = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += dt
        ts.append(t)
        frames.append(y.copy())
        drift = max(drift, frame_gram_residual(*y))
    return FrameTrajectory(t=np.array(ts), frames=np.array(frames), max_gram_drift=drift)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_invariants_csv(
    target,
    fs: FramedSurface,
    domain: Optional[Domain] = None,
    header_comments: Sequence[str] = (),
) -> None:
    """Write the invariant field over the grid as CSV.

    Rows run v-major (v in the outer loop, u inner); values are printed
    with 17 significant digits so the file round-trips doubles exactly.
    ``header_comments`` lines are emitted first, each prefixed with '# '.
    """
    dom = domain or fs.domain
    field = invariant_field(fs)

    def _write(fh: io.TextIOBase):
        for line in header_comments:
            fh.write(f"# {line}\n")
        fh.write(INVARIANT_CSV_HEADER + "\n")
        for v in dom.v_grid():
            for u in dom.u_grid():
                inv = field(u, v)
                cells = [_fmt(u), _fmt(v)]
                cells += [_fmt(getattr(inv, k)) for k in _INVARIANT_NAMES]
                cells += [_fmt(inv.alpha), _fmt(inv.beta)]
                fh.write(",".join(cells) + "\n")

    if hasattr(target, "write"):
        _write(target)
    else:
        with open(target, "w", encoding="utf-8") as fh:
            _write(fh)

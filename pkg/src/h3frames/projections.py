"""Transports between the hyperboloid, the Poincare ball, and R^3_1.

Three bridges, all pointwise:

* the ball-model diffeomorphism pi and its inverse, lifted to whole framed
  surfaces by explicit component formulas for the transported normal pair
  (``transport_to_disc`` / ``transport_to_h3``);
* coordinate-dropping projections into Lorentz-Minkowski 3-space, which
  send a framed surface to a lightcone framed base surface whenever the
  projected binormal stays spacelike (``project_to_r31``);
* the square-root lifts going back up, which certify their output through
  the two inner-product identities of the frame-existence theorem
  (``lift_from_r31``).

``ParametricMap4`` evaluation is dimension-agnostic, so the same container
carries the 3-component disc and R^3_1 maps; only the name is ambient-4.
"""

from __future__ import annotations

import dataclasses
import enum
import math
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import (
    NonSpacelikeNormalError,
    NormalizationError,
    OffHyperboloidError,
    OutsideDiscError,
    PreconditionError,
)
from .frames import FramedSurface, frame_at
from .minkowski import (
    CausalCharacter,
    causal_character,
    euclid_cross,
    euclid_dot,
    minkowski_dot3,
    minkowski_dot4,
    wedge2_r31,
    wedge3,
)
from .surface import Domain, ParametricMap4, first_partials

__all__ = [
    "ON_H3_TOL",
    "NORMALIZATION_TOL",
    "LIFT_MARGIN",
    "Axis",
    "DiscFramedSurface",
    "DiscResidualSummary",
    "LightconeCandidate",
    "to_poincare",
    "from_poincare",
    "transport_to_disc",
    "transport_to_h3",
    "disc_alpha_beta",
    "verify_disc_framed",
    "project_to_r31",
    "lightcone_residual",
    "lift_from_r31",
    "write_disc_mesh",
]

#: Allowed |<x,x> + 1| for points claimed to lie on the hyperboloid.
ON_H3_TOL = 1e-9

#: Below this squared norm a direction that must be normalized counts as zero.
NORMALIZATION_TOL = 1e-12

#: Strictness margin for the lift precondition x1^2 - x2^2 - x3^2 > 1.
LIFT_MARGIN = 1e-10


class Axis(enum.Enum):
    """Spacelike coordinate removed by a projection / inserted by a lift."""

    X2 = 2
    X3 = 3
    X4 = 4

    @property
    def index(self) -> int:
        return self.value - 1


@dataclasses.dataclass(frozen=True)
class DiscFramedSurface:
    """Surface in the unit ball with a Euclidean orthonormal normal pair."""

    xbar: ParametricMap4
    nubar1: ParametricMap4
    nubar2: ParametricMap4
    domain: Domain


@dataclasses.dataclass(frozen=True)
class LightconeCandidate:
    """Projected base surface and the unit spacelike direction certifying it.

    The defining residual <xt_u ^ xt_v, t> vanishes identically for exact
    input; :func:`lightcone_residual` measures it on a grid.
    """

    xtilde: ParametricMap4
    t: ParametricMap4
    domain: Domain
    axis: Axis


# ---------------------------------------------------------------------------
# ball-model point maps
# ---------------------------------------------------------------------------


def to_poincare(x, tol: float = ON_H3_TOL) -> np.ndarray:
    """Ball-model image (x2, x3, x4) / (x1 + 1) of a hyperboloid point."""
    x = np.asarray(x, dtype=float)
    q = minkowski_dot4(x, x)
    if abs(q + 1.0) > tol:
        raise OffHyperboloidError(f"<x,x> = {q:.6e}, expected -1 within {tol}")
    if x[0] <= 0.0:
        raise OffHyperboloidError(f"x1 = {x[0]:.6e} is not on the upper branch")
    return x[1:] / (x[0] + 1.0)


def from_poincare(p) -> np.ndarray:
    """Hyperboloid point (1 + |p|^2, 2p) / (1 - |p|^2) over a ball point."""
    p = np.asarray(p, dtype=float)
    s = float(np.dot(p, p))
    if s >= 1.0:
        raise OutsideDiscError(f"|p|^2 = {s:.6e} is not inside the unit ball")
    out = np.empty(4)
    out[0] = 1.0 + s
    out[1:] = 2.0 * p
    return out / (1.0 - s)


# ---------------------------------------------------------------------------
# framed-surface transport H^3 -> D^3
# ---------------------------------------------------------------------------


def _have_firsts(*maps: ParametricMap4) -> bool:
    return all(m.has_closed_firsts for m in maps)


def _disc_direction(x, y):
    """Unnormalized transported normal y1 * x_spatial - (x1 + 1) * y_spatial."""
    return y[0] * x[1:] - (x[0] + 1.0) * y[1:]


def _normalize_euclid(w, where: str):
    n2 = float(np.dot(w, w))
    if n2 <= NORMALIZATION_TOL:
        raise NormalizationError(
            f"{where}: direction has squared norm {n2:.3e}; "
            "the input does not satisfy the framed-surface axioms"
        )
    return w / math.sqrt(n2)


def transport_to_disc(fs: FramedSurface) -> DiscFramedSurface:
    """Push a framed surface through pi onto the ball.

    The transported pair is the normalized image of
    ``y1 * (x2,x3,x4) - (x1+1) * (y2,y3,y4)`` for each normal; the
    construction keeps ``xbar_u x xbar_v`` inside span{nubar1, nubar2}
    with weights proportional to the original (alpha, beta).  A vanishing
    direction cannot occur for valid input (it would force <x, nu> != 0),
    so :class:`NormalizationError` here means the input was not framed.

    Closed first derivatives are propagated whenever all three input maps
    carry them.
    """
    x_m, n1_m, n2_m = fs.x, fs.nu1, fs.nu2

    def xbar_value(u, v):
        return to_poincare(x_m.value(u, v))

    def nub_value_factory(n_m):
        def value(u, v):
            w = _disc_direction(x_m.value(u, v), n_m.value(u, v))
            return _normalize_euclid(w, "transport_to_disc")

        return value

    xbar_kw = {}
    nub1_kw = {}
    nub2_kw = {}
    if _have_firsts(x_m, n1_m, n2_m):

        def xbar_partial(which):
            def d(u, v):
                x = np.asarray(x_m.value(u, v), dtype=float)
                dx = np.asarray(getattr(x_m, which)(u, v), dtype=float)
                return (dx[1:] * (x[0] + 1.0) - x[1:] * dx[0]) / (x[0] + 1.0) ** 2

            return d

        def nub_partial_factory(n_m, which):
            def d(u, v):
                x = np.asarray(x_m.value(u, v), dtype=float)
                y = np.asarray(n_m.value(u, v), dtype=float)
                dx = np.asarray(getattr(x_m, which)(u, v), dtype=float)
                dy = np.asarray(getattr(n_m, which)(u, v), dtype=float)
                w = _disc_direction(x, y)
                dw = (
                    dy[0] * x[1:]
                    + y[0] * dx[1:]
                    - dx[0] * y[1:]
                    - (x[0] + 1.0) * dy[1:]
                )
                n = math.sqrt(float(np.dot(w, w)))
                return dw / n - w * (float(np.dot(w, dw)) / n**3)

            return d

        xbar_kw = {"du": xbar_partial("du"), "dv": xbar_partial("dv")}
        nub1_kw = {
            "du": nub_partial_factory(n1_m, "du"),
            "dv": nub_partial_factory(n1_m, "dv"),
        }
        nub2_kw = {
            "du": nub_partial_factory(n2_m, "du"),
            "dv": nub_partial_factory(n2_m, "dv"),
        }

    return DiscFramedSurface(
        xbar=ParametricMap4(value=xbar_value, h1=x_m.h1, h2=x_m.h2, **xbar_kw),
        nubar1=ParametricMap4(
            value=nub_value_factory(n1_m), h1=n1_m.h1, h2=n1_m.h2, **nub1_kw
        ),
        nubar2=ParametricMap4(
            value=nub_value_factory(n2_m), h1=n2_m.h1, h2=n2_m.h2, **nub2_kw
        ),
        domain=fs.domain,
    )


# ---------------------------------------------------------------------------
# framed-surface transport D^3 -> H^3
# ---------------------------------------------------------------------------


def _h3_direction(p, y):
    """Unnormalized lifted normal (2 p.y, (1 - |p|^2) y + 2 (p.y) p)."""
    d = float(np.dot(p, y))
    out = np.empty(4)
    out[0] = 2.0 * d
    out[1:] = (1.0 - float(np.dot(p, p))) * y + 2.0 * d * p
    return out


def _normalize_minkowski(w, where: str):
    n2 = minkowski_dot4(w, w)
    if n2 <= NORMALIZATION_TOL:
        raise NormalizationError(
            f"{where}: direction has pseudo square {n2:.3e}, expected > 0; "
            "the input does not satisfy the framed-surface axioms"
        )
    return w / math.sqrt(n2)


def transport_to_h3(dfs: DiscFramedSurface) -> FramedSurface:
    """Lift a ball-model framed surface back to the hyperboloid.

    The base goes through the inverse ball map; each normal lifts to the
    normalized image of ``(2 p.y, (1-|p|^2) y + 2 (p.y) p)``, which is
    spacelike for valid input (asserted positivity of -p^2+q^2+r^2+s^2).
    Round trips reproduce the base surface exactly; the normal pair is
    only guaranteed back up to an in-plane rotation, so compare spans.
    """
    xb_m, n1_m, n2_m = dfs.xbar, dfs.nubar1, dfs.nubar2

    def x_value(u, v):
        return from_poincare(xb_m.value(u, v))

    def nu_value_factory(n_m):
        def value(u, v):
            w = _h3_direction(
                np.asarray(xb_m.value(u, v), dtype=float),
                np.asarray(n_m.value(u, v), dtype=float),
            )
            return _normalize_minkowski(w, "transport_to_h3")

        return value

    x_kw = {}
    nu1_kw = {}
    nu2_kw = {}
    if _have_firsts(xb_m, n1_m, n2_m):

        def x_partial(which):
            def d(u, v):
                p = np.asarray(xb_m.value(u, v), dtype=float)
                dp = np.asarray(getattr(xb_m, which)(u, v), dtype=float)
                s = float(np.dot(p, p))
                ds = 2.0 * float(np.dot(p, dp))
                denom = 1.0 - s
                out = np.empty(4)
                # quotient rule on (1 + s, 2p) / (1 - s)
                out[0] = (ds * denom + (1.0 + s) * ds) / denom**2
                out[1:] = (2.0 * dp * denom + 2.0 * p * ds) / denom**2
                return out

            return d

        def nu_partial_factory(n_m, which):
            def d(u, v):
                p = np.asarray(xb_m.value(u, v), dtype=float)
                y = np.asarray(n_m.value(u, v), dtype=float)
                dp = np.asarray(getattr(xb_m, which)(u, v), dtype=float)
                dy = np.asarray(getattr(n_m, which)(u, v), dtype=float)
                dd = float(np.dot(dp, y) + np.dot(p, dy))
                ds = 2.0 * float(np.dot(p, dp))
                w = _h3_direction(p, y)
                dw = np.empty(4)
                dw[0] = 2.0 * dd
                dw[1:] = (
                    -ds * y
                    + (1.0 - float(np.dot(p, p))) * dy
                    + 2.0 * dd * p
                    + 2.0 * float(np.dot(p, y)) * dp
                )
                n = math.sqrt(minkowski_dot4(w, w))
                return dw / n - w * (minkowski_dot4(w, dw) / n**3)

            return d

        x_kw = {"du": x_partial("du"), "dv": x_partial("dv")}
        nu1_kw = {
            "du": nu_partial_factory(n1_m, "du"),
            "dv": nu_partial_factory(n1_m, "dv"),
        }
        nu2_kw = {
            "du": nu_partial_factory(n2_m, "du"),
            "dv": nu_partial_factory(n2_m, "dv"),
        }

    return FramedSurface(
        x=ParametricMap4(value=x_value, h1=xb_m.h1, h2=xb_m.h2, **x_kw),
        nu1=ParametricMap4(
            value=nu_value_factory(n1_m), h1=n1_m.h1, h2=n1_m.h2, **nu1_kw
        ),
        nu2=ParametricMap4(
            value=nu_value_factory(n2_m), h1=n2_m.h1, h2=n2_m.h2, **nu2_kw
        ),
        domain=dfs.domain,
    )


def disc_alpha_beta(dfs: DiscFramedSurface, u: float, v: float) -> tuple[float, float]:
    """Weights of xbar_u x xbar_v on the orthonormal pair at one point."""
    _, xu, xv = first_partials(dfs.xbar, u, v)
    cr = euclid_cross(xu, xv)
    n1 = np.asarray(dfs.nubar1.value(u, v), dtype=float)
    n2 = np.asarray(dfs.nubar2.value(u, v), dtype=float)
    return euclid_dot(cr, n1), euclid_dot(cr, n2)


@dataclasses.dataclass(frozen=True)
class DiscResidualSummary:
    """Grid maxima of the ball-model framed-surface axioms."""

    max_radius: float  # max |xbar|; must stay < 1
    max_unit: float  # max | |nubar_i| - 1 |
    max_orth: float  # max |nubar1 . nubar2|
    max_off_span: float  # max |(xbar_u x xbar_v) . (nubar1 x nubar2)|


def verify_disc_framed(
    dfs: DiscFramedSurface, domain: Optional[Domain] = None
) -> DiscResidualSummary:
    dom = domain or dfs.domain
    max_radius = 0.0
    max_unit = 0.0
    max_orth = 0.0
    max_off = 0.0
    for v in dom.v_grid():
        for u in dom.u_grid():
            p, pu, pv = first_partials(dfs.xbar, u, v)
            n1 = np.asarray(dfs.nubar1.value(u, v), dtype=float)
            n2 = np.asarray(dfs.nubar2.value(u, v), dtype=float)
            max_radius = max(max_radius, math.sqrt(float(np.dot(p, p))))
            max_unit = max(
                max_unit,
                abs(math.sqrt(float(np.dot(n1, n1))) - 1.0),
                abs(math.sqrt(float(np.dot(n2, n2))) - 1.0),
            )
            max_orth = max(max_orth, abs(euclid_dot(n1, n2)))
            max_off = max(
                max_off, abs(euclid_dot(euclid_cross(pu, pv), euclid_cross(n1, n2)))
            )
    return DiscResidualSummary(max_radius, max_unit, max_orth, max_off)


# ---------------------------------------------------------------------------
# projections H^3 -> R^3_1
# ---------------------------------------------------------------------------


def _drop(w, axis: Axis) -> np.ndarray:
    return np.delete(np.asarray(w, dtype=float), axis.index)


def _insert(w3, value: float, axis: Axis) -> np.ndarray:
    return np.insert(np.asarray(w3, dtype=float), axis.index, value)


def _nu3_value(fs: FramedSurface, u: float, v: float) -> np.ndarray:
    return wedge3(
        np.asarray(fs.x.value(u, v), dtype=float),
        np.asarray(fs.nu1.value(u, v), dtype=float),
        np.asarray(fs.nu2.value(u, v), dtype=float),
    )


def _nu3_partial(fs: FramedSurface, which: str, u: float, v: float) -> np.ndarray:
    x = np.asarray(fs.x.value(u, v), dtype=float)
    n1 = np.asarray(fs.nu1.value(u, v), dtype=float)
    n2 = np.asarray(fs.nu2.value(u, v), dtype=float)
    dx = np.asarray(getattr(fs.x, which)(u, v), dtype=float)
    dn1 = np.asarray(getattr(fs.nu1, which)(u, v), dtype=float)
    dn2 = np.asarray(getattr(fs.nu2, which)(u, v), dtype=float)
    return wedge3(dx, n1, n2) + wedge3(x, dn1, n2) + wedge3(x, n1, dn2)


def project_to_r31(
    fs: FramedSurface, axis: Axis, domain: Optional[Domain] = None
) -> LightconeCandidate:
    """Drop one spacelike coordinate, keeping the projected binormal as t.

    The spacelike precondition on the projected binormal is checked at the
    grid points of ``domain`` (default: the surface's own) only — nothing
    is certified between samples.  Failure raises
    :class:`NonSpacelikeNormalError` carrying the first offending point
    and its causal character.
    """
    dom = domain or fs.domain
    for v in dom.v_grid():
        for u in dom.u_grid():
            w = _drop(_nu3_value(fs, u, v), axis)
            ch = causal_character(w)
            if ch is not CausalCharacter.SPACELIKE:
                raise NonSpacelikeNormalError(
                    f"projected binormal at ({u:.6g}, {v:.6g}) is {ch.value} "
                    f"(<w,w> = {minkowski_dot3(w, w):.3e}) for axis {axis.name}",
                    u=u,
                    v=v,
                    character=ch,
                )

    def xt_value(u, v):
        return _drop(fs.x.value(u, v), axis)

    def t_value(u, v):
        w = _drop(_nu3_value(fs, u, v), axis)
        return w / math.sqrt(minkowski_dot3(w, w))

    xt_kw = {}
    t_kw = {}
    if _have_firsts(fs.x, fs.nu1, fs.nu2):
        xt_kw = {
            "du": lambda u, v: _drop(fs.x.du(u, v), axis),
            "dv": lambda u, v: _drop(fs.x.dv(u, v), axis),
        }

        def t_partial(which):
            def d(u, v):
                w = _drop(_nu3_value(fs, u, v), axis)
                dw = _drop(_nu3_partial(fs, which, u, v), axis)
                n = math.sqrt(minkowski_dot3(w, w))
                return dw / n - w * (minkowski_dot3(w, dw) / n**3)

            return d

        t_kw = {"du": t_partial("du"), "dv": t_partial("dv")}

    return LightconeCandidate(
        xtilde=ParametricMap4(value=xt_value, h1=fs.x.h1, h2=fs.x.h2, **xt_kw),
        t=ParametricMap4(value=t_value, h1=fs.x.h1, h2=fs.x.h2, **t_kw),
        domain=dom,
        axis=axis,
    )


def lightcone_residual(
    lc: LightconeCandidate, domain: Optional[Domain] = None
) -> float:
    """Grid max of |<xt_u ^ xt_v, t>|, the defining identity of the output."""
    dom = domain or lc.domain
    worst = 0.0
    for v in dom.v_grid():
        for u in dom.u_grid():
            _, xu, xv = first_partials(lc.xtilde, u, v)
            t = np.asarray(lc.t.value(u, v), dtype=float)
            worst = max(worst, abs(minkowski_dot3(wedge2_r31(xu, xv), t)))
    return worst


# ---------------------------------------------------------------------------
# lifts R^3_1 -> H^3
# ---------------------------------------------------------------------------

Vec3Fn = Callable[[float, float], Sequence[float]]

_BASIS4 = np.eye(4)


def _fallback_normal(x, xu, xv) -> np.ndarray:
    """Unit spacelike nu with <nu, x> = 0 and <nu, x ^ x_u ^ x_v> = 0.

    Wedging x with W = x ^ x_u ^ x_v and the best coordinate direction
    gives both orthogonalities by alternation; when W (nearly) vanishes
    any unit spacelike vector orthogonal to x does the job, produced by
    pseudo-projecting the best coordinate direction against x.
    """
    w = wedge3(x, xu, xv)
    best = None
    best_n2 = 0.0
    for j in range(4):
        cand = wedge3(x, w, _BASIS4[j])
        n2 = minkowski_dot4(cand, cand)
        if n2 > best_n2:
            best, best_n2 = cand, n2
    if best is not None and best_n2 > NORMALIZATION_TOL:
        return best / math.sqrt(best_n2)
    for j in range(4):
        cand = _BASIS4[j] + minkowski_dot4(_BASIS4[j], x) * x
        n2 = minkowski_dot4(cand, cand)
        if n2 > best_n2:
            best, best_n2 = cand, n2
    return best / math.sqrt(best_n2)


def lift_from_r31(
    xt: ParametricMap4,
    axis: Axis,
    domain: Optional[Domain] = None,
    lplus: Optional[Vec3Fn] = None,
    lminus: Optional[Vec3Fn] = None,
    margin: float = LIFT_MARGIN,
) -> tuple[ParametricMap4, ParametricMap4]:
    """Insert the positive square root sqrt(x1^2 - x2^2 - x3^2 - 1).

    Returns ``(x, nu)``: the lifted base map and one unit spacelike normal
    satisfying <nu, x> = <nu, x ^ x_u ^ x_v> = 0, which is exactly what
    the frame-existence theorem needs; split nu into an orthonormal pair
    with :func:`h3frames.frames.construct_frame_from_normal` when a full
    frame is wanted.

    When the lightcone pair (lplus, lminus) of the source surface is
    supplied, nu uses its explicit formula: spatial part x4 * (l+ ^ l-)
    arranged around the inserted slot, last component -<xt, l+ ^ l->,
    pseudo-normalized.  Otherwise nu falls back to the wedge construction
    of :func:`_fallback_normal`.

    The precondition x1^2 - x2^2 - x3^2 > 1 is grid-checked on ``domain``
    (default: the map's own); violation raises
    :class:`~h3frames.errors.PreconditionError` reporting the minimum.
    """
    if (lplus is None) != (lminus is None):
        raise ValueError("supply both lightcone maps or neither")
    dom = domain or xt.domain
    if dom is None:
        raise ValueError("an explicit domain is required when the map carries none")

    worst = math.inf
    for v in dom.v_grid():
        for u in dom.u_grid():
            p = np.asarray(xt.value(u, v), dtype=float)
            worst = min(worst, p[0] ** 2 - p[1] ** 2 - p[2] ** 2)
    if worst <= 1.0 + margin:
        raise PreconditionError(
            f"lift needs x1^2 - x2^2 - x3^2 > 1 on the grid; minimum is {worst:.6e}"
        )

    def inserted(u, v):
        p = np.asarray(xt.value(u, v), dtype=float)
        return p, math.sqrt(p[0] ** 2 - p[1] ** 2 - p[2] ** 2 - 1.0)

    def x_value(u, v):
        p, x4 = inserted(u, v)
        return _insert(p, x4, axis)

    x_kw = {}
    if xt.has_closed_firsts:

        def x_partial(which):
            def d(u, v):
                p, x4 = inserted(u, v)
                dp = np.asarray(getattr(xt, which)(u, v), dtype=float)
                dx4 = (p[0] * dp[0] - p[1] * dp[1] - p[2] * dp[2]) / x4
                return _insert(dp, dx4, axis)

            return d

        x_kw = {"du": x_partial("du"), "dv": x_partial("dv")}

    x_map = ParametricMap4(value=x_value, h1=xt.h1, h2=xt.h2, domain=dom, **x_kw)

    if lplus is not None:

        def nu_value(u, v):
            p, x4 = inserted(u, v)
            lw = wedge2_r31(
                np.asarray(lplus(u, v), dtype=float),
                np.asarray(lminus(u, v), dtype=float),
            )
            raw = _insert(x4 * lw, -minkowski_dot3(p, lw), axis)
            return _normalize_minkowski(raw, "lift_from_r31")

    else:

        def nu_value(u, v):
            x, xu, xv = first_partials(x_map, u, v)
            return _fallback_normal(x, xu, xv)

    nu_map = ParametricMap4(value=nu_value, h1=xt.h1, h2=xt.h2, domain=dom)
    return x_map, nu_map


# ---------------------------------------------------------------------------
# mesh export
# ---------------------------------------------------------------------------


def write_disc_mesh(
    dest,
    fs: FramedSurface,
    domain: Optional[Domain] = None,
    markers: Optional[Sequence[tuple[float, float]]] = None,
    header_comments: Sequence[str] = (),
) -> None:
    """Write the ball-model image of the surface as a plain polygon mesh.

    Vertices are the grid samples projected through the ball map, written
    v-major as ``v x y z`` lines; every grid quad is split into two
    triangles wound counterclockwise as seen from outside the ball (the
    outward side is decided per triangle against its centroid direction).
    Marker parameter points, when given, are appended as extra vertices
    referenced from ``p`` lines.  ``header_comments`` lines come first,
    each prefixed with '# '.

    ``dest`` may be a path or a writable text stream.
    """
    dom = domain or fs.domain
    if hasattr(dest, "write"):
        _write_disc_mesh(dest, fs, dom, markers or (), header_comments)
    else:
        with open(dest, "w", encoding="ascii") as fh:
            _write_disc_mesh(fh, fs, dom, markers or (), header_comments)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_disc_mesh(fh, fs, dom, markers, header_comments=()) -> None:
    for line in header_comments:
        fh.write(f"# {line}\n")
    ug, vg = dom.u_grid(), dom.v_grid()
    nu, nv = len(ug), len(vg)
    pts = np.empty((nv, nu, 3))
    for iv, v in enumerate(vg):
        for iu, u in enumerate(ug):
            pts[iv, iu] = to_poincare(fs.x.value(u, v))
            fh.write(f"v {_fmt(pts[iv, iu, 0])} {_fmt(pts[iv, iu, 1])} {_fmt(pts[iv, iu, 2])}\n")

    def emit(ia, ib, ic):
        a, b, c = (pts[i // nu, i % nu] for i in (ia, ib, ic))
        if np.dot(np.cross(b - a, c - a), (a + b + c) / 3.0) < 0.0:
            ib, ic = ic, ib
        fh.write(f"f {ia + 1} {ib + 1} {ic + 1}\n")

    for iv in range(nv - 1):
        for iu in range(nu - 1):
            i00 = iv * nu + iu
            i10 = i00 + 1
            i01 = i00 + nu
            i11 = i01 + 1
            emit(i00, i10, i11)
            emit(i00, i11, i01)

    base = nv * nu
    for k, (u, v) in enumerate(markers):
        p = to_poincare(fs.x.value(u, v))
        fh.write(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        fh.write(f"p {base + k + 1}\n")

"""Linear algebra in Lorentz-Minkowski space.

Vectors live in R^4_1 with signature (-+++) or in R^3_1 with signature
(-++); the first coordinate is the timelike one in both cases.  Vectors are
plain ``numpy`` arrays of shape ``(4,)`` or ``(3,)`` built through the
validating constructors :func:`vec4` / :func:`vec3`.

The pseudo vector products are expanded by cofactors rather than delegated
to a generic determinant routine so the defining identity

    <x, a ^ b ^ c> = det(x, a, b, c)

holds to rounding error with no pivoting noise.
"""

from __future__ import annotations

import enum
import math

import numpy as np

__all__ = [
    "CausalCharacter",
    "CAUSAL_TOL",
    "vec4",
    "vec3",
    "minkowski_dot4",
    "minkowski_dot3",
    "minkowski_norm",
    "wedge3",
    "wedge2_r31",
    "euclid_dot",
    "euclid_cross",
    "causal_character",
    "gram_matrix",
    "frame_gram_residual",
]

#: Default threshold separating the causal characters.
CAUSAL_TOL = 1e-10

#: Signature matrix diagonals, indexed by dimension.
_SIGNATURE = {3: np.array([-1.0, 1.0, 1.0]), 4: np.array([-1.0, 1.0, 1.0, 1.0])}


class CausalCharacter(enum.Enum):
    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def _as_finite(values, n, name):
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape != (n,):
        raise ValueError(f"{name} expects {n} components, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} components must be finite, got {arr}")
    return arr


def vec4(x1, x2, x3, x4) -> np.ndarray:
    """Build a vector of R^4_1; x1 is the timelike component."""
    return _as_finite((x1, x2, x3, x4), 4, "vec4")


def vec3(x1, x2, x3) -> np.ndarray:
    """Build a vector of R^3_1; x1 is the timelike component."""
    return _as_finite((x1, x2, x3), 3, "vec3")


def minkowski_dot4(a, b) -> float:
    """Pseudo scalar product -a1*b1 + a2*b2 + a3*b3 + a4*b4."""
    return float(-a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3])


def minkowski_dot3(a, b) -> float:
    """Pseudo scalar product -a1*b1 + a2*b2 + a3*b3 in R^3_1."""
    return float(-a[0] * b[0] + a[1] * b[1] + a[2] * b[2])


def _pseudo_dot(a, b) -> float:
    return minkowski_dot4(a, b) if len(a) == 4 else minkowski_dot3(a, b)


def minkowski_norm(a) -> float:
    """sqrt(|<a, a>|) for a vector of R^4_1 or R^3_1."""
    return math.sqrt(abs(_pseudo_dot(a, a)))


def _det3(r0, r1, r2) -> float:
    return (
        r0[0] * (r1[1] * r2[2] - r1[2] * r2[1])
        - r0[1] * (r1[0] * r2[2] - r1[2] * r2[0])
        + r0[2] * (r1[0] * r2[1] - r1[1] * r2[0])
    )


def wedge3(a, b, c) -> np.ndarray:
    """Pseudo vector product a ^ b ^ c in R^4_1.

    Expansion of the formal determinant with first row (-e1, e2, e3, e4)
    and remaining rows a, b, c.  Satisfies <x, a^b^c> = det(x, a, b, c)
    for every x, hence is pseudo-orthogonal to each factor.
    """
    m1 = _det3(a[1:], b[1:], c[1:])
    m2 = _det3((a[0], a[2], a[3]), (b[0], b[2], b[3]), (c[0], c[2], c[3]))
    m3 = _det3((a[0], a[1], a[3]), (b[0], b[1], b[3]), (c[0], c[1], c[3]))
    m4 = _det3(a[:3], b[:3], c[:3])
    return np.array([-m1, -m2, m3, -m4])


def wedge2_r31(a, b) -> np.ndarray:
    """Pseudo vector product a ^ b in R^3_1.

    Expansion with first row (-e1, e2, e3); satisfies
    <x, a^b> = det(x, a, b).
    """
    return np.array(
        [
            -(a[1] * b[2] - a[2] * b[1]),
            -(a[0] * b[2] - a[2] * b[0]),
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def euclid_dot(a, b) -> float:
    """Ordinary Euclidean scalar product."""
    return float(np.dot(np.asarray(a, dtype=float), np.asarray(b, dtype=float)))


def euclid_cross(a, b) -> np.ndarray:
    """Ordinary Euclidean cross product in R^3."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return np.array(
        [
            a[1] * b[2] - a[2] * b[1],
            a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0],
        ]
    )


def causal_character(v, tol: float = CAUSAL_TOL) -> CausalCharacter:
    """Classify v as spacelike (<v,v> > tol), timelike (< -tol) or lightlike."""
    q = _pseudo_dot(v, v)
    if q > tol:
        return CausalCharacter.SPACELIKE
    if q < -tol:
        return CausalCharacter.TIMELIKE
    return CausalCharacter.LIGHTLIKE


def gram_matrix(*vectors) -> np.ndarray:
    """Matrix of pairwise pseudo scalar products of the given vectors."""
    n = len(vectors)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = _pseudo_dot(vectors[i], vectors[j])
    return g


def frame_gram_residual(x, n1, n2, n3) -> float:
    """Max abs deviation of the frame's Gram matrix from diag(-1, 1, 1, 1).

    Zero exactly when {x, n1, n2, n3} is a pseudo-orthonormal frame with
    timelike x.
    """
    g = gram_matrix(x, n1, n2, n3)
    return float(np.max(np.abs(g - np.diag(_SIGNATURE[4]))))

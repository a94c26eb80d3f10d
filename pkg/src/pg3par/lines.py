"""Oriented lines of real projective 3-space.

An oriented line is a unit 6-vector of Pluecker coordinates
``(p01, p02, p03, p23, p31, p12)`` with ``pij = Pi Qj - Pj Qi`` for two
spanning points ``P, Q`` taken in that order.  Positive rescaling is the
identity and negation reverses orientation.  The affine chart is
``(x, y, z) -> [1, x, y, z]``.

The Klein split sends a line to the pair

    x = (p01 + p23, p02 + p31, p03 + p12)
    y = (p01 - p23, p02 - p31, p03 - p12)

which have equal length exactly when the Klein quadric relation holds, so a
unit line gives a point of S^2 x S^2.  The map is linear, hence odd: reversing
a line sends both factors to their antipodes.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

PAIRS = ((0, 1), (0, 2), (0, 3), (2, 3), (3, 1), (1, 2))
INCIDENCE_TOL = 1e-8
_INFINITY_TOL = 1e-12


class DegenerateLine(ValueError):
    """Two points do not span a line."""


class SphereCoords(NamedTuple):
    x: np.ndarray
    y: np.ndarray


def projective_point(v) -> np.ndarray:
    """Unit representative of a point of PG(3,R), first nonzero entry positive."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ValueError("the zero vector is not a projective point")
    v = v / n
    lead = np.take_along_axis(v, np.argmax(np.abs(v) > 1e-15, axis=-1)[..., None], -1)
    return v * np.where(lead < 0, -1.0, 1.0)


def affine_point(p) -> np.ndarray:
    """Homogeneous coordinates ``[1, p]`` of a point of R^3 (not normalized)."""
    p = np.asarray(p, dtype=float)
    return np.concatenate([np.ones(p.shape[:-1] + (1,)), p], axis=-1)


def wedge(P, Q) -> np.ndarray:
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    return np.stack([P[..., i] * Q[..., j] - P[..., j] * Q[..., i] for i, j in PAIRS], -1)


def normalize_line(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return p / np.linalg.norm(p, axis=-1, keepdims=True)


def line_through(P, Q) -> np.ndarray:
    """Oriented line from ``P`` towards ``Q``.

    Raises DegenerateLine if the points are closer than 1e-8 radians as
    points of the projective space.
    """
    P = np.asarray(P, dtype=float)
    Q = np.asarray(Q, dtype=float)
    P = P / np.linalg.norm(P, axis=-1, keepdims=True)
    Q = Q / np.linalg.norm(Q, axis=-1, keepdims=True)
    p = wedge(P, Q)
    # |P ^ Q| is the sine of the angle between unit representatives
    if np.any(np.linalg.norm(p, axis=-1) <= 1e-8):
        raise DegenerateLine("points are (nearly) proportional")
    return normalize_line(p)


def reverse(p) -> np.ndarray:
    return -np.asarray(p, dtype=float)


def quadric_residual(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    return np.abs(p[..., 0] * p[..., 3] + p[..., 1] * p[..., 4] + p[..., 2] * p[..., 5])


def dual(p) -> np.ndarray:
    """Swap the two Pluecker halves (the line's coordinates as an axis of planes)."""
    p = np.asarray(p, dtype=float)
    return np.concatenate([p[..., 3:], p[..., :3]], axis=-1)


def reciprocal_product(p, q) -> np.ndarray:
    """Vanishes exactly when the two lines meet (or coincide)."""
    return np.sum(np.asarray(p, dtype=float) * dual(q), axis=-1)


def dual_matrix(p) -> np.ndarray:
    """Antisymmetric 4x4 matrix whose kernel is the set of points on the line."""
    p = np.asarray(p, dtype=float)
    d = dual(p)
    out = np.zeros(p.shape[:-1] + (4, 4))
    for k, (i, j) in enumerate(PAIRS):
        out[..., i, j] = d[..., k]
        out[..., j, i] = -d[..., k]
    return out


def incident(P, L, tol: float = INCIDENCE_TOL) -> np.ndarray:
    """Whether point ``P`` lies on line ``L`` (orientation is irrelevant)."""
    P = np.asarray(P, dtype=float)
    P = P / np.linalg.norm(P, axis=-1, keepdims=True)
    L = normalize_line(L)
    r = np.einsum("...ij,...j->...i", dual_matrix(L), P)
    out = np.linalg.norm(r, axis=-1) <= tol
    return bool(out) if out.ndim == 0 else out


def klein_split(p) -> SphereCoords:
    p = np.asarray(p, dtype=float)
    u = p[..., :3] + p[..., 3:]
    w = p[..., :3] - p[..., 3:]
    u = u / np.linalg.norm(u, axis=-1, keepdims=True)
    w = w / np.linalg.norm(w, axis=-1, keepdims=True)
    return SphereCoords(u, w)


def klein_merge(x, y=None) -> np.ndarray:
    """Inverse of :func:`klein_split` (accepts a SphereCoords or two arrays)."""
    if y is None:
        x, y = x
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    x = x / np.linalg.norm(x, axis=-1, keepdims=True)
    y = y / np.linalg.norm(y, axis=-1, keepdims=True)
    return np.concatenate([(x + y) / 2, (x - y) / 2], axis=-1)


def compound2(M) -> np.ndarray:
    """6x6 matrix by which a 4x4 projective map acts on Pluecker vectors."""
    M = np.asarray(M, dtype=float)
    out = np.empty(M.shape[:-2] + (6, 6))
    for a, (i, j) in enumerate(PAIRS):
        for b, (k, l) in enumerate(PAIRS):
            out[..., a, b] = M[..., i, k] * M[..., j, l] - M[..., i, l] * M[..., j, k]
    return out


def transform(M, p) -> np.ndarray:
    """Image of oriented line(s) ``p`` under the projective map with matrix ``M``."""
    C = compound2(M)
    return normalize_line(np.einsum("...ij,...j->...i", C, np.asarray(p, dtype=float)))


def angular_distance(a, b) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    cross = np.linalg.norm(np.cross(a, b), axis=-1)
    return np.arctan2(cross, np.sum(a * b, axis=-1))


def uniform_sphere(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_lines(rng: np.random.Generator, n: int) -> np.ndarray:
    """Oriented lines drawn uniformly from S^2 x S^2 through :func:`klein_merge`."""
    return klein_merge(uniform_sphere(rng, n), uniform_sphere(rng, n))


# --- affine picture -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FiniteLine:
    point: np.ndarray
    direction: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        object.__setattr__(self, "point", np.asarray(self.point, dtype=float))
        object.__setattr__(self, "direction", d / np.linalg.norm(d))

    def at(self, t) -> np.ndarray:
        return self.point + np.multiply.outer(t, self.direction)


@dataclass(frozen=True, eq=False)
class LineAtInfinity:
    """Common line at infinity of the planes with unit normal ``normal``.

    Oriented counterclockwise when seen from the tip of ``sign * normal``.
    """

    normal: np.ndarray
    sign: int = 1

    def __post_init__(self):
        n = np.asarray(self.normal, dtype=float)
        object.__setattr__(self, "normal", n / np.linalg.norm(n))


AffineLine = Union[FiniteLine, LineAtInfinity]


def affine_to_pluecker(line: AffineLine) -> np.ndarray:
    if isinstance(line, LineAtInfinity):
        return np.concatenate([np.zeros(3), line.sign * line.normal])
    d = line.direction
    return normalize_line(np.concatenate([d, np.cross(line.point, d)]))


def pluecker_to_affine(p) -> AffineLine:
    """Finite lines come back with their point closest to the origin."""
    p = normalize_line(p)
    d, m = p[:3], p[3:]
    nd = np.linalg.norm(d)
    if nd <= _INFINITY_TOL:
        return LineAtInfinity(m)
    return FiniteLine(np.cross(d, m) / nd**2, d)


def split_affine(p):
    """Vectorized affine data: (direction, closest point, at_infinity mask).

    Direction and point are meaningless where the mask is set.
    """
    p = normalize_line(p)
    d, m = p[..., :3], p[..., 3:]
    nd2 = np.sum(d * d, axis=-1)
    inf = nd2 <= _INFINITY_TOL**2
    safe = np.where(inf, 1.0, nd2)
    return d / np.sqrt(safe)[..., None], np.cross(d, m) / safe[..., None], inf


# --- serialization --------------------------------------------------------


def line_to_json(p) -> dict:
    return {"pluecker": [float(v) for v in np.asarray(p, dtype=float)]}


def line_from_json(obj: dict) -> np.ndarray:
    p = np.asarray(obj["pluecker"], dtype=float)
    if p.shape != (6,):
        raise ValueError("pluecker needs exactly six numbers")
    if quadric_residual(normalize_line(p)) > 1e-8:
        raise ValueError("coordinates do not lie on the Klein quadric")
    return normalize_line(p)


def coords_to_json(c: SphereCoords) -> dict:
    return {"x": [float(v) for v in c.x], "y": [float(v) for v in c.y]}


def coords_from_json(obj: dict) -> SphereCoords:
    return SphereCoords(np.asarray(obj["x"], dtype=float), np.asarray(obj["y"], dtype=float))

"""Quaternion algebra and the isometries of R^4 it induces.

Quaternions are plain ``numpy`` arrays whose last axis holds ``(w, x, y, z)``
in the basis ``1, i, j, k``; every function broadcasts over leading axes.
The same coordinates double as homogeneous coordinates of projective
3-space, with ``w`` the affine weight.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

ONE = np.array([1.0, 0.0, 0.0, 0.0])
I = np.array([0.0, 1.0, 0.0, 0.0])
J = np.array([0.0, 0.0, 1.0, 0.0])
K = np.array([0.0, 0.0, 0.0, 1.0])


def quaternion(w=0.0, x=0.0, y=0.0, z=0.0) -> np.ndarray:
    q = np.array([w, x, y, z], dtype=float)
    if not np.all(np.isfinite(q)):
        raise ValueError("quaternion components must be finite")
    return q


def multiply(p, q) -> np.ndarray:
    """Hamilton product ``p * q`` (broadcasting)."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    pw, px, py, pz = np.moveaxis(p, -1, 0)
    qw, qx, qy, qz = np.moveaxis(q, -1, 0)
    return np.stack(
        [
            pw * qw - px * qx - py * qy - pz * qz,
            pw * qx + px * qw + py * qz - pz * qy,
            pw * qy - px * qz + py * qw + pz * qx,
            pw * qz + px * qy - py * qx + pz * qw,
        ],
        axis=-1,
    )


def conjugate(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def norm(q) -> np.ndarray:
    return np.linalg.norm(np.asarray(q, dtype=float), axis=-1)


def normalize(q) -> np.ndarray:
    """Project onto the unit 3-sphere; this is the ``UnitQuaternion`` constructor."""
    q = np.asarray(q, dtype=float)
    n = norm(q)
    if np.any(n == 0):
        raise ValueError("cannot normalize the zero quaternion")
    return q / n[..., None]


def inverse(q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    return conjugate(q) / np.sum(q * q, axis=-1)[..., None]


def random_unit(rng: np.random.Generator, size=None) -> np.ndarray:
    """Haar-uniform unit quaternions."""
    shape = (4,) if size is None else (*np.atleast_1d(size), 4)
    return normalize(rng.standard_normal(shape))


def left_matrix(a) -> np.ndarray:
    """Matrix of ``q -> a q`` acting on coordinate columns."""
    a = np.asarray(a, dtype=float)
    w, x, y, z = np.moveaxis(a, -1, 0)
    rows = [
        [w, -x, -y, -z],
        [x, w, -z, y],
        [y, z, w, -x],
        [z, -y, x, w],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def right_matrix(b) -> np.ndarray:
    """Matrix of ``q -> q b`` acting on coordinate columns."""
    b = np.asarray(b, dtype=float)
    w, x, y, z = np.moveaxis(b, -1, 0)
    rows = [
        [w, -x, -y, -z],
        [x, w, z, -y],
        [y, -z, w, x],
        [z, y, -x, w],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def rotation3_of(u) -> np.ndarray:
    """Rotation ``v -> u v conj(u)`` of the pure imaginary quaternions.

    This is the two-to-one covering Spin(3) -> SO(3); ``u`` and ``-u`` give
    the same matrix.
    """
    u = normalize(u)
    w, x, y, z = np.moveaxis(u, -1, 0)
    rows = [
        [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
        [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
        [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
    ]
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


def axis_angle(axis, angle: float) -> np.ndarray:
    """Unit quaternion whose ``rotation3_of`` turns by ``angle`` about ``axis``."""
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    return np.concatenate([[np.cos(angle / 2)], np.sin(angle / 2) * axis])


def _canonical_sign(q: np.ndarray) -> float:
    nz = np.flatnonzero(np.abs(q) > 0)
    return 1.0 if nz.size == 0 or q[nz[0]] > 0 else -1.0


@dataclass(frozen=True, eq=False)
class Isometry4:
    """The map ``q -> left * q * right`` for unit quaternions ``left``, ``right``.

    ``(left, right)`` and ``(-left, -right)`` give the same map of R^4; the
    constructor flips signs so that the first nonzero component of ``left``
    is positive, which makes the representative unique.
    """

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        left = np.asarray(self.left, dtype=float)
        right = np.asarray(self.right, dtype=float)
        if left.shape != (4,) or right.shape != (4,):
            raise ValueError("Isometry4 takes two single quaternions")
        sign = _canonical_sign(left)
        object.__setattr__(self, "left", sign * left)
        object.__setattr__(self, "right", sign * right)

    @classmethod
    def from_pair(cls, left, right) -> "Isometry4":
        return cls(normalize(left), normalize(right))

    @classmethod
    def left_mult(cls, a) -> "Isometry4":
        return cls(normalize(a), ONE)

    @classmethod
    def right_mult(cls, b) -> "Isometry4":
        return cls(ONE, normalize(b))

    @classmethod
    def inner(cls, u) -> "Isometry4":
        """Conjugation ``q -> u q conj(u)``: a rotation of R^3 fixing the origin."""
        u = normalize(u)
        return cls(u, conjugate(u))

    @classmethod
    def random(cls, rng: np.random.Generator) -> "Isometry4":
        return cls(random_unit(rng), random_unit(rng))

    def __call__(self, q) -> np.ndarray:
        return multiply(multiply(self.left, q), self.right)

    def __matmul__(self, other: "Isometry4") -> "Isometry4":
        return Isometry4(
            multiply(self.left, other.left), multiply(other.right, self.right)
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, Isometry4):
            return NotImplemented
        return bool(
            np.allclose(self.left, other.left, atol=1e-12)
            and np.allclose(self.right, other.right, atol=1e-12)
        )

    def __hash__(self):
        return hash((tuple(np.round(self.left, 9)), tuple(np.round(self.right, 9))))

    def inverse(self) -> "Isometry4":
        return Isometry4(conjugate(self.left), conjugate(self.right))

    def renormalized(self) -> "Isometry4":
        return Isometry4(normalize(self.left), normalize(self.right))

    def as_matrix4(self) -> np.ndarray:
        return left_matrix(self.left) @ right_matrix(self.right)


def as_matrix4(g: Isometry4) -> np.ndarray:
    return g.as_matrix4()


def compose(*gs: Isometry4) -> Isometry4:
    """Compose isometries left to right as maps (``compose(f, g) = f o g``)."""
    out = Isometry4(ONE, ONE)
    for count, g in enumerate(gs, 1):
        out = out @ g
        if count % 10 == 0:
            out = out.renormalized()
    return out

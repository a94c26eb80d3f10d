"""Left and right Clifford parallelisms.

Left multiplications ``q -> a q`` and right multiplications ``q -> q b`` act
on oriented lines through the Klein split as a product action: one of them
fixes one sphere coordinate and rotates the other.  Which coordinate each
one fixes is measured once at import time (see :data:`FIXED_COORD`) instead
of being hard-wired.  A left (right) Clifford class is an orbit of the left
(right) multiplications, so its members share the coordinate those maps fix.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from . import lines as ln
from . import quaternions as qt

ANCHOR_TOL = 1e-8


class CliffordSide(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    def other(self) -> "CliffordSide":
        return CliffordSide.RIGHT if self is CliffordSide.LEFT else CliffordSide.LEFT


def act_left(a, L) -> np.ndarray:
    """Image of oriented line(s) ``L`` under ``q -> a q``."""
    return ln.transform(qt.left_matrix(qt.normalize(a)), L)


def act_right(b, L) -> np.ndarray:
    """Image of oriented line(s) ``L`` under ``q -> q b``."""
    return ln.transform(qt.right_matrix(qt.normalize(b)), L)


def act(g: qt.Isometry4, L) -> np.ndarray:
    return ln.transform(g.as_matrix4(), L)


_CONJ = np.diag([1.0, -1.0, -1.0, -1.0])


def conjugation_image(L) -> np.ndarray:
    """Image under the coordinate-wise quaternion conjugation of R^4."""
    return ln.transform(_CONJ, L)


def _calibrate():
    """Find the split coordinate each side fixes and the induced rotation law.

    Returns ``fixed`` (side -> 0 or 1) and ``conj`` (side -> 3x3 orthogonal C)
    such that acting by ``a`` on side ``s`` maps the moving coordinate ``v``
    to ``C R C^T v`` with ``R = rotation3_of(a)`` for the left side and
    ``R = rotation3_of(conj(a))`` for the right side (right multiplication is
    an anti-homomorphism into the rotations).
    """
    rng = np.random.default_rng(20240917)
    L = ln.random_lines(rng, 16)
    a = qt.random_unit(rng)
    before = ln.klein_split(L)
    fixed, conj = {}, {}
    for side, actor, rot in (
        (CliffordSide.LEFT, act_left, qt.rotation3_of(a)),
        (CliffordSide.RIGHT, act_right, qt.rotation3_of(qt.conjugate(a))),
    ):
        after = ln.klein_split(actor(a, L))
        drift = [np.abs(after[k] - before[k]).max() for k in (0, 1)]
        k = int(np.argmin(drift))
        if drift[k] > 1e-9 or drift[1 - k] < 1e-3:
            raise RuntimeError("product action calibration failed")
        fixed[side] = k
        moving = 1 - k
        for perm in itertools.permutations(range(3)):
            for signs in itertools.product((1.0, -1.0), repeat=3):
                C = np.diag(signs)[list(perm)]
                pred = before[moving] @ (C @ rot @ C.T).T
                if np.abs(pred - after[moving]).max() < 1e-9:
                    conj[side] = C
                    break
            if side in conj:
                break
        else:
            raise RuntimeError("no signed permutation relates the induced rotation")
    return fixed, conj


FIXED_COORD, INDUCED_CONJUGATION = _calibrate()


def induced_rotation(side: CliffordSide, a) -> np.ndarray:
    """Rotation of the moving split coordinate caused by acting with ``a``."""
    a = qt.normalize(a)
    R = qt.rotation3_of(a if side is CliffordSide.LEFT else qt.conjugate(a))
    C = INDUCED_CONJUGATION[side]
    return C @ R @ C.T


def anchors(L, side: CliffordSide) -> np.ndarray:
    """The split coordinate shared by all lines in the ``side`` class of ``L``."""
    return ln.klein_split(L)[FIXED_COORD[side]]


def canonical_axis(v) -> np.ndarray:
    """Representative of ``{v, -v}``: first clearly nonzero component positive."""
    v = np.asarray(v, dtype=float)
    lead = np.take_along_axis(v, np.argmax(np.abs(v) > 1e-12, axis=-1)[..., None], -1)
    return v * np.where(lead < 0, -1.0, 1.0)


@dataclass(frozen=True, eq=False)
class CliffordClass:
    side: CliffordSide
    anchor: np.ndarray
    oriented: bool = True

    def __post_init__(self):
        a = np.asarray(self.anchor, dtype=float)
        a = a / np.linalg.norm(a)
        if not self.oriented:
            a = canonical_axis(a)
        object.__setattr__(self, "anchor", a)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CliffordClass):
            return NotImplemented
        return (
            self.side is other.side
            and self.oriented == other.oriented
            and float(ln.angular_distance(self.anchor, other.anchor)) <= ANCHOR_TOL
        )

    __hash__ = None

    def contains(self, L) -> bool:
        a = anchors(L, self.side)
        if self.oriented:
            return bool(ln.angular_distance(a, self.anchor) <= ANCHOR_TOL)
        d = np.abs(np.dot(a, self.anchor))
        return bool(np.arccos(np.clip(d, -1, 1)) <= ANCHOR_TOL)

    def members(self, free) -> np.ndarray:
        """Lines of the class, one per unit vector in ``free`` (the other coordinate)."""
        free = np.atleast_2d(free)
        fixed = np.broadcast_to(self.anchor, free.shape)
        pair = [None, None]
        pair[FIXED_COORD[self.side]] = fixed
        pair[1 - FIXED_COORD[self.side]] = free
        return ln.klein_merge(*pair)

    def to_json(self) -> dict:
        return {
            "side": self.side.value,
            "anchor": [float(v) for v in self.anchor],
            "oriented": bool(self.oriented),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CliffordClass":
        return cls(CliffordSide(obj["side"]), np.asarray(obj["anchor"], float), bool(obj["oriented"]))


def class_of(L, side: CliffordSide, oriented: bool = True) -> CliffordClass:
    return CliffordClass(side, anchors(L, side), oriented)


# --- parallelism objects -------------------------------------------------


class NoClassFound(RuntimeError):
    """No parallel class passes the hit threshold for a line."""


@dataclass
class ClassResolution:
    """Class indices (unit 3-vectors) that a line belongs to, with residuals."""

    hits: list = field(default_factory=list)

    @property
    def multiplicity(self) -> int:
        return len(self.hits)

    @property
    def indices(self) -> np.ndarray:
        return np.array([n for n, _ in self.hits]).reshape(-1, 3)

    def to_json(self) -> list:
        return [{"index": [float(v) for v in n], "residual": float(r)} for n, r in self.hits]


@dataclass(frozen=True)
class CliffordParallelism:
    """Exact resolver: the class index of a line is its anchor."""

    side: CliffordSide
    oriented: bool = True
    index_tol: float = ANCHOR_TOL

    kind = "clifford"

    def class_index(self, L) -> np.ndarray:
        a = anchors(L, self.side)
        return a if self.oriented else canonical_axis(a)

    def resolve(self, L) -> ClassResolution:
        return ClassResolution([(self.class_index(np.asarray(L, float)), 0.0)])

    def resolve_many(self, Ls) -> list:
        return [ClassResolution([(n, 0.0)]) for n in self.class_index(np.asarray(Ls, float))]

    def class_members(self, n, rng: np.random.Generator, count: int) -> np.ndarray:
        L = CliffordClass(self.side, n, True).members(ln.uniform_sphere(rng, count))
        if not self.oriented:
            # either orientation belongs to an ordinary class
            L = L * rng.choice([-1.0, 1.0], size=(count, 1))
        return L

    def same_class(self, n1, n2, tol=None) -> bool:
        tol = self.index_tol if tol is None else tol
        return bool(ln.angular_distance(n1, n2) <= tol)

    def describe(self) -> dict:
        return {"kind": "clifford", "side": self.side.value, "oriented": self.oriented}


def clifford_parallelism(side: CliffordSide, oriented: bool = True) -> CliffordParallelism:
    return CliffordParallelism(side, oriented)

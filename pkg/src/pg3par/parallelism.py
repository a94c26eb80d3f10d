"""Parallelisms swept out by a rotation group from one rotational spread.

Let ``mu(x, y, z) = (x, y, s z + t)`` and let ``Omega`` be the rotations
about the origin.  The family ``OrbitParallelism(profile, (s, t))`` has the
classes ``mu^-1 w mu (C)`` for ``w`` in ``Omega`` and ``C`` the base spread;
the conjugate group ``mu^-1 Omega mu`` fixes the point ``(0, 0, -t/s)``.
The base spread is invariant under rotations about the z-axis, so a class
only depends on the direction ``n = w(e_z)``, which serves as class index.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Union

import numpy as np

from . import lines as ln
from . import quaternions as qt
from . import sphere
from .clifford import ClassResolution, CliffordParallelism, NoClassFound
from .sampling import map_chunks
from .spreads import Membership, RotationalSpread, membership_residual, spread_pluecker

HIT_THRESHOLD = 1e-7
REFINE_TOL = 1e-10
DEDUPE_ANGLE = 1e-4


@dataclass(frozen=True)
class GroupCopyParams:
    s: float = 1.0
    t: float = 0.0

    def __post_init__(self):
        if self.s == 0 or not np.isfinite(self.s) or not np.isfinite(self.t):
            raise ValueError("s must be finite and nonzero, t finite")

    def matrix(self) -> np.ndarray:
        """Homogeneous matrix of ``mu`` (coordinates ``[w, x, y, z]``)."""
        return affine_matrix(np.diag([1.0, 1.0, self.s]), [0.0, 0.0, self.t])

    def inverse_matrix(self) -> np.ndarray:
        return affine_matrix(np.diag([1.0, 1.0, 1.0 / self.s]), [0.0, 0.0, -self.t / self.s])


def affine_matrix(A, b=(0.0, 0.0, 0.0)) -> np.ndarray:
    """Homogeneous matrix of ``x -> A x + b``."""
    M = np.eye(4)
    M[1:, 1:] = np.asarray(A, float)
    M[1:, 0] = np.asarray(b, float)
    return M


def projective_matrix(g) -> np.ndarray:
    if isinstance(g, qt.Isometry4):
        return g.as_matrix4()
    M = np.asarray(g, dtype=float)
    if M.shape != (4, 4) or abs(np.linalg.det(M)) < 1e-12:
        raise ValueError("need an invertible 4x4 matrix or an Isometry4")
    return M


_FLIP = np.diag([1.0, -1.0, -1.0])


def axis_rotation(n: np.ndarray) -> np.ndarray:
    """A rotation taking e_z to ``n`` (vectorized).

    Rodrigues' formula is applied to whichever of +-n lies in the upper
    hemisphere, so the result stays accurate near both poles.
    """
    n = np.asarray(n, dtype=float)
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    south = n[..., 2] < 0
    m = np.where(south[..., None], -n, n)
    # rotation e_z -> m about the axis e_z x m
    vx, vy = -m[..., 1], m[..., 0]
    c = m[..., 2]
    k = 1.0 / (1.0 + c)
    R = np.empty(n.shape[:-1] + (3, 3))
    R[..., 0, 0] = 1 - k * vy * vy
    R[..., 0, 1] = k * vx * vy
    R[..., 0, 2] = vy
    R[..., 1, 0] = k * vx * vy
    R[..., 1, 1] = 1 - k * vx * vx
    R[..., 1, 2] = -vx
    R[..., 2, 0] = -vy
    R[..., 2, 1] = vx
    R[..., 2, 2] = c
    # south chart: FLIP e_z = -e_z, so R_{-n} FLIP takes e_z to n
    R = np.where(south[..., None, None], R @ _FLIP, R)
    return R


def _rotate_lines(R, L):
    """Rotations about the origin act on (direction, moment) blockwise."""
    return np.concatenate(
        [np.einsum("...ij,...j->...i", R, L[..., :3]), np.einsum("...ij,...j->...i", R, L[..., 3:])], -1
    )


@dataclass
class ParallelismReport:
    samples: int
    histogram: dict
    witnesses: list
    indices: np.ndarray = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return set(self.histogram) <= {1}

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "multiplicity_histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "witnesses": self.witnesses,
            "pass": self.passed,
        }


@dataclass(frozen=True)
class OrbitParallelism:
    profile: object
    copy: GroupCopyParams = GroupCopyParams()
    oriented: bool = True
    cells: int = 1280
    hit_threshold: float = HIT_THRESHOLD
    refine_tol: float = REFINE_TOL
    dedupe_angle: float = DEDUPE_ANGLE

    kind = "orbit"

    @property
    def index_tol(self) -> float:
        return self.dedupe_angle

    @cached_property
    def base(self) -> RotationalSpread:
        return RotationalSpread(self.profile, self.oriented)

    @cached_property
    def _mu(self):
        return ln.compound2(self.copy.matrix()), ln.compound2(self.copy.inverse_matrix())

    @cached_property
    def antipodes_coincide(self) -> bool:
        """Whether classes ``n`` and ``-n`` are one and the same set of lines.

        This happens for ordinary lines when the pulled-back base spread is
        centred at the origin, i.e. its center function equals ``t``.
        """
        if self.oriented:
            return False
        r = np.logspace(-3, 3, 241)
        return bool(np.max(np.abs(self.profile.center(r) - self.copy.t)) <= 1e-12 * (1 + abs(self.copy.t)))

    def to_base(self, n, L, omega=None) -> np.ndarray:
        """``mu^-1 w^-1 mu`` applied to ``L``; ``w`` defaults to :func:`axis_rotation`."""
        C, Cinv = self._mu
        R = axis_rotation(n) if omega is None else np.asarray(omega, float)
        Lm = np.einsum("ij,...j->...i", C, L)
        Lr = _rotate_lines(np.swapaxes(R, -1, -2), Lm)
        return ln.normalize_line(np.einsum("ij,...j->...i", Cinv, Lr))

    def from_base(self, n, L) -> np.ndarray:
        C, Cinv = self._mu
        Lm = np.einsum("ij,...j->...i", C, L)
        Lr = _rotate_lines(axis_rotation(n), Lm)
        return ln.normalize_line(np.einsum("ij,...j->...i", Cinv, Lr))

    def residual(self, n, L) -> np.ndarray:
        return membership_residual(self.base, self.to_base(n, L))

    def class_member_test(self, n, L, omega=None) -> Membership:
        """Whether ``L`` lies in class ``n``; ``omega`` may be any rotation taking e_z to ``n``."""
        n = np.asarray(n, float)
        if omega is not None and np.linalg.norm(np.asarray(omega) @ [0, 0, 1.0] - n / np.linalg.norm(n)) > 1e-9:
            raise ValueError("omega does not send e_z to n")
        res = float(self.residual(n, np.asarray(L, float)) if omega is None else membership_residual(self.base, self.to_base(n, L, omega)))
        return Membership(res <= self.hit_threshold, res)

    def class_members(self, n, rng: np.random.Generator, count: int) -> np.ndarray:
        """Random lines of class ``n``: rulings with log-uniform waist in [1e-2, 1e2]."""
        r = 10.0 ** rng.uniform(-2, 2, count)
        th = rng.uniform(0, 2 * np.pi, count)
        L = self.from_base(np.broadcast_to(n, (count, 3)), spread_pluecker(self.base, r, th))
        if not self.oriented:
            L = L * rng.choice([-1.0, 1.0], size=(count, 1))
        return L

    def same_class(self, n1, n2, tol=None) -> bool:
        tol = self.index_tol if tol is None else tol
        d = float(ln.angular_distance(n1, n2))
        if self.antipodes_coincide:
            d = min(d, float(ln.angular_distance(n1, -np.asarray(n2))))
        return d <= tol

    # --- resolution -------------------------------------------------------

    def _grid_values(self, Ls, cells):
        centres, table, spacing = sphere.cell_grid(cells)
        C, Cinv = self._mu
        R = axis_rotation(centres)
        Lm = Ls @ C.T
        out = np.empty((len(Ls), cells))
        step = max(1, 200000 // cells)
        for a in range(0, len(Ls), step):
            chunk = Lm[a : a + step]
            Lr = _rotate_lines(np.swapaxes(R, -1, -2)[None], chunk[:, None, :])
            Lb = ln.normalize_line(Lr @ Cinv.T)
            out[a : a + step] = membership_residual(self.base, Lb.reshape(-1, 6)).reshape(len(chunk), cells)
        return out, centres, table, spacing

    def _resolve_with(self, Ls, cells):
        vals, centres, table, spacing = self._grid_values(Ls, cells)
        mins = sphere.local_minima(vals, table)
        li, ci = np.nonzero(mins)
        C, Cinv = self._mu
        Lm = Ls @ C.T

        def objective(points, ids):
            Lr = _rotate_lines(np.swapaxes(axis_rotation(points), -1, -2), Lm[li[ids]])
            res = membership_residual(self.base, ln.normalize_line(Lr @ Cinv.T))
            return res * res

        pts, f = sphere.nelder_mead_sphere(objective, centres[ci], step=spacing, xtol=self.refine_tol)
        res = np.sqrt(f)
        out = [[] for _ in range(len(Ls))]
        for k in np.nonzero(res <= self.hit_threshold)[0]:
            out[li[k]].append(k)
        resolutions = []
        for hits in out:
            if not hits:
                resolutions.append(None)
                continue
            P, V = pts[hits], res[hits]
            if self.antipodes_coincide:
                P = np.where((clifford_sign(P) < 0)[:, None], -P, P)
            keep = sphere.dedupe(P, V, self.dedupe_angle)
            resolutions.append(ClassResolution([(P[k], float(V[k])) for k in keep]))
        return resolutions

    def resolve_many(self, Ls, strict: bool = False) -> list:
        """Resolve every line; unresolved lines get an empty resolution.

        Lines without a hit are retried once on a grid with four times as
        many cells.  With ``strict`` a remaining miss raises NoClassFound.
        """
        Ls = ln.normalize_line(np.atleast_2d(np.asarray(Ls, float)))
        out = self._resolve_with(Ls, self.cells)
        miss = [i for i, r in enumerate(out) if r is None]
        if miss:
            again = self._resolve_with(Ls[miss], self.cells * 4)
            for i, r in zip(miss, again):
                out[i] = r
        if strict and any(r is None for r in out):
            raise NoClassFound("no class below the hit threshold")
        return [ClassResolution() if r is None else r for r in out]

    def resolve(self, L) -> ClassResolution:
        return self.resolve_many(np.asarray(L, float)[None], strict=True)[0]

    def describe(self) -> dict:
        return {
            "kind": "orbit",
            "profile": self.profile.to_json(),
            "s": float(self.copy.s),
            "t": float(self.copy.t),
            "oriented": self.oriented,
        }


def clifford_sign(P):
    lead = np.take_along_axis(P, np.argmax(np.abs(P) > 1e-12, axis=-1)[..., None], -1)[..., 0]
    return np.sign(lead)


Parallelism = Union[CliffordParallelism, OrbitParallelism]


def resolve(P: Parallelism, L) -> ClassResolution:
    return P.resolve(L)


def class_member_test(P: OrbitParallelism, n, L, omega=None) -> Membership:
    return P.class_member_test(n, L, omega)


def verify_parallelism(
    P: Parallelism, n_samples: int, seed: int = 0, max_witnesses: int = 20, chunk: int = 256, workers=None
) -> ParallelismReport:
    """Resolve uniformly sampled oriented lines; pass iff every multiplicity is 1."""

    def work(rng, start, count):
        Ls = ln.random_lines(rng, count)
        return Ls, P.resolve_many(Ls)

    hist: dict = {}
    witnesses = []
    indices = []
    for Ls, res in map_chunks(work, n_samples, seed, chunk=chunk, workers=workers):
        for L, r in zip(Ls, res):
            hist[r.multiplicity] = hist.get(r.multiplicity, 0) + 1
            if r.multiplicity == 1:
                indices.append(r.hits[0][0])
            elif len(witnesses) < max_witnesses:
                witnesses.append({"line": ln.line_to_json(L), "classes": r.to_json()})
    return ParallelismReport(n_samples, hist, witnesses, np.array(indices).reshape(-1, 3))


def _same_resolution(P, a: ClassResolution, b: ClassResolution, tol) -> bool:
    if a.multiplicity != b.multiplicity or a.multiplicity == 0:
        return False
    used = set()
    for n1, _ in a.hits:
        match = [j for j, (n2, _) in enumerate(b.hits) if j not in used and P.same_class(n1, n2, tol)]
        if not match:
            return False
        used.add(match[0])
    return True


@dataclass
class AutomorphismResult:
    is_automorphism: bool
    checked: int
    witness: dict = None

    def __bool__(self):
        return self.is_automorphism


def is_automorphism(P: Parallelism, g, n_samples: int = 100, seed: int = 0, tol=None) -> AutomorphismResult:
    """Check that ``g`` maps parallel lines to parallel lines.

    Same-class pairs are drawn from random classes; their images must
    resolve to the same classes.
    """
    M = projective_matrix(g)
    rng = np.random.default_rng(seed)
    idx = ln.uniform_sphere(rng, n_samples)
    A = np.empty((n_samples, 6))
    B = np.empty((n_samples, 6))
    for k, n in enumerate(idx):
        A[k], B[k] = P.class_members(n, rng, 2)
    ra = P.resolve_many(ln.transform(M, A))
    rb = P.resolve_many(ln.transform(M, B))
    for k in range(n_samples):
        if not _same_resolution(P, ra[k], rb[k], tol):
            witness = {
                "class": [float(v) for v in idx[k]],
                "lines": [ln.line_to_json(A[k]), ln.line_to_json(B[k])],
                "image_classes": [ra[k].to_json(), rb[k].to_json()],
            }
            return AutomorphismResult(False, k + 1, witness)
    return AutomorphismResult(True, n_samples)


def reduction_map(params: GroupCopyParams):
    """The similarity and translation that reduce ``(s, t)`` to ``(1, t')``.

    Write ``mu = tau_t o d_s`` with ``d_s(x, y, z) = (x, y, s z)`` and
    ``d_s = sigma_s o beta_s^-1``, where ``beta_s(x, y, z) = (s x, s y, z)``
    preserves the complex spread and the central scaling ``sigma_s``
    commutes with the rotations.  Pushing these through
    ``mu^-1 w mu (C)`` gives ``beta_s tau_(-t/s) w tau_(t/s) (C)``, so
    ``beta_s^-1`` carries class ``n`` of the ``(s, t)`` family onto class
    ``n`` of the ``(1, t/s)`` family.
    """
    s, t = params.s, params.t
    if not s > 0:
        raise ValueError("the reduction needs s > 0")
    t2 = t / s
    sigma = affine_matrix(np.eye(3) * s)
    d_s = affine_matrix(np.diag([1.0, 1.0, s]))
    beta = affine_matrix(np.diag([s, s, 1.0]))
    # d_s = sigma_s beta_s^-1, hence beta_s^-1 = sigma_s^-1 d_s
    gamma = np.linalg.solve(sigma, d_s)
    assert np.allclose(gamma, np.linalg.inv(beta))
    return gamma, t2


def equivalence_reduction_check(profile, params: GroupCopyParams, n_samples: int = 1000, seed: int = 0, oriented=True):
    """Check that ``gamma`` maps the ``(s, t)`` family onto the ``(1, t')`` family."""
    gamma, t2 = reduction_map(params)
    src = OrbitParallelism(profile, params, oriented)
    dst = OrbitParallelism(profile, GroupCopyParams(1.0, t2), oriented)
    rng = np.random.default_rng(seed)
    Ls = ln.random_lines(rng, n_samples)
    ra = src.resolve_many(Ls)
    rb = dst.resolve_many(ln.transform(gamma, Ls))
    bad = [k for k in range(n_samples) if not _same_resolution(dst, ra[k], rb[k], None)]
    return {
        "pass": not bad,
        "t_prime": float(t2),
        "gamma": gamma.tolist(),
        "checked": n_samples,
        "mismatches": len(bad),
        "witnesses": [
            {"line": ln.line_to_json(Ls[k]), "source": ra[k].to_json(), "target": rb[k].to_json()} for k in bad[:10]
        ],
    }

"""Rotational spreads: reguli of coaxial one-sheeted hyperboloids.

The axis is the z-axis.  The hyperboloid with waist radius ``r`` has
asymptotic slope ``f(r)`` and is centred at height ``g(r)``; the spread takes
the ruling

    t -> (r cos th - t sin th,  r sin th + t cos th,  g(r) + t f(r))

from each of them, together with the z-axis and the line at infinity of the
horizontal planes.  ``f(r) = c / r`` with ``g = 0`` is the complex spread.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple, Union

import numpy as np
from scipy.interpolate import PchipInterpolator
from scipy.optimize import minimize_scalar

from . import lines as ln
from .sampling import map_chunks

AXIS = np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])
INFINITY = np.array([0.0, 0.0, 0.0, 0.0, 0.0, 1.0])
MEMBER_TOL = 1e-9


class InvalidRadius(ValueError):
    pass


class AxisPoint(ValueError):
    """Point on the axis; it is covered by the axis line alone."""


@dataclass(frozen=True)
class ComplexProfile:
    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")

    def slope(self, r):
        return self.c / np.asarray(r, dtype=float)

    def center(self, r):
        return np.zeros_like(np.asarray(r, dtype=float))

    def to_json(self) -> dict:
        return {"kind": "complex", "c": float(self.c)}


@dataclass(frozen=True, eq=False)
class TabulatedProfile:
    """Sampled slope/center profile.

    ``log f`` and ``g`` are interpolated against ``log r`` with monotone
    cubics.  Outside the grid both follow power laws
    ``f(r) = f(r_end) (r / r_end) ** e`` with exponents
    ``tail_exponents = (f_low, f_high, g_low, g_high)``.
    """

    r: np.ndarray
    f: np.ndarray
    g: np.ndarray
    tail_exponents: tuple = (-1.0, -1.0, 0.0, 0.0)
    _logf: PchipInterpolator = field(init=False, repr=False)
    _g: PchipInterpolator = field(init=False, repr=False)

    def __post_init__(self):
        r = np.asarray(self.r, dtype=float)
        f = np.asarray(self.f, dtype=float)
        g = np.asarray(self.g, dtype=float)
        if r.ndim != 1 or r.size < 4 or f.shape != r.shape or g.shape != r.shape:
            raise ValueError("need at least 4 nodes with matching f and g")
        if np.any(r <= 0) or np.any(np.diff(r) <= 0):
            raise ValueError("r grid must be positive and strictly increasing")
        if np.any(f <= 0):
            raise ValueError("slopes must be positive")
        if len(self.tail_exponents) != 4:
            raise ValueError("tail_exponents takes four numbers")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "tail_exponents", tuple(float(e) for e in self.tail_exponents))
        object.__setattr__(self, "_logf", PchipInterpolator(np.log(r), np.log(f)))
        object.__setattr__(self, "_g", PchipInterpolator(np.log(r), g))

    @classmethod
    def sample(cls, slope, center, r, tail_exponents=(-1.0, -1.0, 0.0, 0.0)):
        r = np.asarray(r, dtype=float)
        return cls(r, slope(r), center(r), tail_exponents)

    def _eval(self, r, interp, lo_val, hi_val, e_lo, e_hi, log):
        r = np.asarray(r, dtype=float)
        x = np.log(r)
        inner = interp(np.clip(x, np.log(self.r[0]), np.log(self.r[-1])))
        if log:
            lo = np.log(lo_val) + e_lo * (x - np.log(self.r[0]))
            hi = np.log(hi_val) + e_hi * (x - np.log(self.r[-1]))
            return np.exp(np.where(r < self.r[0], lo, np.where(r > self.r[-1], hi, inner)))
        lo = lo_val * np.exp(e_lo * (x - np.log(self.r[0])))
        hi = hi_val * np.exp(e_hi * (x - np.log(self.r[-1])))
        return np.where(r < self.r[0], lo, np.where(r > self.r[-1], hi, inner))

    @property
    def breakpoints(self) -> np.ndarray:
        return self.r

    def slope(self, r):
        e = self.tail_exponents
        return self._eval(r, self._logf, self.f[0], self.f[-1], e[0], e[1], True)

    def center(self, r):
        e = self.tail_exponents
        return self._eval(r, self._g, self.g[0], self.g[-1], e[2], e[3], False)

    def to_json(self) -> dict:
        return {
            "kind": "tabulated",
            "r": self.r.tolist(),
            "f": self.f.tolist(),
            "g": self.g.tolist(),
            "tail_exponents": list(self.tail_exponents),
        }


RotationalSpreadProfile = Union[ComplexProfile, TabulatedProfile]


def profile_from_json(obj: dict) -> RotationalSpreadProfile:
    kind = obj.get("kind")
    if kind == "complex":
        return ComplexProfile(float(obj["c"]))
    if kind == "tabulated":
        tails = obj.get("tail_exponents", (-1.0, -1.0, 0.0, 0.0))
        return TabulatedProfile(obj["r"], obj["f"], obj["g"], tuple(tails))
    raise ValueError(f"unknown profile kind {kind!r}")


def parse_profile(text: str) -> RotationalSpreadProfile:
    """Parse the short form ``complex:C``."""
    kind, _, arg = text.partition(":")
    if kind == "complex":
        return ComplexProfile(float(arg) if arg else 1.0)
    raise ValueError(f"cannot parse profile {text!r}; use complex:C or a JSON config")


@dataclass(frozen=True)
class RotationalSpread:
    profile: RotationalSpreadProfile
    oriented: bool = True


# --- lines of the spread --------------------------------------------------


def spread_line(s: RotationalSpread, r: float, theta: float) -> ln.FiniteLine:
    """The ruling at waist radius ``r`` and angle ``theta``, oriented upwards."""
    if not r > 0:
        raise InvalidRadius(f"waist radius must be positive, got {r}")
    f = float(s.profile.slope(r))
    g = float(s.profile.center(r))
    c, sn = np.cos(theta), np.sin(theta)
    return ln.FiniteLine(np.array([r * c, r * sn, g]), np.array([-sn, c, f]))


def spread_pluecker(s: RotationalSpread, r, theta) -> np.ndarray:
    """Vectorized :func:`spread_line` straight to unit Pluecker vectors."""
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    f = s.profile.slope(r)
    g = s.profile.center(r)
    c, sn = np.cos(theta), np.sin(theta)
    d = np.stack([-sn, c, f], axis=-1)
    p = np.stack([r * c, r * sn, g], axis=-1)
    return ln.normalize_line(np.concatenate([d, np.cross(p, d)], axis=-1))


def special_lines(s: RotationalSpread):
    """The axis (pointing up) and the line at infinity of the planes z = const."""
    return (
        ln.FiniteLine(np.zeros(3), np.array([0.0, 0.0, 1.0])),
        ln.LineAtInfinity(np.array([0.0, 0.0, 1.0])),
    )


# --- membership -----------------------------------------------------------


def _dist(P, S, oriented):
    d = np.linalg.norm(P - S, axis=-1)
    if oriented:
        return d
    return np.minimum(d, np.linalg.norm(P + S, axis=-1))


def foot_parameters(P):
    """Waist radius and angle of the ruling a line would have to be.

    These are the distance and polar angle of the foot of the perpendicular
    from the axis to the line's projection onto the xy-plane.  Vertical lines
    project to a point, which then serves as the foot.
    """
    d, p, inf = ln.split_affine(P)
    h = d[..., :2]
    nh = np.linalg.norm(h, axis=-1)
    vertical = nh < 1e-14
    hu = h / np.where(vertical, 1.0, nh)[..., None]
    q = p[..., :2]
    foot = q - np.sum(q * hu, axis=-1)[..., None] * hu
    foot = np.where(vertical[..., None], q, foot)
    r = np.linalg.norm(foot, axis=-1)
    theta = np.arctan2(foot[..., 1], foot[..., 0])
    return r, theta, inf


def membership_residual(s: RotationalSpread, P, oriented=None) -> np.ndarray:
    """Distance from unit line(s) ``P`` to the spread member they would have to be.

    The candidate member is the ruling at :func:`foot_parameters`, or one of
    the two special lines; the Euclidean distance of unit Pluecker vectors is
    used, so wrong ruling family and wrong orientation both show up as large
    residuals.  The value is continuous in the line away from lines meeting
    the axis.
    """
    oriented = s.oriented if oriented is None else oriented
    P = ln.normalize_line(P)
    best = np.minimum(_dist(P, AXIS, oriented), _dist(P, INFINITY, oriented))
    r, theta, inf = foot_parameters(P)
    ok = (~inf) & (r > 0) & np.isfinite(r)
    if np.any(ok):
        S = spread_pluecker(s, r[ok], theta[ok])
        best = np.array(best, copy=True)
        best[ok] = np.minimum(best[ok], _dist(P[ok], S, oriented))
    return best


class Membership(NamedTuple):
    member: bool
    residual: float


def contains(s: RotationalSpread, L, tol: float = MEMBER_TOL) -> Membership:
    """Whether the oriented line ``L`` belongs to the spread.

    In non-oriented mode either orientation of ``L`` counts.
    """
    res = float(membership_residual(s, np.asarray(L, dtype=float)[None])[0])
    return Membership(res <= tol, res)


def is_regular(s: RotationalSpread, tol: float = 1e-9, probe=None) -> bool:
    """Complex-spread test: ``r f(r)`` constant and ``g`` identically zero."""
    r = np.logspace(-3, 3, 241) if probe is None else np.asarray(probe, float)
    rf = r * s.profile.slope(r)
    g = s.profile.center(r)
    return bool(np.ptp(rf) <= tol * np.max(np.abs(rf)) and np.max(np.abs(g)) <= tol)


# --- coverage -------------------------------------------------------------


@dataclass
class Coverage:
    """Spread lines through one point: waist radii, branch signs, root kinds."""

    point: np.ndarray
    roots: list = field(default_factory=list)

    @property
    def count(self) -> int:
        return len(self.roots)

    def to_json(self) -> dict:
        return {
            "point": [float(v) for v in self.point],
            "roots": [{"r": float(r), "sign": int(sg), "kind": k} for r, sg, k in self.roots],
        }


def _relative_grid(nodes: int) -> np.ndarray:
    # r / rho0 on one branch, increasing; sparse down to 1e-250 so that roots
    # close to the axis still sit inside a sign-change bracket
    deep = np.logspace(-250, -10, 24, endpoint=False)
    main = np.logspace(-10, 0, nodes)
    near = 1.0 - np.logspace(-12, -1, 64)[::-1]
    g = np.unique(np.concatenate([deep, main, near[near > main[-2]]]))
    g[-1] = 1.0
    return g


def _h(profile, rho0, z0, r, sign):
    """Height mismatch of the branch-``sign`` ruling at waist ``r`` through the point."""
    t = sign * np.sqrt(np.maximum(rho0 * rho0 - r * r, 0.0))
    return profile.center(r) + t * profile.slope(r) - z0


def _bisect(fun, lo, hi, flo, xtol=1e-12, maxiter=200):
    """Vectorized bisection on brackets ``[lo, hi]`` with ``fun(lo)`` of sign ``flo``."""
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(maxiter):
        wide = hi - lo > xtol * np.maximum(1.0, np.abs(hi))
        if not np.any(wide):
            break
        # geometric midpoint on brackets spanning decades
        geo = (lo > 0) & (hi > 4 * lo)
        mid = np.where(geo, np.sqrt(lo * np.where(geo, hi, 1.0)), 0.5 * (lo + hi))
        fm = fun(mid)
        left = np.sign(fm) == np.sign(flo)
        lo = np.where(wide & left, mid, lo)
        hi = np.where(wide & ~left, mid, hi)
        flo = np.where(wide & left, fm, flo)
    return 0.5 * (lo + hi)


def coverage_counts(s: RotationalSpread, points, nodes: int = 2048, tangent_tol: float = 1e-10):
    """Vectorized :func:`coverage_count` over an ``(m, 3)`` array of points.

    For a point at distance ``rho0`` from the axis and height ``z0`` the
    rulings through it solve ``z0 = g(r) + t f(r)`` with ``t = +-sqrt(rho0^2 -
    r^2)``.  Both branches are laid end to end (they share the node
    ``r = rho0``) and scanned for sign changes on a log-spaced radius grid,
    merged with the nodes of a tabulated profile; brackets are refined by
    bisection.  Interior minima of ``|h|`` without a
    sign change that refine to zero are reported as tangential roots.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    rho0 = np.hypot(points[:, 0], points[:, 1])
    if np.any(rho0 <= 1e-8):
        raise AxisPoint("points on the axis are covered by the axis line")
    z0 = points[:, 2]
    g = _relative_grid(max(nodes // 2, 16))
    extra = getattr(s.profile, "breakpoints", None)
    if extra is None:
        Rh = rho0[:, None] * g[None, :]
    else:
        # tabulated features live at fixed radii; scan those too (clipped copies
        # of rho0 only repeat the junction node)
        rel_extra = np.minimum(np.asarray(extra)[None, :] / rho0[:, None], 1.0)
        g = np.sort(np.concatenate([np.broadcast_to(g, (len(rho0), g.size)), rel_extra], axis=1), axis=1)
        Rh = rho0[:, None] * g
    # unfolded node list: branch -1 from r ~ 0 up to rho0, then branch +1 back down
    ncol = Rh.shape[1]
    sgn = np.concatenate([-np.ones(ncol), np.ones(ncol - 1)])
    g = np.broadcast_to(g, Rh.shape)
    TF = rho0[:, None] * np.sqrt(np.maximum(1.0 - g * g, 0.0)) * s.profile.slope(Rh)
    GZ = s.profile.center(Rh) - z0[:, None]
    H = np.concatenate([GZ - TF, (GZ + TF)[:, -2::-1]], axis=1)
    R = np.concatenate([Rh, Rh[:, -2::-1]], axis=1)
    S = np.sign(H)
    results = [Coverage(points[i]) for i in range(len(points))]

    zi, zk = np.nonzero(S == 0)
    seen = set()
    for i, k in zip(zi, zk):
        at_junction = R[i, k] >= rho0[i]
        key = (i, 0 if at_junction else int(sgn[k]), R[i, k])
        if key not in seen:
            seen.add(key)
            results[i].roots.append((R[i, k], key[1], "simple"))

    bi, bk = np.nonzero(S[:, :-1] * S[:, 1:] < 0)
    if bi.size:
        # a bracket touching the junction takes the branch of its other end
        branch = np.where(R[bi, bk] >= rho0[bi], sgn[bk + 1], sgn[bk])
        lo = np.minimum(R[bi, bk], R[bi, bk + 1])
        hi = np.maximum(R[bi, bk], R[bi, bk + 1])
        rho_b, z_b = rho0[bi], z0[bi]

        def fun(r):
            return _h(s.profile, rho_b, z_b, r, branch)

        roots = _bisect(fun, lo, hi, np.sign(fun(lo)))
        for i, r, b in zip(bi, roots, branch):
            results[i].roots.append((r, int(b), "simple"))

    A = np.abs(H)
    ti, tk = np.nonzero(A[:, 1:-1] <= 1e-3 * (1.0 + np.abs(z0))[:, None])
    tk = tk + 1
    keep = (A[ti, tk] < A[ti, tk - 1]) & (A[ti, tk] <= A[ti, tk + 1]) & (S[ti, tk] != 0)
    keep &= (S[ti, tk - 1] == S[ti, tk]) & (S[ti, tk] == S[ti, tk + 1])
    for i, k in zip(ti[keep], tk[keep]):
        root = _tangent_root(s.profile, rho0[i], z0[i], R[i, k - 1 : k + 2], sgn[k - 1 : k + 2], tangent_tol)
        if root is not None:
            results[i].roots.append(root)
    for c in results:
        c.roots.sort(key=lambda x: (x[1], x[0]))
    return results


def _tangent_root(profile, rho0, z0, r3, s3, tol):
    # parametrize across a possible branch junction by signed angle
    def phi(r, sg):
        return sg * np.arccos(np.clip(r / rho0, -1, 1))

    a, b = phi(r3[0], s3[0]), phi(r3[2], s3[2])
    lo, hi = min(a, b), max(a, b)

    def absh(ph):
        return abs(profile.center(rho0 * np.cos(ph)) + rho0 * np.sin(ph) * profile.slope(rho0 * np.cos(ph)) - z0)

    res = minimize_scalar(absh, bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
    if res.fun <= tol * (1.0 + abs(z0)):
        return (rho0 * np.cos(res.x), int(np.sign(res.x)), "tangent")
    return None


def coverage_count(s: RotationalSpread, point, nodes: int = 2048) -> Coverage:
    return coverage_counts(s, np.asarray(point, dtype=float)[None], nodes)[0]


# --- spread axiom ---------------------------------------------------------


@dataclass
class SpreadReport:
    samples: int
    histogram: dict
    witnesses: list

    @property
    def passed(self) -> bool:
        return set(self.histogram) <= {1}

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "witnesses": self.witnesses,
            "pass": self.passed,
        }


def sample_points(rng: np.random.Generator, n: int) -> np.ndarray:
    """Log-uniform radius in [1e-3, 1e3], uniform angle, Cauchy height scaled by radius."""
    rho = 10.0 ** rng.uniform(-3, 3, n)
    ang = rng.uniform(0, 2 * np.pi, n)
    z = rho * rng.standard_cauchy(n)
    return np.stack([rho * np.cos(ang), rho * np.sin(ang), z], axis=-1)


def verify_spread(
    s: RotationalSpread, n: int, seed: int = 0, max_witnesses: int = 20, chunk: int = 256, workers=None
) -> SpreadReport:
    def work(rng, start, count):
        pts = sample_points(rng, count)
        return coverage_counts(s, pts)

    hist: dict = {}
    witnesses = []
    for covs in map_chunks(work, n, seed, chunk=chunk, workers=workers):
        for c in covs:
            hist[c.count] = hist.get(c.count, 0) + 1
            if c.count != 1 and len(witnesses) < max_witnesses:
                witnesses.append(c.to_json())
    return SpreadReport(n, hist, witnesses)

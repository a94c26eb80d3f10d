"""Search over the unit sphere: icosahedral cells and a batched simplex method."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree


@lru_cache(maxsize=8)
def icosphere(subdivisions: int = 3):
    """Vertices and triangular faces of a subdivided icosahedron.

    ``subdivisions = 3`` gives 1280 faces.
    """
    p = (1 + 5**0.5) / 2
    verts = [
        (-1, p, 0), (1, p, 0), (-1, -p, 0), (1, -p, 0),
        (0, -1, p), (0, 1, p), (0, -1, -p), (0, 1, -p),
        (p, 0, -1), (p, 0, 1), (-p, 0, -1), (-p, 0, 1),
    ]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [np.array(v, float) / np.linalg.norm(v) for v in verts]
    for _ in range(subdivisions):
        cache = {}

        def mid(a, b):
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = verts[a] + verts[b]
                verts.append(m / np.linalg.norm(m))
                cache[key] = len(verts) - 1
            return cache[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    return np.array(verts), np.array(faces)


@lru_cache(maxsize=8)
def cell_grid(cells: int = 1280):
    """Cell centres and vertex-sharing neighbour lists for ``20 * 4**k`` cells."""
    k = int(round(np.log(cells / 20) / np.log(4)))
    if 20 * 4**k != cells:
        raise ValueError("cell count must be 20 * 4**k")
    verts, faces = icosphere(k)
    centres = verts[faces].mean(axis=1)
    centres /= np.linalg.norm(centres, axis=1, keepdims=True)
    by_vertex = [[] for _ in range(len(verts))]
    for fi, f in enumerate(faces):
        for v in f:
            by_vertex[v].append(fi)
    nbrs = [sorted({g for v in f for g in by_vertex[v]} - {fi}) for fi, f in enumerate(faces)]
    width = max(len(n) for n in nbrs)
    table = np.array([n + [n[0]] * (width - len(n)) for n in nbrs])
    spacing = float(np.median(np.arccos(np.clip(np.sum(centres[table[:, 0]] * centres, 1), -1, 1))))
    return centres, table, spacing


def local_minima(values: np.ndarray, table: np.ndarray) -> np.ndarray:
    """Mask of cells no worse than all neighbours; ``values`` is ``(m, cells)``."""
    nb = values[:, table]
    return np.all(values[:, :, None] <= nb, axis=-1)


def tangent_frame(n: np.ndarray):
    n = n / np.linalg.norm(n, axis=-1, keepdims=True)
    helper = np.where(np.abs(n[..., :1]) < 0.9, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
    e1 = np.cross(n, helper)
    e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
    e2 = np.cross(n, e1)
    return n, e1, e2


def nelder_mead_sphere(func, starts, step: float, xtol: float = 1e-11, maxiter: int = 600):
    """Minimize ``func`` near each start point, all problems in lockstep.

    ``func(points, problem_ids)`` evaluates points ``(m, 3)`` on the sphere for
    the given problems.  Each problem runs the standard Nelder-Mead simplex
    moves in the tangent-plane chart ``u -> normalize(c + u1 e1 + u2 e2)`` of
    its start point.  Returns the minimizers and minimum values.
    """
    starts = np.atleast_2d(starts)
    m = len(starts)
    c, e1, e2 = tangent_frame(starts)
    ids_all = np.arange(m)

    def to_sphere(u, ids):
        v = c[ids] + u[:, :1] * e1[ids] + u[:, 1:] * e2[ids]
        return v / np.linalg.norm(v, axis=-1, keepdims=True)

    def ev(u, ids):
        return func(to_sphere(u, ids), ids)

    simplex = np.zeros((m, 3, 2))
    simplex[:, 1, 0] = step
    simplex[:, 2, 1] = step
    fvals = np.stack([ev(simplex[:, j], ids_all) for j in range(3)], axis=1)
    active = np.ones(m, bool)
    for _ in range(maxiter):
        order = np.argsort(fvals, axis=1)
        simplex = np.take_along_axis(simplex, order[:, :, None], 1)
        fvals = np.take_along_axis(fvals, order, 1)
        size = np.max(np.linalg.norm(simplex[:, 1:] - simplex[:, :1], axis=-1), axis=1)
        active &= size > xtol
        ids = np.nonzero(active)[0]
        if ids.size == 0:
            break
        S, F = simplex[ids], fvals[ids]
        centroid = S[:, :2].mean(axis=1)
        worst = S[:, 2]
        xr = centroid + (centroid - worst)
        fr = ev(xr, ids)
        newx, newf = S[:, 2].copy(), F[:, 2].copy()

        better = fr < F[:, 0]
        if np.any(better):
            xe = centroid[better] + 2.0 * (centroid[better] - worst[better])
            fe = ev(xe, ids[better])
            take_e = fe < fr[better]
            newx[better] = np.where(take_e[:, None], xe, xr[better])
            newf[better] = np.where(take_e, fe, fr[better])

        mid = (~better) & (fr < F[:, 1])
        newx[mid], newf[mid] = xr[mid], fr[mid]

        rest = ~(better | mid)
        shrink = np.zeros(len(ids), bool)
        if np.any(rest):
            outside = fr[rest] < F[rest, 2]
            xc = np.where(
                outside[:, None],
                centroid[rest] + 0.5 * (xr[rest] - centroid[rest]),
                centroid[rest] + 0.5 * (worst[rest] - centroid[rest]),
            )
            fc = ev(xc, ids[rest])
            ok = np.where(outside, fc <= fr[rest], fc < F[rest, 2])
            sub = np.nonzero(rest)[0]
            newx[sub[ok]], newf[sub[ok]] = xc[ok], fc[ok]
            shrink[sub[~ok]] = True

        S[:, 2], F[:, 2] = newx, newf
        if np.any(shrink):
            sh = np.nonzero(shrink)[0]
            best = S[sh, :1]
            S[sh, 1:] = best + 0.5 * (S[sh, 1:] - best)
            for j in (1, 2):
                F[sh, j] = ev(S[sh, j], ids[sh])
        simplex[ids], fvals[ids] = S, F

    k = np.argmin(fvals, axis=1)
    ubest = simplex[ids_all, k]
    return to_sphere(ubest, ids_all), fvals[ids_all, k]


def covering_radius(points: np.ndarray, probes: int = 20000, seed: int = 0) -> float:
    """Largest angular distance from a probe direction to the nearest point."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((probes, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    chord, _ = cKDTree(np.asarray(points, float)).query(v)
    return float(2 * np.arcsin(np.clip(chord.max() / 2, 0, 1)))


def dedupe(points: np.ndarray, values: np.ndarray, min_angle: float):
    """Keep the best of each cluster of points closer than ``min_angle``."""
    order = np.argsort(values)
    kept = []
    for i in order:
        p = points[i]
        if all(np.arccos(np.clip(np.dot(p, points[j]), -1, 1)) > min_angle for j in kept):
            kept.append(i)
    return kept

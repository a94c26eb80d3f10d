"""The acceptance battery: every criterion as a function returning a result.

Each check draws its samples from ``numpy`` generators seeded from one base
seed, so a run is reproducible.  ``scale`` shrinks the sample counts for
quick smoke runs; the default of 1 is the full battery.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import clifford as cl
from . import lines as ln
from . import quaternions as qt
from . import spreads as sp
from .parallelism import (
    GroupCopyParams,
    OrbitParallelism,
    equivalence_reduction_check,
    is_automorphism,
    verify_parallelism,
)


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    seconds: float
    limit: float = None
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.passed and (self.limit is None or self.seconds < self.limit)

    def line(self) -> str:
        limit = f" (limit {self.limit:g} s)" if self.limit else ""
        return f"[{'PASS' if self.ok else 'FAIL'}] {self.number:2d}. {self.name}: {self.seconds:.2f} s{limit}"

    def to_json(self, timing: bool = False) -> dict:
        out = {"number": self.number, "name": self.name, "pass": bool(self.passed), "details": self.details}
        if timing:
            out["seconds"] = self.seconds
            out["limit"] = self.limit
        return out


def _n(count, scale):
    return max(1, int(round(count * scale)))


def bad_profile() -> sp.TabulatedProfile:
    """Slope 1/r with a wildly oscillating center; covers many points repeatedly."""
    return sp.TabulatedProfile.sample(lambda r: 1 / r, lambda r: 10 * np.sin(5 * r), np.logspace(-2, 2, 4000))


def regularity_fixtures():
    """Six profiles: three complex, three tabulated non-complex ones."""
    grid = np.logspace(-3, 3, 61)
    return [
        ("complex c=0.5", sp.ComplexProfile(0.5)),
        ("complex c=1", sp.ComplexProfile(1.0)),
        ("complex c=2", sp.ComplexProfile(2.0)),
        ("slope 1/r^2", sp.TabulatedProfile.sample(lambda r: r**-2.0, np.zeros_like, grid, (-2, -2, 0, 0))),
        ("center 0.1", sp.TabulatedProfile.sample(lambda r: 1 / r, lambda r: np.full_like(r, 0.1), grid)),
        ("oscillating center", bad_profile()),
    ]


def algebraic_core(seed=0, scale=1.0):
    rng = np.random.default_rng(seed)
    n = _n(100_000, scale)
    p, q = rng.standard_normal((2, n, 4))
    pq = qt.multiply(p, q)
    norm_res = np.abs(qt.norm(pq) - qt.norm(p) * qt.norm(q)).max()
    anti = np.abs(qt.conjugate(pq) - qt.multiply(qt.conjugate(q), qt.conjugate(p))).max()
    P, Q = rng.standard_normal((2, n, 4))
    quad = ln.quadric_residual(ln.line_through(P, Q)).max()
    passed = norm_res <= 1e-10 and anti <= 1e-12 and quad <= 1e-10
    return passed, {"norm_residual": norm_res, "anti_automorphism_residual": anti, "quadric_residual": quad}


def coordinate_homeomorphism(seed=0, scale=1.0):
    rng = np.random.default_rng(seed + 1)
    n = _n(100_000, scale)
    L = ln.random_lines(rng, n)
    L = ln.normalize_line(L * rng.uniform(0.1, 10, (n, 1)))
    back = np.abs(ln.klein_merge(ln.klein_split(L)) - L).max()
    x, y = ln.uniform_sphere(rng, n), ln.uniform_sphere(rng, n)
    c = ln.klein_split(ln.klein_merge(x, y))
    fwd = max(np.abs(c.x - x).max(), np.abs(c.y - y).max())
    r = ln.klein_split(ln.reverse(L))
    c0 = ln.klein_split(L)
    anti = max(np.abs(r.x + c0.x).max(), np.abs(r.y + c0.y).max())
    passed = back <= 1e-10 and fwd <= 1e-10 and anti <= 1e-12
    return passed, {"merge_split_residual": back, "split_merge_residual": fwd, "reversal_antipode_residual": anti}


def product_action(seed=0, scale=1.0):
    rng = np.random.default_rng(seed + 2)
    n = _n(10_000, scale)
    L = ln.random_lines(rng, n)
    a = qt.random_unit(rng, n)
    before = ln.klein_split(L)
    details = {}
    passed = True
    for side, actor in ((cl.CliffordSide.LEFT, cl.act_left), (cl.CliffordSide.RIGHT, cl.act_right)):
        after = ln.klein_split(actor(a, L))
        k = cl.FIXED_COORD[side]
        fixed = np.abs(after[k] - before[k]).max()
        rot = cl.induced_rotation(side, a)
        moved = np.abs(after[1 - k] - np.einsum("nij,nj->ni", rot, before[1 - k])).max()
        details[side.value] = {"fixed_coordinate": ["x", "y"][k], "fixed_drift": fixed, "rotation_residual": moved}
        passed &= fixed <= 1e-9 and moved <= 1e-9
    details["stored_conjugation"] = {s.value: cl.INDUCED_CONJUGATION[s].tolist() for s in cl.CliffordSide}
    return passed, details


def conjugation_equivalence(seed=0, scale=1.0):
    rng = np.random.default_rng(seed + 3)
    pairs = _n(5_000, scale)
    anchors = ln.uniform_sphere(rng, pairs)
    A = np.empty((pairs, 6))
    B = np.empty((pairs, 6))
    for k, n in enumerate(anchors):
        A[k], B[k] = cl.CliffordClass(cl.CliffordSide.RIGHT, n).members(ln.uniform_sphere(rng, 2))
    la = cl.anchors(cl.conjugation_image(A), cl.CliffordSide.LEFT)
    lb = cl.anchors(cl.conjugation_image(B), cl.CliffordSide.LEFT)
    spread = float(ln.angular_distance(la, lb).max())
    return spread <= 1e-9, {"pairs": pairs, "samples": 2 * pairs, "max_left_anchor_gap": spread}


def spread_axiom(seed=0, scale=1.0):
    n = _n(100_000, scale)
    details = {}
    passed = True
    for c in (0.5, 1.0, 2.0):
        rep = sp.verify_spread(sp.RotationalSpread(sp.ComplexProfile(c)), n, seed=seed)
        details[f"complex c={c:g}"] = rep.to_json()["histogram"]
        passed &= rep.passed
    rep = sp.verify_spread(sp.RotationalSpread(bad_profile()), _n(2_000, scale), seed=seed)
    details["oscillating center"] = rep.to_json()["histogram"]
    details["bad_profile_witness"] = rep.witnesses[:1]
    passed &= (not rep.passed) and bool(rep.witnesses)
    return passed, details


def clifford_recovery(seed=0, scale=1.0):
    rng = np.random.default_rng(seed + 5)
    n = _n(10_000, scale)
    L = ln.random_lines(rng, n)
    fam = OrbitParallelism(sp.ComplexProfile(1.0), GroupCopyParams(1.0, 0.0), True)
    res = fam.resolve_many(L)
    mult = np.array([r.multiplicity for r in res])
    anchors = cl.anchors(L, cl.CliffordSide.RIGHT)
    ok = mult == 1
    idx = np.array([r.hits[0][0] if r.multiplicity == 1 else [np.nan] * 3 for r in res])
    gap = ln.angular_distance(idx[ok], anchors[ok])
    worst = float(gap.max()) if gap.size else np.inf
    passed = bool(ok.all()) and worst <= 1e-4
    return passed, {"lines": n, "multiplicity_not_one": int((~ok).sum()), "max_index_anchor_angle": worst}


def dichotomy(seed=0, scale=1.0):
    rng = np.random.default_rng(seed + 6)
    ordinary = OrbitParallelism(sp.ComplexProfile(1.0), GroupCopyParams(1.0, 1.0), False)
    witness = None
    for _ in range(10):
        L = ln.random_lines(rng, 20)
        for line, r in zip(L, ordinary.resolve_many(L)):
            if r.multiplicity == 2:
                witness = {"line": ln.line_to_json(line), "classes": r.to_json()}
                break
        if witness:
            break
    oriented = OrbitParallelism(sp.ComplexProfile(1.0), GroupCopyParams(1.0, 1.0), True)
    rep = verify_parallelism(oriented, _n(2_000, scale), seed=seed)
    passed = witness is not None and rep.passed and rep.samples >= min(2_000, _n(2_000, scale))
    return passed, {"ordinary_witness": witness, "oriented_report": rep.to_json()}


def invariance(seed=0, scale=1.0):
    rng = np.random.default_rng(seed + 7)
    details = {"clifford": []}
    passed = True
    pairs = _n(1_000, scale)
    for k in range(_n(5, min(scale, 1.0))):
        g = qt.Isometry4.random(rng)
        row = {"left": g.left.tolist(), "right": g.right.tolist()}
        for side in cl.CliffordSide:
            for oriented in (True, False):
                res = is_automorphism(cl.clifford_parallelism(side, oriented), g, pairs, seed=seed + 10 * k)
                row[f"{side.value}{'' if oriented else '-ordinary'}"] = res.is_automorphism
                passed &= res.is_automorphism
        details["clifford"].append(row)
    fam = OrbitParallelism(sp.ComplexProfile(1.0), GroupCopyParams(1.0, 1.0), True)
    b = qt.random_unit(rng)
    res = is_automorphism(fam, qt.Isometry4.right_mult(b), 50, seed=seed)
    details["right_factor_element"] = b.tolist()
    details["right_factor_on_t1_family"] = {"is_automorphism": res.is_automorphism, "witness": res.witness}
    passed &= (not res.is_automorphism) and res.witness is not None
    return passed, details


def scale_reduction(seed=0, scale=1.0):
    details = {}
    passed = True
    for s, t in ((2.0, 0.0), (2.0, 1.0), (0.5, 3.0)):
        out = equivalence_reduction_check(sp.ComplexProfile(1.0), GroupCopyParams(s, t), _n(1_000, scale), seed=seed)
        details[f"s={s:g},t={t:g}"] = {k: out[k] for k in ("pass", "t_prime", "checked", "mismatches")}
        passed &= out["pass"]
    return passed, details


def regularity(seed=0, scale=1.0):
    details = {}
    passed = True
    for name, prof in regularity_fixtures():
        got = sp.is_regular(sp.RotationalSpread(prof))
        details[name] = got
        passed &= got == isinstance(prof, sp.ComplexProfile)
    return passed, details


CRITERIA = [
    (1, "algebraic core", algebraic_core, 5.0),
    (2, "coordinate homeomorphism", coordinate_homeomorphism, None),
    (3, "product action", product_action, 10.0),
    (4, "conjugation equivalence", conjugation_equivalence, None),
    (5, "spread axiom", spread_axiom, 60.0),
    (6, "Clifford recovery", clifford_recovery, None),
    (7, "oriented/ordinary dichotomy", dichotomy, 600.0),
    (8, "automorphism invariance", invariance, None),
    (9, "scale reduction", scale_reduction, None),
    (10, "regularity test", regularity, None),
]


def run_criterion(number: int, seed: int = 0, scale: float = 1.0) -> CriterionResult:
    num, name, fn, limit = CRITERIA[number - 1]
    start = time.perf_counter()
    passed, details = fn(seed, scale)
    return CriterionResult(num, name, bool(passed), time.perf_counter() - start, limit, _plain(details))


def run_suite(seed: int = 0, scale: float = 1.0, only=None, echo=None) -> list:
    out = []
    for num, *_ in CRITERIA:
        if only and num not in only:
            continue
        res = run_criterion(num, seed, scale)
        if echo:
            echo(res.line())
        out.append(res)
    return out


def _plain(obj):
    """Convert numpy scalars and arrays into JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj

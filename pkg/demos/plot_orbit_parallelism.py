"""
Rotating a spread into a parallelism
====================================

Rotating the complex spread about the origin gives one class per direction
``n``.  Squashing and shifting the z-coordinate first gives further
families; oriented they are parallelisms, unoriented they overlap unless the
shift is zero.
"""

# %%
import numpy as np

from pg3par import clifford as cl
from pg3par import lines as ln
from pg3par import parallelism as pp
from pg3par.spreads import ComplexProfile

rng = np.random.default_rng(2)
profile = ComplexProfile(1.0)

# %%
# Without a shift the classes are those of a Clifford parallelism.
P = pp.OrbitParallelism(profile)
L = ln.random_lines(rng, 5)
idx = np.array([r.hits[0][0] for r in P.resolve_many(L)])
print("orbit index vs Clifford anchor:", ln.angular_distance(idx, cl.anchors(L, cl.CliffordSide.RIGHT)).max())

# %%
# With a shift, every oriented line still has one class.
shifted = pp.OrbitParallelism(profile, pp.GroupCopyParams(1.0, 1.0))
print(pp.verify_parallelism(shifted, 200, seed=0).histogram)

# %%
# Forgetting orientation doubles up.
loose = pp.OrbitParallelism(profile, pp.GroupCopyParams(1.0, 1.0), oriented=False)
print(pp.verify_parallelism(loose, 50, seed=0).histogram)

# %%
# The (s, t) family is equivalent to (1, t / s).
out = pp.equivalence_reduction_check(profile, pp.GroupCopyParams(2.0, 1.0), n_samples=100)
print("t' =", out["t_prime"], "mismatches:", out["mismatches"])

"""
Lines as pairs of points on two spheres
=======================================

An oriented line of real projective 3-space, written in unit Pluecker
coordinates, splits into two unit 3-vectors.  Quaternion multiplication on
the left moves one of them and leaves the other alone.
"""

# %%
import numpy as np

from pg3par import clifford as cl
from pg3par import lines as ln
from pg3par import quaternions as qt

rng = np.random.default_rng(0)

# %%
# The z-axis and the horizon line of the planes z = const share one
# coordinate and have opposite values of the other.
axis = ln.affine_to_pluecker(ln.FiniteLine([0, 0, 0], [0, 0, 1]))
horizon = ln.affine_to_pluecker(ln.LineAtInfinity([0, 0, 1]))
for name, L in (("axis", axis), ("horizon", horizon)):
    c = ln.klein_split(L)
    print(f"{name:8s} x={c.x}  y={c.y}")

# %%
# Splitting and merging are inverse to each other.
L = ln.random_lines(rng, 5)
print("round trip error:", np.abs(ln.klein_merge(ln.klein_split(L)) - L).max())

# %%
# Left multiplication by a unit quaternion fixes one coordinate; which one
# is measured when the module loads.
a = qt.random_unit(rng)
before, after = ln.klein_split(L), ln.klein_split(cl.act_left(a, L))
k = cl.FIXED_COORD[cl.CliffordSide.LEFT]
print("fixed coordinate:", "xy"[k], "drift", np.abs(after[k] - before[k]).max())
R = cl.induced_rotation(cl.CliffordSide.LEFT, a)
print("moving coordinate follows R:", np.abs(before[1 - k] @ R.T - after[1 - k]).max())

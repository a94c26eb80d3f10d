"""
Counting rulings through a point
================================

The complex spread takes one ruling from each hyperboloid
``x^2 + y^2 - r^2 z^2 = r^2``.  Every point off the axis lies on exactly one
of them.  A profile with a wiggling centre breaks this.
"""

# %%
import numpy as np

from pg3par import spreads as sp
from pg3par.suite import bad_profile

complex_spread = sp.RotationalSpread(sp.ComplexProfile(1.0))

# %%
# A point on a known ruling gives back its waist radius.
line = sp.spread_line(complex_spread, 0.7, 1.2)
point = line.point + 3.0 * line.direction
print(sp.coverage_count(complex_spread, point).to_json())

# %%
# Sampled check over many points.
rep = sp.verify_spread(complex_spread, 2000, seed=1)
print("complex:", rep.histogram)

# %%
wiggly = sp.RotationalSpread(bad_profile())
rep = sp.verify_spread(wiggly, 2000, seed=1)
print("wiggly:", dict(sorted(rep.histogram.items())))
w = rep.witnesses[0]
print("first witness:", np.round(w["point"], 3), "lies on", len(w["roots"]), "rulings")

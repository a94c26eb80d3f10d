"""Clifford parallelisms, rotational spreads and orbit parallelisms of PG(3,R)."""
from .clifford import (
    ClassResolution,
    CliffordClass,
    CliffordParallelism,
    CliffordSide,
    NoClassFound,
    act_left,
    act_right,
    class_of,
    clifford_parallelism,
    conjugation_image,
)
from .lines import (
    DegenerateLine,
    FiniteLine,
    LineAtInfinity,
    SphereCoords,
    affine_to_pluecker,
    incident,
    klein_merge,
    klein_split,
    line_through,
    pluecker_to_affine,
)
from .parallelism import (
    GroupCopyParams,
    OrbitParallelism,
    equivalence_reduction_check,
    is_automorphism,
    resolve,
    verify_parallelism,
)
from .quaternions import Isometry4, conjugate, multiply, rotation3_of
from .spreads import (
    ComplexProfile,
    RotationalSpread,
    TabulatedProfile,
    contains,
    coverage_count,
    is_regular,
    spread_line,
    verify_spread,
)

__version__ = "0.1.0"

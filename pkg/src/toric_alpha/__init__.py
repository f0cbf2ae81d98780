"""Exact alpha-invariants of smooth toric Fano manifolds."""

from .catalog import catalog, lookup
from .exact import Rat, RatMat, RatVec, vec
from .invariants import (
    AlphaValue,
    NoInvariantSubspace,
    alpha_kG,
    alpha_km,
    alpha_via_orbits,
    c_general,
    c_k_subset,
    glct_kG,
    k_zero,
    lct_monomial,
    stabilization_report,
    star_p_check,
    symmetry_alpha_bound,
)
from .polytope import FanRays, Polytope, anticanonical_polytope
from .symmetry import FiniteGroup, UnimodularMap, automorphism_group, subgroup_closure

__version__ = "0.1.0"

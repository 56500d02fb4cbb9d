"""Exact models of abelian gauge field observables on small spacetime regions.

Regions are described by their cohomology; the observables of a region form
a presymplectic abelian group whose Weyl algebra is built in exact
cyclotomic arithmetic. On top of that sit checks for locality, separation
of configurations, obstructions to quotienting, and a quotient towards a
fixed ambient region.
"""

from __future__ import annotations

from .cech import (
    SimplicialComplex,
    SimplicialMap,
    SpaceModel,
    SpaceMorphism,
    cohomology,
    compact_support_group,
    parse_space,
    pushforward_compact,
)
from .cyclotomic import CyclotomicScalar
from .exact_linear import Matrix, smith_normal_form
from .gauge_model import (
    BundleMorphism,
    BundleObject,
    Configuration,
    build_observable_model,
    hk_quotient,
    induced_observable_morphism,
    locality_check,
    nogo_run,
    separate_configurations,
)
from .presymplectic import MixedGroup, PAGMorphism, PresymplecticGroup, center, quotient, radical
from .scenario import load_scenario, parse_scenario
from .weyl_ccr import WeylElement, ccr_push

__version__ = "0.1.0"

__all__ = [
    "BundleMorphism",
    "BundleObject",
    "Configuration",
    "CyclotomicScalar",
    "Matrix",
    "MixedGroup",
    "PAGMorphism",
    "PresymplecticGroup",
    "SimplicialComplex",
    "SimplicialMap",
    "SpaceModel",
    "SpaceMorphism",
    "WeylElement",
    "build_observable_model",
    "ccr_push",
    "center",
    "cohomology",
    "compact_support_group",
    "hk_quotient",
    "induced_observable_morphism",
    "load_scenario",
    "locality_check",
    "nogo_run",
    "parse_scenario",
    "pushforward_compact",
    "quotient",
    "radical",
    "separate_configurations",
    "smith_normal_form",
]

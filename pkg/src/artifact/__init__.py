"""Exact finite models for deformations of algebroid stacks.

Submodules: scalars, dgla, deligne, hochschild, simplicial, sullivan, gerbe,
fedosov, io, cli.  Everything is exact (rationals, Gaussian rationals and
truncated power series in hbar)."""

from .dgla import DglaPresentation, GradedElement, validate_dgla
from .deligne import gauge_apply, mc_defect
from .hochschild import AlgebraPresentation, HochschildCochain, hochschild_dgla
from .simplicial import Nerve, SimplicialDglaSheaf, cech_complex, totalize
from .gerbe import StackDatum, ChainData, validate_stack, barycentric_reconstruct
from .fedosov import SymplecticModel, WeylElement, fedosov_solve, characteristic_class, rw_form

__version__ = "0.1.0"

__all__ = [
    "DglaPresentation", "GradedElement", "validate_dgla", "gauge_apply", "mc_defect",
    "AlgebraPresentation", "HochschildCochain", "hochschild_dgla", "Nerve",
    "SimplicialDglaSheaf", "cech_complex", "totalize", "StackDatum", "ChainData",
    "validate_stack", "barycentric_reconstruct", "SymplecticModel", "WeylElement",
    "fedosov_solve", "characteristic_class", "rw_form",
]

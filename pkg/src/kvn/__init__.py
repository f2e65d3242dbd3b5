"""Minimal positive extensions into antidual spaces and minimal representable functionals.

Submodules
----------
normed      finite-dimensional normed spaces, antiduals, dual and operator norms
extension   Krein-von Neumann extension of partially defined positive operators
diagonal    diagonal l1 -> l-infinity operators with asymptotic predicates
algebra     Banach *-algebras from structure constants
gns         representability, GNS data and the minimal representable extension
cli         JSON batch front end
"""

from . import algebra, bounds, diagonal, extension, gns, normed, serialize
from .algebra import StarAlgebra, block_algebra, cyclic_group, matrix_algebra, symmetric_group
from .bounds import Interval
from .errors import KvnError, NotExtendable, NotRepresentable, Refusal
from .extension import PartialPositiveOperator, krein_von_neumann
from .gns import IdealFunctional, gns as gns_data, minimal_extension
from .normed import NormedSpace

__version__ = "0.1.0"

__all__ = [
    "algebra", "bounds", "diagonal", "extension", "gns", "normed", "serialize",
    "StarAlgebra", "block_algebra", "cyclic_group", "matrix_algebra", "symmetric_group",
    "Interval", "KvnError", "NotExtendable", "NotRepresentable", "Refusal",
    "PartialPositiveOperator", "krein_von_neumann", "IdealFunctional", "gns_data",
    "minimal_extension", "NormedSpace",
]

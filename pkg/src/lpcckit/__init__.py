"""Exact toolkit for local discrimination of orthogonal multipartite states.

The package builds orthogonal state families, applies local projective
measurements, solves for orthogonality-preserving measurements, verifies
discrimination protocols, and classifies sets by how their hidden
nonlocality can (or cannot) be activated. All core arithmetic is exact
over the Gaussian rationals.
"""

from .exact import Scalar, Vec, Mat, inner, tensor, rank, nullspace, reshape
from .statesets import PartySpec, StateSet, Partition, build_named_set
from .measurements import Projector, PVM, LocalPVM

__all__ = [
    "Scalar", "Vec", "Mat", "inner", "tensor", "rank", "nullspace", "reshape",
    "PartySpec", "StateSet", "Partition", "build_named_set",
    "Projector", "PVM", "LocalPVM",
]

__version__ = "0.1.0"

"""Exact hermitian forms, Witt groups, and the octagon of Witt groups
over small semilocal rings."""

from .rings import make_ring
from .algebras import (
    base_algebra,
    make_matrix_involution,
    make_quadratic_etale,
    make_quaternion,
    tensor_product,
)
from .forms import (
    HermitianForm,
    make_diagonal,
    make_hyperbolic,
)
from .witt import enumerate_witt_group
from .octagon import make_octagon

__all__ = [
    "make_ring",
    "base_algebra",
    "make_quadratic_etale",
    "make_quaternion",
    "make_matrix_involution",
    "tensor_product",
    "HermitianForm",
    "make_diagonal",
    "make_hyperbolic",
    "enumerate_witt_group",
    "make_octagon",
]

__version__ = "0.1.0"

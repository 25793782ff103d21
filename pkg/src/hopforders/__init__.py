"""Exact verification of Hopf orders in twisted group algebras of finite groups."""

from __future__ import annotations

__version__ = "0.1.0"

from .exactnum import CycNumber, root_of_unity  # noqa: E402
from .groups import AbelianSubgroup, CapExceededError, FiniteGroup, GroupError  # noqa: E402
from .algebra import AlgElem, GroupAlgebra, TensorElem  # noqa: E402
from .twisting import Cocycle, Twist, TwistError, build_twist  # noqa: E402
from .orders import Lattice, standard_order, verify_hopf_order  # noqa: E402
from .cocharacters import HypothesisError, uniqueness_pipeline  # noqa: E402
from .instances import InstanceError, InstanceSpec, build_instance  # noqa: E402

__all__ = [
    "__version__", "CycNumber", "root_of_unity", "AbelianSubgroup", "CapExceededError", "FiniteGroup",
    "GroupError", "AlgElem", "GroupAlgebra", "TensorElem", "Cocycle", "Twist", "TwistError",
    "build_twist", "Lattice", "standard_order", "verify_hopf_order", "HypothesisError",
    "uniqueness_pipeline", "InstanceError", "InstanceSpec", "build_instance",
]

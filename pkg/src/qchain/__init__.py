"""q-deformed boson realizations of the U(6) embedding chains."""
from .fock import FockBasis, Operator, build_basis
from .qnum import DeformationParameter, q_number, validate_parameter

__all__ = ["DeformationParameter", "FockBasis", "Operator", "build_basis", "q_number",
           "validate_parameter"]
__version__ = "0.1.0"

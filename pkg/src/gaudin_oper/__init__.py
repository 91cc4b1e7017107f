"""Gaudin Hamiltonians, Bethe Ansatz equations and Miura opers for type A."""

from .bethe import BetheSolution, SolverConfig, bae_jacobian, bae_residual, bethe_vector, solution_weight, solve_bae
from .errors import (
    DegenerateInputError,
    FieldMismatchError,
    GaudinError,
    InputError,
    PoleCollisionError,
    ResourceCapError,
)
from .gaudin import GaudinProblem, gaudin_hamiltonian, joint_spectrum
from .liealg import Weight, classify_weight_at_infinity, type_a_data
from .opers import cartan_connection, miura_oper, miura_sl2, miura_sln, predicted_eigenvalues
from .ratfun import INFINITY, DiffOp, RationalFunction
from .repmod import irreducible_rep, singular_space, tensor_rep

__version__ = "0.1.0"

__all__ = [
    "BetheSolution",
    "DegenerateInputError",
    "DiffOp",
    "FieldMismatchError",
    "GaudinError",
    "GaudinProblem",
    "INFINITY",
    "InputError",
    "PoleCollisionError",
    "RationalFunction",
    "ResourceCapError",
    "SolverConfig",
    "Weight",
    "bae_jacobian",
    "bae_residual",
    "bethe_vector",
    "cartan_connection",
    "classify_weight_at_infinity",
    "gaudin_hamiltonian",
    "irreducible_rep",
    "joint_spectrum",
    "miura_oper",
    "miura_sl2",
    "miura_sln",
    "predicted_eigenvalues",
    "singular_space",
    "solution_weight",
    "solve_bae",
    "tensor_rep",
    "type_a_data",
]

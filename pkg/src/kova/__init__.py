"""Tensor invariants of polynomial vector fields via Kovalevskaya exponents."""

__version__ = "0.1.0"

from .polyalg import Polynomial, VectorField  # noqa: E402
from .tensorfield import TensorField, TensorType, lie_derivative, is_invariant  # noqa: E402
from .grading import Grading, decompose, find_weights  # noqa: E402
from .kovalevskaya import find_balances, kovalevskaya_matrix  # noqa: E402
from .resonance import (Spectrum, admissible_degree_window, enumerate_fixed_point,  # noqa: E402
                        enumerate_semi_qh)
from .invsearch import build_ansatz, full_scan, solve_invariants  # noqa: E402

__all__ = ["Polynomial", "VectorField", "TensorField", "TensorType", "lie_derivative",
           "is_invariant", "Grading", "decompose", "find_weights", "find_balances",
           "kovalevskaya_matrix", "Spectrum", "admissible_degree_window",
           "enumerate_fixed_point", "enumerate_semi_qh", "build_ansatz", "full_scan",
           "solve_invariants", "__version__"]

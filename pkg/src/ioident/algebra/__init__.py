from .gcd import poly_gcd, poly_lcm
from .linalg import DimensionError, bareiss_det, minor, solve_linear
from .modular import UnluckyPrimeError, eval_mod_prime, eval_ratfunc_mod, random_prime
from .poly import OPERATOR_SYMBOL, MultiPoly, PolyRing
from .ratfunc import NonGenericPointError, OperatorPoly, RatFunc

__all__ = [
    "OPERATOR_SYMBOL",
    "DimensionError",
    "MultiPoly",
    "NonGenericPointError",
    "OperatorPoly",
    "PolyRing",
    "RatFunc",
    "UnluckyPrimeError",
    "bareiss_det",
    "eval_mod_prime",
    "eval_ratfunc_mod",
    "minor",
    "poly_gcd",
    "poly_lcm",
    "random_prime",
    "solve_linear",
]

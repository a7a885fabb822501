"""ramacong: exact verification of supercongruences for rational
Ramanujan-type series, coefficient recovery from modular linear systems,
and numeric estimation of the associated L-value constants."""

from .exact import (
    INFINITE_VALUATION,
    PrimePowerModulus,
    Rational,
    Residue,
    balanced_lift,
    crt,
    is_prime,
    kronecker,
    mod_inverse,
    padic_valuation,
    rational_reconstruct,
    reduce_mod,
)
from .series import (
    FourierData,
    NumericResult,
    SeriesSpec,
    SeriesTemplate,
    basis_sums,
    basis_sums_mod,
    partial_sum,
    partial_sum_mod,
    t_factor,
    term,
    value_estimate,
)

__version__ = "0.1.0"

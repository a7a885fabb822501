"""Bernoulli numbers, generalized Bernoulli numbers and mod-p L-residues.

The congruence checks need L_p(chi, m+1) only modulo p, through the
classical congruence with L(chi, 2+m-p); that value in turn is
-B_{n,chi}/n at n = p-m-1, computed exactly from (generalized)
Bernoulli numbers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .exact import PrimePowerModulus, Residue, is_prime, kronecker, reduce_mod

__all__ = [
    "BernoulliTable",
    "bernoulli_table",
    "bernoulli_number",
    "bernoulli_poly_at",
    "generalized_bernoulli",
    "l_at_nonpositive",
    "lp_residue",
]


@dataclass(frozen=True)
class BernoulliTable:
    """Bernoulli numbers B_0..B_nmax with the convention B_1 = -1/2."""

    values: tuple[Fraction, ...]

    def __getitem__(self, n: int) -> Fraction:
        return self.values[n]

    def __len__(self) -> int:
        return len(self.values)


@lru_cache(maxsize=None)
def bernoulli_table(nmax: int) -> BernoulliTable:
    """Exact B_0..B_nmax via the recurrence sum_{k<=n} C(n+1,k) B_k = 0."""
    if nmax < 0:
        raise ValueError(f"nmax must be >= 0, got {nmax}")
    values = [Fraction(1)]
    for n in range(1, nmax + 1):
        if n > 1 and n % 2 == 1:
            values.append(Fraction(0))
            continue
        acc = Fraction(0)
        for k in range(n):
            acc += comb(n + 1, k) * values[k]
        values.append(-acc / (n + 1))
    return BernoulliTable(tuple(values))


def bernoulli_number(n: int) -> Fraction:
    return bernoulli_table(n)[n]


def bernoulli_poly_at(n: int, x) -> Fraction:
    """B_n(x) = sum_k C(n,k) B_k x^(n-k), exact."""
    if n < 0:
        raise ValueError(f"degree must be >= 0, got {n}")
    x = Fraction(x)
    table = bernoulli_table(n)
    acc = Fraction(0)
    for k in range(n + 1):
        acc += comb(n, k) * table[k] * x ** (n - k)
    return acc


def _check_discriminant(D: int) -> None:
    if D != 1 and D % 4 not in (0, 1):
        raise ValueError(f"{D} is not a discriminant (must be 1 or 0,1 mod 4)")


def generalized_bernoulli(n: int, D: int) -> Fraction:
    """Generalized Bernoulli number B_{n,chi} for the Kronecker character
    chi = (D/.) of conductor d = |D|.

    B_{n,chi} = d^(n-1) * sum_{a=1..d} chi(a) B_n(a/d); for D = 1 this is
    the ordinary B_n (plain table, avoiding the sign clash at n = 1).
    """
    if n < 0:
        raise ValueError(f"index must be >= 0, got {n}")
    _check_discriminant(D)
    if D == 1:
        return bernoulli_number(n)
    d = abs(D)
    acc = Fraction(0)
    for a in range(1, d + 1):
        chi = kronecker(D, a)
        if chi:
            acc += chi * bernoulli_poly_at(n, Fraction(a, d))
    return Fraction(d) ** (n - 1) * acc


def l_at_nonpositive(D: int, s: int) -> Fraction:
    """Exact L(chi, s) at an integer s <= 0, via L(chi, 1-n) = -B_{n,chi}/n."""
    if s > 0:
        raise ValueError(f"s must be <= 0, got {s}")
    n = 1 - s
    return -generalized_bernoulli(n, D) / n


def lp_residue(D: int, s: int, p: int) -> Residue:
    """The mod-p residue of the p-adic L-value L_p(chi, s) with s = m+1.

    Uses L_p(chi, m+1) = L(chi, 2+m-p) (mod p); for D = 1 this agrees
    with bernoulli(p-m-1)/(m+1) mod p.  Requires p odd prime, p not
    dividing D, and p >= m+3 so the Bernoulli index p-m-1 is >= 2.
    """
    m = s - 1
    problems = []
    if not is_prime(p):
        problems.append(f"p = {p} is not prime")
    elif p == 2:
        problems.append("p must be odd")
    elif D % p == 0:
        problems.append(f"p = {p} divides the discriminant {D}")
    if p < m + 3:
        problems.append(f"p = {p} < m+3 = {m + 3}")
    if problems:
        raise ValueError(
            "inadmissible prime for L_p congruence: " + "; ".join(problems)
        )
    value = l_at_nonpositive(D, 2 + m - p)
    return reduce_mod(value, PrimePowerModulus(p, 1))

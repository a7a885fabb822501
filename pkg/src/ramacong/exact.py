"""Exact arithmetic substrate: big rationals, residues mod p^e, p-adic tools.

Everything downstream (partial sums, congruence checks, kernel solving)
is built on the primitives in this module.  All values are immutable and
every function is pure, so concurrent use is safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

#: Exact rational scalar used throughout the package.
Rational = Fraction

RationalLike = Union[Fraction, int, str]

__all__ = [
    "Rational",
    "RationalLike",
    "as_rational",
    "INFINITE_VALUATION",
    "NotInvertibleError",
    "InadmissibleDenominatorError",
    "ModulusMismatchError",
    "PrimePowerModulus",
    "Residue",
    "is_prime",
    "primes_in_range",
    "padic_valuation",
    "reduce_mod",
    "mod_inverse",
    "kronecker",
    "balanced_lift",
    "rational_reconstruct",
    "reconstruct_in",
    "crt",
]


class NotInvertibleError(ValueError):
    """Raised when an element has no inverse modulo the given modulus."""


class InadmissibleDenominatorError(ValueError):
    """Raised when reducing a rational whose denominator is divisible by p."""

    def __init__(self, p: int, denominator: int, valuation: int):
        self.p = p
        self.denominator = denominator
        self.valuation = valuation
        super().__init__(
            f"inadmissible denominator: p = {p} divides denominator "
            f"{denominator} with valuation {valuation}"
        )


class ModulusMismatchError(ValueError):
    """Raised on arithmetic between residues with different moduli."""


def as_rational(x: RationalLike) -> Fraction:
    """Coerce an int, Fraction or "num/den" string to an exact Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        # tolerate unicode minus from typeset sources
        return Fraction(x.replace("−", "-").strip())
    raise TypeError(f"cannot interpret {x!r} as a rational")


class _InfiniteValuation:
    """Sentinel for the p-adic valuation of zero.

    Compares strictly above every integer but is deliberately not a
    number: arithmetic with it raises, which turns accidental use into
    a hard failure instead of a silently wrong congruence depth.
    """

    __slots__ = ()
    _instance: Optional["_InfiniteValuation"] = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):  # never smaller than anything
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __repr__(self):
        return "INFINITE_VALUATION"


#: Valuation of zero; treat as +infinity in comparisons.
INFINITE_VALUATION = _InfiniteValuation()

Valuation = Union[int, _InfiniteValuation]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    """Deterministic primality test (Miller-Rabin, exact for n < 3.3e24)."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n == q:
            return True
        if n % q == 0:
            return False
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def primes_in_range(lo: int, hi: int) -> list[int]:
    """All primes p with lo <= p <= hi (inclusive)."""
    return [p for p in range(max(lo, 2), hi + 1) if is_prime(p)]


def _strip_p(n: int, p: int) -> tuple[int, int]:
    """Return (v, u) with n = u * p^v and p not dividing u.  n must be nonzero."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


def padic_valuation(q: RationalLike, p: int) -> Valuation:
    """p-adic valuation of a rational q.

    Returns v_p(numerator) - v_p(denominator), which may be negative.
    For q = 0 returns the INFINITE_VALUATION sentinel.
    """
    if not is_prime(p):
        raise ValueError(f"p = {p} is not prime")
    q = as_rational(q)
    if q == 0:
        return INFINITE_VALUATION
    vn, _ = _strip_p(q.numerator, p)
    vd, _ = _strip_p(q.denominator, p)
    return vn - vd


@dataclass(frozen=True)
class PrimePowerModulus:
    """A prime power p^e used as modulus; p is checked for primality."""

    p: int
    e: int
    modulus: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.e < 1:
            raise ValueError(f"exponent must be >= 1, got {self.e}")
        object.__setattr__(self, "modulus", self.p**self.e)

    def __str__(self):
        return f"{self.p}^{self.e}" if self.e > 1 else str(self.p)

    def residue(self, value: RationalLike) -> "Residue":
        """Reduce an integer or p-admissible rational into this ring."""
        return reduce_mod(as_rational(value), self)


@dataclass(frozen=True)
class Residue:
    """An element of Z/p^e carrying its modulus.

    Arithmetic between residues requires identical moduli; mixing
    moduli is a programming error and raises ModulusMismatchError.
    Integers mix freely.
    """

    value: int
    modulus: PrimePowerModulus

    def __post_init__(self):
        if not 0 <= self.value < self.modulus.modulus:
            object.__setattr__(self, "value", self.value % self.modulus.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise ModulusMismatchError(
                    f"residue moduli differ: {self.modulus} vs {other.modulus}"
                )
            return other.value
        if isinstance(other, int):
            return other
        return NotImplemented

    def __add__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Residue((self.value + v) % self.modulus.modulus, self.modulus)

    __radd__ = __add__

    def __neg__(self):
        return Residue(-self.value % self.modulus.modulus, self.modulus)

    def __sub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Residue((self.value - v) % self.modulus.modulus, self.modulus)

    def __rsub__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Residue((v - self.value) % self.modulus.modulus, self.modulus)

    def __mul__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        return Residue(self.value * v % self.modulus.modulus, self.modulus)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        return Residue(pow(self.value, k, self.modulus.modulus), self.modulus)

    def inverse(self) -> "Residue":
        return Residue(mod_inverse(self.value, self.modulus.modulus), self.modulus)

    def __truediv__(self, other):
        v = self._coerce(other)
        if v is NotImplemented:
            return NotImplemented
        inv = mod_inverse(v, self.modulus.modulus)
        return Residue(self.value * inv % self.modulus.modulus, self.modulus)

    def is_zero(self) -> bool:
        return self.value == 0

    def valuation(self) -> int:
        """v_p of the residue, capped at e (the zero residue reports e)."""
        if self.value == 0:
            return self.modulus.e
        v, _ = _strip_p(self.value, self.modulus.p)
        return v

    def balanced(self) -> int:
        return balanced_lift(self)

    def __str__(self):
        return f"{self.value} (mod {self.modulus})"


def reduce_mod(q: RationalLike, M: PrimePowerModulus) -> Residue:
    """Reduce a rational with p-free denominator into Z/p^e.

    Raises InadmissibleDenominatorError when p divides the denominator.
    """
    q = as_rational(q)
    p, mod = M.p, M.modulus
    if q.denominator % p == 0:
        v, _ = _strip_p(q.denominator, p)
        raise InadmissibleDenominatorError(p, q.denominator, v)
    num = q.numerator % mod
    if q.denominator == 1:
        return Residue(num, M)
    inv = pow(q.denominator, -1, mod)
    return Residue(num * inv % mod, M)


def mod_inverse(a: int, m: int) -> int:
    """Inverse of a modulo m (any integer modulus >= 2); raises if gcd != 1."""
    if m < 2:
        raise ValueError(f"modulus must be >= 2, got {m}")
    g = math.gcd(a, m)
    if g != 1:
        raise NotInvertibleError(f"{a} is not invertible mod {m}: gcd = {g}")
    return pow(a, -1, m)


def kronecker(D: int, n: int) -> int:
    """Full Kronecker symbol (D/n), completely multiplicative in n."""
    if n == 0:
        return 1 if D in (1, -1) else 0
    sign = 1
    if n < 0:
        n = -n
        if D < 0:
            sign = -1
    # factor of 2 in n
    v2, n = _strip_p(n, 2) if n % 2 == 0 else (0, n)
    if v2:
        if D % 2 == 0:
            return 0
        # (D/2) = 1 for D = +-1 mod 8, -1 for D = +-3 mod 8
        if D % 8 in (3, 5):
            sign *= (-1) ** v2
    # Jacobi symbol (D/n) for odd n >= 1
    a = D % n
    t = 1
    while a != 0:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                t = -t
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            t = -t
        a %= n
    if n != 1:
        return 0
    return sign * t


def balanced_lift(r: Residue) -> int:
    """The unique integer x = r (mod p^e) with -p^e/2 < x <= p^e/2."""
    m = r.modulus.modulus
    x = r.value % m
    if 2 * x > m:
        x -= m
    return x


def reconstruct_in(
    value: int, modulus: int, num_bound: int, den_bound: int
) -> Optional[Fraction]:
    """Wang's half-extended-Euclid reconstruction over any modulus.

    Recovers the rational n/d with |n| <= num_bound, 0 < d <= den_bound,
    gcd(d, modulus) = 1 and n/d = value (mod modulus), if one exists.
    The result is unique when 2 * num_bound * den_bound <= modulus,
    which is enforced as a precondition.  Absence is a valid outcome.
    """
    if num_bound < 0 or den_bound < 1:
        raise ValueError("bounds must satisfy num_bound >= 0, den_bound >= 1")
    if 2 * num_bound * den_bound > modulus:
        raise ValueError(
            f"reconstruction bounds too large: "
            f"need 2*{num_bound}*{den_bound} <= {modulus}"
        )
    r0, s0 = modulus, 0
    r1, s1 = value % modulus, 1
    while r1 > num_bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0:
        return None
    n, d = r1, s1
    if d < 0:
        n, d = -n, -d
    if d > den_bound or math.gcd(n, d) != 1 or math.gcd(d, modulus) != 1:
        return None
    return Fraction(n, d)


def rational_reconstruct(
    r: Residue, num_bound: int, den_bound: int
) -> Optional[Fraction]:
    """Recover the small rational congruent to a residue, if one exists."""
    return reconstruct_in(r.value, r.modulus.modulus, num_bound, den_bound)


def crt(pairs: Iterable[tuple[int, int]]) -> tuple[int, int]:
    """Combine residues modulo pairwise-coprime moduli.

    Takes (value, modulus) pairs and returns (x, product) with
    x = value_i (mod modulus_i) for every i and 0 <= x < product.
    """
    pairs = list(pairs)
    if not pairs:
        raise ValueError("crt requires at least one (value, modulus) pair")
    x, m = pairs[0][0] % pairs[0][1], pairs[0][1]
    for value, modulus in pairs[1:]:
        if math.gcd(m, modulus) != 1:
            raise ValueError(
                f"moduli are not pairwise coprime: gcd({m}, {modulus}) > 1"
            )
        # x + m*t = value (mod modulus)
        t = (value - x) * pow(m, -1, modulus) % modulus
        x += m * t
        m *= modulus
    return x % m, m

"""Rational Ramanujan-type series: exact terms, partial sums, modular sums.

A series is determined by an order m, 2m+1 Pochhammer parameters s_i in
(0,1), an argument z0, and polynomial coefficients a_0..a_m:

    R(n) = prod_i (s_i)_n / (1)_n * sum_k a_k n^k * z0^n

Partial sums S(N) = sum_{n<N} R(n) are the objects all congruence checks
are built from.  Every sum here is computed with an incremental
term-ratio recurrence; Pochhammer symbols are never recomputed from
scratch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional, Sequence, Union

import mpmath

from .exact import (
    PrimePowerModulus,
    RationalLike,
    Residue,
    as_rational,
)

__all__ = [
    "FourierData",
    "SeriesSpec",
    "SeriesTemplate",
    "InadmissiblePrimeError",
    "NumericResult",
    "term",
    "partial_sum",
    "partial_sum_mod",
    "basis_sums",
    "basis_sums_mod",
    "t_factor",
    "value_estimate",
]

ComplexRational = tuple[Fraction, Fraction]


class InadmissiblePrimeError(ValueError):
    """Raised when a prime interacts badly with a series' denominators."""

    def __init__(self, p: int, reasons: Sequence[str]):
        self.p = p
        self.reasons = list(reasons)
        super().__init__(f"p = {p} is inadmissible: " + "; ".join(self.reasons))


def _as_complex_rational(x) -> ComplexRational:
    if isinstance(x, tuple) and len(x) == 2:
        return (as_rational(x[0]), as_rational(x[1]))
    return (as_rational(x), Fraction(0))


@dataclass(frozen=True)
class FourierData:
    """Closed-form trig-polynomial coefficients attached to a series.

    alpha and beta are complex rationals stored as (real, imag) pairs;
    both tuples have length m.
    """

    alpha: tuple[ComplexRational, ...]
    beta: tuple[ComplexRational, ...]

    def __post_init__(self):
        object.__setattr__(
            self, "alpha", tuple(_as_complex_rational(x) for x in self.alpha)
        )
        object.__setattr__(
            self, "beta", tuple(_as_complex_rational(x) for x in self.beta)
        )
        if len(self.alpha) != len(self.beta):
            raise ValueError("alpha and beta must have equal length")


def _check_companions(s: Sequence[Fraction]) -> list[str]:
    problems = []
    half = Fraction(1, 2)
    n_half = sum(1 for x in s if x == half)
    if n_half % 2 == 0:
        problems.append(
            f"number of parameters equal to 1/2 must be odd, found {n_half}"
        )
    rest = [x for x in s if x != half]
    for v in set(rest):
        if rest.count(v) != rest.count(1 - v):
            problems.append(
                f"parameter {v} is not matched one-to-one by {1 - v}"
            )
    return problems


@dataclass(frozen=True)
class SeriesSpec:
    """A rational Ramanujan-type series.

    Invariants (checked unless unchecked=True): len(s) = 2m+1 with each
    s_i in (0,1), len(a) = m+1, z0 not in {0,1}, every s_i < 1/2 matched
    by a companion 1-s_i, and an odd number of entries equal to 1/2.
    """

    name: str
    m: int
    s: tuple[Fraction, ...]
    z0: Fraction
    a: tuple[Fraction, ...]
    chi: int
    t0: Optional[Fraction] = None
    fourier: Optional[FourierData] = None
    unchecked: bool = field(default=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(as_rational(x) for x in self.s))
        object.__setattr__(self, "a", tuple(as_rational(x) for x in self.a))
        object.__setattr__(self, "z0", as_rational(self.z0))
        if self.t0 is not None:
            object.__setattr__(self, "t0", as_rational(self.t0))
        if self.unchecked:
            return
        problems = self.validate()
        if problems:
            raise ValueError(
                f"invalid series {self.name!r}: " + "; ".join(problems)
            )

    def validate(self) -> list[str]:
        """Return a list of violated invariants (empty when valid)."""
        problems = []
        if self.m < 1:
            problems.append(f"m must be >= 1, got {self.m}")
        if len(self.s) != 2 * self.m + 1:
            problems.append(
                f"length(s) must be 2m+1 = {2 * self.m + 1}, got {len(self.s)}"
            )
        if len(self.a) != self.m + 1:
            problems.append(
                f"length(a) must be m+1 = {self.m + 1}, got {len(self.a)}"
            )
        for x in self.s:
            if not 0 < x < 1:
                problems.append(f"parameter s = {x} is outside (0,1)")
        if self.z0 in (0, 1):
            problems.append(f"z0 must differ from 0 and 1, got {self.z0}")
        problems.extend(_check_companions(self.s))
        if self.fourier is not None and len(self.fourier.alpha) != self.m:
            problems.append(
                f"fourier data must have m = {self.m} coefficient pairs, "
                f"got {len(self.fourier.alpha)}"
            )
        return problems

    def poly(self, n: Union[int, Fraction]) -> Fraction:
        """The polynomial factor sum_k a_k n^k."""
        acc = Fraction(0)
        for ak in reversed(self.a):
            acc = acc * n + ak
        return acc

    def template(self) -> "SeriesTemplate":
        return SeriesTemplate(self.name, self.m, self.s, self.z0, self.chi)


@dataclass(frozen=True)
class SeriesTemplate:
    """A series with unknown polynomial coefficients (m, s, z0, chi only)."""

    name: str
    m: int
    s: tuple[Fraction, ...]
    z0: Fraction
    chi: int

    def __post_init__(self):
        object.__setattr__(self, "s", tuple(as_rational(x) for x in self.s))
        object.__setattr__(self, "z0", as_rational(self.z0))
        if len(self.s) != 2 * self.m + 1:
            raise ValueError(
                f"length(s) must be 2m+1 = {2 * self.m + 1}, got {len(self.s)}"
            )

    def with_coefficients(
        self, a: Sequence[RationalLike], name: Optional[str] = None
    ) -> SeriesSpec:
        return SeriesSpec(
            name=name or f"{self.name}-completed",
            m=self.m,
            s=self.s,
            z0=self.z0,
            a=tuple(as_rational(x) for x in a),
            chi=self.chi,
        )


def _template_of(spec) -> tuple[int, tuple[Fraction, ...], Fraction]:
    """(m, s, z0) from either a SeriesSpec or a SeriesTemplate."""
    return spec.m, spec.s, spec.z0


def term(spec: SeriesSpec, n: int) -> Fraction:
    """Exact value of the summand R(n)."""
    if n < 0:
        raise ValueError(f"term index must be >= 0, got {n}")
    prod = Fraction(1)
    for j in range(n):
        ratio = Fraction(1)
        for si in spec.s:
            ratio *= si + j
        prod *= ratio / (1 + j) ** len(spec.s)
    return prod * spec.poly(n) * spec.z0**n


def partial_sum(spec: SeriesSpec, N: int) -> Fraction:
    """Exact S(N) = sum_{n<N} R(n), via the term-ratio recurrence."""
    if N < 0:
        raise ValueError(f"partial sum length must be >= 0, got {N}")
    total = Fraction(0)
    coeff = Fraction(1)  # prod_i (s_i)_n / (1)_n * z0^n
    for n in range(N):
        total += coeff * spec.poly(n)
        num = Fraction(1)
        for si in spec.s:
            num *= si + n
        coeff *= spec.z0 * num / (1 + n) ** len(spec.s)
    return total


def partial_sum_prefix(spec: SeriesSpec, N: int) -> list[Fraction]:
    """All of S(0), S(1), ..., S(N) in one incremental pass."""
    sums = [Fraction(0)]
    coeff = Fraction(1)
    for n in range(N):
        sums.append(sums[-1] + coeff * spec.poly(n))
        num = Fraction(1)
        for si in spec.s:
            num *= si + n
        coeff *= spec.z0 * num / (1 + n) ** len(spec.s)
    return sums


def t_factor(spec, nu: int) -> Fraction:
    """T(nu) = z0^nu * prod_i (s_i)_nu / (1)_nu for nu >= 1."""
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    m, s, z0 = _template_of(spec)
    prod = z0**nu
    for j in range(nu):
        ratio = Fraction(1)
        for si in s:
            ratio *= si + j
        prod *= ratio / (1 + j) ** len(s)
    return prod


def basis_sums(template, N: int) -> tuple[Fraction, ...]:
    """The coefficient-basis sums U_0(N), ..., U_m(N).

    U_k(N) = sum_{n<N} prod_i (s_i)_n/(1)_n * n^k * z0^n, so that
    S(N) = sum_k a_k U_k(N) for any completion with coefficients a.
    """
    m, s, z0 = _template_of(template)
    if N < 0:
        raise ValueError(f"partial sum length must be >= 0, got {N}")
    sums = [Fraction(0)] * (m + 1)
    coeff = Fraction(1)
    for n in range(N):
        nk = 1
        for k in range(m + 1):
            sums[k] += coeff * nk
            nk *= n
        num = Fraction(1)
        for si in s:
            num *= si + n
        coeff *= z0 * num / (1 + n) ** len(s)
    return tuple(sums)


def _admissibility_problems(spec, p: int) -> list[str]:
    """Denominator/argument obstructions for streaming reduction mod p."""
    m, s, z0 = _template_of(spec)
    problems = []
    for si in s:
        if si.denominator % p == 0:
            problems.append(f"p divides denominator of parameter s = {si}")
    v = None
    if z0.numerator % p == 0 or z0.denominator % p == 0:
        problems.append(f"p does not avoid z0 = {z0} (v_p(z0) != 0)")
    a = getattr(spec, "a", None)
    if a is not None:
        for ak in a:
            if ak.denominator % p == 0:
                problems.append(f"p divides denominator of coefficient a = {ak}")
    return problems


class _ModularStream:
    """Streaming (unit, exponent) representation of prod (s_i)_n/(1)_n * z0^n.

    Units are kept modulo p^(e+g) with g = 2m+4 guard digits; every power
    of p is factored out of the Pochhammer factors (s_i + n) and (1 + n)
    before modular division, so division by p never happens inside the
    unit arithmetic.
    """

    def __init__(self, spec, M: PrimePowerModulus):
        m, s, z0 = _template_of(spec)
        problems = _admissibility_problems(spec, M.p)
        if problems:
            raise InadmissiblePrimeError(M.p, problems)
        self.p = M.p
        self.e = M.e
        self.guard = 2 * m + 4
        self.work = M.p ** (M.e + self.guard)
        self.s_pairs = [(si.numerator, si.denominator) for si in s]
        self.den_invs = [pow(d, -1, self.work) for _, d in self.s_pairs]
        self.z0_unit = (
            z0.numerator % self.work * pow(z0.denominator, -1, self.work) % self.work
        )
        self.unit = 1
        self.exponent = 0
        self.n = 0

    def step(self):
        """Advance the running product from index n to n+1."""
        p, work = self.p, self.work
        n = self.n
        for (num, den), dinv in zip(self.s_pairs, self.den_invs):
            top = num + n * den
            v = 0
            while top % p == 0:
                top //= p
                v += 1
            self.unit = self.unit * (top % work) % work * dinv % work
            self.exponent += v
        bottom = 1 + n
        v = 0
        while bottom % p == 0:
            bottom //= p
            v += 1
        self.exponent -= v * len(self.s_pairs)
        inv = pow(bottom % work, -(len(self.s_pairs)), work)
        self.unit = self.unit * inv % work
        self.unit = self.unit * self.z0_unit % work
        self.n += 1

    def contribution(self, factor_unit: int, factor_exponent: int, emod: int) -> int:
        """Current coefficient times a (unit, exponent) factor, mod p^e."""
        t = self.exponent + factor_exponent
        if t < 0:
            raise ArithmeticError(
                "negative p-exponent in streaming sum; series term is not "
                f"p-integral at n = {self.n} (p = {self.p})"
            )
        if t >= self.e:
            return 0
        return self.unit * factor_unit % emod * pow(self.p, t, emod) % emod


def partial_sum_mod(spec: SeriesSpec, N: int, M: PrimePowerModulus) -> Residue:
    """S(N) reduced mod p^e, streamed without exact rational arithmetic.

    Agrees with reduce_mod(partial_sum(spec, N), M) whenever p avoids
    every denominator of the series (otherwise InadmissiblePrimeError).
    """
    stream = _ModularStream(spec, M)
    emod = M.modulus
    acc = 0
    for n in range(N):
        poly = spec.poly(n)
        if poly != 0:
            pnum = poly.numerator
            v = 0
            while pnum % M.p == 0:
                pnum //= M.p
                v += 1
            unit = pnum % stream.work * pow(poly.denominator, -1, stream.work)
            acc = (acc + stream.contribution(unit % stream.work, v, emod)) % emod
        stream.step()
    return Residue(acc, M)


def basis_sums_mod(template, N: int, M: PrimePowerModulus) -> tuple[Residue, ...]:
    """U_0(N)..U_m(N) reduced mod p^e, streamed as in partial_sum_mod."""
    m, _, _ = _template_of(template)
    stream = _ModularStream(template, M)
    emod = M.modulus
    acc = [0] * (m + 1)
    for n in range(N):
        if n == 0:
            nunit, nv = 1, 0
        else:
            nv = 0
            nn = n
            while nn % M.p == 0:
                nn //= M.p
                nv += 1
            nunit = nn % stream.work
        # n^k = (nunit^k, k*nv); n = 0 contributes only at k = 0
        for k in range(m + 1):
            if n == 0 and k > 0:
                break
            unit = pow(nunit, k, stream.work)
            acc[k] = (acc[k] + stream.contribution(unit, k * nv, emod)) % emod
        stream.step()
    return tuple(Residue(v, M) for v in acc)


class NumericResult(NamedTuple):
    """A multiprecision value together with an absolute error bound."""

    value: object
    error: object


def _mpq(q: Fraction):
    """Exact Fraction -> mpf at the current working precision."""
    return mpmath.mpf(q.numerator) / q.denominator


def value_estimate(spec: SeriesSpec, precision: int = 50) -> NumericResult:
    """Numeric value of sum R(n) for |z0| < 1, with a geometric tail bound.

    Terms are summed until the bound drops below 10^-precision.  Series
    with |z0| >= 1 require analytic continuation and are rejected.
    """
    if abs(spec.z0) >= 1:
        raise ValueError(
            f"series {spec.name!r} has |z0| = {abs(spec.z0)} >= 1: "
            "requires analytic continuation; out of scope"
        )
    with mpmath.workdps(precision + 10):
        target = mpmath.mpf(10) ** (-precision)
        absz0 = abs(_mpq(spec.z0))
        total = mpmath.mpf(0)
        coeff = Fraction(1)
        n = 0
        while True:
            total += _mpq(coeff * spec.poly(n))
            num = Fraction(1)
            for si in spec.s:
                num *= si + n
            coeff *= spec.z0 * num / (1 + n) ** len(spec.s)
            n += 1
            # For k >= n the term ratio is at most |z0| * poly(k+1)/poly(k):
            # the Pochhammer part of the ratio stays below |z0| and the
            # polynomial part decreases toward 1 once the values settle.
            pn, pn1 = spec.poly(n), spec.poly(n + 1)
            if n >= 4 and pn > 0 and pn1 > 0:
                q = absz0 * _mpq(pn1) / _mpq(pn)
                if q < 1:
                    bound = abs(_mpq(coeff * pn)) / (1 - q)
                    if bound < target:
                        return NumericResult(total, bound)
            if n > 100000:
                raise ArithmeticError("series did not reach the tail bound")

"""Supercongruence verification engines.

Implements the extended Zudilin check S(nu*p) = S(nu) (chi/p) p^m
(mod p^(2m+1)), the extended Zhao check with the L_p term, the p-adic
mate finite-difference structure of the quotients D(nu), and the
multi-prime recovery of the rational factor r with A = r L(chi, m+1).

All congruence arithmetic here is exact rational or residue arithmetic;
no floating point enters this module.  Failures are data, not
exceptions: a failing prime inside a scan is a recorded finding.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .dirichlet import lp_residue
from .exact import (
    INFINITE_VALUATION,
    PrimePowerModulus,
    Residue,
    Valuation,
    as_rational,
    crt,
    is_prime,
    kronecker,
    padic_valuation,
    reconstruct_in,
    reduce_mod,
)
from .series import (
    InadmissiblePrimeError,
    SeriesSpec,
    partial_sum,
    partial_sum_prefix,
    t_factor,
)

__all__ = [
    "Admissibility",
    "CongruenceReport",
    "MateExpansion",
    "MateIdentityError",
    "ScanOutcome",
    "RecoveredRational",
    "admissible",
    "zudilin_check",
    "zudilin_scan",
    "d_value",
    "mate_expansion_check",
    "zhao_check",
    "recover_r",
]

KINDS = ("zudilin", "zhao", "mate")


class MateIdentityError(ArithmeticError):
    """Raised when the D(nu) quotient fails to be p-integral."""

    def __init__(self, message: str, achieved: Valuation):
        self.achieved = achieved
        super().__init__(message)


@dataclass(frozen=True)
class Admissibility:
    """Outcome of prime screening, with one reason per failed rule."""

    ok: bool
    reasons: tuple[str, ...] = ()

    def __bool__(self) -> bool:
        return self.ok


@dataclass
class CongruenceReport:
    """Result of one supercongruence test at a single (p, nu)."""

    series: str
    p: int
    nu: int
    kind: str
    required_valuation: int
    achieved_valuation: Valuation
    passed: bool
    residual: Optional[Residue]
    notes: list[str] = field(default_factory=list)

    def to_record(self) -> dict:
        """Flat JSON-serializable record (infinite valuation -> None)."""
        achieved = self.achieved_valuation
        return {
            "series": self.series,
            "kind": self.kind,
            "p": self.p,
            "nu": self.nu,
            "required_val": self.required_valuation,
            "achieved_val": None if achieved is INFINITE_VALUATION else achieved,
            "pass": self.passed,
            "residual": None if self.residual is None else self.residual.value,
            "notes": list(self.notes),
        }


def admissible(spec, p: int, kind: str = "zudilin") -> Admissibility:
    """Screen a prime for congruence work with the given series.

    A prime is admissible when it is odd, avoids every denominator of
    the s_i and a_k, satisfies v_p(z0) = 0, and does not divide chi.
    Zhao checks additionally need p >= m+3 for the L_p congruence.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown congruence kind {kind!r}")
    reasons = []
    if not is_prime(p):
        reasons.append(f"p = {p} is not prime")
        return Admissibility(False, tuple(reasons))
    if p == 2:
        reasons.append("p must be odd")
    for si in spec.s:
        if si.denominator % p == 0:
            reasons.append(f"p divides denominator of parameter s = {si}")
    z0 = spec.z0
    if z0.numerator % p == 0:
        reasons.append(f"p divides numerator of z0 = {z0}")
    if z0.denominator % p == 0:
        reasons.append(f"p divides denominator of z0 = {z0}")
    a = getattr(spec, "a", None)
    if a is not None:
        for ak in a:
            if ak.denominator % p == 0:
                reasons.append(f"p divides denominator of coefficient a = {ak}")
    if spec.chi % p == 0:
        reasons.append(f"p divides chi = {spec.chi}")
    if kind == "zhao" and p < spec.m + 3:
        reasons.append(f"p = {p} < m+3 = {spec.m + 3} (L_p congruence needs p >= m+3)")
    return Admissibility(not reasons, tuple(reasons))


def _require_admissible(spec, p: int, kind: str) -> None:
    adm = admissible(spec, p, kind)
    if not adm:
        raise InadmissiblePrimeError(p, adm.reasons)


def _zudilin_difference(
    spec: SeriesSpec, p: int, nu: int, sums: Optional[Sequence[Fraction]] = None
) -> Fraction:
    """S(nu*p) - (chi/p) p^m S(nu), exactly."""
    if sums is not None:
        s_nup, s_nu = sums[nu * p], sums[nu]
    else:
        s_nup, s_nu = partial_sum(spec, nu * p), partial_sum(spec, nu)
    return s_nup - kronecker(spec.chi, p) * Fraction(p) ** spec.m * s_nu


def _report(
    spec, p, nu, kind, required, diff, notes=()
) -> CongruenceReport:
    achieved = padic_valuation(diff, p)
    passed = achieved >= required
    residual = None
    if passed:
        residual = reduce_mod(diff / Fraction(p) ** required, PrimePowerModulus(p, 1))
    return CongruenceReport(
        series=spec.name,
        p=p,
        nu=nu,
        kind=kind,
        required_valuation=required,
        achieved_valuation=achieved,
        passed=passed,
        residual=residual,
        notes=list(notes),
    )


def zudilin_check(
    spec: SeriesSpec,
    p: int,
    nu: int,
    _sums: Optional[Sequence[Fraction]] = None,
) -> CongruenceReport:
    """Test S(nu*p) = S(nu) (chi/p) p^m (mod p^(2m+1)) by exact arithmetic.

    The achieved valuation of the difference is computed exactly (the
    zero difference reports the infinite sentinel); the residual is the
    difference divided by p^(2m+1), mod p.
    """
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    _require_admissible(spec, p, "zudilin")
    required = 2 * spec.m + 1
    diff = _zudilin_difference(spec, p, nu, _sums)
    return _report(spec, p, nu, "zudilin", required, diff)


@dataclass
class ScanOutcome:
    """All reports from a prime scan plus the exceptional-prime summary."""

    reports: list[CongruenceReport]
    skipped: list[tuple[int, tuple[str, ...]]]
    failures: list[CongruenceReport]

    @property
    def all_passed(self) -> bool:
        return not self.failures


def zudilin_scan(
    spec: SeriesSpec,
    p_range: Iterable[int],
    nu_set: Iterable[int],
    max_workers: Optional[int] = None,
) -> ScanOutcome:
    """Run zudilin_check over every admissible (p, nu) pair.

    Inadmissible primes are skipped and recorded, not errors.  Failing
    reports are collected as exceptional-prime findings.  Output order
    is deterministic (sorted by p, then nu) regardless of scheduling.
    """
    ps = sorted(set(p_range))
    nus = sorted(set(nu_set))
    if any(nu < 1 for nu in nus):
        raise ValueError("nu values must be >= 1")
    usable: list[int] = []
    skipped: list[tuple[int, tuple[str, ...]]] = []
    for p in ps:
        adm = admissible(spec, p, "zudilin")
        if adm:
            usable.append(p)
        else:
            skipped.append((p, adm.reasons))

    def run_prime(p: int) -> list[CongruenceReport]:
        if not nus:
            return []
        # one incremental pass up to max(nu)*p, then every check is a lookup
        sums = partial_sum_prefix(spec, max(nus) * p)
        return [zudilin_check(spec, p, nu, _sums=sums) for nu in nus]

    reports: list[CongruenceReport] = []
    if usable and nus:
        with concurrent.futures.ThreadPoolExecutor(max_workers=max_workers) as pool:
            for chunk in pool.map(run_prime, usable):
                reports.extend(chunk)
    reports.sort(key=lambda r: (r.p, r.nu))
    failures = [r for r in reports if not r.passed]
    return ScanOutcome(reports=reports, skipped=skipped, failures=failures)


def d_value(spec: SeriesSpec, p: int, nu: int, depth: int) -> Residue:
    """The quotient D(nu) = (S(nu*p) - (chi/p) p^m S(nu)) /
    (T(nu) nu^(2m+1) p^(2m+1)), reduced mod p^depth.

    Requires the Zudilin congruence to hold at (p, nu); otherwise the
    quotient is not p-integral and MateIdentityError is raised.
    """
    if depth < 1:
        raise ValueError(f"depth must be >= 1, got {depth}")
    _require_admissible(spec, p, "zudilin")
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    if nu % p == 0:
        raise ValueError(f"nu = {nu} must not be divisible by p = {p}")
    required = 2 * spec.m + 1
    diff = _zudilin_difference(spec, p, nu)
    if diff == 0:
        return Residue(0, PrimePowerModulus(p, depth))
    quotient = diff / (
        t_factor(spec, nu) * Fraction(nu) ** required * Fraction(p) ** required
    )
    v = padic_valuation(quotient, p)
    if v < 0:
        raise MateIdentityError(
            f"mate identity violated at required order for {spec.name} at "
            f"(p, nu) = ({p}, {nu}): achieved valuation "
            f"{padic_valuation(diff, p)} < required {required}",
            achieved=padic_valuation(diff, p),
        )
    return reduce_mod(quotient, PrimePowerModulus(p, depth))


@dataclass
class MateExpansion:
    """D(1..numax) mod p^depth with forward finite differences.

    finite_differences[j] holds the j-th forward differences of the
    D values; valuations[j] is v_p of the leading entry of row j,
    capped at depth (a zero residue reports depth).  The heuristic
    expansion D(nu) = A_p + B_p nu p + C_p nu^2 p^2 + ... predicts
    v_p(Delta^j D(1)) >= j.
    """

    series: str
    p: int
    depth: int
    d_values: list[Residue]
    finite_differences: list[list[Residue]]
    valuations: list[int]

    def meets_prediction(self, j: int) -> bool:
        """Whether Delta^j D(1) vanishes to order at least min(j, depth)."""
        if j >= len(self.valuations):
            raise ValueError(f"no finite difference of order {j} computed")
        return self.valuations[j] >= min(j, self.depth)

    def to_record(self) -> dict:
        return {
            "series": self.series,
            "kind": "mate",
            "p": self.p,
            "depth": self.depth,
            "d_values": [r.value for r in self.d_values],
            "difference_valuations": list(self.valuations),
            "predicted": [min(j, self.depth) for j in range(len(self.valuations))],
            "pass": all(
                self.meets_prediction(j) for j in range(len(self.valuations))
            ),
        }


def mate_expansion_check(
    spec: SeriesSpec, p: int, numax: int, depth: int
) -> MateExpansion:
    """Compute D(1..numax) mod p^depth and their finite differences.

    numax >= depth+1 is required so the depth-th difference exists;
    depth = 0 returns the trivially passing empty table.  A depth-2
    success with numax = 3 is the three-point relation among S(p),
    S(2p), S(3p) modulo p^(2m+3).
    """
    if depth == 0:
        return MateExpansion(spec.name, p, 0, [], [], [])
    if numax < depth + 1:
        raise ValueError(
            f"numax = {numax} must be >= depth+1 = {depth + 1} so the "
            f"depth-{depth} difference exists"
        )
    d_values = [d_value(spec, p, nu, depth) for nu in range(1, numax + 1)]
    rows = [list(d_values)]
    while len(rows[-1]) > 1:
        prev = rows[-1]
        rows.append([b - a for a, b in zip(prev, prev[1:])])
    valuations = [row[0].valuation() for row in rows]
    return MateExpansion(
        series=spec.name,
        p=p,
        depth=depth,
        d_values=d_values,
        finite_differences=rows,
        valuations=valuations,
    )


def zhao_check(
    spec: SeriesSpec, p: int, nu: int, r: Union[Fraction, int, str]
) -> CongruenceReport:
    """Test S(nu*p) = (chi/p) S(nu) p^m + r T(nu) L_p(chi, m+1) nu^(2m+1)
    p^(2m+1)  (mod p^(2m+2)), with L_p known mod p.

    Equivalent to D(nu) = r * lp_residue(chi, m+1, p) (mod p).  The
    assembled difference is formed with an integer lift of the L_p
    residue, which is exactly the precision the mod p^(2m+2) congruence
    consumes.
    """
    _require_admissible(spec, p, "zhao")
    if nu < 1:
        raise ValueError(f"nu must be >= 1, got {nu}")
    if nu % p == 0:
        raise ValueError(f"nu = {nu} must not be divisible by p = {p}")
    r = as_rational(r)
    if r.denominator % p == 0:
        raise InadmissiblePrimeError(
            p, [f"p divides denominator of r = {r}"]
        )
    m = spec.m
    required = 2 * m + 2
    lam = lp_residue(spec.chi, m + 1, p).value
    diff = _zudilin_difference(spec, p, nu) - (
        r * t_factor(spec, nu) * lam * Fraction(nu) ** (2 * m + 1) * Fraction(p) ** (2 * m + 1)
    )
    notes = [
        f"L-term includes the factor nu^(2m+1) = nu^{2 * m + 1}, matching "
        "the worked congruence examples (the bare general statement omits it)",
        f"L_p({spec.chi}, {m + 1}) used mod p only (integer lift {lam})",
    ]
    return _report(spec, p, nu, "zhao", required, diff, notes)


@dataclass
class RecoveredRational:
    """Result of multi-prime recovery of the rational r."""

    value: Optional[Fraction]
    residues: dict[int, int]
    used: list[int]
    skipped: list[tuple[int, str]]
    crt_value: Optional[int]
    crt_modulus: Optional[int]
    verification: Optional[CongruenceReport]

    @property
    def verified(self) -> bool:
        return self.verification is not None and self.verification.passed


def _next_usable_prime(spec: SeriesSpec, start: int, nu: int) -> Optional[int]:
    """Smallest zhao-admissible prime > start with nonzero L_p residue."""
    p = start + 1
    while p < start + 1000:
        if is_prime(p) and admissible(spec, p, "zhao") and nu % p != 0:
            if lp_residue(spec.chi, spec.m + 1, p).value != 0:
                return p
        p += 1
    return None


def recover_r(
    spec: SeriesSpec,
    primes: Sequence[int],
    nu: int = 1,
    bounds: Optional[tuple[int, int]] = None,
    verify_prime: Optional[int] = None,
) -> RecoveredRational:
    """Recover the rational r with D(nu) = r L_p(chi, m+1) (mod p).

    Per usable prime, r_p = D(nu) / lp_residue (mod p); the residues are
    combined by CRT and rationally reconstructed under the caller's
    (num_bound, den_bound).  The default bounds accept any balanced
    integer lift.  The candidate is then verified with a zhao_check at
    one additional held-out prime (the next admissible prime beyond the
    input list unless verify_prime is given).
    """
    residues: dict[int, int] = {}
    used: list[int] = []
    skipped: list[tuple[int, str]] = []
    for p in primes:
        adm = admissible(spec, p, "zhao")
        if not adm:
            skipped.append((p, "; ".join(adm.reasons)))
            continue
        if nu % p == 0:
            skipped.append((p, f"nu = {nu} is divisible by p"))
            continue
        lam = lp_residue(spec.chi, spec.m + 1, p)
        if lam.value == 0:
            skipped.append((p, "L_p residue is 0 mod p; prime carries no information"))
            continue
        dv = d_value(spec, p, nu, 1)
        residues[p] = (dv / lam).value
        used.append(p)
    if not used:
        return RecoveredRational(None, residues, used, skipped, None, None, None)
    crt_value, crt_modulus = crt([(residues[p], p) for p in used])
    if bounds is None:
        num_bound, den_bound = (crt_modulus - 1) // 2, 1
    else:
        num_bound, den_bound = bounds
    candidate = reconstruct_in(crt_value, crt_modulus, num_bound, den_bound)
    if candidate is None:
        return RecoveredRational(
            None, residues, used, skipped, crt_value, crt_modulus, None
        )
    held_out = verify_prime
    if held_out is None:
        held_out = _next_usable_prime(spec, max(primes), nu)
    verification = None
    if held_out is not None:
        verification = zhao_check(spec, held_out, nu, candidate)
    return RecoveredRational(
        candidate, residues, used, skipped, crt_value, crt_modulus, verification
    )

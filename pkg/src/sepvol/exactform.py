"""Exact constants of the form sign * numerator * pi^k / (product of prime powers).

All closed-form volumes and probabilities are kept in exact factored form and
converted to floating point only on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class UnsupportedDimensionError(ValueError):
    """Dimension outside the set this formula is defined for."""


_primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43]


def first_primes(n: int) -> list[int]:
    """The first n primes, smallest first."""
    while len(_primes) < n:
        c = _primes[-1] + 2
        while any(c % p == 0 for p in _primes if p * p <= c):
            c += 2
        _primes.append(c)
    return _primes[:n]


def primorial(l: int) -> int:
    """Product of the first l primes."""
    if l < 0:
        raise ValueError("primorial index must be nonnegative")
    return math.prod(first_primes(l))


def factorize(n: int) -> dict[int, int]:
    """Prime factorization of n >= 1 by trial division."""
    if n < 1:
        raise ValueError("factorize expects a positive integer")
    out: dict[int, int] = {}
    i = 0
    while n > 1:
        p = first_primes(i + 1)[i]
        if p * p > n:
            out[n] = out.get(n, 0) + 1
            break
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        i += 1
    return out


def _factorial_factors(n: int) -> dict[int, int]:
    # Legendre's formula: exponent of p in n! is sum_k floor(n/p^k)
    out = {}
    for p in first_primes(n):  # generous upper bound on count; filtered below
        if p > n:
            break
        e, q = 0, p
        while q <= n:
            e += n // q
            q *= p
        out[p] = e
    return out


@dataclass(frozen=True)
class ExactValue:
    """sign * numerator * pi^pi_power / prod(p^e for p, e in denominator_factors)."""

    sign: int
    numerator: int
    denominator_factors: dict[int, int]
    pi_power: int

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ValueError("sign must be +1 or -1")
        if self.numerator < 1:
            raise ValueError("numerator must be a positive integer")

    def denominator(self) -> int:
        return math.prod(p**e for p, e in self.denominator_factors.items())

    def to_real(self) -> float:
        return self.sign * float(Fraction(self.numerator, self.denominator())) * math.pi**self.pi_power

    def __mul__(self, other: "ExactValue") -> "ExactValue":
        den = dict(self.denominator_factors)
        for p, e in other.denominator_factors.items():
            den[p] = den.get(p, 0) + e
        return _reduced(self.sign * other.sign, self.numerator * other.numerator,
                        den, self.pi_power + other.pi_power)

    def __truediv__(self, other: "ExactValue") -> "ExactValue":
        inv_num = other.denominator()
        inv_den = factorize(other.numerator)
        den = dict(self.denominator_factors)
        for p, e in inv_den.items():
            den[p] = den.get(p, 0) + e
        return _reduced(self.sign * other.sign, self.numerator * inv_num,
                        den, self.pi_power - other.pi_power)

    def factored_form(self) -> str:
        """Human-readable exact form, e.g. 'pi^15 / (2^18 * 3^3 * 5)'."""
        num_parts = []
        if self.numerator != 1 or (self.pi_power <= 0 and not self.denominator_factors):
            num_parts.append(str(self.numerator))
        if self.pi_power > 0:
            num_parts.append("pi" if self.pi_power == 1 else f"pi^{self.pi_power}")
        den_parts = [f"{p}^{e}" if e > 1 else str(p)
                     for p, e in sorted(self.denominator_factors.items())]
        if self.pi_power < 0:
            k = -self.pi_power
            den_parts.append("pi" if k == 1 else f"pi^{k}")
        s = " * ".join(num_parts) if num_parts else "1"
        if den_parts:
            d = " * ".join(den_parts)
            s = f"{s} / ({d})" if len(den_parts) > 1 else f"{s} / {d}"
        return ("-" if self.sign < 0 else "") + s


def _reduced(sign: int, numerator: int, den: dict[int, int], pi_power: int) -> ExactValue:
    # divide out any denominator prime that still divides the numerator
    out = {}
    for p, e in den.items():
        while e > 0 and numerator % p == 0:
            numerator //= p
            e -= 1
        if e > 0:
            out[p] = e
    return ExactValue(sign, numerator, out, pi_power)


def _from_factor_exponents(net: dict[int, int], pi_power: int) -> ExactValue:
    num = math.prod(p**e for p, e in net.items() if e > 0)
    den = {p: -e for p, e in net.items() if e < 0}
    return ExactValue(1, num, den, pi_power)


def conjectured_separable_volume(m: int) -> ExactValue:
    """pi^k / (primorial of k-1) with k = m(m-1)/2."""
    if m < 2:
        raise UnsupportedDimensionError(f"m={m}: need m >= 2")
    k = m * (m - 1) // 2
    den = {p: 1 for p in first_primes(k - 1)}
    return ExactValue(1, 1, den, k)


def diagonal_volume(n: int) -> ExactValue:
    """pi^(n/2) * prod_{i=1}^{n+1} Gamma(i) / Gamma(n^2 / 2), exactly factored.

    For odd n the half-integer Gamma is expanded via
    Gamma(K + 1/2) = (2K)! sqrt(pi) / (4^K K!) so the result stays rational * pi^int.
    """
    if n < 2:
        raise UnsupportedDimensionError(f"n={n}: need n >= 2")
    net: dict[int, int] = {}
    for i in range(1, n + 2):
        for p, e in _factorial_factors(i - 1).items():
            net[p] = net.get(p, 0) + e
    if n % 2 == 0:
        pi_power = n // 2
        gamma_den = _factorial_factors(n * n // 2 - 1)
    else:
        # Gamma(K+1/2) with K=(n^2-1)/2; its sqrt(pi) cancels half of pi^(n/2)
        K = (n * n - 1) // 2
        pi_power = (n - 1) // 2
        net[2] = net.get(2, 0) + 2 * K  # the 4^K
        for p, e in _factorial_factors(K).items():
            net[p] = net.get(p, 0) + e
        gamma_den = _factorial_factors(2 * K)
    for p, e in gamma_den.items():
        net[p] = net.get(p, 0) - e
    return _from_factor_exponents(net, pi_power)


_HAAR = {
    4: (6, {2: 5, 3: 1}),
    6: (15, {2: 18, 3: 3, 5: 1}),
    8: (28, {2: 37, 3: 7, 5: 3, 7: 1}),
    9: (36, {2: 51, 3: 9, 5: 4, 7: 2}),
}


def truncated_haar_volume(m: int) -> ExactValue:
    """Volume of the truncated Euler-angle coordinate box of SU(m), tabulated."""
    if m not in _HAAR:
        raise UnsupportedDimensionError(f"m={m}: truncated Haar volume known for {sorted(_HAAR)}")
    k, den = _HAAR[m]
    return ExactValue(1, 1, dict(den), k)


def total_volume(m: int) -> ExactValue:
    """V_m = H_m * D_m, the full-state-space volume."""
    return truncated_haar_volume(m) * diagonal_volume(m)


def conjectured_probability(m: int) -> ExactValue:
    """Conjectured separable-volume fraction, supported for m in {4, 6}."""
    if m not in (4, 6):
        raise UnsupportedDimensionError(f"m={m}: conjectured probability known for [4, 6]")
    return conjectured_separable_volume(m) / total_volume(m)


def total_boundary_area(m: int) -> ExactValue:
    """Closed-form total boundary area; known exactly only for m=4."""
    if m != 4:
        raise UnsupportedDimensionError(f"m={m}: exact boundary area known for m=4 only")
    return ExactValue(1, 2 * 71, {3: 3, 5: 1, 7: 1, 13: 1}, 7)

"""Asymptotic expansions of nested tail sums with explicit remainder bounds.

For rational functions ``phi_1, ..., phi_r`` of ``n`` the tail sum

    Z_t(phi_1, ..., phi_r) = sum_{n_1 > ... > n_r > t} phi_1(n_1) ... phi_r(n_r)

satisfies ``Z_t(phi_1..phi_r) = sum_{n > t} phi_r(n) Z_n(phi_1..phi_{r-1})``.
Starting from ``Z_t() = 1`` each step multiplies by the 1/n-expansion of a
factor and sums the power tails ``sum_{n > t} n^{-b}`` by Euler-Maclaurin.
Every object carries a bound ``|R(t)| <= E t^{-q}`` valid for ``t >= t0``, so
the value at ``t = t0`` comes with a rigorous truncation error (up to the
rounding of the bound arithmetic itself, which runs with guard bits).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

import mpmath
from mpmath import mpf

__all__ = ["TailSeries", "factor_series", "tail_series"]

# pi > 3.14159, so (2*pi)^(-2p) < (2*3.14159)^(-2p)
_TWO_PI_LOWER = Fraction(628318, 100000)


@dataclass(frozen=True)
class TailSeries:
    """``sum_b coeffs[b] t^{-b} + R(t)`` with ``|R(t)| <= rem * t^{-q}`` for ``t >= t0``."""

    coeffs: tuple[mpf, ...]
    rem: mpf
    q: int
    t0: int

    @property
    def order(self) -> int:
        for b, c in enumerate(self.coeffs):
            if c:
                return b
        return self.q

    def abs_bound(self) -> tuple[mpf, int]:
        """``(C, s)`` with ``|value(t)| <= C t^{-s}`` for all ``t >= t0``."""
        s = min(self.order, self.q)
        t0 = mpf(self.t0)
        total = sum((abs(c) * t0 ** (s - b) for b, c in enumerate(self.coeffs) if c), mpf(0))
        return total + self.rem * t0 ** (s - self.q), s

    def evaluate(self, t: int) -> tuple[mpf, mpf]:
        """Value at integer ``t >= t0`` and a bound on its truncation error."""
        if t < self.t0:
            raise ValueError("expansion evaluated below its validity range")
        tt = mpf(t)
        value = mpf(0)
        magnitude = mpf(0)
        for b, c in enumerate(self.coeffs):
            if c:
                term = c * tt ** (-b)
                value += term
                magnitude += abs(term)
        err = self.rem * tt ** (-self.q)
        # rounding of the coefficient arithmetic (performed with guard bits)
        err += magnitude * len(self.coeffs) * mpf(2) ** (8 - mpmath.mp.prec)
        return value, err


def _collapse(parts: list[tuple[mpf, int]], q: int, t0: int) -> mpf:
    """Sum of bounds ``E t^{-s}`` (``s >= q``) rewritten as ``E' t^{-q}`` for ``t >= t0``."""
    t0f = mpf(t0)
    total = mpf(0)
    for e, s in parts:
        if e:
            if s < q:
                raise ValueError("remainder exponent below target")
            total += e * t0f ** (q - s)
    return total


def _truncate(coeffs: dict[int, mpf], B: int, parts: list[tuple[mpf, int]], t0: int) -> TailSeries:
    kept = [mpf(0)] * (B + 1)
    t0f = mpf(t0)
    dropped = mpf(0)
    for b, c in coeffs.items():
        if b <= B:
            kept[b] += c
        else:
            dropped += abs(c) * t0f ** (B + 1 - b)
    parts = parts + [(dropped, B + 1)]
    q = min(s for e, s in parts if e) if any(e for e, _ in parts) else B + 1
    return TailSeries(tuple(kept), _collapse(parts, q, t0), q, t0)


@lru_cache(maxsize=4096)
def _factor_coeffs_exact(roots: tuple[tuple[Fraction, int], ...], B: int) -> tuple[tuple[Fraction, ...], int]:
    # prod (n - r)^(-e) = n^(-D) prod (1 - r/n)^(-e)
    D = sum(e for _, e in roots)
    n_terms = max(B - D + 1, 0)
    series = [Fraction(0)] * n_terms
    if n_terms:
        series[0] = Fraction(1)
    for r, e in roots:
        factor = [Fraction(comb(e + j - 1, j)) * r**j for j in range(n_terms)]
        series = [sum(series[i] * factor[j - i] for i in range(j + 1)) for j in range(n_terms)]
    return tuple(series), D


def factor_series(roots: tuple[tuple[Fraction, int], ...], B: int, t0: int) -> TailSeries:
    """1/n-expansion of ``prod (n - r)^(-e)`` up to ``n^{-B}``."""
    series, D = _factor_coeffs_exact(roots, B)
    coeffs = [mpf(0)] * (B + 1)
    for j, c in enumerate(series):
        coeffs[D + j] = mpf(c.numerator) / c.denominator
    # majorant (1 - R/n)^(-D) bounds the discarded coefficients
    R = max((abs(r) for r, _ in roots), default=Fraction(0))
    j0 = len(series)
    rem = mpf(0)
    q = max(B + 1, D)
    if R and D:
        ratio = Fraction(D + j0, j0 + 1) * R / t0
        if ratio >= 1:
            raise ValueError(f"cutoff {t0} too small for pole at |r| = {R}")
        first = Fraction(comb(D + j0 - 1, j0)) * R**j0 / (1 - ratio)
        rem = mpf(first.numerator) / first.denominator
        q = D + j0
    return TailSeries(tuple(coeffs), rem, q, t0)


def multiply(a: TailSeries, b: TailSeries, B: int) -> TailSeries:
    if a.t0 != b.t0:
        raise ValueError("series expanded at different base points")
    t0 = a.t0
    prod: dict[int, mpf] = {}
    nz_b = [(j, cb) for j, cb in enumerate(b.coeffs) if cb]
    for i, ca in enumerate(a.coeffs):
        if not ca:
            continue
        for j, cb in nz_b:
            prod[i + j] = prod.get(i + j, mpf(0)) + ca * cb
    a_abs, a_ord = a.abs_bound()
    b_abs, b_ord = b.abs_bound()
    a_trunc = TailSeries(a.coeffs, mpf(0), a.q, t0).abs_bound()
    b_trunc = TailSeries(b.coeffs, mpf(0), b.q, t0).abs_bound()
    parts = []
    if b.rem:
        parts.append((a_abs * b.rem, a_ord + b.q))
    if a.rem:
        parts.append((b_trunc[0] * a.rem, b_trunc[1] + a.q))
    return _truncate(prod, B, parts, t0)


@lru_cache(maxsize=4096)
def _power_tail_exact(b: int, B: int) -> tuple[tuple[tuple[int, Fraction], ...], int, Fraction]:
    """Euler-Maclaurin for ``sum_{n > t} n^{-b}``: terms, remainder exponent, remainder constant."""
    terms = [(b - 1, Fraction(1, b - 1)), (b, Fraction(-1, 2))]
    p = max(1, (B - b + 1) // 2)
    rising = 1  # (b)_{2j-1}
    for j in range(1, p + 1):
        if j == 1:
            rising = b
        else:
            rising *= (b + 2 * j - 3) * (b + 2 * j - 2)
        num, den = mpmath.bernfrac(2 * j)
        bern = Fraction(int(num), int(den))
        fact = 1
        for i in range(2, 2 * j + 1):
            fact *= i
        terms.append((b + 2 * j - 1, bern / fact * rising))
    rising_2p = 1
    for i in range(2 * p):
        rising_2p *= b + i
    # |R_p| <= 2 zeta(2p) / (2 pi)^(2p) * (b)_{2p} t^{1-b-2p} / (b+2p-1), zeta(2p) <= 2
    const = Fraction(4) * rising_2p / (_TWO_PI_LOWER ** (2 * p) * (b + 2 * p - 1))
    return tuple(terms), b + 2 * p - 1, const


def tail_sum(s: TailSeries, B: int) -> TailSeries:
    """Expansion of ``sum_{n > t} S(n)``."""
    if any(s.coeffs[:2]) or s.q < 2:
        raise ValueError("summand must decay at least like n^-2")
    out: dict[int, mpf] = {}
    parts: list[tuple[mpf, int]] = []
    for b, c in enumerate(s.coeffs):
        if not c:
            continue
        terms, q_h, const = _power_tail_exact(b, B)
        for e, coeff in terms:
            out[e] = out.get(e, mpf(0)) + c * (mpf(coeff.numerator) / coeff.denominator)
        parts.append((abs(c) * mpf(const.numerator) / const.denominator, q_h))
    if s.rem:
        parts.append((s.rem / (s.q - 1), s.q - 1))
    return _truncate(out, B, parts, s.t0)


def tail_series(prefix: tuple, B: int, t0: int) -> TailSeries:
    """Expansion of ``Z_t(prefix)``; ``prefix`` holds root tuples, outermost first."""
    return _tail_series_cached(prefix, B, t0, mpmath.mp.prec)


@lru_cache(maxsize=8192)
def _tail_series_cached(prefix: tuple, B: int, t0: int, prec: int) -> TailSeries:
    if not prefix:
        coeffs = [mpf(0)] * (B + 1)
        coeffs[0] = mpf(1)
        return TailSeries(tuple(coeffs), mpf(0), B + 1, t0)
    inner = _tail_series_cached(prefix[:-1], B, t0, prec)
    phi = factor_series(prefix[-1], B, t0)
    return tail_sum(multiply(phi, inner, B), B)

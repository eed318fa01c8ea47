"""Certified evaluation of nested sums of rational functions.

A nested sum is

    S = sum_{n_1 > n_2 > ... > n_d >= 1} phi_1(n_1) ... phi_d(n_d)

where every ``phi_j(n) = prod_r (n - r)^(-e_r)`` has rational roots ``r``.
The truncated part (all ``n_j <= N``) is computed exactly up to fixed-point
rounding; the remainder is handled by one of three tail modes:

``euler-maclaurin``
    exact splitting ``S = sum_r Z_N(phi_1..phi_r) P_{r+1}(N)`` with the tails
    ``Z_N`` expanded asymptotically (see :mod:`mzvkit.tails`).
``bound-only``
    the truncated value with a rigorous upper bound on the tail.
``richardson``
    ``2 S(2N) - S(N)`` with the bound-only error at ``2N`` plus the size of the
    extrapolation step.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
from mpmath import mpf

from .tails import tail_series

__all__ = [
    "TAIL_MODES",
    "DEFAULT_CUTOFF",
    "Factor",
    "EvalParams",
    "NumValue",
    "nested_sum",
    "truncated_sums",
]

TAIL_MODES = ("euler-maclaurin", "bound-only", "richardson")
DEFAULT_CUTOFF = {"euler-maclaurin": 128, "bound-only": 100_000, "richardson": 100_000}
MAX_CUTOFF = 10**7
GUARD_BITS = 64


@dataclass(frozen=True)
class Factor:
    """``prod (n - r)^(-e)`` stored as sorted ``(r, e)`` pairs."""

    roots: tuple[tuple[Fraction, int], ...]

    @classmethod
    def make(cls, roots: Mapping[Fraction | int, int] | Iterable[tuple[Fraction | int, int]]) -> "Factor":
        items = roots.items() if isinstance(roots, Mapping) else roots
        merged: dict[Fraction, int] = {}
        for r, e in items:
            if e < 0:
                raise ValueError("negative exponent")
            if e:
                key = Fraction(r)
                merged[key] = merged.get(key, 0) + e
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def power(cls, k: int, shift: Fraction | int = 0) -> "Factor":
        return cls.make({shift: k})

    @property
    def degree(self) -> int:
        return sum(e for _, e in self.roots)

    def __call__(self, n: int | Fraction) -> Fraction:
        out = Fraction(1)
        for r, e in self.roots:
            out /= (n - r) ** e
        return out

    def __str__(self) -> str:
        parts = []
        for r, e in self.roots:
            base = "n" if r == 0 else f"(n-{r})" if r > 0 else f"(n+{-r})"
            parts.append(base if e == 1 else f"{base}^{e}")
        return "1/(" + "*".join(parts) + ")" if parts else "1"


@dataclass(frozen=True)
class EvalParams:
    """Precision and truncation settings shared by all evaluators."""

    prec_bits: int = 256
    cutoff_N: int | None = None
    tail_mode: str = "euler-maclaurin"
    adaptive: bool = True

    def __post_init__(self) -> None:
        if self.tail_mode not in TAIL_MODES:
            raise ValueError(f"unknown tail mode {self.tail_mode!r}; choose from {TAIL_MODES}")
        if self.prec_bits < 32:
            raise ValueError("prec_bits must be at least 32")
        if self.cutoff_N is not None and self.cutoff_N < 8:
            raise ValueError("cutoff_N must be at least 8")

    @property
    def N(self) -> int:
        return self.cutoff_N if self.cutoff_N is not None else DEFAULT_CUTOFF[self.tail_mode]

    def with_cutoff(self, N: int) -> "EvalParams":
        return replace(self, cutoff_N=N)

    def to_json(self) -> dict:
        return {"prec_bits": self.prec_bits, "cutoff_N": self.N, "tail_mode": self.tail_mode}


def _ulp(x: mpf, prec: int) -> mpf:
    return abs(x) * mpf(2) ** (1 - prec)


@dataclass(frozen=True)
class NumValue:
    """A real number with a rigorous absolute error bound ``err``."""

    value: mpf
    err: mpf
    prec: int = 256

    @classmethod
    def exact(cls, x, prec: int = 256) -> "NumValue":
        with mpmath.workprec(prec):
            if isinstance(x, Fraction):
                v = mpf(x.numerator) / x.denominator
            else:
                v = mpf(x)
            err = mpf(0) if isinstance(x, int) else _ulp(v, prec)
            return cls(v, err, prec)

    def _join(self, other: "NumValue") -> int:
        return min(self.prec, other.prec)

    def __add__(self, other: "NumValue") -> "NumValue":
        if not isinstance(other, NumValue):
            return NotImplemented
        p = self._join(other)
        with mpmath.workprec(p):
            v = self.value + other.value
            return NumValue(v, self.err + other.err + _ulp(v, p), p)

    def __neg__(self) -> "NumValue":
        return NumValue(-self.value, self.err, self.prec)

    def __sub__(self, other: "NumValue") -> "NumValue":
        if not isinstance(other, NumValue):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other: "NumValue") -> "NumValue":
        if not isinstance(other, NumValue):
            return NotImplemented
        p = self._join(other)
        with mpmath.workprec(p):
            v = self.value * other.value
            err = abs(self.value) * other.err + abs(other.value) * self.err + self.err * other.err
            return NumValue(v, err + _ulp(v, p), p)

    def scale(self, c: Fraction | int) -> "NumValue":
        c = Fraction(c)
        if c == 0:
            return NumValue(mpf(0), mpf(0), self.prec)
        with mpmath.workprec(self.prec):
            cf = mpf(c.numerator) / c.denominator
            v = self.value * cf
            return NumValue(v, abs(cf) * self.err + 2 * _ulp(v, self.prec), self.prec)

    def close_to(self, other: "NumValue", tol: float | mpf) -> bool:
        """``|a - b| <= tol + err_a + err_b``."""
        p = self._join(other)
        with mpmath.workprec(p):
            return abs(self.value - other.value) <= mpf(tol) + self.err + other.err

    def __float__(self) -> float:
        return float(self.value)

    def to_json(self) -> dict:
        with mpmath.workprec(self.prec):
            digits = max(15, int(self.prec * 0.30103))
            return {
                "value": mpmath.nstr(self.value, digits),
                "err": mpmath.nstr(self.err, 3),
                "prec_bits": self.prec,
            }

    def __str__(self) -> str:
        with mpmath.workprec(self.prec):
            digits = _digits_for(self.err, self.prec)
            return f"{mpmath.nstr(self.value, digits)} +/- {mpmath.nstr(self.err, 3)}"


def _digits_for(err: mpf, prec: int) -> int:
    cap = max(15, int(prec * 0.30103))
    if err <= 0:
        return cap
    return max(5, min(cap, int(-mpmath.log10(err)) + 2))


# ---------------------------------------------------------------------------
# validation


def _check_poles(factors: Sequence[Factor], N: int) -> None:
    d = len(factors)
    if d == 0:
        raise ValueError("nested sum needs at least one factor")
    if factors[0].degree < 2:
        raise ValueError("outermost factor must decay at least like n^-2")
    for j, phi in enumerate(factors):
        if phi.degree < 1:
            raise ValueError("every factor must decay at least like n^-1")
        lowest = d - j  # smallest value taken by the j-th summation variable
        for r, _ in phi.roots:
            if r.denominator == 1 and r >= lowest:
                raise ValueError(f"pole: factor {phi} vanishes at n = {r} inside the summation range")
            if r > 0 and 2 * r >= N:
                raise ValueError(f"cutoff {N} too small for a pole at {r}; need N > 2r")


# ---------------------------------------------------------------------------
# truncated sums


@dataclass
class _Truncation:
    """Fixed-point snapshot of ``P_j(N)``, ``j = 0..d`` with ``P_d = 1``."""

    N: int
    values: list[mpf]
    errors: list[mpf]


def truncated_sums(factors: Sequence[Factor], checkpoints: Sequence[int], prec_bits: int) -> list[_Truncation]:
    """``P_j(N) = sum_{N >= n_j > ... > n_d >= 1} prod_{i >= j} phi_i(n_i)`` at each checkpoint.

    The arithmetic runs on Python integers scaled by ``2^p``; the returned
    error bounds cover all rounding.
    """
    d = len(factors)
    p = prec_bits + GUARD_BITS
    one = 1 << p
    data = []
    for phi in factors:
        num = 1
        lin = []
        for r, e in phi.roots:
            num *= r.denominator**e
            lin.append((r.denominator, r.numerator, e))
        data.append((num << p, lin))
    Q = [0] * d + [one]
    A = [0] * d
    checkset = sorted(set(checkpoints))
    out: list[_Truncation] = []
    ci = 0
    n_max = checkset[-1]
    for n in range(1, n_max + 1):
        for j in range(d):
            if n < d - j:
                continue
            scaled_num, lin = data[j]
            den = 1
            for q, a, e in lin:
                den *= (q * n - a) ** e
            phi_hat = scaled_num // den
            Q[j] += (phi_hat * Q[j + 1]) >> p
            A[j] += abs(phi_hat)
        if n == checkset[ci]:
            out.append(_snapshot(Q, A, n, p, prec_bits))
            ci += 1
    return out


def _snapshot(Q: list[int], A: list[int], n: int, p: int, prec_bits: int) -> _Truncation:
    d = len(A)
    with mpmath.workprec(prec_bits + GUARD_BITS):
        u = mpf(2) ** (-p)
        values = [mpf(q) * u for q in Q]
        errors = [mpf(0)] * (d + 1)
        bound = mpf(1)  # bound on |P_{j+1}| including its error
        for j in range(d - 1, -1, -1):
            a_j = mpf(A[j]) * u + n * u
            errors[j] = a_j * errors[j + 1] + n * u * (bound + errors[j + 1] + 1)
            errors[j] = 2 * errors[j]
            bound = a_j * bound + errors[j]
    return _Truncation(n, values, errors)


# ---------------------------------------------------------------------------
# tail bounds (bound-only and richardson)


def _tail_bound(factors: Sequence[Factor], N: int, r: int) -> mpf:
    """Upper bound for ``Z_N(phi_1..phi_r)``, the sum over ``n_1 > ... > n_r > N``.

    Each ``|phi_j(n)| <= C_j n^{-s_j}`` for ``n > N``.  Summing from the
    outermost variable inwards with ``sum_{n > t} n^{-s} <= t^{1-s}/(s-1)``
    and ``sigma_j = s_1 + ... + s_j`` gives
    ``prod C_j * N^{r - sigma_r} / prod_j (sigma_j - j)``.
    """
    if r == 0:
        return mpf(1)
    const = mpf(1)
    sigma = 0
    for j, phi in enumerate(factors[:r], start=1):
        for root, e in phi.roots:
            if root > 0:
                ratio = Fraction(N + 1, 1) / (N + 1 - root)
                const *= (mpf(ratio.numerator) / ratio.denominator) ** e
        sigma += phi.degree
        if sigma - j <= 0:
            raise ValueError("tail sum diverges")
        const /= sigma - j
    return const * mpf(N) ** (r - sigma)


def _split_error(factors: Sequence[Factor], trunc: _Truncation) -> tuple[mpf, mpf]:
    d = len(factors)
    err = trunc.errors[0]
    for r in range(1, d + 1):
        err += (abs(trunc.values[r]) + trunc.errors[r]) * _tail_bound(factors, trunc.N, r)
    return trunc.values[0], err


# ---------------------------------------------------------------------------
# public entry point


def _em_order(prec_bits: int, N: int, depth: int) -> int:
    return math.ceil((prec_bits + 16) * math.log(2) / math.log(N)) + 2 * depth + 4


def _evaluate_once(factors: tuple[Factor, ...], params: EvalParams, N: int) -> NumValue:
    prec = params.prec_bits
    mode = params.tail_mode
    _check_poles(factors, N)
    work = prec + GUARD_BITS
    with mpmath.workprec(work):
        if mode == "bound-only":
            (trunc,) = truncated_sums(factors, [N], prec)
            value, err = _split_error(factors, trunc)
        elif mode == "richardson":
            t1, t2 = truncated_sums(factors, [N, 2 * N], prec)
            v1, _ = t1.values[0], t1.errors[0]
            v2, e2 = _split_error(factors, t2)
            value = 2 * v2 - v1
            err = e2 + abs(value - v2) + t1.errors[0]
        else:
            d = len(factors)
            (trunc,) = truncated_sums(factors, [N], prec)
            B = _em_order(prec, N, d)
            value = trunc.values[0]
            err = trunc.errors[0]
            roots = tuple(phi.roots for phi in factors)
            for r in range(1, d + 1):
                z, z_err = tail_series(roots[:r], B, N).evaluate(N)
                p_val, p_err = trunc.values[r], trunc.errors[r]
                value += z * p_val
                err += abs(z) * p_err + abs(p_val) * z_err + z_err * p_err
        err += _ulp(value, prec)
    with mpmath.workprec(prec):
        return NumValue(+value, mpmath.mpf(err), prec)


def nested_sum(
    factors: Sequence[Factor],
    params: EvalParams | None = None,
    tol: float | None = None,
) -> NumValue:
    """Evaluate the nested sum with a certified error bound.

    With ``tol`` given and ``params.adaptive`` set, the cutoff grows tenfold
    (up to ``10^7``) until ``err <= tol / 4``.
    """
    return _nested_sum_cached(tuple(factors), params or EvalParams(), tol)


@lru_cache(maxsize=65536)
def _nested_sum_cached(factors: tuple[Factor, ...], params: EvalParams, tol: float | None) -> NumValue:
    N = params.N
    result = _evaluate_once(factors, params, N)
    if tol is None or not params.adaptive:
        return result
    while result.err > mpf(tol) / 4 and N * 10 <= MAX_CUTOFF:
        if params.tail_mode == "euler-maclaurin" and N >= 10**4:
            break
        N *= 10
        candidate = _evaluate_once(factors, params, N)
        if candidate.err < result.err:
            result = candidate
    return result

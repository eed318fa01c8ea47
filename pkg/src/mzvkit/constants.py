"""Reference constants computed independently of the nested-sum engine.

These exist only as oracles: ``pi`` comes from Machin's formula in integer
arithmetic, so ``pi^2/6`` and ``pi^4/90`` can be compared against the
evaluator without sharing any code path with it.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from mpmath import mpf

from .nested import NumValue

__all__ = ["machin_pi", "zeta2_closed_form", "zeta4_closed_form"]


def _arctan_inv(x: int, one: int) -> tuple[int, int]:
    """``one * arctan(1/x)`` by the alternating series; returns (value, terms used)."""
    total = 0
    power = one // x
    x2 = x * x
    k = 0
    while power:
        term = power // (2 * k + 1)
        total += -term if k % 2 else term
        power //= x2
        k += 1
    return total, k


def machin_pi(prec_bits: int = 256) -> NumValue:
    """``pi = 16 arctan(1/5) - 4 arctan(1/239)`` with a rigorous error bound."""
    guard = 32
    bits = prec_bits + guard
    one = 1 << bits
    a, na = _arctan_inv(5, one)
    b, nb = _arctan_inv(239, one)
    scaled = 16 * a - 4 * b
    # each floor loses < 2 units; the first omitted term is < 1 unit
    units = 16 * (2 * na + 2) + 4 * (2 * nb + 2)
    with mpmath.workprec(bits):
        value = mpf(scaled) / one
        err = mpf(units) / one
    with mpmath.workprec(prec_bits):
        return NumValue(+value, err + abs(value) * mpf(2) ** (1 - prec_bits), prec_bits)


def zeta2_closed_form(prec_bits: int = 256) -> NumValue:
    pi = machin_pi(prec_bits + 16)
    return (pi * pi).scale(Fraction(1, 6))


def zeta4_closed_form(prec_bits: int = 256) -> NumValue:
    pi = machin_pi(prec_bits + 16)
    sq = pi * pi
    return (sq * sq).scale(Fraction(1, 90))


"""Multiple zeta values and their linear extension to the harmonic algebra."""

from __future__ import annotations

from typing import Sequence

from mpmath import mpf

from .algebra import HPoly, Word, derivation_Dn, is_admissible
from .indices import NotAdmissibleError, _check_index, index_to_word, word_to_index
from .nested import EvalParams, Factor, NumValue, nested_sum

__all__ = ["eval_mzv", "eval_zeta_tilde", "eval_dn_image", "dn_image_poly"]


def eval_mzv(k: Sequence[int], p: EvalParams | None = None, tol: float | None = None) -> NumValue:
    """``zeta(k1, ..., km) = sum_{n1 > ... > nm > 0} n1^-k1 ... nm^-km``."""
    k = _check_index(k)
    return nested_sum([Factor.power(part) for part in k], p, tol)


def eval_zeta_tilde(poly: HPoly | Word | str, p: EvalParams | None = None, tol: float | None = None) -> NumValue:
    """Extend ``zeta`` linearly: ``sum coeff * zeta(word_to_index(word))``."""
    p = p or EvalParams()
    if isinstance(poly, (Word, str)):
        poly = HPoly.word(poly)
    if not is_admissible(poly):
        raise NotAdmissibleError(f"{poly} is not admissible")
    total = NumValue(mpf(0), mpf(0), p.prec_bits)
    for w, c in poly.items():
        total = total + eval_mzv(word_to_index(w), p, tol).scale(c)
    return total


def eval_dn_image(k: Sequence[int], n: int, p: EvalParams | None = None, tol: float | None = None) -> NumValue:
    """``sum_i zeta(k1, ..., ki + n, ..., km)``."""
    k = _check_index(k)
    if n < 1:
        raise ValueError("n must be a positive integer")
    p = p or EvalParams()
    total = NumValue(mpf(0), mpf(0), p.prec_bits)
    for i in range(len(k)):
        shifted = k[:i] + (k[i] + n,) + k[i + 1 :]
        total = total + eval_mzv(shifted, p, tol)
    return total


def dn_image_poly(k: Sequence[int], n: int) -> HPoly:
    """``D_n`` applied to the word of ``k``; the algebraic side of :func:`eval_dn_image`."""
    return derivation_Dn(n, HPoly.word(index_to_word(k)))

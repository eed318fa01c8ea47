"""Multiple zeta values, the harmonic algebra, and Ohno's relation.

The package is organised in layers:

- :mod:`mzvkit.algebra` exact words and polynomials in ``Q<x, y>`` with the
  harmonic product, the anti-involution ``tau`` and the derivations ``D_n``;
- :mod:`mzvkit.indices` index bookkeeping, duality and Ohno shifts;
- :mod:`mzvkit.nested`, :mod:`mzvkit.tails`, :mod:`mzvkit.mzv` certified
  evaluation of nested sums and multiple zeta values;
- :mod:`mzvkit.genfun` generating functions and their relations;
- :mod:`mzvkit.sweep`, :mod:`mzvkit.cli` batch verification and the CLI.
"""

from __future__ import annotations

from .algebra import HPoly, LambdaPoly, Word, derivation_Dn, format_hpoly, is_admissible, parse_hpoly, sigma_exp, sigma_subst, stuffle, tau
from .genfun import (
    BracketSpec,
    RelationReport,
    check_fg,
    check_lemma33,
    check_ohno,
    check_thm31,
    eval_bracket,
    eval_f,
    eval_g,
    ohno_sum_value,
    residue_profile,
    taylor_vs_ohno,
)
from .indices import BiSeq, dual_index, index_to_word, ohno_compositions, word_to_index
from .mzv import eval_dn_image, eval_mzv, eval_zeta_tilde
from .nested import EvalParams, NumValue

__version__ = "0.1.0"

__all__ = [
    "Word",
    "HPoly",
    "LambdaPoly",
    "stuffle",
    "tau",
    "derivation_Dn",
    "sigma_exp",
    "sigma_subst",
    "is_admissible",
    "format_hpoly",
    "parse_hpoly",
    "BiSeq",
    "dual_index",
    "word_to_index",
    "index_to_word",
    "ohno_compositions",
    "EvalParams",
    "NumValue",
    "eval_mzv",
    "eval_zeta_tilde",
    "eval_dn_image",
    "BracketSpec",
    "RelationReport",
    "eval_bracket",
    "eval_f",
    "eval_g",
    "ohno_sum_value",
    "check_ohno",
    "check_fg",
    "check_thm31",
    "check_lemma33",
    "residue_profile",
    "taylor_vs_ohno",
]

"""Generating functions of Ohno sums and the relations they satisfy.

For a sequence ``{k_i, l_i}`` the generating function

    f({k_i, l_i}; lam) = sum_{n_1 > ... > n_L > 0} prod_i
        1 / (n_{L_{i-1}+1}^{k_i} (n_{L_{i-1}+1} - lam) ... (n_{L_i} - lam))

has Taylor coefficients ``sum_l lam^l * OhnoSum(k; l)``, and
``g(bs; lam) = f(swap_reverse(bs); lam)``.  The shifted brackets replace the
base ``n`` of group ``i`` by ``n - a_i`` with ``a_i`` in ``{0, 1}``.

Every check returns a :class:`RelationReport`; a check passes when
``|lhs - rhs| <= tol + err_lhs + err_rhs (+ allowance)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import mpmath
from mpmath import mpf

from .indices import BiSeq, _check_index, dual_index, format_index, ohno_compositions
from .mzv import eval_mzv
from .nested import EvalParams, Factor, NumValue, nested_sum

__all__ = [
    "BracketSpec",
    "RelationReport",
    "make_report",
    "parse_lambda",
    "format_lambda",
    "eval_bracket",
    "eval_f",
    "eval_g",
    "ohno_sum_value",
    "check_ohno",
    "check_fg",
    "thm31_case",
    "thm31_terms",
    "check_thm31",
    "LEMMA33_PARTS",
    "lemma33_applicable",
    "lemma33_terms",
    "check_lemma33",
    "spade_identity",
    "heart_identity",
    "residue_coefficient",
    "residue_profile",
    "residue_limit",
    "residue_reconstruction",
    "taylor_vs_ohno",
]


# ---------------------------------------------------------------------------
# lambda handling


def parse_lambda(text: str | int | Fraction) -> Fraction:
    """Exact rational from ``"p/q"``, an integer literal, or a terminating decimal."""
    try:
        lam = Fraction(text) if not isinstance(text, str) else Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse lambda {text!r}") from exc
    _check_lambda(lam)
    return lam


def format_lambda(lam: Fraction) -> str:
    return str(lam.numerator) if lam.denominator == 1 else f"{lam.numerator}/{lam.denominator}"


def _check_lambda(lam: Fraction) -> None:
    if lam.denominator == 1 and lam >= 1:
        raise ValueError(f"lambda = {lam} is a positive integer (a pole of the series)")


def _to_mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


# ---------------------------------------------------------------------------
# brackets


@dataclass(frozen=True)
class BracketSpec:
    """``[{(n - a_i)^{k_i}, l_i}; lam]``; zero ``k_i`` / ``l_i`` follow the merge conventions."""

    groups: BiSeq
    shifts: tuple[int, ...]
    lam: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "shifts", tuple(self.shifts))
        object.__setattr__(self, "lam", Fraction(self.lam))
        if len(self.shifts) != self.groups.m:
            raise ValueError("one shift per group required")
        if any(a not in (0, 1) for a in self.shifts):
            raise ValueError("shifts must be 0 or 1")
        _check_lambda(self.lam)

    @classmethod
    def plain(cls, bs: BiSeq, lam: Fraction) -> "BracketSpec":
        return cls(bs, (0,) * bs.m, lam)

    def factors(self) -> list[Factor]:
        """Per-variable factors, outermost first.

        A group with ``l_i = 0`` hands its power on to the next variable, and a
        group with ``k_i = 0`` simply continues the run of ``(n - lam)`` factors;
        this is the series read literally and agrees with both merge rules.
        """
        out: list[Factor] = []
        pending: dict[Fraction, int] = {}
        for (k, l), a in zip(self.groups.groups, self.shifts):
            if k:
                pending[Fraction(a)] = pending.get(Fraction(a), 0) + k
            for _ in range(l):
                roots = dict(pending)
                roots[self.lam] = roots.get(self.lam, 0) + 1
                out.append(Factor.make(roots))
                pending = {}
        return out

    def __str__(self) -> str:
        parts = []
        for (k, l), a in zip(self.groups.groups, self.shifts):
            base = "n" if a == 0 else "(n-1)"
            parts.append(f"{base}^{k},{l}")
        return "[{" + ";".join(parts) + "}; " + format_lambda(self.lam) + "]"


def eval_bracket(spec: BracketSpec, p: EvalParams | None = None, tol: float | None = None) -> NumValue:
    return nested_sum(spec.factors(), p, tol)


def eval_f(bs: BiSeq, lam: Fraction | str, p: EvalParams | None = None, tol: float | None = None) -> NumValue:
    lam = parse_lambda(lam)
    return eval_bracket(BracketSpec.plain(bs.normalized(), lam), p, tol)


def eval_g(bs: BiSeq, lam: Fraction | str, p: EvalParams | None = None, tol: float | None = None) -> NumValue:
    return eval_f(bs.swap_reverse(), lam, p, tol)


_GENFUNS: dict[str, Callable[..., NumValue]] = {"f": eval_f, "g": eval_g}


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class RelationReport:
    relation_id: str
    inputs: dict
    lam: Fraction | None
    lhs: NumValue
    rhs: NumValue
    abs_diff: mpf
    tol: float
    passed: bool
    params: EvalParams
    allowance: mpf = field(default_factory=lambda: mpf(0))

    @property
    def pass_(self) -> bool:
        return self.passed

    def to_json(self) -> dict:
        out = {
            "relation": self.relation_id,
            "inputs": self.inputs,
            "lambda": format_lambda(self.lam) if self.lam is not None else None,
            "lhs": _num_json(self.lhs),
            "rhs": _num_json(self.rhs),
            "abs_diff": mpmath.nstr(self.abs_diff, 6),
            "tol": self.tol,
            "pass": self.passed,
            "params": self.params.to_json(),
        }
        if self.allowance:
            out["allowance"] = mpmath.nstr(self.allowance, 6)
        return out

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        lam = f" lambda={format_lambda(self.lam)}" if self.lam is not None else ""
        args = " ".join(f"{k}={v}" for k, v in self.inputs.items())
        return f"{status} {self.relation_id} {args}{lam} diff={mpmath.nstr(self.abs_diff, 3)}"


def _num_json(v: NumValue) -> dict:
    d = v.to_json()
    return {"value": d["value"], "err": d["err"]}


def make_report(
    relation_id: str,
    inputs: dict,
    lam: Fraction | None,
    lhs: NumValue,
    rhs: NumValue,
    tol: float,
    p: EvalParams,
    allowance: mpf | None = None,
) -> RelationReport:
    with mpmath.workprec(p.prec_bits):
        diff = abs(lhs.value - rhs.value)
        slack = mpf(tol) + lhs.err + rhs.err + (allowance or 0)
        return RelationReport(relation_id, inputs, lam, lhs, rhs, +diff, tol, bool(diff <= slack), p, allowance or mpf(0))


def _combine(terms: Iterable[tuple[Fraction, Callable[[], NumValue]]], prec: int) -> NumValue:
    total = NumValue(mpf(0), mpf(0), prec)
    for c, thunk in terms:
        if c:
            total = total + thunk().scale(c)
    return total


# ---------------------------------------------------------------------------
# Ohno's relation


def ohno_sum_value(k: Sequence[int], l: int, p: EvalParams | None = None, tol: float | None = None) -> NumValue:
    """Sum of ``zeta`` over all upward shifts of ``k`` of total size ``l``."""
    p = p or EvalParams()
    return _combine(((Fraction(1), lambda c=c: eval_mzv(c, p, tol)) for c in ohno_compositions(k, l)), p.prec_bits)


def check_ohno(k: Sequence[int], l: int, p: EvalParams | None = None, tol: float = 1e-8) -> RelationReport:
    p = p or EvalParams()
    k = _check_index(k)
    lhs = ohno_sum_value(k, l, p, tol)
    rhs = ohno_sum_value(dual_index(k), l, p, tol)
    inputs = {"index": format_index(k), "dual": format_index(dual_index(k)), "shift": l}
    return make_report("ohno", inputs, None, lhs, rhs, tol, p)


def check_fg(bs: BiSeq, lam: Fraction | str, p: EvalParams | None = None, tol: float = 1e-8) -> RelationReport:
    p = p or EvalParams()
    lam = parse_lambda(lam)
    lhs = eval_f(bs, lam, p, tol)
    rhs = eval_g(bs, lam, p, tol)
    return make_report("fg", {"biseq": str(bs)}, lam, lhs, rhs, tol, p)


# ---------------------------------------------------------------------------
# functional relations in lambda -> lambda - 1

_I = ((0, 0), (1, 0), (0, 1))
THM31_CASES = ("i", "ii", "iii", "iv")

Term = tuple[Fraction, BiSeq, Fraction]


def thm31_case(bs: BiSeq) -> str:
    k1, lm = bs.groups[0][0], bs.groups[-1][1]
    return {(False, False): "i", (True, False): "ii", (False, True): "iii", (True, True): "iv"}[(k1 == 1, lm == 1)]


def thm31_terms(bs: BiSeq, lam: Fraction) -> tuple[list[Term], list[Term]]:
    """Both sides of the relation as ``(coefficient, sequence, argument)`` triples.

    The four cases share one pattern: on the left each group drops nothing,
    one ``x`` or one ``y`` (never emptying ``k_1`` or ``l_m``), weighted by
    ``(-lam)^(m - #drops)``; on the right the drops of ``y`` are paired with the
    preceding group and the argument is ``lam - 1``.
    """
    if not bs.is_normalized():
        raise ValueError("sequence must be normalized")
    m = bs.m
    ks, ls = bs.ks, bs.ls
    if m == 1 and ks[0] == 1 and ls[0] == 1:
        raise ValueError("case iv needs at least two groups; {1,1} has no instance")
    lam = Fraction(lam)
    lam1 = lam - 1

    lhs: list[Term] = []
    options = []
    for i in range(m):
        opts = list(_I)
        if i == 0 and ks[0] == 1:
            opts.remove((1, 0))
        if i == m - 1 and ls[-1] == 1:
            opts.remove((0, 1))
        options.append(opts)
    for choice in itertools.product(*options):
        drops = sum(d + e for d, e in choice)
        seq = BiSeq(tuple((k - d, l - e) for (k, l), (d, e) in zip(bs.groups, choice))).normalized()
        lhs.append(((-lam) ** (m - drops), seq, lam))

    rhs: list[Term] = []
    first = (0, 1) if ks[0] >= 2 else (0,)
    last = (0, 1) if ls[-1] >= 2 else (0,)
    for d1 in first:
        for middle in itertools.product(_I, repeat=m - 1):
            for e_last in last:
                deltas = (d1,) + tuple(d for d, _ in middle)
                eps = tuple(e for _, e in middle) + (e_last,)  # eps[i] pairs with l_i
                drops = sum(deltas) + sum(eps)
                seq = BiSeq(tuple((k - d, l - e) for k, l, d, e in zip(ks, ls, deltas, eps))).normalized()
                rhs.append(((-lam1) ** (m - drops), seq, lam1))
    return lhs, rhs


def check_thm31(
    bs: BiSeq,
    case: str,
    lam: Fraction | str,
    p: EvalParams | None = None,
    tol: float = 1e-8,
    genfun: str = "f",
) -> RelationReport:
    p = p or EvalParams()
    lam = parse_lambda(lam)
    if case not in THM31_CASES:
        raise ValueError(f"unknown case {case!r}")
    if thm31_case(bs) != case:
        raise ValueError(f"{bs} belongs to case {thm31_case(bs)}, not {case}")
    F = _GENFUNS[genfun]
    lhs_terms, rhs_terms = thm31_terms(bs, lam)
    lhs = _combine(((c, lambda s=s, a=a: F(s, a, p, tol)) for c, s, a in lhs_terms), p.prec_bits)
    rhs = _combine(((c, lambda s=s, a=a: F(s, a, p, tol)) for c, s, a in rhs_terms), p.prec_bits)
    return make_report(f"thm31.{case}.{genfun}", {"biseq": str(bs), "case": case}, lam, lhs, rhs, tol, p)


# ---------------------------------------------------------------------------
# bracket relations behind the functional equations

LEMMA33_PARTS = ("ia", "ib", "ii", "iiic", "iiid")

BracketTerm = tuple[Fraction, BracketSpec]


def lemma33_applicable(part: str, bs: BiSeq, i_pos: int | None = None) -> bool:
    m, k1, lm = bs.m, bs.groups[0][0], bs.groups[-1][1]
    if part == "ia":
        return k1 >= 2 and (m != 1 or lm != 1)
    if part == "ib":
        return k1 == 1 and (m != 1 or lm != 1)
    if part == "ii":
        return i_pos is not None and 2 <= i_pos <= m and (i_pos != m or lm != 1)
    if part == "iiic":
        return lm == 1 and (m >= 2 or k1 >= 2)
    if part == "iiid":
        return lm >= 2
    raise ValueError(f"unknown part {part!r}")


def _edit(bs: BiSeq, i: int, dk: int = 0, dl: int = 0) -> BiSeq:
    groups = list(bs.groups)
    k, l = groups[i]
    groups[i] = (k + dk, l + dl)
    return BiSeq(tuple(groups))


def lemma33_terms(part: str, bs: BiSeq, i_pos: int | None, lam: Fraction) -> tuple[list[BracketTerm], list[BracketTerm]]:
    """Bracket terms of each side; ``i_pos`` (1-based) is used by part ``ii`` only."""
    if not bs.is_normalized():
        raise ValueError("sequence must be normalized")
    if not lemma33_applicable(part, bs, i_pos):
        raise ValueError(f"part {part} does not apply to {bs}" + (f" at group {i_pos}" if i_pos else ""))
    lam = Fraction(lam)
    lam1 = lam - 1
    m = bs.m
    zero = (0,) * m

    def spec(seq: BiSeq, shifts: tuple[int, ...] = zero, arg: Fraction = lam) -> BracketSpec:
        return BracketSpec(seq, shifts, arg)

    one = Fraction(1)
    if part in ("ia", "ib"):
        s1 = (1,) + (0,) * (m - 1)
        lhs = [(lam, spec(bs)), (-one, spec(_edit(bs, 0, dl=-1)))]
        rhs = [(lam1, spec(bs, s1))]
        if part == "ia":
            lhs.append((-one, spec(_edit(bs, 0, dk=-1))))
            rhs.append((-one, spec(_edit(bs, 0, dk=-1), s1)))
        return lhs, rhs
    if part == "ii":
        i = i_pos - 1
        si = tuple(1 if j == i else 0 for j in range(m))
        lhs = [
            (lam, spec(bs)),
            (-one, spec(_edit(bs, i, dk=-1))),
            (-one, spec(_edit(bs, i, dl=-1))),
        ]
        rhs = [
            (lam1, spec(bs, si)),
            (-one, spec(_edit(bs, i, dk=-1), si)),
            (-one, spec(_edit(bs, i - 1, dl=-1), si)),
        ]
        return lhs, rhs
    if part == "iiic":
        sl = (1,) * (m - 1) + (0,)
        lhs = [(lam, spec(bs, sl)), (-one, spec(_edit(bs, m - 1, dk=-1), sl))]
        rhs = [(lam1, spec(bs, zero, lam1)), (-one, spec(_edit(bs, m - 1, dk=-1), zero, lam1))]
        if m >= 2:
            rhs.append((-one, spec(_edit(bs, m - 2, dl=-1), zero, lam1)))
        return lhs, rhs
    # iiid
    lhs = [(one, spec(bs, (1,) * m))]
    rhs = [(one, spec(bs, zero, lam1)), (-1 / lam1, spec(_edit(bs, m - 1, dl=-1), zero, lam1))]
    return lhs, rhs


def check_lemma33(
    part: str,
    bs: BiSeq,
    i_pos: int | None,
    lam: Fraction | str,
    p: EvalParams | None = None,
    tol: float = 1e-8,
) -> RelationReport:
    p = p or EvalParams()
    lam = parse_lambda(lam)
    lhs_terms, rhs_terms = lemma33_terms(part, bs, i_pos, lam)
    lhs = _combine(((c, lambda s=s: eval_bracket(s, p, tol)) for c, s in lhs_terms), p.prec_bits)
    rhs = _combine(((c, lambda s=s: eval_bracket(s, p, tol)) for c, s in rhs_terms), p.prec_bits)
    inputs = {"part": part, "biseq": str(bs)}
    if part == "ii":
        inputs["i"] = i_pos
    return make_report(f"lemma33.{part}", inputs, lam, lhs, rhs, tol, p)


def spade_identity(n: int, k: int, lam: Fraction) -> tuple[Fraction, Fraction]:
    """Both sides of the partial-fraction step for ``k >= 1``, exactly."""
    lam = Fraction(lam)
    lam1 = lam - 1
    lhs = lam / (Fraction(n) ** k * (n - lam)) - 1 / (Fraction(n) ** (k - 1) * (n - lam))
    rhs = (
        lam1 / (Fraction(n - 1) ** k * (n - lam))
        - 1 / (Fraction(n - 1) ** (k - 1) * (n - lam))
        + (1 / Fraction(n - 1) ** k - 1 / Fraction(n) ** k)
    )
    return lhs, rhs


def heart_identity(n: int, lam: Fraction) -> tuple[Fraction, Fraction]:
    lam = Fraction(lam)
    lhs = lam / (n * (n - lam))
    rhs = (lam - 1) / ((n - 1) * (n - lam)) + (Fraction(1, n - 1) - Fraction(1, n))
    return lhs, rhs


# ---------------------------------------------------------------------------
# partial fractions in lambda


def _variable_powers(bs: BiSeq) -> list[int]:
    """Power of ``n_v`` attached to each summation variable (``k_i`` on group heads)."""
    out: list[int] = []
    carry = 0
    for k, l in bs.groups:
        carry += k
        for _ in range(l):
            out.append(carry)
            carry = 0
    return out


def _residue_inner(powers: Sequence[int], n: int) -> Fraction:
    """``sum_{n > n_1 > ... > n_r >= 1} prod n_i^{-e_i} / (n_i - n)``, exactly."""
    if not powers:
        return Fraction(1)
    level: list[Fraction] | None = None  # summand with the current variable fixed to v
    for e in reversed(powers):
        new = [Fraction(0)] * n
        running = Fraction(0)  # sum of the deeper level over u < v
        for v in range(1, n):
            weight = Fraction(1) if level is None else running
            new[v] = weight / (Fraction(v) ** e * (v - n))
            if level is not None:
                running += level[v]
        level = new
    return sum(level, Fraction(0))


def residue_coefficient(bs: BiSeq, n: int, p: EvalParams | None = None) -> NumValue:
    """Residue ``C_n`` of ``f(bs; lam)`` at ``lam = n``."""
    p = p or EvalParams()
    bs = bs.normalized()
    powers = _variable_powers(bs)
    cutoff = max(p.N, 4 * n + 16)
    outer_params = p.with_cutoff(cutoff)
    total = NumValue(mpf(0), mpf(0), p.prec_bits)
    for j, e in enumerate(powers):
        if len(powers) - j - 1 > n - 1:
            continue
        inner = _residue_inner(powers[j + 1 :], n)
        if inner == 0:
            continue
        head = inner / Fraction(n) ** e
        if j == 0:
            outer = NumValue.exact(1, p.prec_bits)
        else:
            # n_i = n + m_i with m_1 > ... > m_j >= 1
            factors = [Factor.make({-n: powers[i], 0: 1}) for i in range(j)]
            outer = nested_sum(factors, outer_params)
        total = total + outer.scale(head)
    return total


def residue_profile(bs: BiSeq, n_max: int, p: EvalParams | None = None) -> list[tuple[int, NumValue]]:
    """``[(n, C_n)]`` for ``n = 1..n_max``."""
    return [(n, residue_coefficient(bs, n, p)) for n in range(1, n_max + 1)]


def residue_limit(bs: BiSeq, n: int, p: EvalParams | None = None, digits: Sequence[int] = (2, 3, 4)) -> dict:
    """Numeric ``lim (n - lam) f(lam)`` along ``lam = n - 10^-d``.

    Returns the samples, a Richardson estimate from the last two and the
    spread between that estimate and the last sample.
    """
    p = p or EvalParams()
    params = p.with_cutoff(max(p.N, 4 * n + 16))
    samples = []
    with mpmath.workprec(p.prec_bits):
        for d in digits:
            eps = Fraction(1, 10**d)
            v = eval_f(bs, n - eps, params).scale(eps)
            samples.append((d, v))
        (d3, v3), (d4, v4) = samples[-2], samples[-1]
        ratio = 10 ** (d4 - d3)
        estimate = (v4.value * ratio - v3.value) / (ratio - 1)
        spread = abs(estimate - v4.value)
    return {"n": n, "samples": samples, "estimate": estimate, "spread": spread}


def residue_reconstruction(bs: BiSeq, lam: Fraction | str, n_max: int, p: EvalParams | None = None) -> tuple[NumValue, NumValue, mpf]:
    """``(sum_{n <= n_max} C_n / (n - lam), f(lam), |difference|)``."""
    p = p or EvalParams()
    lam = parse_lambda(lam)
    partial = NumValue(mpf(0), mpf(0), p.prec_bits)
    for n, c in residue_profile(bs, n_max, p):
        partial = partial + c.scale(1 / (n - lam))
    target = eval_f(bs, lam, p)
    with mpmath.workprec(p.prec_bits):
        diff = abs(partial.value - target.value)
    return partial, target, diff


# ---------------------------------------------------------------------------
# Taylor coefficients


def taylor_vs_ohno(
    bs: BiSeq,
    L: int,
    lam: Fraction | str,
    p: EvalParams | None = None,
    tol: float = 1e-6,
) -> RelationReport:
    """Compare ``f(bs; lam)`` with its Taylor polynomial of degree ``L``.

    The coefficients are the Ohno sums of ``bs``'s index.  All of them are
    positive, so the omitted tail at ``|lam| <= 1/2`` is at most
    ``(2|lam|)^(L+1)`` times the omitted tail at ``lam = 1/2``; that bound is
    reported as the ``allowance``.
    """
    p = p or EvalParams()
    lam = parse_lambda(lam)
    if abs(lam) > Fraction(1, 2):
        raise ValueError("|lambda| must be at most 1/2")
    if L < 0:
        raise ValueError("L must be nonnegative")
    bs = bs.normalized()
    k = bs.index()
    coeffs = [ohno_sum_value(k, l, p, tol) for l in range(L + 1)]
    lhs = eval_f(bs, lam, p, tol)
    rhs = _combine(((lam**l, lambda c=c: c) for l, c in enumerate(coeffs)), p.prec_bits)
    half = Fraction(1, 2)
    at_half = eval_f(bs, half, p, tol) - _combine(((half**l, lambda c=c: c) for l, c in enumerate(coeffs)), p.prec_bits)
    with mpmath.workprec(p.prec_bits):
        allowance = (at_half.value + at_half.err) * _to_mpf(2 * abs(lam)) ** (L + 1)
    return make_report("taylor", {"biseq": str(bs), "L": L}, lam, lhs, rhs, tol, p, allowance)

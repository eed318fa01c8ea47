from __future__ import annotations

import itertools
import json
from fractions import Fraction

import mpmath
import pytest

from mzvkit.algebra import sigma_subst
from mzvkit.genfun import (
    LEMMA33_PARTS,
    BracketSpec,
    check_fg,
    check_lemma33,
    check_ohno,
    check_thm31,
    eval_bracket,
    eval_f,
    eval_g,
    heart_identity,
    lemma33_applicable,
    lemma33_terms,
    ohno_sum_value,
    parse_lambda,
    residue_coefficient,
    residue_limit,
    residue_reconstruction,
    spade_identity,
    taylor_vs_ohno,
    thm31_case,
    thm31_terms,
)
from mzvkit.indices import BiSeq, enumerate_biseqs, word_to_index
from mzvkit.mzv import eval_mzv, eval_zeta_tilde
from mzvkit.nested import EvalParams, Factor, nested_sum

THIRD = Fraction(1, 3)


def bs(text: str) -> BiSeq:
    return BiSeq.parse(text)


def mp(q: Fraction) -> mpmath.mpf:
    return mpmath.mpf(q.numerator) / q.denominator


def brute_bracket(spec: BracketSpec, N: int) -> Fraction:
    """Literal partial sum over ``N >= n_1 > ... > n_L >= 1``."""
    factors = spec.factors()
    total = Fraction(0)
    for ns in itertools.combinations(range(N, 0, -1), len(factors)):
        term = Fraction(1)
        for phi, n in zip(factors, ns):
            term *= phi(n)
        total += term
    return total


class TestLambda:
    def test_parse(self):
        assert parse_lambda("1/3") == THIRD and parse_lambda("-0.5") == Fraction(-1, 2)
        assert parse_lambda("0") == 0

    @pytest.mark.parametrize("bad", ["2", "1", "4/2", "x"])
    def test_rejects(self, bad):
        with pytest.raises(ValueError):
            parse_lambda(bad)


class TestBracket:
    def test_lambda_zero_is_zeta2(self):
        assert eval_bracket(BracketSpec.plain(bs("1,1"), Fraction(0))).close_to(eval_mzv((2,)), 0)

    def test_half_against_digamma(self):
        # sum 1/(n (n - lam)) = (psi(1) - psi(1 - lam)) / lam
        v = eval_f(bs("1,1"), Fraction(1, 2))
        with mpmath.workprec(256):
            assert abs(v.value - 4 * mpmath.log(2)) <= v.err + mpmath.mpf(10) ** -70

    def test_half_against_direct_sum(self):
        N = 10**5
        partial = mpmath.fsum(1 / (mpmath.mpf(n) * (n - 0.5)) for n in range(1, N + 1))
        v = float(eval_f(bs("1,1"), Fraction(1, 2)).value)
        assert float(partial) + 1 / (N + 1) <= v + 1e-12 <= float(partial) + 1 / (N - 0.5) + 2e-12

    def test_merge_conventions(self):
        lam = THIRD
        a = eval_bracket(BracketSpec(BiSeq(((2, 1), (0, 2))), (0, 0), lam))
        assert a.close_to(eval_bracket(BracketSpec.plain(bs("2,3"), lam)), 0)
        b = eval_bracket(BracketSpec(BiSeq(((1, 0), (2, 2))), (1, 1), lam))
        assert b.close_to(eval_bracket(BracketSpec(bs("3,2"), (1,), lam)), 0)

    @pytest.mark.parametrize(
        "spec",
        [
            BracketSpec(bs("2,1;1,2"), (1, 0), THIRD),
            BracketSpec(bs("1,2;1,1"), (1, 0), Fraction(-1, 2)),
            BracketSpec(BiSeq(((1, 0), (1, 2))), (0, 1), Fraction(1, 2)),
            BracketSpec(bs("3,2"), (1,), Fraction(-2, 3)),
        ],
    )
    def test_partial_sums_match_literal_series(self, spec):
        from mzvkit.nested import truncated_sums

        (trunc,) = truncated_sums(spec.factors(), [30], 128)
        exact = brute_bracket(spec, 30)
        with mpmath.workprec(200):
            assert abs(trunc.values[0] - mp(exact)) <= trunc.errors[0]

    def test_rejects_positive_integer_lambda(self):
        with pytest.raises(ValueError):
            BracketSpec.plain(bs("1,1"), Fraction(2))

    def test_rejects_pole_on_innermost_variable(self):
        with pytest.raises(ValueError, match="pole"):
            eval_bracket(BracketSpec(bs("2,1"), (1,), THIRD))

    def test_rejects_lambda_beyond_half_cutoff(self):
        with pytest.raises(ValueError):
            eval_bracket(BracketSpec.plain(bs("1,1"), Fraction(201, 2)), EvalParams(cutoff_N=128))

    def test_shape(self):
        with pytest.raises(ValueError):
            BracketSpec(bs("1,1"), (0, 0), THIRD)
        with pytest.raises(ValueError):
            BracketSpec(bs("1,1"), (2,), THIRD)


class TestFG:
    @pytest.mark.parametrize("b", enumerate_biseqs(6))
    def test_f_at_zero_is_zeta(self, b):
        assert eval_f(b, 0).close_to(eval_zeta_tilde(b.word()), 1e-60)

    def test_g_examples(self):
        assert eval_g(bs("2,1"), 0).close_to(eval_mzv((2, 1)), 0)
        assert eval_g(bs("1,1"), THIRD).value == eval_f(bs("1,1"), THIRD).value

    @pytest.mark.parametrize("b", enumerate_biseqs(6)[::3])
    def test_g_is_f_of_swap_reverse(self, b):
        g = eval_g(b, THIRD)
        f = eval_f(b.swap_reverse(), THIRD)
        assert g.value == f.value and g.err == f.err

    @pytest.mark.parametrize("text, lam", [("1,1", "1/3"), ("2,1", "1/3"), ("1,2", "-1/2"), ("2,1;1,2", "1/2")])
    def test_check_fg(self, text, lam):
        r = check_fg(bs(text), lam)
        assert r.passed and r.abs_diff < 1e-60


class TestOhno:
    def test_values(self):
        assert ohno_sum_value((2,), 0).close_to(eval_mzv((2,)), 0)
        assert ohno_sum_value((2,), 1).close_to(eval_mzv((3,)), 0)
        assert ohno_sum_value((2, 1), 1).close_to(eval_mzv((3, 1)) + eval_mzv((2, 2)), 0)

    @pytest.mark.parametrize("k, l", [((2,), 1), ((3,), 1), ((3,), 0), ((2, 1, 1), 2), ((3, 1, 2), 3)])
    def test_check(self, k, l):
        r = check_ohno(k, l)
        assert r.passed and r.abs_diff < 1e-60

    def test_detects_false_relation(self):
        # zeta(3) + zeta(2,1) against zeta(4) is not an identity
        from mzvkit.genfun import make_report

        r = make_report("bogus", {}, None, eval_mzv((3,)), eval_mzv((4,)), 1e-8, EvalParams())
        assert not r.passed

    def test_report_json(self):
        d = check_fg(bs("2,1"), "1/3").to_json()
        assert set(d) == {"relation", "inputs", "lambda", "lhs", "rhs", "abs_diff", "tol", "pass", "params"}
        assert d["lambda"] == "1/3" and d["pass"] is True
        json.dumps(d)


class TestFourCaseRelations:
    def test_case_detection(self):
        assert [thm31_case(bs(t)) for t in ("2,2", "1,2", "2,1", "1,1;1,1")] == ["i", "ii", "iii", "iv"]

    def test_single_group_term_counts(self):
        lhs, rhs = thm31_terms(bs("2,2"), THIRD)
        assert len(lhs) == 3 and len(rhs) == 4

    @pytest.mark.parametrize("text, case", [("2,2", "i"), ("1,2", "ii"), ("3,1", "iii"), ("1,1;1,1", "iv"), ("2,1;2,2", "i")])
    @pytest.mark.parametrize("lam", ["1/3", "-1/2"])
    @pytest.mark.parametrize("genfun", ["f", "g"])
    def test_examples(self, text, case, lam, genfun):
        r = check_thm31(bs(text), case, lam, genfun=genfun)
        assert r.passed and r.abs_diff < 1e-60

    def test_case_mismatch(self):
        with pytest.raises(ValueError):
            check_thm31(bs("2,2"), "ii", THIRD)

    def test_single_group_case_iv_has_no_instance(self):
        with pytest.raises(ValueError):
            check_thm31(bs("1,1"), "iv", Fraction(-1, 2))

    def test_wrong_argument_reading_fails(self):
        # the same sums with lambda kept on the right-hand side do not balance
        lhs, rhs = thm31_terms(bs("2,2"), THIRD)
        total = mpmath.mpf(0)
        with mpmath.workprec(256):
            for c, seq, _ in lhs:
                total += mp(c) * eval_f(seq, THIRD).value
            for c, seq, _ in rhs:
                total -= mp(c) * eval_f(seq, THIRD).value
            assert abs(total) > 1e-3


class TestLemmaSteps:
    @pytest.mark.parametrize("n", range(2, 51))
    @pytest.mark.parametrize("lam", [Fraction(1, 3), Fraction(1, 2), Fraction(-2, 5)])
    def test_scalar_identities(self, n, lam):
        for k in range(1, 6):
            lhs, rhs = spade_identity(n, k, lam)
            assert lhs == rhs
        lhs, rhs = heart_identity(n, lam)
        assert lhs == rhs

    def test_heart_example(self):
        assert heart_identity(2, Fraction(1, 2)) == (Fraction(1, 6), Fraction(1, 6))

    def test_examples(self):
        assert check_lemma33("ib", bs("1,2"), None, "1/3").passed
        assert check_lemma33("iiid", bs("1,2"), None, "1/2").passed

    @pytest.mark.parametrize(
        "part, text, i",
        [("ia", "2,2", None), ("ia", "3,1;1,1", None), ("ii", "2,1;1,2", 2), ("ii", "1,1;2,1;1,1", 2), ("iiic", "2,1", None), ("iiic", "1,2;2,1", None), ("iiid", "2,1;1,2", None)],
    )
    @pytest.mark.parametrize("lam", ["1/3", "1/2"])
    def test_parts(self, part, text, i, lam):
        r = check_lemma33(part, bs(text), i, lam)
        assert r.passed and r.abs_diff < 1e-60

    def test_applicability(self):
        assert not lemma33_applicable("ia", bs("2,1"))
        assert not lemma33_applicable("ib", bs("2,2"))
        assert not lemma33_applicable("ii", bs("2,1;1,1"), 2)
        assert lemma33_applicable("ii", bs("2,1;1,2"), 2)
        assert not lemma33_applicable("iiic", bs("1,1"))
        assert not lemma33_applicable("iiid", bs("2,1"))
        with pytest.raises(ValueError):
            lemma33_terms("iiid", bs("2,1"), None, THIRD)

    def test_all_parts_listed(self):
        assert set(LEMMA33_PARTS) == {"ia", "ib", "ii", "iiic", "iiid"}


class TestResidues:
    def test_simple_sequences_exact(self):
        for n in (1, 2, 5, 11):
            c11 = residue_coefficient(bs("1,1"), n)
            c21 = residue_coefficient(bs("2,1"), n)
            with mpmath.workprec(256):
                assert abs(c11.value - mpmath.mpf(1) / n) <= c11.err
                assert abs(c21.value - mpmath.mpf(1) / n**2) <= c21.err

    @pytest.mark.parametrize("text", ["1,2", "2,2", "1,1;1,1", "2,1;1,2", "1,3"])
    @pytest.mark.parametrize("n", [1, 2, 3, 5])
    def test_against_numeric_limit(self, text, n):
        c = residue_coefficient(bs(text), n)
        lim = residue_limit(bs(text), n)
        assert abs(float(c.value) - float(lim["estimate"])) < 1e-6

    def test_simple_pole(self):
        samples = residue_limit(bs("1,2"), 2)["samples"]
        values = [float(v.value) for _, v in samples]
        assert max(values) - min(values) < 1e-2 and all(abs(v) < 10 for v in values)

    @pytest.mark.parametrize("text", ["1,1", "2,1", "1,2", "2,1;1,1"])
    def test_reconstruction_shrinks(self, text):
        diffs = [residue_reconstruction(bs(text), THIRD, n)[2] for n in (10, 20, 40)]
        assert diffs[0] > diffs[1] > diffs[2]

    def test_reconstruction_reaches_f(self):
        _, _, diff = residue_reconstruction(bs("2,1"), THIRD, 100)
        assert diff < 1e-3


class TestTaylor:
    def test_constant_term(self):
        r = taylor_vs_ohno(bs("1,1"), 0, "0")
        assert r.passed and r.abs_diff < 1e-60

    def test_alternating(self):
        assert taylor_vs_ohno(bs("2,1"), 6, "-1/4").passed

    def test_pass_rule_at_quarter(self):
        assert taylor_vs_ohno(bs("1,1"), 6, "1/4", tol=1e-6).passed

    def test_residual_decreases(self):
        res = [taylor_vs_ohno(bs("1,2"), L, "1/4").abs_diff for L in range(2, 9)]
        assert all(a > b for a, b in zip(res, res[1:]))

    def test_one_third_within_allowance(self):
        r = taylor_vs_ohno(bs("2,1"), 8, "1/3", tol=0)
        assert r.passed and r.abs_diff <= r.allowance

    def test_rejects_large_lambda(self):
        with pytest.raises(ValueError):
            taylor_vs_ohno(bs("1,1"), 3, "3/4")

    @pytest.mark.parametrize("word", ["xy", "xxy", "xyy", "xxxy", "xxyy", "xyxy", "xyyy", "xxyxy", "xyyxy"])
    def test_symbolic_numeric_bridge(self, word):
        s = sigma_subst(word, 4)
        k = word_to_index(word)
        for l in range(5):
            assert eval_zeta_tilde(s[l]).close_to(ohno_sum_value(k, l), 1e-60)


def test_plain_bracket_factors_are_mzv_factors():
    spec = BracketSpec.plain(bs("2,1"), Fraction(0))
    assert [f.degree for f in spec.factors()] == [3]
    assert nested_sum([Factor.make({0: 2})]).close_to(eval_mzv((2,)), 0)

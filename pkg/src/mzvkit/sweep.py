"""Batch verification over every instance up to a given weight."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

import mpmath
from mpmath import mpf

from .algebra import HPoly, stuffle, tau
from .genfun import (
    LEMMA33_PARTS,
    RelationReport,
    check_fg,
    check_lemma33,
    check_ohno,
    check_thm31,
    format_lambda,
    lemma33_applicable,
    make_report,
    parse_lambda,
    residue_reconstruction,
    taylor_vs_ohno,
    thm31_case,
)
from .indices import BiSeq, enumerate_admissible, enumerate_admissible_words, enumerate_biseqs
from .mzv import eval_zeta_tilde
from .nested import TAIL_MODES, EvalParams

__all__ = [
    "RELATIONS",
    "SweepConfig",
    "parse_config",
    "iter_family",
    "run_sweep",
    "summarize",
    "format_summary",
]

RELATIONS = ("ohno", "fg", "thm31", "lemma33", "taylor", "residue", "homomorphism", "duality")


@dataclass(frozen=True)
class SweepConfig:
    max_weight: int = 6
    lambdas: tuple[Fraction, ...] = (Fraction(1, 3), Fraction(-1, 2))
    tolerance: float = 1e-8
    eval: EvalParams = field(default_factory=EvalParams)
    relations: tuple[str, ...] = ("ohno", "fg")
    shifts: int = 3
    taylor_L: int = 6
    taylor_tol: float = 1e-6
    residue_n_max: int = 100
    residue_tol: float = 1e-3
    out: str | None = None

    def __post_init__(self) -> None:
        if self.max_weight < 2:
            raise ValueError("max_weight must be at least 2")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if not self.relations:
            raise ValueError("no relations selected")
        unknown = [r for r in self.relations if r not in RELATIONS]
        if unknown:
            raise ValueError(f"unknown relations {unknown}; choose from {RELATIONS}")
        for lam in self.lambdas:
            parse_lambda(lam)


_INT_KEYS = {"max_weight", "shifts", "taylor_L", "residue_n_max"}
_FLOAT_KEYS = {"tolerance", "taylor_tol", "residue_tol"}


def parse_config(text: str) -> SweepConfig:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    values: dict = {}
    eval_kw: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key == "lambdas":
                values[key] = tuple(parse_lambda(v) for v in value.split(",") if v.strip())
            elif key == "relations":
                values[key] = tuple(v.strip() for v in value.split(",") if v.strip())
            elif key == "prec_bits":
                eval_kw["prec_bits"] = int(value)
            elif key == "cutoff_N":
                eval_kw["cutoff_N"] = int(value)
            elif key == "tail_mode":
                if value not in TAIL_MODES:
                    raise ValueError(f"tail_mode must be one of {TAIL_MODES}")
                eval_kw["tail_mode"] = value
            elif key == "out":
                values[key] = value
            else:
                raise ValueError(f"unknown key {key!r}")
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if "relations" in values and not values["relations"]:
        raise ValueError("relations list is empty")
    return SweepConfig(eval=EvalParams(**eval_kw), **values)


# ---------------------------------------------------------------------------
# instance generators, one per relation family


def _homomorphism(cfg: SweepConfig) -> Iterator[RelationReport]:
    p, tol = cfg.eval, cfg.tolerance
    words = enumerate_admissible_words(cfg.max_weight - 2)
    for i, w1 in enumerate(words):
        for w2 in words[i:]:
            if w1.weight + w2.weight > cfg.max_weight:
                continue
            lhs = eval_zeta_tilde(stuffle(w1, w2), p, tol)
            rhs = eval_zeta_tilde(w1, p, tol) * eval_zeta_tilde(w2, p, tol)
            yield make_report("homomorphism", {"w1": w1.letters, "w2": w2.letters}, None, lhs, rhs, tol, p)


def _duality(cfg: SweepConfig) -> Iterator[RelationReport]:
    p, tol = cfg.eval, cfg.tolerance
    for w in enumerate_admissible_words(cfg.max_weight):
        lhs = eval_zeta_tilde(w, p, tol)
        rhs = eval_zeta_tilde(tau(HPoly.word(w)), p, tol)
        yield make_report("duality", {"word": w.letters}, None, lhs, rhs, tol, p)


def _ohno(cfg: SweepConfig) -> Iterator[RelationReport]:
    for k in enumerate_admissible(cfg.max_weight):
        for l in range(cfg.shifts + 1):
            yield check_ohno(k, l, cfg.eval, cfg.tolerance)


def _fg(cfg: SweepConfig) -> Iterator[RelationReport]:
    for bs in enumerate_biseqs(cfg.max_weight):
        for lam in cfg.lambdas:
            yield check_fg(bs, lam, cfg.eval, cfg.tolerance)


def thm31_instances(max_weight: int) -> list[tuple[BiSeq, str]]:
    return [(bs, thm31_case(bs)) for bs in enumerate_biseqs(max_weight) if bs.groups != ((1, 1),)]


def _thm31(cfg: SweepConfig) -> Iterator[RelationReport]:
    for bs, case in thm31_instances(cfg.max_weight):
        for lam in cfg.lambdas:
            for genfun in ("f", "g"):
                yield check_thm31(bs, case, lam, cfg.eval, cfg.tolerance, genfun)


def lemma33_instances(max_weight: int) -> list[tuple[str, BiSeq, int | None]]:
    out = []
    for bs in enumerate_biseqs(max_weight):
        for part in LEMMA33_PARTS:
            positions = range(2, bs.m + 1) if part == "ii" else [None]
            for i in positions:
                if lemma33_applicable(part, bs, i):
                    out.append((part, bs, i))
    return out


def _lemma33(cfg: SweepConfig) -> Iterator[RelationReport]:
    for part, bs, i in lemma33_instances(cfg.max_weight):
        for lam in cfg.lambdas:
            yield check_lemma33(part, bs, i, lam, cfg.eval, cfg.tolerance)


def _taylor(cfg: SweepConfig) -> Iterator[RelationReport]:
    for bs in enumerate_biseqs(cfg.max_weight):
        for lam in cfg.lambdas:
            if abs(lam) <= Fraction(1, 2):
                yield taylor_vs_ohno(bs, cfg.taylor_L, lam, cfg.eval, cfg.taylor_tol)


def _residue(cfg: SweepConfig) -> Iterator[RelationReport]:
    p = cfg.eval
    for bs in enumerate_biseqs(cfg.max_weight):
        for lam in cfg.lambdas:
            partial, target, _ = residue_reconstruction(bs, lam, cfg.residue_n_max, p)
            inputs = {"biseq": str(bs), "n_max": cfg.residue_n_max}
            yield make_report("residue", inputs, lam, partial, target, cfg.residue_tol, p)


_FAMILIES: dict[str, Callable[[SweepConfig], Iterator[RelationReport]]] = {
    "ohno": _ohno,
    "fg": _fg,
    "thm31": _thm31,
    "lemma33": _lemma33,
    "taylor": _taylor,
    "residue": _residue,
    "homomorphism": _homomorphism,
    "duality": _duality,
}


def iter_family(name: str, cfg: SweepConfig) -> Iterator[RelationReport]:
    return _FAMILIES[name](cfg)


def _sort_key(r: RelationReport) -> tuple:
    lam = format_lambda(r.lam) if r.lam is not None else ""
    return (r.relation_id, json.dumps(r.inputs, sort_keys=True), lam)


def run_sweep(cfg: SweepConfig) -> list[RelationReport]:
    reports = [r for name in cfg.relations for r in iter_family(name, cfg)]
    return sorted(reports, key=_sort_key)


@dataclass(frozen=True)
class FamilySummary:
    family: str
    total: int
    passed: int
    max_diff: mpf


def summarize(reports: list[RelationReport]) -> list[FamilySummary]:
    groups: dict[str, list[RelationReport]] = {}
    for r in reports:
        groups.setdefault(r.relation_id.split(".")[0], []).append(r)
    return [
        FamilySummary(name, len(rs), sum(r.passed for r in rs), max((r.abs_diff for r in rs), default=mpf(0)))
        for name, rs in sorted(groups.items())
    ]


def format_summary(rows: list[FamilySummary]) -> str:
    lines = [f"{'relation':<14}{'checks':>8}{'pass':>8}{'fail':>8}  max |lhs-rhs|"]
    for row in rows:
        lines.append(
            f"{row.family:<14}{row.total:>8}{row.passed:>8}{row.total - row.passed:>8}  {mpmath.nstr(row.max_diff, 3)}"
        )
    return "\n".join(lines)

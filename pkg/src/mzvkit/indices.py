"""Index combinatorics: admissible indices, words, duality, Ohno shifts.

An index ``(k1, ..., km)`` is a tuple of positive integers; it is admissible
when ``k1 >= 2``.  Admissible indices correspond one-to-one with admissible
words ``x ... y`` through ``x^{k1-1} y ... x^{km-1} y``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .algebra import Word

Index = tuple[int, ...]

__all__ = [
    "Index",
    "BiSeq",
    "is_admissible_index",
    "ab_decomposition",
    "from_ab_decomposition",
    "word_to_index",
    "index_to_word",
    "dual_index",
    "ohno_compositions",
    "biseq_le",
    "enumerate_admissible",
    "enumerate_admissible_words",
    "enumerate_biseqs",
    "parse_index",
    "format_index",
]


class NotAdmissibleError(ValueError):
    """Raised for an index or word outside the convergent range."""


def is_admissible_index(k: Sequence[int]) -> bool:
    return len(k) > 0 and all(isinstance(p, int) and p >= 1 for p in k) and k[0] >= 2


def _check_index(k: Sequence[int]) -> Index:
    k = tuple(k)
    if not is_admissible_index(k):
        raise NotAdmissibleError(f"index {k} is not admissible (need k1 >= 2, all parts >= 1)")
    return k


def ab_decomposition(k: Sequence[int]) -> list[tuple[int, int]]:
    """Pairs ``(a_i, b_i)`` with ``k = (a1+1, 1^{b1-1}, ..., as+1, 1^{bs-1})``."""
    k = _check_index(k)
    pairs: list[list[int]] = []
    for part in k:
        if part >= 2:
            pairs.append([part - 1, 1])
        else:
            pairs[-1][1] += 1
    return [(a, b) for a, b in pairs]


def from_ab_decomposition(pairs: Iterable[tuple[int, int]]) -> Index:
    out: list[int] = []
    for a, b in pairs:
        if a < 1 or b < 1:
            raise ValueError("a_i and b_i must be positive")
        out.append(a + 1)
        out.extend([1] * (b - 1))
    if not out:
        raise ValueError("empty decomposition")
    return tuple(out)


def dual_index(k: Sequence[int]) -> Index:
    """Dual index: decompose into (a_i, b_i), swap the roles of a and b, reverse."""
    pairs = ab_decomposition(k)
    return from_ab_decomposition((b, a) for a, b in reversed(pairs))


def word_to_index(w: Word | str) -> Index:
    if isinstance(w, str):
        w = Word.from_letters(w)
    s = w.letters
    if not s or s[0] != "x" or s[-1] != "y":
        raise NotAdmissibleError(f"word {s!r} is not admissible")
    out: list[int] = []
    run = 0
    for ch in s:
        if ch == "x":
            run += 1
        else:
            out.append(run + 1)
            run = 0
    return tuple(out)


def index_to_word(k: Sequence[int]) -> Word:
    k = _check_index(k)
    return Word.from_letters("".join("x" * (p - 1) + "y" for p in k))


def ohno_compositions(k: Sequence[int], l: int) -> list[Index]:
    """All ``(k1+e1, ..., km+em)`` with ``e >= 0`` and ``sum(e) = l``, lexicographic in ``e``."""
    k = _check_index(k)
    if l < 0:
        raise ValueError("shift must be nonnegative")
    return [tuple(p + e for p, e in zip(k, eps)) for eps in _compositions(l, len(k))]


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def enumerate_admissible(max_weight: int) -> list[Index]:
    """Admissible indices of weight 2..max_weight, ordered by weight, depth, then parts."""
    if max_weight < 2:
        raise ValueError("max_weight must be at least 2")
    out: list[Index] = []
    for w in range(2, max_weight + 1):
        level = []
        for m in range(1, w):
            for rest in itertools.product(range(1, w), repeat=m - 1):
                first = w - sum(rest)
                if first >= 2:
                    level.append((first,) + rest)
        out.extend(sorted(level, key=lambda k: (len(k), k)))
    return out


def enumerate_admissible_words(max_weight: int, min_weight: int = 2) -> list[Word]:
    """Admissible words of weight ``min_weight..max_weight`` in graded lexicographic order."""
    out = []
    for w in range(max(2, min_weight), max_weight + 1):
        for mid in itertools.product("xy", repeat=w - 2):
            out.append(Word.from_letters("x" + "".join(mid) + "y"))
    return out


def parse_index(text: str) -> Index:
    """Parse ``"3,1,1"`` or ``"(3,1,1)"``."""
    body = text.strip().strip("()")
    try:
        parts = tuple(int(p) for p in body.split(","))
    except ValueError as exc:
        raise ValueError(f"cannot parse index {text!r}") from exc
    return parts


def format_index(k: Sequence[int]) -> str:
    return "(" + ",".join(str(p) for p in k) + ")"


@dataclass(frozen=True)
class BiSeq:
    """Sequence ``{k_i, l_i}`` describing the word ``x^{k1} y^{l1} ... x^{km} y^{lm}``.

    Zero entries are allowed on construction; :meth:`normalized` merges them
    the way the bracket conventions do (``l_i = 0`` glues group ``i+1`` onto
    group ``i``, ``k_i = 0`` glues the y-runs).  ``k1 >= 1`` and ``lm >= 1``
    are required.
    """

    groups: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        groups = tuple((int(k), int(l)) for k, l in self.groups)
        object.__setattr__(self, "groups", groups)
        if not groups:
            raise ValueError("BiSeq needs at least one group")
        if any(k < 0 or l < 0 for k, l in groups):
            raise ValueError(f"negative entry in {groups}")
        if groups[0][0] < 1 or groups[-1][1] < 1:
            raise ValueError(f"BiSeq needs k1 >= 1 and lm >= 1, got {groups}")

    @classmethod
    def from_word(cls, w: Word | str) -> "BiSeq":
        if isinstance(w, str):
            w = Word.from_letters(w)
        return cls(w.blocks)

    @classmethod
    def parse(cls, text: str) -> "BiSeq":
        """Parse ``"k1,l1;k2,l2"`` (braces optional)."""
        body = text.strip().strip("{}")
        groups = []
        for chunk in body.split(";"):
            fields = chunk.split(",")
            if len(fields) != 2:
                raise ValueError(f"cannot parse BiSeq {text!r}")
            groups.append((int(fields[0]), int(fields[1])))
        return cls(tuple(groups))

    @property
    def m(self) -> int:
        return len(self.groups)

    @property
    def ks(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.groups)

    @property
    def ls(self) -> tuple[int, ...]:
        return tuple(l for _, l in self.groups)

    @property
    def weight(self) -> int:
        return sum(k + l for k, l in self.groups)

    @property
    def depth(self) -> int:
        return sum(self.ls)

    def word(self) -> Word:
        return Word(self.groups)

    def normalized(self) -> "BiSeq":
        return BiSeq(self.word().blocks)

    def is_normalized(self) -> bool:
        return all(k >= 1 and l >= 1 for k, l in self.groups)

    def swap_reverse(self) -> "BiSeq":
        """``{l_i, k_i}`` for ``i = m..1``; the sequence of ``tau(word)``."""
        return BiSeq(tuple((l, k) for k, l in reversed(self.groups)))

    def index(self) -> Index:
        return word_to_index(self.word())

    def __str__(self) -> str:
        return "{" + ";".join(f"{k},{l}" for k, l in self.groups) + "}"


def biseq_le(s1: BiSeq, s2: BiSeq) -> bool:
    """Partial order: fewer groups, or same group count and entrywise ``<=``."""
    if s1.m != s2.m:
        return s1.m < s2.m
    return all(k2 >= k1 and l2 >= l1 for (k1, l1), (k2, l2) in zip(s1.groups, s2.groups))


def enumerate_biseqs(max_weight: int, min_weight: int = 2) -> list[BiSeq]:
    """Normalized sequences of weight ``min_weight..max_weight`` (one per admissible word)."""
    return [BiSeq.from_word(w) for w in enumerate_admissible_words(max_weight, min_weight)]

"""Exact arithmetic in the harmonic algebra Q<x, y>.

Words are monomials in the two noncommuting letters ``x`` and ``y``; an
:class:`HPoly` is a finite rational linear combination of words.  Besides
concatenation the module provides the harmonic (stuffle) product, the
anti-involution ``tau`` (reverse the word and swap the letters), the
derivations ``D_n`` with ``D_n(x) = 0``, ``D_n(y) = x^n y`` and the
automorphism ``exp(sum_n lambda^n D_n / n)`` truncated in ``lambda``.

Everything here is exact: coefficients are :class:`fractions.Fraction`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

__all__ = [
    "Word",
    "HPoly",
    "LambdaPoly",
    "concat",
    "stuffle",
    "tau",
    "derivation_Dn",
    "sigma_exp",
    "sigma_subst",
    "is_admissible",
    "parse_hpoly",
]

Coeff = Union[int, Fraction]


def _blocks_of(letters: str) -> tuple[tuple[int, int], ...]:
    blocks: list[tuple[int, int]] = []
    for m in re.finditer(r"(x*)(y*)", letters):
        a, b = len(m.group(1)), len(m.group(2))
        if a or b:
            blocks.append((a, b))
    return tuple(blocks)


@dataclass(frozen=True, order=False)
class Word:
    """A monomial ``x^{a1} y^{b1} ... x^{as} y^{bs}`` stored as run-length blocks.

    Only the leading x-run and the trailing y-run may be zero; the empty word
    has no blocks.
    """

    blocks: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", _normalize_blocks(self.blocks))

    @classmethod
    def from_letters(cls, letters: str) -> "Word":
        if set(letters) - {"x", "y"}:
            raise ValueError(f"word must be spelled with x and y only: {letters!r}")
        return cls(_blocks_of(letters))

    @property
    def letters(self) -> str:
        return _spell(self.blocks)

    @property
    def weight(self) -> int:
        return sum(a + b for a, b in self.blocks)

    @property
    def depth(self) -> int:
        return sum(b for _, b in self.blocks)

    def __len__(self) -> int:
        return self.weight

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.blocks + other.blocks)

    def sort_key(self) -> tuple[int, str]:
        return (self.weight, self.letters)

    def __str__(self) -> str:
        return self.letters or "1"

    def __repr__(self) -> str:
        return f"Word({self.letters!r})"


def _normalize_blocks(blocks: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    raw = []
    for a, b in blocks:
        if a < 0 or b < 0:
            raise ValueError("runs must be nonnegative")
        raw.append("x" * a + "y" * b)
    return _blocks_of("".join(raw))


@lru_cache(maxsize=None)
def _spell(blocks: tuple[tuple[int, int], ...]) -> str:
    return "".join("x" * a + "y" * b for a, b in blocks)


ONE_WORD = Word()


class HPoly:
    """Finite Q-linear combination of words.  Immutable and hashable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word | str, Coeff] | None = None) -> None:
        clean: dict[Word, Fraction] = {}
        for w, c in (terms or {}).items():
            if isinstance(w, str):
                w = Word.from_letters(w)
            c = Fraction(c)
            if c:
                clean[w] = clean.get(w, Fraction(0)) + c
                if not clean[w]:
                    del clean[w]
        self._terms = dict(sorted(clean.items(), key=lambda kv: kv[0].sort_key()))
        self._hash: int | None = None

    @classmethod
    def word(cls, w: Word | str, coeff: Coeff = 1) -> "HPoly":
        if isinstance(w, str):
            w = Word.from_letters(w)
        return cls({w: coeff})

    @classmethod
    def one(cls) -> "HPoly":
        return cls({ONE_WORD: 1})

    @classmethod
    def zero(cls) -> "HPoly":
        return cls()

    @property
    def terms(self) -> Mapping[Word, Fraction]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Word, Fraction]]:
        return iter(self._terms.items())

    def __iter__(self) -> Iterator[Word]:
        return iter(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coeff(self, w: Word | str) -> Fraction:
        if isinstance(w, str):
            w = Word.from_letters(w)
        return self._terms.get(w, Fraction(0))

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = HPoly({ONE_WORD: other})
        if not isinstance(other, HPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def __add__(self, other: "HPoly") -> "HPoly":
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out.get(w, Fraction(0)) + c
        return HPoly(out)

    def __neg__(self) -> "HPoly":
        return HPoly({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "HPoly") -> "HPoly":
        return self + (-other)

    def scale(self, c: Coeff) -> "HPoly":
        return HPoly({w: c * v for w, v in self._terms.items()})

    def __mul__(self, other: Union["HPoly", Coeff]) -> "HPoly":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return concat(self, other)

    def __rmul__(self, other: Coeff) -> "HPoly":
        return self.scale(other)

    @property
    def weight(self) -> int:
        """Largest weight among the words present (0 for the zero element)."""
        return max((w.weight for w in self._terms), default=0)

    def __str__(self) -> str:
        return format_hpoly(self)

    def __repr__(self) -> str:
        return f"HPoly({format_hpoly(self)!r})"


def format_hpoly(p: HPoly) -> str:
    """Render as ``"c1*w1 + c2*w2"``, highest word first, unit coefficients omitted."""
    if not p:
        return "0"
    parts: list[str] = []
    for w, c in sorted(p.items(), key=lambda kv: kv[0].sort_key(), reverse=True):
        word = w.letters
        mag = abs(c)
        if not word:
            body = str(mag)
        elif mag == 1:
            body = word
        else:
            body = f"{mag}*{word}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


_TERM = re.compile(r"^(?:(\d+(?:/\d+)?)\*)?([xy]+|\d+(?:/\d+)?)$")


def parse_hpoly(text: str) -> HPoly:
    """Inverse of :func:`format_hpoly`.  Also accepts bare words such as ``"xxy"``.

    The empty string and ``"1"`` both denote the empty word.
    """
    s = text.replace(" ", "")
    if s in ("", "1"):
        return HPoly.one()
    if s == "0":
        return HPoly.zero()
    pieces = re.findall(r"([+-]?)([^+-]+)", s)
    if "".join(sign + body for sign, body in pieces) != s:
        raise ValueError(f"cannot parse {text!r}")
    terms: dict[Word, Fraction] = {}
    for sign, body in pieces:
        m = _TERM.match(body)
        if not m:
            raise ValueError(f"cannot parse term {body!r} in {text!r}")
        num, rest = m.groups()
        if rest[0] in "xy":
            c = Fraction(num) if num else Fraction(1)
            w = Word.from_letters(rest)
        else:
            if num:
                raise ValueError(f"cannot parse term {body!r}")
            c, w = Fraction(rest), ONE_WORD
        if sign == "-":
            c = -c
        terms[w] = terms.get(w, Fraction(0)) + c
    return HPoly(terms)


def _as_hpoly(p: HPoly | Word | str) -> HPoly:
    if isinstance(p, HPoly):
        return p
    return HPoly.word(p)


def concat(a: HPoly | Word | str, b: HPoly | Word | str) -> HPoly:
    """Bilinear extension of word concatenation."""
    a, b = _as_hpoly(a), _as_hpoly(b)
    out: dict[Word, Fraction] = {}
    for u, cu in a.items():
        for v, cv in b.items():
            w = u * v
            out[w] = out.get(w, Fraction(0)) + cu * cv
    return HPoly(out)


@lru_cache(maxsize=200_000)
def _stuffle_letters(u: str, v: str) -> tuple[tuple[str, int], ...]:
    # keys are ordered so that the cache exploits commutativity
    if u > v:
        u, v = v, u
    if not u:
        return ((v, 1),)
    if "y" not in u:  # u = x^p
        return ((v + u, 1),)
    if "y" not in v:
        return ((u + v, 1),)
    p, q = u.index("y"), v.index("y")
    w1, w2 = u[p + 1:], v[q + 1:]
    out: dict[str, int] = {}
    head_u, head_v = u[: p + 1], v[: q + 1]
    for w, c in _stuffle_letters(w1, v):
        out[head_u + w] = out.get(head_u + w, 0) + c
    merged = "x" * (p + q + 1) + "y"
    for w, c in _stuffle_letters(w1, w2):
        out[merged + w] = out.get(merged + w, 0) + c
    for w, c in _stuffle_letters(u, w2):
        out[head_v + w] = out.get(head_v + w, 0) + c
    return tuple(sorted(out.items()))


def stuffle(a: HPoly | Word | str, b: HPoly | Word | str) -> HPoly:
    """Harmonic product defined by the rules

    * ``1 * w = w * 1 = w``
    * ``x^p * w = w * x^p = w x^p``
    * ``x^p y w1 * x^q y w2 = x^p y (w1 * x^q y w2) + x^(p+q+1) y (w1 * w2)
      + x^q y (x^p y w1 * w2)``

    extended bilinearly.
    """
    a, b = _as_hpoly(a), _as_hpoly(b)
    out: dict[Word, Fraction] = {}
    for u, cu in a.items():
        for v, cv in b.items():
            for w, c in _stuffle_letters(u.letters, v.letters):
                key = Word.from_letters(w)
                out[key] = out.get(key, Fraction(0)) + cu * cv * c
    return HPoly(out)


def _tau_letters(s: str) -> str:
    return s[::-1].translate(str.maketrans("xy", "yx"))


def tau(p: HPoly | Word | str) -> HPoly:
    """Anti-involution: reverse every word and swap ``x`` and ``y``."""
    p = _as_hpoly(p)
    return HPoly({Word.from_letters(_tau_letters(w.letters)): c for w, c in p.items()})


def _derive_letters(s: str, n: int) -> Iterator[str]:
    for i, ch in enumerate(s):
        if ch == "y":
            yield s[:i] + "x" * n + s[i:]


def derivation_Dn(n: int, p: HPoly | Word | str) -> HPoly:
    """Derivation with ``D_n(x) = 0`` and ``D_n(y) = x^n y``."""
    if n < 1:
        raise ValueError(f"D_n is defined for n >= 1, got n={n}")
    p = _as_hpoly(p)
    out: dict[Word, Fraction] = {}
    for w, c in p.items():
        for v in _derive_letters(w.letters, n):
            key = Word.from_letters(v)
            out[key] = out.get(key, Fraction(0)) + c
    return HPoly(out)


def is_admissible(p: HPoly | Word | str) -> bool:
    """True iff every word is empty or of the form x...y."""
    p = _as_hpoly(p)
    return all(not w.letters or (w.letters[0] == "x" and w.letters[-1] == "y") for w in p)


class LambdaPoly:
    """Polynomial in ``lambda`` with :class:`HPoly` coefficients, truncated above ``order``."""

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: Iterable[HPoly], order: int) -> None:
        if order < 0:
            raise ValueError("truncation order must be nonnegative")
        cs = list(coeffs)[: order + 1]
        cs += [HPoly.zero()] * (order + 1 - len(cs))
        self.coeffs: tuple[HPoly, ...] = tuple(cs)
        self.order = order

    @classmethod
    def constant(cls, p: HPoly, order: int) -> "LambdaPoly":
        return cls([p], order)

    def __getitem__(self, degree: int) -> HPoly:
        return self.coeffs[degree]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LambdaPoly):
            return NotImplemented
        return self.order == other.order and self.coeffs == other.coeffs

    def __add__(self, other: "LambdaPoly") -> "LambdaPoly":
        order = min(self.order, other.order)
        return LambdaPoly((a + b for a, b in zip(self.coeffs, other.coeffs)), order)

    def scale(self, c: Coeff) -> "LambdaPoly":
        return LambdaPoly((a.scale(c) for a in self.coeffs), self.order)

    def __mul__(self, other: "LambdaPoly") -> "LambdaPoly":
        """Concatenation product, truncated."""
        order = min(self.order, other.order)
        out = [HPoly.zero() for _ in range(order + 1)]
        for i, a in enumerate(self.coeffs[: order + 1]):
            if not a:
                continue
            for j, b in enumerate(other.coeffs[: order + 1 - i]):
                if b:
                    out[i + j] = out[i + j] + concat(a, b)
        return LambdaPoly(out, order)

    def map(self, fn) -> "LambdaPoly":
        return LambdaPoly((fn(c) for c in self.coeffs), self.order)

    def __repr__(self) -> str:
        body = ", ".join(f"[{d}] {c}" for d, c in enumerate(self.coeffs) if c)
        return f"LambdaPoly({body or '0'}; order={self.order})"


def sigma_exp(p: HPoly | Word | str, L: int) -> LambdaPoly:
    """``exp(sum_{n>=1} lambda^n D_n / n)(p)`` modulo ``lambda^(L+1)``.

    Computed by summing ``Delta^r(p) / r!`` where ``Delta`` is the derivation
    series; each application of ``Delta`` raises the lambda-degree by at least
    one, so ``r <= L`` terms suffice.
    """
    p = _as_hpoly(p)
    if L < 0:
        raise ValueError("truncation order must be nonnegative")

    def delta(lp: LambdaPoly) -> LambdaPoly:
        out = [HPoly.zero() for _ in range(L + 1)]
        for d, c in enumerate(lp.coeffs):
            if not c:
                continue
            for n in range(1, L + 1 - d):
                out[d + n] = out[d + n] + derivation_Dn(n, c).scale(Fraction(1, n))
        return LambdaPoly(out, L)

    term = LambdaPoly.constant(p, L)
    total = term
    for r in range(1, L + 1):
        term = delta(term).scale(Fraction(1, r))
        total = total + term
    return total


def sigma_subst(p: HPoly | Word | str, L: int) -> LambdaPoly:
    """Substitute ``x -> x`` and ``y -> sum_{j<=L} x^j y lambda^j``, truncated at ``lambda^L``."""
    p = _as_hpoly(p)
    if L < 0:
        raise ValueError("truncation order must be nonnegative")
    x_img = LambdaPoly.constant(HPoly.word("x"), L)
    y_img = LambdaPoly((HPoly.word("x" * j + "y") for j in range(L + 1)), L)
    total = LambdaPoly([], L)
    for w, c in p.items():
        img = LambdaPoly.constant(HPoly.one(), L)
        for ch in w.letters:
            img = img * (x_img if ch == "x" else y_img)
        total = total + img.scale(c)
    return total

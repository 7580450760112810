"""Reduced words in the free group on generators indexed by ``I x J``.

A letter ``(i, j)`` stands for ``g_i^j`` with ``i`` in ``1..m`` and ``j`` in
``{+1, -1}``.  Words are kept reduced and compose in written order: the word
``l0 l1 ... lk`` is the map ``g_{l0} o g_{l1} o ... o g_{lk}``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np


@dataclass(frozen=True)
class Letter:
    i: int
    j: int

    def __post_init__(self):
        if self.j not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.j!r}")
        if self.i < 1:
            raise ValueError(f"generator index must be >= 1, got {self.i}")

    def inverse(self) -> "Letter":
        return Letter(self.i, -self.j)

    @property
    def key(self) -> tuple[int, int]:
        # '+' sorts before '-'
        return (self.i, 0 if self.j > 0 else 1)

    def __str__(self) -> str:
        return f"{self.i}{'+' if self.j > 0 else '-'}"

    @classmethod
    def parse(cls, s: str) -> "Letter":
        m = re.fullmatch(r"\s*(\d+)\s*([+-])\s*", s)
        if not m:
            raise ValueError(f"bad letter {s!r}")
        return cls(int(m.group(1)), 1 if m.group(2) == "+" else -1)


def sign_from(value) -> int:
    """Accept ``'+'``, ``'-'``, ``1``, ``-1`` (and ``'+1'``/``'-1'``)."""
    if value in ("+", "+1", 1, "plus"):
        return 1
    if value in ("-", "-1", -1, "minus"):
        return -1
    raise ValueError(f"bad sign {value!r}")


def letters(m: int) -> list[Letter]:
    return [Letter(i, j) for i in range(1, m + 1) for j in (1, -1)]


@dataclass(frozen=True)
class Word:
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        ls = tuple(self.letters)
        object.__setattr__(self, "letters", ls)
        for a, b in zip(ls, ls[1:]):
            if a.inverse() == b:
                raise ValueError(f"word is not reduced: {a}{b}")

    @classmethod
    def of(cls, *items) -> "Word":
        """``Word.of((1, 1), (2, -1))`` or ``Word.of('1+', '2-')``."""
        out = []
        for it in items:
            if isinstance(it, Letter):
                out.append(it)
            elif isinstance(it, str):
                out.append(Letter.parse(it))
            else:
                out.append(Letter(int(it[0]), sign_from(it[1])))
        return cls(tuple(out))

    @classmethod
    def parse(cls, s: str) -> "Word":
        body = s.strip()
        if body.startswith("[") and body.endswith("]"):
            body = body[1:-1]
        toks = re.findall(r"\d+\s*[+-]", body)
        if re.sub(r"[\s,]", "", body) != "".join(t.replace(" ", "") for t in toks):
            raise ValueError(f"bad word {s!r}")
        return cls(tuple(Letter.parse(t) for t in toks))

    @classmethod
    def reduce(cls, seq: Iterable[Letter]) -> "Word":
        stack: list[Letter] = []
        for a in seq:
            if stack and stack[-1] == a.inverse():
                stack.pop()
            else:
                stack.append(a)
        return cls(tuple(stack))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[Letter]:
        return iter(self.letters)

    def __getitem__(self, k):
        return self.letters[k]

    def __mul__(self, other: "Word") -> "Word":
        return Word.reduce(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(tuple(a.inverse() for a in reversed(self.letters)))

    def append(self, a: Letter) -> "Word":
        return Word(self.letters + (a,))

    @property
    def is_identity(self) -> bool:
        return not self.letters

    def is_cyclically_reduced(self) -> bool:
        if len(self.letters) <= 1:
            return True
        return self.letters[-1] != self.letters[0].inverse()

    def cyclic_reduction(self) -> tuple["Word", "Word"]:
        """Split ``w = u c u^-1`` with ``c`` cyclically reduced; returns ``(u, c)``."""
        ls = self.letters
        k = 0
        while len(ls) - 2 * k >= 2 and ls[len(ls) - 1 - k] == ls[k].inverse():
            k += 1
        return Word(ls[:k]), Word(ls[k : len(ls) - k])

    @property
    def sort_key(self):
        return (len(self.letters), tuple(a.key for a in self.letters))

    def __lt__(self, other: "Word") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return "[" + " ".join(str(a) for a in self.letters) + "]"

    def max_index(self) -> int:
        return max((a.i for a in self.letters), default=0)


def reduced_words(m: int, length: int) -> Iterator[Word]:
    """All reduced words of exactly ``length`` letters, in lexicographic order."""
    alphabet = letters(m)
    if length == 0:
        yield Word()
        return

    def rec(prefix: tuple[Letter, ...]):
        if len(prefix) == length:
            yield Word(prefix)
            return
        for a in alphabet:
            if prefix and prefix[-1] == a.inverse():
                continue
            yield from rec(prefix + (a,))

    yield from rec(())


def words_up_to(m: int, max_length: int) -> list[Word]:
    return [w for n in range(max_length + 1) for w in reduced_words(m, n)]


def count_reduced(m: int, length: int) -> int:
    return 1 if length == 0 else 2 * m * (2 * m - 1) ** (length - 1)


def cyclically_reduced_words(m: int, length: int) -> Iterator[Word]:
    return (w for w in reduced_words(m, length) if w.is_cyclically_reduced())


def random_reduced_word(m: int, length: int, rng: np.random.Generator, first: Letter | None = None) -> Word:
    alphabet = letters(m)
    out: list[Letter] = [] if first is None else [first]
    while len(out) < length:
        a = alphabet[int(rng.integers(len(alphabet)))]
        if out and out[-1] == a.inverse():
            continue
        out.append(a)
    return Word(tuple(out[:length]))


def power(a: Letter, n: int) -> Word:
    base = a if n >= 0 else a.inverse()
    return Word(tuple(itertools.repeat(base, abs(n))))

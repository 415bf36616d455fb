"""
    Reduced words, conjugacy classes and automorphisms of a free group.

    Generator i (0-based) is the letter i + 1 and its inverse is -(i + 1).
    As strings, a, b, c, ... are generators and A, B, C, ... their inverses,
    so "abA" means a·b·a⁻¹.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property, reduce
from math import gcd
from typing import Iterable, Sequence

from app.datamanager.exception_classes import (
    TrivialClassError, WordParseError, RankMismatchError, InvalidAutomorphismError
)

logger = logging.getLogger(__name__)

Letter = int

ALPHABET = "abcdefghijklmnopqrstuvwxyz"


# -----   LETTERS   -----

def letter(index: int, sign: int = 1) -> Letter:
    """ Letter for generator `index` (0-based) with exponent `sign` (±1). """
    return (index + 1) * (1 if sign > 0 else -1)


def generator_index(x: Letter) -> int:
    return abs(x) - 1


def letter_key(x: Letter) -> int:
    """ Total order a < A < b < B < ... used for canonical forms. """
    return 2 * (abs(x) - 1) + (1 if x < 0 else 0)


def letter_to_char(x: Letter) -> str:
    c = ALPHABET[abs(x) - 1]
    return c if x > 0 else c.upper()


def parse_letters(text: str) -> tuple[Letter, ...]:
    """
    Parses a word string. Whitespace and a lone '1' (the empty word) are ignored.
    :param text: e.g. "abA"
    :return: tuple of letters, not reduced
    """
    letters = []
    for position, ch in enumerate(text):
        if ch.isspace() or ch == "1":
            continue
        low = ch.lower()
        if not ch.isascii() or low not in ALPHABET:
            raise WordParseError(text, position)
        index = ALPHABET.index(low) + 1
        letters.append(index if ch.islower() else -index)
    return tuple(letters)


def format_letters(letters: Sequence[Letter]) -> str:
    return "".join(letter_to_char(x) for x in letters) or "1"


# -----   SEQUENCE HELPERS (shared with dart paths in graphs)   -----

def reduce_letters(seq: Iterable[int]) -> tuple[int, ...]:
    """ Cancels adjacent x, -x pairs; works for letters and for darts. """
    stack: list[int] = []
    for x in seq:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


def cyclic_core(seq: Sequence[int]) -> tuple[int, ...]:
    """ Strips matching ends of a freely reduced sequence. """
    i, j = 0, len(seq) - 1
    while i < j and seq[i] == -seq[j]:
        i += 1
        j -= 1
    return tuple(seq[i:j + 1])


def invert_letters(seq: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in reversed(seq))


def _least_rotation(keys: Sequence[int]) -> int:
    """ Start index of the lexicographically least rotation (two-pointer minimum expression). """
    n = len(keys)
    i, j, k = 0, 1, 0
    while i < n and j < n and k < n:
        a = keys[(i + k) % n]
        b = keys[(j + k) % n]
        if a == b:
            k += 1
            continue
        if a > b:
            i += k + 1
        else:
            j += k + 1
        if i == j:
            j += 1
        k = 0
    return min(i, j)


def oriented_cycle(seq: Sequence[int]) -> tuple[int, ...]:
    """ Least rotation of the cyclic core, keeping the orientation: a class and its inverse stay apart. """
    cycle = cyclic_core(reduce_letters(seq))
    if not cycle:
        return ()
    start = _least_rotation([letter_key(x) for x in cycle])
    return cycle[start:] + cycle[:start]


def canonical_cycle(seq: Sequence[int]) -> tuple[int, ...]:
    """
    Least rotation of the cycle or of its inverse, compared by letter_key.
    A cycle and its inverse get the same canonical form.
    """
    if not seq:
        return ()
    candidates = []
    for cycle in (tuple(seq), invert_letters(seq)):
        keys = [letter_key(x) for x in cycle]
        start = _least_rotation(keys)
        rotated = cycle[start:] + cycle[:start]
        candidates.append((tuple(letter_key(x) for x in rotated), rotated))
    return min(candidates)[1]


# -----   WORDS   -----

@dataclass(frozen=True)
class Word:
    """ Freely reduced word; the constructor reduces its input. """
    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", reduce_letters(self.letters))

    @classmethod
    def parse(cls, text: str) -> "Word":
        return cls(parse_letters(text))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_letters(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def inverse(self) -> "Word":
        return Word(invert_letters(self.letters))

    def is_trivial(self) -> bool:
        return not self.letters

    def support_rank(self) -> int:
        """ Smallest rank whose generators contain every letter. """
        return max((abs(x) for x in self.letters), default=0)


@dataclass(frozen=True)
class CyclicWord:
    """
    Conjugacy class of a nontrivial element, up to inversion.
    Stored as the canonical cyclically reduced representative, so equal
    classes are structurally equal.
    """
    letters: tuple[Letter, ...]

    def __post_init__(self):
        core = cyclic_core(reduce_letters(self.letters))
        if not core:
            raise TrivialClassError(format_letters(self.letters))
        object.__setattr__(self, "letters", canonical_cycle(core))

    @classmethod
    def parse(cls, text: str) -> "CyclicWord":
        return cls(parse_letters(text))

    def __len__(self) -> int:
        return len(self.letters)

    def __str__(self) -> str:
        return format_letters(self.letters)

    def sort_key(self) -> tuple:
        """ Shortest first, then canonical letter order. """
        return len(self.letters), tuple(letter_key(x) for x in self.letters)

    def support_rank(self) -> int:
        return max(abs(x) for x in self.letters)

    def abelianization(self, rank: int) -> tuple[int, ...]:
        exponents = [0] * rank
        for x in self.letters:
            exponents[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(exponents)

    def abelian_gcd(self) -> int:
        return reduce(gcd, self.abelianization(self.support_rank()), 0)


def free_reduce(letters: Iterable[Letter]) -> Word:
    """ Unique freely reduced form of a raw letter list. """
    return Word(tuple(letters))


def cyclic_reduce(w: Word) -> CyclicWord:
    """
    Canonical representative of the conjugacy class of w.
    Raises TrivialClassError for the trivial word.
    """
    return CyclicWord(w.letters)


# -----   AUTOMORPHISMS   -----

@dataclass(frozen=True)
class Automorphism:
    """
    Automorphism given by the images of the generators.
    Construction does not check the basis property; use `from_images` for that.
    """
    images: tuple[Word, ...]

    @classmethod
    def identity(cls, rank: int) -> "Automorphism":
        return cls(tuple(Word((i + 1,)) for i in range(rank)))

    @classmethod
    def parse(cls, images: Sequence[str] | str, validate: bool = True) -> "Automorphism":
        """
        Builds an automorphism from image strings, e.g. ["b", "c", "ab"] or "b,c,ab".
        :param images: one image per generator
        :param validate: check that the images form a free basis
        :return: Automorphism
        """
        if isinstance(images, str):
            images = [part.strip() for part in images.split(",")]
        return cls.from_images([Word.parse(text) for text in images], validate=validate)

    @classmethod
    def from_images(cls, images: Sequence[Word], validate: bool = True) -> "Automorphism":
        phi = cls(tuple(images))
        for image in phi.images:
            if image.support_rank() > phi.rank:
                raise RankMismatchError(phi.rank, image.support_rank(), f"image '{image}'")
        if validate:
            from app.freegroup.whitehead import is_basis
            if not is_basis(phi.images):
                raise InvalidAutomorphismError(", ".join(str(w) for w in phi.images))
        return phi

    @property
    def rank(self) -> int:
        return len(self.images)

    def __str__(self) -> str:
        return ", ".join(f"{letter_to_char(i + 1)}->{image}" for i, image in enumerate(self.images))

    @cached_property
    def substitution(self) -> dict[Letter, tuple[Letter, ...]]:
        """ Image of every letter and inverse letter as a raw tuple. """
        table: dict[Letter, tuple[Letter, ...]] = {}
        for i, image in enumerate(self.images):
            table[i + 1] = image.letters
            table[-(i + 1)] = invert_letters(image.letters)
        return table

    def apply_letters(self, letters: Iterable[Letter]) -> tuple[Letter, ...]:
        """ Substitutes and freely reduces in one pass. """
        table = self.substitution
        stack: list[Letter] = []
        for x in letters:
            for y in table[x]:
                if stack and stack[-1] == -y:
                    stack.pop()
                else:
                    stack.append(y)
        return tuple(stack)

    def __call__(self, w: Word) -> Word:
        if w.support_rank() > self.rank:
            raise RankMismatchError(self.rank, w.support_rank(), f"word '{w}'")
        return Word(self.apply_letters(w.letters))

    def compose(self, other: "Automorphism") -> "Automorphism":
        """ self ∘ other: apply `other` first. """
        if other.rank != self.rank:
            raise RankMismatchError(self.rank, other.rank, "automorphism")
        return Automorphism(tuple(self(image) for image in other.images))

    def power(self, k: int) -> "Automorphism":
        base = self if k >= 0 else self.inverse()
        result = Automorphism.identity(self.rank)
        for _ in range(abs(k)):
            result = base.compose(result)
        return result

    def is_identity(self) -> bool:
        return all(image.letters == (i + 1,) for i, image in enumerate(self.images))

    def inverse(self) -> "Automorphism":
        return self._inverse

    @cached_property
    def _inverse(self) -> "Automorphism":
        from app.freegroup.whitehead import reduce_basis
        reduced, psi = reduce_basis(self.images)
        if not _is_signed_permutation(reduced):
            raise InvalidAutomorphismError(", ".join(str(w) for w in self.images))
        # psi ∘ self is the signed permutation x_i -> reduced[i]; undo it after psi.
        undo: list[Word | None] = [None] * self.rank
        for i, image in enumerate(reduced):
            x = image.letters[0]
            undo[abs(x) - 1] = Word((letter(i, 1 if x > 0 else -1),))
        return Automorphism(tuple(undo)).compose(psi)


def _is_signed_permutation(words: Sequence[Word]) -> bool:
    if any(len(w) != 1 for w in words):
        return False
    return len({abs(w.letters[0]) for w in words}) == len(words)


def apply_auto(phi: Automorphism, w: CyclicWord) -> CyclicWord:
    """ Image class φ(w), cyclically reduced and canonical. """
    if w.support_rank() > phi.rank:
        raise RankMismatchError(phi.rank, w.support_rank(), f"class '{w}'")
    return CyclicWord(phi.apply_letters(w.letters))

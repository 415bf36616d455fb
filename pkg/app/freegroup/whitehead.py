"""
    Whitehead automorphisms and the decision procedures built on them:
    primitivity, basis and joint-basis tests.

    Reduction is greedy steepest descent on total length over the
    multiplier moves, with a bounded breadth-first search over
    equal-length forms when no move shortens the tuple.
"""
from __future__ import annotations

import itertools
import logging
from collections import deque
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from app.core.config import PLATEAU_CAP
from app.datamanager.exception_classes import InvalidRankError, NotPrimitiveError, RankMismatchError
from app.freegroup.words import (
    Automorphism, CyclicWord, Word, canonical_cycle, cyclic_core, letter
)

logger = logging.getLogger(__name__)

MIN_RANK = 3

Form = tuple[tuple[int, ...], ...]


# -----   MOVES   -----

@lru_cache(maxsize=None)
def signed_permutations(rank: int) -> tuple[Automorphism, ...]:
    """ Permutations and inversions of the generators, identity excluded. """
    moves = []
    for perm in itertools.permutations(range(rank)):
        for signs in itertools.product((1, -1), repeat=rank):
            phi = Automorphism(tuple(Word((letter(perm[i], signs[i]),)) for i in range(rank)))
            if not phi.is_identity():
                moves.append(phi)
    return tuple(moves)


@lru_cache(maxsize=None)
def multiplier_moves(rank: int) -> tuple[Automorphism, ...]:
    """
    Moves (A, a): every generator x other than a goes to one of
    x, x·a, a⁻¹·x or a⁻¹·x·a, and a is fixed. All-trivial choices are excluded.
    """
    moves = []
    for index in range(rank):
        for sign in (1, -1):
            a = letter(index, sign)
            others = [g for g in range(rank) if g != index]
            for choices in itertools.product(range(4), repeat=len(others)):
                if not any(choices):
                    continue
                images = [Word((g + 1,)) for g in range(rank)]
                for g, choice in zip(others, choices):
                    x = g + 1
                    images[g] = Word({0: (x,), 1: (x, a), 2: (-a, x), 3: (-a, x, a)}[choice])
                moves.append(Automorphism(tuple(images)))
    return tuple(moves)


@lru_cache(maxsize=None)
def _whitehead_moves(rank: int) -> tuple[Automorphism, ...]:
    return signed_permutations(rank) + multiplier_moves(rank)


def whitehead_moves(rank: int) -> list[Automorphism]:
    """
    All Whitehead automorphisms of the given rank, identity excluded.
    :param rank: r >= 3
    :return: signed permutations followed by multiplier moves
    """
    if rank < MIN_RANK:
        raise InvalidRankError(rank, MIN_RANK)
    return list(_whitehead_moves(rank))


# -----   REDUCTION   -----

def _cyclic_image(phi: Automorphism, letters: tuple[int, ...]) -> tuple[int, ...]:
    return cyclic_core(phi.apply_letters(letters))


def _element_image(phi: Automorphism, letters: tuple[int, ...]) -> tuple[int, ...]:
    return phi.apply_letters(letters)


def _total(form: Form) -> int:
    return sum(len(part) for part in form)


def _reduce(form: Form, rank: int, image: Callable, normalize: Callable, floor: int,
            plateau_cap: int) -> tuple[Form, list[Automorphism]]:
    """
    Descends from `form` until the total length reaches `floor` or no move
    (even after exploring the plateau) shortens it.
    :return: reduced form and the moves applied, first move first
    """
    moves = multiplier_moves(rank)
    applied: list[Automorphism] = []
    while _total(form) > floor:
        best_form, best_move = None, None
        best_total = _total(form)
        for move in moves:
            candidate = tuple(image(move, part) for part in form)
            total = _total(candidate)
            if total < best_total:
                best_form, best_move, best_total = candidate, move, total
        if best_form is not None:
            form = best_form
            applied.append(best_move)
            continue
        escape = _plateau_escape(form, moves, image, normalize, plateau_cap)
        if escape is None:
            break
        form, path = escape
        applied.extend(path)
    return form, applied


def _plateau_escape(form: Form, moves, image: Callable, normalize: Callable,
                    cap: int) -> tuple[Form, list[Automorphism]] | None:
    """ Breadth-first search among forms of equal total length for one that a move shortens. """
    if cap <= 0:
        return None
    level = _total(form)
    seen = {normalize(form)}
    queue = deque([(form, [])])
    while queue and len(seen) <= cap:
        current, path = queue.popleft()
        for move in moves:
            candidate = tuple(image(move, part) for part in current)
            total = _total(candidate)
            if total < level:
                logger.debug("Plateau at length %d left after %d equal-length moves", level, len(path))
                return candidate, path + [move]
            if total == level:
                key = normalize(candidate)
                if key not in seen:
                    seen.add(key)
                    queue.append((candidate, path + [move]))
    logger.debug("Plateau search at length %d exhausted after %d forms", level, len(seen))
    return None


def _compose_moves(rank: int, applied: Sequence[Automorphism]) -> Automorphism:
    psi = Automorphism.identity(rank)
    for move in applied:
        psi = move.compose(psi)
    return psi


def _rank_for(rank: int | None, support: int) -> int:
    rank = max(MIN_RANK, support) if rank is None else rank
    if rank < MIN_RANK:
        raise InvalidRankError(rank, MIN_RANK)
    if support > rank:
        raise RankMismatchError(rank, support, "word")
    return rank


def reduce_classes(classes: Sequence[CyclicWord], rank: int | None = None,
                   plateau_cap: int = PLATEAU_CAP) -> tuple[tuple[CyclicWord, ...], Automorphism]:
    """
    Whitehead reduction of a tuple of conjugacy classes.
    :param classes: nontrivial classes
    :param rank: ambient rank; defaults to the smallest rank >= 3 containing the letters
    :param plateau_cap: forms explored per plateau
    :return: (reduced classes, ψ) with ψ applied to each input class giving the output
    """
    rank = _rank_for(rank, max(c.support_rank() for c in classes))
    form = tuple(c.letters for c in classes)
    reduced, applied = _reduce(
        form, rank, _cyclic_image, lambda f: tuple(canonical_cycle(part) for part in f),
        len(classes), plateau_cap,
    )
    return tuple(CyclicWord(part) for part in reduced), _compose_moves(rank, applied)


def reduce_basis(words: Sequence[Word], plateau_cap: int = PLATEAU_CAP) -> tuple[tuple[Word, ...], Automorphism]:
    """
    Whitehead reduction of a tuple of elements by total reduced length.
    :param words: r words in rank r
    :return: (reduced words, ψ) with ψ(words[i]) = reduced[i]
    """
    rank = len(words)
    form = tuple(w.letters for w in words)
    reduced, applied = _reduce(form, rank, _element_image, lambda f: f, rank, plateau_cap)
    return tuple(Word(part) for part in reduced), _compose_moves(rank, applied)


# -----   DECISION PROCEDURES   -----

@lru_cache(maxsize=200_000)
def _is_primitive(w: CyclicWord, rank: int) -> bool:
    if len(w) == 1:
        return True
    if w.abelian_gcd() != 1:
        return False
    (reduced,), _ = reduce_classes((w,), rank)
    return len(reduced) == 1


def is_primitive(w: CyclicWord, rank: int | None = None) -> bool:
    """
    True iff the class of w contains an element of a free basis.
    :param w: nontrivial class
    :param rank: ambient rank (primitivity does not depend on it once the letters fit)
    """
    return _is_primitive(w, _rank_for(rank, w.support_rank()))


def is_basis(words: Sequence[Word]) -> bool:
    """
    True iff the r words form a free basis of the rank-r free group.
    :param words: exactly r words
    """
    rank = len(words)
    if rank < MIN_RANK:
        raise InvalidRankError(rank, MIN_RANK)
    if any(w.is_trivial() or w.support_rank() > rank for w in words):
        return False
    matrix = np.zeros((rank, rank), dtype=np.int64)
    for i, w in enumerate(words):
        for x in w.letters:
            matrix[i, abs(x) - 1] += 1 if x > 0 else -1
    if abs(round(float(np.linalg.det(matrix)))) != 1:
        return False
    reduced, _ = reduce_basis(words)
    return all(len(w) == 1 for w in reduced) and len({abs(w.letters[0]) for w in reduced}) == rank


@lru_cache(maxsize=200_000)
def _joint_basis(alpha: CyclicWord, beta: CyclicWord, rank: int) -> bool:
    if alpha == beta:
        return False
    if len(alpha) == 1 and len(beta) == 1:
        return True
    (a, b), _ = reduce_classes((alpha, beta), rank)
    return len(a) == 1 and len(b) == 1 and a != b


def joint_basis(alpha: CyclicWord, beta: CyclicWord, rank: int | None = None) -> bool:
    """
    True iff representatives of α and β extend to a common free basis.
    Raises NotPrimitiveError when either class is not primitive.
    """
    rank = _rank_for(rank, max(alpha.support_rank(), beta.support_rank()))
    for w in (alpha, beta):
        if not is_primitive(w, rank):
            raise NotPrimitiveError(str(w))
    if beta.sort_key() < alpha.sort_key():
        alpha, beta = beta, alpha
    return _joint_basis(alpha, beta, rank)

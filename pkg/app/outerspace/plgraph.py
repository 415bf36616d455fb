"""
    The primitive loop complex PL: projection of a graph to its short
    primitive loops, bounded neighbor enumeration and distance estimates.

    Neighbor sets are restricted to words of bounded length, so distances
    above 1 are upper-bound estimates, never certified values.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Optional

import networkx as nx

from app.datamanager.exception_classes import NotPrimitiveError
from app.freegroup.whitehead import is_primitive, joint_basis, reduce_classes
from app.freegroup.words import CyclicWord, letter
from app.outerspace.graphs import MarkedMetricGraph, closed_walks
from app.schemas.pydantic_models import PLConfig, PLDistance, PLProjection

logger = logging.getLogger(__name__)

PROJECTION_LENGTH = Fraction(2)


@dataclass(frozen=True)
class PLBall:
    center: CyclicWord
    radius: int
    word_cap: int
    depths: dict
    edges: tuple[tuple[CyclicWord, CyclicWord], ...]

    def to_networkx(self) -> nx.Graph:
        graph = nx.Graph()
        for vertex, depth in self.depths.items():
            graph.add_node(str(vertex), depth=depth)
        graph.add_edges_from((str(a), str(b)) for a, b in self.edges)
        return graph

    def edge_list(self) -> list[str]:
        """ Structured-text export, one 'u v' line per edge. """
        return list(nx.generate_edgelist(self.to_networkx(), data=False))


# -----   PROJECTION   -----

@lru_cache(maxsize=1024)
def _loop_classes(G: MarkedMetricGraph, search_cap: int) -> tuple[tuple[CyclicWord, ...], int, bool]:
    """ Distinct classes of loops of length <= 2, shortest word first. """
    loops, explored, truncated = closed_walks(G, max_length=PROJECTION_LENGTH, cap=search_cap)
    classes = {G.loop_class(loop.darts) for loop in loops}
    return tuple(sorted(classes, key=CyclicWord.sort_key)), explored, truncated


def pl_projection(G: MarkedMetricGraph, cap: Optional[int] = None, config: PLConfig | None = None) -> PLProjection:
    """
    π_PL(G): primitive classes of length at most 2 in G.
    :param G: valid marked metric graph
    :param cap: partial paths explored before the search is truncated
    :return: PLProjection (classes as strings, shortest first)
    """
    config = config or PLConfig(rank=G.rank)
    classes, explored, truncated = _loop_classes(G, cap or config.search_cap)
    primitive = [str(c) for c in classes if is_primitive(c, G.rank)]
    if truncated:
        logger.warning("pl_projection truncated after %d partial paths", explored)
    return PLProjection(classes=primitive, truncated=truncated, explored=explored)


def pl_representatives(G: MarkedMetricGraph, config: PLConfig) -> tuple[tuple[CyclicWord, ...], bool]:
    """
    π_PL(G) as classes, shortest first. With `config.representatives` set,
    only that many shortest primitive classes are kept.
    """
    classes, _, truncated = _loop_classes(G, config.search_cap)
    chosen = []
    for c in classes:
        if is_primitive(c, G.rank):
            chosen.append(c)
            if len(chosen) == config.representatives:
                break
    return tuple(chosen), truncated


# -----   NEIGHBORS AND DISTANCES   -----

@lru_cache(maxsize=None)
def classes_up_to(rank: int, word_cap: int) -> tuple[CyclicWord, ...]:
    """ Every nontrivial class of word length <= word_cap, in sort_key order. """
    letters = [letter(i, s) for i in range(rank) for s in (1, -1)]
    found = set()
    for n in range(1, word_cap + 1):
        for word in itertools.product(letters, repeat=n):
            reduced = all(word[k] != -word[k + 1] for k in range(n - 1)) and (n == 1 or word[0] != -word[-1])
            if reduced:
                found.add(CyclicWord(word))
    return tuple(sorted(found, key=CyclicWord.sort_key))


@lru_cache(maxsize=None)
def primitive_classes_up_to(rank: int, word_cap: int) -> tuple[CyclicWord, ...]:
    return tuple(c for c in classes_up_to(rank, word_cap) if is_primitive(c, rank))


@lru_cache(maxsize=100_000)
def _neighbors(alpha: CyclicWord, word_cap: int, rank: int) -> tuple[CyclicWord, ...]:
    return tuple(
        beta for beta in primitive_classes_up_to(rank, word_cap)
        if beta != alpha and joint_basis(alpha, beta, rank)
    )


def pl_neighbors(alpha: CyclicWord, word_cap: int, config: PLConfig | None = None) -> set[CyclicWord]:
    """
    Primitive β with |β| <= word_cap sharing a free basis with α.
    Under-approximates the infinite neighbor set of α.
    """
    rank = (config or PLConfig()).rank
    if not is_primitive(alpha, rank):
        raise NotPrimitiveError(str(alpha))
    return set(_neighbors(alpha, word_cap, rank))


def _bidirectional_bfs(source: CyclicWord, target: CyclicWord, radius_cap: int, word_cap: int,
                       rank: int) -> Optional[int]:
    """ Layered search from both ends; the first layer that meets gives the distance. """
    seen = [{source: 0}, {target: 0}]
    frontier = [[source], [target]]
    radius = [0, 0]
    while frontier[0] and frontier[1] and radius[0] + radius[1] + 1 <= radius_cap:
        side = 0 if len(frontier[0]) <= len(frontier[1]) else 1
        mine, theirs = seen[side], seen[1 - side]
        best: Optional[int] = None
        following = []
        for vertex in frontier[side]:
            for beta in _neighbors(vertex, word_cap, rank):
                if beta in theirs:
                    total = radius[side] + 1 + theirs[beta]
                    best = total if best is None else min(best, total)
                if beta not in mine:
                    mine[beta] = radius[side] + 1
                    following.append(beta)
        if best is not None:
            return best
        radius[side] += 1
        frontier[side] = sorted(following, key=CyclicWord.sort_key)
    return None


@lru_cache(maxsize=None)
def _pair_distance(alpha: CyclicWord, beta: CyclicWord, radius_cap: int, word_cap: int, rank: int) -> Optional[int]:
    if alpha == beta:
        return 0
    if joint_basis(alpha, beta, rank):
        return 1
    if beta.sort_key() < alpha.sort_key():
        alpha, beta = beta, alpha
    if max(len(alpha), len(beta)) > word_cap:
        (alpha, beta), _ = reduce_classes((alpha, beta), rank)
    return _bidirectional_bfs(alpha, beta, radius_cap, word_cap, rank)


def pl_distance_ub(alpha: CyclicWord, beta: CyclicWord, radius_cap: int, word_cap: int,
                   config: PLConfig | None = None) -> Optional[int]:
    """
    Upper-bound estimate of the PL distance (exact for values 0 and 1).
    When a word is longer than the cap, the pair is first moved by a
    length-reducing automorphism; automorphisms act on PL by isometries.
    :return: distance estimate, or None when the radius cap is exceeded
    """
    rank = (config or PLConfig()).rank
    for w in (alpha, beta):
        if not is_primitive(w, rank):
            raise NotPrimitiveError(str(w))
    return _pair_distance(alpha, beta, radius_cap, word_cap, rank)


def d_pl(G: MarkedMetricGraph, H: MarkedMetricGraph, config: PLConfig | None = None) -> PLDistance:
    """
    d_PL(G, H) = diam(π_PL(G) ∪ π_PL(H)), by default over the whole projections.
    Setting `config.representatives` measures only the shortest classes of each
    side; the result is then a lower estimate of the diameter, flagged approximate.
    :return: PLDistance; value None when some pair exceeds the radius cap
    """
    config = config or PLConfig(rank=G.rank)
    reps_g, truncated_g = pl_representatives(G, config)
    reps_h, truncated_h = pl_representatives(H, config)
    union = sorted(set(reps_g) | set(reps_h), key=CyclicWord.sort_key)
    value: Optional[int] = 0
    pairs = 0
    capped = False
    for a, b in itertools.combinations(union, 2):
        if pairs == config.pair_cap:
            logger.warning("d_pl stopped after %d pairs of %d classes", pairs, len(union))
            capped = True
            break
        pairs += 1
        ub = pl_distance_ub(a, b, config.radius_cap, config.word_cap, config)
        if ub is None:
            value = None
            break
        value = max(value, ub)
    approximate = config.representatives is not None
    truncated = truncated_g or truncated_h or capped or value is None
    return PLDistance(
        value=value,
        certified=value is not None and value <= 1 and not (approximate or truncated),
        truncated=truncated,
        pairs=pairs,
        approximate=approximate,
    )


def pl_ball(center: CyclicWord, radius: int, word_cap: int, config: PLConfig | None = None) -> PLBall:
    """ Breadth-first ball around a primitive class, neighbors restricted by word_cap. """
    rank = (config or PLConfig()).rank
    if not is_primitive(center, rank):
        raise NotPrimitiveError(str(center))
    depths = {center: 0}
    frontier = [center]
    for depth in range(1, radius + 1):
        following = []
        for vertex in frontier:
            for beta in _neighbors(vertex, word_cap, rank):
                if beta not in depths:
                    depths[beta] = depth
                    following.append(beta)
        frontier = sorted(following, key=CyclicWord.sort_key)
    vertices = sorted(depths, key=CyclicWord.sort_key)
    edges = tuple(
        (a, b) for a, b in itertools.combinations(vertices, 2) if joint_basis(a, b, rank)
    )
    return PLBall(center, radius, word_cap, depths, edges)

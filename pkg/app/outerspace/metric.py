"""
    The asymmetric Lipschitz metric, computed from candidate loops.

    d(G, H) is the log of the largest ratio ℓ(α|H)/ℓ(α|G) over the candidates
    α of G: embedded circles, figure-eights and barbells. Ratios are exact
    rationals and the logarithm is taken last.
"""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from app.core.config import MAX_WORKERS
from app.datamanager.exception_classes import DomainError, InsufficientSamplesError, RankMismatchError
from app.freegroup.words import CyclicWord, invert_letters
from app.outerspace.graphs import (
    Dart, GraphLoop, MarkedMetricGraph, embedded_circles, loop_length
)
from app.outerspace.sampler import GraphSampler
from app.schemas.pydantic_models import SamplerConfig, SymConstantEstimate

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CandidateSet:
    graph: MarkedMetricGraph
    loops: tuple[GraphLoop, ...]
    classes: tuple[CyclicWord, ...]

    def __len__(self) -> int:
        return len(self.loops)

    def by_kind(self, kind: str) -> list[GraphLoop]:
        return [loop for loop in self.loops if loop.kind == kind]


def _rotate_to(G: MarkedMetricGraph, darts: tuple[Dart, ...], v: str) -> tuple[Dart, ...]:
    for k, d in enumerate(darts):
        if G.origin(d) == v:
            return darts[k:] + darts[:k]
    raise DomainError("vertex", v, "must lie on the loop")


def _circle_vertices(G: MarkedMetricGraph, loop: GraphLoop) -> set[str]:
    return {G.origin(d) for d in loop.darts}


def _arcs(G: MarkedMetricGraph, start: str, avoid: set[str], targets: set[str]) -> list[tuple[Dart, ...]]:
    """ Embedded arcs from `start` to a target vertex, meeting `avoid` and the targets only at their ends. """
    arcs = []

    def extend(path: list[Dart], visited: set[str]) -> None:
        v = G.terminus(path[-1])
        if v in targets:
            arcs.append(tuple(path))
            return
        if v in visited or v in avoid:
            return
        visited.add(v)
        for d in G.outgoing[v]:
            if d != -path[-1]:
                path.append(d)
                extend(path, visited)
                path.pop()
        visited.discard(v)

    for d in G.outgoing[start]:
        extend([d], {start})
    return arcs


@lru_cache(maxsize=4096)
def candidates(G: MarkedMetricGraph) -> CandidateSet:
    """
    Candidate loops of G with their conjugacy classes.
    :param G: valid marked metric graph
    :return: CandidateSet (circles first, then figure-eights, then barbells)
    """
    circles = embedded_circles(G)
    found: dict[tuple[Dart, ...], GraphLoop] = {loop.darts: loop for loop in circles}
    vertex_sets = [_circle_vertices(G, c) for c in circles]

    for i, c1 in enumerate(circles):
        for j in range(i + 1, len(circles)):
            c2 = circles[j]
            shared = vertex_sets[i] & vertex_sets[j]
            if len(shared) == 1:
                (v,) = shared
                first, second = _rotate_to(G, c1.darts, v), _rotate_to(G, c2.darts, v)
                for other in (second, invert_letters(second)):
                    loop = GraphLoop(first + other, kind="figure-eight")
                    found.setdefault(loop.darts, loop)
            elif not shared:
                for u in sorted(vertex_sets[i]):
                    for arc in _arcs(G, u, vertex_sets[i], vertex_sets[j]):
                        w = G.terminus(arc[-1])
                        first, second = _rotate_to(G, c1.darts, u), _rotate_to(G, c2.darts, w)
                        for other in (second, invert_letters(second)):
                            loop = GraphLoop(first + arc + other + invert_letters(arc), kind="barbell")
                            found.setdefault(loop.darts, loop)

    loops = tuple(found.values())
    classes = tuple(G.loop_class(loop.darts) for loop in loops)
    logger.debug("%d candidates for %s", len(loops), G.label or "graph")
    return CandidateSet(G, loops, classes)


def _check_ranks(G: MarkedMetricGraph, H: MarkedMetricGraph) -> None:
    if G.rank != H.rank:
        raise RankMismatchError(G.rank, H.rank, "graph pair")


def lip_ratio(G: MarkedMetricGraph, H: MarkedMetricGraph) -> Fraction:
    """ exp(d(G, H)) as an exact rational. """
    _check_ranks(G, H)
    cands = candidates(G)
    return max(
        loop_length(alpha, H) / G.path_length(loop.darts)
        for loop, alpha in zip(cands.loops, cands.classes)
    )


def log_ratio(ratio: Fraction) -> float:
    """ log of a positive rational without overflowing floats. """
    return math.log(ratio.numerator) - math.log(ratio.denominator)


def lip_distance(G: MarkedMetricGraph, H: MarkedMetricGraph) -> float:
    """
    Lipschitz distance d(G, H): log of the maximal length ratio over candidates of G.
    :return: nonnegative float (exactly 0.0 when G = H)
    """
    ratio = lip_ratio(G, H)
    return 0.0 if ratio == 1 else log_ratio(ratio)


def sym_distance(G: MarkedMetricGraph, H: MarkedMetricGraph) -> float:
    return lip_distance(G, H) + lip_distance(H, G)


def diam_pair(G: MarkedMetricGraph, H: MarkedMetricGraph) -> float:
    return max(lip_distance(G, H), lip_distance(H, G))


def _pair_ratio(cell_seed: np.random.SeedSequence, sampler: GraphSampler, epsilon: float) -> float | None:
    rng = np.random.default_rng(cell_seed)
    G = sampler.sample_thick(rng, epsilon)
    H = sampler.sample_thick(rng, epsilon)
    forward = lip_distance(G, H)
    if forward == 0:
        return None
    return (forward + lip_distance(H, G)) / forward


def estimate_sym_constant(epsilon: float, n: int, seed: int, rank: int = 3,
                          sampler_config: SamplerConfig | None = None) -> SymConstantEstimate:
    """
    Empirical lower estimate of the thick-part symmetrization constant s_ε.
    :param epsilon: thickness in (0, 1/rank]
    :param n: number of random pairs
    :param seed: makes the estimate reproducible
    :return: max over pairs of sym_distance / lip_distance
    """
    if not 0 < epsilon <= 1 / rank:
        raise DomainError("epsilon", epsilon, f"must lie in (0, 1/{rank}]")
    if n <= 0:
        raise InsufficientSamplesError("symmetrization estimate", 1, n)
    config = sampler_config or SamplerConfig(rank=rank)
    sampler = GraphSampler(config)
    seeds = np.random.SeedSequence(seed).spawn(n)
    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as executor:
        ratios = [r for r in executor.map(lambda s: _pair_ratio(s, sampler, epsilon), seeds) if r is not None]
    if not ratios:
        raise InsufficientSamplesError("symmetrization estimate (distinct pairs)", 1, 0)
    estimate = max(1.0, max(ratios))
    logger.info("s_eps estimate %.6f for eps=%s from %d pairs", estimate, epsilon, len(ratios))
    return SymConstantEstimate(epsilon=epsilon, samples=len(ratios), estimate=estimate, seed=seed)

"""
    Seeded random marked metric graphs.

    Shape uniform among the configured families, Dirichlet edge lengths rounded
    to a common denominator (so volume is exactly 1), marking twisted by a
    random product of Whitehead moves.
"""
import logging
from fractions import Fraction

import numpy as np

from app.datamanager.exception_classes import SamplerError
from app.freegroup.whitehead import whitehead_moves
from app.outerspace.graphs import MarkedMetricGraph, act, rose, subdivided_rose, systole, theta
from app.schemas.pydantic_models import SamplerConfig

logger = logging.getLogger(__name__)

SHAPES = {
    "rose": (rose, 0),
    "theta": (theta, 1),
    "subdivided_rose": (subdivided_rose, 1),
}


class GraphSampler:
    def __init__(self, config: SamplerConfig):
        self.config = config
        self.moves = whitehead_moves(config.rank)

    def lengths(self, rng: np.random.Generator, count: int) -> list[Fraction]:
        """ Dirichlet(1, ..., 1) lengths with an exact unit sum. """
        weights = np.maximum(1, np.rint(rng.dirichlet(np.ones(count)) * self.config.resolution)).astype(np.int64)
        total = int(weights.sum())
        return [Fraction(int(w), total) for w in weights]

    def twist(self, rng: np.random.Generator, G: MarkedMetricGraph) -> MarkedMetricGraph:
        count = int(rng.integers(self.config.min_twist, self.config.max_twist + 1))
        for index in rng.integers(0, len(self.moves), size=count):
            G = act(self.moves[int(index)], G)
        return G

    def sample(self, rng: np.random.Generator) -> MarkedMetricGraph:
        """
        One random graph.
        :param rng: numpy Generator owned by the caller
        :return: valid volume-1 marked metric graph
        """
        shape = self.config.shapes[int(rng.integers(0, len(self.config.shapes)))]
        build, extra_edges = SHAPES[shape]
        G = build(self.lengths(rng, self.config.rank + extra_edges), label=f"random {shape}")
        return self.twist(rng, G)

    def sample_thick(self, rng: np.random.Generator, epsilon: float | None = None) -> MarkedMetricGraph:
        """ Rejection-samples a graph with systole >= epsilon. """
        epsilon = self.config.epsilon if epsilon is None else epsilon
        if epsilon is None:
            return self.sample(rng)
        best = Fraction(0)
        for _ in range(self.config.max_attempts):
            G = self.sample(rng)
            shortest = systole(G)
            if shortest >= Fraction(repr(epsilon)):
                return G
            best = max(best, shortest)
        raise SamplerError(
            "no graph in the thick part was found",
            {"epsilon": epsilon, "attempts": self.config.max_attempts, "best_systole": float(best)},
        )

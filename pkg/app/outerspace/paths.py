"""
    Sampled directed paths in Outer space: certified stretch geodesics,
    orbits of automorphisms, closest-point and length-minimizer projections.

    All paths are compact and sampled; projection sets are reported at
    sample resolution.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from app.datamanager.exception_classes import InvalidPathError, VolumeError, ZeroStepError
from app.freegroup.words import Automorphism, CyclicWord
from app.outerspace.graphs import (
    MarkedMetricGraph, act, embedded_loop_of, loop_length, rescale_loop
)
from app.outerspace.metric import lip_ratio, log_ratio
from app.schemas.pydantic_models import GeodesicCertificate, MinimizerReport, ProjectionResult

logger = logging.getLogger(__name__)

STRETCH_DENOMINATOR = 10**9


@dataclass(frozen=True)
class SampledPath:
    times: tuple[float, ...]
    points: tuple[MarkedMetricGraph, ...]
    description: str = ""
    _distances: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if not self.points or len(self.times) != len(self.points):
            raise InvalidPathError("times and points must be nonempty lists of equal length")
        if any(b <= a for a, b in zip(self.times, self.times[1:])):
            raise InvalidPathError("times must be strictly increasing")
        if len({p.rank for p in self.points}) != 1:
            raise InvalidPathError("points have different ranks")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def resolution(self) -> float:
        """ Largest gap between consecutive sample times. """
        return max((b - a for a, b in zip(self.times, self.times[1:])), default=0.0)

    def ratio(self, i: int, j: int) -> Fraction:
        """ exp d(γ(t_i), γ(t_j)), cached per path. """
        key = (i, j)
        if key not in self._distances:
            self._distances[key] = Fraction(1) if i == j else lip_ratio(self.points[i], self.points[j])
        return self._distances[key]

    def distance(self, i: int, j: int) -> float:
        ratio = self.ratio(i, j)
        return 0.0 if ratio == 1 else log_ratio(ratio)

    def diam_pair(self, i: int, j: int) -> float:
        return max(self.distance(i, j), self.distance(j, i))

    def set_diameter(self, indices: Sequence[int]) -> float:
        """ Diameter of a finite set of samples: max of diam_pair over its pairs. """
        indices = sorted(set(indices))
        return max((self.diam_pair(i, j) for k, i in enumerate(indices) for j in indices[k + 1:]), default=0.0)


def certify_geodesic(path: SampledPath, tol: float) -> GeodesicCertificate:
    """
    Checks d(γ(s), γ(t)) = t - s on every sampled pair s < t.
    :param path: sampled path (a one-point path passes vacuously)
    :param tol: allowed deviation
    :return: GeodesicCertificate
    """
    deviation = 0.0
    pairs = 0
    for i in range(len(path)):
        for j in range(i + 1, len(path)):
            deviation = max(deviation, abs(path.distance(i, j) - (path.times[j] - path.times[i])))
            pairs += 1
    return GeodesicCertificate(tolerance=tol, max_deviation=deviation, passed=deviation <= tol, pairs=pairs)


def stretch_factors(T: float, n: int) -> list[Fraction]:
    """ Rational approximations of e^t on n evenly spaced times in [0, T]. """
    if n == 1:
        return [Fraction(1)]
    return [Fraction(1)] + [
        Fraction(math.exp(T * k / (n - 1))).limit_denominator(STRETCH_DENOMINATOR) for k in range(1, n)
    ]


def stretch_loop_path(G: MarkedMetricGraph, alpha: CyclicWord, T: float, n: int) -> SampledPath:
    """
    Directed geodesic that stretches the embedded loop of α by e^t.
    The loop's edges are scaled by q ≈ e^t (q rational, t = log q exactly) and
    the other edges share the remaining volume, so ℓ(α|γ(t)) = q·ℓ(α|G).
    :param G: start point, α must be embedded in it
    :param T: final time, needs e^T·ℓ(α|G) < 1
    :param n: number of samples
    :return: SampledPath
    """
    if n < 1:
        raise InvalidPathError("a path needs at least one sample")
    loop = embedded_loop_of(alpha, G)
    ell = G.path_length(loop.darts)
    factors = stretch_factors(T, n)
    if factors[-1] * ell >= 1:
        raise VolumeError(f"stretching '{alpha}' (length {ell}) for time {T} exhausts the volume")
    points = tuple(G if q == 1 else rescale_loop(G, loop, q) for q in factors)
    times = tuple(log_ratio(q) if q != 1 else 0.0 for q in factors)
    return SampledPath(times, points, description=f"stretch {alpha} for T={T}")


def orbit_path(phi: Automorphism, G: MarkedMetricGraph, k_max: int) -> SampledPath:
    """
    Points G_k = act(φ^k, G) for k = 0..k_max with cumulative step times.
    The action is isometric, so every step has the length d(G_0, G_1).
    """
    if phi.rank != G.rank:
        raise InvalidPathError(f"automorphism rank {phi.rank} differs from graph rank {G.rank}")
    points = [G]
    for _ in range(k_max):
        points.append(act(phi, points[-1]))
    step = lip_ratio(points[0], points[1]) if k_max >= 1 else Fraction(1)
    if k_max >= 1 and step == 1:
        raise ZeroStepError(str(phi))
    length = log_ratio(step) if k_max >= 1 else 0.0
    return SampledPath(tuple(k * length for k in range(k_max + 1)), tuple(points), description=f"orbit of {phi}")


def growth_rate(phi: Automorphism) -> float:
    """ Perron root of the abelianized transition matrix (exact for positive automorphisms). """
    matrix = np.zeros((phi.rank, phi.rank))
    for i, image in enumerate(phi.images):
        for x in image.letters:
            matrix[i, abs(x) - 1] += 1
    return float(max(abs(np.linalg.eigvals(matrix))))


def cp_project(H: MarkedMetricGraph, path: SampledPath) -> ProjectionResult:
    """
    Closest-point projection of H to the sampled path: every index minimizing d(H, γ(t_i)).
    """
    ratios = [lip_ratio(H, point) for point in path.points]
    best = min(ratios)
    indices = [i for i, r in enumerate(ratios) if r == best]
    return ProjectionResult(
        indices=indices,
        times=[path.times[i] for i in indices],
        distance=0.0 if best == 1 else log_ratio(best),
        diameter=path.set_diameter(indices),
        resolution=path.resolution,
    )


def distance_to_path(H: MarkedMetricGraph, path: SampledPath) -> Fraction:
    """ exp d(H, γ) at sample resolution. """
    return min(lip_ratio(H, point) for point in path.points)


def length_profile(alpha: CyclicWord, path: SampledPath) -> list[Fraction]:
    return [loop_length(alpha, point) for point in path.points]


def min_length_times(alpha: CyclicWord, path: SampledPath) -> MinimizerReport:
    """
    Sampled m_α and the indices where α attains it.
    """
    lengths = length_profile(alpha, path)
    m_alpha = min(lengths)
    indices = [i for i, x in enumerate(lengths) if x == m_alpha]
    return MinimizerReport(
        word=str(alpha),
        m_alpha=float(m_alpha),
        indices=indices,
        times=[path.times[i] for i in indices],
        resolution=path.resolution,
    )


def sub_path(path: SampledPath, indices: Sequence[int]) -> SampledPath:
    indices = sorted(set(indices))
    return SampledPath(
        tuple(path.times[i] for i in indices), tuple(path.points[i] for i in indices), description=path.description
    )

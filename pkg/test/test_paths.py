import math
from fractions import Fraction

import numpy as np
import pytest

from app.datamanager.exception_classes import InvalidPathError, VolumeError, ZeroStepError
from app.freegroup.whitehead import whitehead_moves
from app.freegroup.words import Automorphism, CyclicWord, apply_auto
from app.outerspace.graphs import MarkedMetricGraph, act, loop_length, rose
from app.outerspace.metric import lip_distance
from app.outerspace.paths import (
    SampledPath, certify_geodesic, cp_project, distance_to_path, growth_rate, min_length_times, orbit_path,
    stretch_factors, stretch_loop_path, sub_path
)

PLASTIC_NUMBER = 1.324717957244746


@pytest.fixture
def stretch_path(rose_graph):
    return stretch_loop_path(rose_graph, CyclicWord.parse("a"), 0.5, 11)


def short_petal_instance(seed: int) -> tuple[MarkedMetricGraph, CyclicWord, Fraction]:
    """(G, α, ℓ(α|G)) with α embedded in G and ℓ(α|G) in [0.02, 0.12]."""
    rng = np.random.default_rng(seed)
    sigma = Fraction(int(rng.integers(2, 13)), 100)
    split = Fraction(int(rng.integers(1, 100)), 100)
    base = rose([sigma, (1 - sigma) * split, (1 - sigma) * (1 - split)])
    moves = whitehead_moves(3)
    phi = Automorphism.identity(3)
    for index in rng.integers(0, len(moves), size=3):
        phi = phi.compose(moves[int(index)])
    return act(phi, base), apply_auto(phi.inverse(), CyclicWord.parse("a")), sigma


class TestStretchPaths:
    """Certified directed geodesics from stretching an embedded loop."""

    def test_certified(self, stretch_path):
        # Execute | Act
        certificate = certify_geodesic(stretch_path, 1e-6)

        # Verify | Assert
        assert certificate.passed
        assert certificate.pairs == 55

    def test_witness_grows_exactly(self, stretch_path):
        # Setup | Arrange
        factors = stretch_factors(0.5, 11)

        # Verify | Assert
        for point, q in zip(stretch_path.points, factors):
            assert loop_length(CyclicWord.parse("a"), point) == Fraction(1, 3) * q
            assert point.volume == 1
        assert stretch_path.times[-1] == pytest.approx(0.5, abs=1e-8)

    def test_volume_exhausted(self, rose_graph):
        with pytest.raises(VolumeError):
            stretch_loop_path(rose_graph, CyclicWord.parse("a"), 2.0, 5)

    def test_single_sample_is_vacuous(self, rose_graph):
        # Execute | Act
        path = stretch_loop_path(rose_graph, CyclicWord.parse("a"), 0.5, 1)

        # Verify | Assert
        assert certify_geodesic(path, 1e-6).passed
        assert len(path) == 1

    @pytest.mark.parametrize("seed", range(10))
    def test_random_instances_over_two_units(self, seed):
        """
        A rose with a petal shorter than e^-2, re-marked by three random Whitehead moves;
        the petal's class is stretched for T = 2 and its length follows σe^t exactly.
        """
        # Setup | Arrange
        G, alpha, sigma = short_petal_instance(seed)

        # Execute | Act
        path = stretch_loop_path(G, alpha, 2.0, 20)
        certificate = certify_geodesic(path, 1e-6)

        # Verify | Assert
        assert certificate.passed
        assert certificate.pairs == 190
        for point, q in zip(path.points, stretch_factors(2.0, 20)):
            assert loop_length(alpha, point) == sigma * q
        assert path.times[-1] == pytest.approx(2.0, abs=1e-8)


class TestOrbitPaths:
    """Orbits of automorphisms acting isometrically."""

    def test_orbit_is_isometric(self, rose_graph, axis_automorphism):
        # Execute | Act
        path = orbit_path(axis_automorphism, rose_graph, 4)

        # Verify | Assert
        assert len(path) == 5
        for j in range(4):
            for k in range(j + 1, 4):
                assert path.distance(j, k) == pytest.approx(path.distance(j + 1, k + 1), abs=1e-9)

    def test_translation_length_approaches_growth_rate(self, rose_graph, axis_automorphism):
        # Execute | Act
        path = orbit_path(axis_automorphism, rose_graph, 30)

        # Verify | Assert
        assert abs(lip_distance(path.points[0], path.points[30]) / 30 - math.log(PLASTIC_NUMBER)) <= 0.05

    def test_growth_rate(self, axis_automorphism):
        assert growth_rate(axis_automorphism) == pytest.approx(PLASTIC_NUMBER, abs=1e-6)

    def test_zero_step(self, rose_graph):
        with pytest.raises(ZeroStepError):
            orbit_path(Automorphism.parse("b,c,a"), rose_graph, 3)


class TestProjections:
    """Closest-point and length-minimizer projections at sample resolution."""

    def test_sample_projects_to_itself(self, stretch_path):
        # Execute | Act
        projection = cp_project(stretch_path.points[3], stretch_path)

        # Verify | Assert
        assert projection.indices == [3]
        assert projection.distance == 0.0
        assert projection.diameter == 0.0
        assert distance_to_path(stretch_path.points[3], stretch_path) == 1

    def test_minimizers(self, stretch_path):
        # the stretched loop is shortest at the start, the others at the end
        assert min_length_times(CyclicWord.parse("a"), stretch_path).indices == [0]
        assert min_length_times(CyclicWord.parse("b"), stretch_path).indices == [10]

    def test_sub_path(self, stretch_path):
        # Execute | Act
        part = sub_path(stretch_path, [4, 0, 8])

        # Verify | Assert
        assert part.times == (stretch_path.times[0], stretch_path.times[4], stretch_path.times[8])
        assert certify_geodesic(part, 1e-6).passed


class TestSampledPath:
    def test_times_must_increase(self, rose_graph):
        with pytest.raises(InvalidPathError):
            SampledPath((0.0, 0.0), (rose_graph, rose_graph))

    def test_needs_points(self):
        with pytest.raises(InvalidPathError):
            SampledPath((), ())

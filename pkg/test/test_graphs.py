from fractions import Fraction

import networkx as nx
import pytest

from app.datamanager.exception_classes import (
    DomainError, InvalidRankError, NonEmbeddedLoopError, TrivialClassError, VolumeError
)
from app.freegroup.words import CyclicWord, Word, apply_auto
from app.outerspace.graphs import (
    Edge, MarkedMetricGraph, act, closed_walks, embedded_loops, immerse, is_thick, loop_length, one_petal_family,
    pinch_distance_bound, pinch_loop, rose, systole, two_petal_family, validate
)
from app.outerspace.metric import candidates, lip_ratio


class TestLengths:
    """Immersed loops and their lengths."""

    def test_rose_lengths(self, unbalanced_rose):
        assert loop_length(CyclicWord.parse("a"), unbalanced_rose) == Fraction(1, 2)
        assert loop_length(CyclicWord.parse("ab"), unbalanced_rose) == Fraction(3, 4)
        assert loop_length(CyclicWord.parse("abAB"), unbalanced_rose) == Fraction(3, 2)

    def test_theta_lengths(self, theta_graph):
        # petal i is e_i e_(i+1) reversed, so ab tightens to e1 e3 reversed
        assert loop_length(CyclicWord.parse("a"), theta_graph) == Fraction(1, 2)
        assert loop_length(CyclicWord.parse("ab"), theta_graph) == Fraction(1, 2)
        assert len(immerse(CyclicWord.parse("ab"), theta_graph)) == 2

    def test_trivial_word_has_no_loop(self, rose_graph):
        with pytest.raises(TrivialClassError):
            immerse(Word.parse("aA"), rose_graph)

    def test_systole_and_thickness(self, unbalanced_rose):
        assert systole(unbalanced_rose) == Fraction(1, 4)
        assert is_thick(unbalanced_rose, 0.25)
        assert not is_thick(unbalanced_rose, 0.3)

    def test_embedded_loops(self, unbalanced_rose):
        # Execute | Act
        loops = embedded_loops(unbalanced_rose, Fraction(1, 4))

        # Verify | Assert
        assert [alpha for _, alpha, _ in loops] == [CyclicWord.parse("b"), CyclicWord.parse("c")]


class TestValidation:
    """Every invariant violation is reported, nothing is raised."""

    def test_families_are_valid(self, rose_graph, theta_graph, theta_plus_loop_graph, subdivided_rose_graph,
                                barbell_graph):
        for G in (rose_graph, theta_graph, theta_plus_loop_graph, subdivided_rose_graph, barbell_graph):
            assert validate(G).valid, G.label

    def test_volume_violation(self):
        # Setup | Arrange
        edges = tuple(Edge(f"e{i}", "o", "o", Fraction(2, 3)) for i in range(1, 4))
        G = MarkedMetricGraph(3, ("o",), edges, "o", ((1,), (2,), (3,)))

        # Execute | Act
        diagnostics = validate(G)

        # Verify | Assert
        assert not diagnostics.valid
        assert [v.code for v in diagnostics.violations] == ["volume"]

    def test_marking_must_be_a_basis(self, rose_graph):
        # Setup | Arrange
        G = MarkedMetricGraph(3, rose_graph.vertices, rose_graph.edges, "o", ((1,), (1, 2), (1,)))

        # Execute | Act
        diagnostics = validate(G)

        # Verify | Assert
        assert [v.code for v in diagnostics.violations] == ["marking"]

    def test_core_violation(self):
        # Setup | Arrange
        edges = (
            Edge("e1", "o", "o", Fraction(1, 4)), Edge("e2", "o", "o", Fraction(1, 4)),
            Edge("e3", "o", "o", Fraction(1, 4)), Edge("e4", "o", "w", Fraction(1, 4)),
        )
        G = MarkedMetricGraph(3, ("o", "w"), edges, "o", ((1,), (2,), (3,)))

        # Verify | Assert
        assert "core" in [v.code for v in validate(G).violations]

    def test_family_constructors_reject_bad_input(self):
        with pytest.raises(InvalidRankError):
            rose([Fraction(1, 2), Fraction(1, 2)])
        with pytest.raises(VolumeError):
            rose([1, 1, 1])


class TestCandidates:
    """
    Candidate counts of the five rank-3 shapes, checked against the brute-force
    enumeration of non-backtracking walks crossing each edge at most twice.
    """

    @pytest.mark.parametrize("fixture_name, expected", [
        ("rose_graph", 9),
        ("theta_graph", 6),
        ("theta_plus_loop_graph", 10),
        ("subdivided_rose_graph", 9),
        ("barbell_graph", 9),
    ])
    def test_counts(self, request, fixture_name, expected):
        # Setup | Arrange
        G = request.getfixturevalue(fixture_name)

        # Execute | Act
        cands = candidates(G)

        # Verify | Assert
        assert len(cands) == expected
        assert all(max(loop.crossings().values()) <= 2 for loop in cands.loops)
        assert all(G.path_length(loop.darts) <= 2 for loop in cands.loops)

    def test_rose_candidates_match_walks_over_two_petals(self, rose_graph):
        # Setup | Arrange: walks through at most two petals, each petal once
        walks, _, truncated = closed_walks(rose_graph, max_crossings=1)
        expected = {loop.darts for loop in walks if len(loop.crossings()) <= 2}

        # Execute | Act
        found = {loop.darts for loop in candidates(rose_graph).loops}

        # Verify | Assert
        assert not truncated
        assert found == expected
        assert len(found) == 9

    @pytest.mark.parametrize("fixture_name", [
        "rose_graph", "theta_graph", "theta_plus_loop_graph", "subdivided_rose_graph", "barbell_graph",
    ])
    def test_candidates_realize_the_brute_force_maximum(self, request, fixture_name, unbalanced_rose,
                                                        axis_automorphism):
        # Setup | Arrange
        G = request.getfixturevalue(fixture_name)
        H = act(axis_automorphism, unbalanced_rose)
        walks, _, truncated = closed_walks(G, max_crossings=2)

        # Execute | Act
        brute = max(loop_length(G.loop_class(loop.darts), H) / G.path_length(loop.darts) for loop in walks)

        # Verify | Assert
        assert not truncated
        assert {loop.darts for loop in candidates(G).loops} <= {loop.darts for loop in walks}
        assert lip_ratio(G, H) == brute

    def test_barbell_kinds(self, barbell_graph):
        cands = candidates(barbell_graph)
        assert len(cands.by_kind("embedded circle")) == 3
        assert len(cands.by_kind("figure-eight")) == 2
        assert len(cands.by_kind("barbell")) == 4

    def test_barbell_bridge_separates(self, barbell_graph):
        # the bridge is the last edge
        graph = barbell_graph.multigraph.copy()
        graph.remove_edge("u", "v", key=3)
        assert not nx.is_connected(graph)


class TestAction:
    """Right action of automorphisms on markings."""

    def test_lengths_pull_back(self, unbalanced_rose, axis_automorphism):
        # Execute | Act
        H = act(axis_automorphism, unbalanced_rose)

        # Verify | Assert
        for text in ("a", "b", "c", "ab", "aBc", "abAB"):
            alpha = CyclicWord.parse(text)
            assert loop_length(alpha, H) == loop_length(apply_auto(axis_automorphism, alpha), unbalanced_rose)

    def test_loop_class_after_action(self, rose_graph, axis_automorphism):
        # Execute | Act
        H = act(axis_automorphism, rose_graph)

        # Verify | Assert
        assert H.loop_class((1,)) == CyclicWord.parse("cA")
        assert validate(H).valid

    def test_action_composes(self, rose_graph, axis_automorphism, polynomial_automorphism):
        # Setup | Arrange
        alpha = CyclicWord.parse("abc")

        # Execute | Act
        twice = act(polynomial_automorphism, act(axis_automorphism, rose_graph))

        # Verify | Assert
        expected = apply_auto(axis_automorphism.compose(polynomial_automorphism), alpha)
        assert loop_length(alpha, twice) == loop_length(expected, rose_graph)


class TestRescaling:
    """Pinching embedded loops and the petal families."""

    def test_pinch(self, rose_graph):
        # Execute | Act
        H = pinch_loop(rose_graph, CyclicWord.parse("a"), Fraction(1, 2))

        # Verify | Assert
        assert H.lengths() == (Fraction(1, 6), Fraction(5, 12), Fraction(5, 12))
        assert H.volume == 1
        assert pinch_distance_bound(Fraction(1, 3), Fraction(1, 2)) == Fraction(5, 4)

    def test_pinch_needs_embedded_loop(self, rose_graph):
        with pytest.raises(NonEmbeddedLoopError):
            pinch_loop(rose_graph, CyclicWord.parse("ab"), Fraction(1, 2))

    def test_petal_families(self):
        assert one_petal_family(3, Fraction(1, 5)).lengths() == (Fraction(1, 5), Fraction(2, 5), Fraction(2, 5))
        assert two_petal_family(3, Fraction(1, 2), Fraction(1, 2)).lengths() == (
            Fraction(1, 4), Fraction(1, 4), Fraction(1, 2)
        )

    @pytest.mark.parametrize("build", [
        lambda G: pinch_loop(G, CyclicWord.parse("a"), 0),
        lambda G: one_petal_family(3, 1),
        lambda G: two_petal_family(3, Fraction(1, 2), 1),
        lambda G: closed_walks(G),
    ])
    def test_out_of_range_parameters_are_domain_errors(self, rose_graph, build):
        """Domain failures share the toolkit's base class, so the CLI maps them to exit code 2."""
        with pytest.raises(DomainError):
            build(rose_graph)

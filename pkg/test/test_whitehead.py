import itertools

import pytest
from hypothesis import given, settings, strategies as st

from app.datamanager.exception_classes import InvalidRankError, NotPrimitiveError
from app.freegroup.whitehead import (
    is_basis, is_primitive, joint_basis, multiplier_moves, reduce_basis, reduce_classes,
    signed_permutations, whitehead_moves
)
from app.freegroup.words import Automorphism, CyclicWord, Word, apply_auto
from app.outerspace.plgraph import classes_up_to


def cut_moves(rank: int) -> set[tuple]:
    """Whitehead moves (A, a) from the cut formulation: a in A, a⁻¹ not in A, A != {a}."""
    letters = [s * (i + 1) for i in range(rank) for s in (1, -1)]
    found = set()
    for a in letters:
        others = [x for x in letters if abs(x) != abs(a)]
        for size in range(1, len(others) + 1):
            for subset in itertools.combinations(others, size):
                images = []
                for g in range(1, rank + 1):
                    if g == abs(a):
                        images.append((g,))
                        continue
                    image = (g,)
                    if g in subset:
                        image = image + (a,)
                    if -g in subset:
                        image = (-a,) + image
                    images.append(image)
                found.add(tuple(images))
    return found


def primitive_oracle(rank: int, max_length: int) -> set[CyclicWord]:
    """Closure of the generators under Whitehead moves inside the classes of length <= max_length."""
    moves = whitehead_moves(rank)
    found = {CyclicWord(((i + 1),)) for i in range(rank)}
    frontier = list(found)
    while frontier:
        following = []
        for w in frontier:
            for phi in moves:
                image = apply_auto(phi, w)
                if len(image) <= max_length and image not in found:
                    found.add(image)
                    following.append(image)
        frontier = following
    return found


class TestMoves:
    """The finite set of Whitehead automorphisms."""

    def test_counts_in_rank_three(self):
        assert len(signed_permutations(3)) == 47
        assert len(multiplier_moves(3)) == 90
        assert len(whitehead_moves(3)) == 137

    def test_multiplier_moves_match_cut_formulation(self):
        # Execute | Act
        generated = {tuple(image.letters for image in phi.images) for phi in multiplier_moves(3)}

        # Verify | Assert
        assert generated == cut_moves(3)

    def test_rank_below_three_rejected(self):
        with pytest.raises(InvalidRankError):
            whitehead_moves(2)


class TestPrimitivity:
    """Primitivity, basis and joint-basis decisions."""

    @pytest.mark.parametrize("word, expected", [
        ("a", True),
        ("ab", True),
        ("aab", True),
        ("abc", True),
        ("abAB", False),
        ("aabb", False),
        ("aa", False),
    ])
    def test_known_words(self, word, expected):
        assert is_primitive(CyclicWord.parse(word), 3) is expected

    def test_agrees_with_exhaustive_oracle(self):
        # Setup | Arrange
        oracle = primitive_oracle(3, 4)

        # Execute | Act
        disagreements = [c for c in classes_up_to(3, 4) if is_primitive(c, 3) != (c in oracle)]

        # Verify | Assert
        assert disagreements == []

    @settings(max_examples=1000, deadline=None)
    @given(st.lists(st.integers(0, 136), min_size=1, max_size=3))
    def test_images_of_known_classes(self, indices):
        """
        Images of a are primitive; images of a·[a, b] are not, although both keep
        abelian gcd 1, so the decision has to come from the Whitehead reduction.
        """
        # Setup | Arrange
        moves = whitehead_moves(3)
        phi = Automorphism.identity(3)
        for index in indices:
            phi = phi.compose(moves[index])

        # Execute | Act
        primitive = apply_auto(phi, CyclicWord.parse("a"))
        other = apply_auto(phi, CyclicWord.parse("aabAB"))

        # Verify | Assert
        assert primitive.abelian_gcd() == other.abelian_gcd() == 1
        assert is_primitive(primitive, 3)
        assert not is_primitive(other, 3)

    @pytest.mark.parametrize("images, expected", [
        (["a", "b", "c"], True),
        (["b", "c", "ab"], True),
        (["ab", "b", "c"], True),
        (["a", "a", "c"], False),
        (["aa", "b", "c"], False),
        (["ab", "ba", "c"], False),
    ])
    def test_is_basis(self, images, expected):
        assert is_basis([Word.parse(w) for w in images]) is expected

    def test_joint_basis(self):
        a, b = CyclicWord.parse("a"), CyclicWord.parse("b")
        assert joint_basis(a, b)
        assert joint_basis(a, CyclicWord.parse("ab"))
        assert not joint_basis(a, a)
        assert not joint_basis(b, CyclicWord.parse("aab"))

    def test_joint_basis_requires_primitive_classes(self):
        with pytest.raises(NotPrimitiveError):
            joint_basis(CyclicWord.parse("a"), CyclicWord.parse("abAB"))


class TestReduction:
    """The returned automorphism carries the inputs to the reduced forms."""

    def test_reduce_classes(self):
        # Setup | Arrange
        classes = (CyclicWord.parse("aab"), CyclicWord.parse("c"))

        # Execute | Act
        reduced, psi = reduce_classes(classes, 3)

        # Verify | Assert
        assert sum(len(c) for c in reduced) == 2
        assert tuple(apply_auto(psi, c) for c in classes) == reduced

    def test_reduce_basis(self, axis_automorphism):
        # Setup | Arrange
        words = axis_automorphism.power(2).images

        # Execute | Act
        reduced, psi = reduce_basis(words)

        # Verify | Assert
        assert all(len(w) == 1 for w in reduced)
        assert tuple(psi(w) for w in words) == reduced

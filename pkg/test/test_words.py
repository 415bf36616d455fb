import pytest
from hypothesis import assume, given, settings, strategies as st

from app.datamanager.exception_classes import (
    InvalidAutomorphismError, RankMismatchError, TrivialClassError, WordParseError
)
from app.freegroup.words import (
    Automorphism, CyclicWord, Word, apply_auto, cyclic_core, cyclic_reduce, free_reduce, letter_key, parse_letters,
    reduce_letters
)

letters_strategy = st.lists(st.sampled_from([1, -1, 2, -2, 3, -3]), min_size=1, max_size=12)


class TestWords:
    """Parsing, free reduction and canonical cyclic forms."""

    def test_parse_ignores_whitespace_and_identity(self):
        assert parse_letters("a B 1c") == (1, -2, 3)
        assert str(Word.parse("1")) == "1"

    def test_parse_rejects_unknown_characters(self):
        # Execute | Act
        with pytest.raises(WordParseError) as error:
            parse_letters("ab?c")

        # Verify | Assert
        assert error.value.position == 2

    def test_word_is_freely_reduced(self):
        assert str(Word.parse("abBA")) == "1"
        assert str(Word.parse("abBc")) == "ac"
        assert (Word.parse("ab") * Word.parse("Bc")).letters == (1, 3)

    def test_inverse(self):
        assert str(Word.parse("abC").inverse()) == "cBA"

    def test_free_and_cyclic_reduction(self):
        # Execute | Act
        w = free_reduce([1, 2, -2, 3, -3, -1, 2])

        # Verify | Assert
        assert w == Word((2,))
        assert cyclic_reduce(Word.parse("Babb")) == CyclicWord.parse("ab")
        with pytest.raises(TrivialClassError):
            cyclic_reduce(Word.parse("aA"))

    def test_letter_order(self):
        assert sorted([-1, 2, 1, -2], key=letter_key) == [1, -1, 2, -2]

    def test_cyclic_word_is_conjugacy_class(self):
        assert CyclicWord.parse("abA") == CyclicWord.parse("b")
        assert CyclicWord.parse("ba") == CyclicWord.parse("ab")
        assert str(CyclicWord.parse("ba")) == "ab"

    def test_cyclic_word_identifies_inverse(self):
        assert CyclicWord.parse("B") == CyclicWord.parse("b")
        assert CyclicWord.parse("BA") == CyclicWord.parse("ab")

    def test_trivial_class_rejected(self):
        with pytest.raises(TrivialClassError):
            CyclicWord.parse("aA")

    def test_abelian_gcd(self):
        assert CyclicWord.parse("abAB").abelian_gcd() == 0
        assert CyclicWord.parse("aabb").abelian_gcd() == 2
        assert CyclicWord.parse("aab").abelian_gcd() == 1

    @given(letters_strategy)
    def test_reduced_words_have_no_cancellation(self, letters):
        reduced = reduce_letters(letters)
        assert all(x != -y for x, y in zip(reduced, reduced[1:]))

    @given(letters_strategy, st.integers(min_value=0, max_value=11))
    def test_class_is_rotation_invariant(self, letters, shift):
        # Setup | Arrange
        core = cyclic_core(reduce_letters(letters))
        assume(core)
        k = shift % len(core)

        # Verify | Assert
        assert CyclicWord(core[k:] + core[:k]) == CyclicWord(core)
        assert CyclicWord(tuple(-x for x in reversed(core))) == CyclicWord(core)


class TestAutomorphisms:
    """Images, composition, inverses and powers."""

    def test_apply(self, axis_automorphism):
        assert str(axis_automorphism(Word.parse("a"))) == "b"
        assert str(axis_automorphism(Word.parse("c"))) == "ab"
        assert str(axis_automorphism(Word.parse("C"))) == "BA"

    def test_compose_applies_right_factor_first(self, axis_automorphism):
        # Setup | Arrange
        swap = Automorphism.parse("b,a,c")

        # Execute | Act
        composed = axis_automorphism.compose(swap)

        # Verify | Assert
        assert str(composed(Word.parse("a"))) == str(axis_automorphism(Word.parse("b")))
        assert str(composed(Word.parse("a"))) == "c"

    def test_inverse(self, axis_automorphism):
        # Execute | Act
        inverse = axis_automorphism.inverse()

        # Verify | Assert
        assert [str(w) for w in inverse.images] == ["cA", "a", "b"]
        assert inverse.compose(axis_automorphism).is_identity()
        assert axis_automorphism.compose(inverse).is_identity()

    def test_power(self, axis_automorphism):
        assert str(axis_automorphism.power(3)(Word.parse("a"))) == "ab"
        assert axis_automorphism.power(-1) == axis_automorphism.inverse()
        assert axis_automorphism.power(0).is_identity()

    def test_str(self, axis_automorphism):
        assert str(axis_automorphism) == "a->b, b->c, c->ab"

    def test_non_basis_images_rejected(self):
        with pytest.raises(InvalidAutomorphismError):
            Automorphism.parse("a,a,c")

    def test_images_outside_rank_rejected(self):
        with pytest.raises(RankMismatchError):
            Automorphism.parse("b,d,a")

    def test_apply_auto_on_classes(self, axis_automorphism):
        # Execute | Act
        image = apply_auto(axis_automorphism, CyclicWord.parse("abc"))

        # Verify | Assert
        assert image == CyclicWord.parse("bcab")
        assert image == CyclicWord.parse("abbc")

    @settings(max_examples=50, deadline=None)
    @given(letters_strategy)
    def test_inverse_undoes_image(self, letters):
        # Setup | Arrange
        phi = Automorphism.parse("b,c,ab")
        w = Word(tuple(letters))

        # Verify | Assert
        assert phi.inverse()(phi(w)) == w

import math

import pytest

from app.datamanager.exception_classes import DomainError, MissingSymConstantError
from app.outerspace.constants import (
    constants_table, nondegeneracy_threshold, progress_constant, thickness_chain, transient_epsilon,
    transient_shortness_bound
)


class TestThicknessChain:
    def test_degenerate_contraction_constant(self):
        # Execute | Act
        chain = thickness_chain(0.0, 260.0)

        # Verify | Assert
        assert chain.e == 0.0
        assert chain.epsilon_1 == 1.0
        assert chain.epsilon_0 == 1.0
        assert chain.epsilon == 0.5

    def test_formula(self):
        # Execute | Act
        chain = thickness_chain(1.0, 2.0)

        # Verify | Assert
        assert chain.e == pytest.approx(1.0 * (2.0 + 8 * 4.0) + 1.0)
        assert chain.epsilon_0 == pytest.approx(math.exp(-70.0))
        assert chain.epsilon == pytest.approx(math.exp(-70.0) / 2 * math.exp(-8.0))

    def test_domain(self):
        with pytest.raises(DomainError):
            thickness_chain(-1.0, 260.0)
        with pytest.raises(DomainError):
            thickness_chain(1.0, 0.5)


class TestProgressConstant:
    def test_floor_from_coarse_projection(self):
        assert progress_constant(0.0, 0.0).k == 160.0

    def test_large_contraction_constant(self):
        # Execute | Act
        progress = progress_constant(100.0, 10.0)

        # Verify | Assert
        assert progress.lower_slope == 200.0
        assert progress.lower_intercept == 120.0
        assert progress.k == 200.0


class TestTransientShortness:
    def test_epsilon_prime(self):
        assert transient_epsilon(0.5) == pytest.approx(0.1)

    def test_bound(self):
        # Execute | Act
        result = transient_shortness_bound(0.5, 1.0, 2.0, 3.0)

        # Verify | Assert
        assert result.bound == pytest.approx(2 * 2.0 * 4.0 * math.log(5.0) + 2.0)
        assert result.epsilon_prime == pytest.approx(0.1)

    def test_missing_symmetrization_constant(self):
        """The message names the symmetrization lemma the bound depends on."""
        with pytest.raises(MissingSymConstantError, match="Lemma 2.2") as raised:
            transient_shortness_bound(0.5, 1.0, None, 3.0)
        assert raised.value.name == "s_eps"

    def test_epsilon_domain(self):
        with pytest.raises(DomainError):
            transient_shortness_bound(1.5, 1.0, 2.0, 3.0)


class TestThresholds:
    def test_nondegeneracy(self):
        # Execute | Act
        thresholds = nondegeneracy_threshold(1.0, 2.0, 0.5, 3.0)

        # Verify | Assert
        assert thresholds.nondegeneracy == 36.0
        assert thresholds.length_bound_a == 108.0
        assert thresholds.backup_trigger == 16.0
        assert thresholds.epsilon_prime == pytest.approx(0.5 * math.exp(-36.0))
        assert thresholds.length_sandwich == [6.0, 2.0 + 32.0]


class TestConstantsTable:
    """Assembled rows of constants with their source labels."""

    def test_without_epsilon(self):
        # Execute | Act
        names = [row.name for row in constants_table(1.0, 260.0)]

        # Verify | Assert
        assert names[:4] == ["E", "epsilon_1", "epsilon_0", "epsilon"]
        assert "A" not in names
        assert "K" not in names

    def test_with_every_input(self):
        # Execute | Act
        rows = {row.name: row for row in constants_table(1.0, 260.0, 0.5, 2.0, 3.0)}

        # Verify | Assert
        assert rows["A"].value == pytest.approx(3.0 * 18 * 260.0)
        assert rows["K"].value >= 160.0
        assert all(row.provenance for row in rows.values())

    def test_missing_s_value(self):
        """ Test that a missing s_eps names its source. """
        with pytest.raises(MissingSymConstantError):
            constants_table(1.0, 260.0, 0.5)

    @pytest.mark.parametrize("name, label", [
        ("E", "Prop. 6.1"),
        ("epsilon", "Lemma 7.3"),
        ("18DL", "§3"),
        ("A", "Lemma 3.4"),
        ("diameter_sandwich_low", "Lemma 4.4"),
        ("D_eps", "Lemma 5.2"),
        ("K", "Prop. 5.1"),
    ])
    def test_provenance_names_the_source(self, name, label):
        rows = {row.name: row for row in constants_table(1.0, 260.0, 0.5, 2.0, 3.0)}
        assert rows[name].provenance.startswith(label)

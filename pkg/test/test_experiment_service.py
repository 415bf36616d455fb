from unittest.mock import patch

import pytest

from app.outerspace.graphs import uniform_rose
from app.schemas.pydantic_models import ExperimentSpec, PathSampleRow
from app.services.experiment_service import summary_path, with_rank


@pytest.fixture
def experiment_service(ExperimentService_class, mock_data_manager):
    return ExperimentService_class(mock_data_manager)


class TestExperimentService:
    """Dispatch, report columns and summary placement, with a mocked data manager."""

    def test_axis_writes_csv_and_summary(self, experiment_service, mock_data_manager):
        # Setup | Arrange
        spec = ExperimentSpec(command="axis", automorphisms=["b,c,ab"], k_max=2, output="out/axis.csv")

        # Execute | Act
        summary = experiment_service.run(spec)

        # Verify | Assert
        assert summary.rows == 3
        assert summary.warnings == []
        assert summary.values["log_growth_rate"] == pytest.approx(0.2811995743)
        rows, path, columns = mock_data_manager.write_csv.call_args.args
        assert path == "out/axis.csv"
        assert columns == list(PathSampleRow.model_fields)
        assert [row.index for row in rows] == [0, 1, 2]
        mock_data_manager.write_summary.assert_called_once_with(summary, summary_path("out/axis.csv"))
        mock_data_manager.load_graph.assert_not_called()

    def test_geodesic_records_witness_lengths(self, experiment_service, mock_data_manager):
        # Setup | Arrange
        spec = ExperimentSpec(command="geodesic", word="a", length=0.5, samples=3, output="geodesic.csv")

        # Execute | Act
        summary = experiment_service.run(spec)

        # Verify | Assert
        assert summary.values["passed"] is True
        rows = mock_data_manager.write_csv.call_args.args[0]
        assert rows[0].witness_length == "1/3"

    def test_base_graph_from_inputs(self, experiment_service, mock_data_manager, unbalanced_rose):
        # Setup | Arrange
        mock_data_manager.load_graph.return_value = unbalanced_rose
        spec = ExperimentSpec(command="axis", automorphisms=["b,c,ab"], inputs=["rose.json"], output="a.csv")

        # Execute | Act
        G = experiment_service.base_graph(spec)

        # Verify | Assert
        assert G is unbalanced_rose
        mock_data_manager.load_graph.assert_called_once_with("rose.json")

    def test_summary_path(self):
        assert summary_path("reports/run.csv") == "reports/run.summary.json"

    def test_spec_requires_a_path_source(self):
        with pytest.raises(ValueError):
            ExperimentSpec(command="progress-test", output="p.csv")


class TestRankAlignment:
    """PL and sampler configurations take the rank of the base graph, not the default of 3."""

    def test_with_rank(self):
        # Setup | Arrange
        spec = ExperimentSpec(command="contract-test", word="a", seed=1, output="c.csv")

        # Execute | Act
        aligned = with_rank(spec, 4)

        # Verify | Assert
        assert (aligned.pl.rank, aligned.sampler.rank) == (4, 4)
        assert (spec.pl.rank, spec.sampler.rank) == (3, 3)

    def test_progress_runs_in_the_rank_of_the_input(self, experiment_service, mock_data_manager):
        """Test a progress run over a rank 4 input graph.
            experiment_service: ExperimentService over the mocked data manager.
            mock_data_manager: serves uniform_rose(4) for any input.
        """
        # Setup | Arrange
        mock_data_manager.load_graph.return_value = uniform_rose(4)
        spec = ExperimentSpec(
            command="progress-test", word="a", length=0.5, samples=3, inputs=["rose4.json"], output="p.csv"
        )

        # Execute | Act
        with patch("app.services.experiment_service.progress_test") as run_progress:
            experiment_service.run(spec)

        # Verify | Assert
        path, _, config = run_progress.call_args.args
        assert config.rank == 4
        assert path.points[0].rank == 4
        mock_data_manager.load_graph.assert_called_once_with("rose4.json")

    def test_default_rose_follows_the_automorphism(self, experiment_service):
        spec = ExperimentSpec(command="axis", automorphisms=["b,c,d,ab"], output="a.csv")
        assert experiment_service.base_graph(spec).rank == 4

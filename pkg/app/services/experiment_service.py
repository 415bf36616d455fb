"""
    Runs ExperimentSpec files: builds the path, dispatches to the experiment,
    writes the CSV report and the JSON summary.
"""
import logging
import math
from pathlib import Path
from typing import Optional

from app.datamanager.data_manager_interface import DataManagerInterface
from app.freegroup.words import Automorphism, CyclicWord
from app.outerspace.experiments import (
    contraction_test, orbit_qi_test, progress_test, projections_agree_check
)
from app.outerspace.graphs import MarkedMetricGraph, loop_length, systole, uniform_rose
from app.outerspace.paths import (
    SampledPath, certify_geodesic, growth_rate, orbit_path, stretch_loop_path
)
from app.schemas.pydantic_models import (
    AgreementRecord, ContractionPair, ExperimentSpec, ExperimentSummary, OrbitRow, PathSampleRow, ProgressRow
)

logger = logging.getLogger(__name__)

GEODESIC_TOLERANCE = 1e-6


def columns_of(model) -> list[str]:
    return list(model.model_fields)


class ExperimentService:
    def __init__(self, data_manager: DataManagerInterface):
        self.data_manager = data_manager

    def base_graph(self, spec: ExperimentSpec) -> MarkedMetricGraph:
        """ First input file, or the uniform rose of the automorphisms' (else the configured) rank. """
        if spec.inputs:
            return self.data_manager.load_graph(spec.inputs[0])
        if spec.automorphisms:
            return uniform_rose(Automorphism.parse(spec.automorphisms[0]).rank)
        return uniform_rose(spec.pl.rank)

    def build_path(self, spec: ExperimentSpec, G: Optional[MarkedMetricGraph] = None) -> SampledPath:
        """
        The orbit of the first automorphism when one is given, otherwise the
        stretch geodesic of `word` over [0, length].
        """
        if G is None:
            G = self.base_graph(spec)
        if spec.automorphisms:
            return orbit_path(Automorphism.parse(spec.automorphisms[0]), G, spec.k_max)
        return stretch_loop_path(G, CyclicWord.parse(spec.word), spec.length, spec.samples)

    def sample_rows(self, path: SampledPath, witness: Optional[CyclicWord] = None) -> list[PathSampleRow]:
        return [
            PathSampleRow(
                index=i,
                time=path.times[i],
                distance_from_start=path.distance(0, i),
                systole=float(systole(point)),
                witness_length=None if witness is None else str(loop_length(witness, point)),
            )
            for i, point in enumerate(path.points)
        ]

    def run(self, spec: ExperimentSpec) -> ExperimentSummary:
        """
        :param spec: validated experiment spec
        :return: ExperimentSummary (also written next to the CSV as <output>.summary.json)
        """
        G = self.base_graph(spec)
        spec = with_rank(spec, G.rank)
        warnings: list[str] = []
        values: dict = {}
        if spec.command == "axis":
            phi = Automorphism.parse(spec.automorphisms[0])
            path = orbit_path(phi, G, spec.k_max)
            rows, model = self.sample_rows(path), PathSampleRow
            step = path.times[1] if len(path) > 1 else 0.0
            values = {"step": step, "log_growth_rate": math.log(growth_rate(phi))}
        elif spec.command == "geodesic":
            witness = CyclicWord.parse(spec.word) if spec.word else None
            path = self.build_path(spec, G)
            certificate = certify_geodesic(path, GEODESIC_TOLERANCE)
            rows, model = self.sample_rows(path, witness), PathSampleRow
            values = certificate.model_dump()
            if not certificate.passed:
                warnings.append(f"geodesic certificate failed: max deviation {certificate.max_deviation:.3e}")
        elif spec.command == "contract-test":
            report = contraction_test(self.build_path(spec, G), spec.sampler, spec.seed, spec.samples)
            rows, model = report.pairs, ContractionPair
            values = {"empirical_d": report.empirical_d, "resolution": report.resolution}
        elif spec.command == "progress-test":
            report = progress_test(self.build_path(spec, G), spec.pl.word_cap, spec.pl)
            rows, model = report.rows, ProgressRow
            values = {"k": report.fit.k, "violations": report.violations}
            if report.fit.rows_missing:
                warnings.append(f"{report.fit.rows_missing} pairs exceeded the PL caps")
        elif spec.command == "orbit-test":
            generators = [Automorphism.parse(images) for images in spec.automorphisms]
            report = orbit_qi_test(generators, spec.radius, G, config=spec.pl)
            rows, model = report.rows, OrbitRow
            values = {
                "elements": report.elements,
                "lip_k": report.lip_fit.k if report.lip_fit else None,
                "pl_k": report.pl_fit.k if report.pl_fit else None,
            }
            if report.truncated:
                warnings.append("group ball truncated at the element cap")
            missing = sum(1 for row in rows if row.d_pl is None)
            if missing:
                warnings.append(f"{missing} PL estimates exceeded the caps")
        else:
            report = projections_agree_check(self.build_path(spec, G), spec.samples, spec.seed, spec.sampler)
            rows, model = report.records, AgreementRecord
            values = {"max_diameter": report.max_diameter, "skipped": report.skipped}
            if report.existence_failures:
                warnings.append(f"{report.existence_failures} graphs without a short embedded primitive loop")

        self.data_manager.write_csv(rows, spec.output, columns_of(model))
        summary = ExperimentSummary(
            command=spec.command, seed=spec.seed, rows=len(rows), warnings=warnings, values=values
        )
        self.data_manager.write_summary(summary, summary_path(spec.output))
        logger.info("%s: %d rows, %d warnings", spec.command, len(rows), len(warnings))
        return summary


def summary_path(output: str) -> str:
    target = Path(output)
    return str(target.with_name(target.stem + ".summary.json"))


def with_rank(spec: ExperimentSpec, rank: int) -> ExperimentSpec:
    """ Copy of the ExperimentSpec with its PL and sampler configurations set to the rank of the base graph. """
    return spec.model_copy(update={
        "pl": spec.pl.model_copy(update={"rank": rank}),
        "sampler": spec.sampler.model_copy(update={"rank": rank}),
    })

"""
    Experiments on sampled paths: strong contraction, progress in the primitive
    loop complex, agreement of the two projections, nondegeneracy,
    right-minimization, orbit quasi-isometry and the supporting checks.

    Randomized experiments spawn one numpy SeedSequence per cell and evaluate
    cells on a thread pool; reports are assembled by cell index.
"""
from __future__ import annotations

import itertools
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from app.core.config import MAX_WORKERS
from app.datamanager.exception_classes import (
    DomainError, InsufficientSamplesError, InvalidPathError, SamplerError, VolumeError
)
from app.freegroup.whitehead import is_primitive, joint_basis
from app.freegroup.words import Automorphism, CyclicWord, oriented_cycle
from app.outerspace.constants import thickness_chain, transient_shortness_bound
from app.outerspace.graphs import (
    MarkedMetricGraph, act, as_fraction, embedded_loops, loop_length, pinch_distance_bound, pinch_loop, systole
)
from app.outerspace.metric import candidates, lip_distance, log_ratio
from app.outerspace.paths import (
    SampledPath, cp_project, distance_to_path, length_profile, min_length_times, stretch_loop_path
)
from app.outerspace.plgraph import classes_up_to, d_pl, pl_representatives, primitive_classes_up_to
from app.outerspace.sampler import GraphSampler
from app.schemas.pydantic_models import (
    AgreementRecord, ContractionPair, ContractionReport, ContractionTrendReport, ContractionTrendRow,
    MinimizerLipschitzRecord, MinimizerLipschitzReport,
    NondegeneracyResult, OrbitQIReport, OrbitRow, PLConfig, ProgressReport, ProgressRow,
    ProjectionsAgreeReport, QuasiIsometryFit, RightMinimizationReport, RightMinimizationViolation,
    SamplerConfig, ThicknessProfile, TransientShortnessRecord, TransientShortnessReport
)

logger = logging.getLogger(__name__)

PARAMETER_DENOMINATOR = 10**6
MIN_PINCH = Fraction(1, 100)
SHORT_LOOP_LENGTH = Fraction(2, 3)
AGREEMENT_RATIO = Fraction(3)
MIN_PROGRESS_SAMPLES = 3
ORBIT_TEST_LENGTH = 3


def _run_cells(function: Callable, cells: Sequence) -> list:
    with ThreadPoolExecutor(max_workers=MAX_WORKERS) as executor:
        return list(executor.map(function, cells))


def fit_quasi_isometry(rows: Sequence[tuple[float, Optional[float]]]) -> QuasiIsometryFit:
    """
    Smallest K >= 1 with x/K - K <= y <= K·x + K on every (x, y) row.
    Rows whose y is None (a cap was hit) are counted as missing, not used.
    """
    k = 1.0
    used = 0
    for x, y in rows:
        if y is None:
            continue
        used += 1
        k = max(k, y / (x + 1), (-y + math.sqrt(y * y + 4 * x)) / 2)
    return QuasiIsometryFit(k=k, rows_used=used, rows_missing=len(rows) - used)


def path_classes(path: SampledPath, config: PLConfig) -> list[CyclicWord]:
    """ Union of the shortest primitive representatives of every sample. """
    found = set()
    for point in path.points:
        found.update(pl_representatives(point, config)[0])
    return sorted(found, key=CyclicWord.sort_key)


# -----   STRONG CONTRACTION   -----

def _place_off_path(sampler: GraphSampler, rng: np.random.Generator,
                    path: SampledPath) -> tuple[MarkedMetricGraph, Fraction]:
    radius = sampler.config.radius
    closest: Optional[Fraction] = None
    for _ in range(sampler.config.max_attempts):
        H = sampler.sample_thick(rng)
        ratio = distance_to_path(H, path)
        if ratio == 1:
            continue
        if radius is not None and log_ratio(ratio) > radius:
            closest = ratio if closest is None else min(closest, ratio)
            continue
        return H, ratio
    raise SamplerError(
        "no sampled graph lies off the path within the sampler radius",
        {"attempts": sampler.config.max_attempts, "radius": radius,
         "closest": None if closest is None else log_ratio(closest)},
    )


def _pinch_partner(H: MarkedMetricGraph, alpha: CyclicWord, ell: Fraction, ratio: Fraction,
                   u: float) -> tuple[MarkedMetricGraph, Fraction, Fraction]:
    """ H_σ with σ >= (1 - (1 - ℓ)e^d)/ℓ; the bound (1 - σℓ)/(1 - ℓ) is re-checked exactly. """
    lower = max((1 - (1 - ell) * ratio) / ell, MIN_PINCH)
    sigma = Fraction(float(lower + (1 - lower) * Fraction(u))).limit_denominator(PARAMETER_DENOMINATOR)
    if not 0 < sigma <= 1 or pinch_distance_bound(ell, sigma) > ratio:
        sigma = Fraction(1)
    return pinch_loop(H, alpha, sigma), sigma, pinch_distance_bound(ell, sigma)


def _stretch_partner(H: MarkedMetricGraph, alpha: CyclicWord, ell: Fraction, ratio: Fraction,
                     u: float) -> tuple[MarkedMetricGraph, Fraction, Fraction]:
    """ End of a stretch segment of α; the stretch factor q bounds exp d(H, H'). """
    horizon = min(log_ratio(ratio), -math.log(ell.numerator) + math.log(ell.denominator))
    try:
        end = stretch_loop_path(H, alpha, 0.99 * u * horizon, 2).points[-1]
    except (VolumeError, InvalidPathError):
        return H, Fraction(1), Fraction(1)
    q = loop_length(alpha, end) / ell
    if q > ratio:
        return H, Fraction(1), Fraction(1)
    return end, q, q


def _contraction_cell(args) -> ContractionPair:
    cell, cell_seed, sampler, path = args
    rng = np.random.default_rng(cell_seed)
    H, ratio = _place_off_path(sampler, rng, path)
    loops = [(loop, alpha, ell) for loop, alpha, ell in embedded_loops(H, 1) if ell < 1]
    construction, parameter, bound = "identity", Fraction(1), Fraction(1)
    H_prime = H
    if loops:
        _, alpha, ell = loops[int(rng.integers(0, len(loops)))]
        u = float(rng.random())
        if rng.integers(0, 2) == 0:
            H_prime, parameter, bound = _pinch_partner(H, alpha, ell, ratio, u)
            construction = "pinch"
        else:
            H_prime, parameter, bound = _stretch_partner(H, alpha, ell, ratio, u)
            construction = "stretch"
        if bound == 1:
            construction, H_prime = "identity", H
    projection = cp_project(H, path)
    projection_prime = projection if H_prime is H else cp_project(H_prime, path)
    return ContractionPair(
        cell=cell,
        distance_to_path=log_ratio(ratio),
        construction=construction,
        parameter=str(parameter),
        certified_bound=0.0 if bound == 1 else log_ratio(bound),
        projection=projection.indices,
        projection_prime=projection_prime.indices,
        diameter=path.set_diameter(projection.indices + projection_prime.indices),
    )


def contraction_test(path: SampledPath, sampler_config: SamplerConfig, seed: int, pairs: int = 20) -> ContractionReport:
    """
    Empirical strong-contraction constant of a sampled path.
    Each pair (H, H') satisfies d(H, H') <= d(H, γ) by construction: H' is a pinch or a
    stretch segment of an embedded loop of H whose certified bound is checked exactly.
    :param path: certified geodesic or orbit path
    :param sampler_config: random graph sampler (radius keeps H near the path)
    :param seed: root seed, one child seed per pair
    :param pairs: number of pairs
    :return: ContractionReport, empirical D = max diam(π(H) ∪ π(H'))
    """
    if pairs < 1:
        raise InsufficientSamplesError("contraction pairs", 1, pairs)
    sampler = GraphSampler(sampler_config)
    seeds = np.random.SeedSequence(seed).spawn(pairs)
    rows = _run_cells(_contraction_cell, [(k, s, sampler, path) for k, s in enumerate(seeds)])
    empirical = max(row.diameter for row in rows)
    logger.info("contraction_test on '%s': empirical D %.6f over %d pairs", path.description, empirical, pairs)
    return ContractionReport(
        description=path.description, seed=seed, empirical_d=empirical, resolution=path.resolution, pairs=rows
    )


def contraction_trend(path: SampledPath, sampler_config: SamplerConfig, seed: int, radii: Sequence[float],
                      pairs: int = 20) -> ContractionTrendReport:
    """
    Empirical D as the sampled graphs are allowed farther from the path.
    Each radius reruns contraction_test with the same seed; the rows are a
    reported trend, no bound on D is asserted.
    """
    if not radii:
        raise InsufficientSamplesError("contraction radii", 1, 0)
    rows = []
    for radius in sorted(radii):
        if radius <= 0:
            raise DomainError("radius", radius, "must be positive")
        report = contraction_test(path, sampler_config.model_copy(update={"radius": radius}), seed, pairs)
        rows.append(ContractionTrendRow(
            radius=radius,
            empirical_d=report.empirical_d,
            farthest=max(pair.distance_to_path for pair in report.pairs),
        ))
    return ContractionTrendReport(description=path.description, seed=seed, rows=rows)


# -----   PROGRESS   -----

def progress_test(path: SampledPath, word_cap: Optional[int] = None, config: PLConfig | None = None) -> ProgressReport:
    """
    d_PL estimates between all sampled pairs, the quasigeodesic fit and the rows
    exceeding the coarse-Lipschitz upper bound L·|s - t| + L.
    :param word_cap: overrides config.word_cap
    :return: ProgressReport (estimates hitting a cap are missing, never filled in)
    """
    if len(path) < MIN_PROGRESS_SAMPLES:
        raise InsufficientSamplesError("progress fit", MIN_PROGRESS_SAMPLES, len(path))
    config = config or PLConfig(rank=path.points[0].rank)
    if word_cap is not None:
        config = config.model_copy(update={"word_cap": word_cap})
    big_l = config.lipschitz_constant
    pairs = list(itertools.combinations(range(len(path)), 2))
    values = _run_cells(lambda ij: d_pl(path.points[ij[0]], path.points[ij[1]], config).value, pairs)
    rows = []
    for (i, j), value in zip(pairs, values):
        gap = path.times[j] - path.times[i]
        upper = big_l * gap + big_l
        rows.append(ProgressRow(
            i=i, j=j, time_gap=gap, d_pl=value, upper_bound=upper,
            violates_upper_bound=value is not None and value > upper,
        ))
    fit = fit_quasi_isometry([(row.time_gap, row.d_pl) for row in rows])
    if fit.rows_used == 0:
        raise InsufficientSamplesError("progress fit (estimated pairs)", 1, 0)
    if fit.rows_missing:
        logger.warning("progress_test: %d of %d pairs exceeded the PL caps", fit.rows_missing, len(rows))
    return ProgressReport(
        lipschitz_constant=big_l, rows=rows, fit=fit, violations=sum(row.violates_upper_bound for row in rows)
    )


# -----   PROJECTIONS   -----

def _agreement_cell(args) -> AgreementRecord:
    cell, cell_seed, sampler, path = args
    rng = np.random.default_rng(cell_seed)
    H = sampler.sample(rng)
    ratio = distance_to_path(H, path)
    distance = 0.0 if ratio == 1 else log_ratio(ratio)
    if ratio < AGREEMENT_RATIO:
        return AgreementRecord(cell=cell, distance_to_path=distance, skipped=True)
    projection = cp_project(H, path).indices
    short, diameters = [], []
    for _, alpha, _ in embedded_loops(H, SHORT_LOOP_LENGTH):
        if not is_primitive(alpha, H.rank):
            continue
        minimizers = min_length_times(alpha, path).indices
        short.append(str(alpha))
        diameters.append(path.set_diameter(minimizers + projection))
    return AgreementRecord(cell=cell, distance_to_path=distance, skipped=False, short_loops=short, diameters=diameters)


def projections_agree_check(path: SampledPath, samples: int, seed: int,
                            sampler_config: SamplerConfig | None = None) -> ProjectionsAgreeReport:
    """
    For random H with d(H, γ) >= log 3, every embedded primitive α with ℓ(α|H) <= 2/3
    and the diameter of ρ_γ(α) ∪ π_γ(H). An H with no such α is an existence failure.
    """
    if samples < 1:
        raise InsufficientSamplesError("agreement samples", 1, samples)
    sampler = GraphSampler(sampler_config or SamplerConfig(rank=path.points[0].rank))
    seeds = np.random.SeedSequence(seed).spawn(samples)
    records = _run_cells(_agreement_cell, [(k, s, sampler, path) for k, s in enumerate(seeds)])
    used = [r for r in records if not r.skipped]
    if not used:
        raise SamplerError(
            "no sampled graph lies at distance >= log 3 from the path",
            {"samples": samples, "farthest": max(r.distance_to_path for r in records)},
        )
    diameters = [x for r in used for x in r.diameters]
    failures = sum(1 for r in used if not r.short_loops)
    if failures:
        logger.warning("projections_agree_check: %d graphs without a short embedded primitive loop", failures)
    return ProjectionsAgreeReport(
        seed=seed,
        records=records,
        max_diameter=max(diameters) if diameters else None,
        existence_failures=failures,
        skipped=len(records) - len(used),
    )


# -----   NONDEGENERACY AND MINIMIZERS   -----

def nondegeneracy_check(path: SampledPath, d: float, config: PLConfig | None = None) -> NondegeneracyResult:
    """
    Looks for sampled s < t with backward distance d(γ(t), γ(s)) >= 18DL.
    The witness is the first such pair of distinct points in scan order.
    """
    if d < 0:
        raise DomainError("D", d, "must be nonnegative")
    threshold = 18 * d * (config or PLConfig()).lipschitz_constant
    witness = None
    max_backward = 0.0
    for i, j in itertools.combinations(range(len(path)), 2):
        backward = path.distance(j, i)
        max_backward = max(max_backward, backward)
        if witness is None and backward >= threshold and path.diam_pair(i, j) > 0:
            witness = [i, j]
    return NondegeneracyResult(
        nondegenerate=witness is not None, threshold=threshold, max_backward=max_backward, witness=witness
    )


def _default_classes(path: SampledPath) -> list[CyclicWord]:
    found = set()
    for point in path.points:
        found.update(candidates(point).classes)
    return sorted(found, key=CyclicWord.sort_key)


def right_minimization_check(path: SampledPath, d: float,
                             classes: Sequence[CyclicWord] | None = None) -> RightMinimizationReport:
    """
    Whenever ℓ(α|γ(t₁)) < e^-D·ℓ(α|γ(s)) for sampled s <= t₁, every sampled
    minimizer of α must lie strictly right of s.
    :param classes: classes to test, by default the candidates of every sample
    """
    if d < 0:
        raise DomainError("D", d, "must be nonnegative")
    classes = list(classes) if classes is not None else _default_classes(path)
    factor = math.exp(-d)
    hypotheses = 0
    violations = []
    for alpha in classes:
        lengths = [float(x) for x in length_profile(alpha, path)]
        minimizers = min_length_times(alpha, path).indices
        for i in range(len(path)):
            for j in range(i, len(path)):
                if not lengths[j] < factor * lengths[i]:
                    continue
                hypotheses += 1
                if min(minimizers) <= i:
                    violations.append(RightMinimizationViolation(
                        word=str(alpha), s_index=i, t1_index=j, minimizer_indices=minimizers
                    ))
    return RightMinimizationReport(
        d=d, classes=len(classes), hypotheses=hypotheses, violations=violations, passed=not violations
    )


def minimizer_lipschitz_check(path: SampledPath, word_cap: int, config: PLConfig | None = None) -> MinimizerLipschitzReport:
    """
    diam(ρ_γ(α) ∪ ρ_γ(β)) for adjacent PL vertices α, β drawn from the samples'
    projections and the primitive classes of length <= word_cap. An adjacent pair
    is bounded by D·1 + D, so each diameter implies D >= diam / 2.
    """
    config = config or PLConfig(rank=path.points[0].rank)
    pool = set(path_classes(path, config)) | set(primitive_classes_up_to(config.rank, word_cap))
    pool = sorted(pool, key=CyclicWord.sort_key)
    minimizers = {alpha: min_length_times(alpha, path).indices for alpha in pool}
    records = [
        MinimizerLipschitzRecord(
            alpha=str(a), beta=str(b), diameter=path.set_diameter(minimizers[a] + minimizers[b])
        )
        for a, b in itertools.combinations(pool, 2) if joint_basis(a, b, config.rank)
    ]
    max_diameter = max((r.diameter for r in records), default=0.0)
    return MinimizerLipschitzReport(pairs=records, max_diameter=max_diameter, implied_d=max_diameter / 2)


def transient_shortness_check(path: SampledPath, s_eps: Optional[float] = None, s_eps_prime: Optional[float] = None,
                              d: Optional[float] = None, epsilon: Optional[float] = None,
                              config: PLConfig | None = None) -> TransientShortnessReport:
    """
    For each class projected from the samples, the diameter of {γ(s) : ℓ(α|γ(s)) <= m_α + 2}.
    The closed-form bound is attached when ε, D and both s-values are supplied.
    """
    config = config or PLConfig(rank=path.points[0].rank)
    records = []
    for alpha in path_classes(path, config):
        lengths = length_profile(alpha, path)
        m_alpha = min(lengths)
        short = [i for i, x in enumerate(lengths) if x <= m_alpha + 2]
        records.append(TransientShortnessRecord(
            word=str(alpha), m_alpha=float(m_alpha), diameter=path.set_diameter(short)
        ))
    max_diameter = max((r.diameter for r in records), default=0.0)
    bound = None
    if None not in (s_eps, s_eps_prime, d, epsilon):
        bound = transient_shortness_bound(epsilon, d, s_eps, s_eps_prime).bound
    return TransientShortnessReport(
        records=records,
        max_diameter=max_diameter,
        bound=bound,
        within_bound=None if bound is None else max_diameter <= bound,
    )


def thickness_profile(path: SampledPath, d: float, lipschitz_constant: float) -> ThicknessProfile:
    """ Systole at every sample against ε = (ε₀/2)·e^-4DL of the thickness chain. """
    epsilon = thickness_chain(d, lipschitz_constant).epsilon
    systoles = [systole(point) for point in path.points]
    minimum = min(systoles)
    return ThicknessProfile(
        systoles=[float(x) for x in systoles],
        minimum=float(minimum),
        epsilon=epsilon,
        thick=minimum >= as_fraction(epsilon),
    )


# -----   ORBIT QUASI-ISOMETRY   -----

def _generator_labels(generators: Sequence[Automorphism]) -> list[tuple[str, Automorphism]]:
    labeled = []
    for k, phi in enumerate(generators):
        labeled.append((f"g{k + 1}", phi))
        labeled.append((f"g{k + 1}^-1", phi.inverse()))
    return labeled


def group_ball(generators: Sequence[Automorphism], radius: int, cap: int) -> tuple[list[tuple[str, int, Automorphism]], bool]:
    """
    Breadth-first ball in the group generated by `generators`. Elements are identified
    by their action on the oriented conjugacy classes of length <= 3, i.e. as outer automorphisms;
    a class and its inverse are told apart so that a↦A is not the identity.
    :return: ([(word, word length, element)], truncated)
    """
    rank = generators[0].rank
    test_classes = classes_up_to(rank, ORBIT_TEST_LENGTH)

    def key(phi: Automorphism) -> tuple:
        return tuple(oriented_cycle(phi.apply_letters(c.letters)) for c in test_classes)

    identity = Automorphism.identity(rank)
    ball = [("1", 0, identity)]
    seen = {key(identity)}
    queue = deque(ball)
    labeled = _generator_labels(generators)
    while queue:
        word, length, phi = queue.popleft()
        if length == radius:
            continue
        for label, g in labeled:
            element = phi.compose(g)
            k = key(element)
            if k in seen:
                continue
            if len(ball) >= cap:
                logger.warning("group ball truncated at %d elements (radius %d)", cap, radius)
                return ball, True
            seen.add(k)
            entry = (label if word == "1" else f"{word}*{label}", length + 1, element)
            ball.append(entry)
            queue.append(entry)
    return ball, False


def orbit_qi_test(generators: Sequence[Automorphism], radius: int, G: MarkedMetricGraph, cap: int = 500,
                  config: PLConfig | None = None) -> OrbitQIReport:
    """
    Word length against d(G, g·G) and the d_PL estimate over a ball of the group.
    :param generators: finite generating set, all of the rank of G
    :param radius: ball radius in the word metric
    :param cap: maximum number of group elements
    :return: OrbitQIReport with both quasi-isometry fits
    """
    if not generators:
        raise InsufficientSamplesError("orbit generators", 1, 0)
    if radius < 0:
        raise DomainError("radius", radius, "must be nonnegative")
    config = config or PLConfig(rank=G.rank)
    ball, truncated = group_ball(generators, radius, cap)

    def measure(entry) -> OrbitRow:
        word, length, element = entry
        H = act(element, G)
        return OrbitRow(word=word, word_length=length, lip_distance=lip_distance(G, H), d_pl=d_pl(G, H, config).value)

    rows = _run_cells(measure, ball)
    moved = [r for r in rows if r.word_length > 0]
    return OrbitQIReport(
        radius=radius,
        elements=len(rows),
        truncated=truncated,
        rows=rows,
        lip_fit=fit_quasi_isometry([(r.word_length, r.lip_distance) for r in moved]) if moved else None,
        pl_fit=fit_quasi_isometry([(r.word_length, r.d_pl) for r in moved]) if moved else None,
    )

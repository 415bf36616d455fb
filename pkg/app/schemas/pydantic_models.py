from typing import List, Literal, Optional
from pydantic import BaseModel, Field, field_validator, model_validator
import re

from app.core.config import (
    LIPSCHITZ_CONSTANT, PL_WORD_CAP, PL_RADIUS_CAP, PL_SEARCH_CAP, PL_PAIR_CAP, PL_REPRESENTATIVES
)

LENGTH_PATTERN = re.compile(r"^\d+(/\d+)?$")


# -----   GRAPH FILE   -----

class EdgeRecord(BaseModel):
    id: str
    from_: str = Field(alias="from")
    to: str
    length: str  # "numerator/denominator"

    model_config = {"populate_by_name": True}

    @field_validator("length")
    def validate_length(cls, v):
        """Exact positive rational written as n/d or n"""
        if not LENGTH_PATTERN.match(v):
            raise ValueError("length must be written as 'numerator/denominator'")
        numerator, _, denominator = v.partition("/")
        if int(numerator) == 0 or (denominator and int(denominator) == 0):
            raise ValueError("length must be a positive rational")
        return v


class GraphFile(BaseModel):
    rank: int = Field(ge=3)
    label: Optional[str] = None
    vertices: List[str]
    edges: List[EdgeRecord]
    base: str
    marking: List[str]  # edge ids separated by spaces, '~' reverses an edge

    @model_validator(mode="after")
    def check_references(self):
        """Endpoints and base must be declared vertices, edge ids unique"""
        vertices = set(self.vertices)
        if len(vertices) != len(self.vertices):
            raise ValueError("vertices: duplicate vertex id")
        if self.base not in vertices:
            raise ValueError(f"base: unknown vertex '{self.base}'")
        ids = [edge.id for edge in self.edges]
        if len(set(ids)) != len(ids):
            raise ValueError("edges: duplicate edge id")
        for index, edge in enumerate(self.edges):
            for end in (edge.from_, edge.to):
                if end not in vertices:
                    raise ValueError(f"edges.{index}: unknown vertex '{end}'")
        return self


# -----   DIAGNOSTICS   -----

class Violation(BaseModel):
    code: str
    message: str


class GraphDiagnostics(BaseModel):
    valid: bool
    violations: List[Violation] = []


# -----   CONFIGURATION   -----

class PLConfig(BaseModel):
    lipschitz_constant: float = LIPSCHITZ_CONSTANT
    rank: int = Field(3, ge=3)
    word_cap: int = Field(PL_WORD_CAP, ge=1)
    radius_cap: int = Field(PL_RADIUS_CAP, ge=1)
    search_cap: int = Field(PL_SEARCH_CAP, ge=1)
    pair_cap: int = Field(PL_PAIR_CAP, ge=1)  # PL pairs measured before d_PL is truncated
    representatives: Optional[int] = Field(PL_REPRESENTATIVES, ge=1)  # None: the whole projection

    @field_validator("lipschitz_constant")
    def validate_lipschitz_constant(cls, v):
        """The coarse Lipschitz constant of the projection is at least 1"""
        if v < 1:
            raise ValueError("L must be at least 1")
        return v


class SamplerConfig(BaseModel):
    rank: int = Field(3, ge=3)
    shapes: List[Literal["rose", "theta", "subdivided_rose"]] = ["rose", "theta", "subdivided_rose"]
    min_twist: int = Field(0, ge=0)
    max_twist: int = Field(8, ge=0)
    epsilon: Optional[float] = None  # thickness lower bound
    radius: Optional[float] = None  # keep H with d(H, path) <= radius
    max_attempts: int = Field(1000, ge=1)
    resolution: int = Field(1_000_000, ge=10)  # common denominator of sampled lengths

    @model_validator(mode="after")
    def check_twist(self):
        if self.min_twist > self.max_twist:
            raise ValueError("min_twist must not exceed max_twist")
        return self


# -----   METRIC   -----

class SymConstantEstimate(BaseModel):
    epsilon: float
    samples: int
    estimate: float
    seed: int

    @field_validator("estimate")
    def validate_estimate(cls, v):
        """Symmetrized over forward distance is never below 1"""
        if v < 1:
            raise ValueError("estimate must be at least 1")
        return v


class DistanceReport(BaseModel):
    forward: float
    backward: float
    sym: float
    diam: float


class CandidateRecord(BaseModel):
    kind: str
    word: str
    path: str
    length: str


# -----   PATHS   -----

class GeodesicCertificate(BaseModel):
    tolerance: float
    max_deviation: float
    passed: bool
    pairs: int


class ProjectionResult(BaseModel):
    indices: List[int]
    times: List[float]
    distance: float
    diameter: float
    resolution: float


class MinimizerReport(BaseModel):
    word: str
    m_alpha: float
    indices: List[int]
    times: List[float]
    resolution: float

    @field_validator("m_alpha")
    def validate_m_alpha(cls, v):
        if v <= 0:
            raise ValueError("minimal length must be positive")
        return v


class ContractionPair(BaseModel):
    cell: int
    distance_to_path: float
    construction: Literal["identity", "pinch", "stretch"]
    parameter: str
    certified_bound: float
    projection: List[int]
    projection_prime: List[int]
    diameter: float


class ContractionReport(BaseModel):
    description: str
    seed: int
    empirical_d: float
    resolution: float
    pairs: List[ContractionPair]


class ContractionTrendRow(BaseModel):
    radius: float
    empirical_d: float
    farthest: float  # largest accepted d(H, path)


class ContractionTrendReport(BaseModel):
    description: str
    seed: int
    rows: List[ContractionTrendRow]


class ProgressRow(BaseModel):
    i: int
    j: int
    time_gap: float
    d_pl: Optional[int]
    upper_bound: float
    violates_upper_bound: bool


class QuasiIsometryFit(BaseModel):
    k: float
    rows_used: int
    rows_missing: int

    @field_validator("k")
    def validate_k(cls, v):
        if v < 1:
            raise ValueError("K must be at least 1")
        return v


class ProgressReport(BaseModel):
    lipschitz_constant: float
    rows: List[ProgressRow]
    fit: QuasiIsometryFit
    violations: int


class AgreementRecord(BaseModel):
    cell: int
    distance_to_path: float
    skipped: bool
    short_loops: List[str] = []
    diameters: List[float] = []


class ProjectionsAgreeReport(BaseModel):
    seed: int
    records: List[AgreementRecord]
    max_diameter: Optional[float]
    existence_failures: int
    skipped: int


class NondegeneracyResult(BaseModel):
    nondegenerate: bool
    threshold: float
    max_backward: float
    witness: Optional[List[int]] = None  # [s index, t index]


class RightMinimizationViolation(BaseModel):
    word: str
    s_index: int
    t1_index: int
    minimizer_indices: List[int]


class RightMinimizationReport(BaseModel):
    d: float
    classes: int
    hypotheses: int
    violations: List[RightMinimizationViolation]
    passed: bool


class OrbitRow(BaseModel):
    word: str
    word_length: int
    lip_distance: float
    d_pl: Optional[int]


class OrbitQIReport(BaseModel):
    radius: int
    elements: int
    truncated: bool
    rows: List[OrbitRow]
    lip_fit: Optional[QuasiIsometryFit]
    pl_fit: Optional[QuasiIsometryFit]


class MinimizerLipschitzRecord(BaseModel):
    alpha: str
    beta: str
    diameter: float


class MinimizerLipschitzReport(BaseModel):
    pairs: List[MinimizerLipschitzRecord]
    max_diameter: float
    implied_d: float


class TransientShortnessRecord(BaseModel):
    word: str
    m_alpha: float
    diameter: float


class TransientShortnessReport(BaseModel):
    records: List[TransientShortnessRecord]
    max_diameter: float
    bound: Optional[float]
    within_bound: Optional[bool]


class ThicknessProfile(BaseModel):
    systoles: List[float]
    minimum: float
    epsilon: float
    thick: bool


# -----   PRIMITIVE LOOP COMPLEX   -----

class PLProjection(BaseModel):
    classes: List[str]
    truncated: bool
    explored: int


class PLDistance(BaseModel):
    value: Optional[int]  # None when a cap was hit
    certified: bool
    truncated: bool
    pairs: int
    approximate: bool = False  # only the shortest representatives were measured


# -----   CONSTANTS   -----

class ThicknessConstants(BaseModel):
    d: float
    lipschitz_constant: float
    e: float
    epsilon_1: float
    epsilon_0: float
    epsilon: float


class ThresholdConstants(BaseModel):
    nondegeneracy: float
    epsilon_prime: float
    length_bound_a: float
    backup_trigger: float
    diameter_sandwich: List[float]
    length_sandwich: List[float]


class TransientShortness(BaseModel):
    bound: float
    epsilon_prime: float


class ProgressConstants(BaseModel):
    d: float
    d_epsilon: float
    lower_slope: float
    lower_intercept: float
    upper_slope: float
    upper_intercept: float
    k: float

    @field_validator("k")
    def validate_k(cls, v):
        if v < 1:
            raise ValueError("K must be at least 1")
        return v


class ConstantRow(BaseModel):
    name: str
    value: float
    provenance: str


# -----   EXPERIMENTS   -----

EXPERIMENT_COMMANDS = ("contract-test", "progress-test", "orbit-test", "agree-test", "geodesic", "axis")
RANDOMIZED_COMMANDS = ("contract-test", "agree-test")


class ExperimentSpec(BaseModel):
    command: Literal["contract-test", "progress-test", "orbit-test", "agree-test", "geodesic", "axis"]
    inputs: List[str] = []
    automorphisms: List[str] = []  # comma-separated images, e.g. "b,c,ab"
    word: Optional[str] = None
    k_max: int = Field(6, ge=1)
    length: float = Field(1.0, gt=0)  # stretch time T
    samples: int = Field(20, ge=1)
    radius: int = Field(1, ge=0)
    seed: Optional[int] = None
    pl: PLConfig = PLConfig()
    sampler: SamplerConfig = SamplerConfig()
    output: str

    @model_validator(mode="after")
    def check_seed(self):
        """Randomized commands are reproducible only from an explicit seed"""
        if self.command in RANDOMIZED_COMMANDS and self.seed is None:
            raise ValueError(f"seed is mandatory for '{self.command}'")
        return self

    @model_validator(mode="after")
    def check_path_source(self):
        """Every command needs the inputs that define its path or group"""
        if self.command in ("axis", "orbit-test") and not self.automorphisms:
            raise ValueError(f"'{self.command}' needs at least one automorphism")
        if self.command == "geodesic" and self.word is None:
            raise ValueError("'geodesic' needs the stretched word")
        if not self.automorphisms and self.word is None:
            raise ValueError(f"'{self.command}' needs 'automorphisms' or 'word'")
        return self


class ExperimentSummary(BaseModel):
    command: str
    seed: Optional[int]
    rows: int
    warnings: List[str]
    values: dict


class PathSampleRow(BaseModel):
    index: int
    time: float
    distance_from_start: float
    systole: float
    witness_length: Optional[str] = None  # exact "n/d", geodesic runs only

"""
Pydantic schemas for configuration, reports and CLI documents
"""
from pathlib import Path
from typing import Callable, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .config import settings


AggregationKind = Literal["min", "max", "mean", "abs_diff"]
GeodesicMode = Literal["nearest_anchor", "all_anchors", "dense_nama"]
InfoDistanceKind = Literal["potential", "hellinger", "kl"]
AdaptationKind = Literal["random", "skewed", "even", "distort", "rotation"]
MethodName = Literal["spud", "mash", "mash_minus", "nama", "jlma", "mapa"]

STANDARD_ANCHOR_FRACTIONS = (0.05, 0.10, 0.15, 0.20, 0.30, 0.50)

# Importance oracle: (values, labels, rng) -> one importance score per feature
ImportanceOracle = Callable[[np.ndarray, np.ndarray, np.random.Generator], np.ndarray]


# ====================================
# Randomness
# ====================================
class RandomSource(BaseModel):
    """Seed wrapper; every stochastic step draws from a named stream of it"""
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0, lt=2**64)

    model_config = ConfigDict(frozen=True)

    def generator(self, stream: str = "default") -> np.random.Generator:
        """
        Build an independent generator for a named stream

        Args:
            stream: Name of the stochastic step (e.g. "anchors", "noise")

        Returns:
            numpy Generator seeded from (seed, stream)
        """
        stream_key = [ord(c) for c in stream]
        return np.random.default_rng(np.random.SeedSequence([self.seed, *stream_key]))


# ====================================
# Method Configuration
# ====================================
class KernelParams(BaseModel):
    """k-NN / alpha-decaying kernel parameters"""
    k: int = Field(default_factory=lambda: settings.kernel_k, gt=0)
    alpha: float = Field(default_factory=lambda: settings.kernel_alpha, gt=0)
    metric: str = Field(default_factory=lambda: settings.kernel_metric)

    model_config = ConfigDict(frozen=True)


class GeodesicConfig(BaseModel):
    """SPUD cross-domain geodesic estimation options"""
    aggregation: AggregationKind = "min"
    mode: GeodesicMode = "nearest_anchor"
    use_info_distance: bool = False
    bridge_components: bool = Field(default_factory=lambda: settings.bridge_components)
    nu: float = Field(default_factory=lambda: settings.anchor_nu, gt=0, le=1)

    model_config = ConfigDict(frozen=True)


class MashConfig(BaseModel):
    """MASH diffusion and pseudo-connection options"""
    info_distance: InfoDistanceKind = Field(default_factory=lambda: settings.info_distance)
    eta: float = Field(default_factory=lambda: settings.mash_eta, ge=0, lt=1)
    max_iterations: int = Field(default_factory=lambda: settings.mash_max_iterations, ge=0)
    max_new_per_iter: int = Field(default_factory=lambda: settings.mash_max_new_per_iter, gt=0)
    holdout_fraction: float = Field(default_factory=lambda: settings.mash_holdout_fraction, gt=0, lt=1)
    t_override: Optional[int] = Field(None, gt=0)
    t_max: int = Field(default_factory=lambda: settings.vne_t_max, ge=2)
    nu: float = Field(default_factory=lambda: settings.anchor_nu, gt=0, le=1)
    gamma: float = Field(default_factory=lambda: settings.extension_gamma, ge=0, le=1)

    model_config = ConfigDict(frozen=True)


class BaselineConfig(BaseModel):
    """JLMA / MAPA options"""
    method: Literal["jlma", "mapa"]
    dim: int = Field(..., ge=1)
    kparams: KernelParams = Field(default_factory=KernelParams)

    model_config = ConfigDict(frozen=True)


class AdaptationSpec(BaseModel):
    """How a single dataset is turned into a co-domain pair"""
    kind: AdaptationKind
    anchor_fraction: float = Field(0.2, gt=0, le=1)
    seed: RandomSource = Field(default_factory=RandomSource)
    noise_scale: float = Field(default_factory=lambda: settings.distortion_scale, ge=0)
    importance_oracle: Optional[ImportanceOracle] = Field(None, exclude=True)
    importance_file: Optional[str] = None

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    @field_validator("seed", mode="before")
    @classmethod
    def _seed_from_int(cls, value):
        if isinstance(value, int):
            return RandomSource(seed=value)
        return value

    @property
    def standard_fraction(self) -> bool:
        """True when the anchor fraction is one of the standard benchmark levels"""
        return any(abs(self.anchor_fraction - f) < 1e-12 for f in STANDARD_ANCHOR_FRACTIONS)


# ====================================
# Diagnostics & Reports
# ====================================
class PseudoConnection(BaseModel):
    """A cross-domain edge learned during MASH refinement"""
    x: int
    y: int
    weight: float


class MashDiagnostics(BaseModel):
    """Trace of a MASH run"""
    t_selected: int
    vne_curve: List[float] = Field(default_factory=list)
    iterations_run: int = 0
    connections_added: List[List[PseudoConnection]] = Field(default_factory=list)
    accepted: List[bool] = Field(default_factory=list)
    holdout_foscttm_trace: List[float] = Field(default_factory=list)
    reverted_iterations: int = 0
    holdout_anchors: List[Tuple[int, int]] = Field(default_factory=list)

    @property
    def accepted_scores(self) -> List[float]:
        """Held-out scores of the initial pass and every accepted iteration"""
        if not self.holdout_foscttm_trace:
            return []
        scores = [self.holdout_foscttm_trace[0]]
        for score, ok in zip(self.holdout_foscttm_trace[1:], self.accepted):
            if ok:
                scores.append(score)
        return scores


class MetricsReport(BaseModel):
    """Evaluation of one alignment"""
    foscttm: Optional[float] = Field(None, ge=0, le=1)
    ce_accuracy: Optional[float] = Field(None, ge=0, le=1)
    combined: Optional[float] = Field(None, ge=-1, le=1)
    n_eval_pairs: int = 0
    ce_k: int = Field(default_factory=lambda: settings.ce_k)
    dim: int = 0
    method: Optional[str] = None

    @model_validator(mode="after")
    def _combined_matches(self):
        if self.foscttm is not None and self.ce_accuracy is not None:
            expected = self.ce_accuracy - self.foscttm
            if self.combined is None:
                self.combined = expected
            elif self.combined != expected:
                raise ValueError("combined must equal ce_accuracy - foscttm")
        return self


class ErrorResponse(BaseModel):
    """Schema for error.json"""
    detail: str
    code: Optional[str] = None
    type: str = "error"
    path: Optional[str] = None


# ====================================
# Run Configuration
# ====================================
class DatasetSpec(BaseModel):
    """A CSV file or the name of a bundled dataset"""
    path: Optional[str] = None
    builtin: Optional[Literal["iris", "wine", "breast_cancer"]] = None
    label_column: Optional[str] = None
    name: Optional[str] = None

    @model_validator(mode="after")
    def _one_source(self):
        if (self.path is None) == (self.builtin is None):
            raise ValueError("exactly one of 'path' or 'builtin' must be given")
        return self

    @property
    def display_name(self) -> str:
        if self.name:
            return self.name
        if self.builtin:
            return self.builtin
        return Path(self.path).stem


class PairedInput(BaseModel):
    """Explicit two-dataset input with an anchor file of (x, y) index pairs"""
    x: DatasetSpec
    y: DatasetSpec
    anchors_file: str


class RunConfig(BaseModel):
    """Configuration of a single alignment run (align / transfer verbs)"""
    dataset: Optional[DatasetSpec] = None
    paired: Optional[PairedInput] = None
    method: MethodName = "mash"
    adaptation: Optional[AdaptationSpec] = None
    kernel: KernelParams = Field(default_factory=KernelParams)
    geodesic: Optional[GeodesicConfig] = None
    mash: Optional[MashConfig] = None
    dim: Optional[int] = Field(None, ge=1)
    ce_k: int = Field(default_factory=lambda: settings.ce_k, ge=1)
    repetitions: int = Field(1, ge=1)
    seeds: List[int] = Field(default_factory=list)
    export_graph: bool = False
    output_dir: str = Field(default_factory=lambda: settings.output_dir)

    @model_validator(mode="after")
    def _check_kinds(self):
        if (self.dataset is None) == (self.paired is None):
            raise ValueError("exactly one of 'dataset' or 'paired' must be given")
        if self.dataset is not None and self.adaptation is None:
            raise ValueError("'adaptation' is required with a single dataset")
        if self.geodesic is not None and self.method not in ("spud", "nama"):
            raise ValueError(f"'geodesic' config does not apply to method {self.method}")
        if self.mash is not None and self.method not in ("mash", "mash_minus"):
            raise ValueError(f"'mash' config does not apply to method {self.method}")
        return self

    def run_seeds(self) -> List[int]:
        """One seed per repetition; missing seeds continue from the last given one"""
        seeds = list(self.seeds[: self.repetitions])
        start = seeds[-1] + 1 if seeds else settings.default_seed
        while len(seeds) < self.repetitions:
            seeds.append(start)
            start += 1
        return seeds


class BenchmarkConfig(BaseModel):
    """Grid of datasets x adaptations x anchor fractions x methods x seeds"""
    datasets: List[DatasetSpec] = Field(..., min_length=1)
    adaptations: List[AdaptationKind] = Field(..., min_length=1)
    anchor_fractions: List[float] = Field(default_factory=lambda: [0.2], min_length=1)
    methods: List[MethodName] = Field(..., min_length=1)
    seeds: List[int] = Field(default_factory=lambda: [settings.default_seed], min_length=1)
    kernel: KernelParams = Field(default_factory=KernelParams)
    geodesic: GeodesicConfig = Field(default_factory=GeodesicConfig)
    mash: MashConfig = Field(default_factory=MashConfig)
    noise_scale: float = Field(default_factory=lambda: settings.distortion_scale, ge=0)
    ce_k: int = Field(default_factory=lambda: settings.ce_k, ge=1)
    jobs: int = Field(default_factory=lambda: settings.jobs, ge=1)
    output_dir: str = Field(default_factory=lambda: settings.output_dir)

    @field_validator("anchor_fractions")
    @classmethod
    def _fractions_in_range(cls, value: List[float]) -> List[float]:
        for fraction in value:
            if not 0 < fraction <= 1:
                raise ValueError(f"anchor fraction {fraction} outside (0, 1]")
        return value


class TransferConfig(BaseModel):
    """Label transfer recipe: important features on a row subset vs the rest on all rows"""
    dataset: DatasetSpec
    n_important: int = Field(4, ge=1)
    row_fraction: float = Field(0.1, gt=0, le=1)
    kernel: KernelParams = Field(default_factory=KernelParams)
    mash: MashConfig = Field(default_factory=MashConfig)
    dim: Optional[int] = Field(None, ge=1)
    k: int = Field(default_factory=lambda: settings.ce_k, ge=1)
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0)
    importance_file: Optional[str] = None
    output_dir: str = Field(default_factory=lambda: settings.output_dir)


class ImportanceConfig(BaseModel):
    """Feature ranking job (importance verb)"""
    dataset: DatasetSpec
    seed: int = Field(default_factory=lambda: settings.default_seed, ge=0)
    n_repeats: int = Field(default_factory=lambda: settings.importance_repeats, ge=1)
    output_dir: str = Field(default_factory=lambda: settings.output_dir)


class TransferReport(BaseModel):
    """Schema for accuracy.json"""
    n_predicted: int
    accuracy: Optional[float] = Field(None, ge=0, le=1)
    coupling_accuracy: Optional[float] = Field(None, ge=0, le=1)
    k: int
    dim: int
    seed: int
    n_anchors: int


class BenchmarkRow(BaseModel):
    """One benchmark cell"""
    dataset: str
    adaptation: str
    anchor_fraction: float
    method: str
    seed: int
    foscttm: Optional[float] = None
    ce_accuracy: Optional[float] = None
    combined: Optional[float] = None
    wall_time: float = 0.0
    status: Literal["ok", "error"] = "ok"
    error: Optional[str] = None


ConfigDocument = Union[RunConfig, BenchmarkConfig, TransferConfig, ImportanceConfig]

"""Energy-aware bitrate ladders: joint resolution and chroma-subsampling
selection per target bitrate, with Bjontegaard delta-rate / delta-decoding-time
evaluation against benchmark ladders."""

from . import errors
from .bdmetrics import (
    BDResult,
    CurveAxis,
    PchipCurve,
    RQCurve,
    aggregate,
    bd_delta,
    build_curve,
)
from .ladder import (
    Ladder,
    Method,
    OptimizerMode,
    Rung,
    build_default,
    build_dynres,
    build_fixed,
    chroma_pmf,
    enumerate_optimal,
    load_plan,
    optimize_arcs,
    validate_rungs,
)
from .measurements import (
    ChromaFormat,
    MeasurementRecord,
    QualityMetric,
    QualityScore,
    Resolution,
    TitleDataset,
    candidates_for,
    dataset_warnings,
    parse_dataset,
    serialize_dataset,
)
from .objective import (
    Alpha,
    NormalizationBounds,
    bounds_for,
    composite_normalized,
    composite_raw,
    normalized_log_time,
    normalized_quality,
)
from .synth import (
    QualityModel,
    SynthSpec,
    default_spec,
    generate,
    sparse_spec,
    spec_from_json,
    spec_to_json,
)

__version__ = "0.1.0"

__all__ = [
    "Alpha",
    "BDResult",
    "ChromaFormat",
    "CurveAxis",
    "Ladder",
    "MeasurementRecord",
    "Method",
    "NormalizationBounds",
    "OptimizerMode",
    "PchipCurve",
    "QualityMetric",
    "QualityModel",
    "QualityScore",
    "RQCurve",
    "Resolution",
    "Rung",
    "SynthSpec",
    "TitleDataset",
    "aggregate",
    "bd_delta",
    "bounds_for",
    "build_curve",
    "build_default",
    "build_dynres",
    "build_fixed",
    "candidates_for",
    "chroma_pmf",
    "composite_normalized",
    "composite_raw",
    "dataset_warnings",
    "default_spec",
    "enumerate_optimal",
    "errors",
    "generate",
    "load_plan",
    "normalized_log_time",
    "normalized_quality",
    "optimize_arcs",
    "parse_dataset",
    "serialize_dataset",
    "sparse_spec",
    "spec_from_json",
    "spec_to_json",
    "validate_rungs",
]

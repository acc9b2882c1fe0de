"""Seeded synthetic rate-quality-complexity datasets.

Generates desk-scale measurement corpora with controllable structure so the
optimizer and the delta metrics can be exercised without running any codec.
Quality follows a saturating log curve per (resolution, chroma) pair,

    score(b) = ceiling - slope / ln(1 + b / knee),

and decoding time an affine rate model scaled by per-resolution base cost and
per-chroma factor,

    time(b) = base * chroma_factor * (1 + rate_slope * b).

The default chroma factors put full-fidelity chroma at twice the decoding
time of 4:2:0, matching what slow software decoding of the three formats
shows. Low-fidelity formats get smaller quality slopes, so they win at low
bitrates and the full-fidelity formats only pull ahead near the top of the
ladder; per-title perturbation of slopes and knees moves those crossover
points around, which is what makes per-title optimization worthwhile.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from typing import Mapping, TextIO

import numpy as np

from .errors import InvalidSpec
from .measurements import (
    ChromaFormat,
    MeasurementRecord,
    PLAUSIBLE_RANGE,
    QualityMetric,
    QualityScore,
    Resolution,
    TitleDataset,
)

# Standard HLS-style target set (kbps) used by the default corpus.
DEFAULT_BITRATES_KBPS = (
    600.0,
    900.0,
    1600.0,
    2400.0,
    3400.0,
    4500.0,
    5800.0,
    8100.0,
    11600.0,
    16800.0,
)

DEFAULT_SEED = 20250809


@dataclass(frozen=True)
class QualityModel:
    """Saturating rate-quality curve: ceiling - slope / ln(1 + kbps/knee)."""

    ceiling: float
    slope: float
    knee_kbps: float

    def score(self, kbps: float) -> float:
        return self.ceiling - self.slope / math.log1p(kbps / self.knee_kbps)


@dataclass(frozen=True)
class SynthSpec:
    seed: int
    titles: int
    resolutions: tuple[int, ...]
    chromas: tuple[ChromaFormat, ...]
    targets_kbps: tuple[float, ...]
    quality: Mapping[tuple[int, ChromaFormat], QualityModel]
    time_base_s: Mapping[int, float]
    time_chroma_factor: Mapping[ChromaFormat, float]
    time_rate_slope: float
    noise: float = 0.03
    jitter: float = 0.05
    title_variation: float = 0.06
    metric: QualityMetric = QualityMetric.CVVDP_JOD

    def __post_init__(self):
        if self.titles < 1:
            raise InvalidSpec("titles must be >= 1")
        if not self.resolutions or any(h <= 0 for h in self.resolutions):
            raise InvalidSpec("resolutions must be positive")
        if len(set(self.resolutions)) != len(self.resolutions):
            raise InvalidSpec("resolutions must be distinct")
        if not self.chromas or len(set(self.chromas)) != len(self.chromas):
            raise InvalidSpec("chromas must be non-empty and distinct")
        if not self.targets_kbps or any(b <= 0 for b in self.targets_kbps):
            raise InvalidSpec("targets must be positive")
        if any(
            b2 <= b1 for b1, b2 in zip(self.targets_kbps, self.targets_kbps[1:])
        ):
            raise InvalidSpec("targets must be strictly increasing")
        if not 0 <= self.jitter < 1:
            raise InvalidSpec("jitter must be in [0, 1)")
        if not 0 <= self.noise < 1:
            raise InvalidSpec("noise must be in [0, 1)")
        if not 0 <= self.title_variation < 1:
            raise InvalidSpec("title_variation must be in [0, 1)")
        if self.time_rate_slope < 0:
            raise InvalidSpec("time_rate_slope must be >= 0")
        for r in self.resolutions:
            if self.time_base_s.get(r, 0) <= 0:
                raise InvalidSpec(f"time_base_s missing or non-positive for {r}")
            for c in self.chromas:
                model = self.quality.get((r, c))
                if model is None:
                    raise InvalidSpec(f"quality model missing for ({r}, {c.value})")
                if model.slope <= 0 or model.knee_kbps <= 0:
                    raise InvalidSpec(f"quality model for ({r}, {c.value}) not positive")
        for c in self.chromas:
            if self.time_chroma_factor.get(c, 0) <= 0:
                raise InvalidSpec(f"time_chroma_factor missing for {c.value}")
        # Quality ceilings must not decrease with resolution or chroma fidelity,
        # and chroma decode cost must not decrease with fidelity.
        for c in self.chromas:
            ceilings = [self.quality[(r, c)].ceiling for r in sorted(self.resolutions)]
            if any(b < a for a, b in zip(ceilings, ceilings[1:])):
                raise InvalidSpec("quality ceiling decreases with resolution")
        by_rank = sorted(self.chromas, key=lambda c: c.fidelity_rank)
        for r in self.resolutions:
            ceilings = [self.quality[(r, c)].ceiling for c in by_rank]
            if any(b < a for a, b in zip(ceilings, ceilings[1:])):
                raise InvalidSpec("quality ceiling decreases with chroma fidelity")
        factors = [self.time_chroma_factor[c] for c in by_rank]
        if any(b < a for a, b in zip(factors, factors[1:])):
            raise InvalidSpec("time_chroma_factor decreases with chroma fidelity")


def default_spec(
    seed: int = DEFAULT_SEED,
    titles: int = 15,
    metric: QualityMetric = QualityMetric.CVVDP_JOD,
) -> SynthSpec:
    """The shipped corpus: two resolutions, three chroma formats, ten targets.

    Full-chroma decode cost is twice the 4:2:0 cost; 4:2:0 has better quality
    than 4:4:4 at the low end and the order flips near the top of the ladder.
    """
    if metric is QualityMetric.CVVDP_JOD:
        base_q, res_gain, unit = 8.2, 0.6, 1.0
    else:
        base_q, res_gain, unit = 38.0, 3.0, 5.0
    # Chroma quality gains are small against the per-title quality span, so the
    # extra decode cost of high-fidelity chroma flips the per-rung winner at
    # trade-off weights within the swept [0, 0.08] range, top rungs last.
    chroma_gain = {ChromaFormat.C420: 0.0, ChromaFormat.C422: 0.04, ChromaFormat.C444: 0.065}
    slope_res = {1080: 2.2, 2160: 3.2}
    slope_chroma = {ChromaFormat.C420: 1.0, ChromaFormat.C422: 1.02, ChromaFormat.C444: 1.03}
    knee_res = {1080: 150.0, 2160: 300.0}
    knee_chroma = {ChromaFormat.C420: 1.0, ChromaFormat.C422: 1.05, ChromaFormat.C444: 1.10}
    quality = {
        (r, c): QualityModel(
            ceiling=base_q + (res_gain if r == 2160 else 0.0) + chroma_gain[c] * unit,
            slope=slope_res[r] * slope_chroma[c] * unit,
            knee_kbps=knee_res[r] * knee_chroma[c],
        )
        for r in (1080, 2160)
        for c in ChromaFormat
    }
    return SynthSpec(
        seed=seed,
        titles=titles,
        resolutions=(1080, 2160),
        chromas=tuple(ChromaFormat),
        targets_kbps=DEFAULT_BITRATES_KBPS,
        quality=quality,
        time_base_s={1080: 0.040, 2160: 0.155},
        time_chroma_factor={
            ChromaFormat.C420: 1.0,
            ChromaFormat.C422: 1.4,
            ChromaFormat.C444: 2.0,
        },
        time_rate_slope=1.5e-5,
        metric=metric,
    )


def sparse_spec(seed: int = DEFAULT_SEED, titles: int = 15) -> SynthSpec:
    """Corpus with 15% bitrate jitter so encodes regularly miss the ±10% window."""
    return replace(default_spec(seed=seed, titles=titles), jitter=0.15)


def generate(spec: SynthSpec) -> list[TitleDataset]:
    """Deterministic function of the spec; per-title sub-seeds keep titles
    independent of generation order."""
    return [_generate_title(spec, i) for i in range(spec.titles)]


def _generate_title(spec: SynthSpec, index: int) -> TitleDataset:
    rng = np.random.default_rng([spec.seed, index])
    v = spec.title_variation
    combos = [
        (r, c)
        for r in sorted(spec.resolutions)
        for c in sorted(spec.chromas, key=lambda c: c.fidelity_rank)
    ]
    # Slopes/knees shift per title (moves the crossover points); ceilings only
    # shift globally so their resolution/chroma ordering is preserved.
    ceiling_shift = rng.uniform(-2 * v, 2 * v)
    slope_mult = {rc: rng.uniform(1 - v, 1 + v) for rc in combos}
    knee_mult = {rc: rng.uniform(1 - v, 1 + v) for rc in combos}
    base_mult = {r: rng.uniform(1 - v, 1 + v) for r in sorted(spec.resolutions)}

    lo, hi = PLAUSIBLE_RANGE[spec.metric]
    title_id = f"synth{index:03d}"
    records = []
    for r, c in combos:
        model = spec.quality[(r, c)]
        for b in spec.targets_kbps:
            q = (model.ceiling + ceiling_shift) - model.slope * slope_mult[(r, c)] / math.log1p(
                b / (model.knee_kbps * knee_mult[(r, c)])
            )
            q += spec.noise * rng.uniform(-1.0, 1.0)
            q = min(max(q, lo), min(hi, 1e9))
            tau = (
                spec.time_base_s[r]
                * base_mult[r]
                * spec.time_chroma_factor[c]
                * (1.0 + spec.time_rate_slope * b)
            )
            tau *= 1.0 + spec.noise * rng.uniform(-1.0, 1.0)
            actual = b * (1.0 + spec.jitter * rng.uniform(-1.0, 1.0))
            records.append(
                MeasurementRecord(
                    title_id=title_id,
                    resolution=Resolution(r),
                    chroma=c,
                    target_bitrate=b,
                    actual_bitrate=actual,
                    quality=QualityScore(spec.metric, q),
                    decode_time=tau,
                )
            )
    return TitleDataset.from_records(records)


# -- JSON spec file -----------------------------------------------------------


def spec_to_json(spec: SynthSpec) -> str:
    payload = {
        "seed": spec.seed,
        "titles": spec.titles,
        "resolutions": list(spec.resolutions),
        "chromas": [c.value for c in spec.chromas],
        "targets_kbps": list(spec.targets_kbps),
        "quality": {
            f"{r}/{c.value}": {
                "ceiling": m.ceiling,
                "slope": m.slope,
                "knee_kbps": m.knee_kbps,
            }
            for (r, c), m in sorted(
                spec.quality.items(), key=lambda kv: (kv[0][0], kv[0][1].fidelity_rank)
            )
        },
        "time_base_s": {str(r): v for r, v in sorted(spec.time_base_s.items())},
        "time_chroma_factor": {
            c.value: spec.time_chroma_factor[c]
            for c in sorted(spec.time_chroma_factor, key=lambda c: c.fidelity_rank)
        },
        "time_rate_slope": spec.time_rate_slope,
        "noise": spec.noise,
        "jitter": spec.jitter,
        "title_variation": spec.title_variation,
        "metric": spec.metric.value,
    }
    return json.dumps(payload, indent=2) + "\n"


def spec_from_json(source: str | TextIO) -> SynthSpec:
    text = source if isinstance(source, str) else source.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidSpec(f"invalid JSON: {exc}") from exc
    try:
        quality = {}
        for key, m in payload["quality"].items():
            r_str, c_str = key.split("/")
            quality[(int(r_str), ChromaFormat(c_str))] = QualityModel(
                ceiling=float(m["ceiling"]),
                slope=float(m["slope"]),
                knee_kbps=float(m["knee_kbps"]),
            )
        return SynthSpec(
            seed=int(payload["seed"]),
            titles=int(payload["titles"]),
            resolutions=tuple(int(r) for r in payload["resolutions"]),
            chromas=tuple(ChromaFormat(c) for c in payload["chromas"]),
            targets_kbps=tuple(float(b) for b in payload["targets_kbps"]),
            quality=quality,
            time_base_s={int(r): float(v) for r, v in payload["time_base_s"].items()},
            time_chroma_factor={
                ChromaFormat(c): float(v)
                for c, v in payload["time_chroma_factor"].items()
            },
            time_rate_slope=float(payload["time_rate_slope"]),
            noise=float(payload.get("noise", 0.05)),
            jitter=float(payload.get("jitter", 0.05)),
            title_variation=float(payload.get("title_variation", 0.08)),
            metric=QualityMetric(payload.get("metric", "cvvdp")),
        )
    except (KeyError, ValueError, TypeError) as exc:
        raise InvalidSpec(f"bad spec field: {exc}") from exc

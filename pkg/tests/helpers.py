"""Shared constructors for hand-built and randomized measurement datasets."""

from __future__ import annotations

import numpy as np

from chromaladder import (
    ChromaFormat,
    MeasurementRecord,
    QualityMetric,
    QualityScore,
    Resolution,
    TitleDataset,
    bounds_for,
    candidates_for,
    normalized_log_time,
    normalized_quality,
)

JOD = QualityMetric.CVVDP_JOD
C420, C422, C444 = ChromaFormat.C420, ChromaFormat.C422, ChromaFormat.C444


def record(
    title="t",
    height=1080,
    chroma=C420,
    target=600.0,
    actual=None,
    quality=7.0,
    decode=0.05,
    metric=JOD,
):
    return MeasurementRecord(
        title_id=title,
        resolution=Resolution(height),
        chroma=chroma,
        target_bitrate=float(target),
        actual_bitrate=float(target if actual is None else actual),
        quality=QualityScore(metric, float(quality)),
        decode_time=float(decode),
    )


def grid_dataset(
    quality_fn,
    decode_fn,
    *,
    title="t",
    heights=(1080, 2160),
    chromas=(C420, C422, C444),
    targets=(600.0, 2400.0, 9000.0),
    actual_fn=None,
):
    """Full (resolution, chroma, target) grid with caller-supplied laws."""
    recs = []
    for h in heights:
        for c in chromas:
            for b in targets:
                recs.append(
                    record(
                        title,
                        h,
                        c,
                        b,
                        actual=None if actual_fn is None else actual_fn(h, c, b),
                        quality=quality_fn(h, c, b),
                        decode=decode_fn(h, c, b),
                    )
                )
    return TitleDataset.from_records(recs)


def random_dataset(
    rng: np.random.Generator,
    *,
    title="rand",
    max_targets=6,
    p_missing=0.3,
    tie_prob=0.3,
    jitter=0.15,
):
    """Adversarial random instance: sparse pools, off-window encodes, exact ties."""
    while True:
        n = int(rng.integers(1, max_targets + 1))
        targets = sorted({float(round(b, 1)) for b in rng.uniform(300.0, 20000.0, size=n)})
        recs = []
        for t in targets:
            for h in (1080, 2160):
                for c in (C420, C422, C444):
                    if rng.random() < p_missing:
                        continue
                    actual = t * (1.0 + jitter * (2.0 * rng.random() - 1.0))
                    q = float(rng.uniform(2.0, 9.5))
                    if rng.random() < tie_prob:
                        q = round(q * 4.0) / 4.0
                    d = float(rng.uniform(0.01, 0.6))
                    if rng.random() < tie_prob:
                        d = max(round(d * 50.0) / 50.0, 0.02)
                    recs.append(record(title, h, c, t, actual, q, d))
        if not recs:
            continue
        ds = TitleDataset.from_records(recs)
        if any(candidates_for(ds, t, 0.10) for t in ds.bitrate_targets):
            return ds


def ladder_sums(ladder, dataset):
    """(sum of normalized quality, sum of normalized log time) over present rungs."""
    b = bounds_for(dataset)
    sq = sum(
        normalized_quality(r.choice.quality.value, b)
        for r in ladder.rungs
        if r.choice is not None
    )
    sd = sum(
        normalized_log_time(r.choice.decode_time, b)
        for r in ladder.rungs
        if r.choice is not None
    )
    return sq, sd

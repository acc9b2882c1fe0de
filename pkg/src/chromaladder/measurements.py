"""Measurement data model, dataset ingest/serialization, and candidate filtering.

A measurement is one decoded operating point: a (title, resolution, chroma
format, target bitrate) tuple together with the bitrate the encoder actually
produced, a perceptual quality score, and the mean decoding time per frame.
Datasets are immutable after parsing; every operation here is a pure function.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence, TextIO

from .errors import (
    DuplicateRecord,
    MalformedRow,
    MixedQualityMetric,
    NonPositiveValue,
)

CSV_HEADER = (
    "title",
    "height",
    "chroma",
    "target_kbps",
    "actual_kbps",
    "metric",
    "quality",
    "decode_s_per_frame",
)


class ChromaFormat(Enum):
    """Chroma subsampling format, ordered by color fidelity."""

    C420 = "420"
    C422 = "422"
    C444 = "444"

    @property
    def fidelity_rank(self) -> int:
        return _FIDELITY_RANK[self]

    @property
    def chroma_density(self) -> Fraction:
        """Chroma samples per luma sample, both chroma planes counted."""
        return _CHROMA_DENSITY[self]


_FIDELITY_RANK = {ChromaFormat.C420: 0, ChromaFormat.C422: 1, ChromaFormat.C444: 2}
_CHROMA_DENSITY = {
    ChromaFormat.C420: Fraction(1, 2),
    ChromaFormat.C422: Fraction(1, 1),
    ChromaFormat.C444: Fraction(2, 1),
}


class QualityMetric(Enum):
    CVVDP_JOD = "cvvdp"
    YUVPSNR_DB = "psnr"


# Plausible value ranges per metric; values outside trigger warnings, not errors.
PLAUSIBLE_RANGE = {
    QualityMetric.CVVDP_JOD: (0.0, 10.0),
    QualityMetric.YUVPSNR_DB: (0.0, math.inf),
}


@dataclass(frozen=True)
class Resolution:
    """Spatial resolution in luma lines; width is metadata only."""

    height: int
    width: int | None = None

    def __post_init__(self):
        if self.height <= 0:
            raise NonPositiveValue("height")
        if self.width is not None and self.width <= 0:
            raise NonPositiveValue("width")

    @property
    def pixel_width(self) -> int:
        """Stated width, or the 16:9 width derived from the height."""
        if self.width is not None:
            return self.width
        return round(self.height * 16 / 9)


@dataclass(frozen=True)
class QualityScore:
    metric: QualityMetric
    value: float

    def __post_init__(self):
        if not math.isfinite(self.value):
            raise ValueError(f"quality value must be finite, got {self.value!r}")

    def plausible(self) -> bool:
        lo, hi = PLAUSIBLE_RANGE[self.metric]
        return lo <= self.value <= hi


@dataclass(frozen=True)
class MeasurementRecord:
    """One measured operating point of one title."""

    title_id: str
    resolution: Resolution
    chroma: ChromaFormat
    target_bitrate: float  # kbps
    actual_bitrate: float  # kbps
    quality: QualityScore
    decode_time: float  # seconds per frame

    def __post_init__(self):
        for name, value in (
            ("target_kbps", self.target_bitrate),
            ("actual_kbps", self.actual_bitrate),
            ("decode_s_per_frame", self.decode_time),
        ):
            if not (math.isfinite(value) and value > 0):
                raise NonPositiveValue(name, context=f"title {self.title_id!r}")

    @property
    def key(self) -> tuple:
        """Uniqueness key within a dataset."""
        return (self.title_id, self.resolution, self.chroma, self.target_bitrate)

    @property
    def log_decode_time(self) -> float:
        return math.log(self.decode_time)


@dataclass(frozen=True)
class TitleDataset:
    """All measurements of one source title, plus its distinct target bitrates."""

    title_id: str
    records: tuple[MeasurementRecord, ...]
    bitrate_targets: tuple[float, ...]

    def __post_init__(self):
        if any(b2 <= b1 for b1, b2 in zip(self.bitrate_targets, self.bitrate_targets[1:])):
            raise ValueError("bitrate_targets must be strictly increasing")
        metrics = {r.quality.metric for r in self.records}
        if len(metrics) > 1:
            raise MixedQualityMetric(self.title_id)
        seen = set()
        for r in self.records:
            if r.title_id != self.title_id:
                raise ValueError(
                    f"record title {r.title_id!r} does not match dataset {self.title_id!r}"
                )
            if r.key in seen:
                raise DuplicateRecord(r.key)
            seen.add(r.key)

    @classmethod
    def from_records(cls, records: Iterable[MeasurementRecord]) -> "TitleDataset":
        recs = sorted(
            records,
            key=lambda r: (r.target_bitrate, r.resolution.height, r.chroma.fidelity_rank),
        )
        if not recs:
            raise ValueError("from_records needs at least one record")
        targets = tuple(sorted({r.target_bitrate for r in recs}))
        return cls(recs[0].title_id, tuple(recs), targets)

    @property
    def metric(self) -> QualityMetric | None:
        return self.records[0].quality.metric if self.records else None


# -- parsing ----------------------------------------------------------------


def parse_dataset(source: str | TextIO, fmt: str = "auto") -> list[TitleDataset]:
    """Parse a CSV or JSON measurement stream into per-title datasets.

    ``fmt`` is one of ``csv``, ``json``, ``auto``; auto-detection treats
    content starting with ``[`` or ``{`` as JSON. Titles are returned sorted
    lexicographically; records within a title sorted by (target, height,
    chroma fidelity).
    """
    text = source if isinstance(source, str) else source.read()
    if fmt == "auto":
        fmt = "json" if text.lstrip()[:1] in ("[", "{") else "csv"
    if fmt == "csv":
        records = _records_from_csv(text)
    elif fmt == "json":
        records = _records_from_json(text)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return _group_records(records)


def _records_from_csv(text: str) -> list[MeasurementRecord]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None:
        raise MalformedRow(0, "empty input, header required")
    got = tuple(name.strip() for name in reader.fieldnames)
    if sorted(got) != sorted(CSV_HEADER):
        raise MalformedRow(0, f"header must contain exactly {','.join(CSV_HEADER)}; got {','.join(got)}")
    records = []
    for i, row in enumerate(reader, start=1):
        if None in row or any(v is None for v in row.values()):
            raise MalformedRow(i, "wrong number of fields")
        records.append(_record_from_fields(i, {k.strip(): v for k, v in row.items()}))
    return records


def _records_from_json(text: str) -> list[MeasurementRecord]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedRow(0, f"invalid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise MalformedRow(0, "JSON input must be an array of objects")
    records = []
    for i, obj in enumerate(data, start=1):
        if not isinstance(obj, dict):
            raise MalformedRow(i, "array entry is not an object")
        if sorted(obj) != sorted(CSV_HEADER):
            raise MalformedRow(i, f"object keys must be exactly {','.join(CSV_HEADER)}")
        records.append(_record_from_fields(i, obj))
    return records


def _record_from_fields(row: int, fields: dict) -> MeasurementRecord:
    def fail(reason: str) -> MalformedRow:
        return MalformedRow(row, reason)

    title = str(fields["title"]).strip()
    if not title:
        raise fail("empty title")
    try:
        height = int(str(fields["height"]).strip())
    except ValueError:
        raise fail(f"height {fields['height']!r} is not an integer") from None
    chroma_tag = str(fields["chroma"]).strip()
    try:
        chroma = ChromaFormat(chroma_tag)
    except ValueError:
        raise fail(f"chroma {chroma_tag!r} not one of 420/422/444") from None
    metric_tag = str(fields["metric"]).strip()
    try:
        metric = QualityMetric(metric_tag)
    except ValueError:
        raise fail(f"metric {metric_tag!r} not one of cvvdp/psnr") from None
    numbers = {}
    for name in ("target_kbps", "actual_kbps", "quality", "decode_s_per_frame"):
        try:
            numbers[name] = float(fields[name])
        except (TypeError, ValueError):
            raise fail(f"{name} {fields[name]!r} is not a number") from None
    try:
        quality = QualityScore(metric, numbers["quality"])
    except ValueError as exc:
        raise fail(str(exc)) from None
    return MeasurementRecord(
        title_id=title,
        resolution=Resolution(height),
        chroma=chroma,
        target_bitrate=numbers["target_kbps"],
        actual_bitrate=numbers["actual_kbps"],
        quality=quality,
        decode_time=numbers["decode_s_per_frame"],
    )


def _group_records(records: Sequence[MeasurementRecord]) -> list[TitleDataset]:
    seen: dict[tuple, MeasurementRecord] = {}
    by_title: dict[str, list[MeasurementRecord]] = {}
    for rec in records:
        if rec.key in seen:
            raise DuplicateRecord(rec.key)
        seen[rec.key] = rec
        by_title.setdefault(rec.title_id, []).append(rec)
    for title, recs in by_title.items():
        if len({r.quality.metric for r in recs}) > 1:
            raise MixedQualityMetric(title)
    return [TitleDataset.from_records(by_title[t]) for t in sorted(by_title)]


# -- serialization ----------------------------------------------------------


def serialize_dataset(datasets: Iterable[TitleDataset], fmt: str = "csv") -> str:
    """Serialize datasets back to the CSV or JSON wire form (round-trip exact)."""
    rows = []
    for ds in sorted(datasets, key=lambda d: d.title_id):
        for r in ds.records:
            rows.append(r)
    if fmt == "csv":
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow(
                [
                    r.title_id,
                    r.resolution.height,
                    r.chroma.value,
                    repr(r.target_bitrate),
                    repr(r.actual_bitrate),
                    r.quality.metric.value,
                    repr(r.quality.value),
                    repr(r.decode_time),
                ]
            )
        return out.getvalue()
    if fmt == "json":
        objs = [
            {
                "title": r.title_id,
                "height": r.resolution.height,
                "chroma": int(r.chroma.value),
                "target_kbps": r.target_bitrate,
                "actual_kbps": r.actual_bitrate,
                "metric": r.quality.metric.value,
                "quality": r.quality.value,
                "decode_s_per_frame": r.decode_time,
            }
            for r in rows
        ]
        return json.dumps(objs, indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


# -- candidate filtering ----------------------------------------------------


def candidates_for(
    dataset: TitleDataset,
    target: float,
    tolerance: float,
    *,
    cross_target: bool = False,
) -> list[MeasurementRecord]:
    """Records usable as the rung at ``target`` kbps.

    A record qualifies when its actual bitrate lies within
    ``[target*(1-tolerance), target*(1+tolerance)]`` and (unless
    ``cross_target``) it was encoded for exactly this target. Result order is
    deterministic: resolution ascending, then chroma fidelity, then target.
    """
    if tolerance < 0:
        raise ValueError("tolerance must be >= 0")
    if not target > 0:
        raise ValueError("target must be > 0")
    lo = target * (1.0 - tolerance)
    hi = target * (1.0 + tolerance)
    out = [
        r
        for r in dataset.records
        if (cross_target or r.target_bitrate == target) and lo <= r.actual_bitrate <= hi
    ]
    out.sort(
        key=lambda r: (r.resolution.height, r.chroma.fidelity_rank, r.target_bitrate)
    )
    return out


def dataset_warnings(dataset: TitleDataset, tolerance: float = 0.10) -> list[str]:
    """Non-fatal data-quality findings: implausible scores, uncovered targets."""
    warns = []
    for r in dataset.records:
        if not r.quality.plausible():
            lo, hi = PLAUSIBLE_RANGE[r.quality.metric]
            warns.append(
                f"{r.title_id}: quality {r.quality.value!r} outside plausible "
                f"[{lo}, {hi}] for {r.quality.metric.value} "
                f"({r.resolution.height}p/{r.chroma.value} @ {r.target_bitrate:g} kbps)"
            )
    for t in dataset.bitrate_targets:
        if not candidates_for(dataset, t, tolerance):
            warns.append(
                f"{dataset.title_id}: no encode within ±{tolerance:.0%} of "
                f"{t:g} kbps; this rung will be absent"
            )
    return warns

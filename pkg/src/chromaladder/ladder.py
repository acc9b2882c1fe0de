"""Bitrate-ladder construction under resolution/chroma monotonicity constraints.

A ladder assigns each target bitrate either one measured operating point or
nothing (an absent rung, when no encode landed in the tolerance window or the
chain constraints rule every candidate out). Present rungs must satisfy, in
order of ascending target bitrate:

  * resolution never decreases;
  * within a run of equal resolution, chroma fidelity never decreases; a
    resolution increase "refreshes" chroma, which may then restart low.

The main optimizer maximizes the summed normalized objective over all
*maximal* constraint-satisfying assignments: a rung may be absent only if no
candidate could be flipped into it while keeping the chain feasible. This
makes absences exactly the forced ones, so a single-target ladder is always
the plain per-target argmax. Ties are broken deterministically: higher
objective, then lower decode time, then lower resolution, then lower chroma
fidelity.

Three benchmark builders mirror common practice: a fixed plan of
(bitrate, resolution) pairs, a native-resolution-only ladder, and a
resolution-only optimizer with the chroma format pinned.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Sequence, TextIO

from .errors import (
    AllRungsAbsent,
    InvalidLadder,
    InvalidPlan,
    NoPresentRungs,
    PlanTargetUnknown,
    SearchSpaceTooLarge,
)
from .measurements import (
    ChromaFormat,
    MeasurementRecord,
    Resolution,
    TitleDataset,
    candidates_for,
)
from .objective import Alpha, as_alpha, bounds_for, composite_normalized

ENUMERATION_GUARD = 10**7


class Method(Enum):
    ARCS = "arcs"
    DYNRES_JOD = "dynres"
    FIXED_LADDER = "fixed"
    DEFAULT = "default"


class OptimizerMode(Enum):
    GLOBAL_DP = "dp"
    GREEDY_SEQUENTIAL = "greedy"


@dataclass(frozen=True)
class Rung:
    """One ladder entry; ``choice`` is None when the rung is absent.

    ``j_prime`` carries the normalized objective of the choice for
    objective-driven builders; benchmark builders leave it None.
    """

    target_bitrate: float
    choice: MeasurementRecord | None = None
    j_prime: float | None = None

    @property
    def present(self) -> bool:
        return self.choice is not None


@dataclass(frozen=True)
class Ladder:
    title_id: str
    method: Method
    rungs: tuple[Rung, ...]
    alpha: Alpha | None = None

    def __post_init__(self):
        validate_rungs(self.rungs)

    @property
    def present_rungs(self) -> tuple[Rung, ...]:
        return tuple(r for r in self.rungs if r.present)

    def sum_j_prime(self) -> float:
        return sum(r.j_prime for r in self.rungs if r.j_prime is not None)


def validate_rungs(rungs: Sequence[Rung]) -> None:
    """Raise InvalidLadder unless the rung sequence satisfies all invariants."""
    targets = [r.target_bitrate for r in rungs]
    if any(b <= a for a, b in zip(targets, targets[1:])):
        raise InvalidLadder("rung targets must be strictly increasing")
    prev: tuple[int, int] | None = None
    for r in rungs:
        if r.choice is None:
            continue
        hf = (r.choice.resolution.height, r.choice.chroma.fidelity_rank)
        if prev is not None and not _step_ok(prev, hf):
            if hf[0] < prev[0]:
                raise InvalidLadder(
                    f"resolution decreases {prev[0]} -> {hf[0]} with rising bitrate"
                )
            raise InvalidLadder(
                f"chroma fidelity decreases within the {hf[0]}p run"
            )
        prev = hf


def _step_ok(prev: tuple[int, int], nxt: tuple[int, int]) -> bool:
    """Chain constraint between consecutive present rungs.

    ``prev``/``nxt`` are (height, fidelity_rank). A resolution increase allows
    any chroma (refresh); equal resolution requires non-decreasing fidelity.
    """
    if nxt[0] != prev[0]:
        return nxt[0] > prev[0]
    return nxt[1] >= prev[1]


# -- candidates and assignment comparison -----------------------------------


@dataclass(frozen=True)
class _Cand:
    record: MeasurementRecord
    j: float
    hf: tuple[int, int]


def _rung_key(c: _Cand) -> tuple:
    # Greater tuple = preferred. Present beats absent; then the documented
    # tie order; target/actual tails make the key unique per record.
    return (
        1,
        c.j,
        -c.record.decode_time,
        -c.hf[0],
        -c.hf[1],
        -c.record.target_bitrate,
        -c.record.actual_bitrate,
    )


_ABSENT_KEY = (0, 0.0, 0.0, 0, 0, 0.0, 0.0)


def _candidate_pools(
    dataset: TitleDataset,
    alpha: Alpha,
    tolerance: float,
    *,
    chroma: ChromaFormat | None = None,
    cross_target: bool = False,
) -> list[list[_Cand]]:
    bounds = bounds_for(dataset)
    pools = []
    for t in dataset.bitrate_targets:
        recs = candidates_for(dataset, t, tolerance, cross_target=cross_target)
        if chroma is not None:
            recs = [r for r in recs if r.chroma is chroma]
        pools.append(
            [
                _Cand(
                    r,
                    composite_normalized(r, bounds, alpha),
                    (r.resolution.height, r.chroma.fidelity_rank),
                )
                for r in recs
            ]
        )
    return pools


# -- solvers -----------------------------------------------------------------
#
# Both exact solvers search the space of maximal assignments. An absent rung
# whose pool still holds candidates feasible w.r.t. the previous present rung
# is allowed only if the *next* present rung blocks every such candidate
# (i.e. stepping from the candidate to that rung would violate the chain);
# with no later present rung such a candidate could simply be flipped in, so
# the assignment is not maximal and is rejected.
#
# Blocking has a convenient shape: choice y blocks candidate x exactly when
# (height, fidelity) of y is lexicographically below x. The DP therefore only
# needs the lexicographic minimum of the pending candidates as a cap on the
# next present choice, while the enumeration oracle keeps the literal pending
# list and applies the definition directly.


def _solve_dp(pools: Sequence[Sequence[_Cand]]) -> tuple[_Cand | None, ...]:
    # state: (last present (h,f) or None, cap or None) -> (score, keys, choices)
    states: dict[tuple, tuple] = {(None, None): (0.0, (), ())}
    for pool in pools:
        nxt: dict[tuple, tuple] = {}
        for (last, cap), (score, keys, choices) in states.items():
            feasible = [c for c in pool if last is None or _step_ok(last, c.hf)]
            new_cap = cap
            if feasible:
                m = min(c.hf for c in feasible)
                new_cap = m if cap is None or m < cap else cap
            _keep_best(
                nxt,
                (last, new_cap),
                (score, keys + (_ABSENT_KEY,), choices + (None,)),
            )
            for c in feasible:
                if cap is not None and not c.hf < cap:
                    continue
                _keep_best(
                    nxt,
                    (c.hf, None),
                    (score + c.j, keys + (_rung_key(c),), choices + (c,)),
                )
        states = nxt
    complete = [v for (last, cap), v in states.items() if cap is None]
    best = max(complete, key=lambda v: (v[0], v[1]))
    return best[2]


def _keep_best(states: dict, key: tuple, value: tuple) -> None:
    old = states.get(key)
    if old is None or (value[0], value[1]) > (old[0], old[1]):
        states[key] = value


def _solve_greedy(pools: Sequence[Sequence[_Cand]]) -> tuple[_Cand | None, ...]:
    last: tuple[int, int] | None = None
    out: list[_Cand | None] = []
    for pool in pools:
        feasible = [c for c in pool if last is None or _step_ok(last, c.hf)]
        if feasible:
            pick = max(feasible, key=_rung_key)
            out.append(pick)
            last = pick.hf
        else:
            out.append(None)
    return tuple(out)


def _solve_enumerate(pools: Sequence[Sequence[_Cand]]) -> tuple[_Cand | None, ...]:
    size = 1
    for pool in pools:
        size *= max(1, len(pool))
    if size > ENUMERATION_GUARD:
        raise SearchSpaceTooLarge(
            f"candidate-count product {size} exceeds {ENUMERATION_GUARD}"
        )
    n = len(pools)
    best: tuple | None = None

    def walk(i, last, pending, score, keys, choices):
        nonlocal best
        if i == n:
            if pending:
                return  # a trailing absence could still be flipped in
            if best is None or (score, keys) > (best[0], best[1]):
                best = (score, keys, choices)
            return
        pool = pools[i]
        feasible = tuple(c for c in pool if last is None or _step_ok(last, c.hf))
        walk(
            i + 1,
            last,
            pending + tuple(c.hf for c in feasible),
            score,
            keys + (_ABSENT_KEY,),
            choices + (None,),
        )
        for c in feasible:
            if any(_step_ok(x, c.hf) for x in pending):
                continue  # some skipped candidate would still fit before c
            walk(i + 1, c.hf, (), score + c.j, keys + (_rung_key(c),), choices + (c,))

    walk(0, None, (), 0.0, (), ())
    assert best is not None
    return best[2]


# -- builders -----------------------------------------------------------------


def _assemble(
    dataset: TitleDataset,
    method: Method,
    alpha: Alpha | None,
    pools: Sequence[Sequence[_Cand]],
    solver,
) -> Ladder:
    if all(not pool for pool in pools):
        raise AllRungsAbsent(
            f"title {dataset.title_id!r}: no candidate at any target bitrate"
        )
    choices = solver(pools)
    rungs = tuple(
        Rung(t, c.record, c.j) if c is not None else Rung(t)
        for t, c in zip(dataset.bitrate_targets, choices)
    )
    return Ladder(dataset.title_id, method, rungs, alpha)


def optimize_arcs(
    dataset: TitleDataset,
    alpha: Alpha | float,
    tolerance: float = 0.10,
    mode: OptimizerMode = OptimizerMode.GLOBAL_DP,
    *,
    cross_target: bool = False,
) -> Ladder:
    """Jointly select (resolution, chroma) per target bitrate.

    ``GLOBAL_DP`` maximizes the summed normalized objective exactly over all
    maximal feasible assignments via dynamic programming; ``GREEDY_SEQUENTIAL``
    scans targets in ascending order, picking the objective argmax among
    candidates feasible w.r.t. the previous present rung.
    """
    alpha = as_alpha(alpha)
    pools = _candidate_pools(dataset, alpha, tolerance, cross_target=cross_target)
    solver = _solve_dp if mode is OptimizerMode.GLOBAL_DP else _solve_greedy
    return _assemble(dataset, Method.ARCS, alpha, pools, solver)


def enumerate_optimal(
    dataset: TitleDataset,
    alpha: Alpha | float,
    tolerance: float = 0.10,
    *,
    cross_target: bool = False,
) -> Ladder:
    """Exhaustive-search oracle; identical contract and tie-breaking as
    ``optimize_arcs`` with ``GLOBAL_DP``. Guarded against large search spaces."""
    alpha = as_alpha(alpha)
    pools = _candidate_pools(dataset, alpha, tolerance, cross_target=cross_target)
    return _assemble(dataset, Method.ARCS, alpha, pools, _solve_enumerate)


def build_dynres(
    dataset: TitleDataset,
    alpha: Alpha | float,
    tolerance: float = 0.10,
    fixed_chroma: ChromaFormat = ChromaFormat.C444,
    mode: OptimizerMode = OptimizerMode.GLOBAL_DP,
    *,
    cross_target: bool = False,
) -> Ladder:
    """Resolution-only ablation: same machinery, candidate pool pinned to one
    chroma format (default the full-fidelity source format)."""
    alpha = as_alpha(alpha)
    pools = _candidate_pools(
        dataset, alpha, tolerance, chroma=fixed_chroma, cross_target=cross_target
    )
    solver = _solve_dp if mode is OptimizerMode.GLOBAL_DP else _solve_greedy
    return _assemble(dataset, Method.DYNRES_JOD, alpha, pools, solver)


def build_default(
    dataset: TitleDataset,
    tolerance: float = 0.10,
    *,
    resolution: int | None = None,
    chroma: ChromaFormat = ChromaFormat.C444,
    cross_target: bool = False,
) -> Ladder:
    """Native-resolution-only benchmark: every rung at (native height, C444).

    ``resolution`` defaults to the dataset's largest height. Targets whose
    encode missed the tolerance window get absent rungs, so this ladder may
    fail to cover the low end of the bitrate range.
    """
    if resolution is None:
        resolution = max((r.resolution.height for r in dataset.records), default=None)
    rungs = []
    for t in dataset.bitrate_targets:
        pool = [
            r
            for r in candidates_for(dataset, t, tolerance, cross_target=cross_target)
            if r.resolution.height == resolution and r.chroma is chroma
        ]
        rungs.append(Rung(t, _closest(pool, t)) if pool else Rung(t))
    if not any(r.present for r in rungs):
        raise AllRungsAbsent(
            f"title {dataset.title_id!r}: no ({resolution}, {chroma.value}) encode "
            "within tolerance at any target"
        )
    return Ladder(dataset.title_id, Method.DEFAULT, tuple(rungs), None)


def _closest(pool: list[MeasurementRecord], target: float) -> MeasurementRecord:
    # Without cross-target borrowing the pool has at most one record.
    return min(
        pool,
        key=lambda r: (r.target_bitrate != target, abs(r.actual_bitrate - target), r.actual_bitrate),
    )


PLAN_HEADER = ("target_kbps", "height")


def build_fixed(
    dataset: TitleDataset,
    plan: Iterable[tuple[float, Resolution | int]],
    tolerance: float = 0.10,
    fixed_chroma: ChromaFormat = ChromaFormat.C444,
    *,
    cross_target: bool = False,
) -> Ladder:
    """Fixed (bitrate, resolution) plan benchmark; the plan is config input.

    Every planned target must exist in the dataset; planned resolutions must
    be non-decreasing with bitrate, otherwise the plan cannot form a valid
    ladder and is rejected outright.
    """
    entries: list[tuple[float, int]] = []
    for target, res in plan:
        height = res.height if isinstance(res, Resolution) else int(res)
        entries.append((float(target), height))
    entries.sort(key=lambda e: e[0])
    targets = [t for t, _ in entries]
    if len(set(targets)) != len(targets):
        raise InvalidPlan("plan repeats a target bitrate")
    known = set(dataset.bitrate_targets)
    for t in targets:
        if t not in known:
            raise PlanTargetUnknown(t)
    heights = [h for _, h in entries]
    if any(h2 < h1 for h1, h2 in zip(heights, heights[1:])):
        raise InvalidPlan("plan resolutions decrease with rising bitrate")
    rungs = []
    for t, h in entries:
        pool = [
            r
            for r in candidates_for(dataset, t, tolerance, cross_target=cross_target)
            if r.resolution.height == h and r.chroma is fixed_chroma
        ]
        rungs.append(Rung(t, _closest(pool, t)) if pool else Rung(t))
    return Ladder(dataset.title_id, Method.FIXED_LADDER, tuple(rungs), None)


def load_plan(source: str | TextIO) -> list[tuple[float, int]]:
    """Read a fixed-ladder plan from CSV with header ``target_kbps,height``."""
    text = source if isinstance(source, str) else source.read()
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(n.strip() for n in reader.fieldnames) != PLAN_HEADER:
        raise InvalidPlan(f"plan header must be {','.join(PLAN_HEADER)}")
    plan = []
    for i, row in enumerate(reader, start=1):
        try:
            plan.append((float(row["target_kbps"]), int(row["height"])))
        except (TypeError, ValueError):
            raise InvalidPlan(f"plan row {i} is not numeric") from None
    return plan


def chroma_pmf(ladders: Iterable[Ladder]) -> dict[ChromaFormat, float]:
    """Share of present rungs per chroma format across the given ladders."""
    counts = {fmt: 0 for fmt in ChromaFormat}
    total = 0
    for ladder in ladders:
        for rung in ladder.rungs:
            if rung.choice is not None:
                counts[rung.choice.chroma] += 1
                total += 1
    if total == 0:
        raise NoPresentRungs("no present rungs in any ladder")
    return {fmt: counts[fmt] / total for fmt in ChromaFormat}

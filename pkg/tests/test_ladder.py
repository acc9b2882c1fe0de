"""Ladder optimizer, oracle, benchmark builders, and constraint tests.

The definitional oracle here re-derives everything from the documented rules:
it enumerates every per-rung choice combination, keeps those whose present
rungs satisfy the chain constraints and where no absent rung could be flipped
to a present candidate (absences only where forced), and picks the best by
(summed objective, documented tie order). It shares nothing with the package's
dynamic program or its pruned enumeration beyond the objective values.
"""

import itertools

import numpy as np
import pytest

from chromaladder import (
    Alpha,
    Ladder,
    Method,
    OptimizerMode,
    Rung,
    TitleDataset,
    bounds_for,
    build_default,
    build_dynres,
    build_fixed,
    candidates_for,
    chroma_pmf,
    composite_normalized,
    enumerate_optimal,
    load_plan,
    optimize_arcs,
)
from chromaladder.errors import (
    AllRungsAbsent,
    InvalidLadder,
    InvalidPlan,
    NoPresentRungs,
    PlanTargetUnknown,
    SearchSpaceTooLarge,
)
from helpers import C420, C422, C444, grid_dataset, ladder_sums, random_dataset, record


# -- definitional oracle -------------------------------------------------------


def _hf(rec):
    return (rec.resolution.height, rec.chroma.fidelity_rank)


def _step_ok(prev, nxt):
    if nxt[0] != prev[0]:
        return nxt[0] > prev[0]
    return nxt[1] >= prev[1]


def _chain_feasible(chosen):
    prev = None
    for rec in chosen:
        if rec is None:
            continue
        cur = _hf(rec)
        if prev is not None and not _step_ok(prev, cur):
            return False
        prev = cur
    return True


def _is_maximal(chosen, pools):
    for i, rec in enumerate(chosen):
        if rec is not None:
            continue
        for cand in pools[i]:
            trial = list(chosen)
            trial[i] = cand
            if _chain_feasible(trial):
                return False
    return True


def definitional_best(dataset, alpha, tolerance=0.10, chroma=None):
    """Best maximal assignment by exhaustive subset enumeration."""
    pools = [candidates_for(dataset, t, tolerance) for t in dataset.bitrate_targets]
    if chroma is not None:
        pools = [[r for r in pool if r.chroma is chroma] for pool in pools]
    bounds = bounds_for(dataset)
    jval = {r.key: composite_normalized(r, bounds, alpha) for p in pools for r in p}
    best = None
    for combo in itertools.product(*[[None] + list(p) for p in pools]):
        if not _chain_feasible(combo) or not _is_maximal(combo, pools):
            continue
        score = 0.0
        keys = []
        for rec in combo:
            if rec is None:
                keys.append((0, 0.0, 0.0, 0, 0, 0.0, 0.0))
            else:
                score += jval[rec.key]
                keys.append(
                    (
                        1,
                        jval[rec.key],
                        -rec.decode_time,
                        -rec.resolution.height,
                        -rec.chroma.fidelity_rank,
                        -rec.target_bitrate,
                        -rec.actual_bitrate,
                    )
                )
        entry = (score, tuple(keys), combo)
        if best is None or entry[:2] > best[:2]:
            best = entry
    assert best is not None
    return best[2]


def choices_of(ladder):
    return tuple(r.choice for r in ladder.rungs)


# -- engineered fixtures -------------------------------------------------------


class TestOptimizeArcs:
    def test_alpha_zero_unconstrained_equals_quality_argmax(self):
        # Quality strictly increases with (height, fidelity) at every target,
        # so the per-target argmax is constant (2160, C444): constraints idle.
        ds = grid_dataset(
            lambda h, c, b: 5.0 + (h / 2160) + 0.3 * c.fidelity_rank + b / 1e5,
            lambda h, c, b: 0.02 * (h / 1080) * (1 + c.fidelity_rank),
        )
        ladder = optimize_arcs(ds, Alpha(0.0))
        for rung, t in zip(ladder.rungs, ds.bitrate_targets):
            per_target = candidates_for(ds, t, 0.10)
            best = max(per_target, key=lambda r: r.quality.value)
            assert rung.choice == best
            assert (rung.choice.resolution.height, rung.choice.chroma) == (2160, C444)

    def test_high_alpha_picks_low_chroma_at_lowest_rung(self):
        # At the lowest target the full-chroma encode costs twice the decode
        # time for nearly identical quality, so a large alpha flips it.
        ds = grid_dataset(
            lambda h, c, b: 5.0 + b / 4000 + 0.01 * c.fidelity_rank,
            lambda h, c, b: 0.1 * (1.0 + c.fidelity_rank / 2.0) * (1 + b / 1e5),
            heights=(2160,),
            targets=(600.0, 1200.0, 2400.0),
        )
        assert (
            ds.records[2].decode_time / ds.records[0].decode_time == 2.0
        )  # C444 vs C420 at 600
        ladder = optimize_arcs(ds, Alpha(0.8))
        assert ladder.rungs[0].choice.chroma is C420
        assert choices_of(ladder) == definitional_best(ds, Alpha(0.8))

    def test_chroma_refresh_chain(self):
        vals = {
            (600.0, 1080, C420): 6.0,
            (600.0, 1080, C444): 7.0,
            (600.0, 2160, C420): 5.0,
            (1200.0, 1080, C444): 7.2,
            (1200.0, 2160, C420): 7.5,
            (2400.0, 2160, C420): 8.0,
            (2400.0, 2160, C422): 8.5,
            (2400.0, 2160, C444): 9.0,
        }
        recs = [
            record(height=h, chroma=c, target=t, quality=q, decode=0.05 * (1 + c.fidelity_rank))
            for (t, h, c), q in vals.items()
        ]
        ds = TitleDataset.from_records(recs)
        ladder = optimize_arcs(ds, Alpha(0.0))
        got = [(r.choice.resolution.height, r.choice.chroma) for r in ladder.rungs]
        assert got == [(1080, C444), (2160, C420), (2160, C444)]
        assert choices_of(ladder) == definitional_best(ds, Alpha(0.0))

    def test_single_target_is_plain_argmax(self):
        ds = grid_dataset(
            lambda h, c, b: 5.0 + 0.5 * c.fidelity_rank - (h / 2160),
            lambda h, c, b: 0.05 * (1 + c.fidelity_rank),
            targets=(900.0,),
        )
        ladder = optimize_arcs(ds, Alpha(0.2))
        bounds = bounds_for(ds)
        best = max(
            candidates_for(ds, 900.0, 0.10),
            key=lambda r: composite_normalized(r, bounds, Alpha(0.2)),
        )
        assert ladder.rungs[0].choice == best

    def test_single_target_with_negative_objective_still_present(self):
        # The only candidate has the worst quality and time of the title, so
        # its objective is negative; an absent rung is still not an option.
        recs = [
            record(target=600.0, quality=3.0, decode=0.5),
            record(target=900.0, quality=8.0, decode=0.1, chroma=C422),
        ]
        ds = TitleDataset.from_records(recs)
        ladder = optimize_arcs(ds, Alpha(1.0))
        assert all(r.present for r in ladder.rungs)

    def test_conflicting_single_candidates_drop_lower_value_rung(self):
        high = record(height=2160, target=600.0, quality=9.0, decode=0.2)
        low = record(height=1080, target=1200.0, quality=5.0, decode=0.1)
        ds = TitleDataset.from_records([high, low])
        ladder = optimize_arcs(ds, Alpha(0.0))
        assert ladder.rungs[0].choice == high
        assert ladder.rungs[1].choice is None
        # and the mirror image
        high2 = record(height=2160, target=600.0, quality=5.0, decode=0.2)
        low2 = record(height=1080, target=1200.0, quality=9.0, decode=0.1)
        ds2 = TitleDataset.from_records([high2, low2])
        ladder2 = optimize_arcs(ds2, Alpha(0.0))
        assert ladder2.rungs[0].choice is None
        assert ladder2.rungs[1].choice == low2

    def test_missing_window_yields_absent_rung(self):
        recs = [
            record(target=600.0, actual=800.0),  # misses +-10%
            record(target=1200.0, actual=1180.0),
        ]
        ds = TitleDataset.from_records(recs)
        ladder = optimize_arcs(ds, Alpha(0.0))
        assert [r.present for r in ladder.rungs] == [False, True]

    def test_all_rungs_absent_raises(self):
        ds = TitleDataset.from_records([record(target=600.0, actual=900.0)])
        with pytest.raises(AllRungsAbsent):
            optimize_arcs(ds, Alpha(0.0))

    def test_exact_tie_broken_toward_cheaper_then_lower(self):
        # Identical quality and decode time: lower resolution, then lower
        # fidelity wins. Distinct decode time wins outright.
        recs = [
            record(height=2160, chroma=C444, target=600.0, quality=7.0, decode=0.2),
            record(height=1080, chroma=C422, target=600.0, quality=7.0, decode=0.2),
            record(height=1080, chroma=C420, target=600.0, quality=7.0, decode=0.2),
            record(height=2160, chroma=C420, target=600.0, quality=7.0, decode=0.25),
        ]
        ds = TitleDataset.from_records(recs)
        ladder = optimize_arcs(ds, Alpha(0.0))
        assert (ladder.rungs[0].choice.resolution.height, ladder.rungs[0].choice.chroma) == (1080, C420)

    def test_greedy_is_feasible_but_can_be_myopic(self):
        recs = [
            record(height=1080, chroma=C444, target=600.0, quality=7.0, decode=0.08),
            record(height=1080, chroma=C420, target=600.0, quality=6.9, decode=0.05),
            record(height=1080, chroma=C420, target=1200.0, quality=9.0, decode=0.06),
        ]
        ds = TitleDataset.from_records(recs)
        greedy = optimize_arcs(ds, Alpha(0.0), mode=OptimizerMode.GREEDY_SEQUENTIAL)
        dp = optimize_arcs(ds, Alpha(0.0))
        assert greedy.rungs[0].choice.chroma is C444  # locks high chroma
        assert greedy.rungs[1].choice is None
        assert dp.rungs[0].choice.chroma is C420
        assert dp.rungs[1].present
        assert greedy.sum_j_prime() <= dp.sum_j_prime()

    def test_determinism_identical_outputs(self):
        rng = np.random.default_rng(7)
        ds = random_dataset(rng)
        a = optimize_arcs(ds, Alpha(0.3))
        b = optimize_arcs(ds, Alpha(0.3))
        assert a == b


class TestOracleAgreement:
    def test_dp_matches_definitional_oracle_on_random_instances(self):
        rng = np.random.default_rng(20250809)
        for trial in range(150):
            ds = random_dataset(rng, max_targets=3, p_missing=0.5)
            alpha = Alpha(float(rng.choice([0.0, 0.01, 0.08, 0.5, 1.0])))
            want = definitional_best(ds, alpha)
            assert choices_of(optimize_arcs(ds, alpha)) == want, f"trial {trial}"
            assert choices_of(enumerate_optimal(ds, alpha)) == want, f"trial {trial}"

    def test_enumerate_matches_dp_on_larger_instances(self):
        rng = np.random.default_rng(99)
        for trial in range(60):
            ds = random_dataset(rng, max_targets=6)
            alpha = Alpha(float(rng.uniform(0.0, 1.0)))
            dp = optimize_arcs(ds, alpha)
            oracle = enumerate_optimal(ds, alpha)
            assert dp.rungs == oracle.rungs, f"trial {trial}"

    def test_greedy_never_beats_dp(self):
        rng = np.random.default_rng(4242)
        for _ in range(120):
            ds = random_dataset(rng)
            alpha = Alpha(float(rng.uniform(0.0, 1.0)))
            dp = optimize_arcs(ds, alpha)
            greedy = optimize_arcs(ds, alpha, mode=OptimizerMode.GREEDY_SEQUENTIAL)
            assert greedy.sum_j_prime() <= dp.sum_j_prime() + 1e-12

    def test_search_space_guard(self):
        ds = grid_dataset(
            lambda h, c, b: 5.0 + b / 20000,
            lambda h, c, b: 0.05,
            targets=tuple(600.0 * (1.3**i) for i in range(10)),
        )
        with pytest.raises(SearchSpaceTooLarge):
            enumerate_optimal(ds, Alpha(0.0))


class TestScalarizationMonotonicity:
    def test_sums_non_increasing_in_alpha(self):
        rng = np.random.default_rng(11)
        alphas = [0.0, 0.05, 0.2, 0.5, 1.0]
        for _ in range(40):
            ds = random_dataset(rng)
            sums = [ladder_sums(optimize_arcs(ds, Alpha(a)), ds) for a in alphas]
            for (q1, d1), (q2, d2) in zip(sums, sums[1:]):
                assert d2 <= d1 + 1e-12
                assert q2 <= q1 + 1e-12


class TestBuildDefault:
    def full(self):
        return grid_dataset(
            lambda h, c, b: 5.0 + b / 20000 + 0.1 * c.fidelity_rank,
            lambda h, c, b: 0.05 * (h / 1080),
        )

    def test_every_rung_native_full_chroma(self):
        ladder = build_default(self.full())
        assert all(
            (r.choice.resolution.height, r.choice.chroma) == (2160, C444)
            for r in ladder.rungs
        )
        assert ladder.method is Method.DEFAULT
        assert ladder.alpha is None

    def test_low_bitrate_overshoot_leaves_gap(self):
        recs = [
            r
            for r in self.full().records
            if not (
                r.resolution.height == 2160
                and r.chroma is C444
                and r.target_bitrate == 600.0
            )
        ]
        recs.append(record(height=2160, chroma=C444, target=600.0, actual=700.0, quality=5.0, decode=0.1))
        ladder = build_default(TitleDataset.from_records(recs))
        assert not ladder.rungs[0].present
        assert all(r.present for r in ladder.rungs[1:])

    def test_empty_dataset_all_absent(self):
        with pytest.raises(AllRungsAbsent):
            build_default(TitleDataset("t", (), ()))


class TestBuildDynres:
    def test_low_rate_low_resolution_crossover(self):
        ds = grid_dataset(
            lambda h, c, b: 6.0 + (0.8 if h == 1080 else -0.8) * (1.0 if b < 2000 else -1.0),
            lambda h, c, b: 0.05 * (h / 1080),
            targets=(600.0, 1200.0, 4800.0, 9600.0),
        )
        ladder = build_dynres(ds, Alpha(0.0))
        heights = [r.choice.resolution.height for r in ladder.rungs]
        assert heights == [1080, 1080, 2160, 2160]
        assert all(r.choice.chroma is C444 for r in ladder.rungs)
        want = definitional_best(ds, Alpha(0.0), chroma=C444)
        assert choices_of(ladder) == want

    def test_alpha_zero_top_resolution_everywhere(self):
        ds = grid_dataset(
            lambda h, c, b: 5.0 + h / 2160 + b / 1e5,
            lambda h, c, b: 0.05 * (h / 1080),
        )
        ladder = build_dynres(ds, Alpha(0.0))
        assert all(r.choice.resolution.height == 2160 for r in ladder.rungs)

    def test_missing_pinned_chroma_raises(self):
        ds = grid_dataset(
            lambda h, c, b: 6.0,
            lambda h, c, b: 0.05,
            chromas=(C420, C422),
        )
        with pytest.raises(AllRungsAbsent):
            build_dynres(ds, Alpha(0.0))


class TestBuildFixed:
    def full(self):
        return grid_dataset(
            lambda h, c, b: 5.0 + b / 20000,
            lambda h, c, b: 0.05,
        )

    def test_plan_lookup(self):
        ladder = build_fixed(self.full(), [(600.0, 1080), (2400.0, 2160)])
        assert [(r.target_bitrate, r.choice.resolution.height) for r in ladder.rungs] == [
            (600.0, 1080),
            (2400.0, 2160),
        ]
        assert all(r.choice.chroma is C444 for r in ladder.rungs)

    def test_unknown_plan_target(self):
        with pytest.raises(PlanTargetUnknown):
            build_fixed(self.full(), [(7000.0, 2160)])

    def test_decreasing_plan_rejected(self):
        with pytest.raises(InvalidPlan):
            build_fixed(self.full(), [(600.0, 2160), (2400.0, 1080)])

    def test_duplicate_plan_target_rejected(self):
        with pytest.raises(InvalidPlan):
            build_fixed(self.full(), [(600.0, 1080), (600.0, 2160)])

    def test_unmatched_plan_rung_absent(self):
        ladder = build_fixed(self.full(), [(600.0, 1080)], fixed_chroma=C420)
        assert ladder.rungs[0].present  # C420 exists in the grid
        sparse = grid_dataset(
            lambda h, c, b: 5.0,
            lambda h, c, b: 0.05,
            chromas=(C444,),
        )
        ladder2 = build_fixed(sparse, [(600.0, 1080)], fixed_chroma=C420)
        assert not ladder2.rungs[0].present

    def test_plan_file_round_trip(self, tmp_path):
        text = "target_kbps,height\n600,1080\n2400,2160\n"
        plan = load_plan(text)
        assert plan == [(600.0, 1080), (2400.0, 2160)]
        with pytest.raises(InvalidPlan):
            load_plan("bad,header\n1,2\n")


class TestValidator:
    def test_resolution_decrease_rejected(self):
        with pytest.raises(InvalidLadder):
            Ladder(
                "t",
                Method.ARCS,
                (
                    Rung(600.0, record(height=2160, target=600.0), 0.5),
                    Rung(1200.0, record(height=1080, target=1200.0), 0.5),
                ),
                Alpha(0.0),
            )

    def test_chroma_decrease_within_run_rejected(self):
        with pytest.raises(InvalidLadder):
            Ladder(
                "t",
                Method.ARCS,
                (
                    Rung(600.0, record(chroma=C444, target=600.0), 0.5),
                    Rung(1200.0, record(chroma=C420, target=1200.0), 0.5),
                ),
                Alpha(0.0),
            )

    def test_chroma_refresh_at_resolution_step_allowed(self):
        ladder = Ladder(
            "t",
            Method.ARCS,
            (
                Rung(600.0, record(height=1080, chroma=C444, target=600.0), 0.5),
                Rung(1200.0, record(height=2160, chroma=C420, target=1200.0), 0.5),
            ),
            Alpha(0.0),
        )
        assert len(ladder.present_rungs) == 2

    def test_constraints_apply_across_gaps(self):
        with pytest.raises(InvalidLadder):
            Ladder(
                "t",
                Method.ARCS,
                (
                    Rung(600.0, record(height=2160, target=600.0), 0.5),
                    Rung(1200.0),
                    Rung(2400.0, record(height=1080, target=2400.0), 0.5),
                ),
                Alpha(0.0),
            )

    def test_unsorted_targets_rejected(self):
        with pytest.raises(InvalidLadder):
            Ladder("t", Method.ARCS, (Rung(1200.0), Rung(600.0)), Alpha(0.0))


class TestChromaPmf:
    def one_format_ladder(self, chroma, n=4):
        recs = [
            record(chroma=chroma, target=600.0 * (i + 1), quality=5.0 + i, decode=0.05)
            for i in range(n)
        ]
        ds = TitleDataset.from_records(recs)
        return optimize_arcs(ds, Alpha(0.0))

    def test_uniform_case(self):
        pmf = chroma_pmf([self.one_format_ladder(C420)])
        assert pmf == {C420: 1.0, C422: 0.0, C444: 0.0}

    def test_counting(self):
        ladders = [
            self.one_format_ladder(C420, 5),
            self.one_format_ladder(C422, 3),
            self.one_format_ladder(C444, 2),
        ]
        pmf = chroma_pmf(ladders)
        assert pmf == {C420: 0.5, C422: 0.3, C444: 0.2}
        assert abs(sum(pmf.values()) - 1.0) <= 1e-12

    def test_no_present_rungs_rejected(self):
        with pytest.raises(NoPresentRungs):
            chroma_pmf([])

"""Solver correctness: enumeration, the window DP, budgets, tie-breaking."""

import itertools
from fractions import Fraction

import numpy as np
import pytest

from votelab.core import (
    Permutation,
    Profile,
    Ranking,
    all_rankings,
    kemeny_score,
    permute,
    slater_score,
    umg,
)
from votelab.models import MallowsParam, ParameterProfile, sample_profile
from votelab.solvers import (
    SolveResult,
    TimedOut,
    kemeny_brute,
    kemeny_dp,
    result_record,
    slater_brute,
    solve_with_budget,
)

R123 = Ranking((0, 1, 2))
CYCLIC3 = Profile.from_rankings([(0, 1, 2), (1, 2, 0), (2, 0, 1)])


def random_mallows_profile(m, n, phi, seed):
    rng = np.random.default_rng(seed)
    central = Ranking(tuple(rng.permutation(m).tolist()))
    pp = ParameterProfile.from_entries(m, [(MallowsParam(central, phi), n)])
    return sample_profile(pp, rng)


# ---------------------------------------------------------------------------
# brute force
# ---------------------------------------------------------------------------


def test_brute_unanimous():
    prof = Profile.from_rankings([R123] * 3)
    res = kemeny_brute(prof)
    assert res.ranking == R123 and res.score == 0


def test_brute_cyclic_scores_and_tiebreak():
    # scores over the six rankings are {4,4,4,5,5,5}; the three rotations
    # tie at 4 and the lexicographically smallest wins
    scores = sorted(kemeny_score(r, CYCLIC3) for r in all_rankings(3))
    assert scores == [4, 4, 4, 5, 5, 5]
    res = kemeny_brute(CYCLIC3)
    assert res.score == 4
    assert res.ranking == R123


def test_brute_reversal_pair():
    prof = Profile.from_rankings([(0, 1, 2), (2, 1, 0)])
    res = kemeny_brute(prof)
    assert res.score == 3  # every ranking scores exactly 3
    assert res.ranking == R123  # lexicographic among all six


def test_brute_matches_exhaustive_oracle():
    rng = np.random.default_rng(21)
    for _ in range(25):
        m = int(rng.integers(2, 5))
        n = int(rng.integers(1, 6))
        prof = Profile.from_rankings(
            [tuple(rng.permutation(m).tolist()) for _ in range(n)], m=m
        )
        res = kemeny_brute(prof)
        best = min(kemeny_score(r, prof) for r in all_rankings(m))
        assert res.score == best
        assert kemeny_score(res.ranking, prof) == res.score


def test_brute_m_cap():
    with pytest.raises(ValueError):
        kemeny_brute(Profile.empty(11))


def test_brute_exact_weights():
    prof = Profile.from_rankings(
        [(0, 1, 2), (2, 1, 0)], weights=[Fraction(2, 3), Fraction(1, 3)]
    )
    res = kemeny_brute(prof)
    assert res.score == Fraction(0 * 2 + 3 * 1, 3)
    assert res.ranking == R123


def test_brute_score_consistency_invariant():
    rng = np.random.default_rng(22)
    for _ in range(10):
        prof = random_mallows_profile(5, 7, 0.6, int(rng.integers(1 << 30)))
        res = kemeny_brute(prof)
        assert kemeny_score(res.ranking, prof) == res.score


# ---------------------------------------------------------------------------
# window DP
# ---------------------------------------------------------------------------


def test_dp_unanimous_short_circuit():
    prof = Profile.from_rankings([R123] * 4)
    res = kemeny_dp(prof)
    assert res.score == 0 and res.ranking == R123
    assert res.diagnostics.d == 0


def test_dp_single_vote():
    prof = Profile.from_rankings([(2, 0, 1)])
    res = kemeny_dp(prof)
    assert res.ranking == Ranking((2, 0, 1)) and res.score == 0


def test_dp_exhaustive_multisets_m3():
    # every vote multiset of sizes 2 and 3 over the six rankings
    # (the 56 size-3 multisets plus the 21 size-2 ones)
    rankings = all_rankings(3)
    cases = list(itertools.combinations_with_replacement(rankings, 3))
    assert len(cases) == 56
    cases += list(itertools.combinations_with_replacement(rankings, 2))
    for votes in cases:
        prof = Profile.from_rankings(votes, m=3)
        rb = kemeny_brute(prof)
        rd = kemeny_dp(prof)
        assert rd.score == rb.score
        assert rd.ranking == rb.ranking  # identical tie-breaking


@pytest.mark.parametrize("phi", [0.2, 0.5, 0.9])
def test_dp_matches_brute_on_random_mallows(phi):
    rng = np.random.default_rng(int(phi * 1000))
    for trial in range(67):
        m = int(rng.integers(3, 7))
        n = int(rng.integers(2, 9))
        prof = random_mallows_profile(m, n, phi, int(rng.integers(1 << 30)))
        rb = kemeny_brute(prof)
        rd = kemeny_dp(prof)
        assert rd.score == rb.score, (m, n, phi, trial)
        assert rd.ranking == rb.ranking


def test_dp_score_invariant_under_relabeling():
    rng = np.random.default_rng(23)
    for _ in range(15):
        prof = random_mallows_profile(5, 6, 0.5, int(rng.integers(1 << 30)))
        sigma = Permutation(tuple(rng.permutation(5).tolist()))
        a = kemeny_dp(prof)
        b = kemeny_dp(permute(sigma, prof))
        assert a.score == b.score


def test_dp_diagnostics_populated():
    prof = CYCLIC3
    res = kemeny_dp(prof)
    assert res.diagnostics.d == 2
    assert res.diagnostics.window_radius == 2
    assert res.diagnostics.max_states >= 1
    assert res.op_count > 0


def test_dp_rejects_fractional():
    prof = Profile.from_rankings([(0, 1, 2)], weights=[Fraction(1, 2)])
    with pytest.raises(ValueError):
        kemeny_dp(prof)


def test_dp_state_cap_fallback():
    prof = random_mallows_profile(6, 6, 0.9, 99)
    res = kemeny_dp(prof, state_cap=2)
    assert res.solver == "dp-fallback-brute"
    assert res.score == kemeny_brute(prof).score


def test_dp_window_slack_widening_is_safe():
    prof = random_mallows_profile(5, 5, 0.8, 7)
    tight = kemeny_dp(prof, window_slack=1.0)
    wide = kemeny_dp(prof, window_slack=2.0)
    assert tight.score == wide.score


# ---------------------------------------------------------------------------
# slater
# ---------------------------------------------------------------------------


def test_slater_unanimous_and_cyclic():
    prof = Profile.from_rankings([R123] * 2)
    assert slater_brute(prof).score == 0
    res = slater_brute(CYCLIC3)
    assert res.score == 1  # the majority triangle forces one back-edge


def test_slater_transitive_topological():
    prof = Profile.from_rankings([(2, 0, 1), (2, 0, 1), (2, 1, 0)])
    res = slater_brute(prof)
    assert res.score == 0
    assert res.ranking == Ranking((2, 0, 1))


def test_slater_depends_only_on_umg():
    a = Profile.from_rankings([(0, 1, 2)] * 3)
    b = Profile.from_rankings([(0, 1, 2)] * 5 + [(2, 1, 0)] * 2)
    assert umg(a).edges == umg(b).edges
    ra, rb = slater_brute(a), slater_brute(b)
    assert ra.ranking == rb.ranking and ra.score == rb.score


def test_slater_matches_exhaustive_oracle():
    rng = np.random.default_rng(31)
    for _ in range(20):
        prof = random_mallows_profile(5, 5, 0.7, int(rng.integers(1 << 30)))
        res = slater_brute(prof)
        best = min(slater_score(r, prof) for r in all_rankings(5))
        assert res.score == best
        assert slater_score(res.ranking, prof) == res.score


# ---------------------------------------------------------------------------
# budgets
# ---------------------------------------------------------------------------


def test_budget_generous_matches_direct():
    direct = kemeny_brute(CYCLIC3)
    budgeted = solve_with_budget(kemeny_brute, CYCLIC3, budget=30.0)
    assert isinstance(budgeted, SolveResult)
    assert budgeted.ranking == direct.ranking and budgeted.score == direct.score


def test_budget_tiny_times_out_on_m9():
    prof = Profile.from_rankings([tuple(range(9))])
    res = solve_with_budget(
        lambda p, deadline=None: kemeny_brute(p, deadline=deadline, chunk_size=2000),
        prof,
        budget=1e-4,
    )
    assert isinstance(res, TimedOut)
    assert res.budget == 1e-4


def test_budget_rejects_nonpositive():
    with pytest.raises(ValueError):
        solve_with_budget(kemeny_brute, CYCLIC3, budget=0)


def test_answer_determinism_across_runs():
    prof = random_mallows_profile(5, 6, 0.5, 11)
    a = kemeny_dp(prof)
    b = kemeny_dp(prof)
    assert a.ranking == b.ranking and a.score == b.score and a.op_count == b.op_count


def test_result_record_shape():
    rec = result_record(kemeny_dp(CYCLIC3))
    assert set(rec) == {"ranking", "score", "elapsed_ms", "op_count", "d", "window_radius", "solver"}
    assert rec["ranking"] == [0, 1, 2]
    rec2 = result_record(kemeny_brute(CYCLIC3))
    assert rec2["d"] is None


def test_dp_rejects_narrow_window():
    with pytest.raises(ValueError):
        kemeny_dp(CYCLIC3, window_slack=0.5)

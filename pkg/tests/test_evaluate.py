from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from autotrace.evaluate import (
    CostParams,
    InstanceTooLarge,
    Matching,
    StreamStructureError,
    brute_force_best,
    matching_from_events,
    matching_from_result,
    simulate_cost,
    traced_fraction_report,
    traced_mask,
    validate_matching,
    write_cost_csv,
    write_fraction_csv,
)
from autotrace.miner import find_repeats
from autotrace.streamio import TaskEvent, TraceBegin, TraceEnd
from autotrace.tokens import task

from oracles import has_disjoint_pair

T = task("T")


def traced(trace_id, first, n):
    return [TraceBegin(trace_id, first)] + [TaskEvent(T)] * n + [TraceEnd(trace_id)]


def m_of(pairs):
    m = Matching()
    for trace, iv in pairs:
        m.add(trace, iv)
    return m


def test_valid_matching():
    s = "abcabc"
    assert validate_matching(m_of([("abc", (0, 3)), ("abc", (3, 6))]), s, 3) is None


@pytest.mark.parametrize(
    "pairs, min_len, kind",
    [
        ([("ab", (0, 2))], 3, "min_length"),
        ([("abc", (4, 7))], 1, "bounds"),
        ([("abc", (1, 4))], 1, "content"),
        ([("ab", (0, 3))], 1, "content"),
        ([("abc", (0, 3)), ("ca", (2, 4))], 1, "disjointness"),
    ],
)
def test_each_violation_kind(pairs, min_len, kind):
    m = Matching()
    for trace, iv in pairs:
        m.add(tuple(trace), iv)
    v = validate_matching(m, tuple("abcabc"), min_len)
    assert v is not None and v.kind == kind


def test_matching_objective():
    m = m_of([(("a",), (0, 1)), (("a",), (2, 3)), (("b", "c"), (3, 5))])
    assert m.objective() == (4, 3, -2)


def test_brute_force_examples():
    assert brute_force_best("ababab", 1).coverage() == 6
    m2 = brute_force_best("ababab", 2)
    assert m2.traces == {tuple("ab"): [(0, 2), (2, 4), (4, 6)]}
    assert brute_force_best("abcabc", 3).coverage() == 6
    assert brute_force_best("abcdef", 1).coverage() == 0
    assert brute_force_best("", 1).coverage() == 0


def test_brute_force_min_one_prefers_more_intervals():
    m = brute_force_best("ababab", 1)
    assert m.interval_count() == 6 and m.trace_count() == 2


def test_brute_force_guards():
    with pytest.raises(InstanceTooLarge):
        brute_force_best("a" * 31, 1)
    with pytest.raises(ValueError):
        brute_force_best("aa", 0)


def exhaustive(s, m):
    """Best (coverage, intervals) by trying every tiling; tiny inputs only."""
    n = len(s)

    def go(i):
        if i == n:
            return (0, 0)
        best = go(i + 1)
        for L in range(m, n - i + 1):
            if has_disjoint_pair(s, s[i : i + L]):
                cov, cnt = go(i + L)
                best = max(best, (cov + L, cnt + 1))
        return best

    return go(0)


@given(st.text(alphabet="ab", max_size=12), st.integers(1, 3))
def test_brute_force_matches_exhaustive_search(s, m):
    best = brute_force_best(s, m)
    assert validate_matching(best, tuple(s), m) is None
    assert (best.coverage(), best.interval_count()) == exhaustive(s, m)


@given(st.text(alphabet="abc", max_size=24), st.integers(1, 3))
def test_miner_never_beats_brute_force(s, m):
    r = find_repeats(s, m)
    mm = matching_from_result(r)
    assert validate_matching(mm, [ord(c) for c in s], m) is None
    assert mm.coverage() <= brute_force_best(s, m).coverage()


def test_cost_of_a_hundred_task_trace_replayed():
    events = traced(0, True, 100)
    for _ in range(99):
        events += traced(0, False, 100)
    rep = simulate_cost(events)
    assert rep.total == Fraction(11298, 10000)
    assert rep.tasks == 10000 and rep.replays == 99
    assert rep.speedup_vs_untraced(CostParams()) == Fraction(10, 1) / Fraction(11298, 10000)


def test_untraced_cost_is_alpha_per_task():
    rep = simulate_cost([TaskEvent(T)] * 1000)
    assert rep.total == 1
    assert all(kind == "untraced" for _, kind, _ in rep.rows)


def test_cost_parameter_ordering():
    with pytest.raises(ValueError):
        CostParams(alpha=Fraction(1, 10000), alpha_r=Fraction(1, 1000))
    with pytest.raises(ValueError):
        CostParams(c=-1)


def test_traced_fraction_examples():
    alt = []
    for _ in range(10):
        alt += [TaskEvent(T)] * 6 + traced(0, False, 6)
    series = traced_fraction_report(alt, window=12)
    assert series[-1][1] == 0.5
    steady = traced(0, True, 10) + traced(0, False, 10) * 20
    assert traced_fraction_report(steady, window=50)[-1][1] == 1.0
    assert [f for _, f in traced_fraction_report([TaskEvent(T)] + traced(1, True, 1), 10)] == [0.0, 0.5]
    with pytest.raises(ValueError):
        traced_fraction_report(alt, 0)


@pytest.mark.parametrize(
    "events",
    [
        [TraceBegin(0, True), TraceBegin(1, True), TaskEvent(T), TraceEnd(1), TraceEnd(0)],
        [TraceEnd(0)],
        [TraceBegin(0, True), TraceEnd(0)],
        [TraceBegin(0, True), TaskEvent(T)],
        [TraceBegin(0, True), TaskEvent(T), TraceEnd(1)],
    ],
)
def test_malformed_structure_is_rejected(events):
    with pytest.raises(StreamStructureError):
        traced_mask(events)
    with pytest.raises(StreamStructureError):
        simulate_cost(events)


def test_matching_from_events():
    a, b = task("A"), task("B")
    events = [TaskEvent(a), TraceBegin(0, True), TaskEvent(a), TaskEvent(b), TraceEnd(0)]
    tokens, m = matching_from_events(events)
    assert len(tokens) == 3
    assert m.intervals() == [(1, 3)]


def test_csv_writers(tmp_path):
    rep = simulate_cost(traced(0, True, 2) + traced(0, False, 2))
    write_cost_csv(tmp_path / "c.csv", rep)
    lines = (tmp_path / "c.csv").read_text().splitlines()
    assert lines[0] == "index,kind,charge"
    assert lines[1] == "0,record,0.0012"
    assert "2,replay_overhead,0.0002" in lines
    write_fraction_csv(tmp_path / "f.csv", [(0, 1.0)])
    assert (tmp_path / "f.csv").read_text() == "index,fraction\n0,1.0\n"

import math

import pytest
from hypothesis import given, strategies as st

from phonesim.errors import NoProposals, UnevenRunCounts
from phonesim.metrics import (
    acceptance_rate,
    aggregate_report,
    classify_outcomes,
    classify_proposal,
    mean_stderr,
    proposal_rate,
    success_metrics,
)


def record(scenario="s1", run_index=0, success=True, proposals=(), turns=10,
           reads_obs=0, reads_total=0, **extra):
    rec = {
        "scenario_id": scenario, "run_index": run_index, "seed": 0,
        "success": success, "proposals": list(proposals),
        "read_actions_observe": reads_obs, "read_actions_total": reads_total,
        "turns_used": turns,
    }
    rec.update(extra)
    return rec


def proposal(status, pending_actions=0, turn=1):
    return {"turn": turn, "status": status,
            "user_actions_while_pending": pending_actions}


# ------------------------------------------------------------ worked examples

def test_acceptance_rate_examples():
    recs = [record(proposals=[proposal("accepted"), proposal("rejected"),
                              proposal("accepted")])]
    assert acceptance_rate(recs) == pytest.approx(2 / 3)
    assert acceptance_rate([record(proposals=[proposal("accepted")] * 3)]) == 1.0
    with pytest.raises(NoProposals):
        acceptance_rate([record()])


def test_truncated_counts_in_denominator_only():
    recs = [record(proposals=[proposal("accepted"), proposal("truncated")])]
    assert acceptance_rate(recs) == 0.5


def test_success_metrics_single_scenario_tfft():
    recs = [record(run_index=i, success=s)
            for i, s in enumerate([True, False, False, True])]
    m = success_metrics(recs, k=4)
    assert m == {"success_rate": 0.5, "success_at_k": 1.0, "success_pow_k": 0.0}


def test_success_metrics_two_scenarios():
    recs = ([record("a", i, True) for i in range(4)]
            + [record("b", i, False) for i in range(4)])
    m = success_metrics(recs, k=4)
    assert m == {"success_rate": 0.5, "success_at_k": 0.5, "success_pow_k": 0.5}


def test_uneven_run_counts_raise():
    recs = [record("a", 0), record("a", 1), record("b", 0)]
    with pytest.raises(UnevenRunCounts):
        success_metrics(recs, k=2)


def test_proposal_rate_examples():
    assert proposal_rate([record(proposals=[proposal("accepted")] * 3)]) == 0.3
    assert proposal_rate([record()]) == 0.0
    assert proposal_rate([record(proposals=[proposal("rejected")] * 10)]) == 1.0


def test_classification_examples():
    assert classify_proposal(proposal("accepted")) == ("accept", None)
    assert classify_proposal(proposal("accepted", 2)) == ("gather_context", "accept")
    assert classify_proposal(proposal("truncated", 1)) == ("gather_context", "truncated")
    assert classify_proposal(proposal("rejected")) == ("reject", None)


def test_classify_outcomes_partition():
    recs = [record(proposals=[proposal("accepted"), proposal("accepted", 2),
                              proposal("rejected"), proposal("truncated")])]
    out = classify_outcomes(recs)
    assert out["ternary"] == {"accept": 1, "reject": 1,
                              "gather_context": 1, "truncated": 1}
    assert out["gather_context_resolution"] == {"accept": 1, "reject": 0, "truncated": 0}
    assert sum(out["ternary_fractions"].values()) == pytest.approx(1.0)


def test_stderr_worked_example():
    # Oracle, by hand: mean 0.42; sample stdev sqrt(8e-4 / 3) = 0.0163299...;
    # divided by sqrt(4) gives 0.00816497.
    mean, err = mean_stderr([0.40, 0.42, 0.44, 0.42])
    assert mean == pytest.approx(0.42)
    assert err == pytest.approx(0.008164965809277, rel=1e-9)


def test_stderr_identical_means_is_zero():
    assert mean_stderr([0.3, 0.3, 0.3, 0.3])[1] == 0.0


def test_aggregate_report_cells_and_invariants():
    recs = []
    for cell_fail in (0.1, 0.2):
        for i in range(2):
            recs.append(record("a", i, success=(i == 0),
                               proposals=[proposal("accepted")],
                               model="m", noise_rate=2, failure_prob=cell_fail))
    rep = aggregate_report(recs, k=2)
    assert len(rep["cells"]) == 2
    for cell in rep["cells"]:
        assert cell["success_pow_k"] <= cell["success_rate"] <= cell["success_at_k"]
        assert cell["acceptance_rate"] == 1.0


# ----------------------------------------------------------------- properties

run_lists = st.lists(st.booleans(), min_size=1, max_size=6)


@given(st.dictionaries(st.sampled_from(["s1", "s2", "s3", "s4", "s5", "s6"]),
                       st.lists(st.booleans(), min_size=4, max_size=4),
                       min_size=1, max_size=6))
def test_ordering_invariant(table):
    recs = [record(sid, i, success)
            for sid, runs in table.items() for i, success in enumerate(runs)]
    m = success_metrics(recs, k=4)
    assert m["success_pow_k"] <= m["success_rate"] + 1e-12
    assert m["success_rate"] <= m["success_at_k"] + 1e-12


@given(st.permutations(list(range(8))),
       st.lists(st.booleans(), min_size=8, max_size=8))
def test_permutation_invariance(order, successes):
    recs = [record("s", i, successes[i],
                   proposals=[proposal("accepted" if successes[i] else "rejected")])
            for i in range(8)]
    shuffled = [recs[i] for i in order]
    assert success_metrics(recs, 8) == success_metrics(shuffled, 8)
    assert acceptance_rate(recs) == acceptance_rate(shuffled)
    assert proposal_rate(recs) == proposal_rate(shuffled)


@given(st.lists(st.tuples(st.sampled_from(["accepted", "rejected", "truncated"]),
                          st.integers(min_value=0, max_value=3)),
                min_size=0, max_size=20))
def test_ternary_partitions_proposal_multiset(props):
    recs = [record(proposals=[proposal(s, n) for s, n in props])]
    out = classify_outcomes(recs)
    assert sum(out["ternary"].values()) == len(props)
    assert sum(out["gather_context_resolution"].values()) == out["ternary"]["gather_context"]

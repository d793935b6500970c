import numpy as np
import pytest

from dirac_levinson.spectral_flow import (
    BracketError,
    FlowCounts,
    InconsistentCountsError,
    count_crossings,
    level_histories,
    refine_crossing,
    sweep_coupling,
    winding_counts,
)
from dirac_levinson.squarewell_oracle import oracle_critical_couplings

from conftest import square


@pytest.fixture(scope="module")
def deep_trace(params):
    return sweep_coupling(square(4.0), params, lam_steps=100)


def test_counts_of_supercritical_well(params, deep_trace):
    c = count_crossings(deep_trace)
    assert c == FlowCounts(2, 2, 1, 0, 1, 2)
    assert c == winding_counts(square(4.0), params)


def test_events_match_oracle(deep_trace):
    for parity in ("even", "odd"):
        for edge in ("+m", "-m"):
            got = [e.lam for e in deep_trace.events if e.parity == parity and e.edge == edge]
            ref = oracle_critical_couplings(4.0, parity, edge, 5)
            if parity == "even" and edge == "+m":
                # the ground state is bound by any attractive well
                ref = [0.0] + ref
            assert got == pytest.approx(ref, abs=1e-8)


def test_levels_fall_and_keep_nodes(deep_trace):
    for (parity, index), hist in level_histories(deep_trace).items():
        E = np.array([h[1] for h in hist])
        assert np.all(np.diff(E) <= 1e-12), (parity, index)
        assert len({h[2] for h in hist}) == 1, (parity, index)


def test_trace_csv(deep_trace):
    lines = deep_trace.to_csv().splitlines()
    assert lines[0] == "lambda,parity,nodes,energy"
    assert len(lines) == 1 + sum(len(s) for s in deep_trace.levels)


def test_zero_coupling_sweep(params):
    tr = sweep_coupling(square(2.0), params, lam_max=0.0)
    assert tr.events == [] and tr.levels == [[]]
    assert count_crossings(tr) == FlowCounts()


@pytest.mark.parametrize("V0,a,expected", [
    (0.5, 1.0, (1, 0, 0, 0, 1, 0)),
    (2.6, 1.0, (2, 1, 0, 0, 2, 1)),
    (6.0, 1.0, (3, 2, 2, 1, 1, 1)),
])
def test_family_counts(params, V0, a, expected):
    tr = sweep_coupling(square(V0, a=a), params, lam_steps=60)
    assert count_crossings(tr) == FlowCounts(*expected)


def test_refine_crossing_brackets(params):
    s = square(4.0)
    lam_star = oracle_critical_couplings(4.0, "odd", "+m", 1)[0]
    got = refine_crossing(s, params, "odd", "+m", (0.1, 0.3), tol=1e-12)
    assert got == pytest.approx(lam_star, abs=1e-10)
    with pytest.raises(BracketError):
        refine_crossing(s, params, "odd", "+m", (0.3, 0.5))
    with pytest.raises(BracketError):
        refine_crossing(s, params, "odd", "+m", (0.1, 1.0))


def test_inconsistent_counts_raise():
    with pytest.raises(InconsistentCountsError):
        FlowCounts(2, 0, 0, 0, 1, 0).check()
    with pytest.raises(InconsistentCountsError):
        FlowCounts(1, -1, 0, -1, 1, 0).check()

import itertools
import json

import pytest

from monochaos.sft import (SymbolGraph, devaney_check_bruteforce, enumerate_graphs, equivalence_scan,
                           is_transitive, replay_periodic, replay_transitive_walk, single_orbit_graph,
                           touhey_check)

FULL2 = SymbolGraph(1, [(0, 0), (0, 0)])
CYCLE3 = SymbolGraph(3, [(0, 1), (1, 2), (2, 0)])
LOOPS = SymbolGraph(2, [(0, 0), (1, 1)])
CHORD = SymbolGraph(3, [(0, 1), (1, 2), (2, 0), (0, 2)])


# naive oracle: closed words by plain product enumeration, no Lyndon pruning

def closed_words(g, P):
    n = g.n_edges
    for p in range(1, P + 1):
        for w in itertools.product(range(n), repeat=p):
            if g.closed(w):
                yield w


def cylinders(g, L):
    n = g.n_edges
    return [w for k in range(1, L + 1) for w in itertools.product(range(n), repeat=k) if g.admissible(w)]


def visits(w, L):
    rep = w * (L // len(w) + 2)
    return {rep[i:i + k] for i in range(len(w)) for k in range(1, L + 1)}


def oracle_touhey(g, L, P):
    cyl = cylinders(g, L)
    seen = [visits(w, L) for w in closed_words(g, P)]
    return all(any(u in s and v in s for s in seen) for u in cyl for v in cyl)


def oracle_dense_periodic(g, L, P):
    seen = set().union(*[visits(w, L) for w in closed_words(g, P)] or [set()])
    # a point in cylinder u is a shift of the periodic word starting with u
    return all(u in seen for u in cylinders(g, L))


# construction

def test_pruning_removes_transient_vertices():
    g = SymbolGraph(3, [(0, 0), (0, 1), (2, 0)])
    assert g.vertices == [0] and g.edges == [(0, 0)]
    assert g.pruned_vertices == [1, 2] and g.pruned_edges == 2


def test_graph_json_round_trip(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"vertices": 3, "edges": [[0, 1], [1, 2], [2, 0], [0, 2]]}))
    g = SymbolGraph.load(path)
    assert g.to_dict() == {"vertices": 3, "edges": [[0, 1], [0, 2], [1, 2], [2, 0]]}


def test_bad_vertex_rejected():
    with pytest.raises(ValueError):
        SymbolGraph(2, [(0, 3)])


# transitivity

def test_full_shift_transitive():
    res = is_transitive(FULL2)
    assert res.holds and replay_transitive_walk(FULL2, res.walk, 1)


def test_disjoint_loops_not_transitive():
    res = is_transitive(LOOPS)
    assert not res.holds and res.pair == (0, 1)


def test_three_cycle_transitive():
    assert is_transitive(CYCLE3).holds


# Devaney conditions

def test_full_shift_chaotic():
    v = devaney_check_bruteforce(FULL2, 3, 6)
    assert v.verdicts == {"dense_periodic": True, "transitive": True, "sensitive": True, "nondiscrete": True}
    assert v.chaotic
    assert replay_transitive_walk(FULL2, v.witnesses["transitive"]["walk"], 3)


def test_three_cycle_is_one_periodic_orbit():
    v = devaney_check_bruteforce(CYCLE3, 3, 6)
    assert v.verdicts == {"dense_periodic": True, "transitive": True, "sensitive": False, "nondiscrete": False}
    assert not v.chaotic and single_orbit_graph(CYCLE3)


def test_disjoint_loops_fail_transitivity():
    v = devaney_check_bruteforce(LOOPS, 3, 6)
    assert not v["transitive"] and "unreachable" in v.witnesses["transitive"]


def test_dense_periodic_witnesses_replay():
    for g in (FULL2, CYCLE3, CHORD):
        v = devaney_check_bruteforce(g, 3, 6)
        for cyl, word in v.witnesses["dense_periodic"].items():
            assert replay_periodic(g, word, [cyl])
            assert len(word) <= 6


def test_sensitivity_witnesses_branch():
    v = devaney_check_bruteforce(CHORD, 2, 4)
    for cyl, (a, b) in v.witnesses["sensitive"].items():
        assert a.startswith(cyl) and b.startswith(cyl)
        assert a[:-1] == b[:-1] and a[-1] != b[-1]
        assert CHORD.admissible(CHORD.unword(a)) and CHORD.admissible(CHORD.unword(b))
        assert len(a) <= 2 + 4 + 1


def test_dense_periodic_matches_naive_oracle():
    for g in enumerate_graphs(2, 4):
        for L, P in [(1, 2), (2, 3), (2, 5)]:
            assert devaney_check_bruteforce(g, L, P)["dense_periodic"] == oracle_dense_periodic(g, L, P), g


# Touhey

def test_full_shift_touhey_pair_witness():
    v = touhey_check(FULL2, 2, 4)
    assert v["touhey"]
    assert v.witnesses["01|10"] == "01"
    assert replay_periodic(FULL2, "01", ["01", "10"])


def test_disjoint_loops_failing_pair():
    v = touhey_check(LOOPS, 3, 6)
    assert not v["touhey"]
    assert v.witnesses["failing_pair"] == ["0", "1"]


def test_chord_graph_touhey_at_sufficient_period():
    assert not touhey_check(CHORD, 2, 4)["touhey"]
    v = touhey_check(CHORD, 2, 6)
    assert v["touhey"]
    for key, word in v.witnesses.items():
        a, b = key.split("|")
        assert replay_periodic(CHORD, word, [a, b])


def test_touhey_matches_naive_oracle():
    for g in enumerate_graphs(2, 4):
        for L, P in [(1, 3), (2, 4), (2, 6)]:
            assert touhey_check(g, L, P)["touhey"] == oracle_touhey(g, L, P), g


def test_witnesses_survive_higher_resolution():
    old = touhey_check(FULL2, 2, 4)
    new = touhey_check(FULL2, 3, 6)
    assert old["touhey"] and new["touhey"]
    for key, word in old.witnesses.items():
        assert replay_periodic(FULL2, word, key.split("|"))


def test_resource_cap_gives_partial_verdict(monkeypatch):
    monkeypatch.setenv("MONOCHAOS_MAX_STATES", "10")
    v = devaney_check_bruteforce(FULL2, 4, 6)
    assert v.partial and "error" in v.witnesses
    assert touhey_check(FULL2, 4, 6).partial


def test_resolution_must_be_positive():
    with pytest.raises(ValueError):
        touhey_check(FULL2, 0, 3)


# scans

def test_enumeration_yields_only_essential_graphs():
    graphs = list(enumerate_graphs(2, 4))
    assert all(not g.pruned_vertices for g in graphs)
    assert len({tuple(g.edges) + (g.n_input_vertices,) for g in graphs}) == len(graphs)


def test_one_vertex_scan_agrees():
    r = equivalence_scan(1, 2, 3, 6)
    assert r["graphs"] == 2 and r["disagreements"] == []


def test_two_vertex_scan_agrees_at_adequate_period():
    r = equivalence_scan(2, 6, 3, 8)
    assert r["disagreements"] == [] and r["transitivity_inconsistencies"] == []
    assert all(not e["verdicts"]["nondiscrete"] for e in r["single_orbit_bucket"])


def test_two_vertex_scan_disagreements_surfaced_below_adequate_period():
    r = equivalence_scan(2, 6, 3, 6)
    assert r["disagreements"]
    # every disagreement is resolution-limited: Touhey needs a longer period, Devaney does not
    for e in r["disagreements"]:
        assert e["devaney"] and not e["touhey"]
        g = SymbolGraph.from_dict(e["graph"])
        assert touhey_check(g, 3, 8)["touhey"]

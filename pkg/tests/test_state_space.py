"""Tests for reachability exploration and the graph-based behavioral checks."""
import pytest
from hypothesis import given, settings, strategies as st

from corpus import PUBLISHED_TABLE, TABLE_NETS
from errors import LimitExceeded, UnboundedNet, UnknownMarking
from generators import GenParams, gen_small_random
from petri_net import Marking, build_net, enabled_transitions, fire, fire_sequence
from state_space import (
    COMPLETE, LIMIT, UNBOUNDED, ExplorationLimits, boundedness, dead_transitions, deadlocks,
    explore, find_constrained_sequence, home_markings, is_cyclic, is_k_bounded, is_live,
)

SMALL = ExplorationLimits(max_states=5000)


@pytest.fixture
def two_tokens():
    net = build_net(["p", "q"], ["t"], [("p", "t"), ("t", "q")], name="drain")
    return net, Marking(["p", "p"])


class TestExplore:
    @pytest.mark.parametrize("name", TABLE_NETS)
    def test_reachable_counts(self, corpus, name):
        net, m0 = corpus[name]
        outcome = explore(net, m0)
        assert outcome.verdict == COMPLETE
        assert len(outcome.graph) == PUBLISHED_TABLE[name]["RM"]

    def test_figure_one_markings(self, corpus):
        net, m0 = corpus["fig1"]
        graph = explore(net, m0).graph
        found = {m: graph.enabled(graph.node_of(m)) for m in graph.markings}
        assert found == {
            Marking(["p1", "p2"]): {"t1", "t2"},
            Marking(["p3", "p4"]): {"t3", "t4"},
            Marking(["p2", "p4"]): {"t4"},
            Marking(["p1", "p3"]): {"t3"},
        }

    def test_initial_marking_is_node_zero(self, corpus):
        net, m0 = corpus["fig3"]
        graph = explore(net, m0).graph
        assert graph.markings[0] == m0
        assert graph.path_to(0) == ()

    def test_edges_are_firings(self, corpus):
        net, m0 = corpus["fig7"]
        graph = explore(net, m0).graph
        for src, t, dst in graph.edges:
            assert fire(net, graph.markings[src], t) == graph.markings[dst]
        for i, m in enumerate(graph.markings):
            assert graph.enabled(i) == enabled_transitions(net, m)

    def test_path_to_reaches_every_node(self, corpus):
        net, m0 = corpus["fig4"]
        graph = explore(net, m0).graph
        for i, m in enumerate(graph.markings):
            assert fire_sequence(net, m0, graph.path_to(i)) == m

    def test_deterministic(self, corpus):
        net, m0 = corpus["fig7"]
        first, second = explore(net, m0).graph, explore(net, m0).graph
        assert first.markings == second.markings
        assert first.edges == second.edges

    def test_state_limit(self, corpus):
        net, m0 = corpus["fig3"]
        outcome = explore(net, m0, ExplorationLimits(max_states=3))
        assert outcome.verdict == LIMIT
        assert outcome.graph is None
        with pytest.raises(LimitExceeded):
            outcome.require_graph()

    def test_edge_limit(self, corpus):
        net, m0 = corpus["fig3"]
        assert explore(net, m0, ExplorationLimits(max_edges=2)).verdict == LIMIT

    def test_bad_limits(self):
        with pytest.raises(ValueError):
            ExplorationLimits(max_states=0)

    def test_unknown_marking(self, corpus):
        net, m0 = corpus["fig1"]
        with pytest.raises(UnknownMarking):
            explore(net, m0).graph.node_of(Marking(["p1"]))


class TestUnbounded:
    def test_pump_witness(self, pump_net):
        net, m0 = pump_net
        outcome = explore(net, m0)
        assert outcome.verdict == UNBOUNDED
        w = outcome.witness
        assert w.prefix == () and w.pump == ("t",)
        assert w.m1 == Marking(["p"]) and w.m2 == Marking(["p", "q"])

    def test_graph_checks_refuse(self, pump_net):
        net, m0 = pump_net
        with pytest.raises(UnboundedNet) as info:
            is_live(net, m0)
        assert info.value.witness is not None

    def test_boundedness_reports_witness(self, pump_net):
        net, m0 = pump_net
        verdict = boundedness(net, m0)
        assert not verdict.bounded and not verdict.safe
        assert verdict.witness.pump == ("t",)
        assert not is_k_bounded(net, m0, 100)

    @settings(max_examples=200, deadline=None)
    @given(st.integers(min_value=0, max_value=2**32), st.integers(min_value=2, max_value=8))
    def test_witness_replays(self, seed, size):
        net, m0 = gen_small_random(GenParams(seed=seed, size=size))
        outcome = explore(net, m0, SMALL)
        if outcome.verdict != UNBOUNDED:
            return
        w = outcome.witness
        assert w.pump
        assert fire_sequence(net, m0, w.prefix) == w.m1
        assert fire_sequence(net, w.m1, w.pump) == w.m2
        assert w.m2.strictly_dominates(w.m1)


class TestHomeAndLiveness:
    def test_figure_three_home_markings(self, corpus):
        net, m0 = corpus["fig3"]
        homes = home_markings(net, m0)
        assert len(homes) == 8
        assert m0 not in homes
        assert not is_cyclic(net, m0)

    def test_figure_one_is_cyclic(self, corpus):
        net, m0 = corpus["fig1"]
        assert is_cyclic(net, m0)
        assert len(home_markings(net, m0)) == 4

    @pytest.mark.parametrize("name", TABLE_NETS)
    def test_corpus_is_live(self, corpus, name):
        net, m0 = corpus[name]
        assert is_live(net, m0).live

    def test_dead_branch(self, dead_branch):
        net, m0 = dead_branch
        graph = explore(net, m0).graph
        verdict = is_live(net, m0, graph=graph)
        assert not verdict.live
        marking, t = verdict.witness
        assert t in net.transitions
        assert t not in {u for i, m in enumerate(graph.markings) if m == marking for u in graph.enabled(i)}
        assert dead_transitions(graph) == ["join"]
        assert deadlocks(graph) == [Marking(["a"]), Marking(["b"])]
        # two terminal markings, so no home marking
        assert home_markings(net, m0, graph=graph) == []

    def test_self_loop(self, self_loop):
        net, m0 = self_loop
        assert is_live(net, m0).live
        assert home_markings(net, m0) == [m0]


class TestBoundedness:
    @pytest.mark.parametrize("name", TABLE_NETS)
    def test_corpus_is_safe(self, corpus, name):
        net, m0 = corpus[name]
        verdict = boundedness(net, m0)
        assert verdict.bounded and verdict.safe and verdict.bound == 1

    def test_two_bounded(self, two_tokens):
        net, m0 = two_tokens
        verdict = boundedness(net, m0)
        assert verdict.bound == 2 and not verdict.safe
        assert verdict.per_place == {"p": 2, "q": 2}
        assert is_k_bounded(net, m0, 2)
        assert not is_k_bounded(net, m0, 1)


class TestConstrainedSequence:
    def test_shortest_sequence(self, corpus):
        net, m0 = corpus["fig3"]
        target = Marking(["p1", "p2"])
        seq = find_constrained_sequence(net, m0, target, net.transitions)
        assert len(seq) == 3
        assert fire_sequence(net, m0, seq) == target

    def test_respects_alphabet(self, corpus):
        net, m0 = corpus["fig3"]
        target = Marking(["p1", "p2"])
        assert find_constrained_sequence(net, m0, target, net.transitions - {"t7"}) is None
        assert find_constrained_sequence(net, m0, m0, set()) == ()

    def test_target_must_be_reachable(self, corpus):
        net, m0 = corpus["fig3"]
        with pytest.raises(UnknownMarking):
            find_constrained_sequence(net, m0, Marking(["p1"]), net.transitions)

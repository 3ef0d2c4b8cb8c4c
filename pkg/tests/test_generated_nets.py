"""
Structure-theory facts checked on generated nets.

Block-built workflow nets give sound free-choice nets whose short-circuit
is live, bounded and perpetual; small random nets give a differential check
against the structural criteria for liveness and a direct all-pairs
comparison for lucency.
"""
from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from behavior import blocking_map, check_lucency, home_clusters, is_locally_safe, realize_path
from corpus import TABLE_NETS
from errors import Disconnected
from generators import GenParams, gen_block_wf, gen_small_random
from petri_net import (
    Marking, enabled_transitions, fire, fire_sequence, project_marking, project_sequence,
)
from state_space import COMPLETE, ExplorationLimits, explore, home_markings, is_live
from structure import (
    check_soundness, classify, commoner_check, has_cover, p_components, q_projection,
    short_circuit,
)

SMALL = ExplorationLimits(max_states=5000)
WF_SEEDS = range(200)
RANDOM_SEEDS = range(500)


def _wf(seed: int):
    return gen_block_wf(GenParams(seed=seed, size=1 + seed % 12))


def _random(seed: int):
    return gen_small_random(GenParams(seed=seed, size=2 + seed % 7))


def _component_choices(comps):
    """Single components, consecutive pairs and the whole set."""
    choices = [[c] for c in comps]
    choices += [[a, b] for a, b in zip(comps, comps[1:])]
    if len(comps) > 2:
        choices.append(list(comps))
    return choices


def _replay_random_run(net, m0, data):
    """Draw a component union and a run; the projected run must reach the projected marking."""
    comps = p_components(net)
    if not comps:
        return
    chosen = data.draw(st.lists(st.sampled_from(comps), min_size=1, unique=True))
    try:
        projection = q_projection(net, m0, chosen)
    except Disconnected:
        return
    run, m = [], m0
    for _ in range(data.draw(st.integers(min_value=0, max_value=30))):
        enabled = sorted(enabled_transitions(net, m))
        if not enabled:
            break
        t = data.draw(st.sampled_from(enabled))
        m = fire(net, m, t)
        run.append(t)
    projected = project_sequence(run, projection.transitions)
    reached = fire_sequence(projection.projected_net, projection.projected_marking, projected)
    assert reached == project_marking(m, projection.projected_net.places)


class TestBlockWorkflowNets:
    @pytest.mark.parametrize("seed", WF_SEEDS)
    def test_sound(self, seed):
        net, _ = _wf(seed)
        assert check_soundness(net).sound

    @pytest.mark.parametrize("seed", WF_SEEDS)
    def test_closed_net_is_perpetual_and_lucent(self, seed):
        net, m0 = _wf(seed)
        closed = short_circuit(net)
        graph = explore(closed, m0).require_graph()
        assert is_live(closed, m0, graph=graph).live
        assert home_clusters(closed, m0, graph=graph)
        assert is_locally_safe(closed, m0, graph=graph).safe
        assert check_lucency(closed, m0, graph=graph).lucent

    @pytest.mark.parametrize("seed", WF_SEEDS)
    def test_closed_net_structure(self, seed):
        net, m0 = _wf(seed)
        closed = short_circuit(net)
        graph = explore(closed, m0).require_graph()
        assert has_cover(closed, p_components(closed))
        assert all(len(r.blocking_markings) == 1 for r in blocking_map(closed, m0, graph=graph))
        assert Marking(["o"]) in home_markings(closed, m0, graph=graph)


class TestRandomNets:
    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_free_choice_liveness_matches_siphon_criterion(self, seed):
        net, m0 = _random(seed)
        if not classify(net).is_free_choice:
            return
        outcome = explore(net, m0, SMALL)
        if outcome.verdict != COMPLETE:
            pytest.skip("state space not explored")
        assert commoner_check(net, m0).holds == is_live(net, m0, graph=outcome.graph).live

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_live_bounded_free_choice_facts(self, seed):
        net, m0 = _random(seed)
        if not classify(net).is_free_choice:
            return
        outcome = explore(net, m0, SMALL)
        if outcome.verdict != COMPLETE:
            pytest.skip("state space not explored")
        graph = outcome.graph
        if not is_live(net, m0, graph=graph).live:
            return
        assert home_markings(net, m0, graph=graph)
        assert all(len(r.blocking_markings) == 1 for r in blocking_map(net, m0, graph=graph))
        if home_clusters(net, m0, graph=graph):
            assert check_lucency(net, m0, graph=graph).lucent

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_lucent_nets_have_at_most_one_blocking_marking(self, seed):
        net, m0 = _random(seed)
        verdict = check_lucency(net, m0, SMALL)
        if not verdict.lucent:
            return
        graph = explore(net, m0, SMALL).require_graph()
        assert all(len(r.blocking_markings) <= 1 for r in blocking_map(net, m0, graph=graph))

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_component_tokens_are_constant(self, seed):
        net, m0 = _random(seed)
        outcome = explore(net, m0, SMALL)
        if outcome.verdict != COMPLETE:
            pytest.skip("state space not explored")
        for comp in p_components(net):
            places = comp.places(net)
            start = sum(m0.count(p) for p in places)
            assert all(sum(m.count(p) for p in places) == start for m in outcome.graph.markings)


class TestProjectionSimulation:
    @pytest.mark.parametrize("name", TABLE_NETS)
    def test_runs_project_onto_component_unions(self, corpus, name):
        net, m0 = corpus[name]
        graph = explore(net, m0).graph
        for chosen in _component_choices(p_components(net)):
            try:
                projection = q_projection(net, m0, chosen)
            except Disconnected:
                continue
            places = projection.projected_net.places
            for node, m in enumerate(graph.markings):
                run = project_sequence(graph.path_to(node), projection.transitions)
                reached = fire_sequence(projection.projected_net, projection.projected_marking, run)
                assert reached == project_marking(m, places)

    @pytest.mark.parametrize("name", TABLE_NETS)
    @settings(max_examples=40, deadline=None)
    @given(data=st.data())
    def test_random_runs_on_corpus(self, corpus, name, data):
        _replay_random_run(*corpus[name], data)

    @settings(max_examples=300, deadline=None)
    @given(seed=st.sampled_from(RANDOM_SEEDS), data=st.data())
    def test_random_runs_on_generated_nets(self, seed, data):
        _replay_random_run(*_random(seed), data)


class TestPathRealization:
    @pytest.mark.parametrize("name", ["fig1", "fig3", "fig4"])
    def test_paths_to_home_places_are_realizable(self, corpus, name):
        net, m0 = corpus[name]
        graph = explore(net, m0).graph
        homes = home_clusters(net, m0, graph=graph)
        for comp in p_components(net):
            inside = comp.nodes
            digraph = net.to_digraph().subgraph(inside)
            for home in homes:
                targets = home.places & inside
                if not targets:
                    continue
                (target,) = targets
                for m_start in graph.markings:
                    for start in sorted(m_start.support() & inside):
                        path = nx.shortest_path(digraph, start, target)
                        seq = realize_path(net, m0, m_start, comp, path, home, graph=graph)
                        assert seq is not None
                        assert fire_sequence(net, m_start, seq) == Marking(home.places)
                        assert list(project_sequence(seq, comp.transitions(net))) == path[1::2]


def _shared_enabling_pairs(net, markings):
    """All pairs of distinct markings enabling the same transitions, by direct comparison."""
    return sorted(
        tuple(sorted((a, b)))
        for a, b in combinations(markings, 2)
        if enabled_transitions(net, a) == enabled_transitions(net, b)
    )


class TestLucencyAgainstAllPairs:
    def _agrees(self, net, m0):
        outcome = explore(net, m0, SMALL)
        if outcome.verdict != COMPLETE:
            pytest.skip("state space not explored")
        pairs = _shared_enabling_pairs(net, outcome.graph.markings)
        verdict = check_lucency(net, m0, SMALL)
        assert verdict.lucent == (not pairs)
        if pairs:
            assert verdict.pair == pairs[0]
            assert verdict.shared == enabled_transitions(net, pairs[0][0])

    @pytest.mark.parametrize("name", TABLE_NETS)
    def test_corpus(self, corpus, name):
        self._agrees(*corpus[name])

    @pytest.mark.parametrize("seed", RANDOM_SEEDS)
    def test_random_nets(self, seed):
        self._agrees(*_random(seed))

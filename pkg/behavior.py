"""
Behavioral properties of marked nets: blocking markings, home clusters,
perpetuality, local safeness, lucency and realizable paths.

Everything here runs on an explicit reachability graph. Callers that need
several properties of the same marked net pass one graph around through the
`graph=` keyword to avoid re-exploring.
"""
import logging
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from errors import (
    PathLeavesComponent, PathNotElementary, StartUnmarked, UnknownCluster,
)
from petri_net import (
    Cluster, FiringSequence, Marking, PetriNet, cluster_marking, clusters, enabled_transitions,
    fire_sequence,
)
from state_space import (
    LIMIT, UNBOUNDED, ExplorationLimits, PumpWitness, ReachabilityGraph, explore,
    find_constrained_sequence, home_markings, is_live,
)
from structure import ComponentSet, P_KIND, p_components

logger = logging.getLogger(__name__)

LUCENT = "lucent"
NOT_LUCENT = "not_lucent"
NOT_LUCENT_UNBOUNDED = "not_lucent_unbounded"
INCONCLUSIVE = "inconclusive"


def _graph(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits],
           graph: Optional[ReachabilityGraph]) -> ReachabilityGraph:
    if graph is not None:
        return graph
    return explore(net, m0, limits).require_graph()


def _require_cluster(net: PetriNet, c: Cluster) -> Cluster:
    if c not in clusters(net):
        raise UnknownCluster(f"{c} is not a cluster of {net.name}")
    return c


@dataclass(frozen=True)
class BlockingReport:
    cluster: Cluster
    blocking_markings: tuple[Marking, ...]
    avoidance_sequences: tuple[Optional[FiringSequence], ...]

    @property
    def unique(self) -> bool:
        return len(self.blocking_markings) == 1

    def to_dict(self) -> dict:
        return {
            "cluster": str(self.cluster),
            "markings": [str(m) for m in self.blocking_markings],
            "avoidance": [list(s) if s is not None else None for s in self.avoidance_sequences],
        }


def blocking_markings(net: PetriNet, m0: Marking, c: Cluster, limits: Optional[ExplorationLimits] = None,
                      graph: Optional[ReachabilityGraph] = None) -> BlockingReport:
    """Reachable markings enabling exactly T(C), each with a sequence from m0 avoiding T(C)."""
    _require_cluster(net, c)
    graph = _graph(net, m0, limits, graph)
    target = frozenset(c.transitions)
    found = sorted(m for i, m in enumerate(graph.markings) if graph.enabled(i) == target)
    others = net.transitions - target
    sequences = tuple(
        find_constrained_sequence(net, graph.markings[graph.initial], m, others, graph=graph)
        for m in found
    )
    return BlockingReport(c, tuple(found), sequences)


def blocking_map(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
                 graph: Optional[ReachabilityGraph] = None) -> list[BlockingReport]:
    """Blocking markings of every cluster, in cluster order."""
    graph = _graph(net, m0, limits, graph)
    return [blocking_markings(net, m0, c, graph=graph) for c in clusters(net)]


def home_clusters(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
                  graph: Optional[ReachabilityGraph] = None) -> list[Cluster]:
    """Clusters whose marking M(C) is a home marking."""
    homes = set(home_markings(net, m0, limits, graph))
    return [c for c in clusters(net) if cluster_marking(c) in homes]


@dataclass(frozen=True)
class LocalSafety:
    safe: bool
    witness: Optional[tuple[ComponentSet, Marking, int]] = None
    vacuous: bool = False

    def __bool__(self) -> bool:
        return self.safe


def is_locally_safe(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
                    graph: Optional[ReachabilityGraph] = None,
                    components: Optional[list[ComponentSet]] = None) -> LocalSafety:
    """Every P-component carries at most one token in every reachable marking."""
    components = p_components(net) if components is None else components
    if not components:
        logger.warning("%s has no P-components; local safeness holds vacuously", net.name)
        return LocalSafety(True, vacuous=True)
    graph = _graph(net, m0, limits, graph)
    for comp in components:
        places = comp.places(net)
        for m in sorted(graph.markings):
            tokens = sum(m.count(p) for p in places)
            if tokens > 1:
                return LocalSafety(False, (comp, m, tokens))
    return LocalSafety(True)


@dataclass(frozen=True)
class PerpetualityReport:
    live: Optional[bool]
    bounded: bool
    home_clusters: tuple[Cluster, ...] = ()
    locally_safe: Optional[bool] = None
    local_witness: Optional[tuple[ComponentSet, Marking, int]] = None

    @property
    def perpetual(self) -> bool:
        return bool(self.live) and self.bounded and bool(self.home_clusters)

    def __bool__(self) -> bool:
        return self.perpetual


def is_perpetual(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None) -> PerpetualityReport:
    """
    Live, bounded and with a home cluster; local safety is reported alongside.

    On an unbounded net only the boundedness part is answered.
    """
    outcome = explore(net, m0, limits)
    if outcome.verdict == UNBOUNDED:
        return PerpetualityReport(live=None, bounded=False)
    graph = outcome.require_graph()
    local = is_locally_safe(net, m0, graph=graph)
    return PerpetualityReport(
        live=is_live(net, m0, graph=graph).live,
        bounded=True,
        home_clusters=tuple(home_clusters(net, m0, graph=graph)),
        locally_safe=local.safe,
        local_witness=local.witness,
    )


@dataclass(frozen=True)
class LucencyVerdict:
    verdict: str
    pair: Optional[tuple[Marking, Marking]] = None
    shared: Optional[frozenset[str]] = None
    witness: Optional[PumpWitness] = None
    states_seen: int = 0

    @property
    def lucent(self) -> Optional[bool]:
        if self.verdict == INCONCLUSIVE:
            return None
        return self.verdict == LUCENT

    def to_dict(self) -> dict:
        data = {"verdict": self.verdict}
        if self.pair is not None:
            data["pair"] = [str(self.pair[0]), str(self.pair[1])]
            data["shared"] = sorted(self.shared)
        if self.witness is not None:
            data["pump"] = self.witness.to_dict()
        return data


def _pump_pair(net: PetriNet, witness: PumpWitness, rounds: int) -> Optional[tuple[Marking, Marking]]:
    """Repeat the pump until two consecutive markings enable the same transitions."""
    current = witness.m1
    for _ in range(rounds):
        following = fire_sequence(net, current, witness.pump)
        if enabled_transitions(net, current) == enabled_transitions(net, following):
            return current, following
        current = following
    return None


def lucency_groups(graph: ReachabilityGraph) -> dict[frozenset[str], list[Marking]]:
    groups: dict[frozenset[str], list[Marking]] = {}
    for i, m in enumerate(graph.markings):
        groups.setdefault(graph.enabled(i), []).append(m)
    return {en: sorted(ms) for en, ms in groups.items()}


def check_lucency(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
                  graph: Optional[ReachabilityGraph] = None) -> LucencyVerdict:
    """
    Lucent when no two distinct reachable markings share an enabled set.

    On a failure the lexicographically first offending pair is reported.
    Unbounded nets are never lucent; their pump is repeated to exhibit a
    concrete pair when that settles within the state limit.
    """
    limits = limits or ExplorationLimits()
    if graph is None:
        outcome = explore(net, m0, limits)
        if outcome.verdict == LIMIT:
            return LucencyVerdict(INCONCLUSIVE, states_seen=outcome.states_seen)
        if outcome.verdict == UNBOUNDED:
            pair = _pump_pair(net, outcome.witness, limits.max_states)
            shared = enabled_transitions(net, pair[0]) if pair else None
            return LucencyVerdict(NOT_LUCENT_UNBOUNDED, pair, shared, outcome.witness, outcome.states_seen)
        graph = outcome.graph

    best = None
    for en, markings in lucency_groups(graph).items():
        if len(markings) < 2:
            continue
        candidate = (markings[0], markings[1], en)
        if best is None or (candidate[0], candidate[1]) < (best[0], best[1]):
            best = candidate
    if best is None:
        return LucencyVerdict(LUCENT, states_seen=len(graph))
    logger.debug("%s: %s and %s both enable %s", net.name, best[0], best[1], sorted(best[2]))
    return LucencyVerdict(NOT_LUCENT, (best[0], best[1]), best[2], states_seen=len(graph))


def _check_path(net: PetriNet, component: ComponentSet, path: Sequence[str], home: Cluster) -> None:
    if not path or len(path) % 2 == 0:
        raise PathNotElementary("a path runs from a place to a place")
    if len(set(path)) != len(path):
        raise PathNotElementary("path repeats a node")
    for i, x in enumerate(path):
        expected = net.places if i % 2 == 0 else net.transitions
        if x not in expected:
            raise PathNotElementary(f"'{x}' at position {i} breaks the place/transition alternation")
        if x not in component.nodes:
            raise PathLeavesComponent(f"'{x}' is not in component {component}")
    for a, b in zip(path, path[1:]):
        if (a, b) not in net.flow:
            raise PathNotElementary(f"no arc {a}->{b}")
    if path[-1] not in home.places:
        raise PathLeavesComponent(f"path must end at a place of {home}")


def realize_path(net: PetriNet, m0: Marking, m_start: Marking, component: ComponentSet,
                 path: Sequence[str], home: Cluster, limits: Optional[ExplorationLimits] = None,
                 graph: Optional[ReachabilityGraph] = None,
                 avoid_home_place: bool = False) -> Optional[FiringSequence]:
    """
    Find σ with m_start =σ=> M(home) whose projection onto the component's
    transitions is exactly the path's transitions.

    Args:
        net: The net
        m0: Initial marking used to build the reachability graph
        m_start: Reachable marking to start from; must mark the first place
        component: P-component containing the whole path
        path: Alternating place/transition list from a marked place to a place of home
        home: Target cluster
        avoid_home_place: home has a single place that no intermediate marking may mark

    Returns:
        The shortest such sequence, or None when there is none
    """
    if component.kind != P_KIND:
        raise PathLeavesComponent("paths are realized inside P-components")
    _require_cluster(net, home)
    _check_path(net, component, path, home)
    if not m_start.count(path[0]):
        raise StartUnmarked(f"{path[0]} is not marked in {m_start}")

    home_place = None
    if avoid_home_place:
        if len(home.places) != 1:
            raise ValueError("avoid_home_place needs a cluster with exactly one place")
        (home_place,) = home.places

    graph = _graph(net, m0, limits, graph)
    source = graph.node_of(m_start)
    goal_marking = cluster_marking(home)
    steps = list(path[1::2])
    tracked = component.transitions(net)

    def is_goal(node: int, k: int) -> bool:
        return k == len(steps) and graph.markings[node] == goal_marking

    start = (source, 0)
    if is_goal(*start):
        return ()
    back: dict[tuple[int, int], Optional[tuple[tuple[int, int], str]]] = {start: None}
    queue = deque([start])
    while queue:
        node, k = queue.popleft()
        for t, succ in graph.successors(node):
            if t in tracked:
                if k == len(steps) or t != steps[k]:
                    continue
                state = (succ, k + 1)
            else:
                state = (succ, k)
            if state in back:
                continue
            goal = is_goal(*state)
            if home_place is not None and not goal and graph.markings[succ].count(home_place):
                continue
            back[state] = ((node, k), t)
            if goal:
                trail = []
                while back[state] is not None:
                    state, label = back[state]
                    trail.append(label)
                return tuple(reversed(trail))
            queue.append(state)
    return None


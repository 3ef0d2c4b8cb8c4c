"""
Explicit reachability graphs and the graph-level analyses built on them.

Liveness and home markings are read off the bottom strongly connected
components of a finite reachability graph:

- every reachable marking reaches some bottom SCC, and everything reachable
  from a bottom SCC stays inside it;
- a marking M_H is reachable from every reachable marking iff there is exactly
  one bottom SCC and M_H lies in it;
- a transition t can be enabled again from every reachable marking iff every
  bottom SCC contains an edge labelled t, since the transitions enabled inside
  a bottom SCC are exactly its edge labels.
"""
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional

import networkx as nx

import config
from errors import LimitExceeded, UnboundedNet, UnknownMarking
from petri_net import FiringSequence, Marking, PetriNet, check_marking

logger = logging.getLogger(__name__)

COMPLETE = "complete"
UNBOUNDED = "unbounded"
LIMIT = "limit"


@dataclass(frozen=True)
class ExplorationLimits:
    max_states: int = config.MAX_STATES
    max_edges: int = config.MAX_EDGES

    def __post_init__(self):
        if self.max_states < 1 or self.max_edges < 1:
            raise ValueError("max_states and max_edges must be at least 1")


@dataclass(frozen=True)
class PumpWitness:
    """M0 =prefix=> M1 =pump=> M2 with M2 strictly larger than M1."""
    prefix: FiringSequence
    pump: FiringSequence
    m1: Marking
    m2: Marking

    def to_dict(self) -> dict:
        return {
            "prefix": list(self.prefix),
            "pump": list(self.pump),
            "m1": str(self.m1),
            "m2": str(self.m2),
        }


@dataclass(frozen=True, eq=False)
class ReachabilityGraph:
    """Reachable markings in BFS discovery order with labelled edges."""
    net: PetriNet
    markings: tuple[Marking, ...]
    edges: tuple[tuple[int, str, int], ...]
    initial: int = 0
    index: dict = field(init=False, repr=False)
    _succ: dict = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {m: i for i, m in enumerate(self.markings)})
        succ: dict[int, list[tuple[str, int]]] = {i: [] for i in range(len(self.markings))}
        for src, t, dst in self.edges:
            succ[src].append((t, dst))
        object.__setattr__(self, "_succ", succ)

    def __len__(self) -> int:
        return len(self.markings)

    def node_of(self, m: Marking) -> int:
        try:
            return self.index[m]
        except KeyError:
            raise UnknownMarking(f"marking {m} is not reachable") from None

    def successors(self, node: int) -> list[tuple[str, int]]:
        return self._succ[node]

    def enabled(self, node: int) -> frozenset[str]:
        return frozenset(t for t, _ in self._succ[node])

    def to_digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(len(self.markings)))
        for src, t, dst in self.edges:
            if graph.has_edge(src, dst):
                graph[src][dst]["labels"].add(t)
            else:
                graph.add_edge(src, dst, labels={t})
        return graph

    def bottom_sccs(self) -> list[list[int]]:
        """Bottom SCCs as sorted node lists, ordered by their smallest node."""
        graph = self.to_digraph()
        dag = nx.condensation(graph)
        bottoms = [
            sorted(dag.nodes[c]["members"])
            for c in dag.nodes
            if dag.out_degree(c) == 0
        ]
        return sorted(bottoms)

    def path_to(self, node: int) -> FiringSequence:
        """Shortest firing sequence from the initial marking."""
        return _bfs_sequence(self, self.initial, lambda n: n == node, None) or ()


@dataclass(frozen=True)
class ExplorationOutcome:
    verdict: str
    graph: Optional[ReachabilityGraph] = None
    witness: Optional[PumpWitness] = None
    states_seen: int = 0

    @property
    def complete(self) -> bool:
        return self.verdict == COMPLETE

    def require_graph(self) -> ReachabilityGraph:
        if self.verdict == UNBOUNDED:
            raise UnboundedNet("net is unbounded", witness=self.witness)
        if self.verdict == LIMIT:
            raise LimitExceeded(f"exploration stopped after {self.states_seen} states", self.states_seen)
        return self.graph


def _compile(net: PetriNet) -> list[tuple[str, tuple[str, ...], tuple[str, ...]]]:
    return [
        (t, tuple(sorted(net.pre(t))), tuple(sorted(net.post(t))))
        for t in net.sorted_transitions()
    ]


def _successors(compiled, m: Marking) -> list[tuple[Marking, str]]:
    result = []
    for t, pre, post in compiled:
        if all(m.count(p) for p in pre):
            counts = dict(m.items())
            for p in pre:
                counts[p] -= 1
            for p in post:
                counts[p] = counts.get(p, 0) + 1
            result.append((Marking(counts), t))
    result.sort(key=lambda pair: (pair[0].sort_key, pair[1]))
    return result


def explore(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None) -> ExplorationOutcome:
    """
    Breadth-first construction of R(N, m0).

    Stops with an unbounded verdict as soon as a newly found marking
    strictly dominates one of its ancestors on the BFS tree.
    """
    limits = limits or ExplorationLimits()
    check_marking(net, m0)
    compiled = _compile(net)

    markings: list[Marking] = [m0]
    index = {m0: 0}
    parent: list[Optional[tuple[int, str]]] = [None]
    edges: list[tuple[int, str, int]] = []
    queue = deque([0])

    while queue:
        node = queue.popleft()
        for succ, t in _successors(compiled, markings[node]):
            target = index.get(succ)
            if target is None:
                witness = _dominated_ancestor(markings, parent, node, t, succ)
                if witness is not None:
                    logger.debug("unbounded: %s dominates %s", witness.m2, witness.m1)
                    return ExplorationOutcome(UNBOUNDED, witness=witness, states_seen=len(markings))
                if len(markings) >= limits.max_states:
                    logger.debug("state limit %d reached", limits.max_states)
                    return ExplorationOutcome(LIMIT, states_seen=len(markings))
                target = len(markings)
                markings.append(succ)
                index[succ] = target
                parent.append((node, t))
                queue.append(target)
            edges.append((node, t, target))
            if len(edges) > limits.max_edges:
                return ExplorationOutcome(LIMIT, states_seen=len(markings))

    logger.debug("explored %s: %d markings, %d edges", net.name, len(markings), len(edges))
    graph = ReachabilityGraph(net, tuple(markings), tuple(edges))
    return ExplorationOutcome(COMPLETE, graph=graph, states_seen=len(markings))


def _tree_path(parent, node: int) -> list[tuple[int, str]]:
    """(node, transition-into-node) pairs from the root down to node."""
    path = []
    while parent[node] is not None:
        prev, t = parent[node]
        path.append((node, t))
        node = prev
    path.append((node, None))
    path.reverse()
    return path


def _dominated_ancestor(markings, parent, node: int, t: str, succ: Marking) -> Optional[PumpWitness]:
    path = _tree_path(parent, node)
    labels = [label for _, label in path[1:]] + [t]
    for depth, (ancestor, _) in enumerate(path):
        if succ.strictly_dominates(markings[ancestor]):
            return PumpWitness(
                prefix=tuple(labels[:depth]),
                pump=tuple(labels[depth:]),
                m1=markings[ancestor],
                m2=succ,
            )
    return None


def _graph_for(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits],
               graph: Optional[ReachabilityGraph]) -> ReachabilityGraph:
    if graph is not None:
        return graph
    return explore(net, m0, limits).require_graph()


def home_markings(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
                  graph: Optional[ReachabilityGraph] = None) -> list[Marking]:
    """Markings of the unique bottom SCC, or [] when there are several."""
    graph = _graph_for(net, m0, limits, graph)
    bottoms = graph.bottom_sccs()
    if len(bottoms) != 1:
        return []
    return sorted(graph.markings[i] for i in bottoms[0])


def is_cyclic(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
              graph: Optional[ReachabilityGraph] = None) -> bool:
    """m0 is itself a home marking."""
    return m0 in home_markings(net, m0, limits, graph)


@dataclass(frozen=True)
class LivenessVerdict:
    live: bool
    witness: Optional[tuple[Marking, str]] = None

    def __bool__(self) -> bool:
        return self.live


def is_live(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
            graph: Optional[ReachabilityGraph] = None) -> LivenessVerdict:
    """
    Live when every transition labels an edge inside every bottom SCC.

    The witness pairs the smallest marking of the first failing bottom SCC
    with a transition that never fires there.
    """
    graph = _graph_for(net, m0, limits, graph)
    everything = set(net.transitions)
    for bottom in graph.bottom_sccs():
        members = set(bottom)
        labels = {t for src, t, dst in graph.edges if src in members}
        missing = sorted(everything - labels)
        if missing:
            marking = min(graph.markings[i] for i in bottom)
            return LivenessVerdict(False, (marking, missing[0]))
    return LivenessVerdict(True)


def dead_transitions(graph: ReachabilityGraph) -> list[str]:
    """Transitions that never fire in the graph, sorted."""
    fired = {t for _, t, _ in graph.edges}
    return sorted(graph.net.transitions - fired)


def deadlocks(graph: ReachabilityGraph) -> list[Marking]:
    """Reachable markings with no successor."""
    return sorted(m for i, m in enumerate(graph.markings) if not graph.successors(i))


@dataclass(frozen=True)
class BoundednessVerdict:
    bounded: bool
    bound: Optional[int] = None
    per_place: dict = field(default_factory=dict)
    witness: Optional[PumpWitness] = None

    @property
    def safe(self) -> bool:
        return self.bounded and self.bound <= 1

    def __bool__(self) -> bool:
        return self.bounded


def boundedness(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
                outcome: Optional[ExplorationOutcome] = None) -> BoundednessVerdict:
    """Bounded(k) with k the largest count of any place, or Unbounded with a pump witness."""
    outcome = outcome or explore(net, m0, limits)
    if outcome.verdict == UNBOUNDED:
        return BoundednessVerdict(False, witness=outcome.witness)
    graph = outcome.require_graph()
    per_place = {p: 0 for p in net.sorted_places()}
    for m in graph.markings:
        for p, n in m.items():
            if n > per_place[p]:
                per_place[p] = n
    bound = max(per_place.values()) if per_place else 0
    return BoundednessVerdict(True, bound, per_place)


def is_k_bounded(net: PetriNet, m0: Marking, k: int, limits: Optional[ExplorationLimits] = None) -> bool:
    """No reachable marking puts more than k tokens on a place."""
    verdict = boundedness(net, m0, limits)
    return verdict.bounded and verdict.bound <= k


def _bfs_sequence(graph: ReachabilityGraph, start: int, goal, allowed: Optional[set]) -> Optional[FiringSequence]:
    if goal(start):
        return ()
    back: dict[int, tuple[int, str]] = {start: None}
    queue = deque([start])
    while queue:
        node = queue.popleft()
        for t, succ in graph.successors(node):
            if allowed is not None and t not in allowed:
                continue
            if succ in back:
                continue
            back[succ] = (node, t)
            if goal(succ):
                steps = []
                while back[succ] is not None:
                    succ, label = back[succ]
                    steps.append(label)
                return tuple(reversed(steps))
            queue.append(succ)
    return None


def find_constrained_sequence(net: PetriNet, m_from: Marking, m_to: Marking, allowed: Iterable[str],
                              limits: Optional[ExplorationLimits] = None,
                              graph: Optional[ReachabilityGraph] = None) -> Optional[FiringSequence]:
    """Shortest sequence from m_from to m_to firing only allowed transitions; None if there is none."""
    graph = _graph_for(net, m_from, limits, graph)
    source = graph.node_of(m_from)
    target = graph.node_of(m_to)
    return _bfs_sequence(graph, source, lambda n: n == target, set(allowed))

"""
Core place/transition net model.
Nets are immutable; markings are canonical multisets of places. All
functions here are pure and safe to share between threads.
"""
import logging
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from typing import Optional, Union

import networkx as nx

from errors import (
    DanglingArcEndpoint, Disconnected, DuplicateId, EmptyNodeSet, EmptyPlaces,
    EmptyTransitions, InvalidIdentifier, MarkingPlaceUnknown, NotEnabled,
    NotEnabledAtStep, PlaceToPlaceArc, UnknownNode, UnknownTransition,
)

logger = logging.getLogger(__name__)

ID_PATTERN = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")

PLACE = "place"
TRANSITION = "transition"

PRE = "pre"
POST = "post"

NodeId = str
Arc = tuple[NodeId, NodeId]
FiringSequence = tuple[NodeId, ...]


class Marking(Mapping):
    """
    Multiset of places. Zero counts are never stored, so two markings are
    equal exactly when their stored items are equal.

    Markings are totally ordered by their sorted (place, count) items.
    """
    __slots__ = ("_counts", "_key", "_hash")

    def __init__(self, counts: Union[Mapping[str, int], Iterable[str], None] = None):
        tally: dict[str, int] = {}
        if counts is None:
            pass
        elif isinstance(counts, Mapping):
            for place, n in counts.items():
                if n < 0:
                    raise ValueError(f"negative token count for {place}")
                if n:
                    tally[place] = tally.get(place, 0) + int(n)
        else:
            for place in counts:
                tally[place] = tally.get(place, 0) + 1
        self._key = tuple(sorted(tally.items()))
        self._counts = dict(self._key)
        self._hash = hash(self._key)

    # Mapping protocol; absent places read as 0 through count()
    def __getitem__(self, place: str) -> int:
        return self._counts[place]

    def __iter__(self) -> Iterator[str]:
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if isinstance(other, Marking):
            return self._key == other._key
        return NotImplemented

    def __lt__(self, other: "Marking") -> bool:
        return self._key < other._key

    def __le__(self, other: "Marking") -> bool:
        return self._key <= other._key

    @property
    def sort_key(self) -> tuple:
        return self._key

    def count(self, place: str) -> int:
        return self._counts.get(place, 0)

    def total(self) -> int:
        return sum(self._counts.values())

    def support(self) -> frozenset[str]:
        return frozenset(self._counts)

    def __add__(self, other: "Marking") -> "Marking":
        merged = dict(self._counts)
        for place, n in other.items():
            merged[place] = merged.get(place, 0) + n
        return Marking(merged)

    def __sub__(self, other: "Marking") -> "Marking":
        result = dict(self._counts)
        for place, n in other.items():
            left = result.get(place, 0) - n
            if left < 0:
                raise ValueError(f"cannot remove {n} token(s) from {place}")
            result[place] = left
        return Marking(result)

    def covers(self, other: "Marking") -> bool:
        """True when self >= other place by place."""
        return all(self.count(p) >= n for p, n in other.items())

    def strictly_dominates(self, other: "Marking") -> bool:
        return self != other and self.covers(other)

    def to_list(self) -> list[str]:
        """Places with repetition, in marking order."""
        return [p for p, n in self._key for _ in range(n)]

    def __str__(self) -> str:
        return "[" + ",".join(self.to_list()) + "]"

    def __repr__(self) -> str:
        return f"Marking({str(self)})"


EMPTY_MARKING = Marking()


@dataclass(frozen=True)
class RawNet:
    """Unvalidated net description as produced by the parsers."""
    places: list[str]
    transitions: list[str]
    arcs: list[Arc]
    initial: dict[str, int] = field(default_factory=dict)
    name: str = "net"


@dataclass(frozen=True, eq=False)
class PetriNet:
    """Validated net (P, T, F). Build through validate_net()."""
    name: str
    places: frozenset[str]
    transitions: frozenset[str]
    flow: frozenset[Arc]
    _pre: dict = field(init=False, repr=False, compare=False)
    _post: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pre: dict[str, set] = {x: set() for x in self.places | self.transitions}
        post: dict[str, set] = {x: set() for x in self.places | self.transitions}
        for src, dst in self.flow:
            post[src].add(dst)
            pre[dst].add(src)
        object.__setattr__(self, "_pre", {x: frozenset(v) for x, v in pre.items()})
        object.__setattr__(self, "_post", {x: frozenset(v) for x, v in post.items()})

    def __eq__(self, other) -> bool:
        if not isinstance(other, PetriNet):
            return NotImplemented
        return (self.places, self.transitions, self.flow) == (other.places, other.transitions, other.flow)

    def __hash__(self) -> int:
        return hash((self.places, self.transitions, self.flow))

    @property
    def nodes(self) -> frozenset[str]:
        return self.places | self.transitions

    def kind(self, x: str) -> str:
        if x in self.places:
            return PLACE
        if x in self.transitions:
            return TRANSITION
        raise UnknownNode(f"unknown node '{x}'")

    def pre(self, x: str) -> frozenset[str]:
        try:
            return self._pre[x]
        except KeyError:
            raise UnknownNode(f"unknown node '{x}'") from None

    def post(self, x: str) -> frozenset[str]:
        try:
            return self._post[x]
        except KeyError:
            raise UnknownNode(f"unknown node '{x}'") from None

    def sorted_places(self) -> list[str]:
        return sorted(self.places)

    def sorted_transitions(self) -> list[str]:
        return sorted(self.transitions)

    def to_digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.flow)
        return graph

    def with_name(self, name: str) -> "PetriNet":
        return PetriNet(name, self.places, self.transitions, self.flow)

    def __str__(self) -> str:
        return f"{self.name} ({len(self.places)} places, {len(self.transitions)} transitions)"


def _check_identifiers(ids: Iterable[str]) -> None:
    for x in ids:
        if not isinstance(x, str) or not ID_PATTERN.match(x):
            raise InvalidIdentifier(f"invalid identifier '{x}'")


def validate_net(raw: RawNet) -> PetriNet:
    """
    Check a raw description against the net definition and build a PetriNet.

    Raises one of EmptyPlaces, EmptyTransitions, Disconnected,
    DanglingArcEndpoint, DuplicateId, PlaceToPlaceArc or InvalidIdentifier.
    """
    _check_identifiers(raw.places)
    _check_identifiers(raw.transitions)

    seen: set[str] = set()
    for x in list(raw.places) + list(raw.transitions):
        if x in seen:
            raise DuplicateId(f"identifier '{x}' declared more than once")
        seen.add(x)

    places = frozenset(raw.places)
    transitions = frozenset(raw.transitions)
    if not places:
        raise EmptyPlaces("net has no places")
    if not transitions:
        raise EmptyTransitions("net has no transitions")

    for src, dst in raw.arcs:
        for end in (src, dst):
            if end not in seen:
                raise DanglingArcEndpoint(f"arc {src}->{dst} references unknown node '{end}'")
        if (src in places) == (dst in places):
            raise PlaceToPlaceArc(f"arc {src}->{dst} must join a place and a transition")

    flow = frozenset((src, dst) for src, dst in raw.arcs)
    net = PetriNet(raw.name, places, transitions, flow)

    undirected = net.to_digraph().to_undirected()
    if not nx.is_connected(undirected):
        pieces = nx.number_connected_components(undirected)
        raise Disconnected(f"net '{raw.name}' splits into {pieces} unconnected parts")

    logger.debug("validated %s", net)
    return net


def build_net(places: Iterable[str], transitions: Iterable[str], arcs: Iterable[Arc],
              name: str = "net") -> PetriNet:
    """Shorthand for validate_net on literal node and arc lists."""
    return validate_net(RawNet(list(places), list(transitions), list(arcs), name=name))


def check_marking(net: PetriNet, m: Marking) -> Marking:
    """Return m unchanged; raises MarkingPlaceUnknown when it marks a place outside the net."""
    for place in m:
        if place not in net.places:
            raise MarkingPlaceUnknown(f"marking refers to unknown place '{place}'")
    return m


def adjacency(net: PetriNet, x: Union[str, Iterable[str]], direction: str) -> frozenset[str]:
    """Input (pre) or output (post) nodes of a node, or the union over a node set."""
    if direction not in (PRE, POST):
        raise ValueError(f"direction must be '{PRE}' or '{POST}'")
    nodes = [x] if isinstance(x, str) else list(x)
    lookup = net.pre if direction == PRE else net.post
    result: set[str] = set()
    for node in nodes:
        result |= lookup(node)
    return frozenset(result)


def enabled_transitions(net: PetriNet, m: Marking) -> frozenset[str]:
    """Transitions whose every input place is marked in m."""
    check_marking(net, m)
    return frozenset(
        t for t in net.transitions
        if all(m.count(p) >= 1 for p in net.pre(t))
    )


def is_enabled(net: PetriNet, m: Marking, t: str) -> bool:
    if t not in net.transitions:
        raise UnknownTransition(f"unknown transition '{t}'")
    return all(m.count(p) >= 1 for p in net.pre(t))


def fire(net: PetriNet, m: Marking, t: str) -> Marking:
    """
    Fire t once.

    Args:
        net: The net
        m: Marking that must enable t
        t: Transition to fire

    Returns:
        m minus the preset of t plus its postset

    Raises:
        NotEnabled: t is not enabled in m
    """
    if not is_enabled(net, m, t):
        raise NotEnabled(f"transition {t} is not enabled in {m}")
    counts = dict(m.items())
    for p in net.pre(t):
        counts[p] -= 1
    for p in net.post(t):
        counts[p] = counts.get(p, 0) + 1
    return Marking(counts)


def fire_sequence(net: PetriNet, m: Marking, sequence: Iterable[str],
                  record: bool = False) -> Union[Marking, tuple[Marking, list[Marking]]]:
    """
    Fire a sequence step by step.

    Args:
        net: The net
        m: Starting marking
        sequence: Transition ids in firing order
        record: Also return the intermediate markings, starting with m

    Returns:
        The final marking, or (final, trace) when record is set
    """
    trace = [m]
    current = m
    for i, t in enumerate(sequence):
        if not is_enabled(net, current, t):
            raise NotEnabledAtStep(i, t)
        current = fire(net, current, t)
        trace.append(current)
    if record:
        return current, trace
    return current


@dataclass(frozen=True)
class Cluster:
    """A cluster of a net: closed under place postsets and transition presets."""
    nodes: frozenset[str]
    places: frozenset[str]
    transitions: frozenset[str]

    @property
    def sort_key(self) -> tuple:
        return (sorted(self.places), sorted(self.transitions))

    def marking(self) -> Marking:
        return cluster_marking(self)

    def __contains__(self, x: str) -> bool:
        return x in self.nodes

    def __str__(self) -> str:
        return "{" + ",".join(sorted(self.places) + sorted(self.transitions)) + "}"


def clusters(net: PetriNet) -> list[Cluster]:
    """
    Partition P ∪ T into clusters.

    Clusters are the connected components of the graph that keeps only the
    place-to-transition arcs, so transitions with an empty preset stand alone.
    """
    graph = nx.Graph()
    graph.add_nodes_from(net.nodes)
    graph.add_edges_from((src, dst) for src, dst in net.flow if src in net.places)
    found = []
    for component in nx.connected_components(graph):
        nodes = frozenset(component)
        found.append(Cluster(nodes, nodes & net.places, nodes & net.transitions))
    return sorted(found, key=lambda c: c.sort_key)


def cluster_of(net: PetriNet, x: str) -> Cluster:
    """The unique cluster containing node x."""
    net.kind(x)
    for c in clusters(net):
        if x in c.nodes:
            return c
    raise UnknownNode(f"unknown node '{x}'")


def cluster_marking(c: Cluster) -> Marking:
    # a transition with an empty preset forms a place-free cluster {t}; its marking is []
    return Marking(c.places)


def project_marking(m: Marking, places: Iterable[str]) -> Marking:
    """Restrict m to the given places."""
    keep = set(places)
    return Marking({p: n for p, n in m.items() if p in keep})


def project_sequence(sequence: Iterable[str], alphabet: Iterable[str]) -> FiringSequence:
    """Drop every transition outside the alphabet, keeping order."""
    keep = set(alphabet)
    return tuple(t for t in sequence if t in keep)


@dataclass(frozen=True)
class NetFragment:
    """Subnet (P∩X, T∩X, F∩(X×X)); not required to be connected."""
    places: frozenset[str]
    transitions: frozenset[str]
    flow: frozenset[Arc]

    @property
    def nodes(self) -> frozenset[str]:
        return self.places | self.transitions

    def to_digraph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        graph.add_edges_from(self.flow)
        return graph

    def to_net(self, name: str = "subnet") -> PetriNet:
        return validate_net(RawNet(sorted(self.places), sorted(self.transitions),
                                   sorted(self.flow), name=name))


def subnet(net: PetriNet, nodes: Iterable[str]) -> NetFragment:
    """The subnet generated by a nonempty node set."""
    keep = frozenset(nodes)
    if not keep:
        raise EmptyNodeSet("subnet needs at least one node")
    for x in keep:
        net.kind(x)
    return NetFragment(
        keep & net.places,
        keep & net.transitions,
        frozenset((a, b) for a, b in net.flow if a in keep and b in keep),
    )


def format_set(nodes: Iterable[str]) -> str:
    return "{" + ",".join(sorted(nodes)) + "}"


def parse_marking_text(text: str) -> Marking:
    """Read '[p1,p2,p2]' or 'p1,p2' notation."""
    body = text.strip().strip("[]").strip()
    if not body:
        return EMPTY_MARKING
    return Marking([part.strip() for part in body.split(",") if part.strip()])


def sequence_text(sequence: Optional[Iterable[str]]) -> str:
    if sequence is None:
        return "none"
    return "<" + ",".join(sequence) + ">"

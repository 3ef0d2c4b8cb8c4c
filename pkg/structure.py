"""
Structural analyses: net classes, siphons and traps, P-/T-components,
partial P-cover projections and workflow nets.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

import networkx as nx

import config
from errors import (
    CapExceeded, ComponentLimitExceeded, EmptyCover, IdCollisionOnTStar,
    NotAComponent, NotAWorkflowNet, UnknownPlace,
)
from petri_net import Marking, NetFragment, PetriNet, RawNet, project_marking, subnet, validate_net
from state_space import (
    BoundednessVerdict, ExplorationLimits, LivenessVerdict, boundedness, explore, is_live,
)

logger = logging.getLogger(__name__)

SIPHON = "siphon"
TRAP = "trap"

P_KIND = "P"
T_KIND = "T"


@dataclass(frozen=True)
class NetClassification:
    is_p_net: bool
    is_t_net: bool
    is_free_choice: bool
    is_free_choice_place_form: bool
    is_strongly_connected: bool
    workflow: Optional[tuple[str, str]] = None

    def to_dict(self) -> dict:
        return {
            "p_net": self.is_p_net,
            "t_net": self.is_t_net,
            "free_choice": self.is_free_choice,
            "strongly_connected": self.is_strongly_connected,
            "workflow": list(self.workflow) if self.workflow else None,
        }


def is_free_choice(net: PetriNet) -> bool:
    """Any two transitions have equal or disjoint presets."""
    presets = [net.pre(t) for t in net.sorted_transitions()]
    return all(a == b or not (a & b) for a, b in combinations(presets, 2))


def is_free_choice_place_form(net: PetriNet) -> bool:
    """Any two places have equal or disjoint postsets."""
    postsets = [net.post(p) for p in net.sorted_places()]
    return all(a == b or not (a & b) for a, b in combinations(postsets, 2))


def workflow_ends(net: PetriNet) -> Optional[tuple[str, str]]:
    """(i, o) when the net is a workflow net, otherwise None."""
    sources = [p for p in net.sorted_places() if not net.pre(p)]
    sinks = [p for p in net.sorted_places() if not net.post(p)]
    if len(sources) != 1 or len(sinks) != 1:
        return None
    i, o = sources[0], sinks[0]
    graph = net.to_digraph()
    from_i = nx.descendants(graph, i) | {i}
    to_o = nx.ancestors(graph, o) | {o}
    if from_i != net.nodes or to_o != net.nodes:
        return None
    return i, o


def classify(net: PetriNet) -> NetClassification:
    """
    Structural classes of the net.

    Both free-choice forms are computed; a disagreement is logged as an error
    and the transition form is reported.
    """
    transition_form = is_free_choice(net)
    place_form = is_free_choice_place_form(net)
    if transition_form != place_form:
        # both forms state the same condition
        logger.error("free-choice forms disagree on %s", net.name)
    return NetClassification(
        is_p_net=all(len(net.pre(t)) == 1 and len(net.post(t)) == 1 for t in net.transitions),
        is_t_net=all(len(net.pre(p)) == 1 and len(net.post(p)) == 1 for p in net.places),
        is_free_choice=transition_form,
        is_free_choice_place_form=place_form,
        is_strongly_connected=nx.is_strongly_connected(net.to_digraph()),
        workflow=workflow_ends(net),
    )


@dataclass(frozen=True)
class SetPredicate:
    holds: bool
    proper: bool

    def __bool__(self) -> bool:
        return self.holds


def _set_pre(net: PetriNet, nodes: Iterable[str]) -> set[str]:
    result: set[str] = set()
    for x in nodes:
        result |= net.pre(x)
    return result


def _set_post(net: PetriNet, nodes: Iterable[str]) -> set[str]:
    result: set[str] = set()
    for x in nodes:
        result |= net.post(x)
    return result


def siphon_trap_predicate(net: PetriNet, places: Iterable[str], kind: str) -> SetPredicate:
    """Siphon: pre(R) ⊆ post(R). Trap: post(R) ⊆ pre(R)."""
    chosen = set(places)
    for p in chosen:
        if p not in net.places:
            raise UnknownPlace(f"unknown place '{p}'")
    pre, post = _set_pre(net, chosen), _set_post(net, chosen)
    if kind == SIPHON:
        holds = pre <= post
    elif kind == TRAP:
        holds = post <= pre
    else:
        raise ValueError(f"kind must be '{SIPHON}' or '{TRAP}'")
    return SetPredicate(holds, bool(chosen))


def maximal_trap(net: PetriNet, places: Iterable[str]) -> frozenset[str]:
    """Largest trap contained in the given place set."""
    current = set(places)
    changed = True
    while changed:
        changed = False
        for p in sorted(current):
            if any(not (net.post(t) & current) for t in net.post(p)):
                current.discard(p)
                changed = True
    return frozenset(current)


@dataclass(frozen=True)
class CommonerVerdict:
    holds: bool
    siphon: Optional[frozenset[str]] = None

    def __bool__(self) -> bool:
        return self.holds


def _siphons(net: PetriNet) -> Iterable[frozenset[str]]:
    """Nonempty siphons by include/exclude search over sorted places."""
    order = net.sorted_places()
    chosen: set[str] = set()
    excluded: set[str] = set()

    def feasible() -> bool:
        # a transition feeding the set needs some input place that may still join
        for t in _set_pre(net, chosen):
            if net.pre(t) <= excluded:
                return False
        return True

    def search(i: int):
        if not feasible():
            return
        if i == len(order):
            if chosen and _set_pre(net, chosen) <= _set_post(net, chosen):
                yield frozenset(chosen)
            return
        p = order[i]
        chosen.add(p)
        yield from search(i + 1)
        chosen.discard(p)
        excluded.add(p)
        yield from search(i + 1)
        excluded.discard(p)

    yield from search(0)


def commoner_check(net: PetriNet, m0: Marking, size_cap: int = config.COMMONER_SIZE_CAP) -> CommonerVerdict:
    """Every proper siphon contains a trap marked under m0."""
    if len(net.places) > size_cap:
        raise CapExceeded(f"{len(net.places)} places exceed the siphon search cap of {size_cap}")
    for siphon in _siphons(net):
        trap = maximal_trap(net, siphon)
        if not any(m0.count(p) for p in trap):
            return CommonerVerdict(False, siphon)
    return CommonerVerdict(True)


@dataclass(frozen=True)
class ComponentSet:
    kind: str
    nodes: frozenset[str]

    def places(self, net: PetriNet) -> frozenset[str]:
        return self.nodes & net.places

    def transitions(self, net: PetriNet) -> frozenset[str]:
        return self.nodes & net.transitions

    @property
    def sort_key(self) -> tuple:
        return tuple(sorted(self.nodes))

    def __str__(self) -> str:
        return "{" + ",".join(sorted(self.nodes)) + "}"


def _strongly_connected(fragment: NetFragment) -> bool:
    return nx.is_strongly_connected(fragment.to_digraph())


def _enumerate_components(net: PetriNet, seeds: list[str], kind: str, limit: int) -> list[ComponentSet]:
    """
    Selected node sets S (places for P, transitions for T) such that every
    connector adjacent to S has exactly one predecessor and one successor in
    S, and S plus its connectors is strongly connected.
    """
    rank = {x: i for i, x in enumerate(seeds)}
    found: set[frozenset[str]] = set()

    def connectors(selected: set[str]) -> set[str]:
        return _set_pre(net, selected) | _set_post(net, selected)

    def search(selected: set[str], excluded: set[str]):
        pending = None
        for c in sorted(connectors(selected)):
            ins = net.pre(c) & selected
            outs = net.post(c) & selected
            if len(ins) > 1 or len(outs) > 1:
                return
            if not ins:
                pending = pending or (c, net.pre(c))
            elif not outs:
                pending = pending or (c, net.post(c))
        if pending is None:
            nodes = frozenset(selected | connectors(selected))
            if _strongly_connected(subnet(net, nodes)):
                found.add(nodes)
                if len(found) > limit:
                    raise ComponentLimitExceeded(f"more than {limit} {kind}-components")
            return
        _, candidates = pending
        options = sorted(x for x in candidates if x not in excluded)
        for i, x in enumerate(options):
            # earlier options stay out so branches never overlap
            search(selected | {x}, excluded | set(options[:i]))

    for seed in seeds:
        smaller = {x for x in seeds if rank[x] < rank[seed]}
        search({seed}, smaller)

    ordered = sorted(found, key=lambda nodes: tuple(sorted(nodes)))
    logger.debug("%s: %d %s-components", net.name, len(ordered), kind)
    return [ComponentSet(kind, nodes) for nodes in ordered]


def p_components(net: PetriNet, limit: int = config.COMPONENT_LIMIT) -> list[ComponentSet]:
    """
    All P-components, sorted by node list.

    Args:
        net: The net
        limit: Give up with ComponentLimitExceeded past this many components

    Returns:
        Distinct P-components; empty when the net has none
    """
    return _enumerate_components(net, net.sorted_places(), P_KIND, limit)


def t_components(net: PetriNet, limit: int = config.COMPONENT_LIMIT) -> list[ComponentSet]:
    """All T-components, sorted by node list; see p_components."""
    return _enumerate_components(net, net.sorted_transitions(), T_KIND, limit)


def _is_component(net: PetriNet, nodes: frozenset[str], kind: str) -> bool:
    selected = nodes & (net.places if kind == P_KIND else net.transitions)
    connectors = nodes - selected
    if not selected or not nodes <= net.nodes:
        return False
    adjacent = _set_pre(net, selected) | _set_post(net, selected)
    if adjacent != connectors:
        return False
    for c in connectors:
        if len(net.pre(c) & selected) != 1 or len(net.post(c) & selected) != 1:
            return False
    return _strongly_connected(subnet(net, nodes))


def is_p_component(net: PetriNet, nodes: Iterable[str]) -> bool:
    return _is_component(net, frozenset(nodes), P_KIND)


def is_t_component(net: PetriNet, nodes: Iterable[str]) -> bool:
    return _is_component(net, frozenset(nodes), T_KIND)


def has_cover(net: PetriNet, components: list[ComponentSet]) -> bool:
    """Every node of the net lies in some component."""
    covered: set[str] = set()
    for comp in components:
        covered |= comp.nodes
    return covered == set(net.nodes)


@dataclass(frozen=True)
class QProjection:
    source: PetriNet
    chosen: tuple[ComponentSet, ...]
    projected_net: PetriNet
    projected_marking: Marking

    @property
    def transitions(self) -> frozenset[str]:
        return self.projected_net.transitions


def q_projection(net: PetriNet, m: Marking, chosen: Iterable[ComponentSet]) -> QProjection:
    """Subnet generated by the union of chosen P-components, with the projected marking."""
    chosen = tuple(sorted(chosen, key=lambda c: c.sort_key))
    if not chosen:
        raise EmptyCover("Q-projection needs at least one P-component")
    union: set[str] = set()
    for comp in chosen:
        if comp.kind != P_KIND or not is_p_component(net, comp.nodes):
            raise NotAComponent(f"{comp} is not a P-component of {net.name}")
        union |= comp.nodes
    projected = subnet(net, union).to_net(name=f"{net.name}_projection")
    return QProjection(net, chosen, projected, project_marking(m, projected.places))


def short_circuit(net: PetriNet) -> PetriNet:
    """Add t_star from the sink back to the source of a workflow net."""
    ends = workflow_ends(net)
    if ends is None:
        raise NotAWorkflowNet(f"{net.name} is not a workflow net")
    if config.T_STAR in net.nodes:
        raise IdCollisionOnTStar(f"{net.name} already has a node named {config.T_STAR}")
    i, o = ends
    raw = RawNet(
        places=net.sorted_places(),
        transitions=net.sorted_transitions() + [config.T_STAR],
        arcs=sorted(net.flow) + [(o, config.T_STAR), (config.T_STAR, i)],
        name=net.name,
    )
    return validate_net(raw)


@dataclass(frozen=True)
class SoundnessVerdict:
    sound: bool
    liveness: Optional[LivenessVerdict] = None
    bounds: Optional[BoundednessVerdict] = None

    @property
    def diagnosis(self) -> str:
        if self.sound:
            return "sound"
        if self.bounds is not None and not self.bounds.bounded:
            w = self.bounds.witness
            return f"unbounded: {w.m2} strictly covers {w.m1}"
        marking, t = self.liveness.witness
        return f"not live: {t} can never fire again from {marking}"

    def __bool__(self) -> bool:
        return self.sound


def check_soundness(net: PetriNet, limits: Optional[ExplorationLimits] = None) -> SoundnessVerdict:
    """Sound iff the short-circuited net is live and bounded from [i]."""
    ends = workflow_ends(net)
    if ends is None:
        raise NotAWorkflowNet(f"{net.name} is not a workflow net")
    closed = short_circuit(net)
    start = Marking([ends[0]])
    outcome = explore(closed, start, limits)
    bounds = boundedness(closed, start, outcome=outcome)
    if not bounds.bounded:
        return SoundnessVerdict(False, bounds=bounds)
    liveness = is_live(closed, start, graph=outcome.graph)
    return SoundnessVerdict(liveness.live, liveness, bounds)


def component_token_sums(net: PetriNet, comp: ComponentSet, markings: Iterable[Marking]) -> list[int]:
    places = comp.places(net)
    return [sum(m.count(p) for p in places) for m in markings]


"""
Full analysis of one marked net, rendered as an overview-table row.
"""
import json
import logging
from dataclasses import dataclass, field
from typing import Optional

import config
from behavior import INCONCLUSIVE, blocking_map, check_lucency, home_clusters, is_locally_safe
from errors import ComponentLimitExceeded, LimitExceeded
from petri_net import Marking, PetriNet, clusters, format_set, sequence_text
from state_space import (
    COMPLETE, UNBOUNDED, ExplorationLimits, boundedness, dead_transitions, deadlocks,
    explore, home_markings, is_live,
)
from structure import check_soundness, classify, has_cover, p_components, t_components

logger = logging.getLogger(__name__)

# Column keys of the overview table, in display order
TABLE_COLUMNS = [
    "FreC", "Live", "Boun", "Safe", "LocS", "PC", "HClu", "Perp", "UnBM", "Lucent", "Pls", "Trs", "RM",
]


@dataclass
class AnalysisReport:
    name: str
    place_count: int
    transition_count: int
    reachable_marking_count: Optional[int] = None
    free_choice: bool = False
    live: Optional[bool] = None
    bounded: Optional[bool] = None
    safe: Optional[bool] = None
    locally_safe: Optional[bool] = None
    p_component_count: Optional[int] = None
    t_component_count: Optional[int] = None
    has_p_cover: Optional[bool] = None
    has_t_cover: Optional[bool] = None
    home_cluster_present: Optional[bool] = None
    perpetual: Optional[bool] = None
    unique_blocking_markings: Optional[bool] = None
    lucent: Optional[bool] = None
    details: dict = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "place_count": self.place_count,
            "transition_count": self.transition_count,
            "reachable_marking_count": self.reachable_marking_count,
            "free_choice": self.free_choice,
            "live": self.live,
            "bounded": self.bounded,
            "safe": self.safe,
            "locally_safe": self.locally_safe,
            "p_component_count": self.p_component_count,
            "t_component_count": self.t_component_count,
            "has_p_cover": self.has_p_cover,
            "has_t_cover": self.has_t_cover,
            "home_cluster_present": self.home_cluster_present,
            "perpetual": self.perpetual,
            "unique_blocking_markings": self.unique_blocking_markings,
            "lucent": self.lucent,
            "details": self.details,
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def table_row(self) -> dict:
        """Values keyed by overview-table column."""
        return {
            "FreC": self.free_choice,
            "Live": self.live,
            "Boun": self.bounded,
            "Safe": self.safe,
            "LocS": self.locally_safe,
            "PC": self.p_component_count,
            "HClu": self.home_cluster_present,
            "Perp": self.perpetual,
            "UnBM": self.unique_blocking_markings,
            "Lucent": self.lucent,
            "Pls": self.place_count,
            "Trs": self.transition_count,
            "RM": self.reachable_marking_count,
        }


def analyze(net: PetriNet, m0: Marking, limits: Optional[ExplorationLimits] = None,
            component_limit: int = config.COMPONENT_LIMIT) -> AnalysisReport:
    """Run every structural and behavioral check and collect one report."""
    limits = limits or ExplorationLimits()
    report = AnalysisReport(net.name, len(net.places), len(net.transitions))
    kinds = classify(net)
    report.free_choice = kinds.is_free_choice
    net_clusters = clusters(net)
    report.details = {
        "initial_marking": str(m0),
        "classification": kinds.to_dict(),
        "clusters": [str(c) for c in net_clusters],
    }

    pcomps = tcomps = None
    try:
        pcomps = p_components(net, component_limit)
        report.p_component_count = len(pcomps)
        report.has_p_cover = has_cover(net, pcomps)
        report.details["p_components"] = [str(c) for c in pcomps]
    except ComponentLimitExceeded as e:
        report.warnings.append(f"p_components: {e}")
    try:
        tcomps = t_components(net, component_limit)
        report.t_component_count = len(tcomps)
        report.has_t_cover = has_cover(net, tcomps)
        report.details["t_components"] = [str(c) for c in tcomps]
    except ComponentLimitExceeded as e:
        report.warnings.append(f"t_components: {e}")

    outcome = explore(net, m0, limits)
    if outcome.verdict == UNBOUNDED:
        report.bounded = False
        report.safe = False
        report.perpetual = False
        lucency = check_lucency(net, m0, limits)
        report.lucent = lucency.lucent
        report.details["lucency"] = lucency.to_dict()
        report.warnings.append("net is unbounded; reachability-based columns are undecided")
        return report
    if outcome.verdict != COMPLETE:
        report.warnings.append(f"exploration stopped after {outcome.states_seen} states; behavioral columns are inconclusive")
        return report

    graph = outcome.graph
    report.reachable_marking_count = len(graph)
    bounds = boundedness(net, m0, outcome=outcome)
    report.bounded = True
    report.safe = bounds.safe
    liveness = is_live(net, m0, graph=graph)
    report.live = liveness.live

    if pcomps is not None:
        local = is_locally_safe(net, m0, graph=graph, components=pcomps)
        report.locally_safe = local.safe
        if local.vacuous:
            report.warnings.append("no P-components; local safeness holds vacuously")
        if local.witness is not None:
            comp, marking, tokens = local.witness
            report.details["local_safety_witness"] = {"component": str(comp), "marking": str(marking), "tokens": tokens}

    homes = home_clusters(net, m0, graph=graph)
    report.home_cluster_present = bool(homes)
    report.perpetual = report.live and report.bounded and report.home_cluster_present

    blocking = blocking_map(net, m0, graph=graph)
    needs_one = report.live and kinds.is_free_choice
    report.unique_blocking_markings = all(
        len(b.blocking_markings) <= 1 and (len(b.blocking_markings) == 1 or not needs_one)
        for b in blocking
    )

    lucency = check_lucency(net, m0, limits, graph=graph)
    report.lucent = lucency.lucent

    report.details.update({
        "bounds": bounds.per_place,
        "home_markings": [str(m) for m in home_markings(net, m0, graph=graph)],
        "home_clusters": [str(c) for c in homes],
        "blocking": [b.to_dict() for b in blocking],
        "lucency": lucency.to_dict(),
        "dead_transitions": dead_transitions(graph),
        "deadlocks": [str(m) for m in deadlocks(graph)],
    })
    if not liveness.live:
        marking, t = liveness.witness
        report.details["liveness_witness"] = {"marking": str(marking), "transition": t}
    return report


def yes_no(value) -> str:
    if value is None:
        return "?"
    if isinstance(value, bool):
        return "Yes" if value else "No"
    return str(value)


STRUCTURAL_PROPERTIES = ["free-choice", "p-net", "t-net", "strongly-connected", "workflow", "p-cover", "t-cover"]
BEHAVIORAL_PROPERTIES = ["live", "bounded", "safe", "locally-safe", "cyclic", "sound", "perpetual", "lucent"]
PROPERTIES = STRUCTURAL_PROPERTIES + BEHAVIORAL_PROPERTIES + ["lucency"]


@dataclass
class PropertyResult:
    """Outcome of a single `check`: holds is None when it could not be decided."""
    prop: str
    holds: Optional[bool]
    witness: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"property": self.prop, "holds": self.holds, "witness": list(self.witness)}


def _undecided(prop: str, reason: str) -> PropertyResult:
    return PropertyResult(prop, None, [reason])


def _structural(prop: str, net: PetriNet) -> PropertyResult:
    kinds = classify(net)
    if prop == "free-choice":
        return PropertyResult(prop, kinds.is_free_choice)
    if prop == "p-net":
        return PropertyResult(prop, kinds.is_p_net)
    if prop == "t-net":
        return PropertyResult(prop, kinds.is_t_net)
    if prop == "strongly-connected":
        return PropertyResult(prop, kinds.is_strongly_connected)
    if prop == "workflow":
        if kinds.workflow is None:
            return PropertyResult(prop, False)
        i, o = kinds.workflow
        return PropertyResult(prop, True, [f"source {i}", f"sink {o}"])
    comps = p_components(net) if prop == "p-cover" else t_components(net)
    covered = set().union(*(c.nodes for c in comps)) if comps else set()
    missing = sorted(net.nodes - covered)
    return PropertyResult(prop, not missing, [f"not covered: {format_set(missing)}"] if missing else [])


def check_property(prop: str, net: PetriNet, m0: Marking,
                   limits: Optional[ExplorationLimits] = None) -> PropertyResult:
    """
    Decide one named property of a marked net.

    Raises LimitExceeded when exploration stops before an answer is known,
    and NotAWorkflowNet when soundness is asked of another kind of net.
    """
    if prop == "lucency":
        prop = "lucent"
    if prop in STRUCTURAL_PROPERTIES:
        return _structural(prop, net)
    limits = limits or ExplorationLimits()

    if prop == "sound":
        verdict = check_soundness(net, limits)
        return PropertyResult(prop, verdict.sound, [] if verdict.sound else [verdict.diagnosis])

    if prop == "lucent":
        verdict = check_lucency(net, m0, limits)
        if verdict.verdict == INCONCLUSIVE:
            raise LimitExceeded(f"exploration stopped after {verdict.states_seen} states", verdict.states_seen)
        witness = []
        if verdict.pair is not None:
            m1, m2 = verdict.pair
            witness.append(f"{m1} and {m2} both enable {format_set(verdict.shared)}")
        if verdict.witness is not None:
            w = verdict.witness
            witness.append(f"unbounded: {sequence_text(w.prefix)} then {sequence_text(w.pump)} pumps {w.m1} to {w.m2}")
        return PropertyResult(prop, verdict.lucent, witness)

    outcome = explore(net, m0, limits)
    if outcome.verdict == UNBOUNDED:
        w = outcome.witness
        pump = f"unbounded: {sequence_text(w.prefix)} then {sequence_text(w.pump)} pumps {w.m1} to {w.m2}"
        if prop in ("bounded", "safe", "perpetual"):
            return PropertyResult(prop, False, [pump])
        return _undecided(prop, pump)
    graph = outcome.require_graph()

    if prop in ("bounded", "safe"):
        bounds = boundedness(net, m0, outcome=outcome)
        holds = bounds.bounded if prop == "bounded" else bounds.safe
        worst = max(bounds.per_place, key=lambda p: (bounds.per_place[p], p))
        return PropertyResult(prop, holds, [f"bound {bounds.bound} reached on {worst}"])
    if prop == "live":
        verdict = is_live(net, m0, graph=graph)
        if verdict.live:
            return PropertyResult(prop, True)
        marking, t = verdict.witness
        return PropertyResult(prop, False, [f"{t} can never be enabled again from {marking}"])
    if prop == "cyclic":
        return PropertyResult(prop, m0 in home_markings(net, m0, graph=graph))
    if prop == "locally-safe":
        local = is_locally_safe(net, m0, graph=graph)
        if local.witness is None:
            return PropertyResult(prop, True, ["no P-components"] if local.vacuous else [])
        comp, marking, tokens = local.witness
        return PropertyResult(prop, False, [f"{comp} holds {tokens} tokens in {marking}"])
    if prop == "perpetual":
        live = is_live(net, m0, graph=graph)
        homes = home_clusters(net, m0, graph=graph)
        witness = [f"home cluster {c}" for c in homes]
        if not live.live:
            witness.append(f"not live: {live.witness[1]} dies from {live.witness[0]}")
        if not homes:
            witness.append("no home cluster")
        return PropertyResult(prop, live.live and bool(homes), witness)
    raise ValueError(f"unknown property '{prop}'")


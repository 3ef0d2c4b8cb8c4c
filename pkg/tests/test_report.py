"""Tests for the full analysis report, the overview table and single-property checks."""
import json

import pytest

from corpus import PUBLISHED_TABLE, TABLE_NETS
from errors import LimitExceeded, NotAWorkflowNet
from report import (
    PROPERTIES, TABLE_COLUMNS, AnalysisReport, analyze, check_property, yes_no,
)
from state_space import ExplorationLimits


class TestOverviewTable:
    @pytest.mark.parametrize("name", TABLE_NETS)
    def test_row_matches_published(self, corpus, name):
        net, m0 = corpus[name]
        report = analyze(net, m0)
        assert report.table_row() == PUBLISHED_TABLE[name]
        assert not report.warnings

    def test_columns(self):
        assert list(AnalysisReport("x", 1, 1).table_row()) == TABLE_COLUMNS

    def test_self_loop_row(self, self_loop):
        net, m0 = self_loop
        row = analyze(net, m0).table_row()
        assert row == {
            "FreC": True, "Live": True, "Boun": True, "Safe": True, "LocS": True, "PC": 1,
            "HClu": True, "Perp": True, "UnBM": True, "Lucent": True, "Pls": 1, "Trs": 1, "RM": 1,
        }

    def test_yes_no(self):
        assert [yes_no(v) for v in (True, False, None, 4)] == ["Yes", "No", "?", "4"]


class TestAnalyze:
    def test_json_key_order(self, corpus):
        net, m0 = corpus["fig1"]
        data = json.loads(analyze(net, m0).to_json())
        assert list(data) == [
            "name", "place_count", "transition_count", "reachable_marking_count", "free_choice",
            "live", "bounded", "safe", "locally_safe", "p_component_count", "t_component_count",
            "has_p_cover", "has_t_cover", "home_cluster_present", "perpetual",
            "unique_blocking_markings", "lucent", "details", "warnings",
        ]
        assert data["details"]["home_clusters"] == ["{p1,p2,t1,t2}"]

    def test_details(self, corpus):
        net, m0 = corpus["fig2"]
        details = analyze(net, m0).details
        assert details["lucency"]["pair"] == ["[p2,p5]", "[p2,p6]"]
        assert details["dead_transitions"] == []
        assert details["deadlocks"] == []
        assert "liveness_witness" not in details

    def test_dead_branch(self, dead_branch):
        net, m0 = dead_branch
        report = analyze(net, m0)
        assert report.live is False and report.perpetual is False
        assert report.details["dead_transitions"] == ["join"]
        assert report.details["liveness_witness"]["transition"] in net.transitions

    def test_unbounded(self, pump_net):
        net, m0 = pump_net
        report = analyze(net, m0)
        assert report.bounded is False and report.safe is False and report.perpetual is False
        assert report.lucent is False
        assert report.live is None and report.reachable_marking_count is None
        assert report.warnings

    def test_state_limit(self, corpus):
        net, m0 = corpus["fig7"]
        report = analyze(net, m0, ExplorationLimits(max_states=3))
        assert report.reachable_marking_count is None
        assert report.bounded is None and report.lucent is None
        assert report.p_component_count == 3
        assert any("inconclusive" in w for w in report.warnings)

    def test_component_limit(self, corpus):
        net, m0 = corpus["fig3"]
        report = analyze(net, m0, component_limit=1)
        assert report.p_component_count is None and report.locally_safe is None
        assert report.lucent is True
        assert any(w.startswith("p_components") for w in report.warnings)


class TestCheckProperty:
    def test_lucency_alias(self, corpus):
        net, m0 = corpus["fig2"]
        result = check_property("lucency", net, m0)
        assert result.prop == "lucent" and result.holds is False
        assert result.witness == ["[p2,p5] and [p2,p6] both enable {t3}"]

    @pytest.mark.parametrize("prop, name, holds", [
        ("free-choice", "fig1", True),
        ("free-choice", "fig2", False),
        ("t-net", "fig8", True),
        ("p-net", "fig8", False),
        ("strongly-connected", "fig4", True),
        ("workflow", "fig4_wf", True),
        ("workflow", "fig4", False),
        ("p-cover", "fig1", True),
        ("live", "fig7", True),
        ("safe", "fig3", True),
        ("bounded", "fig6", True),
        ("cyclic", "fig1", True),
        ("cyclic", "fig3", False),
        ("locally-safe", "fig5", False),
        ("perpetual", "fig3", True),
        ("perpetual", "fig5", False),
        ("sound", "fig4_wf", True),
        ("lucent", "fig7", False),
        ("lucent", "fig4", True),
    ])
    def test_corpus_properties(self, corpus, prop, name, holds):
        net, m0 = corpus[name]
        assert check_property(prop, net, m0).holds is holds

    def test_every_property_answers(self, corpus):
        net, m0 = corpus["fig1"]
        for prop in PROPERTIES:
            if prop == "sound":
                continue
            assert check_property(prop, net, m0).holds in (True, False)

    def test_sound_needs_a_workflow_net(self, corpus):
        net, m0 = corpus["fig1"]
        with pytest.raises(NotAWorkflowNet):
            check_property("sound", net, m0)

    def test_unsound(self, dead_branch):
        net, m0 = dead_branch
        result = check_property("sound", net, m0)
        assert result.holds is False and result.witness[0].startswith("not live")

    def test_perpetual_witness(self, corpus):
        net, m0 = corpus["fig5"]
        assert "no home cluster" in check_property("perpetual", net, m0).witness

    def test_unbounded(self, pump_net):
        net, m0 = pump_net
        assert check_property("bounded", net, m0).holds is False
        live = check_property("live", net, m0)
        assert live.holds is None and live.witness[0].startswith("unbounded")

    def test_limit(self, corpus):
        net, m0 = corpus["fig7"]
        with pytest.raises(LimitExceeded):
            check_property("lucent", net, m0, ExplorationLimits(max_states=3))
        with pytest.raises(LimitExceeded):
            check_property("live", net, m0, ExplorationLimits(max_states=3))

    def test_unknown_property(self, corpus):
        net, m0 = corpus["fig1"]
        with pytest.raises(ValueError):
            check_property("fancy", net, m0)

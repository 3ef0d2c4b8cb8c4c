"""Shared fixtures: the corpus nets and a few hand-built nets."""
import pytest

from corpus import example_corpus
from formats import parse_lpn
from petri_net import Marking, build_net


def lpn(text: str):
    """Parse inline .lpn text (net, marking)."""
    return parse_lpn(text)


@pytest.fixture(scope="session")
def corpus():
    return example_corpus()


@pytest.fixture
def self_loop():
    net = build_net(["p"], ["t"], [("p", "t"), ("t", "p")], name="loop")
    return net, Marking(["p"])


@pytest.fixture
def pump_net():
    """t: p -> {p,q} keeps firing and grows q without bound."""
    net = build_net(["p", "q"], ["t", "u"],
                    [("p", "t"), ("t", "p"), ("t", "q"), ("q", "u"), ("u", "p"), ("u", "q")],
                    name="pump")
    return net, Marking(["p"])


@pytest.fixture
def single_task():
    net = build_net(["i", "o"], ["t"], [("i", "t"), ("t", "o")], name="task")
    return net, Marking(["i"])


@pytest.fixture
def dead_branch():
    """XOR split followed by an AND join: whichever branch is taken, the join starves."""
    net, m0 = lpn("""
        net deadbranch
        place i 1
        place a
        place b
        place o
        trans left
        trans right
        trans join
        arc i left
        arc left a
        arc i right
        arc right b
        arc a join
        arc b join
        arc join o
    """)
    return net, m0

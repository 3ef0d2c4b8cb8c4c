"""
Seeded net generators.

gen_block_wf builds sound free-choice workflow nets by nesting
sequence, choice, parallel and loop blocks. gen_small_random builds
arbitrary small connected nets for differential testing.

Both draw from SplitMix64, so a seed gives the same net on every platform.
"""
import logging
from dataclasses import dataclass, field

import config
from errors import Disconnected, SizeOutOfRange
from petri_net import Marking, PetriNet, RawNet, validate_net

logger = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1

SEQUENCE = "sequence"
CHOICE = "choice"
PARALLEL = "parallel"
LOOP = "loop"

# Smallest activity count each block kind can be built with
MIN_BLOCK_SIZE = {SEQUENCE: 2, CHOICE: 2, PARALLEL: 4, LOOP: 4}

MAX_CONNECT_ATTEMPTS = 10000


class SplitMix64:
    """64-bit SplitMix generator."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, n: int) -> int:
        """Uniform-ish integer in [0, n)."""
        if n <= 0:
            raise ValueError("bound must be positive")
        return self.next_u64() % n

    def between(self, lo: int, hi: int) -> int:
        """Integer in [lo, hi]."""
        return lo + self.below(hi - lo + 1)

    def chance(self, numerator: int, denominator: int) -> bool:
        return self.below(denominator) < numerator

    def weighted(self, weights: dict[str, int]) -> str:
        total = sum(weights.values())
        pick = self.below(total)
        for key in sorted(weights):
            pick -= weights[key]
            if pick < 0:
                return key
        raise AssertionError("unreachable")


@dataclass(frozen=True)
class GenParams:
    seed: int
    size: int
    weights: dict = field(default_factory=lambda: dict(config.GEN_WEIGHTS))

    def __post_init__(self):
        if self.size < 1:
            raise SizeOutOfRange(f"size must be at least 1, got {self.size}")
        if any(w < 0 for w in self.weights.values()):
            raise ValueError("block weights must be non-negative")
        if not any(self.weights.values()):
            raise ValueError("at least one block weight must be positive")


class _WorkflowBuilder:
    def __init__(self, rng: SplitMix64, weights: dict[str, int]):
        self.rng = rng
        self.weights = weights
        self.places = ["i", "o"]
        self.transitions: list[str] = []
        self.arcs: list[tuple[str, str]] = []

    def place(self) -> str:
        name = f"p{len(self.places) - 1}"
        self.places.append(name)
        return name

    def transition(self, inputs: list[str], outputs: list[str]) -> str:
        name = f"t{len(self.transitions) + 1}"
        self.transitions.append(name)
        self.arcs.extend((p, name) for p in inputs)
        self.arcs.extend((name, p) for p in outputs)
        return name

    def split(self, n: int) -> tuple[int, int]:
        left = self.rng.between(1, n - 1)
        return left, n - left

    def block(self, entry: str, exit: str, n: int) -> None:
        """Refine the place pair (entry, exit) with n transitions."""
        if n == 1:
            self.transition([entry], [exit])
            return
        allowed = {k: w for k, w in self.weights.items() if w and n >= MIN_BLOCK_SIZE[k]}
        if not allowed:
            allowed = {SEQUENCE: 1}
        kind = self.rng.weighted(allowed)

        if kind == SEQUENCE:
            a, b = self.split(n)
            middle = self.place()
            self.block(entry, middle, a)
            self.block(middle, exit, b)
        elif kind == CHOICE:
            a, b = self.split(n)
            self.block(entry, exit, a)
            self.block(entry, exit, b)
        elif kind == PARALLEL:
            a, b = self.split(n - 2)
            a_in, a_out, b_in, b_out = self.place(), self.place(), self.place(), self.place()
            self.transition([entry], [a_in, b_in])
            self.block(a_in, a_out, a)
            self.block(b_in, b_out, b)
            self.transition([a_out, b_out], [exit])
        else:
            # entry -> head -(do)-> decide -> exit, with a redo branch decide -> head
            a, b = self.split(n - 2)
            head, decide = self.place(), self.place()
            self.transition([entry], [head])
            self.block(head, decide, a)
            self.transition([decide], [exit])
            self.block(decide, head, b)


def gen_block_wf(params: GenParams) -> tuple[PetriNet, Marking]:
    """A sound free-choice workflow net with params.size transitions, marked [i]."""
    builder = _WorkflowBuilder(SplitMix64(params.seed), params.weights)
    builder.block("i", "o", params.size)
    raw = RawNet(builder.places, builder.transitions, builder.arcs,
                 name=f"wf_{params.seed}_{params.size}")
    net = validate_net(raw)
    logger.debug("generated %s", net)
    return net, Marking(["i"])


def gen_small_random(params: GenParams) -> tuple[PetriNet, Marking]:
    """A random connected net with params.size nodes and 0-2 tokens per place."""
    if not 2 <= params.size <= config.RANDOM_NET_MAX_NODES:
        raise SizeOutOfRange(f"size must lie in 2..{config.RANDOM_NET_MAX_NODES}, got {params.size}")
    rng = SplitMix64(params.seed)
    for _ in range(MAX_CONNECT_ATTEMPTS):
        n_places = rng.between(1, params.size - 1)
        places = [f"p{i + 1}" for i in range(n_places)]
        transitions = [f"t{i + 1}" for i in range(params.size - n_places)]
        arcs = []
        for p in places:
            for t in transitions:
                if rng.chance(1, 3):
                    arcs.append((p, t))
                if rng.chance(1, 3):
                    arcs.append((t, p))
        initial = {p: rng.below(3) for p in places}
        try:
            net = validate_net(RawNet(places, transitions, arcs, name=f"rnd_{params.seed}_{params.size}"))
        except Disconnected:
            continue
        return net, Marking(initial)
    raise SizeOutOfRange(f"no connected net found for seed {params.seed}")

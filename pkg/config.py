"""
Configuration for pnstruct.
Exploration limits, enumeration caps, generator weights and logging setup,
all overridable through the environment or a .env file.
"""
import logging
import os
from pathlib import Path

from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler

load_dotenv()

# Exploration limits
MAX_STATES = int(os.getenv("PNSTRUCT_MAX_STATES", "1000000"))
MAX_EDGES = int(os.getenv("PNSTRUCT_MAX_EDGES", "5000000"))

# Structural enumeration caps
COMPONENT_LIMIT = int(os.getenv("PNSTRUCT_COMPONENT_LIMIT", "10000"))
COMMONER_SIZE_CAP = int(os.getenv("PNSTRUCT_COMMONER_SIZE_CAP", "20"))

# Paths
CORPUS_DIR = Path(os.getenv("PNSTRUCT_CORPUS_DIR", str(Path(__file__).parent / "corpus")))

# Logging
LOG_LEVEL = os.getenv("PNSTRUCT_LOG_LEVEL", "WARNING")

# Server
API_MAX_STATES = int(os.getenv("PNSTRUCT_API_MAX_STATES", "100000"))

# Block weights for the workflow-net generator
DEFAULT_GEN_WEIGHTS = {
    "sequence": 3,
    "choice": 2,
    "parallel": 2,
    "loop": 1,
}

# Node cap for small random nets
RANDOM_NET_MAX_NODES = 12

# Fixed name of the short-circuit transition
T_STAR = "t_star"


def parse_weights(raw: str) -> dict[str, int]:
    """Parse 'sequence=3,choice=2,...' into a weight map."""
    weights = dict(DEFAULT_GEN_WEIGHTS)
    if not raw:
        return weights
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in weights:
            raise ValueError(f"unknown block kind '{key}'")
        weights[key] = int(value)
    return weights


GEN_WEIGHTS = parse_weights(os.getenv("PNSTRUCT_GEN_WEIGHTS", ""))


def configure_logging(level: str = LOG_LEVEL) -> None:
    """Route log records through rich on stderr."""
    logging.basicConfig(
        level=level.upper(),
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=Console(stderr=True), rich_tracebacks=True, show_path=False)],
        force=True,
    )

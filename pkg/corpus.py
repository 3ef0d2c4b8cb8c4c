"""
The example nets shipped under corpus/ and their published overview rows.
"""
import logging
from pathlib import Path
from typing import Optional

import config
from formats import LPN_SUFFIX, PNML_SUFFIX, load_net
from petri_net import Marking, PetriNet

logger = logging.getLogger(__name__)

# Nets with a row in the overview table, in table order.
# fig4 is the short-circuited workflow net. The net before t_star is added
# lives in the workflow/ subdirectory so that table runs over corpus/ skip it.
TABLE_NETS = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"]
WORKFLOW_NETS = ["fig4_wf"]
WORKFLOW_SUBDIR = "workflow"

Y, N = True, False


def _row(frec, live, boun, safe, locs, pc, hclu, perp, unbm, lucent, pls, trs, rm) -> dict:
    return {
        "FreC": frec, "Live": live, "Boun": boun, "Safe": safe, "LocS": locs, "PC": pc,
        "HClu": hclu, "Perp": perp, "UnBM": unbm, "Lucent": lucent,
        "Pls": pls, "Trs": trs, "RM": rm,
    }


PUBLISHED_TABLE = {
    "fig1": _row(Y, Y, Y, Y, Y, 2, Y, Y, Y, Y, 4, 4, 4),
    "fig2": _row(N, Y, Y, Y, Y, 2, Y, Y, N, N, 6, 6, 6),
    "fig3": _row(Y, Y, Y, Y, Y, 4, Y, Y, Y, Y, 8, 7, 9),
    "fig4": _row(Y, Y, Y, Y, Y, 6, Y, Y, Y, Y, 11, 10, 11),
    "fig5": _row(Y, Y, Y, Y, N, 5, N, N, Y, Y, 9, 6, 8),
    "fig6": _row(N, Y, Y, Y, Y, 2, N, N, N, N, 5, 4, 6),
    "fig7": _row(Y, Y, Y, Y, Y, 3, N, N, Y, N, 8, 8, 12),
    "fig8": _row(Y, Y, Y, Y, Y, 3, N, N, Y, N, 6, 4, 8),
}


def net_files(directory: Path) -> list[Path]:
    """Net files in a directory, sorted by name."""
    return sorted(
        p for p in Path(directory).iterdir()
        if p.is_file() and p.suffix.lower() in (LPN_SUFFIX, PNML_SUFFIX)
    )


def _path(name: str, directory: Path) -> Path:
    if name in WORKFLOW_NETS:
        return directory / WORKFLOW_SUBDIR / f"{name}{LPN_SUFFIX}"
    return directory / f"{name}{LPN_SUFFIX}"


def example_corpus(directory: Optional[Path] = None) -> dict[str, tuple[PetriNet, Marking]]:
    """The nine corpus nets keyed by name: the table nets in table order, then fig4_wf."""
    directory = Path(directory or config.CORPUS_DIR)
    nets = {name: load_net(_path(name, directory)) for name in TABLE_NETS + WORKFLOW_NETS}
    logger.debug("loaded %d corpus nets from %s", len(nets), directory)
    return nets


def corpus_net(name: str, directory: Optional[Path] = None) -> tuple[PetriNet, Marking]:
    """Load one corpus net by name; KeyError for names outside the corpus."""
    if name not in TABLE_NETS + WORKFLOW_NETS:
        raise KeyError(name)
    return load_net(_path(name, Path(directory or config.CORPUS_DIR)))

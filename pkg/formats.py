"""
Readers and writers for net files.

Two formats are supported:

- `.lpn`, a line-oriented text format:
      # comment
      net NAME
      place ID [TOKENS]
      trans ID
      arc SRC DST
  Arcs may name nodes declared further down the file.
- `.pnml`, the single-page subset of the PNML 2009 P/T-net grammar.
"""
import logging
import re
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Optional, Union

from errors import (
    DuplicateDecl, FormatError, LpnSyntaxError, MalformedXml, NetValidationError,
    UnknownArcEndpoint, UnsupportedNetType, ValidationError,
)
from petri_net import ID_PATTERN, Marking, PetriNet, RawNet, validate_net

logger = logging.getLogger(__name__)

PNML_NS = "http://www.pnml.org/version-2009/grammar/pnml"
PTNET_TYPE = "http://www.pnml.org/version-2009/grammar/ptnet"

LPN_SUFFIX = ".lpn"
PNML_SUFFIX = ".pnml"

NAT_PATTERN = re.compile(r"\d+\Z")


def _build(raw: RawNet) -> tuple[PetriNet, Marking]:
    try:
        net = validate_net(raw)
    except NetValidationError as e:
        raise ValidationError(e) from e
    return net, Marking(raw.initial)


def _identifier(token: str, line: int) -> str:
    if not ID_PATTERN.match(token):
        raise LpnSyntaxError(line, f"invalid identifier '{token}'")
    return token


def parse_lpn(text: str, name: Optional[str] = None) -> tuple[PetriNet, Marking]:
    """
    Parse .lpn text into a validated net and its initial marking.

    Args:
        text: File contents
        name: Net name used when the text has no `net` line

    Returns:
        (net, initial marking)
    """
    net_name = None
    places: list[str] = []
    transitions: list[str] = []
    initial: dict[str, int] = {}
    arcs: list[tuple[str, str, int]] = []
    declared: dict[str, int] = {}
    seen_arcs: set[tuple[str, str]] = set()

    for lineno, line in enumerate(text.splitlines(), start=1):
        fields = line.split("#", 1)[0].split()
        if not fields:
            continue
        keyword, args = fields[0], fields[1:]

        if keyword == "net":
            if len(args) != 1:
                raise LpnSyntaxError(lineno, "expected 'net NAME'")
            if net_name is not None:
                raise DuplicateDecl(lineno, "net name declared twice")
            net_name = _identifier(args[0], lineno)

        elif keyword in ("place", "trans"):
            if keyword == "place" and len(args) not in (1, 2):
                raise LpnSyntaxError(lineno, "expected 'place ID [TOKENS]'")
            if keyword == "trans" and len(args) != 1:
                raise LpnSyntaxError(lineno, "expected 'trans ID'")
            node = _identifier(args[0], lineno)
            if node in declared:
                raise DuplicateDecl(lineno, f"'{node}' already declared on line {declared[node]}")
            declared[node] = lineno
            if keyword == "trans":
                transitions.append(node)
                continue
            places.append(node)
            if len(args) == 2:
                if not NAT_PATTERN.match(args[1]):
                    raise LpnSyntaxError(lineno, f"token count must be a natural number, got '{args[1]}'")
                if int(args[1]):
                    initial[node] = int(args[1])

        elif keyword == "arc":
            if len(args) == 3:
                raise LpnSyntaxError(lineno, "arc weights are not supported")
            if len(args) != 2:
                raise LpnSyntaxError(lineno, "expected 'arc SRC DST'")
            src, dst = (_identifier(a, lineno) for a in args)
            if (src, dst) in seen_arcs:
                raise DuplicateDecl(lineno, f"arc {src}->{dst} declared twice")
            seen_arcs.add((src, dst))
            arcs.append((src, dst, lineno))

        else:
            raise LpnSyntaxError(lineno, f"unknown keyword '{keyword}'")

    for src, dst, lineno in arcs:
        for end in (src, dst):
            if end not in declared:
                raise UnknownArcEndpoint(lineno, f"arc {src}->{dst} names undeclared node '{end}'")

    raw = RawNet(places, transitions, [(s, d) for s, d, _ in arcs], initial, net_name or name or "net")
    return _build(raw)


def serialize_lpn(net: PetriNet, m: Marking) -> str:
    """Write a net in .lpn with sorted declarations."""
    lines = [f"net {net.name}"]
    for p in net.sorted_places():
        tokens = m.count(p)
        lines.append(f"place {p} {tokens}" if tokens else f"place {p}")
    lines.extend(f"trans {t}" for t in net.sorted_transitions())
    lines.extend(f"arc {src} {dst}" for src, dst in sorted(net.flow))
    return "\n".join(lines) + "\n"


def _local(tag: str) -> str:
    _, _, name = tag.rpartition("}")
    return name


def _child(elem: ET.Element, name: str) -> Optional[ET.Element]:
    for child in elem:
        if _local(child.tag) == name:
            return child
    return None


def _children(elem: ET.Element, name: str) -> list[ET.Element]:
    return [child for child in elem if _local(child.tag) == name]


def _text_of(elem: ET.Element, label: str) -> Optional[str]:
    """Text of <label><text>..</text></label> under elem."""
    holder = _child(elem, label)
    if holder is None:
        return None
    text = _child(holder, "text")
    if text is None or text.text is None:
        return None
    return text.text.strip()


def parse_pnml(xml: Union[str, bytes], name: Optional[str] = None) -> tuple[PetriNet, Marking]:
    """Parse a single-page PNML P/T net."""
    try:
        root = ET.fromstring(xml)
    except ET.ParseError as e:
        raise MalformedXml(str(e)) from e

    if _local(root.tag) != "pnml":
        raise MalformedXml(f"root element is <{_local(root.tag)}>, expected <pnml>")
    nets = _children(root, "net")
    if len(nets) != 1:
        raise UnsupportedNetType(f"expected exactly one <net>, found {len(nets)}")
    net_elem = nets[0]
    net_type = net_elem.get("type")
    if net_type is not None and net_type != PTNET_TYPE:
        raise UnsupportedNetType(f"net type '{net_type}' is not a P/T net")

    pages = _children(net_elem, "page")
    if len(pages) > 1:
        raise UnsupportedNetType("only single-page nets are supported")
    body = pages[0] if pages else net_elem
    if _children(body, "page"):
        raise UnsupportedNetType("nested pages are not supported")

    places: list[str] = []
    initial: dict[str, int] = {}
    for place in _children(body, "place"):
        pid = place.get("id")
        if pid is None:
            raise MalformedXml("<place> without id")
        places.append(pid)
        tokens = _text_of(place, "initialMarking")
        if tokens:
            if not NAT_PATTERN.match(tokens):
                raise MalformedXml(f"initial marking of {pid} is not a natural number")
            if int(tokens):
                initial[pid] = int(tokens)

    transitions = []
    for trans in _children(body, "transition"):
        tid = trans.get("id")
        if tid is None:
            raise MalformedXml("<transition> without id")
        transitions.append(tid)

    arcs = []
    for arc in _children(body, "arc"):
        src, dst = arc.get("source"), arc.get("target")
        if src is None or dst is None:
            raise MalformedXml(f"arc {arc.get('id')} lacks source or target")
        weight = _text_of(arc, "inscription")
        if weight is not None and weight != "1":
            raise UnsupportedNetType(f"arc {src}->{dst} has weight {weight}; only weight 1 is supported")
        if (src, dst) in arcs:
            raise MalformedXml(f"duplicate arc {src}->{dst}")
        arcs.append((src, dst))

    net_name = _text_of(net_elem, "name") or net_elem.get("id") or name or "net"
    if not ID_PATTERN.match(net_name):
        net_name = name or "net"
    return _build(RawNet(places, transitions, arcs, initial, net_name))


def serialize_pnml(net: PetriNet, m: Marking) -> str:
    """Write the net as single-page ptnet PNML, nodes and arcs in sorted order."""
    ET.register_namespace("", PNML_NS)

    def q(tag: str) -> str:
        return f"{{{PNML_NS}}}{tag}"

    def labelled(parent: ET.Element, label: str, value: str) -> None:
        holder = ET.SubElement(parent, q(label))
        ET.SubElement(holder, q("text")).text = value

    root = ET.Element(q("pnml"))
    net_elem = ET.SubElement(root, q("net"), id=net.name, type=PTNET_TYPE)
    labelled(net_elem, "name", net.name)
    page = ET.SubElement(net_elem, q("page"), id="page0")
    for p in net.sorted_places():
        place = ET.SubElement(page, q("place"), id=p)
        if m.count(p):
            labelled(place, "initialMarking", str(m.count(p)))
    for t in net.sorted_transitions():
        ET.SubElement(page, q("transition"), id=t)
    for i, (src, dst) in enumerate(sorted(net.flow)):
        ET.SubElement(page, q("arc"), id=f"a{i}", source=src, target=dst)
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def load_net(path: Union[str, Path]) -> tuple[PetriNet, Marking]:
    """Read a .lpn or .pnml file, chosen by extension."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == LPN_SUFFIX:
        data = path.read_bytes()
        try:
            text = data.decode("utf-8")
        except UnicodeDecodeError as e:
            raise LpnSyntaxError(data[:e.start].count(b"\n") + 1, "file is not valid UTF-8") from e
        result = parse_lpn(text, name=path.stem)
    elif suffix == PNML_SUFFIX:
        result = parse_pnml(path.read_bytes(), name=path.stem)
    else:
        raise FormatError(f"unsupported file extension '{path.suffix}' (use .lpn or .pnml)")
    logger.debug("loaded %s from %s", result[0], path)
    return result


def dump_net(net: PetriNet, m: Marking, suffix: str) -> str:
    if suffix == LPN_SUFFIX:
        return serialize_lpn(net, m)
    if suffix == PNML_SUFFIX:
        return serialize_pnml(net, m)
    raise FormatError(f"unsupported output format '{suffix}'")

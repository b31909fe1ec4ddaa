"""Bifurcation graphs: degenerate orbits as vertices, family segments as edges"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import networkx as nx

from sym_orbits.continuation.bifurcation import BifurcationEvent
from sym_orbits.continuation.family import BranchPoint, FamilyBranch
from sym_orbits.core.errors import DanglingEdge, SymOrbitsError

logger = logging.getLogger(__name__)

GAMMA_TOL = 1e-6
STATE_TOL = 1e-5
# endpoints that legitimately end in a leaf
TERMINAL = ("collision", "left domain")


@dataclass
class BifurcationGraph:
    """networkx multigraph plus the matching diagnostics"""
    graph: nx.MultiGraph
    dangling: List[Dict[str, Any]] = field(default_factory=list)
    near_misses: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def vertices(self) -> List[str]:
        return list(self.graph.nodes)

    def edges(self) -> List[Tuple[str, str, Dict[str, Any]]]:
        return [(u, v, data) for u, v, data in self.graph.edges(data=True)]

    def edge_labels(self) -> List[Tuple[str, Any]]:
        """(branch, CZ label) per edge"""
        return [(data["branch"], data["cz"]) for _, _, data in self.graph.edges(data=True)]

    def unverified(self) -> List[str]:
        return [n for n, d in self.graph.nodes(data=True) if d.get("event") and not d.get("verified")]

    def is_mirror_symmetric(self) -> bool:
        """Mirrored and unmirrored copies of every spatial family occur in pairs"""
        counts: Dict[Tuple[str, Any], int] = {}
        for _, _, data in self.graph.edges(data=True):
            if data.get("planar"):
                continue
            base = data["branch"][len("sigma("):-1] if data.get("dashed") else data["branch"]
            key = (base, data["cz"])
            counts[key] = counts.get(key, 0) + (1 if data.get("dashed") else -1)
        return all(v == 0 for v in counts.values())


def _event_key(event: Any) -> Dict[str, Any]:
    if isinstance(event, BifurcationEvent):
        data = event.to_dict()
        data["_orbit"] = event.orbit
        return data
    return dict(event)


def _point_label(point: BranchPoint, cover: int, label: str = "total") -> Optional[int]:
    if point.index is None:
        return None
    if cover == 1:
        return getattr(point.index, label)
    try:
        return getattr(point.index.for_cover(cover, point.config), label)
    except (SymOrbitsError, ValueError, KeyError):
        return None


def _segment_label(points: Sequence[BranchPoint], branch: str, cover: int = 1, label: str = "total") -> Optional[int]:
    # end samples may sit on the far side of the vertex they were snapped to
    inner = points[1:-1] if len(points) > 2 else points
    labels = {_point_label(p, cover, label) for p in inner} - {None}
    if len(labels) > 1:
        logger.warning(f"{branch}: CZ index varies along a segment ({sorted(labels)}); an event is missing")
        return None
    return labels.pop() if labels else None


def _orbit_states(vertex: Dict[str, Any]) -> List[Sequence[float]]:
    """Initial state plus any other symmetric points recorded for the vertex orbit"""
    orbit = vertex.get("_orbit")
    if orbit is not None:
        return [orbit.state0] + list(orbit.metadata.get("symmetric_states", []))
    record = vertex.get("orbit")
    if not record:
        return []
    return [record["state0"]] + list(record.get("symmetric_states", []))


def _distance(a, b) -> float:
    return max(abs(x - y) for x, y in zip(a, b))


def build_graph(
    branches: Sequence[FamilyBranch],
    events: Sequence[Any],
    gamma_tol: float = GAMMA_TOL,
    state_tol: float = STATE_TOL,
    strict: bool = False,
    label: str = "total",
) -> BifurcationGraph:
    """Split every branch at its events and join segments through shared vertices.

    A branch endpoint joins an existing vertex when Gamma and the initial
    state both match, or when the branch was switched onto from that event.
    Unmatched endpoints become leaves; those not explained by a collision or
    domain exit are reported as dangling (raised with ``strict``). Edges carry the
    ``label`` field of the index record (``planar`` for planar problems).
    """
    graph = nx.MultiGraph()
    result = BifurcationGraph(graph)
    vertices: List[Tuple[str, Dict[str, Any]]] = []

    for n, event in enumerate(_event_key(e) for e in events):
        vid = f"v{n}"
        graph.add_node(vid, event=True, kind=event["kind"], gamma=event["gamma_star"], branch=event["branch"],
                       verified=bool(event.get("verified")), k=event.get("k", 1))
        vertices.append((vid, event))

    def match(point: BranchPoint, branch: FamilyBranch) -> Optional[str]:
        parent, gamma_star = point.orbit.metadata.get("parent"), point.orbit.metadata.get("gamma_star")
        for vid, event in vertices:
            if parent is not None and event["branch"] == parent and gamma_star is not None \
                    and abs(event["gamma_star"] - gamma_star) <= gamma_tol:
                return vid
        for vid, event in vertices:
            if abs(event["gamma_star"] - point.gamma) > gamma_tol:
                continue
            states = _orbit_states(event)
            if not states:
                continue
            distance = min(_distance(s, point.orbit.state0) for s in states)
            if distance <= state_tol:
                return vid
            result.near_misses.append({"branch": branch.name, "vertex": vid, "gamma": point.gamma, "distance": distance})
            logger.warning(f"{branch.name}: endpoint near {vid} at distance {distance:.2e}, not merged")
        return None

    for branch in branches:
        if not branch.points:
            continue
        own = sorted(
            ((vid, e) for vid, e in vertices if e["branch"] == branch.name),
            key=lambda item: _position(branch, item[1]["gamma_star"]),
        )
        cuts = [(_position(branch, e["gamma_star"]), vid) for vid, e in own]

        anchors = list(cuts)
        if not anchors or anchors[0][0] > 0:
            anchors.insert(0, (0, match(branch.points[0], branch) or _leaf(graph, result, branch, "start", strict)))
        if len(anchors) < 2 or anchors[-1][0] < len(branch) - 1:
            end = len(branch) - 1
            anchors.append((end, match(branch.points[end], branch) or _leaf(graph, result, branch, "end", strict)))
        for (i, u), (j, v) in zip(anchors, anchors[1:]):
            if u == v and i == j:
                continue
            segment = branch.points[i:j + 1]
            graph.add_edge(
                u, v,
                branch=branch.name,
                cz=_segment_label(segment, branch.name, branch.cover, label),
                symmetries=",".join(segment[0].orbit.symmetries),
                dashed=branch.mirrored,
                planar=branch.planar,
                cover=branch.cover,
                gamma_range=(min(p.gamma for p in segment), max(p.gamma for p in segment)),
            )
    logger.info(f"Bifurcation graph: {graph.number_of_nodes()} vertices, {graph.number_of_edges()} edges, "
                f"{len(result.dangling)} dangling")
    return result


def _position(branch: FamilyBranch, gamma: float) -> int:
    return min(range(len(branch)), key=lambda i: abs(branch.points[i].gamma - gamma))


def _leaf(graph: nx.MultiGraph, result: BifurcationGraph, branch: FamilyBranch, end: str, strict: bool) -> str:
    vid = f"{branch.name}:{end}"
    point = branch.points[0] if end == "start" else branch.points[-1]
    reason = branch.termination if end == "end" else None
    graph.add_node(vid, event=False, kind="leaf", gamma=point.gamma, branch=branch.name, termination=reason)
    if reason not in TERMINAL:
        entry = {"branch": branch.name, "end": end, "gamma": point.gamma, "termination": reason}
        result.dangling.append(entry)
        if strict:
            raise DanglingEdge(f"{branch.name} {end} at Gamma={point.gamma:.8f} matches no vertex", **entry)
    return vid


def to_dot(result: BifurcationGraph, name: str = "bifurcations") -> str:
    """Graph description in DOT; edges labelled by CZ index, mirrored families dashed"""
    lines = [f"graph {name} {{"]
    for vid, data in result.graph.nodes(data=True):
        label = f"{data['kind']}\\nGamma={data['gamma']:.8f}"
        shape = "box" if data.get("event") else "point"
        color = "" if data.get("verified") or not data.get("event") else ", color=red"
        lines.append(f'  "{vid}" [label="{label}", shape={shape}{color}];')
    for u, v, data in result.graph.edges(data=True):
        cz = "?" if data["cz"] is None else data["cz"]
        style = "dashed" if data["dashed"] else "solid"
        lines.append(f'  "{u}" -- "{v}" [label="{cz}", tooltip="{data["branch"]}", style={style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_dot(result: BifurcationGraph, path: str) -> None:
    with open(path, 'w') as f:
        f.write(to_dot(result))
    logger.info(f"Wrote bifurcation graph to {path}")


def export_graphml(result: BifurcationGraph, path: str) -> None:
    """GraphML copy with scalar attributes only"""
    plain = nx.MultiGraph()
    for vid, data in result.graph.nodes(data=True):
        plain.add_node(vid, **{k: v for k, v in data.items() if v is not None})
    for u, v, data in result.graph.edges(data=True):
        attrs = {k: v for k, v in data.items() if v is not None and k != "gamma_range"}
        attrs["gamma_min"], attrs["gamma_max"] = data["gamma_range"]
        plain.add_edge(u, v, **attrs)
    nx.write_graphml(plain, path)

"""Flow-set JSON documents.

Layout::

    {"topology": {"type": "mesh", "rows": 3, "cols": 3},
     "flows": [{"id": "f1", "priority": 1, "flits": 20, "period": 200,
                "deadline": 200, "source": [0, 0], "dest": [0, 1],
                "path": ["R0.0>R0.1"]}]}

``path`` is optional; when absent the XY route from ``source`` to ``dest``
is used. Path entries are link ids or ``[[r, c], [r, c]]`` router pairs.
"""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path as FsPath
from typing import Any, Union

from .flowset import Flow, FlowSet
from .topology import Topology, build_mesh, link_name, router_name, xy_route


def _link_id(desc: Any) -> str:
    if isinstance(desc, str):
        return desc
    if isinstance(desc, (list, tuple)) and len(desc) == 2:
        a, b = desc
        return link_name(router_name(tuple(a)), router_name(tuple(b)))
    raise ValueError(f"cannot read link descriptor {desc!r}")


def _coord(v) -> tuple[int, int] | None:
    if v is None:
        return None
    if len(v) != 2:
        raise ValueError(f"coordinate {v!r} needs two entries")
    return int(v[0]), int(v[1])


def topology_from_dict(d: dict) -> Topology:
    if d.get("type", "mesh") != "mesh":
        raise ValueError(f"unsupported topology type {d.get('type')!r}")
    return build_mesh(int(d["rows"]), int(d["cols"]), bool(d.get("core_links", True)))


def flowset_from_dict(doc: dict) -> FlowSet:
    topo = topology_from_dict(doc["topology"])
    flows = []
    for entry in doc.get("flows", []):
        src, dst = _coord(entry.get("source")), _coord(entry.get("dest"))
        if entry.get("path") is not None:
            path = topo.make_path(_link_id(x) for x in entry["path"])
            nodes = topo.path_nodes(path)
            if src is not None and topo.router_at(src) not in (nodes[0], topo.cores.get(nodes[0])):
                raise ValueError(f"{entry['id']}: path does not start at source {src}")
            if dst is not None and topo.router_at(dst) not in (nodes[-1], topo.cores.get(nodes[-1])):
                raise ValueError(f"{entry['id']}: path does not end at dest {dst}")
        else:
            if src is None or dst is None:
                raise ValueError(f"{entry.get('id')}: need source and dest or an explicit path")
            path = xy_route(topo, src, dst)
        flows.append(Flow(
            id=str(entry["id"]),
            priority=int(entry["priority"]),
            flits=int(entry["flits"]),
            period=int(entry["period"]),
            deadline=int(entry.get("deadline", entry["period"])),
            path=path,
            source=src,
            dest=dst,
        ))
    return FlowSet(topo, flows)


def flowset_to_dict(fs: FlowSet) -> dict:
    t = fs.topology
    flows = []
    for f in fs:
        d: dict[str, Any] = {"id": f.id, "priority": f.priority, "flits": f.flits,
                             "period": f.period, "deadline": f.deadline}
        if f.source is not None:
            d["source"] = list(f.source)
        if f.dest is not None:
            d["dest"] = list(f.dest)
        d["path"] = list(f.path.links)
        flows.append(d)
    return {"topology": {"type": "mesh", "rows": t.rows, "cols": t.cols,
                         "core_links": t.with_core_links},
            "flows": flows}


def load_flowset(path: Union[str, FsPath]) -> FlowSet:
    with open(path, encoding="utf-8") as fh:
        return flowset_from_dict(json.load(fh))


def dump_flowset(fs: FlowSet, path: Union[str, FsPath]) -> None:
    FsPath(path).write_text(json.dumps(flowset_to_dict(fs), indent=2) + "\n", encoding="utf-8")


def example1() -> FlowSet:
    """The bundled three-flow self-suspension scenario on a 3x3 mesh."""
    text = resources.files("sp2noc").joinpath("data/example1.json").read_text(encoding="utf-8")
    return flowset_from_dict(json.loads(text))

"""2-D mesh topologies and static XY routing.

Nodes are named ``R<row>.<col>`` for routers and ``A<row>.<col>`` for the
core attached to that router. A directed link is identified by
``"<src>><dst>"``, e.g. ``R0.0>R0.1``, which is stable for a given mesh.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

Coord = tuple[int, int]


def router_name(rc: Coord) -> str:
    return f"R{rc[0]}.{rc[1]}"


def core_name(rc: Coord) -> str:
    return f"A{rc[0]}.{rc[1]}"


def link_name(src: str, dst: str) -> str:
    return f"{src}>{dst}"


@dataclass(frozen=True)
class Link:
    id: str
    src: str
    dst: str

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"link {self.id!r} is a self loop")


@dataclass(frozen=True)
class Path:
    """Ordered sequence of link ids a message traverses."""

    links: tuple[str, ...]

    def __post_init__(self):
        if not self.links:
            raise ValueError("a path needs at least one link")
        if len(set(self.links)) != len(self.links):
            raise ValueError(f"path repeats a link: {self.links}")

    @property
    def eta(self) -> int:
        return len(self.links)

    def __iter__(self):
        return iter(self.links)

    def __len__(self):
        return len(self.links)


@dataclass(frozen=True)
class Topology:
    rows: int
    cols: int
    with_core_links: bool
    routers: dict[str, Coord] = field(compare=False, repr=False)
    cores: dict[str, str] = field(compare=False, repr=False)
    links: dict[str, Link] = field(compare=False, repr=False)

    def router_at(self, rc: Sequence[int]) -> str:
        name = router_name((int(rc[0]), int(rc[1])))
        if name not in self.routers:
            raise ValueError(f"no router at {tuple(rc)} in a {self.rows}x{self.cols} mesh")
        return name

    @property
    def router_links(self) -> list[Link]:
        return [l for l in self.links.values() if l.src in self.routers and l.dst in self.routers]

    @property
    def core_links(self) -> list[Link]:
        return [l for l in self.links.values() if l.src in self.cores or l.dst in self.cores]

    def make_path(self, links: Iterable[str]) -> Path:
        """Validate an explicit link sequence against this topology."""
        path = Path(tuple(links))
        for lid in path.links:
            if lid not in self.links:
                raise ValueError(f"unknown link {lid!r}")
        for a, b in zip(path.links, path.links[1:]):
            if self.links[a].dst != self.links[b].src:
                raise ValueError(f"links {a!r} and {b!r} do not chain")
        return path

    def path_nodes(self, path: Path) -> list[str]:
        first = self.links[path.links[0]]
        return [first.src] + [self.links[l].dst for l in path.links]


def build_mesh(rows: int, cols: int, with_core_links: bool = True) -> Topology:
    if rows < 1 or cols < 1:
        raise ValueError(f"mesh dimensions must be positive, got {rows}x{cols}")
    routers: dict[str, Coord] = {}
    cores: dict[str, str] = {}
    links: dict[str, Link] = {}

    def add(src: str, dst: str) -> None:
        lid = link_name(src, dst)
        links[lid] = Link(lid, src, dst)

    for r in range(rows):
        for c in range(cols):
            routers[router_name((r, c))] = (r, c)
    for r in range(rows):
        for c in range(cols):
            here = router_name((r, c))
            if c + 1 < cols:
                there = router_name((r, c + 1))
                add(here, there)
                add(there, here)
            if r + 1 < rows:
                there = router_name((r + 1, c))
                add(here, there)
                add(there, here)
    if with_core_links:
        for name, rc in routers.items():
            core = core_name(rc)
            cores[core] = name
            add(core, name)
            add(name, core)
    return Topology(rows, cols, with_core_links, routers, cores, links)


def xy_route(topo: Topology, src: Sequence[int], dst: Sequence[int],
             with_core_links: bool = False) -> Path:
    """Dimension-ordered route: walk along the column index first, then the row index.

    With ``with_core_links`` the injection (core to router) and ejection
    (router to core) hops are included at either end.
    """
    a = topo.router_at(src)
    b = topo.router_at(dst)
    if a == b:
        raise ValueError("source and destination routers coincide; a flow must cross a link")
    (r, c), (r1, c1) = topo.routers[a], topo.routers[b]
    hops = [(r, c)]
    while c != c1:
        c += 1 if c1 > c else -1
        hops.append((r, c))
    while r != r1:
        r += 1 if r1 > r else -1
        hops.append((r, c))
    names = [router_name(h) for h in hops]
    if with_core_links:
        if not topo.with_core_links:
            raise ValueError("topology was built without core links")
        names = [core_name(hops[0])] + names + [core_name(hops[-1])]
    return topo.make_path(link_name(x, y) for x, y in zip(names, names[1:]))

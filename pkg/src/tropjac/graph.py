"""Tropical graphs: dual graphs of prestable marked curves.

Vertices carry a geometric genus, edges are labeled and may repeat or form
self-loops, legs are labeled markings with integer weights.  Includes
validation, acyclic orientations and desk-scale exhaustive enumeration of
stable graphs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import (
    DanglingReference,
    DisconnectedGraph,
    DuplicateId,
    NegativeGenus,
    OutOfSupportedRange,
)


@dataclass(frozen=True)
class TropicalGraph:
    """A connected genus-weighted multigraph with labeled weighted legs.

    Instances are built through :func:`validate`; the constructor does not
    re-check invariants.
    """

    vertices: tuple[tuple[str, int], ...]  # (id, genus)
    edges: tuple[tuple[str, tuple[str, str]], ...]  # (id, (end_a, end_b))
    legs: tuple[tuple[str, str, int], ...]  # (id, vertex, weight)

    # -- basic accessors -------------------------------------------------

    @property
    def vertex_ids(self) -> list[str]:
        return [v for v, _ in self.vertices]

    @property
    def edge_ids(self) -> list[str]:
        return [e for e, _ in self.edges]

    def genus_of(self, vid: str) -> int:
        for v, gen in self.vertices:
            if v == vid:
                return gen
        raise KeyError(vid)

    def ends_of(self, eid: str) -> tuple[str, str]:
        for e, ends in self.edges:
            if e == eid:
                return ends
        raise KeyError(eid)

    def is_loop(self, eid: str) -> bool:
        a, b = self.ends_of(eid)
        return a == b

    def legs_at(self, vid: str) -> list[tuple[str, int]]:
        return [(l, w) for l, v, w in self.legs if v == vid]

    def edge_ends_at(self, vid: str) -> int:
        """Number of edge-ends (half-edges from nodes) at a vertex;
        a self-loop counts twice."""
        n = 0
        for _, (a, b) in self.edges:
            n += (a == vid) + (b == vid)
        return n

    def valence(self, vid: str) -> int:
        """Edge-ends plus legs."""
        return self.edge_ends_at(vid) + len(self.legs_at(vid))

    @property
    def b1(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def genus(self) -> int:
        return sum(gen for _, gen in self.vertices) + self.b1

    @property
    def leg_weights(self) -> list[int]:
        return [w for _, _, w in self.legs]

    def is_stable(self) -> bool:
        return all(2 * gen - 2 + self.valence(v) > 0 for v, gen in self.vertices)

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "vertices": [{"id": v, "genus": gen} for v, gen in self.vertices],
            "edges": [{"id": e, "ends": [a, b]} for e, (a, b) in self.edges],
            "legs": [{"id": l, "vertex": v, "weight": w} for l, v, w in self.legs],
        }

    def to_dot(self) -> str:
        lines = ["graph G {"]
        for v, gen in self.vertices:
            lines.append(f'  "{v}" [label="{v}:g={gen}"];')
        for e, (a, b) in self.edges:
            lines.append(f'  "{a}" -- "{b}" [label="{e}"];')
        for l, v, w in self.legs:
            lines.append(f'  "leg_{l}" [shape=none, label="{l} (a={w})"];')
            lines.append(f'  "{v}" -- "leg_{l}" [style=dashed];')
        lines.append("}")
        return "\n".join(lines)


def validate(raw: dict) -> TropicalGraph:
    """Check a raw graph description and return an immutable graph.

    Raises DuplicateId, NegativeGenus, DanglingReference or
    DisconnectedGraph on invalid input.
    """
    vertices = []
    seen_v = set()
    for item in raw.get("vertices", []):
        vid = str(item["id"])
        gen = int(item["genus"])
        if vid in seen_v:
            raise DuplicateId(f"duplicate vertex id {vid!r}")
        if gen < 0:
            raise NegativeGenus(f"vertex {vid!r} has genus {gen}")
        seen_v.add(vid)
        vertices.append((vid, gen))
    if not vertices:
        raise DisconnectedGraph("graph has no vertices")

    edges = []
    seen_e = set()
    for item in raw.get("edges", []):
        eid = str(item["id"])
        if eid in seen_e:
            raise DuplicateId(f"duplicate edge id {eid!r}")
        seen_e.add(eid)
        a, b = (str(x) for x in item["ends"])
        for end in (a, b):
            if end not in seen_v:
                raise DanglingReference(f"edge {eid!r} references unknown vertex {end!r}")
        edges.append((eid, (a, b)))

    legs = []
    seen_l = set()
    for item in raw.get("legs", []):
        lid = str(item["id"])
        if lid in seen_l:
            raise DuplicateId(f"duplicate leg id {lid!r}")
        seen_l.add(lid)
        v = str(item["vertex"])
        if v not in seen_v:
            raise DanglingReference(f"leg {lid!r} references unknown vertex {v!r}")
        legs.append((lid, v, int(item["weight"])))

    # connectivity via BFS on edges
    adj: dict[str, set[str]] = {v: set() for v in seen_v}
    for _, (a, b) in edges:
        adj[a].add(b)
        adj[b].add(a)
    start = vertices[0][0]
    seen = {start}
    queue = [start]
    while queue:
        cur = queue.pop()
        for nb in adj[cur]:
            if nb not in seen:
                seen.add(nb)
                queue.append(nb)
    if len(seen) != len(vertices):
        raise DisconnectedGraph(
            f"graph is disconnected ({len(seen)} of {len(vertices)} vertices reachable)"
        )

    return TropicalGraph(tuple(vertices), tuple(edges), tuple(legs))


# ---------------------------------------------------------------------------
# Orientations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Orientation:
    """An acyclic orientation of the non-loop edges: edge-id -> (tail, head)."""

    direction: tuple[tuple[str, tuple[str, str]], ...]

    def as_dict(self) -> dict[str, tuple[str, str]]:
        return dict(self.direction)


def _is_acyclic(nverts: Sequence[str], arcs: list[tuple[str, str]]) -> bool:
    indeg = {v: 0 for v in nverts}
    out: dict[str, list[str]] = {v: [] for v in nverts}
    for t, h in arcs:
        out[t].append(h)
        indeg[h] += 1
    queue = [v for v in nverts if indeg[v] == 0]
    done = 0
    while queue:
        v = queue.pop()
        done += 1
        for h in out[v]:
            indeg[h] -= 1
            if indeg[h] == 0:
                queue.append(h)
    return done == len(indeg)


def acyclic_orientations(g: TropicalGraph) -> Iterator[Orientation]:
    """All acyclic orientations of the non-loop edges, lexicographic on the
    per-edge direction bits (0 keeps the listed end order)."""
    nonloop = [(e, ends) for e, ends in g.edges if ends[0] != ends[1]]
    vids = g.vertex_ids
    for bits in itertools.product((0, 1), repeat=len(nonloop)):
        arcs = []
        direction = []
        for bit, (e, (a, b)) in zip(bits, nonloop):
            t, h = (a, b) if bit == 0 else (b, a)
            arcs.append((t, h))
            direction.append((e, (t, h)))
        if _is_acyclic(vids, arcs):
            yield Orientation(tuple(direction))


# ---------------------------------------------------------------------------
# Stable graph enumeration
# ---------------------------------------------------------------------------

def _connected(nverts: int, pairs: Sequence[tuple[int, int]]) -> bool:
    parent = list(range(nverts))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = nverts
    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
            comps -= 1
    return comps == 1


def _multigraphs(nverts: int, nedges: int, degree_cap: list[int]) -> Iterator[tuple[tuple[int, int], ...]]:
    """Connected labeled multigraphs as nondecreasing tuples of vertex pairs."""
    pairs = [(i, j) for i in range(nverts) for j in range(i, nverts)]

    def rec(idx: int, remaining: int, chosen: list[tuple[int, int]], deg: list[int]):
        if remaining == 0:
            if _connected(nverts, chosen):
                yield tuple(chosen)
            return
        if idx == len(pairs):
            return
        a, b = pairs[idx]
        slots = 2 if a == b else 1
        for m in range(remaining + 1):
            if deg[a] + slots * m > degree_cap[a] or (a != b and deg[b] + m > degree_cap[b]):
                break
            deg2 = list(deg)
            deg2[a] += slots * m
            if a != b:
                deg2[b] += m
            # after the last pair touching a, its degree is final and must
            # be positive for connectivity
            if b == nverts - 1 and nverts > 1 and deg2[a] == 0:
                continue
            yield from rec(idx + 1, remaining - m, chosen + [(a, b)] * m, deg2)

    yield from rec(0, nedges, [], [0] * nverts)


def _canonical_key(genera: Sequence[int], pairs: Sequence[tuple[int, int]], legs: Sequence[int] = ()):
    """Canonical form of a decorated multigraph (optionally with a leg
    assignment vector), minimizing over vertex permutations that preserve
    the (genus, degree, loop-count) invariant classes."""
    n = len(genera)
    deg = [0] * n
    loops = [0] * n
    for a, b in pairs:
        if a == b:
            loops[a] += 1
            deg[a] += 2
        else:
            deg[a] += 1
            deg[b] += 1
    legcnt = [0] * n
    legids: list[list[int]] = [[] for _ in range(n)]
    for li, v in enumerate(legs):
        legcnt[v] += 1
        legids[v].append(li)
    inv = [(genera[i], deg[i], loops[i], tuple(legids[i])) for i in range(n)]
    classes: dict = {}
    for i in range(n):
        classes.setdefault(inv[i], []).append(i)
    groups = [classes[k] for k in sorted(classes)]

    best = None
    for parts in itertools.product(*(itertools.permutations(grp) for grp in groups)):
        perm = [0] * n  # old index -> new index
        pos = 0
        for grp, part in zip(groups, parts):
            for old in part:
                perm[old] = pos
                pos += 1
        new_pairs = sorted(tuple(sorted((perm[a], perm[b]))) for a, b in pairs)
        new_gen = [0] * n
        for old in range(n):
            new_gen[perm[old]] = genera[old]
        new_legs = tuple(perm[v] for v in legs)
        key = (tuple(new_gen), tuple(new_pairs), new_legs)
        if best is None or key < best:
            best = key
    return best


def _automorphisms(genera: Sequence[int], pairs: Sequence[tuple[int, int]]) -> list[list[int]]:
    """Vertex permutations preserving genera and the edge multiset."""
    n = len(genera)
    base = sorted(pairs)
    deg = [0] * n
    loops = [0] * n
    for a, b in pairs:
        if a == b:
            loops[a] += 1
            deg[a] += 2
        else:
            deg[a] += 1
            deg[b] += 1
    inv = [(genera[i], deg[i], loops[i]) for i in range(n)]
    classes: dict = {}
    for i in range(n):
        classes.setdefault(inv[i], []).append(i)
    groups = list(classes.values())
    autos = []
    for parts in itertools.product(*(itertools.permutations(grp) for grp in groups)):
        perm = [0] * n
        for grp, part in zip(groups, parts):
            for old, new in zip(grp, part):
                perm[old] = new
        if sorted(tuple(sorted((perm[a], perm[b]))) for a, b in pairs) == base:
            autos.append(perm)
    return autos


def enumerate_stable_graphs(g: int, n: int) -> list[TropicalGraph]:
    """All isomorphism classes of stable genus-g graphs with n labeled legs
    (leg weights set to 0; isomorphisms fix leg labels)."""
    if not (0 <= g <= 3 and 0 <= n <= 6):
        raise OutOfSupportedRange(f"(g, n) = ({g}, {n}) outside the supported range")
    if 2 * g - 2 + n <= 0:
        raise OutOfSupportedRange(f"2g - 2 + n must be positive, got {2 * g - 2 + n}")

    slack_total = 2 * g - 2 + n
    results: list[TropicalGraph] = []
    keys_seen = set()

    for nverts in range(1, slack_total + 1):
        # nondecreasing genus vectors with sum <= g
        for genera in itertools.combinations_with_replacement(range(g + 1), nverts):
            b1 = g - sum(genera)
            if b1 < 0:
                continue
            nedges = b1 + nverts - 1
            if nedges < 0:
                continue
            # each other vertex eats >= 1 of the stability slack
            caps = [
                slack_total - (nverts - 1) + 2 - 2 * genera[i]
                for i in range(nverts)
            ]
            if any(c < 0 for c in caps):
                continue
            seen_bare = set()
            for pairs in _multigraphs(nverts, nedges, caps):
                bare_key = _canonical_key(genera, pairs)
                if bare_key in seen_bare:
                    continue
                seen_bare.add(bare_key)
                autos = _automorphisms(genera, pairs)
                deg = [0] * nverts
                for a, b in pairs:
                    deg[a] += 2 if a == b else 1
                    if a != b:
                        deg[b] += 1
                seen_leg = set()
                for assign in itertools.product(range(nverts), repeat=n):
                    legcnt = [0] * nverts
                    for v in assign:
                        legcnt[v] += 1
                    if any(
                        2 * genera[i] - 2 + deg[i] + legcnt[i] <= 0
                        for i in range(nverts)
                    ):
                        continue
                    orbit_min = min(
                        tuple(perm[v] for v in assign) for perm in autos
                    )
                    if orbit_min in seen_leg:
                        continue
                    seen_leg.add(orbit_min)
                    key = _canonical_key(genera, pairs, orbit_min)
                    if key in keys_seen:
                        continue
                    keys_seen.add(key)
                    results.append(_build_graph(genera, pairs, orbit_min))

    results.sort(key=lambda gr: (len(gr.vertices), len(gr.edges), gr.to_json().__repr__()))
    return results


def _build_graph(genera: Sequence[int], pairs: Sequence[tuple[int, int]], legs: Sequence[int]) -> TropicalGraph:
    vertices = tuple((f"v{i}", genera[i]) for i in range(len(genera)))
    edges = tuple(
        (f"e{k}", (f"v{a}", f"v{b}")) for k, (a, b) in enumerate(sorted(pairs))
    )
    leg_tuple = tuple((f"x{i + 1}", f"v{v}", 0) for i, v in enumerate(legs))
    return TropicalGraph(vertices, edges, leg_tuple)


def with_leg_weights(g: TropicalGraph, weights: Sequence[int]) -> TropicalGraph:
    """The same graph with the listed leg weights substituted in order."""
    if len(weights) != len(g.legs):
        raise ValueError("weight list length must match the number of legs")
    legs = tuple((l, v, int(w)) for (l, v, _), w in zip(g.legs, weights))
    return TropicalGraph(g.vertices, g.edges, legs)

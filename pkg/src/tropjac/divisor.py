"""Piecewise-linear divisors on tropical graphs.

A PL divisor is an integer slope assignment on the (reference-oriented)
edges together with the leg weights.  From it we derive the minimal base
monoid (the quotient of Z^edges by the cycle relations), the vertex values,
the multidegree, and degeneracy diagnostics.

Slope convention: each edge is oriented by its listed end order
(tail = ends[0], head = ends[1]) and alpha(head) - alpha(tail) = s_e * l_e,
so the outgoing slope is +s_e at the tail and -s_e at the head.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Optional, Sequence

from .errors import Infeasible, LoopSlopeNonzero, NotATree, WeightSumMismatch
from .graph import TropicalGraph
from .lattice import LatticeQuotient, QElt, quotient
from .lp import solve_linear


@dataclass(frozen=True)
class Multidegree:
    """Integer degree per vertex; total equals the sum of the leg weights."""

    per_vertex: tuple[tuple[str, int], ...]

    @property
    def total(self) -> int:
        return sum(d for _, d in self.per_vertex)

    def of(self, vid: str) -> int:
        for v, d in self.per_vertex:
            if v == vid:
                return d
        raise KeyError(vid)

    def as_dict(self) -> dict[str, int]:
        return dict(self.per_vertex)

    def to_json(self) -> dict:
        return {"per_vertex": {v: d for v, d in self.per_vertex}, "total": self.total}


@dataclass(eq=False)
class PLDivisor:
    """A slope assignment with its derived base monoid and vertex values."""

    graph: TropicalGraph
    slopes: dict[str, int]
    base: LatticeQuotient
    values: dict[str, QElt]
    degenerate_edges: frozenset[str]
    sharp: bool
    relations: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def relationless(self) -> bool:
        """True iff the slopes are a difference of an integer vertex
        potential when all edge lengths are identified (the classical
        twist condition): every cycle relation has coefficient sum 0."""
        return all(sum(row) == 0 for row in self.relations)

    @property
    def nondegenerate(self) -> bool:
        return not self.degenerate_edges

    def is_totally_ordered(self) -> bool:
        vals = list(self.values.values())
        return all(
            self.base.comparable(vals[i], vals[j])
            for i in range(len(vals))
            for j in range(i + 1, len(vals))
        )

    def to_json(self) -> dict:
        return {
            "slopes": {e: s for e, s in sorted(self.slopes.items())},
            "base": self.base.to_json(),
            "values": {
                v: self.base.element_to_json(x) for v, x in sorted(self.values.items())
            },
            "degenerate_edges": sorted(self.degenerate_edges),
            "sharp": self.sharp,
            "relationless": self.relationless,
        }


def _spanning_tree(g: TropicalGraph, root: str) -> dict[str, tuple[str, str]]:
    """BFS tree: vertex -> (parent vertex, connecting edge id)."""
    incident: dict[str, list[tuple[str, str]]] = {v: [] for v in g.vertex_ids}
    for e, (a, b) in g.edges:
        if a != b:
            incident[a].append((e, b))
            incident[b].append((e, a))
    tree: dict[str, tuple[str, str]] = {}
    seen = {root}
    queue = [root]
    while queue:
        cur = queue.pop(0)
        for e, other in incident[cur]:
            if other not in seen:
                seen.add(other)
                tree[other] = (cur, e)
                queue.append(other)
    return tree


def _tree_path(tree: Mapping[str, tuple[str, str]], root: str, v: str) -> list[tuple[str, str, str]]:
    """Path from root to v as (edge, from_vertex, to_vertex) steps."""
    steps = []
    cur = v
    while cur != root:
        parent, e = tree[cur]
        steps.append((e, parent, cur))
        cur = parent
    steps.reverse()
    return steps


def make_divisor(g: TropicalGraph, slopes: Mapping[str, int]) -> PLDivisor:
    """Build a PL divisor from slopes, deriving the minimal base monoid.

    Cycle relations: for each non-tree edge f, the signed sum of
    s_e * l_e around the fundamental cycle of f vanishes.  Self-loops must
    carry slope 0 (their relation row is zero).
    """
    eids = g.edge_ids
    for e in eids:
        if e not in slopes:
            raise KeyError(f"missing slope for edge {e!r}")
    sl = {e: int(slopes[e]) for e in eids}
    for e in eids:
        if g.is_loop(e) and sl[e] != 0:
            raise LoopSlopeNonzero(f"self-loop {e!r} must have slope 0")

    eidx = {e: i for i, e in enumerate(eids)}
    root = min(g.vertex_ids)
    tree = _spanning_tree(g, root)
    tree_edges = {e for _, e in tree.values()}

    relations: list[tuple[int, ...]] = []
    for e, (a, b) in g.edges:
        if e in tree_edges:
            continue
        row = [0] * len(eids)
        if a == b:
            relations.append(tuple(row))  # slope 0, trivial relation
            continue
        # go along e from a to b, then back from b to a through the tree
        row[eidx[e]] += sl[e]
        path_a = _tree_path(tree, root, a)
        path_b = _tree_path(tree, root, b)
        # strip the common prefix
        k = 0
        while k < len(path_a) and k < len(path_b) and path_a[k] == path_b[k]:
            k += 1
        for pe, pf, pt in path_b[k:]:  # traversed backwards (b toward root)
            t, h = g.ends_of(pe)
            sign = -1 if (pf, pt) == (t, h) else 1
            row[eidx[pe]] += sign * sl[pe]
        for pe, pf, pt in path_a[k:]:  # traversed forwards (root toward a)
            t, h = g.ends_of(pe)
            sign = 1 if (pf, pt) == (t, h) else -1
            row[eidx[pe]] += sign * sl[pe]
        relations.append(tuple(row))

    base = quotient(len(eids), relations)

    # vertex values along the spanning tree
    raw_values: dict[str, list[int]] = {root: [0] * len(eids)}
    order = sorted(tree, key=lambda v: len(_tree_path(tree, root, v)))
    for v in order:
        parent, e = tree[v]
        vec = list(raw_values[parent])
        t, h = g.ends_of(e)
        if v == h:
            vec[eidx[e]] += sl[e]
        else:
            vec[eidx[e]] -= sl[e]
        raw_values[v] = vec
    values = {v: base.reduce(vec) for v, vec in raw_values.items()}

    degenerate = frozenset(eids[i] for i in base.degenerate)
    d = PLDivisor(
        graph=g,
        slopes=sl,
        base=base,
        values=values,
        degenerate_edges=degenerate,
        sharp=base.sharp,
        relations=tuple(relations),
    )
    _normalize_values(d)
    return d


def _normalize_values(d: PLDivisor) -> None:
    """Shift values so the minimum is 0 when they are totally ordered;
    otherwise the basepoint already sits at 0."""
    vids = sorted(d.values)
    if not d.is_totally_ordered():
        return
    lo = vids[0]
    for v in vids[1:]:
        if d.base.leq(d.values[v], d.values[lo]):
            lo = v
    shift = d.values[lo]
    if not shift.is_zero():
        for v in vids:
            d.values[v] = d.base.sub(d.values[v], shift)


def multidegree(d: PLDivisor) -> Multidegree:
    """D(v) = sum of outgoing slopes at v plus the leg weights at v."""
    g = d.graph
    deg = {v: 0 for v in g.vertex_ids}
    for e, (a, b) in g.edges:
        if a == b:
            continue
        deg[a] += d.slopes[e]
        deg[b] -= d.slopes[e]
    for _, v, w in g.legs:
        deg[v] += w
    return Multidegree(tuple((v, deg[v]) for v in g.vertex_ids))


def target_multidegree(g: TropicalGraph, kind: str) -> Multidegree:
    """The zero target (requires sum of weights 0) or the canonical target
    D(v) = 2 genus(v) - 2 + (#edge-ends at v), of total 2g - 2."""
    total_a = sum(g.leg_weights)
    if kind == "zero":
        if total_a != 0:
            raise WeightSumMismatch(f"leg weights sum to {total_a}, expected 0")
        return Multidegree(tuple((v, 0) for v in g.vertex_ids))
    if kind == "canonical":
        want = 2 * g.genus - 2
        if total_a != want:
            raise WeightSumMismatch(f"leg weights sum to {total_a}, expected {want}")
        return Multidegree(
            tuple((v, 2 * gen - 2 + g.edge_ends_at(v)) for v, gen in g.vertices)
        )
    raise ValueError(f"unknown target kind {kind!r}")


def residuals(g: TropicalGraph, target: Multidegree) -> dict[str, int]:
    """r(v) = target(v) - sum of leg weights at v: the part of the degree
    that the edge slopes must supply."""
    r = {v: target.of(v) for v in g.vertex_ids}
    for _, v, w in g.legs:
        r[v] -= w
    return r


def tree_twist(g: TropicalGraph, target: Multidegree) -> PLDivisor:
    """The unique slope assignment on a tree achieving the target
    multidegree: the slope out of the tail side of an edge equals the total
    residual of that side."""
    if g.b1 != 0:
        raise NotATree(f"graph has first Betti number {g.b1}")
    if target.total != sum(g.leg_weights):
        raise WeightSumMismatch(
            f"target total {target.total} != leg weight sum {sum(g.leg_weights)}"
        )
    r = residuals(g, target)
    slopes = {}
    for e, (a, b) in g.edges:
        side = _component_without(g, e, a)
        slopes[e] = sum(r[v] for v in side)
    return make_divisor(g, slopes)


def _component_without(g: TropicalGraph, cut_edge: str, start: str) -> set[str]:
    seen = {start}
    queue = [start]
    while queue:
        cur = queue.pop()
        for e, (a, b) in g.edges:
            if e == cut_edge or a == b:
                continue
            if a == cur and b not in seen:
                seen.add(b)
                queue.append(b)
            elif b == cur and a not in seen:
                seen.add(a)
                queue.append(a)
    return seen


@dataclass(frozen=True)
class HarmonicSolution:
    """Affine solution set of the edge-weighted harmonicity equations."""

    particular: tuple[tuple[str, Fraction], ...]
    kernel: tuple[tuple[tuple[str, Fraction], ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.kernel)

    def value(self, vid: str) -> Fraction:
        return dict(self.particular)[vid]


def harmonic_solve(
    g: TropicalGraph,
    lengths: Mapping[str, object],
    target: Multidegree,
) -> HarmonicSolution:
    """Solve the real relaxation: find x with, at every vertex v,
    sum over non-loop edges at v of (x(other) - x(v)) / length(e) equal to
    the residual r(v).  On a connected graph the solution set, when
    nonempty, is a line (constants)."""
    lens = {e: Fraction(lengths[e]) for e in g.edge_ids}
    if any(l <= 0 for l in lens.values()):
        raise ValueError("edge lengths must be positive")
    if target.total != sum(g.leg_weights):
        raise Infeasible(
            f"target total {target.total} != leg weight sum {sum(g.leg_weights)}"
        )
    vids = g.vertex_ids
    vidx = {v: i for i, v in enumerate(vids)}
    r = residuals(g, target)
    rows = []
    rhs = []
    for v in vids:
        row = [Fraction(0)] * len(vids)
        for e, (a, b) in g.edges:
            if a == b:
                continue
            w = Fraction(1) / lens[e]
            if a == v:
                row[vidx[b]] += w
                row[vidx[a]] -= w
            elif b == v:
                row[vidx[a]] += w
                row[vidx[b]] -= w
        rows.append(row)
        rhs.append(Fraction(r[v]))
    sol = solve_linear(rows, rhs)
    if sol is None:
        raise Infeasible("harmonicity equations are inconsistent")
    particular, kernel = sol
    return HarmonicSolution(
        particular=tuple((v, particular[vidx[v]]) for v in vids),
        kernel=tuple(
            tuple((v, k[vidx[v]]) for v in vids) for k in kernel
        ),
    )

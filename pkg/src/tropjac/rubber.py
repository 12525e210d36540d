"""Alignment and the rubber expansion.

A PL divisor is aligned when its vertex values are totally ordered.  The
subdivision fan refines the base cone of a divisor along the hyperplanes
alpha(v) = alpha(w), one cell per realizable total preorder of the vertex
values.  Each cell determines a division (the ordered distinct values), a
chain curve, and a subdivided source curve with level and expansion data.

All polyhedral work happens in the free coordinates of the sharpened base
monoid; torsion is rationally invisible and is dropped there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .divisor import PLDivisor
from .errors import DegenerateDivisor, NotTotallyOrdered, TooManyVertices
from .graph import TropicalGraph
from .lp import LinearSystem, rank

MAX_FAN_VERTICES = 6


# ---------------------------------------------------------------------------
# Alignment and the subdivision fan
# ---------------------------------------------------------------------------

def is_aligned(d: PLDivisor) -> bool:
    """True iff every pair of vertex values is comparable in the base."""
    return d.is_totally_ordered()


def _free_vectors(d: PLDivisor) -> tuple[dict[str, tuple[int, ...]], dict[str, tuple[int, ...]], int]:
    """Vertex values and edge-length generators in the free coordinates of
    the sharpened base."""
    S = d.base.sharpened
    r = S.free_rank
    vecs = {}
    for v, x in d.values.items():
        xs = d.base.sharpen_elt(x) if S is not d.base else x
        vecs[v] = xs.free
    gens = {}
    for i, e in enumerate(d.graph.edge_ids):
        gens[e] = S.generator_images[i].free
    return vecs, gens, r


@dataclass(frozen=True)
class Cell:
    """A realizable total preorder of the vertex values: ordered blocks of
    vertices, an interior witness in the dual of the free base, and exact
    dimension data."""

    blocks: tuple[tuple[str, ...], ...]
    witness: tuple[Fraction, ...]
    dimension: int
    maximal: bool
    sign_vector: tuple[int, ...]

    def level_of(self, vid: str) -> int:
        for i, blk in enumerate(self.blocks):
            if vid in blk:
                return i
        raise KeyError(vid)

    def to_json(self) -> dict:
        return {
            "blocks": [list(b) for b in self.blocks],
            "witness": [str(x) for x in self.witness],
            "dimension": self.dimension,
            "maximal": self.maximal,
            "sign_vector": list(self.sign_vector),
        }


@dataclass(frozen=True)
class SubdivisionFan:
    """All cells of the alignment subdivision of the base cone."""

    base_rank: int
    vertex_vectors: tuple[tuple[str, tuple[int, ...]], ...]
    cone_generators: tuple[tuple[str, tuple[int, ...]], ...]
    cells: tuple[Cell, ...]

    def maximal_cells(self) -> list[Cell]:
        return [c for c in self.cells if c.maximal]

    def _cell_system(self, cell: Cell) -> LinearSystem:
        vv = dict(self.vertex_vectors)
        ls = LinearSystem(self.base_rank)
        for blk in cell.blocks:
            rep = blk[0]
            for u in blk[1:]:
                ls.add_eq([a - b for a, b in zip(vv[u], vv[rep])])
        for t in range(len(cell.blocks) - 1):
            lo = vv[cell.blocks[t][0]]
            hi = vv[cell.blocks[t + 1][0]]
            ls.add_ge([a - b for a, b in zip(hi, lo)], strict=True)
        for _, w in self.cone_generators:
            ls.add_ge(list(w))
        return ls

    def _systems(self) -> list[LinearSystem]:
        cached = getattr(self, "_systems_cache", None)
        if cached is None:
            cached = [self._cell_system(c) for c in self.cells]
            object.__setattr__(self, "_systems_cache", cached)
        return cached

    def membership(self, point: Sequence[Fraction]) -> tuple[list[int], list[int]]:
        """Indices of cells containing the point: closed membership and
        open membership (strict separations satisfied strictly)."""
        closed, open_ = [], []
        for i, ls in enumerate(self._systems()):
            if ls.contains(point):
                closed.append(i)
                if ls.contains(point, strict=True):
                    open_.append(i)
        return closed, open_

    def to_json(self) -> dict:
        return {
            "base_rank": self.base_rank,
            "vertex_vectors": {v: list(x) for v, x in self.vertex_vectors},
            "cone_generators": {e: list(w) for e, w in self.cone_generators},
            "cells": [c.to_json() for c in self.cells],
            "maximal_count": len(self.maximal_cells()),
        }


def _ordered_partitions(items: Sequence[str]):
    """All total preorders as ordered set partitions (blocks sorted)."""
    n = len(items)
    for k in range(1, n + 1):
        for assign in itertools.product(range(k), repeat=n):
            if set(assign) != set(range(k)):
                continue
            blocks = [tuple(sorted(items[i] for i in range(n) if assign[i] == b)) for b in range(k)]
            yield tuple(blocks)


def rub_subdivision(d: PLDivisor) -> SubdivisionFan:
    """Subdivide the base cone along the hyperplanes alpha(v) = alpha(w),
    keeping exactly the total preorders with a strictly feasible point."""
    vids = sorted(d.graph.vertex_ids)
    if len(vids) > MAX_FAN_VERTICES:
        raise TooManyVertices(f"{len(vids)} vertices exceeds the guard {MAX_FAN_VERTICES}")
    vv, gens, r = _free_vectors(d)
    pair_list = [(u, w) for i, u in enumerate(vids) for w in vids[i + 1:]]

    cells = []
    seen_blocks = set()
    for blocks in _ordered_partitions(vids):
        if blocks in seen_blocks:
            continue
        seen_blocks.add(blocks)
        ls = LinearSystem(r)
        eq_rows = []
        for blk in blocks:
            rep = blk[0]
            for u in blk[1:]:
                row = [a - b for a, b in zip(vv[u], vv[rep])]
                ls.add_eq(row)
                if any(row):
                    eq_rows.append(row)
        sep_rows = []
        for t in range(len(blocks) - 1):
            row = [a - b for a, b in zip(vv[blocks[t + 1][0]], vv[blocks[t][0]])]
            ls.add_ge(row, strict=True)
            sep_rows.append(row)
        cone_rows = [list(gens[e]) for e in d.graph.edge_ids]
        for row in cone_rows:
            ls.add_ge(row)
        witness = ls.feasible_point()
        if witness is None:
            continue
        # implicit equalities among the closed inequalities cut the dimension
        implicit = list(eq_rows)
        for row in sep_rows + cone_rows:
            if not any(row):
                continue
            ext = ls.extremes(row)
            if ext is not None and ext[1] == 0:
                implicit.append(row)
        dim = r - rank(implicit) if implicit else r
        level = {v: i for i, blk in enumerate(blocks) for v in blk}
        sign = tuple(
            (level[w] > level[u]) - (level[w] < level[u]) for u, w in pair_list
        )
        cells.append(
            Cell(
                blocks=blocks,
                witness=tuple(witness),
                dimension=dim,
                maximal=dim == r,
                sign_vector=sign,
            )
        )
    cells.sort(key=lambda c: (-c.dimension, c.sign_vector))
    return SubdivisionFan(
        base_rank=r,
        vertex_vectors=tuple((v, vv[v]) for v in vids),
        cone_generators=tuple((e, gens[e]) for e in d.graph.edge_ids),
        cells=tuple(cells),
    )


# ---------------------------------------------------------------------------
# Divisions and chain curves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Division:
    """Ordered distinct values gamma_0 = 0 < ... < gamma_m and their gaps,
    as integer vectors in the free coordinates of the sharpened base
    (well defined modulo the cell's equality lattice)."""

    levels: tuple[tuple[int, ...], ...]
    gaps: tuple[tuple[int, ...], ...]
    blocks: tuple[tuple[str, ...], ...]

    def to_json(self) -> dict:
        return {
            "levels": [list(l) for l in self.levels],
            "gaps": [list(g) for g in self.gaps],
            "blocks": [list(b) for b in self.blocks],
        }


def _aligned_blocks(d: PLDivisor) -> tuple[tuple[str, ...], ...]:
    """Order the vertices of an aligned divisor into equal-value blocks."""
    if not d.is_totally_ordered():
        raise NotTotallyOrdered("vertex values are not totally ordered")
    vids = sorted(d.values)
    S = d.base.sharpened
    keyed: dict[tuple[int, ...], list[str]] = {}
    for v in vids:
        x = d.base.sharpen_elt(d.values[v])
        keyed.setdefault(x.free + x.torsion, []).append(v)
    reps = {k: vs[0] for k, vs in keyed.items()}

    def below(ka, kb) -> bool:
        return d.base.leq(d.values[reps[ka]], d.values[reps[kb]])

    keys = sorted(keyed, key=lambda k: sum(1 for k2 in keyed if below(k2, k)))
    return tuple(tuple(sorted(keyed[k])) for k in keys)


def division_of(d: PLDivisor, cell: Optional[Cell] = None) -> Division:
    """The division of a totally ordered cell: distinct values normalized
    to start at 0, with their gap vectors."""
    if cell is not None:
        blocks = cell.blocks
    else:
        blocks = _aligned_blocks(d)
    vv, _, _ = _free_vectors(d)
    raw = [vv[blk[0]] for blk in blocks]
    base0 = raw[0]
    levels = [tuple(a - b for a, b in zip(x, base0)) for x in raw]
    gaps = [
        tuple(a - b for a, b in zip(levels[t + 1], levels[t]))
        for t in range(len(levels) - 1)
    ]
    if any(not any(g) for g in gaps):
        raise NotTotallyOrdered("consecutive levels coincide")
    return Division(levels=tuple(levels), gaps=tuple(gaps), blocks=blocks)


@dataclass(frozen=True)
class ChainCurve:
    """The 2-marked semistable genus-0 chain of a division: one component
    per level, one node per gap carrying its smoothing parameter."""

    components: tuple[str, ...]
    nodes: tuple[tuple[str, tuple[int, ...]], ...]
    markings: tuple[tuple[str, str], ...]

    def to_json(self) -> dict:
        return {
            "components": list(self.components),
            "nodes": [{"id": n, "parameter": list(p)} for n, p in self.nodes],
            "markings": [{"id": m, "component": c} for m, c in self.markings],
        }


def chain_curve(dv: Division) -> ChainCurve:
    m = len(dv.gaps)
    components = tuple(f"U{i}" for i in range(m + 1))
    nodes = tuple((f"V{i + 1}", dv.gaps[i]) for i in range(m))
    markings = (("m0", components[0]), ("minf", components[-1]))
    return ChainCurve(components=components, nodes=nodes, markings=markings)


# ---------------------------------------------------------------------------
# Curve subdivision and rubber data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RubberData:
    """The subdivided source curve with its level map onto the chain."""

    curve: TropicalGraph
    original: TropicalGraph
    division: Division
    level_map: tuple[tuple[str, int], ...]
    expansion: tuple[tuple[str, int], ...]  # non-vertical edge -> |slope|
    extension_index: int
    piece_of: tuple[tuple[str, str], ...]  # curve edge -> original edge
    inserted: tuple[str, ...]
    no_vertex_on_node: bool
    every_level_covered_by_stable: bool

    def levels(self) -> dict[str, int]:
        return dict(self.level_map)

    def expansion_factors(self) -> dict[str, int]:
        return dict(self.expansion)

    def to_json(self) -> dict:
        return {
            "curve": self.curve.to_json(),
            "division": self.division.to_json(),
            "level_map": {v: l for v, l in self.level_map},
            "expansion_factors": {e: f for e, f in self.expansion},
            "lattice_extension_index": self.extension_index,
            "piece_of": {e: o for e, o in self.piece_of},
            "inserted_vertices": list(self.inserted),
            "flags": {
                "no_vertex_on_node": self.no_vertex_on_node,
                "every_level_covered_by_stable": self.every_level_covered_by_stable,
            },
        }


def _content(vec: Sequence[int]) -> int:
    g = 0
    for x in vec:
        g = math.gcd(g, abs(x))
    return g


def subdivide_curve(d: PLDivisor, cell: Optional[Cell] = None) -> RubberData:
    """Insert genus-0 valence-2 vertices where an edge crosses intermediate
    division levels, so that every edge of the result lies in a single gap
    or is vertical.  Records expansion factors and the finite lattice index
    needed when a gap is not divisible by the slope."""
    if d.degenerate_edges:
        raise DegenerateDivisor(
            f"degenerate edges {sorted(d.degenerate_edges)} admit no rubber model"
        )
    dv = division_of(d, cell)
    level = {v: i for i, blk in enumerate(dv.blocks) for v in blk}

    g = d.graph
    new_vertices = list(g.vertices)
    new_edges: list[tuple[str, tuple[str, str]]] = []
    level_map = {v: level[v] for v in g.vertex_ids}
    expansion: dict[str, int] = {}
    piece_of: dict[str, str] = {}
    inserted: list[str] = []
    ext_index = 1

    for e, (a, b) in g.edges:
        i, j = (level[a], level[b]) if a != b else (level[a], level[a])
        if i == j:
            new_edges.append((e, (a, b)))
            piece_of[e] = e
            continue
        s = abs(d.slopes[e])
        assert s > 0, "level-crossing edge must have nonzero slope"
        lo_v, hi_v = (a, b) if i < j else (b, a)
        lo, hi = min(i, j), max(i, j)
        chain = [lo_v]
        for lvl in range(lo + 1, hi):
            nv = f"{e}@{lvl}"
            new_vertices.append((nv, 0))
            level_map[nv] = lvl
            inserted.append(nv)
            chain.append(nv)
        chain.append(hi_v)
        for t in range(hi - lo):
            pid = e if hi - lo == 1 else f"{e}:{t}"
            new_edges.append((pid, (chain[t], chain[t + 1])))
            piece_of[pid] = e
            expansion[pid] = s
            c = _content(dv.gaps[lo + t])
            ext_index = _lcm(ext_index, s // math.gcd(s, c))

    curve = TropicalGraph(tuple(new_vertices), tuple(new_edges), g.legs)

    nlevels = len(dv.levels)
    covered = []
    for l in range(nlevels):
        ok = any(
            level[v] == l and 2 * gen - 2 + g.valence(v) > 0
            for v, gen in g.vertices
        )
        covered.append(ok)

    return RubberData(
        curve=curve,
        original=g,
        division=dv,
        level_map=tuple(sorted(level_map.items())),
        expansion=tuple(sorted(expansion.items())),
        extension_index=ext_index,
        piece_of=tuple(sorted(piece_of.items())),
        inserted=tuple(inserted),
        no_vertex_on_node=True,
        every_level_covered_by_stable=all(covered),
    )


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


def obstruction_ranks(rd: RubberData, g: int, n: int) -> dict[str, int]:
    """Integer rank bookkeeping of the rubber obstruction theory."""
    primary = len(rd.expansion)
    return {
        "vdim": 2 * g - 3 + n,
        "h1_rank": g,
        "primary_obstruction_rank": primary,
        "euler_fdagger": (1 - g) + primary,
    }

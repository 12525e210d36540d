"""Finite enumeration of slope assignments with a prescribed multidegree.

The peeling algorithm runs over acyclic orientations: along each oriented
non-loop edge the value is non-decreasing (slope >= 0), every finite
orientation has a source vertex, and the outgoing slopes at a source must
compose its residual degree.  A brute-force oracle over a certified slope
box validates the peeling on small graphs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

from .divisor import Multidegree, PLDivisor, make_divisor, residuals
from .errors import BoundTooSmall, TooManyEdges, WeightSumMismatch
from .graph import TropicalGraph, _is_acyclic, acyclic_orientations

MAX_EDGES = 8


@dataclass(frozen=True)
class SlopeAssignment:
    """A slope vector (graph edge order) with base-monoid diagnostics."""

    slopes: tuple[tuple[str, int], ...]
    sharp: bool
    degenerate_edges: frozenset[str]
    relationless: bool

    @property
    def nondegenerate(self) -> bool:
        return not self.degenerate_edges

    def slope_vector(self) -> tuple[int, ...]:
        return tuple(s for _, s in self.slopes)

    def to_json(self) -> dict:
        return {
            "slopes": {e: s for e, s in self.slopes},
            "sharp": self.sharp,
            "degenerate_edges": sorted(self.degenerate_edges),
            "relationless": self.relationless,
        }


def _check_target(g: TropicalGraph, target: Multidegree) -> None:
    if target.total != sum(g.leg_weights):
        raise WeightSumMismatch(
            f"target total {target.total} != leg weight sum {sum(g.leg_weights)}"
        )


def _diagnose(g: TropicalGraph, vec: Sequence[int]) -> SlopeAssignment:
    eids = g.edge_ids
    slopes = {e: v for e, v in zip(eids, vec)}
    d = make_divisor(g, slopes)
    return SlopeAssignment(
        slopes=tuple((e, slopes[e]) for e in eids),
        sharp=d.sharp,
        degenerate_edges=d.degenerate_edges,
        relationless=d.relationless,
    )


def _finalize(g: TropicalGraph, vectors: set[tuple[int, ...]]) -> list[SlopeAssignment]:
    return [_diagnose(g, vec) for vec in sorted(vectors)]


def enumerate_slopes(g: TropicalGraph, target: Multidegree) -> list[SlopeAssignment]:
    """All slope assignments with the given multidegree, by source peeling
    over acyclic orientations; deduplicated, lexicographic order."""
    if len(g.edges) > MAX_EDGES:
        raise TooManyEdges(f"{len(g.edges)} edges exceeds the guard {MAX_EDGES}")
    _check_target(g, target)
    r0 = residuals(g, target)
    eids = g.edge_ids
    eidx = {e: i for i, e in enumerate(eids)}
    found: set[tuple[int, ...]] = set()

    for orient in acyclic_orientations(g):
        direction = orient.as_dict()
        for oriented in _peel(g, direction, dict(r0)):
            vec = [0] * len(eids)
            for e, s in oriented.items():
                t, h = direction[e]
                vec[eidx[e]] = s if (t, h) == g.ends_of(e) else -s
            found.add(tuple(vec))
    return _finalize(g, found)


def _peel(
    g: TropicalGraph,
    direction: dict[str, tuple[str, str]],
    res: dict[str, int],
) -> Iterator[dict[str, int]]:
    """Yield oriented slope maps (slope >= 0 per oriented edge) realizing
    the residuals, by repeatedly resolving a source vertex."""

    def rec(alive: set[str], edges_left: set[str], res: dict[str, int], acc: dict[str, int]):
        if not alive:
            yield dict(acc)
            return
        # deterministic source: lex-smallest vertex with no incoming edge
        source = None
        for v in sorted(alive):
            if not any(direction[e][1] == v for e in edges_left):
                source = v
                break
        assert source is not None, "acyclic orientation must have a source"
        out = sorted(e for e in edges_left if direction[e][0] == source)
        need = res[source]
        if need < 0:
            return
        if not out:
            if need == 0:
                yield from rec(alive - {source}, edges_left, res, acc)
            return
        for parts in _compositions(need, len(out)):
            res2 = dict(res)
            acc2 = dict(acc)
            for e, s in zip(out, parts):
                acc2[e] = s
                res2[direction[e][1]] += s
            yield from rec(alive - {source}, edges_left - set(out), res2, acc2)

    yield from rec(set(g.vertex_ids), set(direction), res, {})


def _compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def certified_bound(g: TropicalGraph, target: Multidegree) -> int:
    """B* = sum of |residual| over vertices: the total absolute residual
    never increases during peeling, so every produced slope is <= B*."""
    r = residuals(g, target)
    return sum(abs(x) for x in r.values())


def brute_force_slopes(g: TropicalGraph, target: Multidegree, bound: int) -> list[SlopeAssignment]:
    """Oracle: exhaustive search of the slope box [-B, B]^edges filtered by
    the multidegree condition and admissibility (orienting the nonzero
    slopes in the direction of increase must be acyclic)."""
    if len(g.edges) > MAX_EDGES:
        raise TooManyEdges(f"{len(g.edges)} edges exceeds the guard {MAX_EDGES}")
    _check_target(g, target)
    bstar = certified_bound(g, target)
    if bound < bstar:
        raise BoundTooSmall(f"bound {bound} is below the certified bound {bstar}")
    r = residuals(g, target)
    eids = g.edge_ids
    nonloop = [e for e in eids if not g.is_loop(e)]
    # last position at which each vertex's outgoing sum becomes final
    last_idx: dict[str, int] = {}
    for i, e in enumerate(nonloop):
        a, b = g.ends_of(e)
        last_idx[a] = i
        last_idx[b] = i
    isolated = [v for v in g.vertex_ids if v not in last_idx]

    found: set[tuple[int, ...]] = set()
    if any(r[v] != 0 for v in isolated):
        return []

    outsum = {v: 0 for v in g.vertex_ids}

    def rec(i: int, assigned: list[int]):
        if i == len(nonloop):
            vec = [0] * len(eids)
            for e, s in zip(nonloop, assigned):
                vec[eids.index(e)] = s
            if _admissible(g, dict(zip(nonloop, assigned))):
                found.add(tuple(vec))
            return
        e = nonloop[i]
        a, b = g.ends_of(e)
        for s in range(-bound, bound + 1):
            outsum[a] += s
            outsum[b] -= s
            ok = True
            for v in (a, b):
                if last_idx.get(v) == i and outsum[v] != r[v]:
                    ok = False
            if ok:
                rec(i + 1, assigned + [s])
            outsum[a] -= s
            outsum[b] += s

    rec(0, [])
    return _finalize(g, found)


def _admissible(g: TropicalGraph, slopes: dict[str, int]) -> bool:
    """Nonzero slopes, oriented toward increase, must form an acyclic
    digraph: values along a directed cycle would strictly increase."""
    arcs = []
    for e, s in slopes.items():
        if s == 0:
            continue
        a, b = g.ends_of(e)
        arcs.append((a, b) if s > 0 else (b, a))
    return _is_acyclic(g.vertex_ids, arcs)

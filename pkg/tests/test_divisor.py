import random
from fractions import Fraction

import pytest

from tropjac.divisor import (
    Multidegree,
    harmonic_solve,
    make_divisor,
    multidegree,
    residuals,
    target_multidegree,
    tree_twist,
)
from tropjac.errors import (
    Infeasible,
    LoopSlopeNonzero,
    NotATree,
    WeightSumMismatch,
)
from tropjac.graph import validate


def theta(k=3):
    return validate(
        {
            "vertices": [{"id": "v", "genus": 0}, {"id": "w", "genus": 0}],
            "edges": [
                {"id": "e1", "ends": ["v", "w"]},
                {"id": "e2", "ends": ["v", "w"]},
            ],
            "legs": [
                {"id": "x1", "vertex": "v", "weight": k},
                {"id": "x2", "vertex": "w", "weight": -k},
            ],
        }
    )


def path3():
    return validate(
        {
            "vertices": [{"id": f"v{i}", "genus": 0} for i in (1, 2, 3)],
            "edges": [
                {"id": "e1", "ends": ["v1", "v2"]},
                {"id": "e2", "ends": ["v2", "v3"]},
            ],
            "legs": [
                {"id": "x1", "vertex": "v1", "weight": 1},
                {"id": "x2", "vertex": "v3", "weight": -1},
            ],
        }
    )


def _random_tree(rng, nverts, wlo=-3, whi=3):
    vertices = [{"id": f"v{i}", "genus": rng.randint(0, 1)} for i in range(nverts)]
    edges = [
        {"id": f"e{i}", "ends": [f"v{rng.randint(0, i - 1)}", f"v{i}"]}
        for i in range(1, nverts)
    ]
    nlegs = rng.randint(1, 3)
    legs = [
        {
            "id": f"x{j}",
            "vertex": f"v{rng.randint(0, nverts - 1)}",
            "weight": rng.randint(wlo, whi),
        }
        for j in range(nlegs)
    ]
    return validate({"vertices": vertices, "edges": edges, "legs": legs})


class TestMakeDivisor:
    def test_theta_minimal_monoid(self):
        d = make_divisor(theta(3), {"e1": -1, "e2": -2})
        assert d.base.free_rank == 1
        assert d.base.moduli == ()
        # l1 = 2 l2 in the quotient
        q = d.base
        assert q.add(q.generator(1), q.generator(1)) == q.generator(0)
        assert not d.degenerate_edges
        assert d.sharp

    def test_theta_degenerate(self):
        d = make_divisor(theta(1), {"e1": 0, "e2": -1})
        assert d.degenerate_edges == {"e2"}

    def test_tree_free_base(self):
        d = make_divisor(path3(), {"e1": 1, "e2": 1})
        assert d.base.free_rank == 2
        assert all(not any(r) for r in d.relations) or not d.relations
        assert d.relationless

    def test_loop_slope_guard(self):
        g = validate(
            {
                "vertices": [{"id": "a", "genus": 1}],
                "edges": [{"id": "l", "ends": ["a", "a"]}],
                "legs": [{"id": "x", "vertex": "a", "weight": 0}],
            }
        )
        with pytest.raises(LoopSlopeNonzero):
            make_divisor(g, {"l": 1})
        d = make_divisor(g, {"l": 0})
        assert multidegree(d).as_dict() == {"a": 0}

    def test_values_edge_relation(self):
        # alpha(head) - alpha(tail) = s * l_e before normalization shifts
        d = make_divisor(path3(), {"e1": 1, "e2": 1})
        q = d.base
        diff = q.sub(d.values["v2"], d.values["v1"])
        assert diff == q.generator(0)
        diff2 = q.sub(d.values["v3"], d.values["v2"])
        assert diff2 == q.generator(1)

    def test_normalized_minimum_zero(self):
        d = make_divisor(theta(3), {"e1": -1, "e2": -2})
        vals = list(d.values.values())
        zero = d.base.zero()
        assert any(v == zero for v in vals)
        lo = min(vals, key=lambda v: sum(v.free))
        assert all(d.base.leq(lo, v) for v in vals)

    def test_base_invariant_under_relabeling(self):
        # same theta graph with vertex ids swapped: canonical invariants agree
        g2 = validate(
            {
                "vertices": [{"id": "b", "genus": 0}, {"id": "a", "genus": 0}],
                "edges": [
                    {"id": "e1", "ends": ["b", "a"]},
                    {"id": "e2", "ends": ["b", "a"]},
                ],
                "legs": [
                    {"id": "x1", "vertex": "b", "weight": 3},
                    {"id": "x2", "vertex": "a", "weight": -3},
                ],
            }
        )
        d1 = make_divisor(theta(3), {"e1": -1, "e2": -2})
        d2 = make_divisor(g2, {"e1": -1, "e2": -2})
        assert d1.base.free_rank == d2.base.free_rank
        assert d1.base.moduli == d2.base.moduli
        assert d1.sharp == d2.sharp
        assert len(d1.degenerate_edges) == len(d2.degenerate_edges)


class TestMultidegree:
    def test_theta(self):
        d = make_divisor(theta(3), {"e1": -1, "e2": -2})
        assert multidegree(d).as_dict() == {"v": 0, "w": 0}

    def test_zero_slopes(self):
        g = path3()
        d = make_divisor(g, {"e1": 0, "e2": 0})
        assert multidegree(d).as_dict() == {"v1": 1, "v2": 0, "v3": -1}

    def test_conservation(self):
        rng = random.Random(7)
        for _ in range(25):
            g = _random_tree(rng, rng.randint(2, 6))
            slopes = {e: rng.randint(-3, 3) for e in g.edge_ids}
            d = make_divisor(g, slopes)
            assert multidegree(d).total == sum(g.leg_weights)


class TestTargetMultidegree:
    def test_zero(self):
        t = target_multidegree(theta(3), "zero")
        assert t.as_dict() == {"v": 0, "w": 0}

    def test_zero_mismatch(self):
        g = validate(
            {
                "vertices": [{"id": "v", "genus": 1}],
                "legs": [{"id": "x", "vertex": "v", "weight": 1}],
            }
        )
        with pytest.raises(WeightSumMismatch):
            target_multidegree(g, "zero")

    def test_canonical_two_vertices(self):
        # genera (1, 0), one edge, three legs on v2; edge-end count sets
        # D = (2*1-2+1, 2*0-2+1) = (1, -1), total 0 = 2g-2 for g = 1
        g = validate(
            {
                "vertices": [{"id": "v1", "genus": 1}, {"id": "v2", "genus": 0}],
                "edges": [{"id": "e", "ends": ["v1", "v2"]}],
                "legs": [
                    {"id": "x1", "vertex": "v2", "weight": 0},
                    {"id": "x2", "vertex": "v2", "weight": 0},
                    {"id": "x3", "vertex": "v2", "weight": 0},
                ],
            }
        )
        t = target_multidegree(g, "canonical")
        assert t.as_dict() == {"v1": 1, "v2": -1}
        assert t.total == 2 * g.genus - 2

    def test_canonical_smooth(self):
        g = validate(
            {
                "vertices": [{"id": "v", "genus": 1}],
                "legs": [{"id": "x", "vertex": "v", "weight": 0}],
            }
        )
        assert target_multidegree(g, "canonical").as_dict() == {"v": 0}

    def test_canonical_conservation(self):
        rng = random.Random(3)
        for _ in range(20):
            g = _random_tree(rng, rng.randint(2, 6), 0, 0)
            want = 2 * g.genus - 2
            # shift one leg weight to hit the canonical total
            legs = list(g.legs)
            lid, v, _ = legs[0]
            legs[0] = (lid, v, want)
            g2 = validate(
                {
                    "vertices": [{"id": a, "genus": b} for a, b in g.vertices],
                    "edges": [{"id": e, "ends": list(x)} for e, x in g.edges],
                    "legs": [{"id": a, "vertex": b, "weight": c} for a, b, c in legs],
                }
            )
            t = target_multidegree(g2, "canonical")
            assert t.total == want


class TestTreeTwist:
    def test_two_vertex_example(self):
        g = validate(
            {
                "vertices": [{"id": "v1", "genus": 0}, {"id": "v2", "genus": 0}],
                "edges": [{"id": "e", "ends": ["v1", "v2"]}],
                "legs": [
                    {"id": "x1", "vertex": "v1", "weight": 2},
                    {"id": "x2", "vertex": "v1", "weight": 3},
                    {"id": "x3", "vertex": "v2", "weight": -5},
                ],
            }
        )
        t = target_multidegree(g, "zero")
        d = tree_twist(g, t)
        # with outgoing slope +s at the listed tail, the unique solution is -5
        assert d.slopes == {"e": -5}
        assert multidegree(d).as_dict() == {"v1": 0, "v2": 0}

    def test_all_zero(self):
        g = path3()
        zero_legs = validate(
            {
                "vertices": [{"id": v, "genus": gen} for v, gen in g.vertices],
                "edges": [{"id": e, "ends": list(x)} for e, x in g.edges],
                "legs": [],
            }
        )
        t = Multidegree(tuple((v, 0) for v in zero_legs.vertex_ids))
        d = tree_twist(zero_legs, t)
        assert all(s == 0 for s in d.slopes.values())

    def test_path_flow(self):
        g = path3()
        d = tree_twist(g, target_multidegree(g, "zero"))
        # residuals (-1, 0, 1): slope out of {v1} is -1, out of {v1,v2} is -1
        assert d.slopes == {"e1": -1, "e2": -1}
        assert multidegree(d).as_dict() == {"v1": 0, "v2": 0, "v3": 0}

    def test_not_a_tree(self):
        with pytest.raises(NotATree):
            tree_twist(theta(3), target_multidegree(theta(3), "zero"))

    def test_weight_mismatch(self):
        g = path3()
        bad = Multidegree(tuple((v, 1) for v in g.vertex_ids))
        with pytest.raises(WeightSumMismatch):
            tree_twist(g, bad)

    def test_random_trees_hit_target(self):
        rng = random.Random(11)
        for _ in range(50):
            g = _random_tree(rng, rng.randint(2, 8))
            total = sum(g.leg_weights)
            tgt = {v: 0 for v in g.vertex_ids}
            tgt[g.vertex_ids[0]] = total
            t = Multidegree(tuple(tgt.items()))
            d = tree_twist(g, t)
            assert multidegree(d).as_dict() == tgt


class TestHarmonic:
    def test_recovers_divisor_values(self):
        g = path3()
        d = make_divisor(g, {"e1": 1, "e2": 1})
        t = multidegree(d)
        h = harmonic_solve(g, {e: 1 for e in g.edge_ids}, t)
        assert h.dimension == 1
        # integer-sloped values with unit lengths: differences match slopes
        assert h.value("v2") - h.value("v1") == 1
        assert h.value("v3") - h.value("v2") == 1

    def test_zero_data_constants(self):
        g = validate(
            {
                "vertices": [{"id": "a", "genus": 0}, {"id": "b", "genus": 0}],
                "edges": [{"id": "e", "ends": ["a", "b"]}],
            }
        )
        t = Multidegree((("a", 0), ("b", 0)))
        h = harmonic_solve(g, {"e": Fraction(1, 2)}, t)
        assert h.dimension == 1
        assert h.value("a") == h.value("b")

    def test_mismatch_infeasible(self):
        g = path3()
        bad = Multidegree(tuple((v, 1) for v in g.vertex_ids))
        with pytest.raises(Infeasible):
            harmonic_solve(g, {e: 1 for e in g.edge_ids}, bad)


class TestResiduals:
    def test_theta(self):
        g = theta(3)
        r = residuals(g, target_multidegree(g, "zero"))
        assert r == {"v": -3, "w": 3}

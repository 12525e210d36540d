import pytest

from tropjac.divisor import Multidegree, make_divisor, multidegree, target_multidegree
from tropjac.enumeration import (
    brute_force_slopes,
    certified_bound,
    enumerate_slopes,
)
from tropjac.errors import BoundTooSmall, TooManyEdges, WeightSumMismatch
from tropjac.graph import enumerate_stable_graphs, validate, with_leg_weights


def theta(k):
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


class TestEnumerate:
    def test_theta_three(self):
        g = theta(3)
        out = enumerate_slopes(g, target_multidegree(g, "zero"))
        assert [a.slope_vector() for a in out] == [
            (-3, 0),
            (-2, -1),
            (-1, -2),
            (0, -3),
        ]
        nondeg = [a.slope_vector() for a in out if a.nondegenerate]
        assert nondeg == [(-2, -1), (-1, -2)]

    def test_theta_one(self):
        g = theta(1)
        out = enumerate_slopes(g, target_multidegree(g, "zero"))
        assert [a.slope_vector() for a in out] == [(-1, 0), (0, -1)]
        assert all(not a.nondegenerate for a in out)
        assert sum(a.relationless for a in out) == 0

    def test_theta_two_relationless(self):
        g = theta(2)
        out = enumerate_slopes(g, target_multidegree(g, "zero"))
        rl = [a.slope_vector() for a in out if a.relationless]
        assert rl == [(-1, -1)]

    def test_tree_zero_unique(self):
        g = validate(
            {
                "vertices": [{"id": "a", "genus": 1}, {"id": "b", "genus": 1}],
                "edges": [{"id": "e", "ends": ["a", "b"]}],
            }
        )
        t = Multidegree((("a", 0), ("b", 0)))
        out = enumerate_slopes(g, t)
        assert len(out) == 1 and out[0].slope_vector() == (0,)

    def test_guards(self):
        g = theta(3)
        bad = Multidegree((("v", 1), ("w", 0)))
        with pytest.raises(WeightSumMismatch):
            enumerate_slopes(g, bad)
        big = validate(
            {
                "vertices": [{"id": "a", "genus": 1}, {"id": "b", "genus": 1}],
                "edges": [
                    {"id": f"e{i}", "ends": ["a", "b"]} for i in range(9)
                ],
            }
        )
        with pytest.raises(TooManyEdges):
            enumerate_slopes(big, Multidegree((("a", 0), ("b", 0))))

    def test_multidegree_postcondition(self):
        g = theta(3)
        t = target_multidegree(g, "zero")
        for a in enumerate_slopes(g, t):
            d = make_divisor(g, dict(a.slopes))
            assert multidegree(d).as_dict() == t.as_dict()


class TestBruteForce:
    def test_oracle_matches_theta(self):
        for k in (1, 2, 3):
            g = theta(k)
            t = target_multidegree(g, "zero")
            b = certified_bound(g, t)
            assert enumerate_slopes(g, t) == brute_force_slopes(g, t, b)

    def test_count_stable_above_bound(self):
        g = theta(3)
        t = target_multidegree(g, "zero")
        b = certified_bound(g, t)
        assert brute_force_slopes(g, t, b) == brute_force_slopes(g, t, b + 2)

    def test_bound_too_small(self):
        g = theta(3)
        t = target_multidegree(g, "zero")
        with pytest.raises(BoundTooSmall):
            brute_force_slopes(g, t, certified_bound(g, t) - 1)

    def test_empty_graph_case(self):
        g = validate(
            {
                "vertices": [{"id": "v", "genus": 1}],
                "legs": [{"id": "x", "vertex": "v", "weight": 0}],
            }
        )
        t = Multidegree((("v", 0),))
        out = brute_force_slopes(g, t, 0)
        assert len(out) == 1 and out[0].slopes == ()

    def test_slopes_within_certificate(self):
        for g_, n_ in [(1, 1), (1, 2), (2, 0)]:
            for gr in enumerate_stable_graphs(g_, n_):
                if len(gr.edges) > 5:
                    continue
                t = target_multidegree(gr, "zero")
                b = certified_bound(gr, t)
                for a in enumerate_slopes(gr, t):
                    assert all(abs(s) <= b for s in a.slope_vector())

    def test_oracle_equivalence_on_small_catalog(self):
        for g_, n_ in [(1, 1), (1, 2), (2, 0)]:
            for gr in enumerate_stable_graphs(g_, n_):
                if len(gr.edges) > 4:
                    continue
                weights = [0] * len(gr.legs)
                if len(weights) >= 2:
                    weights[0], weights[1] = 2, -2
                g2 = with_leg_weights(gr, weights)
                t = target_multidegree(g2, "zero")
                b = certified_bound(g2, t)
                assert enumerate_slopes(g2, t) == brute_force_slopes(g2, t, b)

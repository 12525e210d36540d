import random
from fractions import Fraction

import pytest

from tropjac.divisor import make_divisor
from tropjac.errors import DegenerateDivisor, NotTotallyOrdered, TooManyVertices
from tropjac.graph import validate
from tropjac.rubber import (
    chain_curve,
    division_of,
    is_aligned,
    obstruction_ranks,
    rub_subdivision,
    subdivide_curve,
)


def theta3():
    g = validate(
        {
            "vertices": [{"id": "v", "genus": 0}, {"id": "w", "genus": 0}],
            "edges": [
                {"id": "e1", "ends": ["v", "w"]},
                {"id": "e2", "ends": ["v", "w"]},
            ],
            "legs": [
                {"id": "x1", "vertex": "v", "weight": 3},
                {"id": "x2", "vertex": "w", "weight": -3},
            ],
        }
    )
    return make_divisor(g, {"e1": -1, "e2": -2})


def y_graph():
    g = validate(
        {
            "vertices": [
                {"id": "u", "genus": 1},
                {"id": "v", "genus": 1},
                {"id": "w", "genus": 1},
            ],
            "edges": [
                {"id": "e1", "ends": ["u", "v"]},
                {"id": "e2", "ends": ["u", "w"]},
            ],
            "legs": [],
        }
    )
    return make_divisor(g, {"e1": 1, "e2": 1})


def star3():
    g = validate(
        {
            "vertices": [
                {"id": "u", "genus": 1},
                {"id": "a", "genus": 1},
                {"id": "b", "genus": 1},
                {"id": "c", "genus": 1},
            ],
            "edges": [
                {"id": "e1", "ends": ["u", "a"]},
                {"id": "e2", "ends": ["u", "b"]},
                {"id": "e3", "ends": ["u", "c"]},
            ],
            "legs": [],
        }
    )
    return make_divisor(g, {"e1": 1, "e2": 1, "e3": 1})


def triangle(slope_c=1):
    g = validate(
        {
            "vertices": [
                {"id": "u", "genus": 1},
                {"id": "v", "genus": 1},
                {"id": "w", "genus": 1},
            ],
            "edges": [
                {"id": "a", "ends": ["u", "v"]},
                {"id": "b", "ends": ["v", "w"]},
                {"id": "c", "ends": ["u", "w"]},
            ],
            "legs": [],
        }
    )
    return make_divisor(g, {"a": 1, "b": 1, "c": slope_c})


class TestAlignment:
    def test_two_vertex_aligned(self):
        assert is_aligned(theta3())

    def test_y_not_aligned(self):
        assert not is_aligned(y_graph())

    def test_triangle_aligned(self):
        assert is_aligned(triangle())


class TestSubdivisionFan:
    def test_aligned_single_maximal(self):
        fan = rub_subdivision(theta3())
        assert len(fan.maximal_cells()) == 1

    def test_y_two_maximal(self):
        fan = rub_subdivision(y_graph())
        assert len(fan.maximal_cells()) == 2

    def test_star_six_maximal(self):
        fan = rub_subdivision(star3())
        assert len(fan.maximal_cells()) == 6

    def test_tie_cells_lower_dimensional(self):
        fan = rub_subdivision(y_graph())
        for cell in fan.cells:
            if any(len(b) > 1 for b in cell.blocks):
                assert cell.dimension < fan.base_rank

    def test_sign_vectors_distinct(self):
        fan = rub_subdivision(star3())
        signs = [c.sign_vector for c in fan.cells]
        assert len(signs) == len(set(signs))

    def test_guard(self):
        g = validate(
            {
                "vertices": [{"id": f"v{i}", "genus": 1} for i in range(7)],
                "edges": [
                    {"id": f"e{i}", "ends": [f"v{i}", f"v{i + 1}"]}
                    for i in range(6)
                ],
            }
        )
        d = make_divisor(g, {e: 0 for e in g.edge_ids})
        with pytest.raises(TooManyVertices):
            rub_subdivision(d)

    def test_maximal_cells_match_sampling_oracle(self):
        # independent oracle: strict value orderings induced by random
        # integer points of the base cone
        rng = random.Random(5)
        for d in (y_graph(), star3(), theta3()):
            fan = rub_subdivision(d)
            vv = dict(fan.vertex_vectors)
            vids = sorted(vv)
            observed = set()
            for _ in range(3000):
                y = [rng.randint(0, 12) for _ in range(fan.base_rank)]
                if not all(
                    sum(a * b for a, b in zip(w, y)) >= 0
                    for _, w in fan.cone_generators
                ):
                    continue
                vals = {v: sum(a * b for a, b in zip(vv[v], y)) for v in vids}
                if len(set(vals.values())) != len(vids):
                    continue
                observed.add(tuple(sorted(vids, key=lambda v: vals[v])))
            expected = {
                tuple(v for blk in c.blocks for v in blk)
                for c in fan.maximal_cells()
            }
            assert observed == expected


class TestDivisionAndChain:
    def test_theta_division(self):
        d = theta3()
        dv = division_of(d)
        assert len(dv.levels) == 2
        assert dv.levels[0] == tuple(0 for _ in dv.levels[0])
        assert len(dv.gaps) == 1 and any(dv.gaps[0])

    def test_single_vertex(self):
        g = validate(
            {
                "vertices": [{"id": "v", "genus": 1}],
                "legs": [{"id": "x", "vertex": "v", "weight": 0}],
            }
        )
        dv = division_of(make_divisor(g, {}))
        assert len(dv.levels) == 1 and dv.gaps == ()

    def test_path_gaps(self):
        dv = division_of(triangle())
        assert len(dv.levels) == 3 and len(dv.gaps) == 2

    def test_not_totally_ordered(self):
        with pytest.raises(NotTotallyOrdered):
            division_of(y_graph())

    def test_chain_curve(self):
        dv = division_of(triangle())
        cc = chain_curve(dv)
        assert len(cc.components) == 3
        assert len(cc.nodes) == 2
        assert [n for n, _ in cc.nodes] == ["V1", "V2"]
        assert cc.markings[0][1] == "U0" and cc.markings[1][1] == "U2"

    def test_chain_no_gaps(self):
        g = validate(
            {
                "vertices": [{"id": "v", "genus": 1}],
                "legs": [{"id": "x", "vertex": "v", "weight": 0}],
            }
        )
        cc = chain_curve(division_of(make_divisor(g, {})))
        assert len(cc.components) == 1 and cc.nodes == ()


class TestSubdivideCurve:
    def test_theta_no_insertion(self):
        rd = subdivide_curve(theta3())
        assert rd.inserted == ()
        assert rd.extension_index == 1
        assert rd.expansion_factors() == {"e1": 1, "e2": 2}
        assert rd.levels()["v"] != rd.levels()["w"]
        assert rd.every_level_covered_by_stable
        assert rd.no_vertex_on_node

    def test_triangle_insertion(self):
        rd = subdivide_curve(triangle())
        # edge c spans two gaps: one inserted vertex, two pieces
        assert rd.inserted == ("c@1",)
        assert set(rd.expansion_factors()) == {"a", "b", "c:0", "c:1"}
        assert rd.extension_index == 1
        assert rd.piece_of == (
            ("a", "a"),
            ("b", "b"),
            ("c:0", "c"),
            ("c:1", "c"),
        )
        # inserted vertices never count as stable cover
        lm = rd.levels()
        assert lm["c@1"] == 1 and lm["u"] == 0 and lm["w"] == 2

    def test_refinement_index(self):
        rd = subdivide_curve(triangle(slope_c=2))
        # gap sizes are odd in the direction of edge c's slope 2
        assert rd.extension_index == 2
        assert rd.expansion_factors()["c:0"] == 2

    def test_zero_slope_trivial(self):
        g = validate(
            {
                "vertices": [{"id": "a", "genus": 1}, {"id": "b", "genus": 1}],
                "edges": [{"id": "e", "ends": ["a", "b"]}],
            }
        )
        d = make_divisor(g, {"e": 0})
        rd = subdivide_curve(d)
        assert rd.curve == g
        assert rd.extension_index == 1
        assert rd.expansion == ()
        assert rd.every_level_covered_by_stable
        assert rd.no_vertex_on_node

    def test_degenerate_rejected(self):
        g = validate(
            {
                "vertices": [{"id": "v", "genus": 0}, {"id": "w", "genus": 0}],
                "edges": [
                    {"id": "e1", "ends": ["v", "w"]},
                    {"id": "e2", "ends": ["v", "w"]},
                ],
                "legs": [
                    {"id": "x1", "vertex": "v", "weight": 1},
                    {"id": "x2", "vertex": "w", "weight": -1},
                ],
            }
        )
        d = make_divisor(g, {"e1": 0, "e2": -1})
        with pytest.raises(DegenerateDivisor):
            subdivide_curve(d)

    def test_conservation(self):
        for d in (theta3(), triangle(), triangle(2)):
            fan = rub_subdivision(d)
            for cell in fan.maximal_cells():
                rd = subdivide_curve(d, cell)
                assert rd.curve.genus == d.graph.genus
                assert rd.curve.legs == d.graph.legs
                # contraction recovers the original edge set
                originals = {o for _, o in rd.piece_of}
                assert originals == set(d.graph.edge_ids)
                # level structure: each piece crosses exactly one gap
                lm = rd.levels()
                for e, (a, b) in rd.curve.edges:
                    span = abs(lm[a] - lm[b])
                    assert span in (0, 1)
                    assert (span == 1) == (e in rd.expansion_factors())

    def test_values_reproduce_levels(self):
        for d in (theta3(), triangle(), triangle(2)):
            dv = division_of(d)
            vv = {
                v: d.base.sharpen_elt(x).free for v, x in d.values.items()
            }
            base0 = vv[dv.blocks[0][0]]
            level = {v: i for i, blk in enumerate(dv.blocks) for v in blk}
            for v in vv:
                shifted = tuple(a - b for a, b in zip(vv[v], base0))
                assert shifted == dv.levels[level[v]]
            # edge value differences match slope times length generator
            gens = {
                e: d.base.sharpened.generator_images[i].free
                for i, e in enumerate(d.graph.edge_ids)
            }
            for e, (a, b) in d.graph.edges:
                s = d.slopes[e]
                diff = tuple(x - y for x, y in zip(vv[b], vv[a]))
                assert diff == tuple(s * x for x in gens[e])


class TestObstructionRanks:
    def test_theta(self):
        rd = subdivide_curve(theta3())
        ranks = obstruction_ranks(rd, 1, 2)
        assert ranks == {
            "vdim": 1,
            "h1_rank": 1,
            "primary_obstruction_rank": 2,
            "euler_fdagger": 2,
        }

    def test_chain_free(self):
        g = validate(
            {
                "vertices": [{"id": "a", "genus": 1}, {"id": "b", "genus": 1}],
                "edges": [{"id": "e", "ends": ["a", "b"]}],
            }
        )
        rd = subdivide_curve(make_divisor(g, {"e": 0}))
        gg = g.genus
        ranks = obstruction_ranks(rd, gg, 0)
        assert ranks["primary_obstruction_rank"] == 0
        assert ranks["euler_fdagger"] == 1 - gg

    def test_identity(self):
        for d in (theta3(), triangle(), triangle(2)):
            rd = subdivide_curve(d)
            gg = d.graph.genus
            nn = len(d.graph.legs)
            ranks = obstruction_ranks(rd, gg, nn)
            assert ranks["h1_rank"] == gg
            assert ranks["vdim"] == 2 * gg - 3 + nn
            assert (
                ranks["euler_fdagger"] - ranks["primary_obstruction_rank"]
                == 1 - gg
            )


class TestFanPartition:
    def test_membership_partition(self):
        rng = random.Random(9)
        for d in (y_graph(), star3(), theta3()):
            fan = rub_subdivision(d)
            witnesses = [c.witness for c in fan.maximal_cells()]
            for _ in range(100):
                coeffs = [Fraction(rng.randint(0, 5), rng.randint(1, 4)) for _ in witnesses]
                point = tuple(
                    sum(c * w[i] for c, w in zip(coeffs, witnesses))
                    for i in range(fan.base_rank)
                )
                closed, open_ = fan.membership(point)
                assert len(closed) >= 1
                assert len(open_) == 1

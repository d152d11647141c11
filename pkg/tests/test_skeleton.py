from __future__ import annotations

import json
from math import gcd

import pytest

from xistate.groups import StructuralError
from xistate.skeleton import (
    BUILTIN_TRIANGULATIONS,
    CombSkeleton,
    SkeletonError,
    Triangulation,
    builtin_triangulation,
    disjoint_union,
    homology_h1,
    lens_skeleton,
    lens_triangulation,
    s1xs2_skeleton,
    skeleton_from_triangulation,
    sphere_triangulation,
    validate_triangulation,
)

H1 = {"s3": (0, ()), "rp3": (0, (2,)), "l3_1": (0, (3,)), "l4_1": (0, (4,)), "l5_2": (0, (5,)), "s1xs2": (1, ())}


@pytest.mark.parametrize("name", BUILTIN_TRIANGULATIONS)
def test_builtin_triangulations_valid(name):
    rep = validate_triangulation(builtin_triangulation(name))
    assert rep.valid and rep.orientation is not None


@pytest.mark.parametrize("name", BUILTIN_TRIANGULATIONS)
def test_builtin_homology(name):
    h = homology_h1(builtin_triangulation(name))
    assert (h.rank, h.torsion) == H1[name]


@pytest.mark.parametrize("p,q", [(2, 1), (3, 1), (4, 1), (5, 2), (7, 3)])
def test_lens_triangulation_homology(p, q):
    h = homology_h1(lens_triangulation(p, q))
    assert (h.rank, h.torsion) == (0, (p,))


def test_sphere_triangulation():
    assert str(homology_h1(sphere_triangulation())) == "0"


def test_homology_string():
    assert str(homology_h1(builtin_triangulation("s1xs2"))) == "Z"
    assert str(homology_h1(builtin_triangulation("l4_1"))) == "Z/4"


def test_unglued_face_rejected():
    t = Triangulation.from_pairs(1, [(0, 0, 0, 1, (1, 0, 2, 3))])
    assert any(v.axiom == "closed" for v in validate_triangulation(t).violations)


def test_malformed_gluing_rejected():
    t = sphere_triangulation()
    rows = [list(r) for r in t.gluings]
    rows[0][0] = (1, 0, (1, 0, 2, 3))
    bad = Triangulation(2, tuple(tuple(r) for r in rows))
    assert not validate_triangulation(bad).valid


def test_nonorientable_gluing_rejected():
    pairs = [(0, f, 1, f, (0, 1, 2, 3)) for f in range(3)] + [(0, 3, 1, 3, (1, 0, 2, 3))]
    rep = validate_triangulation(Triangulation.from_pairs(2, pairs))
    assert not rep.valid


def test_inconsistent_double_gluing():
    with pytest.raises(StructuralError):
        Triangulation.from_pairs(2, [(0, 0, 1, 0, (0, 1, 2, 3)), (0, 0, 1, 1, (1, 0, 2, 3))])


def test_invalid_triangulation_has_no_skeleton():
    t = Triangulation.from_pairs(1, [(0, 0, 0, 1, (1, 0, 2, 3))])
    with pytest.raises(SkeletonError):
        skeleton_from_triangulation(t)


def test_triangulation_json_round_trip():
    for name in BUILTIN_TRIANGULATIONS:
        t = builtin_triangulation(name)
        assert Triangulation.from_json(json.loads(json.dumps(t.to_json()))) == t


def all_skeletons():
    out = [lens_skeleton(p, q) for p in range(2, 7) for q in range(1, p) if gcd(p, q) == 1]
    out.append(s1xs2_skeleton())
    out += [skeleton_from_triangulation(builtin_triangulation(n)) for n in BUILTIN_TRIANGULATIONS]
    return out


@pytest.mark.parametrize("P", all_skeletons(), ids=lambda P: P.name)
def test_skeleton_valid(P):
    assert P.violations() == []
    assert P.euler_characteristic() == 0


@pytest.mark.parametrize("P", all_skeletons(), ids=lambda P: P.name)
def test_skeleton_json_round_trip(P):
    assert CombSkeleton.from_json(json.loads(json.dumps(P.to_json()))) == P


@pytest.mark.parametrize("P", all_skeletons(), ids=lambda P: P.name)
def test_reoriented_skeleton_valid(P):
    Q = P.reoriented(edges=range(len(P.edges)), regions=range(0, len(P.regions), 2))
    assert Q.violations() == []
    assert Q.reoriented(edges=range(len(P.edges)), regions=range(0, len(P.regions), 2)) == P


def test_triangulation_skeleton_counts():
    t = builtin_triangulation("rp3")
    P = skeleton_from_triangulation(t)
    assert P.n_balls == t.n_tets
    assert len(P.regions) == 2 * t.n_tets
    assert all(r.euler == 1 for r in P.regions)


def test_lens_skeleton_shape():
    P = lens_skeleton(5, 2)
    assert P.single_ball and len(P.regions) == 1 and len(P.edges[0]) == 5
    assert P.name == "lens:5,2"


def test_lens_skeleton_parameter_check():
    with pytest.raises(SkeletonError):
        lens_skeleton(4, 2)
    with pytest.raises(SkeletonError):
        lens_triangulation(3, 3)


def test_s1xs2_special_skeleton():
    P = s1xs2_skeleton()
    assert P.name == "s1xs2" and P.n_balls == 2
    assert [r.euler for r in P.regions] == [1, 1, 0]


def test_edge_reversal_involution():
    ed = s1xs2_skeleton().edges[0]
    assert ed.reversed().reversed() == ed
    assert ed.reversed().branches[0] == (ed.branches[-1][0], -ed.branches[-1][1])


def test_mutated_skeleton_violations():
    P = lens_skeleton(3, 1)
    doc = P.to_json()
    doc["edges"][0]["branches"][0][1] = -1
    assert CombSkeleton.from_json(doc).violations()
    doc = P.to_json()
    doc["regions"][0]["euler"] = 2
    assert any(v.axiom == "euler" for v in CombSkeleton.from_json(doc).violations())


def test_disjoint_union_valid():
    U = disjoint_union(lens_skeleton(3, 1), s1xs2_skeleton())
    assert U.violations() == []
    assert U.n_balls == 3 and len(U.vertices) == 2


def test_link_graph_is_sphere_graph():
    P = skeleton_from_triangulation(builtin_triangulation("l3_1"))
    for v in range(len(P.vertices)):
        g = P.link_graph(v)
        assert g.sphere and g.embedding_violations() == []

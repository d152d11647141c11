from __future__ import annotations

import json
import random
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from xistate.groups import StructuralError
from xistate.labeling import (
    GaugeElement,
    LabelingError,
    XiLabeling,
    enumerate_labelings,
    extend_beta,
    gauge_act,
    gauge_identity,
    gauge_product,
    orbits,
    pointed_orbits_and_stabilizers,
    random_gauge,
    reorient_labeling,
    stabilizer_order,
    trivial_labeling,
    validate_labeling,
)
from xistate.skeleton import builtin_triangulation, lens_skeleton, s1xs2_skeleton, skeleton_from_triangulation
from xistate.statesum import lens_labeling
from xistate.xmod import builtin_xmod

XMODS = ["trivial", "z2_in_z4", "z2_to_1", "1_to_z2", "s3_inner", "z3_by_z2", "rp3_source"]


def skeletons():
    return [
        lens_skeleton(2, 1),
        lens_skeleton(3, 1),
        lens_skeleton(5, 2),
        s1xs2_skeleton(),
        skeleton_from_triangulation(builtin_triangulation("s3")),
        skeleton_from_triangulation(builtin_triangulation("rp3")),
    ]


def brute_force_labelings(P, cm):
    """Every alpha and every beta seed, filtered by the validator."""
    out = []
    for alpha in product(cm.H.elements(), repeat=len(P.regions)):
        for seeds in product(cm.E.elements(), repeat=len(P.edges)):
            beta = tuple(extend_beta(P, cm, alpha, e, b) for e, b in enumerate(seeds))
            L = XiLabeling(alpha, beta)
            if not validate_labeling(P, cm, L):
                out.append(L)
    return out


# validity --------------------------------------------------------------------


def test_lens_2_1_normal_inclusion_has_four_labelings():
    cm = builtin_xmod("z2_in_z4")
    labs = enumerate_labelings(lens_skeleton(2, 1), cm)
    assert len(labs) == 4
    # E = {0, 2} inside Z/4, indexed 0 and 1
    assert sorted((L.alpha[0], L.beta[0][0]) for L in labs) == [(0, 0), (1, 1), (2, 0), (3, 1)]


def test_trivial_crossed_module_has_one_labeling():
    cm = builtin_xmod("trivial")
    for P in skeletons():
        assert enumerate_labelings(P, cm) == [trivial_labeling(P, cm)]


def test_s1xs2_count_for_one_to_z2():
    # z^-1 x z y = 1 forces y = x; z and x are free
    cm = builtin_xmod("1_to_z2")
    labs = enumerate_labelings(s1xs2_skeleton(), cm)
    assert len(labs) == cm.H.order ** 2
    assert all(L.alpha[0] == L.alpha[1] for L in labs)


@pytest.mark.parametrize("name", XMODS)
def test_trivial_labeling_valid_everywhere(name):
    cm = builtin_xmod(name)
    for P in skeletons():
        assert validate_labeling(P, cm, trivial_labeling(P, cm)) == []


@pytest.mark.parametrize("name", ["z2_in_z4", "s3_inner", "z3_by_z2", "z4_to_z2"])
@pytest.mark.parametrize("P", [lens_skeleton(3, 1), lens_skeleton(4, 3), s1xs2_skeleton()], ids=lambda P: P.name)
def test_enumeration_matches_brute_force(name, P):
    cm = builtin_xmod(name)
    assert sorted(enumerate_labelings(P, cm), key=repr) == sorted(brute_force_labelings(P, cm), key=repr)


def test_enumeration_matches_brute_force_on_triangulation():
    cm = builtin_xmod("z2_to_1")
    P = skeleton_from_triangulation(builtin_triangulation("s3"))
    assert len(enumerate_labelings(P, cm)) == len(brute_force_labelings(P, cm))


def test_lens_labelings_are_the_fixed_points():
    cm = builtin_xmod("z11_by_z5")
    P = lens_skeleton(5, 2)
    for h in cm.H.elements():
        for e in cm.E.elements():
            L = lens_labeling(cm, 5, h, e)
            bad = validate_labeling(P, cm, L)
            if cm.act(h, e) == e:
                assert bad == []
            else:
                assert [v.axiom for v in bad] == ["one-spherical"]


def test_precol_violation_codes():
    cm = builtin_xmod("z2_in_z4")
    P = lens_skeleton(3, 1)
    L = XiLabeling((1,), ((1, 1, 1),))
    codes = {v.axiom for v in validate_labeling(P, cm, L)}
    assert "precol1" in codes
    msg = next(v.message for v in validate_labeling(P, cm, L) if v.axiom == "precol1")
    assert msg.startswith("precol1 violated at edge 0")


def test_precol2_violation():
    cm = builtin_xmod("z3_by_z2")
    P = lens_skeleton(2, 1)
    L = XiLabeling((1,), ((1, 1),))
    assert "precol2" in {v.axiom for v in validate_labeling(P, cm, L)}


def test_shape_mismatch_is_structural():
    cm = builtin_xmod("z2_in_z4")
    with pytest.raises(StructuralError):
        validate_labeling(lens_skeleton(3, 1), cm, XiLabeling((0,), ((0, 0),)))
    with pytest.raises(StructuralError):
        validate_labeling(lens_skeleton(2, 1), cm, XiLabeling((9,), ((0, 0),)))


def test_labeling_json_round_trip():
    cm = builtin_xmod("s3_inner")
    for L in enumerate_labelings(lens_skeleton(3, 1), cm):
        assert XiLabeling.from_json(json.loads(json.dumps(L.to_json()))) == L


# gauge action --------------------------------------------------------------


def test_identity_gauge_fixes_labelings():
    cm = builtin_xmod("s3_inner")
    for P in skeletons()[:4]:
        for L in enumerate_labelings(P, cm)[:20]:
            assert gauge_act(P, cm, gauge_identity(P, cm), L) == L


@pytest.mark.parametrize("p", [2, 3, 5])
def test_lens_gauge_formula(p):
    cm = builtin_xmod("z11_by_z5") if p == 5 else builtin_xmod("s3xz2_to_s3")
    H, E = cm.H, cm.E
    P = lens_skeleton(p, 1)
    for L in enumerate_labelings(P, cm):
        h, e = L.alpha[0], L.beta[0][0]
        for lam, mu in product(H.elements(), E.elements()):
            f = E.identity
            for j in range(p - 1, -1, -1):
                f = E.mul(f, cm.act(H.inv(H.power(h, j)), mu))
            got = gauge_act(P, cm, GaugeElement((lam,), (mu,)), L)
            assert got.alpha[0] == H.prod([lam, h, cm.d(mu), H.inv(lam)])
            assert got.beta[0][0] == cm.act(lam, E.mul(e, f))


def test_abelian_trivial_action_product_is_componentwise():
    cm = builtin_xmod("z3_to_1")
    P = s1xs2_skeleton()
    rng = random.Random(0)
    for _ in range(20):
        a, b = random_gauge(P, cm, rng), random_gauge(P, cm, rng)
        prod = gauge_product(P, cm, a, b)
        assert prod.lam == tuple(cm.H.mul(x, y) for x, y in zip(a.lam, b.lam))
        assert prod.mu == tuple((x + y) % 3 for x, y in zip(a.mu, b.mu))


@pytest.mark.parametrize("name", ["z2_in_z4", "s3_inner", "z3_by_z2", "s3xz2_to_s3", "z4_to_z2"])
@pytest.mark.parametrize("P", skeletons()[:5], ids=lambda P: P.name)
def test_gauge_action_laws(name, P):
    cm = builtin_xmod(name)
    labs = enumerate_labelings(P, cm)
    rng = random.Random(17)
    for _ in range(15):
        L = rng.choice(labs)
        g1, g2 = random_gauge(P, cm, rng), random_gauge(P, cm, rng)
        once = gauge_act(P, cm, g1, L)
        assert validate_labeling(P, cm, once) == []
        assert gauge_act(P, cm, g2, once) == gauge_act(P, cm, gauge_product(P, cm, g2, g1), L)


@given(st.integers(0, 10**6))
def test_gauge_action_is_an_action_hypothesis(seed):
    cm = builtin_xmod("s3xz2_to_s3")
    P = lens_skeleton(3, 2)
    labs = enumerate_labelings(P, cm)
    rng = random.Random(seed)
    L = rng.choice(labs)
    g1, g2 = random_gauge(P, cm, rng), random_gauge(P, cm, rng)
    assert gauge_act(P, cm, g2, gauge_act(P, cm, g1, L)) == gauge_act(P, cm, gauge_product(P, cm, g2, g1), L)


# orbits --------------------------------------------------------------------


def test_lens_2_1_z2_to_1_two_orbits():
    cm = builtin_xmod("z2_to_1")
    P = lens_skeleton(2, 1)
    assert len(enumerate_labelings(P, cm)) == 2
    assert len(orbits(P, cm)) == 2


def test_trivial_xmod_one_orbit():
    for P in skeletons():
        assert len(orbits(P, builtin_xmod("trivial"))) == 1


def test_s3_one_to_z2_one_orbit():
    P = skeleton_from_triangulation(builtin_triangulation("s3"))
    assert len(orbits(P, builtin_xmod("1_to_z2"))) == 1


@pytest.mark.parametrize("tri,expected", [("s3", 1), ("rp3", 2), ("l3_1", 1)])
def test_one_to_z2_orbits_count_homomorphisms(tri, expected):
    P = skeleton_from_triangulation(builtin_triangulation(tri))
    assert len(orbits(P, builtin_xmod("1_to_z2"))) == expected


def test_pointed_stabilizers_rp3():
    cm = builtin_xmod("z2_to_1")
    obs = pointed_orbits_and_stabilizers(lens_skeleton(2, 1), cm)
    assert len(obs) == 2
    assert all(o.stabilizer == 2 for o in obs)


def test_pointed_stabilizers_trivial_e():
    for name in ["1_to_z2", "1_to_z3"]:
        for o in pointed_orbits_and_stabilizers(lens_skeleton(3, 1), builtin_xmod(name)):
            assert o.stabilizer == 1


@pytest.mark.parametrize("name", ["z2_in_z4", "z2_to_1", "z3_by_z2", "rp3_source", "z4_to_z2"])
@pytest.mark.parametrize("pq", [(2, 1), (3, 1), (4, 1), (4, 3)])
def test_orbit_stabilizer(name, pq):
    cm = builtin_xmod(name)
    P = lens_skeleton(*pq)
    for o in pointed_orbits_and_stabilizers(P, cm):
        assert len(o.members) * o.stabilizer == cm.E.order ** len(P.regions)


def test_stabilizer_order_direct_enumeration():
    cm = builtin_xmod("z4_to_z2")
    P = lens_skeleton(3, 1)
    for L in enumerate_labelings(P, cm):
        direct = sum(1 for mu in cm.E.elements() if gauge_act(P, cm, GaugeElement((0,), (mu,)), L) == L)
        assert stabilizer_order(P, cm, L) == direct


def test_multi_ball_pointed_rejected():
    with pytest.raises(LabelingError):
        pointed_orbits_and_stabilizers(s1xs2_skeleton(), builtin_xmod("z2_to_1"))


def test_orbits_partition_labelings():
    cm = builtin_xmod("s3_inner")
    P = lens_skeleton(3, 1)
    labs = enumerate_labelings(P, cm)
    members = sorted(i for o in orbits(P, cm, labs) for i in o.members)
    assert members == list(range(len(labs)))


# reorientation --------------------------------------------------------------


@pytest.mark.parametrize("name", ["z2_in_z4", "s3_inner", "z3_by_z2"])
def test_reorientation_preserves_validity(name):
    cm = builtin_xmod(name)
    for P in skeletons():
        edges = range(0, len(P.edges), 2)
        regions = range(1, len(P.regions), 2)
        Q = P.reoriented(edges, regions)
        for L in enumerate_labelings(P, cm)[:10]:
            assert validate_labeling(Q, cm, reorient_labeling(P, cm, L, edges, regions)) == []

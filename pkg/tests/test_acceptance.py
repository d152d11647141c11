"""The thirteen acceptance criteria, exact comparisons only."""

from __future__ import annotations

import json
import random
from collections import Counter
from fractions import Fraction
from itertools import product
from math import gcd

import numpy as np
import pytest

from acceptance_log import criterion
from graphgen import random_xi_graph
from test_cocycle import naive_group_cocycle
from test_xigraph import k4_graph, trivial_grade_variant
from xistate.category import (
    CategoryError,
    bubble_identity_violations,
    graded_vect,
    linearized_2group,
    pushforward,
    twist,
    xi_vect,
)
from xistate.cocycle import CrossedCocycle3, builtin_cocycles, carry_cocycle, check_cocycle, cocycle_defect, inflate_group_cocycle
from xistate.groups import StructuralError, cyclic_group, symmetric_group
from xistate.labeling import enumerate_labelings, gauge_act, orbits, pointed_orbits_and_stabilizers, random_gauge
from xistate.skeleton import builtin_triangulation, homology_h1, lens_skeleton, s1xs2_skeleton, skeleton_from_triangulation
from xistate.statesum import dw_oracle, lens_invariant, lens_labeling, pushforward_check, state_sum
from xistate.xigraph import evaluate_colored, grade, grade_canonical, push_off, random_arc_systems, xi_graph_violations
from xistate.xmod import (
    CrossedModule,
    builtin_morphism,
    builtin_xmod,
    central_epimorphism,
    inner_automorphisms,
    normal_inclusion,
    trivial_boundary,
    validate_crossed_module,
)
from xistate.groups import trivial_group

CRIT2_XMODS = ["z2_in_z4", "z2_to_1", "z3_to_1", "1_to_z2", "rp3_source"]


def lens_pairs(pmax: int):
    return [(p, q) for p in range(2, pmax + 1) for q in range(1, p) if gcd(p, q) == 1]


def crit2_skeletons():
    out = [lens_skeleton(p, q) for p, q in lens_pairs(6)]
    out.append(s1xs2_skeleton())
    out += [skeleton_from_triangulation(builtin_triangulation(n)) for n in ("s3", "rp3", "l3_1")]
    return out


def twisted_kg(name: str):
    x, make = builtin_cocycles()[name]
    cm = builtin_xmod(x)
    return twist(linearized_2group(cm), make(cm))


# 1 ---------------------------------------------------------------------------


def _mutants(cm: CrossedModule, rng: random.Random, count: int):
    doc = cm.to_json()
    slots = []
    if cm.H.order > 1:
        slots += [("boundary", i) for i in range(cm.E.order)]
    if cm.E.order > 1:
        slots += [("action", x, i) for x in range(cm.H.order) for i in range(cm.E.order)]
        slots += [("E", a, b) for a in range(cm.E.order) for b in range(cm.E.order)]
    if cm.H.order > 1:
        slots += [("H", a, b) for a in range(cm.H.order) for b in range(cm.H.order)]
    for _ in range(count):
        d = json.loads(json.dumps(doc))
        slot = rng.choice(slots)
        if slot[0] == "boundary":
            row, i, size = d["boundary"], slot[1], cm.H.order
        elif slot[0] == "action":
            row, i, size = d["action"][slot[1]], slot[2], cm.E.order
        else:
            row, i, size = d[slot[0]]["cayley"][slot[1]], slot[2], (cm.E if slot[0] == "E" else cm.H).order
        row[i] = rng.choice([v for v in range(size) if v != row[i]])
        yield d


def _rejected(doc: dict) -> bool:
    try:
        cm = CrossedModule.from_json(doc)
    except StructuralError:
        return True
    return bool(validate_crossed_module(cm))


@criterion(1, "crossed-module validators accept the example families and reject mutations", 1.0)
def test_criterion_01_validators():
    s3 = symmetric_group(3)
    a3 = [a for a in s3.elements() if len(s3.subgroup_closure([a])) in (1, 3)]
    families = {
        "normal Z/2 in Z/4": normal_inclusion(cyclic_group(4), [0, 2]),
        "normal A3 in S3": normal_inclusion(s3, a3),
        "inner S3": inner_automorphisms(s3),
        "trivial Z/3 -> 1": trivial_boundary(cyclic_group(3), trivial_group()),
        "trivial Z/2 -> 1": trivial_boundary(cyclic_group(2), trivial_group()),
        "central Z/4 -> Z/2": central_epimorphism(4, 2),
    }
    rng = random.Random(2024)
    for name, cm in families.items():
        assert validate_crossed_module(cm) == [], name
        mutants = list(_mutants(cm, rng, 25))
        assert len(mutants) >= 20
        assert all(_rejected(d) for d in mutants), name


# 2 ---------------------------------------------------------------------------


@criterion(2, "kG collapse: every labeling evaluates to 1", 30.0)
def test_criterion_02_kg_collapse():
    total = 0
    for name in CRIT2_XMODS:
        cm = builtin_xmod(name)
        C = linearized_2group(cm)
        for P in crit2_skeletons():
            for L in enumerate_labelings(P, cm):
                # trace=True forces full evaluation of every vertex and edge
                assert state_sum(P, L, C, trace=True).normalized == 1, (name, P.name, L)
                total += 1
    assert total > 500


# 3 ---------------------------------------------------------------------------


@pytest.fixture(scope="module")
def shipped_categories():
    out = []
    for name in sorted(builtin_cocycles()):
        x, make = builtin_cocycles()[name]
        cm = builtin_xmod(x)
        for ctor in (linearized_2group, graded_vect):
            try:
                out.append((f"{name}/{ctor.__name__}", twist(ctor(cm), make(cm))))
            except CategoryError:
                pass
    for x in ["trivial", "z2_in_z4", "z2_to_1", "z3_to_1", "1_to_z2", "1_to_z3", "s3_inner", "z4_to_z2", "rp3_source", "z3_by_z2", "s3xz2_to_s3"]:
        cm = builtin_xmod(x)
        for ctor in (linearized_2group, graded_vect, xi_vect):
            try:
                out.append((f"{x}/{ctor.__name__}", ctor(cm)))
            except CategoryError:
                pass
    for m in ["rp3", "z2_in_z4_quotient", "s3_inner_collapse", "1_to_z2_collapse", "rp3_source_to_z3"]:
        mor = builtin_morphism(m)
        out.append((f"push:{m}", pushforward(mor, linearized_2group(mor.source))))
    return out


@criterion(3, "S1xS2 evaluates to 1 for every labeling and shipped category", 5.0)
def test_criterion_03_s1xs2(shipped_categories):
    P = s1xs2_skeleton()
    cats = shipped_categories
    assert len(cats) >= 30
    for name, C in cats:
        for L in enumerate_labelings(P, C.cm):
            assert state_sum(P, L, C).normalized == 1, (name, L)


# 4 ---------------------------------------------------------------------------


@criterion(4, "RP3 push-forward golden values 1/3 and 0", 5.0)
def test_criterion_04_rp3_golden():
    m = builtin_morphism("rp3")
    base = linearized_2group(m.source)
    C = pushforward(m, base)
    P = lens_skeleton(2, 1)
    null, other = lens_labeling(m.target, 2, 0, 0), lens_labeling(m.target, 2, 0, 1)
    for L, want in ((null, Fraction(1, 3)), (other, Fraction(0))):
        direct = state_sum(P, L, C).normalized
        check = pushforward_check(P, m, base, L)
        assert direct == want
        assert check.lhs == direct
        assert check.rhs == want
    obs = pointed_orbits_and_stabilizers(P, m.target)
    assert [o.stabilizer for o in obs] == [2, 2]


# 5 ---------------------------------------------------------------------------


PUSH_MATRIX = [
    ("z2_in_z4_quotient", "kG", (3, 1)),
    ("z2_in_z4_quotient", "EH-vect", (4, 1)),
    ("s3_inner_collapse", "kG", (2, 1)),
    ("s3_inner_collapse", "EH-vect", (3, 2)),
    ("1_to_z2_collapse", "EH-vect", (4, 3)),
    ("rp3_source_to_z3", "kG", (3, 1)),
    ("rp3", "kG", (4, 1)),
    ("rp3", "EH-vect", (2, 1)),
    ("semidirect:z2_in_z4", "EH-vect", (3, 1)),
    ("semidirect:rp3_source", "EH-vect", (2, 1)),
]


@criterion(5, "push-forward theorem holds on the test matrix", 60.0)
def test_criterion_05_pushforward_matrix():
    from xistate.category import builtin_category

    triples = 0
    values = set()
    for mname, kind, pq in PUSH_MATRIX:
        m = builtin_morphism(mname)
        C = builtin_category(kind, m.source)
        P = lens_skeleton(*pq)
        for o in pointed_orbits_and_stabilizers(P, m.target):
            r = pushforward_check(P, m, C, o.representative)
            assert r.lhs == r.rhs, (mname, kind, pq)
            values.add(r.lhs)
        triples += 1
    assert triples >= 6
    assert len(values) > 2


# 6 ---------------------------------------------------------------------------


def gauge_test_category(name: str):
    twisted = {"z2_in_z4": "mu4_sign_z2_in_z4", "z2_to_1": "mu4_z2_to_1_a", "1_to_z2": "sign_1_to_z2", "rp3_source": "mu4_rp3_source"}
    if name in twisted:
        return twisted_kg(twisted[name])
    return xi_vect(builtin_xmod(name))


@criterion(6, "gauge invariance on 100 random pairs per skeleton and crossed module", 60.0)
def test_criterion_06_gauge_invariance():
    rng = random.Random(6)
    for name in CRIT2_XMODS:
        C = gauge_test_category(name)
        cm = C.cm
        for P in crit2_skeletons():
            labs = enumerate_labelings(P, cm)
            cache: dict = {}

            def value(L):
                if L not in cache:
                    cache[L] = state_sum(P, L, C).normalized
                return cache[L]

            for _ in range(100):
                L = rng.choice(labs)
                M = gauge_act(P, cm, random_gauge(P, cm, rng), L)
                assert value(M) == value(L), (name, P.name)


# 7 ---------------------------------------------------------------------------


@criterion(7, "grade robustness, four-vertex example and lens link grade", 30.0)
def test_criterion_07_grades():
    rng = random.Random(7)
    for name in ["z2_in_z4", "z2_to_1", "s3_inner", "rp3_source", "z4_to_z2", "s3xz2_to_s3", "1_to_z3", "z3_by_z2"]:
        cm = builtin_xmod(name)
        for _ in range(100):
            g = random_xi_graph(rng, cm, rng.randint(1, 9))
            assert xi_graph_violations(g, cm) == []
            g0 = grade_canonical(g, cm)
            assert g0 in cm.kernel
            for _ in range(10):
                assert grade(g, cm, random_arc_systems(g, rng, moves=4)) == g0
    cm = builtin_xmod("s3xz2_to_s3")
    for _ in range(50):
        G, expected = k4_graph(cm, rng)
        assert grade_canonical(G, cm) == expected
    cm = builtin_xmod("z11_by_z5")
    H, E = cm.H, cm.E
    for q in range(1, 5):
        P = lens_skeleton(5, q)
        for h, e in product(H.elements(), E.elements()):
            L = lens_labeling(cm, 5, h, e)
            g = P.link_graph(0, cm, L.alpha, L.beta)
            want = E.mul(e, cm.act(H.power(h, -q % 5), E.inv(e)))
            assert grade_canonical(push_off(g, g.face_of[(0, 4)]), cm) == want


# 8 ---------------------------------------------------------------------------


@criterion(8, "cocycle check accepts the inflated sign cocycle and rejects 50 perturbations", 30.0)
def test_criterion_08_cocycle():
    cm = builtin_xmod("1_to_z2")
    inf = inflate_group_cocycle(cm, carry_cocycle(2), 2)
    assert inf.valid and check_cocycle(inf.cocycle) == []
    assert cocycle_defect(inf.cocycle).size == cm.H.order ** 4 * cm.E.order ** 6
    rng = random.Random(8)
    base = (carry_cocycle(2) * 6).astype(np.int64)
    rejected = 0
    while rejected < 50:
        table = base.copy()
        for _ in range(rng.randint(1, 3)):
            table[rng.randrange(2), rng.randrange(2), rng.randrange(2)] += rng.randrange(1, 12)
        if naive_group_cocycle(2, (table % 12).tolist(), 12):
            continue
        w = CrossedCocycle3(cm, 12, table[:, :, :, None, None, None])
        assert check_cocycle(w), table.tolist()
        rejected += 1


# 9 ---------------------------------------------------------------------------


@criterion(9, "bubble identity for kG and (E,H)-vect with |H| <= 6", 30.0)
def test_criterion_09_bubble():
    checked = 0
    for name in ["trivial", "z2_in_z4", "z2_to_1", "z3_to_1", "1_to_z2", "1_to_z3", "s3_inner", "z4_to_z2", "rp3_source", "s3xz2_to_s3", "z3_by_z2", "z11_by_z5"]:
        cm = builtin_xmod(name)
        assert cm.H.order <= 6
        cats = [linearized_2group(cm)]
        if cm.boundary.is_injective():
            cats.append(graded_vect(cm))
        for C in cats:
            assert bubble_identity_violations(C) == [], (name, C.name)
            checked += 1
    assert checked >= 15


# 10 --------------------------------------------------------------------------


@criterion(10, "E = 1 reduction agrees with the cocycle-sum oracle", 30.0)
def test_criterion_10_dw():
    cm = builtin_xmod("1_to_z2")
    sign = inflate_group_cocycle(cm, carry_cocycle(2), 2).cocycle
    for omega, tilde in ((None, np.zeros((2, 2, 2), dtype=np.int64)), (sign, carry_cocycle(2))):
        C = linearized_2group(cm) if omega is None else twist(linearized_2group(cm), omega)
        for name in ("s3", "rp3"):
            t = builtin_triangulation(name)
            P = skeleton_from_triangulation(t)
            for o in orbits(P, cm):
                ss = state_sum(P, o.representative, C).normalized
                assert ss == dw_oracle(t, cm.H, tilde, 2, o.representative.alpha).value, (name, o.representative)


# 11 --------------------------------------------------------------------------


@criterion(11, "two sweep orders give equal values on random colored graphs", 60.0)
def test_criterion_11_isotopy():
    values = Counter()
    for name in sorted(builtin_cocycles()):
        C = twisted_kg(name)
        cm = C.cm
        rng = random.Random(11)
        for _ in range(50):
            g = trivial_grade_variant(random_xi_graph(rng, cm, rng.randint(1, 8), category=C), cm)
            a, b = evaluate_colored(g, C, 1), evaluate_colored(g, C, 2)
            assert a == b, name
            values[a != 1] += 1
    assert values[True] > 0


# 12 --------------------------------------------------------------------------


@criterion(12, "homology of the shipped triangulations", 5.0)
def test_criterion_12_homology():
    want = {"s3": (0, ()), "rp3": (0, (2,)), "l3_1": (0, (3,)), "l4_1": (0, (4,)), "l5_2": (0, (5,)), "s1xs2": (1, ())}
    for name, h in want.items():
        got = homology_h1(builtin_triangulation(name))
        assert (got.rank, got.torsion) == h, name


# 13 --------------------------------------------------------------------------


def untwisted_categories():
    rp3 = builtin_morphism("rp3")
    out = [("push:rp3", pushforward(rp3, linearized_2group(rp3.source)))]
    for x in ["z2_in_z4", "z3_by_z2", "z3_to_1"]:
        out.append((f"xi-vect:{x}", xi_vect(builtin_xmod(x))))
    out.append(("EH-vect:z2_in_z4", graded_vect(builtin_xmod("z2_in_z4"))))
    m = builtin_morphism("z2_in_z4_quotient")
    out.append(("push:z2_in_z4_quotient", pushforward(m, linearized_2group(m.source))))
    return out


@criterion(13, "lens trace formula equals the triangulation state sum orbit by orbit", 60.0)
def test_criterion_13_skeleton_independence():
    tri = {p: skeleton_from_triangulation(builtin_triangulation(n)) for p, n in {2: "rp3", 3: "l3_1", 4: "l4_1"}.items()}
    orbit_cache: dict = {}
    nontrivial = 0
    for name, C in untwisted_categories():
        cm = C.cm
        for p, T in tri.items():
            key = (json.dumps(cm.to_json(), sort_keys=True), p)
            if key not in orbit_cache:
                orbit_cache[key] = ([o.representative for o in orbits(lens_skeleton(p, 1), cm)], [o.representative for o in orbits(T, cm)])
            lens_reps, tri_reps = orbit_cache[key]
            lens_values = Counter(lens_invariant(p, 1, L.alpha[0], L.beta[0][0], C) for L in lens_reps)
            tri_values = Counter(state_sum(T, L, C).normalized for L in tri_reps)
            assert lens_values == tri_values, (name, p, lens_values, tri_values)
            nontrivial += any(v != 1 for v in lens_values)
    assert nontrivial > 0

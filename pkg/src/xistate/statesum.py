"""The state-sum invariant, the lens trace shortcut, push-forward checks and the E = 1 oracle."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Iterator, Optional, Sequence

import numpy as np

from .category import PointedXiFusion, pushforward
from .groups import FiniteGroup, StructuralError
from .labeling import (
    XiLabeling,
    enumerate_labelings,
    pointed_orbits_and_stabilizers,
    validate_labeling,
)
from .scalar import Scalar
from .skeleton import CombSkeleton, Triangulation, _perm_sign, _TriangulationCells, validate_triangulation
from .xigraph import CyclicXiSet, RankZero, cyclic_rotate_scalar, edge_pairing_scalar, evaluate_colored
from .xmod import CrossedModule, XModMorphism, pushforward_hypotheses


class StateSumError(ValueError):
    pass


@dataclass(frozen=True)
class StateSumReport:
    normalized: Scalar
    unnormalized: Scalar
    balls: int
    trace: Optional[tuple[dict, ...]] = field(default=None, compare=False)

    def to_json(self) -> dict:
        doc = {"normalized": self.normalized.to_json(), "unnormalized": self.unnormalized.to_json(), "balls": self.balls}
        if self.trace is not None:
            doc["trace"] = list(self.trace)
        return doc


def _check_same_cm(P: CombSkeleton, L: XiLabeling, C: PointedXiFusion) -> None:
    if len(L.alpha) != len(P.regions) or len(L.beta) != len(P.edges):
        raise StructuralError("labeling shape does not match the skeleton")
    if any(not 0 <= x < C.cm.H.order for x in L.alpha):
        raise StructuralError("labeling is not over the category's crossed module")


def edge_cyclic_set(P: CombSkeleton, L: XiLabeling, e: int, colors: Optional[Sequence[int]] = None) -> CyclicXiSet:
    """The cyclic Xi-set of edge ``e`` in its stored orientation."""
    br = P.edges[e].branches
    return CyclicXiSet(
        tuple(L.alpha[r] for r, _ in br),
        tuple(L.beta[e]),
        tuple(s for _, s in br),
        tuple(colors[r] for r, _ in br) if colors is not None else None,
    )


def colorings(P: CombSkeleton, L: XiLabeling, C: PointedXiFusion) -> Iterator[tuple[int, ...]]:
    """Colorings with c(r) in I_alpha(r), pruned when an edge multiplicity space vanishes."""
    nr = len(P.regions)
    ready: list[list[int]] = [[] for _ in range(nr)]
    for e, ed in enumerate(P.edges):
        ready[max(r for r, _ in ed.branches)].append(e)
    fibers = [C.fiber(x) for x in L.alpha]
    col = [0] * nr
    reps, H = C.reps, C.base.H
    ready_words = [[(P.edges[e].branches, C.degree_counts[L.beta[e][0]]) for e in es] for es in ready]

    def edge_ok(branches, counts) -> bool:
        acc = H.identity
        for b, s in branches:
            x = reps[col[b]]
            acc = H.mul(acc, x if s > 0 else H.inv(x))
        return acc in counts

    def rec(r: int) -> Iterator[tuple[int, ...]]:
        if r == nr:
            yield tuple(col)
            return
        for i in fibers[r]:
            col[r] = i
            if all(edge_ok(br, counts) for br, counts in ready_words[r]):
                yield from rec(r + 1)

    yield from rec(0)


def coloring_dim(P: CombSkeleton, C: PointedXiFusion, colors: Sequence[int]) -> Scalar:
    out = Scalar.one()
    for r, reg in enumerate(P.regions):
        out = out * C.dims[colors[r]] ** reg.euler
    return out


def coloring_value(P: CombSkeleton, L: XiLabeling, C: PointedXiFusion, colors: Sequence[int], sweep: int = 1) -> Scalar:
    """|c|: edge contraction scalars times vertex link evaluations."""
    N = C.engine.N
    try:
        value = Scalar.one(N)
        for e in range(len(P.edges)):
            value = value * edge_pairing_scalar(edge_cyclic_set(P, L, e, colors), C, 0, sweep)
    except RankZero:
        return Scalar.zero(N)
    for v in range(len(P.vertices)):
        g = P.link_graph(v, C.cm, L.alpha, L.beta, colors)
        value = value * evaluate_colored(g, C, sweep)
        if value.is_zero():
            break
    return value


def _fast_path(C: PointedXiFusion) -> bool:
    return C.engine.N == 1 and all(s == 1 for s in C.dim_signs)


def state_sum(
    P: CombSkeleton, L: XiLabeling, C: PointedXiFusion, trace: bool = False, sweep: int = 1, check: bool = False
) -> StateSumReport:
    """dim_neutral^-balls * sum over colorings of dim(c) |c|."""
    _check_same_cm(P, L, C)
    if check:
        bad = validate_labeling(P, C.cm, L)
        if bad:
            raise StateSumError(bad[0].message)
    fast = _fast_path(C) and not trace
    rows = []
    if fast:
        # colorings surviving the rank pruning contribute 1 in untwisted unit-dimension categories
        total = Scalar.rational(sum(1 for _ in colorings(P, L, C)))
        normalized = total * C.dim_neutral() ** (-P.n_balls)
        return StateSumReport(normalized, total, P.n_balls, None)
    total = Scalar.zero(C.engine.N)
    for col in colorings(P, L, C):
        d = coloring_dim(P, C, col)
        v = coloring_value(P, L, C, col, sweep)
        total = total + d * v
        if trace:
            rows.append({"coloring": list(col), "dim": d.to_json(), "value": v.to_json()})
    normalized = total * C.dim_neutral() ** (-P.n_balls)
    return StateSumReport(normalized, total, P.n_balls, tuple(rows) if trace else None)


# lens spaces ----------------------------------------------------------------------


def lens_labeling(cm: CrossedModule, p: int, h: int, e: int) -> XiLabeling:
    """The lens-skeleton labeling (h, e), beta extended by precol2."""
    beta = [e]
    for _ in range(p - 1):
        beta.append(cm.act(cm.H.inv(h), beta[-1]))
    return XiLabeling((h,), (tuple(beta),))


def lens_invariant(p: int, q: int, h: int, e: int, C: PointedXiFusion) -> Scalar:
    """dim_neutral^-1 sum_{i in I_h} dim(i) sigma_i^q with sigma_i a scalar on Hom^e(1, i^p).

    Valid only for pointed categories; higher-rank Hom spaces need a matrix trace.
    """
    cm = C.cm
    if cm.d(e) != cm.H.power(h, p) or cm.act(h, e) != e:
        raise StateSumError("(h, e) is not a lens-space labeling")
    total = Scalar.zero(C.engine.N)
    for i in C.fiber(h):
        S = CyclicXiSet((h,) * p, (e,) * p, (1,) * p, (i,) * p)
        if not C.mult_index([(i, 1)] * p, e):
            continue
        # sigma_i moves the last strand to the front: the inverse of p_{0,1}
        sigma = cyclic_rotate_scalar(S, C, 0, 1).inverse()
        total = total + C.dims[i] * sigma ** q
    return total * C.dim_neutral().inverse()


# push-forward -------------------------------------------------------------------------


@dataclass(frozen=True)
class PushforwardCheck:
    lhs: Scalar
    rhs: Scalar
    contributions: tuple[dict, ...]

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs

    def to_json(self) -> dict:
        return {"lhs": self.lhs.to_json(), "rhs": self.rhs.to_json(), "equal": self.equal, "contributions": list(self.contributions)}


def push_labeling(m: XModMorphism, L: XiLabeling) -> XiLabeling:
    return XiLabeling(tuple(m.phi(x) for x in L.alpha), tuple(tuple(m.psi(b) for b in bs) for bs in L.beta))


def morphism_d_phi(m: XModMorphism) -> Fraction:
    """|Ker(phi)| / |Ker(psi)|."""
    return Fraction(len(m.phi.kernel()), len(m.psi.kernel()))


def pushforward_check(P: CombSkeleton, m: XModMorphism, C: PointedXiFusion, target: XiLabeling) -> PushforwardCheck:
    """Both sides of the push-forward formula for a single-ball skeleton and a target labeling.

    The right side sums over source pointed orbits whose image lies in the
    pointed orbit of ``target``, weighted by the ratio of stabilizer orders.
    """
    bad = pushforward_hypotheses(m)
    if bad:
        raise StateSumError("; ".join(v.message for v in bad))
    if C.cm != m.source:
        raise StateSumError("category is not over the morphism's source")
    if not P.single_ball:
        raise StateSumError("push-forward check needs a single-ball skeleton")
    if validate_labeling(P, m.target, target):
        raise StateSumError("target labeling is invalid")
    lhs = state_sum(P, target, pushforward(m, C)).normalized

    tgt_labelings = enumerate_labelings(P, m.target)
    index = {L: i for i, L in enumerate(tgt_labelings)}
    tgt_orbits = pointed_orbits_and_stabilizers(P, m.target, tgt_labelings)
    orbit_of = {i: k for k, o in enumerate(tgt_orbits) for i in o.members}
    mine = orbit_of[index[target]]
    tgt_stab = tgt_orbits[mine].stabilizer

    rhs = Scalar.zero(C.engine.N)
    rows = []
    for o in pointed_orbits_and_stabilizers(P, m.source):
        image = index.get(push_labeling(m, o.representative))
        if image is None:
            raise StateSumError("pushed labeling is not a target labeling")
        if orbit_of[image] != mine:
            continue
        value = state_sum(P, o.representative, C).normalized
        rhs = rhs + value * Fraction(tgt_stab, o.stabilizer)
        rows.append({"representative": o.representative.to_json(), "stabilizer_order": o.stabilizer, "value": value.to_json()})
    rhs = rhs * (1 / morphism_d_phi(m))
    return PushforwardCheck(lhs, rhs, tuple(rows))


# E = 1 oracle ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DWResult:
    value: Scalar
    extensions: int
    free_vertices: int
    constant: bool

    def to_json(self) -> dict:
        return {"value": self.value.to_json(), "extensions": self.extensions, "free_vertices": self.free_vertices, "constant": self.constant}


class _UF:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> None:
        self.parent[self.find(a)] = self.find(b)


def dw_oracle(t: Triangulation, H: FiniteGroup, exps: np.ndarray, order: int, alpha: Sequence[int]) -> DWResult:
    """Cocycle sum over flat H-labelings of the barycentric subdivision extending ``alpha``.

    Subdivision edges point from the barycenter of a face to the barycenter of
    a larger face and compose in path order.  The triangle of region r fixes
    the edge toward its r_- tetrahedron to 1 and the edge toward its r_+
    tetrahedron to alpha(r).  Each small tetrahedron (i, ij, ijk, ijkl)
    contributes omega(g01, g12, g23) to the power sigma_T sgn(ijkl).  The sum
    is divided by |H| to the number of vertex and edge barycenters.
    """
    rep = validate_triangulation(t)
    if not rep.valid:
        raise StateSumError(f"invalid triangulation: {rep.violations[0].message}")
    sigma = rep.orientation
    cells = _TriangulationCells(t, sigma)
    if len(alpha) != len(cells.triangles):
        raise StateSumError("alpha must label every triangle")
    full = frozenset(range(4))
    subsets = [frozenset(s) for r in range(1, 5) for s in permutations(range(4), r) if list(s) == sorted(s)]
    uf = _UF()
    for a in range(t.n_tets):
        for f, (b, g, perm) in enumerate(t.gluings[a]):
            face = full - {f}
            for x in subsets:
                if x <= face:
                    uf.union(("v", a, x), ("v", b, frozenset(perm[i] for i in x)))
                    for y in subsets:
                        if x < y <= face:
                            uf.union(("e", a, x, y), ("e", b, frozenset(perm[i] for i in x), frozenset(perm[i] for i in y)))
    var_index: dict = {}

    def var(a: int, x: frozenset, y: frozenset) -> int:
        return var_index.setdefault(uf.find(("e", a, x, y)), len(var_index))

    triples = []  # g(x->z) = g(x->y) g(y->z)
    small = []
    for a in range(t.n_tets):
        for pi in permutations(range(4)):
            chain = [frozenset(pi[: k + 1]) for k in range(4)]
            small.append((sigma[a] * _perm_sign(pi), var(a, chain[0], chain[1]), var(a, chain[1], chain[2]), var(a, chain[2], chain[3])))
        for x in subsets:
            for y in subsets:
                for z in subsets:
                    if x < y < z:
                        triples.append((var(a, x, y), var(a, y, z), var(a, x, z)))
    fixed: dict[int, int] = {}
    for k, (a, f) in enumerate(cells.triangles):
        b, g, _ = t.gluings[a][f]
        for key, val in ((var(a, full - {f}, full), H.identity), (var(b, full - {g}, full), alpha[k])):
            if fixed.get(key, val) != val:
                raise StateSumError("inconsistent fixed labels")
            fixed[key] = val
    free = {uf.find(("v", a, x)) for a in range(t.n_tets) for x in subsets if len(x) <= 2}

    n = len(var_index)
    by_var: list[list[tuple[int, int, int]]] = [[] for _ in range(n)]
    for tr in triples:
        for v in tr:
            by_var[v].append(tr)

    def propagate(val: list[Optional[int]], start: list[int]) -> Optional[list[int]]:
        changed, stack = [], list(start)
        while stack:
            v = stack.pop()
            for p, q, r in by_var[v]:
                a_, b_, c_ = val[p], val[q], val[r]
                if a_ is not None and b_ is not None:
                    want, tgt = H.mul(a_, b_), r
                elif a_ is not None and c_ is not None:
                    want, tgt = H.mul(H.inv(a_), c_), q
                elif b_ is not None and c_ is not None:
                    want, tgt = H.mul(c_, H.inv(b_)), p
                else:
                    continue
                if val[tgt] is None:
                    val[tgt] = want
                    changed.append(tgt)
                    stack.append(tgt)
                elif val[tgt] != want:
                    for c in changed:
                        val[c] = None
                    return None
        return changed

    values: list[Optional[int]] = [None] * n
    for k, x in fixed.items():
        values[k] = x
    weights: dict[int, int] = {}
    count = 0
    init = propagate(values, list(fixed))

    def weight() -> int:
        total = 0
        for s, p, q, r in small:
            total += s * int(exps[values[p], values[q], values[r]])
        return total % order

    def rec() -> None:
        nonlocal count
        try:
            v = values.index(None)
        except ValueError:
            w = weight()
            weights[w] = weights.get(w, 0) + 1
            count += 1
            return
        for h in H.elements():
            values[v] = h
            changed = propagate(values, [v])
            if changed is not None:
                rec()
                for c in changed:
                    values[c] = None
        values[v] = None

    if init is not None:
        rec()
    total = Scalar.zero(order)
    for w, c in weights.items():
        total = total + Scalar.root_of_unity(order, w) * c
    value = total * Fraction(1, H.order ** len(free))
    return DWResult(value, count, len(free), len(weights) <= 1)

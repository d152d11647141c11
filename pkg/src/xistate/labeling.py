"""Xi-labelings of skeletons, the gauge group, orbits and stabilizers.

A labeling stores ``alpha[r]`` for every region and, for every edge in its
stored orientation, ``beta[e][k]`` for the ball branch ``balls[k]``.  Labels of
the reversed edge are derived (precol3), never stored.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

from .groups import StructuralError, Violation
from .skeleton import CombSkeleton
from .xigraph import ArcSystem, generate_arc_system, grade, push_off
from .xmod import CrossedModule


class LabelingError(ValueError):
    pass


@dataclass(frozen=True)
class XiLabeling:
    alpha: tuple[int, ...]
    beta: tuple[tuple[int, ...], ...]

    def to_json(self) -> dict:
        return {"alpha": list(self.alpha), "beta": {str(e): list(b) for e, b in enumerate(self.beta)}}

    @classmethod
    def from_json(cls, doc: dict) -> XiLabeling:
        beta = doc["beta"]
        if isinstance(beta, dict):
            beta = [beta[str(e)] for e in range(len(beta))]
        return cls(tuple(doc["alpha"]), tuple(tuple(b) for b in beta))


def edge_word(P: CombSkeleton, cm: CrossedModule, alpha: Sequence[int], e: int, start: int = 0) -> int:
    """alpha(b_1)^eps(b_1) ... alpha(b_n)^eps(b_n) read from ball position ``start``."""
    H = cm.H
    br = P.edges[e].branches
    n = len(br)
    acc = H.identity
    for j in range(n):
        r, s = br[(start + j) % n]
        acc = H.mul(acc, alpha[r] if s > 0 else H.inv(alpha[r]))
    return acc


def extend_beta(P: CombSkeleton, cm: CrossedModule, alpha: Sequence[int], e: int, b0: int) -> tuple[int, ...]:
    """All beta(e, B_k) from beta(e, B_0) by precol2."""
    H = cm.H
    out = [b0]
    for r, s in P.edges[e].branches[:-1]:
        x = alpha[r] if s < 0 else H.inv(alpha[r])
        out.append(cm.act(x, out[-1]))
    return tuple(out)


def reversed_beta(cm: CrossedModule, beta_e: Sequence[int]) -> tuple[int, ...]:
    """beta(-e, B) = beta(e, B)^-1, indexed by the ball positions of the reversed edge."""
    n = len(beta_e)
    return tuple(cm.E.inv(beta_e[(n - j) % n]) for j in range(n))


# 1-sphericality with cached arc systems ------------------------------------------


@lru_cache(maxsize=256)
def _vertex_arcs(P: CombSkeleton, v: int) -> ArcSystem:
    return generate_arc_system(push_off(P.link_graph(v), 0))


def vertex_grade(P: CombSkeleton, cm: CrossedModule, L: XiLabeling, v: int) -> int:
    """Grade of a planar push-off of the labeled link graph of ``v``."""
    g = push_off(P.link_graph(v, cm, L.alpha, L.beta), 0)
    return grade(g, cm, _vertex_arcs(P, v), check=False)


def validate_labeling(P: CombSkeleton, cm: CrossedModule, L: XiLabeling) -> list[Violation]:
    """precol1-3 at every (edge, ball branch) and 1-sphericality at every vertex."""
    if len(L.alpha) != len(P.regions) or len(L.beta) != len(P.edges):
        raise StructuralError("labeling shape does not match the skeleton")
    for e, ed in enumerate(P.edges):
        if len(L.beta[e]) != len(ed):
            raise StructuralError(f"edge {e}: expected {len(ed)} beta labels")
    if any(not 0 <= x < cm.H.order for x in L.alpha) or any(not 0 <= b < cm.E.order for bs in L.beta for b in bs):
        raise StructuralError("label out of range")
    out: list[Violation] = []
    for e, ed in enumerate(P.edges):
        n = len(ed)
        for k in range(n):
            if cm.d(L.beta[e][k]) != edge_word(P, cm, L.alpha, e, k):
                out.append(Violation("precol1", (e, k), f"precol1 violated at edge {e}, branch order from ball position {k}"))
            r, s = ed.branches[k]
            x = L.alpha[r] if s < 0 else cm.H.inv(L.alpha[r])
            if L.beta[e][(k + 1) % n] != cm.act(x, L.beta[e][k]):
                out.append(Violation("precol2", (e, k), f"precol2 violated at edge {e}, ball position {k}"))
        # precol3: the reversed edge with inverted labels satisfies precol1 as well
        rev = ed.reversed()
        rb = reversed_beta(cm, L.beta[e])
        H = cm.H
        for j in range(n):
            acc = H.identity
            for t in range(n):
                r, s = rev.branches[(j + t) % n]
                acc = H.mul(acc, L.alpha[r] if s > 0 else H.inv(L.alpha[r]))
            if cm.d(rb[j]) != acc:
                out.append(Violation("precol3", (e, j), f"precol3 violated at reversed edge {e}, ball position {j}"))
    if out:
        return out
    for v in range(len(P.vertices)):
        if vertex_grade(P, cm, L, v) != cm.E.identity:
            out.append(Violation("one-spherical", (v,), f"link graph of vertex {v} is not 1-spherical"))
    return out


def enumerate_labelings(P: CombSkeleton, cm: CrossedModule) -> list[XiLabeling]:
    """Every Xi-labeling of P: regions in index order, beta fibers in group index order."""
    H, E = cm.H, cm.E
    nr = len(P.regions)
    fibers = cm.fibers
    ready_edges: list[list[int]] = [[] for _ in range(nr)]
    for e, ed in enumerate(P.edges):
        ready_edges[max(r for r, _ in ed.branches)].append(e)
    edge_done_at = {e: max(r for r, _ in ed.branches) for e, ed in enumerate(P.edges)}
    ready_vertices: dict[int, list[int]] = {}
    for v, vert in enumerate(P.vertices):
        last = max(edge_done_at[e] for e, _ in vert.ends)
        ready_vertices.setdefault(last, []).append(v)

    alpha = [H.identity] * nr
    beta: list[Optional[tuple[int, ...]]] = [None] * len(P.edges)
    out: list[XiLabeling] = []

    def vertices_ok(r: int) -> bool:
        if not ready_vertices.get(r):
            return True
        L = XiLabeling(tuple(alpha), tuple(b if b is not None else (0,) * len(P.edges[e]) for e, b in enumerate(beta)))
        return all(vertex_grade(P, cm, L, v) == E.identity for v in ready_vertices[r])

    def assign_edges(r: int, pending: list[int]) -> Iterator[None]:
        if not pending:
            if vertices_ok(r):
                yield None
            return
        e, rest = pending[0], pending[1:]
        for b0 in fibers.get(edge_word(P, cm, alpha, e), ()):
            beta[e] = extend_beta(P, cm, alpha, e, b0)
            yield from assign_edges(r, rest)
        beta[e] = None

    def rec(r: int) -> None:
        if r == nr:
            out.append(XiLabeling(tuple(alpha), tuple(beta)))  # type: ignore[arg-type]
            return
        for x in H.elements():
            alpha[r] = x
            for _ in assign_edges(r, ready_edges[r]):
                rec(r + 1)
        alpha[r] = H.identity

    if nr == 0:
        return [XiLabeling((), ())] if not P.edges else []
    rec(0)
    return out


def trivial_labeling(P: CombSkeleton, cm: CrossedModule) -> XiLabeling:
    return XiLabeling(tuple(cm.H.identity for _ in P.regions), tuple(tuple(cm.E.identity for _ in ed.branches) for ed in P.edges))


# gauge group -------------------------------------------------------------------


@dataclass(frozen=True)
class GaugeElement:
    lam: tuple[int, ...]  # balls -> H
    mu: tuple[int, ...]  # regions -> E

    def to_json(self) -> dict:
        return {"lambda": list(self.lam), "mu": list(self.mu)}


def gauge_identity(P: CombSkeleton, cm: CrossedModule) -> GaugeElement:
    return GaugeElement(tuple(cm.H.identity for _ in range(P.n_balls)), tuple(cm.E.identity for _ in P.regions))


def gauge_product(P: CombSkeleton, cm: CrossedModule, g2: GaugeElement, g1: GaugeElement) -> GaugeElement:
    """(lam', mu') . (lam, mu) = (lam' lam, r -> mu(r) ^{lam(r_+)^-1} mu'(r))."""
    H, E = cm.H, cm.E
    lam = tuple(H.mul(a, b) for a, b in zip(g2.lam, g1.lam))
    mu = tuple(
        E.mul(g1.mu[r], cm.act(H.inv(g1.lam[reg.plus]), g2.mu[r])) for r, reg in enumerate(P.regions)
    )
    return GaugeElement(lam, mu)


def random_gauge(P: CombSkeleton, cm: CrossedModule, rng: random.Random) -> GaugeElement:
    return GaugeElement(
        tuple(rng.randrange(cm.H.order) for _ in range(P.n_balls)), tuple(rng.randrange(cm.E.order) for _ in P.regions)
    )


@dataclass(frozen=True)
class ArcData:
    """Region crossings (r_-, r_+) and the loop word of every (edge, ball position)."""

    crossings: tuple[tuple[int, int], ...]
    loops: tuple[tuple[tuple[tuple[int, int], ...], ...], ...]

    def to_json(self) -> dict:
        return {"crossings": [list(c) for c in self.crossings], "loops": [[[list(x) for x in w] for w in ws] for ws in self.loops]}


def arc_data(P: CombSkeleton) -> ArcData:
    loops = []
    for ed in P.edges:
        n = len(ed)
        loops.append(tuple(tuple(ed.branches[(k + j) % n] for j in range(n)) for k in range(n)))
    return ArcData(tuple((r.minus, r.plus) for r in P.regions), tuple(loops))


def mu_alpha(cm: CrossedModule, alpha: Sequence[int], mu: Sequence[int], word: Iterable[tuple[int, int]]) -> int:
    """Extension of mu to concatenated arcs: gamma_r^+1 and gamma_r^-1 steps, left to right."""
    E, H = cm.E, cm.H
    acc = E.identity
    for r, s in word:
        if s > 0:
            acc = E.mul(cm.act(H.inv(alpha[r]), acc), mu[r])
        else:
            acc = cm.act(alpha[r], E.mul(acc, E.inv(mu[r])))
    return acc


def gauge_act(P: CombSkeleton, cm: CrossedModule, g: GaugeElement, L: XiLabeling, arcs: Optional[ArcData] = None) -> XiLabeling:
    arcs = arcs or arc_data(P)
    H, E = cm.H, cm.E
    alpha = tuple(
        H.prod([g.lam[reg.minus], L.alpha[r], cm.d(g.mu[r]), H.inv(g.lam[reg.plus])]) for r, reg in enumerate(P.regions)
    )
    support = {r for r, m in enumerate(g.mu) if m != E.identity}
    beta = []
    for e, ed in enumerate(P.edges):
        row = []
        # mu_alpha of a word avoiding the support of mu is trivial
        touched = any(r in support for r, _ in ed.branches)
        for k, B in enumerate(ed.balls):
            f = mu_alpha(cm, L.alpha, g.mu, arcs.loops[e][k]) if touched else E.identity
            row.append(cm.act(g.lam[B], E.mul(L.beta[e][k], f)))
        beta.append(tuple(row))
    return XiLabeling(alpha, tuple(beta))


def _generators(G) -> list[int]:
    """A small generating set, greedily chosen."""
    gens: list[int] = []
    span = G.subgroup_closure(gens)
    for x in G.elements():
        if x not in span:
            gens.append(x)
            span = G.subgroup_closure(gens)
    return gens


def gauge_generators(P: CombSkeleton, cm: CrossedModule, pointed: bool = False) -> list[GaugeElement]:
    ident = gauge_identity(P, cm)
    out = []
    if not pointed:
        for B in range(P.n_balls):
            for h in _generators(cm.H):
                lam = list(ident.lam)
                lam[B] = h
                out.append(GaugeElement(tuple(lam), ident.mu))
    for r in range(len(P.regions)):
        for e in _generators(cm.E):
            mu = list(ident.mu)
            mu[r] = e
            out.append(GaugeElement(ident.lam, tuple(mu)))
    return out


@dataclass(frozen=True)
class Orbit:
    representative: XiLabeling
    members: tuple[int, ...]  # indices into the labeling list
    stabilizer: Optional[int] = None

    def to_json(self, labelings: Sequence[XiLabeling]) -> dict:
        doc = {"representative": self.representative.to_json(), "size": len(self.members), "members": list(self.members)}
        if self.stabilizer is not None:
            doc["stabilizer_order"] = self.stabilizer
        return doc


def _partition(P: CombSkeleton, cm: CrossedModule, labelings: Sequence[XiLabeling], gens: Sequence[GaugeElement]) -> list[list[int]]:
    index = {L: i for i, L in enumerate(labelings)}
    arcs = arc_data(P)
    seen = [False] * len(labelings)
    out = []
    for i in range(len(labelings)):
        if seen[i]:
            continue
        seen[i] = True
        comp, stack = [i], [i]
        while stack:
            j = stack.pop()
            for g in gens:
                k = index.get(gauge_act(P, cm, g, labelings[j], arcs))
                if k is None:
                    raise LabelingError("gauge action left the labeling set")
                if not seen[k]:
                    seen[k] = True
                    comp.append(k)
                    stack.append(k)
        out.append(sorted(comp))
    return out


def orbits(P: CombSkeleton, cm: CrossedModule, labelings: Optional[Sequence[XiLabeling]] = None) -> list[Orbit]:
    """Orbits of the full gauge group, each represented by its first enumerated member."""
    labelings = list(labelings) if labelings is not None else enumerate_labelings(P, cm)
    parts = _partition(P, cm, labelings, gauge_generators(P, cm))
    return [Orbit(labelings[c[0]], tuple(c)) for c in parts]


def stabilizer_order(P: CombSkeleton, cm: CrossedModule, L: XiLabeling) -> int:
    """Number of mu: Reg -> Ker(d) with mu_alpha trivial on every loop word."""
    arcs = arc_data(P)
    kernel = cm.kernel
    count = 0
    for mu in product(kernel, repeat=len(P.regions)):
        if all(mu_alpha(cm, L.alpha, mu, w) == cm.E.identity for ws in arcs.loops for w in ws):
            count += 1
    return count


def pointed_orbits_and_stabilizers(
    P: CombSkeleton, cm: CrossedModule, labelings: Optional[Sequence[XiLabeling]] = None
) -> list[Orbit]:
    """Orbits of {1} x Map(Reg, E) with stabilizer orders; single-ball skeletons only."""
    if not P.single_ball:
        raise LabelingError("the pointed gauge subgroup is only defined for single-ball skeletons")
    labelings = list(labelings) if labelings is not None else enumerate_labelings(P, cm)
    parts = _partition(P, cm, labelings, gauge_generators(P, cm, pointed=True))
    return [Orbit(labelings[c[0]], tuple(c), stabilizer_order(P, cm, labelings[c[0]])) for c in parts]


def reorient_labeling(P: CombSkeleton, cm: CrossedModule, L: XiLabeling, edges: Sequence[int] = (), regions: Sequence[int] = ()) -> XiLabeling:
    """Labels of ``P.reoriented(edges, regions)`` describing the same labeling."""
    fe, fr = set(edges), set(regions)
    alpha = tuple(cm.H.inv(x) if r in fr else x for r, x in enumerate(L.alpha))
    beta = tuple(reversed_beta(cm, b) if e in fe else b for e, b in enumerate(L.beta))
    return XiLabeling(alpha, beta)

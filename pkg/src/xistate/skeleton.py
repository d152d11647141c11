"""Combinatorial skeletons of closed oriented 3-manifolds.

A skeleton edge stores one orientation.  Its branches are listed in the
positive cyclic order of a small loop linking the edge, each with its region
and sign; ``balls[k]`` is the ball branch met just before ``branches[k]``, so
that ``branches[k]`` is the branch b_B of that ball.

The link graph of a vertex has one vertex per edge end at that vertex.  An end
``(edge, +1)`` is the end where the stored orientation leaves the vertex and
``(edge, -1)`` the end where it arrives.  Link edges are the branch germs at the
vertex; each joins a branch position at one end to a branch position at another.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from importlib import resources
from itertools import permutations, product
from math import gcd
from typing import Optional, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import invariant_factors

from .groups import StructuralError, Violation
from .xigraph import PlanarXiGraph
from .xmod import CrossedModule

End = tuple[int, int]  # (edge, +1 tail end | -1 head end)
Slot = tuple[int, int]  # (index into the vertex's end list, branch position)


class SkeletonError(ValueError):
    pass


def _perm_sign(seq: Sequence[int]) -> int:
    s = 1
    seq = list(seq)
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                s = -s
    return s


# skeletons ------------------------------------------------------------------


@dataclass(frozen=True)
class Region:
    euler: int
    minus: int  # ball r_-
    plus: int  # ball r_+


@dataclass(frozen=True)
class SkelEdge:
    tail: int
    head: int
    branches: tuple[tuple[int, int], ...]  # (region, eps)
    balls: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.branches)

    def reversed(self) -> SkelEdge:
        """The same edge with the opposite orientation."""
        n = len(self.branches)
        return SkelEdge(
            self.head,
            self.tail,
            tuple((r, -s) for r, s in reversed(self.branches)),
            tuple(self.balls[(n - j) % n] for j in range(n)),
        )


@dataclass(frozen=True)
class LinkEdge:
    region: int
    tail: Slot
    head: Slot


@dataclass(frozen=True)
class SkelVertex:
    ends: tuple[End, ...]
    links: tuple[LinkEdge, ...]


@dataclass(frozen=True)
class CombSkeleton:
    name: str
    n_balls: int
    regions: tuple[Region, ...]
    edges: tuple[SkelEdge, ...]
    vertices: tuple[SkelVertex, ...]

    # link graphs -------------------------------------------------------------
    def link_graph(
        self,
        v: int,
        cm: Optional[CrossedModule] = None,
        alpha: Optional[Sequence[int]] = None,
        beta: Optional[Sequence[Sequence[int]]] = None,
        colors: Optional[Sequence[int]] = None,
    ) -> PlanarXiGraph:
        """Link graph of vertex ``v`` on the sphere, labeled when ``alpha``/``beta`` are given.

        The tail-end vertex of an edge is anchored at branch 0 with label
        beta[e][0]; the head-end vertex carries the dual cyclic set anchored at
        branch n-1 with label beta[e][0]^-1.
        """
        vert = self.vertices[v]
        edges = []
        half_at: dict[Slot, int] = {}
        for k, le in enumerate(vert.links):
            x = alpha[le.region] if alpha is not None else 0
            edges.append((le.tail[0], le.head[0], x))
            half_at[le.tail] = 2 * k
            half_at[le.head] = 2 * k + 1
        rotation = []
        anchors = []
        for i, (e, d) in enumerate(vert.ends):
            n = len(self.edges[e])
            positions = range(n) if d > 0 else range(n - 1, -1, -1)
            rot = tuple(half_at[(i, p)] for p in positions)
            rotation.append(rot)
            if beta is None or cm is None:
                anchors.append((rot[0], 0))
            else:
                b0 = beta[e][0]
                anchors.append((rot[0], b0 if d > 0 else cm.E.inv(b0)))
        col = tuple(colors[le.region] for le in vert.links) if colors is not None else None
        return PlanarXiGraph(len(vert.ends), tuple(edges), tuple(rotation), tuple(anchors), sphere=True, colors=col)

    def reoriented(self, edges: Sequence[int] = (), regions: Sequence[int] = ()) -> CombSkeleton:
        """The same skeleton with the given edges and regions carrying the opposite orientation."""
        fe, fr = set(edges), set(regions)
        new_regions = tuple(Region(r.euler, r.plus, r.minus) if i in fr else r for i, r in enumerate(self.regions))
        new_edges = []
        for e, ed in enumerate(self.edges):
            ed = SkelEdge(ed.tail, ed.head, tuple((r, -s if r in fr else s) for r, s in ed.branches), ed.balls)
            new_edges.append(ed.reversed() if e in fe else ed)
        new_vertices = []
        for vert in self.vertices:

            def slot(sl: Slot) -> Slot:
                e = vert.ends[sl[0]][0]
                return (sl[0], len(self.edges[e]) - 1 - sl[1]) if e in fe else sl

            ends = tuple((e, -d if e in fe else d) for e, d in vert.ends)
            links = []
            for le in vert.links:
                t, h = slot(le.tail), slot(le.head)
                links.append(LinkEdge(le.region, h, t) if le.region in fr else LinkEdge(le.region, t, h))
            new_vertices.append(SkelVertex(ends, tuple(links)))
        return CombSkeleton(self.name, self.n_balls, new_regions, tuple(new_edges), tuple(new_vertices))

    # structure ---------------------------------------------------------------
    @cached_property
    def single_ball(self) -> bool:
        return self.n_balls == 1

    def euler_characteristic(self) -> int:
        """V - E + sum chi(r) - balls; zero for every closed 3-manifold."""
        return len(self.vertices) - len(self.edges) + sum(r.euler for r in self.regions) - self.n_balls

    def violations(self) -> list[Violation]:
        out: list[Violation] = []
        for e, ed in enumerate(self.edges):
            if len(ed.branches) < 2:
                out.append(Violation("valence", (e,), f"edge {e} has valence {len(ed.branches)} < 2"))
            if len(ed.balls) != len(ed.branches):
                out.append(Violation("interleaving", (e,), f"edge {e}: ball and branch lists differ in length"))
            for r, s in ed.branches:
                if not 0 <= r < len(self.regions) or s not in (1, -1):
                    out.append(Violation("branch", (e,), f"edge {e}: malformed branch {(r, s)}"))
            for B in ed.balls:
                if not 0 <= B < self.n_balls:
                    out.append(Violation("branch", (e,), f"edge {e}: unknown ball {B}"))
            if ed.reversed().reversed() != ed:
                out.append(Violation("reversal", (e,), f"edge {e}: reversing twice is not the identity"))
            # crossing branch b with sign + leads from r_-(b) to r_+(b)
            n = len(ed.branches)
            for k, (r, s) in enumerate(ed.branches):
                reg = self.regions[r] if 0 <= r < len(self.regions) else None
                if reg is None or n != len(ed.balls):
                    continue
                before, after = ed.balls[k], ed.balls[(k + 1) % n]
                want = (reg.minus, reg.plus) if s > 0 else (reg.plus, reg.minus)
                if (before, after) != want:
                    out.append(Violation("ball-sides", (e, k), f"edge {e} branch {k}: balls {before, after} do not match region {r}"))
        seen_ends: dict[End, int] = {}
        for v, vert in enumerate(self.vertices):
            for i, (e, d) in enumerate(vert.ends):
                if (e, d) in seen_ends:
                    out.append(Violation("ends", (v, e, d), f"end {(e, d)} listed twice"))
                seen_ends[(e, d)] = v
                ed = self.edges[e]
                if (ed.tail if d > 0 else ed.head) != v:
                    out.append(Violation("ends", (v, e, d), f"end {(e, d)} is not at vertex {v}"))
            slots: list[Slot] = []
            for k, le in enumerate(vert.links):
                for slot, want in ((le.tail, -1), (le.head, 1)):
                    i, p = slot
                    e, d = vert.ends[i]
                    r, s = self.edges[e].branches[p]
                    slots.append(slot)
                    if r != le.region:
                        out.append(Violation("link-region", (v, k), f"vertex {v} link edge {k}: region mismatch at {slot}"))
                    if s * d != want:
                        out.append(Violation("link-sign", (v, k), f"vertex {v} link edge {k}: orientation disagrees with eps at {slot}"))
            expected = [(i, p) for i, (e, _) in enumerate(vert.ends) for p in range(len(self.edges[e]))]
            if sorted(slots) != sorted(expected):
                out.append(Violation("link-slots", (v,), f"vertex {v}: link edges do not cover every branch position once"))
                continue
            g = self.link_graph(v)
            for bad in g.embedding_violations():
                out.append(Violation("link-euler", (v,), f"vertex {v}: {bad.message}"))
            if len(g.components) != 1:
                out.append(Violation("link-euler", (v,), f"vertex {v}: link graph is disconnected"))
        for e, ed in enumerate(self.edges):
            for d in (1, -1):
                if (e, d) not in seen_ends:
                    out.append(Violation("ends", (e, d), f"end {(e, d)} of edge {e} missing from vertex links"))
        if self.euler_characteristic() != 0:
            out.append(Violation("euler", (), f"Euler characteristic {self.euler_characteristic()} != 0"))
        return out

    # serialization -----------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "name": self.name,
            "balls": self.n_balls,
            "regions": [{"euler": r.euler, "minus": r.minus, "plus": r.plus} for r in self.regions],
            "edges": [
                {"tail": e.tail, "head": e.head, "branches": [list(b) for b in e.branches], "balls": list(e.balls)}
                for e in self.edges
            ],
            "vertices": [
                {
                    "ends": [list(x) for x in v.ends],
                    "links": [{"region": le.region, "tail": list(le.tail), "head": list(le.head)} for le in v.links],
                }
                for v in self.vertices
            ],
        }

    @classmethod
    def from_json(cls, doc: dict) -> CombSkeleton:
        return cls(
            doc.get("name", "skeleton"),
            doc["balls"],
            tuple(Region(r["euler"], r["minus"], r["plus"]) for r in doc["regions"]),
            tuple(
                SkelEdge(e["tail"], e["head"], tuple(tuple(b) for b in e["branches"]), tuple(e["balls"]))
                for e in doc["edges"]
            ),
            tuple(
                SkelVertex(
                    tuple(tuple(x) for x in v["ends"]),
                    tuple(LinkEdge(le["region"], tuple(le["tail"]), tuple(le["head"])) for le in v["links"]),
                )
                for v in doc["vertices"]
            ),
        )


def disjoint_union(a: CombSkeleton, b: CombSkeleton) -> CombSkeleton:
    nb, nr, ne, nv = a.n_balls, len(a.regions), len(a.edges), len(a.vertices)
    return CombSkeleton(
        f"{a.name}+{b.name}",
        nb + b.n_balls,
        a.regions + tuple(Region(r.euler, r.minus + nb, r.plus + nb) for r in b.regions),
        a.edges
        + tuple(
            SkelEdge(e.tail + nv, e.head + nv, tuple((r + nr, s) for r, s in e.branches), tuple(B + nb for B in e.balls))
            for e in b.edges
        ),
        a.vertices
        + tuple(
            SkelVertex(tuple((e + ne, d) for e, d in v.ends), tuple(LinkEdge(le.region + nr, le.tail, le.head) for le in v.links))
            for v in b.vertices
        ),
    )


# special skeletons --------------------------------------------------------------


def _one_loop_skeleton(name: str, n_balls: int, regions: Sequence[Region], branches, balls, shift: int) -> CombSkeleton:
    """One vertex and one loop edge; link edge k joins tail position k to head position k + shift."""
    n = len(branches)
    edge = SkelEdge(0, 0, tuple(branches), tuple(balls))
    links = []
    for k, (r, s) in enumerate(branches):
        q = (k + shift) % n
        tail_end_slot, head_end_slot = (0, k), (1, q)
        # at the tail end (d=+1) a positive branch is the head of its link edge
        if s > 0:
            links.append(LinkEdge(r, head_end_slot, tail_end_slot))
        else:
            links.append(LinkEdge(r, tail_end_slot, head_end_slot))
    vert = SkelVertex(((0, 1), (0, -1)), tuple(links))
    return CombSkeleton(name, n_balls, tuple(regions), (edge,), (vert,))


def lens_skeleton(p: int, q: int) -> CombSkeleton:
    """One vertex, one edge of valence p, one disk region, one ball."""
    if not (1 <= q < p) or gcd(p, q) != 1:
        raise SkeletonError(f"lens parameters must satisfy 1 <= q < p with gcd 1, got {(p, q)}")
    # the branch at tail position k continues through the vertex to head position k + q
    return _one_loop_skeleton(f"lens:{p},{q}", 1, [Region(1, 0, 0)], [(0, 1)] * p, [0] * p, q)


def s1xs2_skeleton() -> CombSkeleton:
    """Sphere slice plus annulus: disks D1 (region 0), D2 (region 1), annulus (region 2).

    Branch order (A, D1, A, D2) with signs (-, +, +, +), starting after ball 1,
    gives the edge word z^-1 x z y.  Ball 0 lies on the D1 side.
    """
    branches = [(2, -1), (0, 1), (2, 1), (1, 1)]
    balls = [1, 0, 0, 1]
    regions = [Region(1, 0, 0), Region(1, 1, 1), Region(0, 0, 1)]
    return _one_loop_skeleton("s1xs2", 2, regions, branches, balls, 0)


# triangulations -----------------------------------------------------------------

Gluing = tuple[int, int, tuple[int, int, int, int]]  # (to_tet, to_face, perm)


@dataclass(frozen=True)
class Triangulation:
    """Tetrahedra 0..n-1 with vertices 0..3; face f is the face opposite vertex f."""

    n_tets: int
    gluings: tuple[tuple[Optional[Gluing], ...], ...]
    name: str = "triangulation"

    @classmethod
    def from_pairs(cls, n_tets: int, pairs: Sequence[tuple[int, int, int, int, Sequence[int]]], name: str = "triangulation") -> Triangulation:
        table: list[list[Optional[Gluing]]] = [[None] * 4 for _ in range(n_tets)]
        for t, f, u, g, perm in pairs:
            perm = tuple(perm)
            inv = [0] * 4
            for i, j in enumerate(perm):
                inv[j] = i
            for (a, fa, b, fb, pm) in ((t, f, u, g, perm), (u, g, t, f, tuple(inv))):
                if table[a][fa] is not None and table[a][fa] != (b, fb, pm):
                    raise StructuralError(f"face {fa} of tet {a} glued twice inconsistently")
                table[a][fa] = (b, fb, pm)
        return cls(n_tets, tuple(tuple(r) for r in table), name)

    def to_json(self) -> dict:
        out = []
        for t in range(self.n_tets):
            for f in range(4):
                gl = self.gluings[t][f]
                if gl is not None and (t, f) <= (gl[0], gl[1]):
                    out.append({"tet": t, "face": f, "to_tet": gl[0], "to_face": gl[1], "perm": list(gl[2])})
        return {"name": self.name, "tets": self.n_tets, "gluings": out}

    @classmethod
    def from_json(cls, doc: dict) -> Triangulation:
        pairs = [(g["tet"], g["face"], g["to_tet"], g["to_face"], g["perm"]) for g in doc["gluings"]]
        return cls.from_pairs(doc["tets"], pairs, doc.get("name", "triangulation"))


@dataclass(frozen=True)
class TriangulationReport:
    violations: tuple[Violation, ...]
    orientation: Optional[tuple[int, ...]]

    @property
    def valid(self) -> bool:
        return not self.violations


def validate_triangulation(t: Triangulation) -> TriangulationReport:
    """Closedness, involutivity, orientability; the orientation found is recorded."""
    out: list[Violation] = []
    if len(t.gluings) != t.n_tets:
        return TriangulationReport((Violation("shape", (), "one gluing row per tetrahedron required"),), None)
    for a in range(t.n_tets):
        if len(t.gluings[a]) != 4:
            out.append(Violation("shape", (a,), f"tet {a} needs four face entries"))
            continue
        for f, gl in enumerate(t.gluings[a]):
            if gl is None:
                out.append(Violation("closed", (a, f), f"face {f} of tet {a} is unglued"))
                continue
            b, g, perm = gl
            if not 0 <= b < t.n_tets or not 0 <= g < 4 or sorted(perm) != [0, 1, 2, 3] or perm[f] != g:
                out.append(Violation("gluing", (a, f), f"face {f} of tet {a}: malformed gluing"))
                continue
            if (a, f) == (b, g):
                out.append(Violation("gluing", (a, f), f"face {f} of tet {a} is glued to itself"))
                continue
            back = t.gluings[b][g] if len(t.gluings[b]) == 4 else None
            inv = tuple(perm.index(i) for i in range(4))
            if back != (a, f, inv):
                out.append(Violation("involutive", (a, f), f"gluing of face {f} of tet {a} is not matched by its partner"))
    if out:
        return TriangulationReport(tuple(out), None)
    sigma: list[Optional[int]] = [None] * t.n_tets
    for start in range(t.n_tets):
        if sigma[start] is not None:
            continue
        sigma[start] = 1
        stack = [start]
        while stack:
            a = stack.pop()
            for f, (b, g, perm) in enumerate(t.gluings[a]):
                want = -sigma[a] * _perm_sign(perm)
                if sigma[b] is None:
                    sigma[b] = want
                    stack.append(b)
                elif sigma[b] != want:
                    out.append(Violation("orientable", (a, f), f"gluing at face {f} of tet {a} cannot reverse orientation"))
    if out:
        return TriangulationReport(tuple(out[:1]), None)
    orient = tuple(int(s) for s in sigma)
    try:
        _TriangulationCells(t, orient)
    except SkeletonError as exc:
        return TriangulationReport((Violation("manifold", (), str(exc)),), orient)
    return TriangulationReport((), orient)


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


class _TriangulationCells:
    """Vertex, edge and triangle classes with the branch cycles around every edge."""

    def __init__(self, t: Triangulation, sigma: tuple[int, ...]) -> None:
        self.t, self.sigma = t, sigma
        n = t.n_tets
        uf = _UnionFind()
        for a in range(n):
            for f, (b, g, perm) in enumerate(t.gluings[a]):
                for i in range(4):
                    if i != f:
                        uf.union((a, i), (b, perm[i]))
        roots: dict = {}
        self.vclass: dict[tuple[int, int], int] = {}
        for a in range(n):
            for i in range(4):
                r = uf.find((a, i))
                self.vclass[(a, i)] = roots.setdefault(r, len(roots))
        self.n_vertices = len(roots)

        # triangles: canonical instance is the lower (tet, face) of the pair
        self.triangles: list[tuple[int, int]] = []
        self.face_tri: dict[tuple[int, int], int] = {}
        self.corner: dict[tuple[int, int], dict[int, int]] = {}
        self.tau: list[int] = []
        self.sides: list[tuple[int, int]] = []  # (r_-, r_+)
        for a in range(n):
            for f in range(4):
                if (a, f) in self.face_tri:
                    continue
                b, g, perm = t.gluings[a][f]
                k = len(self.triangles)
                self.triangles.append((a, f))
                verts = [i for i in range(4) if i != f]
                self.face_tri[(a, f)] = k
                self.face_tri[(b, g)] = k
                self.corner[(a, f)] = {v: c for c, v in enumerate(verts)}
                self.corner[(b, g)] = {perm[v]: c for c, v in enumerate(verts)}
                self.tau.append(sigma[a] * (-1) ** f)
                self.sides.append((a, b))

        # edges: traverse the cycle of (tet, a, b, k) states around each class
        self.edge_of: dict[tuple[int, int, int], tuple[int, int]] = {}
        self.cycles: list[list[tuple[int, int, int, int]]] = []
        instances = sorted((a, i, j) for a in range(n) for i in range(4) for j in range(i + 1, 4))
        for a, i, j in instances:
            if (a, i, j) in self.edge_of:
                continue
            u, w = self.vclass[(a, i)], self.vclass[(a, j)]
            start = (a, j, i) if w < u else (a, i, j)
            cyc = self._cycle(*start)
            e = len(self.cycles)
            for (b, x, y, _) in cyc:
                if (b, x, y) in self.edge_of or (b, y, x) in self.edge_of:
                    raise SkeletonError(f"edge class of {(a, i, j)} is identified with its reverse")
                self.edge_of[(b, x, y)] = (e, 1)
                self.edge_of[(b, y, x)] = (e, -1)
            self.cycles.append(cyc)
        self.n_edges = len(self.cycles)
        self._check_links()

    def positive(self, a: int, tup: Sequence[int]) -> bool:
        return self.sigma[a] * _perm_sign(tup) > 0

    def _cycle(self, a: int, i: int, j: int) -> list[tuple[int, int, int, int]]:
        k, l = [x for x in range(4) if x not in (i, j)]
        if not self.positive(a, (i, j, k, l)):
            k, l = l, k
        state = (a, i, j, k)
        out = []
        while True:
            out.append(state)
            a, i, j, k = state
            l = 6 - i - j - k
            b, g, perm = self.t.gluings[a][k]
            nxt = (b, perm[i], perm[j], perm[l])
            if not self.positive(b, (perm[i], perm[j], perm[l], g)):
                raise SkeletonError(f"gluing at face {k} of tet {a} is not orientation reversing")
            state = nxt
            if state == out[0]:
                return out
            if len(out) > 6 * self.t.n_tets:
                raise SkeletonError("edge cycle does not close")

    def branch(self, state: tuple[int, int, int, int]) -> tuple[int, int, int, tuple[int, int]]:
        """(triangle, eps, from-corner, side) of the branch after ball ``state[0]``."""
        a, i, j, k = state
        l = 6 - i - j - k
        tri = self.face_tri[(a, k)]
        cmap = self.corner[(a, k)]
        ci, cj, cl = cmap[i], cmap[j], cmap[l]
        eps = self.tau[tri] * _perm_sign((ci, cj, cl))
        return tri, eps, ci, (min(ci, cj), max(ci, cj))

    def _check_links(self) -> None:
        ends = [0] * self.n_vertices
        for cyc in self.cycles:
            a, i, j, _ = cyc[0]
            ends[self.vclass[(a, i)]] += 1
            ends[self.vclass[(a, j)]] += 1
        corners = [0] * self.n_vertices
        for a, f in self.triangles:
            for i in range(4):
                if i != f:
                    corners[self.vclass[(a, i)]] += 1
        tets = [0] * self.n_vertices
        for (a, i), v in self.vclass.items():
            tets[v] += 1
        for v in range(self.n_vertices):
            chi = ends[v] - corners[v] + tets[v]
            if chi != 2:
                raise SkeletonError(f"link of vertex class {v} has Euler characteristic {chi}, not a sphere")


def skeleton_from_triangulation(t: Triangulation) -> CombSkeleton:
    """The oriented 2-skeleton: regions are triangles, edges are edges, balls are tetrahedra."""
    rep = validate_triangulation(t)
    if not rep.valid:
        raise SkeletonError(f"invalid triangulation: {rep.violations[0].message}")
    cells = _TriangulationCells(t, rep.orientation)
    regions = tuple(Region(1, m, p) for m, p in cells.sides)
    edges = []
    where: dict[tuple[int, tuple[int, int]], tuple[int, int, int]] = {}  # (tri, side) -> (edge, pos, from-corner)
    for e, cyc in enumerate(cells.cycles):
        a, i, j, _ = cyc[0]
        branches, balls = [], []
        for pos, state in enumerate(cyc):
            tri, eps, frm, side = cells.branch(state)
            branches.append((tri, eps))
            balls.append(state[0])
            where[(tri, side)] = (e, pos, frm)
        edges.append(SkelEdge(cells.vclass[(a, i)], cells.vclass[(a, j)], tuple(branches), tuple(balls)))
    ends: list[list[End]] = [[] for _ in range(cells.n_vertices)]
    for e, ed in enumerate(edges):
        ends[ed.tail].append((e, 1))
        ends[ed.head].append((e, -1))
    end_index = [{x: i for i, x in enumerate(es)} for es in ends]
    links: list[list[LinkEdge]] = [[] for _ in range(cells.n_vertices)]

    def slot(v: int, tri: int, m: int, other: int) -> Slot:
        e, pos, frm = where[(tri, (min(m, other), max(m, other)))]
        d = 1 if frm == m else -1
        return end_index[v][(e, d)], pos

    for tri, (a, f) in enumerate(cells.triangles):
        verts = [i for i in range(4) if i != f]
        for m in range(3):
            v = cells.vclass[(a, verts[m])]
            nxt, prv = (m + 1) % 3, (m + 2) % 3
            if cells.tau[tri] > 0:
                links[v].append(LinkEdge(tri, slot(v, tri, m, prv), slot(v, tri, m, nxt)))
            else:
                links[v].append(LinkEdge(tri, slot(v, tri, m, nxt), slot(v, tri, m, prv)))
    verts_out = tuple(SkelVertex(tuple(ends[v]), tuple(links[v])) for v in range(cells.n_vertices))
    return CombSkeleton(t.name, t.n_tets, regions, tuple(edges), verts_out)


# homology -----------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianGroup:
    rank: int
    torsion: tuple[int, ...]

    def __str__(self) -> str:
        parts = ["Z"] * self.rank + [f"Z/{k}" for k in self.torsion]
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}


def homology_h1(t: Triangulation) -> AbelianGroup:
    """H_1 of the cell complex of the triangulation, by Smith normal form."""
    rep = validate_triangulation(t)
    if rep.orientation is None:
        raise SkeletonError(f"invalid triangulation: {rep.violations[0].message}")
    cells = _TriangulationCells(t, rep.orientation)
    d1 = [[0] * cells.n_edges for _ in range(cells.n_vertices)]
    for e, cyc in enumerate(cells.cycles):
        a, i, j, _ = cyc[0]
        d1[cells.vclass[(a, j)]][e] += 1
        d1[cells.vclass[(a, i)]][e] -= 1
    d2 = [[0] * len(cells.triangles) for _ in range(cells.n_edges)]
    for tri, (a, f) in enumerate(cells.triangles):
        v = [i for i in range(4) if i != f]
        for (x, y), s in (((v[1], v[2]), 1), ((v[0], v[2]), -1), ((v[0], v[1]), 1)):
            e, o = cells.edge_of[(a, x, y)]
            d2[e][tri] += s * o
    rank1 = Matrix(d1).rank() if cells.n_edges else 0
    factors = [abs(int(x)) for x in invariant_factors(Matrix(d2), domain=ZZ)] if d2 and d2[0] else []
    nonzero = [x for x in factors if x != 0]
    rank2 = len(nonzero)
    return AbelianGroup(cells.n_edges - rank1 - rank2, tuple(x for x in nonzero if x > 1))


# built-in tables ------------------------------------------------------------------


def lens_triangulation(p: int, q: int) -> Triangulation:
    """Bipyramid with p tetrahedra (N, S, v_i, v_i+1), upper faces glued to lower faces rotated by q."""
    if not (1 <= q < p) or gcd(p, q) != 1:
        raise SkeletonError(f"lens parameters must satisfy 1 <= q < p with gcd 1, got {(p, q)}")
    pairs = []
    for i in range(p):
        pairs.append((i, 2, (i + 1) % p, 3, (0, 1, 3, 2)))
        pairs.append((i, 1, (i + q) % p, 0, (1, 0, 2, 3)))
    return Triangulation.from_pairs(p, pairs, f"L({p},{q})")


def sphere_triangulation() -> Triangulation:
    """Two tetrahedra glued along their boundaries by the identity."""
    return Triangulation.from_pairs(2, [(0, f, 1, f, (0, 1, 2, 3)) for f in range(4)], "S3")


BUILTIN_TRIANGULATIONS = ("s3", "rp3", "l3_1", "l4_1", "l5_2", "s1xs2")


def builtin_triangulation(name: str) -> Triangulation:
    if name not in BUILTIN_TRIANGULATIONS:
        raise KeyError(f"unknown triangulation {name!r}; choose from {', '.join(BUILTIN_TRIANGULATIONS)}")
    doc = json.loads(resources.files("xistate.data").joinpath(f"{name}.json").read_text())
    return Triangulation.from_json(doc)


def search_two_tet_triangulations():
    """All closed orientable two-tetrahedron gluings whose vertex links are spheres."""
    faces = [(a, f) for a in range(2) for f in range(4)]

    def matchings(rest):
        if not rest:
            yield []
            return
        x = rest[0]
        for k in range(1, len(rest)):
            for m in matchings(rest[1:k] + rest[k + 1:]):
                yield [(x, rest[k])] + m

    for m in matchings(faces):
        choices = []
        for (a, f), (b, g) in m:
            choices.append([p for p in permutations(range(4)) if p[f] == g])
        for perms in product(*choices):
            pairs = [(a, f, b, g, p) for ((a, f), (b, g)), p in zip(m, perms)]
            t = Triangulation.from_pairs(2, pairs, "search")
            if validate_triangulation(t).valid:
                yield t

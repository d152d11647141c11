"""Xi-graphs in the plane and the 2-sphere.

Half-edge ``2*k`` is the tail end of edge ``k`` and ``2*k + 1`` its head end.
Rotations list half-edges clockwise, which is the cyclic order induced by the
opposite of the counterclockwise orientation of the plane.  Corner ``(v, i)``
is the angle between ``rotation[v][i]`` and ``rotation[v][i + 1]``.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .category import PointedXiFusion
from .groups import StructuralError, Violation
from .monoidal import Mor, TwistedEngine, leaves, left_normal, pair
from .scalar import Scalar
from .xmod import CrossedModule

Corner = tuple[int, int]
Crossing = tuple[int, int]  # (edge, +1 | -1)


class XiGraphError(ValueError):
    pass


class GradeError(XiGraphError):
    pass


class RankZero(ArithmeticError):
    """A multiplicity space has rank zero; no canonical basis vector exists."""


# cyclic sets ---------------------------------------------------------------


@dataclass(frozen=True)
class CyclicXiSet:
    """Elements 0..n-1 in cyclic order with labels alpha, beta, eps and optional colors."""

    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    eps: tuple[int, ...]
    colors: Optional[tuple[int, ...]] = None

    def __len__(self) -> int:
        return len(self.alpha)

    def word(self, cm: CrossedModule, start: int) -> int:
        H = cm.H
        n = len(self)
        acc = H.identity
        for k in range(n):
            s = (start + k) % n
            acc = H.mul(acc, self.alpha[s] if self.eps[s] > 0 else H.inv(self.alpha[s]))
        return acc

    def violations(self, cm: CrossedModule, category: Optional[PointedXiFusion] = None) -> list[Violation]:
        out = []
        n = len(self)
        for s in range(n):
            if cm.d(self.beta[s]) != self.word(cm, s):
                out.append(Violation("xi-cyclic-1", (s,), f"boundary of beta({s}) differs from the word starting at {s}"))
            x = self.alpha[s] if self.eps[s] < 0 else cm.H.inv(self.alpha[s])
            if self.beta[(s + 1) % n] != cm.act(x, self.beta[s]):
                out.append(Violation("xi-cyclic-2", (s,), f"beta(suc({s})) is not the twisted beta({s})"))
        if self.colors is not None and category is not None:
            for s in range(n):
                if category.degree[self.colors[s]] != self.alpha[s]:
                    out.append(Violation("color-degree", (s,), f"deg(color({s})) != alpha({s})"))
        return out

    def dual(self, cm: CrossedModule) -> CyclicXiSet:
        """Opposite cyclic order, negated signs, beta_op(s) = beta(suc s)^-1; element k of the dual is element n-1-k."""
        n = len(self)
        idx = [n - 1 - k for k in range(n)]
        return CyclicXiSet(
            tuple(self.alpha[t] for t in idx),
            tuple(cm.E.inv(self.beta[(t + 1) % n]) for t in idx),
            tuple(-self.eps[t] for t in idx),
            tuple(self.colors[t] for t in idx) if self.colors is not None else None,
        )


def cyclic_set_from_anchor(cm: CrossedModule, alpha: Sequence[int], eps: Sequence[int], e0: int, colors: Optional[Sequence[int]] = None) -> CyclicXiSet:
    """Extend beta from element 0 by the successor rule."""
    beta = [e0]
    for s in range(len(alpha) - 1):
        x = alpha[s] if eps[s] < 0 else cm.H.inv(alpha[s])
        beta.append(cm.act(x, beta[-1]))
    return CyclicXiSet(tuple(alpha), tuple(beta), tuple(eps), tuple(colors) if colors is not None else None)


# graphs -------------------------------------------------------------------


@dataclass(frozen=True)
class PlanarXiGraph:
    """Rotation-system embedded oriented graph with H-labels, anchors and optional colors.

    ``anchors[v] = (half_edge, e)`` fixes the E-label of one half-edge at ``v``.
    For planar graphs ``outer`` holds one corner in the unbounded face of each
    connected component (defaulting to corner 0 of its lowest vertex).
    """

    n_vertices: int
    edges: tuple[tuple[int, int, int], ...]
    rotation: tuple[tuple[int, ...], ...]
    anchors: tuple[tuple[int, int], ...]
    sphere: bool = False
    outer: Optional[tuple[Corner, ...]] = None
    colors: Optional[tuple[int, ...]] = None

    def __post_init__(self) -> None:
        if len(self.rotation) != self.n_vertices or len(self.anchors) != self.n_vertices:
            raise StructuralError("one rotation and one anchor per vertex required")
        seen: list[int] = []
        for v, rot in enumerate(self.rotation):
            if not rot:
                raise StructuralError(f"vertex {v} has no incident half-edge")
            for h in rot:
                if not 0 <= h < 2 * len(self.edges) or self.vertex_of(h) != v:
                    raise StructuralError(f"half-edge {h} listed at vertex {v} does not end there")
            seen.extend(rot)
        if sorted(seen) != list(range(2 * len(self.edges))):
            raise StructuralError("rotations must list every half-edge exactly once")
        for v, (h, _) in enumerate(self.anchors):
            if h not in self.rotation[v]:
                raise StructuralError(f"anchor half-edge {h} is not incident to vertex {v}")
        if self.colors is not None and len(self.colors) != len(self.edges):
            raise StructuralError("one color per edge required")

    # local structure ------------------------------------------------------
    def vertex_of(self, h: int) -> int:
        tail, head, _ = self.edges[h // 2]
        return head if h % 2 else tail

    @staticmethod
    def eps(h: int) -> int:
        """+1 when the edge points toward the vertex of ``h``."""
        return 1 if h % 2 else -1

    def alpha(self, h: int) -> int:
        return self.edges[h // 2][2]

    @cached_property
    def position(self) -> dict[int, Corner]:
        return {h: (v, i) for v, rot in enumerate(self.rotation) for i, h in enumerate(rot)}

    def cyclic_set(self, cm: CrossedModule, v: int, start: Optional[int] = None) -> CyclicXiSet:
        """The cyclic set G_v read from ``start`` (default: the anchor)."""
        rot = self.rotation[v]
        h0, e0 = self.anchors[v]
        k = rot.index(h0)
        order = [rot[(k + j) % len(rot)] for j in range(len(rot))]
        colors = [self.colors[h // 2] for h in order] if self.colors is not None else None
        s = cyclic_set_from_anchor(cm, [self.alpha(h) for h in order], [self.eps(h) for h in order], e0, colors)
        if start is None or start == h0:
            return s
        j = order.index(start)
        n = len(order)
        idx = [(j + t) % n for t in range(n)]
        return CyclicXiSet(
            tuple(s.alpha[t] for t in idx),
            tuple(s.beta[t] for t in idx),
            tuple(s.eps[t] for t in idx),
            tuple(s.colors[t] for t in idx) if s.colors is not None else None,
        )

    # faces ----------------------------------------------------------------
    def next_corner(self, c: Corner) -> Corner:
        v, i = c
        rot = self.rotation[v]
        h = rot[(i + 1) % len(rot)]
        return self.position[h ^ 1]

    @cached_property
    def faces(self) -> tuple[tuple[Corner, ...], ...]:
        out: list[tuple[Corner, ...]] = []
        done: set[Corner] = set()
        for v, rot in enumerate(self.rotation):
            for i in range(len(rot)):
                if (v, i) in done:
                    continue
                walk = [(v, i)]
                done.add((v, i))
                c = self.next_corner((v, i))
                while c != (v, i):
                    walk.append(c)
                    done.add(c)
                    c = self.next_corner(c)
                out.append(tuple(walk))
        return tuple(out)

    @cached_property
    def face_of(self) -> dict[Corner, int]:
        return {c: f for f, walk in enumerate(self.faces) for c in walk}

    def sides(self, edge: int) -> tuple[int, int]:
        """(left face, right face) of an edge with respect to its orientation."""
        v, k = self.position[2 * edge]
        n = len(self.rotation[v])
        return self.face_of[(v, (k - 1) % n)], self.face_of[(v, k)]

    @cached_property
    def components(self) -> tuple[tuple[int, ...], ...]:
        adj: dict[int, set[int]] = {v: set() for v in range(self.n_vertices)}
        for t, h, _ in self.edges:
            adj[t].add(h)
            adj[h].add(t)
        out, seen = [], set()
        for v in range(self.n_vertices):
            if v in seen:
                continue
            comp, queue = [], [v]
            seen.add(v)
            while queue:
                u = queue.pop()
                comp.append(u)
                for w in adj[u]:
                    if w not in seen:
                        seen.add(w)
                        queue.append(w)
            out.append(tuple(sorted(comp)))
        return tuple(out)

    def embedding_violations(self) -> list[Violation]:
        """Euler check: V - E + F = 2 for each connected component."""
        out = []
        for comp in self.components:
            cs = set(comp)
            n_e = sum(1 for t, _, _ in self.edges if t in cs)
            n_f = sum(1 for walk in self.faces if walk[0][0] in cs)
            if len(comp) - n_e + n_f != 2:
                out.append(Violation("euler", comp, f"V - E + F = {len(comp) - n_e + n_f} on component {comp}"))
        return out

    @cached_property
    def outer_corners(self) -> tuple[Corner, ...]:
        if self.outer is not None:
            return self.outer
        return tuple((comp[0], 0) for comp in self.components)

    # serialization --------------------------------------------------------
    def to_json(self) -> dict:
        doc: dict = {
            "vertices": self.n_vertices,
            "edges": [{"from": t, "to": h, "h_label": x} for t, h, x in self.edges],
            "rotations": [list(r) for r in self.rotation],
            "anchors": [{"vertex": v, "half_edge": h, "e_label": e} for v, (h, e) in enumerate(self.anchors)],
            "sphere": self.sphere,
        }
        if self.outer is not None:
            doc["outer"] = [list(c) for c in self.outer]
        if self.colors is not None:
            doc["colors"] = list(self.colors)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> PlanarXiGraph:
        anchors = sorted(doc["anchors"], key=lambda a: a["vertex"])
        return cls(
            doc["vertices"],
            tuple((e["from"], e["to"], e["h_label"]) for e in doc["edges"]),
            tuple(tuple(r) for r in doc["rotations"]),
            tuple((a["half_edge"], a["e_label"]) for a in anchors),
            doc.get("sphere", False),
            tuple(tuple(c) for c in doc["outer"]) if "outer" in doc else None,
            tuple(doc["colors"]) if "colors" in doc else None,
        )

    def with_colors(self, colors: Sequence[int]) -> PlanarXiGraph:
        return replace(self, colors=tuple(colors))


def derive_labels(g: PlanarXiGraph, cm: CrossedModule) -> dict[int, int]:
    """E-label of every half-edge from the anchors; checks both cyclic-set axioms."""
    out: dict[int, int] = {}
    for v, rot in enumerate(g.rotation):
        h0, _ = g.anchors[v]
        k = rot.index(h0)
        s = g.cyclic_set(cm, v)
        bad = s.violations(cm)
        if bad:
            raise XiGraphError(f"vertex {v}: {bad[0].message}")
        for j, b in enumerate(s.beta):
            out[rot[(k + j) % len(rot)]] = b
    return out


def xi_graph_violations(g: PlanarXiGraph, cm: CrossedModule) -> list[Violation]:
    out = g.embedding_violations()
    for v in range(g.n_vertices):
        out.extend(Violation(b.axiom, (v,) + b.witness, f"vertex {v}: {b.message}") for b in g.cyclic_set(cm, v).violations(cm))
    for k, (_, _, x) in enumerate(g.edges):
        if not 0 <= x < cm.H.order:
            out.append(Violation("h-label", (k,), f"edge {k} label out of range"))
    return out


# arc systems and grade ----------------------------------------------------


@dataclass(frozen=True)
class ArcSystem:
    """Arcs from a basepoint in the outer face to one corner per vertex.

    ``order`` lists vertices in the order their arcs are met by a small loop
    negatively encircling the basepoint; ``words[v]`` is the sequence of edge
    crossings of the arc to ``v`` and ``corners[v]`` the corner where it ends.
    ``start`` is an outer corner fixing the face of the basepoint.
    """

    start: Corner
    order: tuple[int, ...]
    words: dict[int, tuple[Crossing, ...]] = field(hash=False)
    corners: dict[int, int] = field(hash=False)

    def to_json(self) -> dict:
        return {
            "start": list(self.start),
            "order": list(self.order),
            "arcs": [
                {"vertex": v, "crossings": [list(c) for c in self.words[v]], "corner": self.corners[v]} for v in self.order
            ],
        }


def arc_violations(g: PlanarXiGraph, arcs: ArcSystem) -> list[Violation]:
    """Face-walk consistency of every crossing word."""
    out = []
    start_face = g.face_of[arcs.start]
    for v in arcs.order:
        face = start_face
        for k, (edge, sign) in enumerate(arcs.words[v]):
            left, right = g.sides(edge)
            src, dst = (right, left) if sign > 0 else (left, right)
            if face != src:
                out.append(Violation("arc-walk", (v, k), f"arc to {v} crosses edge {edge} from the wrong face"))
                break
            face = dst
        else:
            if face != g.face_of[(v, arcs.corners[v])]:
                out.append(Violation("arc-end", (v,), f"arc to {v} does not end in the face of its corner"))
    return out


def _arc_h(g: PlanarXiGraph, cm: CrossedModule, word: Iterable[Crossing]) -> int:
    H = cm.H
    acc = H.identity
    for edge, sign in word:
        x = g.edges[edge][2]
        acc = H.mul(acc, x if sign > 0 else H.inv(x))
    return acc


def _corner_label(g: PlanarXiGraph, labels: dict[int, int], v: int, i: int) -> int:
    rot = g.rotation[v]
    return labels[rot[(i + 1) % len(rot)]]


def grade(g: PlanarXiGraph, cm: CrossedModule, arcs: ArcSystem | Sequence[ArcSystem], check: bool = True) -> int:
    """|G| as the ordered product of h_v-conjugated corner labels; one arc system per component."""
    systems = [arcs] if isinstance(arcs, ArcSystem) else list(arcs)
    labels = derive_labels(g, cm)
    E = cm.E
    total = E.identity
    covered: list[int] = []
    for a in systems:
        if check:
            bad = arc_violations(g, a)
            if bad:
                raise GradeError(bad[0].message)
        covered.extend(a.order)
        for v in a.order:
            total = E.mul(total, cm.act(_arc_h(g, cm, a.words[v]), _corner_label(g, labels, v, a.corners[v])))
    if sorted(covered) != list(range(g.n_vertices)):
        raise GradeError("arc systems must reach every vertex exactly once")
    if cm.d(total) != cm.H.identity:
        raise GradeError("grade is not in the kernel of the boundary")
    return total


def generate_arc_system(
    g: PlanarXiGraph, component: int = 0, rng: Optional[random.Random] = None, start: Optional[Corner] = None
) -> ArcSystem:
    """Arcs routed along a spanning tree of the dual graph rooted at the outer face.

    Inside each face the arcs fan out in the order of the face walk; the order
    around the basepoint is the reverse of the resulting tour.  With ``rng``
    the dual tree, the target corners and the basepoint position are random.
    """
    comp = g.components[component]
    cs = set(comp)
    start = start if start is not None else g.outer_corners[component]
    root = g.face_of[start]
    comp_faces = [f for f, walk in enumerate(g.faces) if walk[0][0] in cs]
    # dual adjacency through edges with distinct sides
    nbrs: dict[int, list[tuple[int, int]]] = {f: [] for f in comp_faces}
    for k, (t, _, _) in enumerate(g.edges):
        if t not in cs:
            continue
        left, right = g.sides(k)
        if left != right:
            nbrs[left].append((k, right))
            nbrs[right].append((k, left))
    parent_edge: dict[int, int] = {}
    seen = {root}
    frontier = [root]
    while frontier:
        f = frontier.pop(rng.randrange(len(frontier))) if rng else frontier.pop(0)
        opts = list(nbrs[f])
        if rng:
            rng.shuffle(opts)
        for k, f2 in opts:
            if f2 not in seen:
                seen.add(f2)
                parent_edge[f2] = k
                frontier.append(f2)
    tree_edges = set(parent_edge.values())
    corners: dict[int, int] = {}
    for v in comp:
        n = len(g.rotation[v])
        corners[v] = rng.randrange(n) if rng else 0
    chosen = {(v, i): v for v, i in corners.items()}

    def crossing(k: int, from_face: int) -> Crossing:
        left, right = g.sides(k)
        return (k, 1 if from_face == right else -1)

    tour: list[tuple[int, tuple[Crossing, ...]]] = []

    def walk_face(f: int, entry_corner_index: int, prefix: tuple[Crossing, ...]) -> None:
        walk = g.faces[f]
        n = len(walk)
        for j in range(n):
            c = walk[(entry_corner_index + j) % n]
            if c in chosen:
                tour.append((chosen[c], prefix))
            # the edge leaving corner c along the face walk
            v, i = c
            h = g.rotation[v][(i + 1) % len(g.rotation[v])]
            k = h // 2
            if k in tree_edges:
                left, right = g.sides(k)
                other = left if right == f else right
                if left != right and parent_edge.get(other) == k and other != f:
                    # enter the child face right after crossing k; its walk resumes at the corner following k
                    walk_face(other, _child_entry(g, h, other), prefix + (crossing(k, f),))

    start_index = g.faces[root].index(start)
    if rng:
        start_index = rng.randrange(len(g.faces[root]))
    walk_face(root, start_index, ())
    order = tuple(v for v, _ in reversed(tour))
    words = {v: w for v, w in tour}
    return ArcSystem(g.faces[root][start_index], order, words, corners)


def _child_entry(g: PlanarXiGraph, h: int, child: int) -> int:
    """Index in the child face walk of the corner that follows the edge of ``h`` on that side."""
    walk = g.faces[child]
    # the child face traverses the edge in the opposite direction, leaving along h's mate
    m = h ^ 1
    for idx, (v, i) in enumerate(walk):
        rot = g.rotation[v]
        if rot[(i + 1) % len(rot)] == m:
            return (idx + 1) % len(walk)
    raise XiGraphError("dual tree edge not found on the child face")


def canonical_arc_systems(g: PlanarXiGraph) -> list[ArcSystem]:
    return [generate_arc_system(g, k) for k in range(len(g.components))]


def grade_canonical(g: PlanarXiGraph, cm: CrossedModule) -> int:
    return grade(g, cm, canonical_arc_systems(g))


def random_arc_systems(g: PlanarXiGraph, rng: random.Random, moves: int = 3) -> list[ArcSystem]:
    out = []
    for k in range(len(g.components)):
        a = generate_arc_system(g, k, rng)
        for _ in range(moves):
            if rng.random() < 0.5:
                v = rng.choice(a.order)
                a = move_local(g, a, v, rng.choice((1, -1)))
            elif len(a.order) > 1:
                a = move_exchange(g, a, rng.randrange(len(a.order) - 1))
        out.append(a)
    return out


def move_local(g: PlanarXiGraph, arcs: ArcSystem, v: int, direction: int) -> ArcSystem:
    """Extend the arc to ``v`` across one adjacent half-edge (counterclockwise for -1)."""
    rot = g.rotation[v]
    n = len(rot)
    i = arcs.corners[v]
    if direction < 0:
        h = rot[i]
        step, new = (h // 2, -g.eps(h)), (i - 1) % n
    else:
        h = rot[(i + 1) % n]
        step, new = (h // 2, g.eps(h)), (i + 1) % n
    words = dict(arcs.words)
    words[v] = arcs.words[v] + (step,)
    corners = dict(arcs.corners)
    corners[v] = new
    return ArcSystem(arcs.start, arcs.order, words, corners)


def _loop_word(g: PlanarXiGraph, v: int, corner: int) -> tuple[Crossing, ...]:
    """Crossings of a small clockwise loop around ``v`` starting and ending at ``corner``."""
    rot = g.rotation[v]
    n = len(rot)
    return tuple((rot[(corner + 1 + j) % n] // 2, g.eps(rot[(corner + 1 + j) % n])) for j in range(n))


def _inverse_word(word: Sequence[Crossing]) -> tuple[Crossing, ...]:
    return tuple((k, -s) for k, s in reversed(word))


def move_exchange(g: PlanarXiGraph, arcs: ArcSystem, i: int) -> ArcSystem:
    """Replace (gamma_i, gamma_i+1) by (gamma_i l_i gamma_i^-1 gamma_i+1, gamma_i)."""
    vi, vj = arcs.order[i], arcs.order[i + 1]
    wi, wj = arcs.words[vi], arcs.words[vj]
    words = dict(arcs.words)
    words[vj] = wi + _loop_word(g, vi, arcs.corners[vi]) + _inverse_word(wi) + wj
    words[vi] = wi
    order = list(arcs.order)
    order[i], order[i + 1] = vj, vi
    return ArcSystem(arcs.start, tuple(order), words, dict(arcs.corners))


def push_off(g: PlanarXiGraph, face: int) -> PlanarXiGraph:
    """The planar graph obtained by removing a point of ``face`` from the sphere."""
    outer = []
    for comp in g.components:
        corner = next((c for c in g.faces[face] if c[0] in comp), None)
        outer.append(corner if corner is not None else (comp[0], 0))
    return replace(g, sphere=False, outer=tuple(outer))


def is_one_spherical(g: PlanarXiGraph, cm: CrossedModule, face: int = 0) -> bool:
    """Whether a planar push-off has trivial grade."""
    if not g.n_vertices:
        return True
    return grade_canonical(push_off(g, face), cm) == cm.E.identity


# colored evaluation -------------------------------------------------------


@dataclass
class _Blob:
    mor: Mor
    letters: list[int]


class _Sweep:
    """Evaluation of one connected component by spanning-tree contraction."""

    def __init__(self, g: PlanarXiGraph, c: PointedXiFusion, base_labels: dict[int, int], variant: int) -> None:
        self.g, self.c, self.variant = g, c, variant
        self.eng: TwistedEngine = c.engine
        self.H = c.base.H
        self.labels = base_labels

    # objects
    def obj(self, h: int) -> int:
        x = self.c.reps[self.g.colors[h // 2]]
        return x if self.g.eps(h) > 0 else self.H.inv(x)

    def _x(self, h: int) -> int:
        return self.c.reps[self.g.colors[h // 2]]

    def left_cup(self, h: int) -> Mor:
        return self.eng.rcoev(self._x(h)) if self.g.eps(h) > 0 else self.eng.lcoev(self._x(h))

    def left_cap(self, h: int) -> Mor:
        return self.eng.lev(self._x(h)) if self.g.eps(h) > 0 else self.eng.rev(self._x(h))

    def right_cup(self, h: int) -> Mor:
        return self.eng.lcoev(self._x(h)) if self.g.eps(h) > 0 else self.eng.rcoev(self._x(h))

    def right_cap(self, h: int) -> Mor:
        return self.eng.rev(self._x(h)) if self.g.eps(h) > 0 else self.eng.lev(self._x(h))

    # blob moves
    def first_to_last(self, b: _Blob) -> _Blob:
        eng = self.eng
        y = b.letters[0]
        yo, ys = self.obj(y), self.H.inv(self.obj(y))
        f = eng.compose(eng.tensor(eng.identity(ys), eng.tensor(b.mor, eng.identity(yo))), self.left_cup(y))
        rest = list(leaves(b.mor.tgt)[1:]) + [yo]
        target = pair((ys, leaves(b.mor.tgt)[0]), left_normal(rest))
        f = eng.compose(eng.rebracket(f.tgt, target), f)
        f = eng.compose(eng.tensor(self.left_cap(y), eng.identity(left_normal(rest))), f)
        return _Blob(f, b.letters[1:] + [y])

    def last_to_first(self, b: _Blob) -> _Blob:
        eng = self.eng
        y = b.letters[-1]
        yo, ys = self.obj(y), self.H.inv(self.obj(y))
        f = eng.compose(eng.tensor(eng.tensor(eng.identity(yo), b.mor), eng.identity(ys)), self.right_cup(y))
        front = [yo] + list(leaves(b.mor.tgt)[:-1])
        target = pair(left_normal(front), (leaves(b.mor.tgt)[-1], ys))
        f = eng.compose(eng.rebracket(f.tgt, target), f)
        f = eng.compose(eng.tensor(eng.identity(left_normal(front)), self.right_cap(y)), f)
        return _Blob(f, [y] + b.letters[:-1])

    def rotate_to_end(self, b: _Blob, h: int) -> _Blob:
        n = len(b.letters)
        k = b.letters.index(h)
        if self.variant == 1:
            for _ in range((k + 1) % n):
                b = self.first_to_last(b)
        else:
            for _ in range(n - 1 - k):
                b = self.last_to_first(b)
        return b

    def rotate_to_front(self, b: _Blob, h: int) -> _Blob:
        n = len(b.letters)
        k = b.letters.index(h)
        if self.variant == 1:
            for _ in range(k):
                b = self.first_to_last(b)
        else:
            for _ in range((n - k) % n):
                b = self.last_to_first(b)
        return b

    def cap_at(self, b: _Blob, i: int) -> _Blob:
        eng = self.eng
        lv = leaves(b.mor.tgt)
        left, right = left_normal(lv[:i]), left_normal(lv[i + 2 :])
        target = pair(pair(left, (lv[i], lv[i + 1])), right)
        f = eng.compose(eng.rebracket(b.mor.tgt, target), b.mor)
        f = eng.compose(eng.tensor(eng.tensor(eng.identity(left), self.right_cap(b.letters[i])), eng.identity(right)), f)
        return _Blob(f, b.letters[:i] + b.letters[i + 2 :])

    def box(self, v: int) -> _Blob:
        g = self.g
        rot = g.rotation[v]
        h0, _ = g.anchors[v]
        k = rot.index(h0)
        order = [rot[(k + j) % len(rot)] for j in range(len(rot))]
        tgt = left_normal([self.obj(h) for h in order])
        return _Blob(self.eng.basis(None, tgt, self.labels[h0]), order)

    def run(self, comp: Sequence[int]) -> Mor:
        g = self.g
        adj: dict[int, list[tuple[int, int]]] = {v: [] for v in comp}
        for v in comp:
            for h in g.rotation[v]:
                w = g.vertex_of(h ^ 1)
                if w != v:
                    adj[v].append((h, w))
        root = comp[0] if self.variant == 1 else comp[-1]
        blob = self.box(root)
        merged = {root}
        if self.variant == 1:
            queue: deque[int] = deque([root])
            while queue:
                u = queue.popleft()
                for h, w in adj[u]:
                    if w not in merged:
                        merged.add(w)
                        blob = self.attach(blob, h, w)
                        queue.append(w)
        else:
            stack = [root]
            while stack:
                u = stack[-1]
                nxt = next(((h, w) for h, w in reversed(adj[u]) if w not in merged), None)
                if nxt is None:
                    stack.pop()
                    continue
                h, w = nxt
                merged.add(w)
                blob = self.attach(blob, h, w)
                stack.append(w)
        while blob.letters:
            n = len(blob.letters)
            idx = range(n - 1) if self.variant == 1 else range(n - 2, -1, -1)
            i = next((i for i in idx if blob.letters[i] ^ 1 == blob.letters[i + 1]), None)
            if i is None:
                raise XiGraphError("rotation system is not planar: no adjacent pair left to cap")
            blob = self.cap_at(blob, i)
        return blob.mor

    def attach(self, blob: _Blob, h: int, w: int) -> _Blob:
        blob = self.rotate_to_end(blob, h)
        box = self.rotate_to_front(self.box(w), h ^ 1)
        n = len(blob.letters)
        joined = _Blob(self.eng.tensor(blob.mor, box.mor), blob.letters + box.letters)
        return self.cap_at(joined, n - 1)


def _base_labels(g: PlanarXiGraph, c: PointedXiFusion) -> dict[int, int]:
    """Lift the graph to the base crossed module; RankZero if some vertex space vanishes."""
    base = c.base
    out: dict[int, int] = {}
    for v, rot in enumerate(g.rotation):
        h0, e0 = g.anchors[v]
        k = rot.index(h0)
        order = [rot[(k + j) % len(rot)] for j in range(len(rot))]
        xs = [c.reps[g.colors[h // 2]] for h in order]
        eps = [g.eps(h) for h in order]
        word = base.H.identity
        for x, s in zip(xs, eps):
            word = base.H.mul(word, x if s > 0 else base.H.inv(x))
        lift = c.lift(e0, word)
        if lift is None:
            raise RankZero(f"vertex {v} has a zero multiplicity space")
        s = cyclic_set_from_anchor(base, xs, eps, lift)
        for j, b in enumerate(s.beta):
            out[order[j]] = b
    return out


def evaluate_morphism(g: PlanarXiGraph, c: PointedXiFusion, sweep: int = 1) -> Mor:
    """The closed diagram as a base morphism 1 -> 1 (degree, exponent of zeta_N)."""
    if g.colors is None:
        raise XiGraphError("graph is not colored")
    for k, (_, _, x) in enumerate(g.edges):
        if c.degree[g.colors[k]] != x:
            raise XiGraphError(f"edge {k}: color degree differs from its H-label")
    labels = _base_labels(g, c)
    sw = _Sweep(g, c, labels, sweep)
    total = c.engine.identity(None)
    for comp in g.components:
        total = c.engine.compose(sw.run(comp), total)
    return total


def evaluate_colored(g: PlanarXiGraph, c: PointedXiFusion, sweep: int = 1) -> Scalar:
    """The End^1(1)-component of inv_C(G) on canonical basis vectors.

    Rank-zero vertices give 0.  A sphere graph must be 1-spherical; a planar
    graph of nontrivial grade has no End^1(1)-component and evaluates to 0.
    """
    N = c.engine.N
    if g.sphere and not is_one_spherical(g, c.cm):
        raise GradeError("sphere graph is not 1-spherical")
    try:
        m = evaluate_morphism(g, c, sweep)
    except RankZero:
        return Scalar.zero(N)
    if m.e != c.base.E.identity:
        return Scalar.zero(N)
    return c.engine.to_scalar(m.k)


def evaluate_untwisted_shortcut(g: PlanarXiGraph, c: PointedXiFusion) -> Optional[Scalar]:
    """Value for untwisted categories with unit dimensions: 1 unless a vertex space vanishes."""
    if c.engine.N != 1:
        return None
    try:
        _base_labels(g, c)
    except RankZero:
        return Scalar.zero()
    return Scalar.one()


# cyclic-set scalars -------------------------------------------------------


def _lift_cyclic(S: CyclicXiSet, c: PointedXiFusion, start: int) -> tuple[list[int], list[int], int]:
    n = len(S)
    order = [(start + j) % n for j in range(n)]
    xs = [c.reps[S.colors[s]] for s in order]
    H = c.base.H
    word = H.identity
    for s, x in zip(order, xs):
        word = H.mul(word, x if S.eps[s] > 0 else H.inv(x))
    lift = c.lift(S.beta[start], word)
    if lift is None:
        raise RankZero("zero multiplicity space")
    return order, xs, lift


def cyclic_rotate_scalar(S: CyclicXiSet, c: PointedXiFusion, frm: int, to: int) -> Scalar:
    """Scalar of p_{frm,to} on canonical basis vectors."""
    if S.colors is None:
        raise XiGraphError("cyclic set is not colored")
    n = len(S)
    order, xs, lift = _lift_cyclic(S, c, frm)
    _, _, lift_to = _lift_cyclic(S, c, to)
    # a one-vertex open diagram reuses the sweep's rotation moves
    eng = c.engine
    H = c.base.H
    objs = [x if S.eps[s] > 0 else H.inv(x) for s, x in zip(order, xs)]
    blob_mor = eng.basis(None, left_normal(objs), lift)
    letters = list(order)

    class _Local(_Sweep):
        def obj(self, h: int) -> int:
            x = c.reps[S.colors[h]]
            return x if S.eps[h] > 0 else H.inv(x)

        def _x(self, h: int) -> int:
            return c.reps[S.colors[h]]

    sw = _Local.__new__(_Local)
    sw.c, sw.eng, sw.H, sw.variant = c, eng, H, 1
    sw.g = _SignView(S)
    b = _Blob(blob_mor, letters)
    for _ in range((to - frm) % n):
        b = sw.first_to_last(b)
    if b.mor.e != lift_to:
        raise XiGraphError("rotation did not land on the canonical basis degree")
    return eng.to_scalar(b.mor.k)


class _SignView:
    """Adapter giving a cyclic set the ``eps`` interface of a graph."""

    def __init__(self, S: CyclicXiSet) -> None:
        self.S = S

    def eps(self, h: int) -> int:
        return self.S.eps[h]


def closure_graph(S: CyclicXiSet, cm: CrossedModule, s: int = 0) -> PlanarXiGraph:
    """Two-vertex graph pairing H_pred(s)(S^op) (vertex 0) with H_s(S) (vertex 1)."""
    n = len(S)
    order = [(s + j) % n for j in range(n)]
    edges = []
    for j, t in enumerate(order):
        # edge j joins a_j (vertex 0) and b_j (vertex 1); eps at b_j is S.eps[t]
        edges.append((0, 1, S.alpha[t]) if S.eps[t] > 0 else (1, 0, S.alpha[t]))
    def half(j: int, v: int) -> int:
        t, _, _ = edges[j]
        return 2 * j + (0 if t == v else 1)
    rot_a = tuple(half(j, 0) for j in reversed(range(n)))
    rot_b = tuple(half(j, 1) for j in range(n))
    return PlanarXiGraph(
        2,
        tuple(edges),
        (rot_a, rot_b),
        ((rot_a[0], cm.E.inv(S.beta[s])), (rot_b[0], S.beta[s])),
        sphere=True,
        colors=tuple(S.colors[t] for t in order) if S.colors is not None else None,
    )


def edge_pairing_scalar(S: CyclicXiSet, c: PointedXiFusion, s: int = 0, sweep: int = 1) -> Scalar:
    """Coefficient of the contraction vector on canonical basis vectors (inverse pairing value)."""
    g = closure_graph(S, c.cm, s)
    value = evaluate_colored(g, c, sweep)
    if value.is_zero():
        raise RankZero("pairing of a zero multiplicity space")
    return value.inverse()

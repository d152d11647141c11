"""Finite groups given by Cayley tables, homomorphisms and actions."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Iterable, Sequence


class StructuralError(ValueError):
    """Malformed input tables (wrong shapes, out-of-range indices)."""


@dataclass(frozen=True)
class Violation:
    """One failed axiom instance together with its witness tuple."""

    axiom: str
    witness: tuple
    message: str = ""

    def to_json(self) -> dict:
        return {"axiom": self.axiom, "witness": list(self.witness), "message": self.message}


@dataclass(frozen=True, eq=False)
class FiniteGroup:
    """Group on {0, ..., order-1} with multiplication cayley[a][b] = a*b."""

    cayley: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] | None = None
    identity: int = field(init=False)
    inverse: tuple[int, ...] = field(init=False)

    def __post_init__(self) -> None:
        n = len(self.cayley)
        if n == 0 or any(len(row) != n for row in self.cayley):
            raise StructuralError("cayley table must be a nonempty square table")
        if any(not (0 <= x < n) for row in self.cayley for x in row):
            raise StructuralError("cayley entries out of range")
        if self.names is not None and len(self.names) != n:
            raise StructuralError("names length must equal group order")
        ident = next((e for e in range(n) if all(self.cayley[e][a] == a == self.cayley[a][e] for a in range(n))), None)
        if ident is None:
            raise StructuralError("cayley table has no two-sided identity")
        inv = []
        for a in range(n):
            b = next((b for b in range(n) if self.cayley[a][b] == ident and self.cayley[b][a] == ident), None)
            if b is None:
                raise StructuralError(f"element {a} has no inverse")
            inv.append(b)
        object.__setattr__(self, "identity", ident)
        object.__setattr__(self, "inverse", tuple(inv))
        for a, b, c in product(range(n), repeat=3):
            if self.cayley[self.cayley[a][b]][c] != self.cayley[a][self.cayley[b][c]]:
                raise StructuralError(f"cayley table not associative at {(a, b, c)}")

    @property
    def order(self) -> int:
        return len(self.cayley)

    def __len__(self) -> int:
        return len(self.cayley)

    def elements(self) -> range:
        return range(len(self.cayley))

    def mul(self, a: int, b: int) -> int:
        return self.cayley[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def prod(self, items: Iterable[int]) -> int:
        acc = self.identity
        for x in items:
            acc = self.cayley[acc][x]
        return acc

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inverse[a], -k
        acc = self.identity
        for _ in range(k):
            acc = self.cayley[acc][a]
        return acc

    def conj(self, g: int, a: int) -> int:
        """g a g^-1."""
        return self.cayley[self.cayley[g][a]][self.inverse[g]]

    def is_abelian(self) -> bool:
        return all(self.cayley[a][b] == self.cayley[b][a] for a in self.elements() for b in self.elements())

    def name(self, a: int) -> str:
        return self.names[a] if self.names else str(a)

    def subgroup_closure(self, gens: Iterable[int]) -> frozenset[int]:
        elems = {self.identity}
        frontier = list(gens)
        while frontier:
            g = frontier.pop()
            if g in elems:
                continue
            elems.add(g)
            frontier.extend(self.cayley[g][h] for h in list(elems))
            frontier.extend(self.cayley[h][g] for h in list(elems))
        return frozenset(elems)

    def to_json(self) -> dict:
        doc: dict = {"order": self.order, "cayley": [list(r) for r in self.cayley]}
        if self.names:
            doc["names"] = list(self.names)
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> FiniteGroup:
        try:
            table = tuple(tuple(int(x) for x in row) for row in doc["cayley"])
        except (KeyError, TypeError, ValueError) as exc:
            raise StructuralError(f"bad group document: {exc}") from exc
        if "order" in doc and int(doc["order"]) != len(table):
            raise StructuralError("declared order disagrees with cayley table")
        names = tuple(doc["names"]) if doc.get("names") else None
        return cls(table, names)

    def __repr__(self) -> str:
        return f"FiniteGroup(order={self.order})"


# constructors ------------------------------------------------------------


def trivial_group() -> FiniteGroup:
    return FiniteGroup(((0,),), ("1",))


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup(tuple(tuple((a + b) % n for b in range(n)) for a in range(n)), tuple(str(a) for a in range(n)))


def direct_product(g: FiniteGroup, k: FiniteGroup) -> FiniteGroup:
    """Elements (a, b) encoded as a * |k| + b."""
    m = k.order
    table = tuple(
        tuple(g.mul(a // m, b // m) * m + k.mul(a % m, b % m) for b in range(g.order * m)) for a in range(g.order * m)
    )
    names = tuple(f"({g.name(a // m)},{k.name(a % m)})" for a in range(g.order * m))
    return FiniteGroup(table, names)


def permutation_group(perms: Sequence[Sequence[int]]) -> FiniteGroup:
    """Group of the listed permutations (must be closed); product is composition p*q = p o q."""
    index = {tuple(p): i for i, p in enumerate(perms)}
    table = tuple(tuple(index[tuple(p[q[x]] for x in range(len(q)))] for q in perms) for p in perms)
    return FiniteGroup(table, tuple("".join(map(str, p)) for p in perms))


def symmetric_group(n: int) -> FiniteGroup:
    return permutation_group(sorted(permutations(range(n))))


# homomorphisms and actions -----------------------------------------------


@dataclass(frozen=True, eq=False)
class GroupHom:
    source: FiniteGroup
    target: FiniteGroup
    image: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.image) != self.source.order:
            raise StructuralError("homomorphism table length must equal source order")
        if any(not (0 <= x < self.target.order) for x in self.image):
            raise StructuralError("homomorphism image out of range")

    def __call__(self, a: int) -> int:
        return self.image[a]

    def violations(self, label: str = "hom") -> list[Violation]:
        s, t = self.source, self.target
        out = []
        if self.image[s.identity] != t.identity:
            out.append(Violation(f"{label}:identity", (s.identity,), "identity not preserved"))
        for a in s.elements():
            for b in s.elements():
                if self.image[s.mul(a, b)] != t.mul(self.image[a], self.image[b]):
                    out.append(Violation(f"{label}:multiplicative", (a, b), "image(ab) != image(a)image(b)"))
                    return out
        return out

    def kernel(self) -> frozenset[int]:
        return frozenset(a for a in self.source.elements() if self.image[a] == self.target.identity)

    def image_set(self) -> frozenset[int]:
        return frozenset(self.image)

    def is_surjective(self) -> bool:
        return len(set(self.image)) == self.target.order

    def is_injective(self) -> bool:
        return len(set(self.image)) == self.source.order

    def compose(self, first: GroupHom) -> GroupHom:
        """self o first."""
        return GroupHom(first.source, self.target, tuple(self.image[first.image[a]] for a in first.source.elements()))

    @classmethod
    def identity_of(cls, g: FiniteGroup) -> GroupHom:
        return cls(g, g, tuple(g.elements()))

    @classmethod
    def trivial(cls, source: FiniteGroup, target: FiniteGroup) -> GroupHom:
        return cls(source, target, (target.identity,) * source.order)


@dataclass(frozen=True, eq=False)
class GroupAction:
    """Left action of actor on space by automorphisms: table[x][e] = x.e."""

    actor: FiniteGroup
    space: FiniteGroup
    table: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.table) != self.actor.order or any(len(r) != self.space.order for r in self.table):
            raise StructuralError("action table must be actor-order x space-order")
        if any(not (0 <= x < self.space.order) for r in self.table for x in r):
            raise StructuralError("action table entries out of range")

    def __call__(self, x: int, e: int) -> int:
        return self.table[x][e]

    def violations(self) -> list[Violation]:
        h, e = self.actor, self.space
        out = []
        for x in h.elements():
            row = self.table[x]
            if len(set(row)) != e.order:
                out.append(Violation("action:automorphism", (x,), "action of x is not bijective"))
                continue
            bad = next(((a, b) for a in e.elements() for b in e.elements() if row[e.mul(a, b)] != e.mul(row[a], row[b])), None)
            if bad is not None:
                out.append(Violation("action:automorphism", (x, *bad), "action of x is not multiplicative"))
        if any(self.table[h.identity][a] != a for a in e.elements()):
            out.append(Violation("action:unit", (h.identity,), "identity does not act trivially"))
        for x, y in product(h.elements(), repeat=2):
            xy = h.mul(x, y)
            a = next((a for a in e.elements() if self.table[x][self.table[y][a]] != self.table[xy][a]), None)
            if a is not None:
                out.append(Violation("action:left", (x, y, a), "x.(y.e) != (xy).e"))
                break
        return out

    @classmethod
    def trivial(cls, actor: FiniteGroup, space: FiniteGroup) -> GroupAction:
        return cls(actor, space, tuple(tuple(space.elements()) for _ in actor.elements()))

    @classmethod
    def conjugation(cls, group: FiniteGroup, subgroup_elems: Sequence[int], sub: FiniteGroup) -> GroupAction:
        """Conjugation of group on a normal subgroup, sub indexed by position in subgroup_elems."""
        pos = {g: i for i, g in enumerate(subgroup_elems)}
        return cls(group, sub, tuple(tuple(pos[group.conj(x, s)] for s in subgroup_elems) for x in group.elements()))


def subgroup_as_group(g: FiniteGroup, elems: Sequence[int]) -> FiniteGroup:
    """The subgroup on the listed elements, re-indexed by list position."""
    pos = {a: i for i, a in enumerate(elems)}
    if g.identity != elems[0]:
        raise StructuralError("identity must be listed first")
    return FiniteGroup(tuple(tuple(pos[g.mul(a, b)] for b in elems) for a in elems), tuple(g.name(a) for a in elems))

"""Crossed modules, their morphisms, subquotients and semidirect products."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .groups import (
    FiniteGroup,
    GroupAction,
    GroupHom,
    StructuralError,
    Violation,
    cyclic_group,
    direct_product,
    subgroup_as_group,
    symmetric_group,
    trivial_group,
)


@dataclass(frozen=True, eq=False)
class CrossedModule:
    """A homomorphism boundary: E -> H with a left H-action on E."""

    E: FiniteGroup
    H: FiniteGroup
    boundary: GroupHom
    action: GroupAction

    def __post_init__(self) -> None:
        if self.boundary.source is not self.E or self.boundary.target is not self.H:
            raise StructuralError("boundary must map E to H")
        if self.action.actor is not self.H or self.action.space is not self.E:
            raise StructuralError("action must be an H-action on E")

    def d(self, e: int) -> int:
        return self.boundary.image[e]

    def act(self, x: int, e: int) -> int:
        return self.action.table[x][e]

    @cached_property
    def kernel(self) -> tuple[int, ...]:
        return tuple(sorted(self.boundary.kernel()))

    @cached_property
    def image(self) -> tuple[int, ...]:
        return tuple(sorted(self.boundary.image_set()))

    @cached_property
    def fibers(self) -> dict[int, tuple[int, ...]]:
        """h -> boundary^-1(h) in index order."""
        out: dict[int, list[int]] = {h: [] for h in self.H.elements()}
        for e in self.E.elements():
            out[self.d(e)].append(e)
        return {h: tuple(v) for h, v in out.items()}

    def to_json(self) -> dict:
        return {
            "E": self.E.to_json(),
            "H": self.H.to_json(),
            "boundary": list(self.boundary.image),
            "action": [list(r) for r in self.action.table],
        }

    @classmethod
    def from_json(cls, doc: dict) -> CrossedModule:
        try:
            e = FiniteGroup.from_json(doc["E"])
            h = FiniteGroup.from_json(doc["H"])
            bnd = GroupHom(e, h, tuple(int(x) for x in doc["boundary"]))
            act = GroupAction(h, e, tuple(tuple(int(x) for x in r) for r in doc["action"]))
        except KeyError as exc:
            raise StructuralError(f"crossed module document missing field {exc}") from exc
        except (TypeError, ValueError) as exc:
            if isinstance(exc, StructuralError):
                raise
            raise StructuralError(f"bad crossed module document: {exc}") from exc
        return cls(e, h, bnd, act)

    def __repr__(self) -> str:
        return f"CrossedModule(|E|={self.E.order}, |H|={self.H.order})"


def validate_crossed_module(cm: CrossedModule) -> list[Violation]:
    """All violated axioms; empty iff cm is a crossed module."""
    out = cm.boundary.violations("boundary") + cm.action.violations()
    E, H = cm.E, cm.H
    for x, e in product(H.elements(), E.elements()):
        if cm.d(cm.act(x, e)) != H.conj(x, cm.d(e)):
            out.append(Violation("equivariance", (x, e), "d(x.e) != x d(e) x^-1"))
            break
    for e, f in product(E.elements(), E.elements()):
        if cm.act(cm.d(e), f) != E.conj(e, f):
            out.append(Violation("peiffer", (e, f), "d(e).f != e f e^-1"))
            break
    return out


@dataclass(frozen=True)
class Subquotients:
    kernel: FiniteGroup
    kernel_elements: tuple[int, ...]
    kernel_central: bool
    image: FiniteGroup
    image_elements: tuple[int, ...]
    cokernel: FiniteGroup
    projection: GroupHom
    cosets: tuple[tuple[int, ...], ...]


def subquotients(cm: CrossedModule) -> Subquotients:
    E, H = cm.E, cm.H
    ker = (E.identity,) + tuple(k for k in cm.kernel if k != E.identity)
    central = all(E.mul(k, e) == E.mul(e, k) for k in ker for e in E.elements())
    img = (H.identity,) + tuple(h for h in cm.image if h != H.identity)
    img_set = set(img)
    cosets: list[tuple[int, ...]] = []
    coset_of: dict[int, int] = {}
    for h in H.elements():
        if h in coset_of:
            continue
        c = tuple(sorted(H.mul(h, i) for i in img_set))
        for x in c:
            coset_of[x] = len(cosets)
        cosets.append(c)
    table = tuple(tuple(coset_of[H.mul(a[0], b[0])] for b in cosets) for a in cosets)
    coker = FiniteGroup(table)
    proj = GroupHom(H, coker, tuple(coset_of[h] for h in H.elements()))
    return Subquotients(
        subgroup_as_group(E, ker), ker, central, subgroup_as_group(H, img), img, coker, proj, tuple(cosets)
    )


@dataclass(frozen=True, eq=False)
class Semidirect:
    """H x| E with (x,e)(y,f) = (xy, e x.f), encoded as x*|E| + e."""

    group: FiniteGroup
    inject_H: GroupHom
    inject_E: GroupHom
    phi: GroupHom

    def pair(self, x: int, e: int) -> int:
        return x * self.inject_E.source.order + e

    def unpair(self, g: int) -> tuple[int, int]:
        return divmod(g, self.inject_E.source.order)


def semidirect_product(cm: CrossedModule) -> Semidirect:
    E, H = cm.E, cm.H
    m = E.order

    def mul(a: int, b: int) -> int:
        x, e = divmod(a, m)
        y, f = divmod(b, m)
        return H.mul(x, y) * m + E.mul(e, cm.act(x, f))

    n = H.order * m
    group = FiniteGroup(
        tuple(tuple(mul(a, b) for b in range(n)) for a in range(n)),
        tuple(f"({H.name(a // m)},{E.name(a % m)})" for a in range(n)),
    )
    inj_h = GroupHom(H, group, tuple(x * m + E.identity for x in H.elements()))
    inj_e = GroupHom(E, group, tuple(H.identity * m + e for e in E.elements()))
    phi = GroupHom(group, H, tuple(H.mul(cm.d(a % m), a // m) for a in range(n)))
    return Semidirect(group, inj_h, inj_e, phi)


@dataclass(frozen=True, eq=False)
class XModMorphism:
    source: CrossedModule
    target: CrossedModule
    psi: GroupHom
    phi: GroupHom

    def __post_init__(self) -> None:
        if self.psi.source is not self.source.E or self.psi.target is not self.target.E:
            raise StructuralError("psi must map E to E'")
        if self.phi.source is not self.source.H or self.phi.target is not self.target.H:
            raise StructuralError("phi must map H to H'")

    @classmethod
    def identity(cls, cm: CrossedModule) -> XModMorphism:
        return cls(cm, cm, GroupHom.identity_of(cm.E), GroupHom.identity_of(cm.H))

    def to_json(self) -> dict:
        return {
            "source": self.source.to_json(),
            "target": self.target.to_json(),
            "psi": list(self.psi.image),
            "phi": list(self.phi.image),
        }

    @classmethod
    def from_json(cls, doc: dict) -> XModMorphism:
        src = CrossedModule.from_json(doc["source"])
        tgt = CrossedModule.from_json(doc["target"])
        return cls(src, tgt, GroupHom(src.E, tgt.E, tuple(doc["psi"])), GroupHom(src.H, tgt.H, tuple(doc["phi"])))


def validate_morphism(m: XModMorphism) -> list[Violation]:
    out = m.psi.violations("psi") + m.phi.violations("phi")
    s, t = m.source, m.target
    for e in s.E.elements():
        if t.d(m.psi(e)) != m.phi(s.d(e)):
            out.append(Violation("square", (e,), "d'(psi(e)) != phi(d(e))"))
            break
    for x, e in product(s.H.elements(), s.E.elements()):
        if m.psi(s.act(x, e)) != t.act(m.phi(x), m.psi(e)):
            out.append(Violation("action-preserving", (x, e), "psi(x.e) != phi(x).psi(e)"))
            break
    return out


def pushforward_hypotheses(m: XModMorphism) -> list[Violation]:
    """Named failures of: psi, phi onto and Ker(psi) meeting Ker(d) trivially."""
    out = []
    if not m.psi.is_surjective():
        out.append(Violation("psi-surjective", (), "psi is not surjective"))
    if not m.phi.is_surjective():
        out.append(Violation("phi-surjective", (), "phi is not surjective"))
    both = m.psi.kernel() & m.source.boundary.kernel()
    if both != {m.source.E.identity}:
        out.append(Violation("kernel-intersection", tuple(sorted(both)), "Ker(psi) and Ker(d) meet nontrivially"))
    return out


# catalog -----------------------------------------------------------------


def normal_inclusion(h: FiniteGroup, normal: list[int]) -> CrossedModule:
    """Inclusion of a normal subgroup with the conjugation action."""
    elems = [h.identity] + sorted(set(normal) - {h.identity})
    e = subgroup_as_group(h, elems)
    return CrossedModule(e, h, GroupHom(e, h, tuple(elems)), GroupAction.conjugation(h, elems, e))


def trivial_boundary(e: FiniteGroup, h: FiniteGroup) -> CrossedModule:
    """Trivial map E -> H with trivial action (E must be abelian)."""
    return CrossedModule(e, h, GroupHom.trivial(e, h), GroupAction.trivial(h, e))


def inner_automorphisms(g: FiniteGroup) -> CrossedModule:
    """g -> Inn(g) for centreless g, Inn(g) identified with g acting by conjugation."""
    return CrossedModule(
        g, g, GroupHom.identity_of(g), GroupAction(g, g, tuple(tuple(g.conj(x, a) for a in g.elements()) for x in g.elements()))
    )


def central_epimorphism(n: int, m: int) -> CrossedModule:
    """Z/n -> Z/m reduction (m | n) with trivial action."""
    e, h = cyclic_group(n), cyclic_group(m)
    return CrossedModule(e, h, GroupHom(e, h, tuple(a % m for a in range(n))), GroupAction.trivial(h, e))


def inner_times_cyclic(g: FiniteGroup, n: int) -> CrossedModule:
    """g x Z/n -> g, projection, g acting by conjugation on the first factor (g centreless)."""
    z = cyclic_group(n)
    e = direct_product(g, z)
    bd = GroupHom(e, g, tuple(a // n for a in e.elements()))
    act = GroupAction(g, e, tuple(tuple(g.conj(x, a // n) * n + a % n for a in e.elements()) for x in g.elements()))
    return CrossedModule(e, g, bd, act)


def cyclic_by_multiplication(n: int, m: int, u: int) -> CrossedModule:
    """Trivial map Z/n -> Z/m with x acting on Z/n as multiplication by u^x (u^m = 1 mod n)."""
    if pow(u, m, n) != 1 % n:
        raise StructuralError(f"{u}^{m} is not 1 modulo {n}")
    e, h = cyclic_group(n), cyclic_group(m)
    act = GroupAction(h, e, tuple(tuple(a * pow(u, x, n) % n for a in e.elements()) for x in h.elements()))
    return CrossedModule(e, h, GroupHom.trivial(e, h), act)


def rp3_example_source() -> CrossedModule:
    """Z/2 -> Z/2 x Z/3, a -> (a, 0), trivial action."""
    e = cyclic_group(2)
    h = direct_product(cyclic_group(2), cyclic_group(3))
    return CrossedModule(e, h, GroupHom(e, h, (0, 3)), GroupAction.trivial(h, e))


def rp3_example_morphism() -> XModMorphism:
    """(id, trivial): (Z/2 -> Z/2 x Z/3) to (Z/2 -> 1)."""
    src = rp3_example_source()
    tgt = trivial_boundary(src.E, trivial_group())
    return XModMorphism(src, tgt, GroupHom.identity_of(src.E), GroupHom.trivial(src.H, tgt.H))


def semidirect_morphism(cm: CrossedModule) -> XModMorphism:
    """(id_E, (h,e) -> d(e)h) from E -> H x| E, conjugation action, onto cm."""
    sd = semidirect_product(cm)
    G, inc = sd.group, sd.inject_E
    table = tuple(tuple(inc.image.index(G.conj(g, inc(e))) for e in cm.E.elements()) for g in G.elements())
    iota = CrossedModule(cm.E, G, inc, GroupAction(G, cm.E, table))
    return XModMorphism(iota, cm, GroupHom.identity_of(cm.E), sd.phi)


def quotient_morphism(source: CrossedModule, target: CrossedModule, psi: tuple[int, ...], phi: tuple[int, ...]) -> XModMorphism:
    return XModMorphism(source, target, GroupHom(source.E, target.E, psi), GroupHom(source.H, target.H, phi))


def builtin_morphism(name: str) -> XModMorphism:
    """Named morphisms; ``identity:<xmod>`` and ``semidirect:<xmod>`` take a builtin crossed module."""
    if name.startswith("identity:"):
        return XModMorphism.identity(builtin_xmod(name.split(":", 1)[1]))
    if name.startswith("semidirect:"):
        return semidirect_morphism(builtin_xmod(name.split(":", 1)[1]))

    def z4_to_z2() -> XModMorphism:
        src = builtin_xmod("z2_in_z4")
        return quotient_morphism(src, trivial_boundary(trivial_group(), cyclic_group(2)), (0, 0), (0, 1, 0, 1))

    def collapse(x: str) -> XModMorphism:
        src = builtin_xmod(x)
        tgt = trivial_boundary(trivial_group(), trivial_group())
        return quotient_morphism(src, tgt, (0,) * src.E.order, (0,) * src.H.order)

    def rp3_to_z3() -> XModMorphism:
        src = rp3_example_source()
        return quotient_morphism(src, trivial_boundary(trivial_group(), cyclic_group(3)), (0, 0), tuple(x % 3 for x in src.H.elements()))

    table = {
        "rp3": rp3_example_morphism,
        "z2_in_z4_quotient": z4_to_z2,
        "s3_inner_collapse": lambda: collapse("s3_inner"),
        "1_to_z2_collapse": lambda: collapse("1_to_z2"),
        "rp3_source_to_z3": rp3_to_z3,
    }
    if name not in table:
        raise KeyError(f"unknown builtin morphism {name!r}; choose from {sorted(table)} or identity:<xmod>, semidirect:<xmod>")
    return table[name]()


def builtin_xmod(name: str) -> CrossedModule:
    """Named crossed modules used by the CLI and the test matrix."""
    table = {
        "trivial": lambda: trivial_boundary(trivial_group(), trivial_group()),
        "z2_in_z4": lambda: normal_inclusion(cyclic_group(4), [0, 2]),
        "z2_to_1": lambda: trivial_boundary(cyclic_group(2), trivial_group()),
        "z3_to_1": lambda: trivial_boundary(cyclic_group(3), trivial_group()),
        "1_to_z2": lambda: trivial_boundary(trivial_group(), cyclic_group(2)),
        "1_to_z3": lambda: trivial_boundary(trivial_group(), cyclic_group(3)),
        "s3_inner": lambda: inner_automorphisms(symmetric_group(3)),
        "z4_to_z2": lambda: central_epimorphism(4, 2),
        "rp3_source": rp3_example_source,
        "s3xz2_to_s3": lambda: inner_times_cyclic(symmetric_group(3), 2),
        "z3_by_z2": lambda: cyclic_by_multiplication(3, 2, 2),
        "z11_by_z5": lambda: cyclic_by_multiplication(11, 5, 3),
    }
    if name not in table:
        raise KeyError(f"unknown builtin crossed module {name!r}; choose from {sorted(table)}")
    return table[name]()

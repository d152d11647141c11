"""Pointed spherical chi-fusion categories given by finite combinatorial data.

Every instance is realized as the push-forward of a (possibly twisted)
linearized 2-group ``kG_chi0`` along a crossed-module morphism ``chi0 -> chi``
(the identity morphism for ``kG_chi`` itself).  Simples are representatives
``J`` of the base simples ``H0`` modulo the ``Ker(psi)``-action, and every
scalar evaluation happens in the base category, where Hom spaces between
simples are spanned by a single group element.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import Optional, Sequence

from .cocycle import CrossedCocycle3, check_cocycle
from .groups import StructuralError, Violation
from .monoidal import TwistedEngine, identity_violations
from .scalar import Scalar
from .xmod import (
    CrossedModule,
    XModMorphism,
    pushforward_hypotheses,
    semidirect_morphism,
    validate_crossed_module,
    validate_morphism,
)

Letter = tuple[int, int]  # (simple, +1 | -1)


class CategoryError(ValueError):
    pass


@dataclass(eq=False)
class PointedXiFusion:
    """A rank-one-multiplicity chi-fusion category.

    ``base`` is the crossed module of the linearized 2-group the category is
    pushed forward from, ``morphism`` maps ``base`` onto ``cm`` and ``reps``
    lists the base H-elements chosen as simples (``reps[unit] == 1``).
    """

    cm: CrossedModule
    base: CrossedModule
    morphism: XModMorphism
    reps: tuple[int, ...]
    engine: TwistedEngine
    name: str = "category"
    _proj: dict[int, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        kpsi = sorted(self.morphism.psi.kernel())
        index = {h: i for i, h in enumerate(self.reps)}
        for x in self.base.H.elements():
            orbit = {self.base.H.mul(self.base.d(k), x) for k in kpsi}
            hits = [index[y] for y in orbit if y in index]
            if len(hits) != 1:
                raise CategoryError(f"representatives must meet every Ker(psi)-orbit once (base element {x})")
            self._proj[x] = hits[0]

    # combinatorial tables -------------------------------------------------
    @property
    def size(self) -> int:
        return len(self.reps)

    @property
    def simples(self) -> range:
        return range(len(self.reps))

    @cached_property
    def unit(self) -> int:
        return self._proj[self.base.H.identity]

    @property
    def twist(self) -> Optional[CrossedCocycle3]:
        return self.engine.omega

    @property
    def is_pushforward(self) -> bool:
        return self.base is not self.cm

    def base_degree(self, i: int) -> int:
        return self.reps[i]

    def project(self, x: int) -> int:
        """Simple 1-isomorphic to the base simple ``x``."""
        return self._proj[x]

    @cached_property
    def degree(self) -> tuple[int, ...]:
        return tuple(self.morphism.phi(x) for x in self.reps)

    @cached_property
    def dual(self) -> tuple[int, ...]:
        return tuple(self._proj[self.base.H.inv(x)] for x in self.reps)

    @cached_property
    def fusion(self) -> tuple[tuple[int, ...], ...]:
        mul = self.base.H.mul
        return tuple(tuple(self._proj[mul(a, b)] for b in self.reps) for a in self.reps)

    @cached_property
    def lifts(self) -> dict[int, tuple[int, ...]]:
        """e' -> psi^-1(e')."""
        out: dict[int, list[int]] = {e: [] for e in self.cm.E.elements()}
        for e in self.base.E.elements():
            out[self.morphism.psi(e)].append(e)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def e_action(self) -> tuple[tuple[int, ...], ...]:
        """e_action[e'][i] = e'.i."""
        mul, d = self.base.H.mul, self.base.d
        return tuple(
            tuple(self._proj[mul(d(self.lifts[e][0]), x)] for x in self.reps) for e in self.cm.E.elements()
        )

    @cached_property
    def dims(self) -> tuple[Scalar, ...]:
        return tuple(Scalar.rational(s) for s in self.dim_signs)

    @cached_property
    def dim_signs(self) -> tuple[int, ...]:
        return tuple(self.engine.dim_signs[x] for x in self.reps)

    def fiber(self, h: int) -> tuple[int, ...]:
        return tuple(i for i in self.simples if self.degree[i] == h)

    # ranks ----------------------------------------------------------------
    def lift(self, e: int, word_degree: int) -> Optional[int]:
        """The unique base element over ``e`` whose boundary is ``word_degree``, if any."""
        hits = [f for f in self.lifts[e] if self.base.d(f) == word_degree]
        if len(hits) > 1:
            raise CategoryError("Ker(psi) meets Ker(d) nontrivially")
        return hits[0] if hits else None

    def word_base_degree(self, word: Sequence[Letter]) -> int:
        H = self.base.H
        acc = H.identity
        for i, sign in word:
            x = self.reps[i]
            acc = H.mul(acc, x if sign > 0 else H.inv(x))
        return acc

    def hom_rank(self, i: int, e: int, j: int) -> int:
        """Rank of Hom^e(i, j)."""
        H = self.base.H
        target = H.mul(self.reps[j], H.inv(self.reps[i]))
        return sum(1 for f in self.lifts[e] if self.base.d(f) == target)

    @cached_property
    def degree_counts(self) -> dict[int, dict[int, int]]:
        """For each e, how many lifts of e have each boundary degree."""
        return {e: dict(Counter(self.base.d(f) for f in fs)) for e, fs in self.lifts.items()}

    def mult_index(self, word: Sequence[Letter], e: int) -> int:
        """N^{1,e} of the signed word: rank of Hom^e(1, word)."""
        return self.degree_counts[e].get(self.word_base_degree(word), 0)

    def dim_neutral(self) -> Scalar:
        """dim of the neutral component; raises if fiber sums depend on the degree."""
        sums = {h: sum(s * s for s in (self.dim_signs[i] for i in self.fiber(h))) for h in self.cm.H.elements()}
        values = set(sums.values())
        if len(values) != 1:
            raise CategoryError(f"fiber dimension sums depend on the degree: {sums}")
        return Scalar.rational(values.pop())

    @cached_property
    def d_phi(self) -> Fraction:
        return Fraction(len(self.morphism.phi.kernel()), len(self.morphism.psi.kernel()))

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "simples": len(self.reps),
            "degree": list(self.degree),
            "dual": list(self.dual),
            "dims": [s.to_json() for s in self.dims],
            "twisted": self.twist is not None and not self.twist.is_trivial(),
        }


# constructors ---------------------------------------------------------------


def _from_base(cm: CrossedModule, omega: Optional[CrossedCocycle3], dim_signs: Optional[Sequence[int]], name: str) -> PointedXiFusion:
    engine = TwistedEngine(cm, omega, dim_signs)
    return PointedXiFusion(cm, cm, XModMorphism.identity(cm), tuple(cm.H.elements()), engine, name)


def _require_valid(cm: CrossedModule) -> None:
    bad = validate_crossed_module(cm)
    if bad:
        raise CategoryError(f"invalid crossed module: {bad[0].message}")


def linearized_2group(cm: CrossedModule, dim_signs: Optional[Sequence[int]] = None) -> PointedXiFusion:
    """kG_chi: simples H, Hom^e(x, y) = k e when y = d(e) x.

    ``dim_signs`` must be a character H -> {1, -1} trivial on the image of d,
    so that 1-isomorphic simples share a dimension.
    """
    _require_valid(cm)
    if dim_signs is not None:
        H = cm.H
        if len(dim_signs) != H.order or any(s not in (1, -1) for s in dim_signs):
            raise CategoryError("dim_signs must assign 1 or -1 to every element of H")
        if any(dim_signs[H.mul(a, b)] != dim_signs[a] * dim_signs[b] for a in H.elements() for b in H.elements()):
            raise CategoryError("dim_signs must be multiplicative")
        if any(dim_signs[x] != 1 for x in cm.image):
            raise CategoryError("dim_signs must be trivial on the image of the boundary")
    return _from_base(cm, None, dim_signs, "kG")


def graded_vect(cm: CrossedModule) -> PointedXiFusion:
    """(E,H)-vect for a subgroup inclusion E -> H."""
    _require_valid(cm)
    if not cm.boundary.is_injective():
        raise CategoryError("(E,H)-vect needs an injective boundary")
    return _from_base(cm, None, None, "EH-vect")


def twist(c: PointedXiFusion, w: CrossedCocycle3) -> PointedXiFusion:
    """C^omega for an untwisted, non-push-forward category C."""
    if w.cm is not c.cm:
        raise CategoryError("cocycle lives on a different crossed module")
    if c.is_pushforward:
        raise CategoryError("twisting a push-forward is not supported")
    if c.twist is not None and not c.twist.is_trivial():
        raise CategoryError("category is already twisted")
    bad = check_cocycle(w)
    if bad:
        raise CategoryError(f"invalid cocycle: {bad[0].message}")
    engine = TwistedEngine(c.cm, w, c.engine.dim_signs)
    unit_bad = identity_violations(engine)
    if unit_bad:
        raise CategoryError(unit_bad[0])
    return PointedXiFusion(c.cm, c.base, c.morphism, c.reps, engine, c.name + "^w")


def _compose(outer: XModMorphism, inner: XModMorphism) -> XModMorphism:
    return XModMorphism(inner.source, outer.target, outer.psi.compose(inner.psi), outer.phi.compose(inner.phi))


def pushforward(m: XModMorphism, c: PointedXiFusion) -> PointedXiFusion:
    """phi_*(C): same base, regraded along m."""
    if m.source is not c.cm:
        raise CategoryError("morphism source differs from the category's crossed module")
    if c.twist is not None and not c.twist.is_trivial():
        raise CategoryError("push-forward of a twisted category is not supported")
    bad = validate_morphism(m) + pushforward_hypotheses(m)
    if bad:
        raise CategoryError("; ".join(f"{v.axiom}: {v.message}" for v in bad))
    total = _compose(m, c.morphism) if c.is_pushforward else m
    bad = pushforward_hypotheses(total)
    if bad:
        raise CategoryError("; ".join(f"{v.axiom}: {v.message}" for v in bad))
    base = c.base
    kpsi = sorted(total.psi.kernel())
    # lowest-index representative per orbit, unit first
    reps: list[int] = []
    seen: set[int] = set()
    for x in [base.H.identity] + [y for y in base.H.elements() if y != base.H.identity]:
        if x in seen:
            continue
        reps.append(x)
        seen.update(base.H.mul(base.d(k), x) for k in kpsi)
    return PointedXiFusion(m.target, base, total, tuple(reps), c.engine, f"push({c.name})")


def xi_vect(cm: CrossedModule) -> PointedXiFusion:
    """chi-vect: the push-forward of (E, H x| E)-vect along (id_E, (h,e) -> d(e)h)."""
    _require_valid(cm)
    m = semidirect_morphism(cm)
    base = graded_vect(m.source)
    out = pushforward(m, base)
    out.name = "xi-vect"
    return out


# invariants -------------------------------------------------------------


def action_violations(c: PointedXiFusion) -> list[Violation]:
    """e_action is a left E-action compatible with degrees."""
    out = []
    E, d = c.cm.E, c.cm.d
    for i in c.simples:
        if c.e_action[E.identity][i] != i:
            out.append(Violation("unit-action", (i,), "1.i != i"))
        for e, f in product(E.elements(), repeat=2):
            if c.e_action[f][c.e_action[e][i]] != c.e_action[E.mul(f, e)][i]:
                out.append(Violation("action-law", (e, f, i), "f.(e.i) != (fe).i"))
        for e in E.elements():
            if c.degree[c.e_action[e][i]] != c.cm.H.mul(d(e), c.degree[i]):
                out.append(Violation("degree-compatibility", (e, i), "deg(e.i) != d(e) deg(i)"))
    return out


def structure_violations(c: PointedXiFusion) -> list[Violation]:
    out = action_violations(c)
    H = c.cm.H
    if c.degree[c.unit] != H.identity:
        out.append(Violation("unit-degree", (c.unit,), "deg(1) != 1"))
    for i, j in product(c.simples, repeat=2):
        if c.degree[c.fusion[i][j]] != H.mul(c.degree[i], c.degree[j]):
            out.append(Violation("degree-multiplicative", (i, j), "deg(i*j) != deg(i)deg(j)"))
    for i in c.simples:
        if c.degree[c.dual[i]] != H.inv(c.degree[i]):
            out.append(Violation("dual-degree", (i,), "deg(i*) != deg(i)^-1"))
    for h in H.elements():
        if not c.fiber(h):
            out.append(Violation("nonempty-fiber", (h,), "I_h is empty"))
    if c.dim_signs[c.unit] != 1:
        out.append(Violation("unit-dimension", (c.unit,), "dim(1) != 1"))
    return out


def bubble_identity_violations(c: PointedXiFusion) -> list[Violation]:
    """Sum_{m in I_g, n in I_h} dim m dim n N^{1,e}_{X m Y n} = dim X dim Y dim_neutral."""
    out = []
    H, E = c.cm.H, c.cm.E
    dn = c.dim_neutral()
    fibers = {h: c.fiber(h) for h in H.elements()}
    for X, Y in product(c.simples, repeat=2):
        for g, h in product(H.elements(), repeat=2):
            deg = H.prod((c.degree[X], g, c.degree[Y], h))
            for e in E.elements():
                if c.cm.d(e) != deg:
                    continue
                lhs = sum(
                    c.dim_signs[m] * c.dim_signs[n] * c.mult_index(((X, 1), (m, 1), (Y, 1), (n, 1)), e)
                    for m in fibers[g]
                    for n in fibers[h]
                )
                rhs = dn * (c.dim_signs[X] * c.dim_signs[Y])
                if Scalar.rational(lhs) != rhs:
                    out.append(Violation("bubble-identity", (X, Y, g, h, e), f"{lhs} != {rhs}"))
    return out


def pushforward_rank_violations(c: PointedXiFusion) -> list[Violation]:
    """Hom^{e'} in phi_*(C) is the sum of base Hom^e over psi^-1(e')."""
    out = []
    base = c.base
    for i, j in product(c.simples, repeat=2):
        x, y = c.reps[i], c.reps[j]
        for e in c.cm.E.elements():
            total = sum(1 for f in c.lifts[e] if base.H.mul(base.d(f), x) == y)
            if c.hom_rank(i, e, j) != total:
                out.append(Violation("pushforward-rank", (i, e, j), "rank mismatch"))
    return out


def representative_bijection_violations(c: PointedXiFusion) -> list[Violation]:
    """(k, j) -> k.j is a bijection Ker(psi) x J_{h'} -> union of base fibers over phi^-1(h')."""
    out = []
    base = c.base
    kpsi = sorted(c.morphism.psi.kernel())
    for hp in c.cm.H.elements():
        image = [base.H.mul(base.d(k), c.reps[j]) for k in kpsi for j in c.fiber(hp)]
        target = sorted(x for x in base.H.elements() if c.morphism.phi(x) == hp)
        if sorted(image) != target:
            out.append(Violation("representatives", (hp,), "Ker(psi) x J_h' does not biject onto the base fibers"))
    return out


def builtin_category(kind: str, cm: CrossedModule, omega: Optional[CrossedCocycle3] = None) -> PointedXiFusion:
    """kind in {kG, EH-vect, xi-vect}; optional twist for kG and EH-vect."""
    makers = {"kG": linearized_2group, "EH-vect": graded_vect, "xi-vect": xi_vect}
    if kind not in makers:
        raise StructuralError(f"unknown category constructor {kind!r}; choose from {sorted(makers)}")
    c = makers[kind](cm)
    return twist(c, omega) if omega is not None else c

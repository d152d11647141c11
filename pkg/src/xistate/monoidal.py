"""Twisted monoidal calculus of a linearized 2-group on bracketed words.

Objects are binary trees of H-elements (``None`` is the unit, leaves are ints,
pairs are 2-tuples); the unit is strict.  A morphism is ``zeta_N**k [e]`` where
``[e]`` is the canonical basis vector of the rank-one space ``Hom^e(X, Y)``.
Composition, tensor product, associators and (co)evaluations carry the scalar
factors prescribed by a normalized crossed-module 3-cocycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Optional, Sequence, Union

from .cocycle import CrossedCocycle3
from .scalar import Scalar
from .xmod import CrossedModule

Obj = Union[None, int, tuple]


def pair(a: Obj, b: Obj) -> Obj:
    if a is None:
        return b
    if b is None:
        return a
    return (a, b)


def leaves(x: Obj) -> tuple[int, ...]:
    if x is None:
        return ()
    if isinstance(x, int):
        return (x,)
    return leaves(x[0]) + leaves(x[1])


def left_normal(items: Sequence[int]) -> Obj:
    acc: Obj = None
    for h in items:
        acc = pair(acc, h)
    return acc


@dataclass(frozen=True)
class Mor:
    src: Obj
    tgt: Obj
    e: int
    k: int


class CoherenceError(ArithmeticError):
    pass


class TwistedEngine:
    """Morphism arithmetic in (kG_chi)^omega with sign-valued dimensions."""

    def __init__(self, cm: CrossedModule, omega: Optional[CrossedCocycle3] = None, dim_signs: Optional[Sequence[int]] = None):
        self.cm = cm
        self.omega = omega
        self.H, self.E = cm.H, cm.E
        self.dim_signs = tuple(dim_signs) if dim_signs is not None else (1,) * cm.H.order
        need_sign = any(s == -1 for s in self.dim_signs)
        order = omega.order if omega is not None and not omega.is_trivial() else 1
        if need_sign:
            order = order * 2 // gcd(order, 2)
        self.N = order
        self._scale = self.N // omega.order if omega is not None and not omega.is_trivial() else 0
        self._w = omega.exponents if omega is not None and not omega.is_trivial() else None
        self._deg_cache: dict = {}
        self._left_cache: dict = {}

    # scalars ------------------------------------------------------------
    def w(self, x: int, y: int, z: int, a: int, b: int, c: int) -> int:
        if self._w is None:
            return 0
        return int(self._w[x, y, z, a, b, c]) * self._scale

    def wt(self, x: int, y: int, z: int) -> int:
        one = self.E.identity
        return self.w(x, y, z, one, one, one)

    def dim_exp(self, h: int) -> int:
        return self.N // 2 if self.dim_signs[h] == -1 else 0

    def to_scalar(self, k: int) -> Scalar:
        return Scalar.root_of_unity(self.N, k)

    # objects ------------------------------------------------------------
    def deg(self, x: Obj) -> int:
        if x is None:
            return self.H.identity
        if isinstance(x, int):
            return x
        d = self._deg_cache.get(x)
        if d is None:
            d = self.H.mul(self.deg(x[0]), self.deg(x[1]))
            self._deg_cache[x] = d
        return d

    # basic morphisms ----------------------------------------------------
    def identity(self, x: Obj) -> Mor:
        return Mor(x, x, self.E.identity, 0)

    def basis(self, src: Obj, tgt: Obj, e: int, k: int = 0) -> Mor:
        if self.H.mul(self.cm.d(e), self.deg(src)) != self.deg(tgt):
            raise CoherenceError("Hom^e(src, tgt) is zero")
        return Mor(src, tgt, e, k % self.N)

    def compose(self, g: Mor, f: Mor) -> Mor:
        """g o f."""
        if f.tgt != g.src:
            raise CoherenceError(f"cannot compose: {f.tgt!r} != {g.src!r}")
        one = self.H.identity
        k = f.k + g.k - self.w(self.deg(f.src), one, one, f.e, g.e, self.E.identity)
        return Mor(f.src, g.tgt, self.E.mul(g.e, f.e), k % self.N)

    def tensor(self, f: Mor, g: Mor) -> Mor:
        x, y = self.deg(f.src), self.deg(f.tgt)
        one_h, one_e = self.H.identity, self.E.identity
        e = self.E.mul(f.e, self.cm.act(x, g.e))
        k = (
            f.k
            + g.k
            + self.w(x, y, one_h, e, one_e, g.e)
            - self.w(x, one_h, self.H.mul(self.cm.d(g.e), y), f.e, one_e, one_e)
        )
        return Mor(pair(f.src, g.src), pair(f.tgt, g.tgt), e, k % self.N)

    def assoc(self, a: Obj, b: Obj, c: Obj) -> Mor:
        """(ab)c -> a(bc)."""
        return Mor(pair(pair(a, b), c), pair(a, pair(b, c)), self.E.identity, self.wt(self.deg(a), self.deg(b), self.deg(c)) % self.N)

    def invert_coherence(self, m: Mor) -> Mor:
        """Inverse of a degree-one coherence isomorphism."""
        if m.e != self.E.identity:
            raise CoherenceError("only degree-one coherence maps are inverted")
        return Mor(m.tgt, m.src, m.e, (-m.k) % self.N)

    # duality for a simple of degree h ----------------------------------
    def lev(self, h: int) -> Mor:
        """X* X -> 1."""
        return Mor((self.H.inv(h), h), None, self.E.identity, 0)

    def rcoev(self, h: int) -> Mor:
        """1 -> X* X."""
        return Mor(None, (self.H.inv(h), h), self.E.identity, self.dim_exp(h) % self.N)

    def lcoev(self, h: int) -> Mor:
        """1 -> X X*."""
        return Mor(None, (h, self.H.inv(h)), self.E.identity, (-self.wt(h, self.H.inv(h), h)) % self.N)

    def rev(self, h: int) -> Mor:
        """X X* -> 1."""
        return Mor((h, self.H.inv(h)), None, self.E.identity, (self.wt(h, self.H.inv(h), h) + self.dim_exp(h)) % self.N)

    # rebracketing -------------------------------------------------------
    def to_left(self, x: Obj) -> Mor:
        """Coherence map x -> left-normalized bracketing of its leaves."""
        if x is None or isinstance(x, int):
            return self.identity(x)
        m = self._left_cache.get(x)
        if m is None:
            la, lb = self.to_left(x[0]), self.to_left(x[1])
            m = self.compose(self._absorb(la.tgt, lb.tgt), self.tensor(la, lb))
            self._left_cache[x] = m
        return m

    def _absorb(self, la: Obj, lb: Obj) -> Mor:
        """(la, lb) -> left-normalized, both inputs left-normalized."""
        if lb is None or isinstance(lb, int) or la is None:
            return self.identity(pair(la, lb))
        b1, b2 = lb
        first = self.invert_coherence(self.assoc(la, b1, b2))
        rest = self.tensor(self._absorb(la, b1), self.identity(b2))
        return self.compose(rest, first)

    def rebracket(self, x: Obj, y: Obj) -> Mor:
        if x == y:
            return self.identity(x)
        m = self._left_cache.get((x, y, "rebracket"))
        if m is None:
            if leaves(x) != leaves(y):
                raise CoherenceError("rebracketing requires equal leaf sequences")
            m = self.compose(self.invert_coherence(self.to_left(y)), self.to_left(x))
            self._left_cache[(x, y, "rebracket")] = m
        return m


def identity_violations(engine: TwistedEngine) -> list[str]:
    """Unit and identity laws the twisted engine relies on, checked exhaustively."""
    cm, out = engine.cm, []
    one_h, one_e = cm.H.identity, cm.E.identity
    for x in cm.H.elements():
        for e in cm.E.elements():
            if engine.w(x, one_h, one_h, e, one_e, one_e) % engine.N:
                out.append(f"omega(x,1,1,e,1,1) != 1 at x={x}, e={e}")
            if engine.w(x, one_h, one_h, one_e, e, one_e) % engine.N:
                out.append(f"omega(x,1,1,1,e,1) != 1 at x={x}, e={e}")
            y = cm.H.mul(cm.d(e), x)
            if (engine.w(x, y, one_h, e, one_e, one_e) - engine.w(x, one_h, y, e, one_e, one_e)) % engine.N:
                out.append(f"right unit tensor factor nontrivial at x={x}, e={e}")
            if (engine.w(one_h, one_h, one_h, e, one_e, e) - engine.w(one_h, one_h, cm.d(e), one_e, one_e, one_e)) % engine.N:
                out.append(f"left unit tensor factor nontrivial at e={e}")
    return out

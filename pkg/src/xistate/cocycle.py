"""3-cocycles for crossed modules with values in the n-th roots of unity."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product
from typing import Callable

import numpy as np

from .groups import FiniteGroup, StructuralError, Violation
from .scalar import Scalar
from .xmod import CrossedModule


def _tables(cm: CrossedModule) -> tuple[np.ndarray, ...]:
    E, H = cm.E, cm.H
    return (
        np.array(E.cayley, dtype=np.int64),
        np.array(E.inverse, dtype=np.int64),
        np.array(H.cayley, dtype=np.int64),
        np.array(cm.boundary.image, dtype=np.int64),
        np.array(cm.action.table, dtype=np.int64),
    )


@dataclass(frozen=True, eq=False)
class CrossedCocycle3:
    """omega(x,y,z,a,b,c) = zeta_n ** exponents[x,y,z,a,b,c]."""

    cm: CrossedModule
    order: int
    exponents: np.ndarray

    def __post_init__(self) -> None:
        h, e = self.cm.H.order, self.cm.E.order
        if self.exponents.shape != (h, h, h, e, e, e):
            raise StructuralError(f"cocycle table must have shape {(h, h, h, e, e, e)}")
        object.__setattr__(self, "exponents", np.mod(self.exponents.astype(np.int64), self.order))
        self.exponents.setflags(write=False)

    def exp(self, x: int, y: int, z: int, a: int, b: int, c: int) -> int:
        return int(self.exponents[x, y, z, a, b, c])

    def value(self, x: int, y: int, z: int, a: int, b: int, c: int) -> Scalar:
        return Scalar.root_of_unity(self.order, self.exp(x, y, z, a, b, c))

    def tilde_exp(self, x: int, y: int, z: int) -> int:
        one = self.cm.E.identity
        return int(self.exponents[x, y, z, one, one, one])

    def is_trivial(self) -> bool:
        return not self.exponents.any()

    @cached_property
    def depends_on_E(self) -> bool:
        one = self.cm.E.identity
        base = self.exponents[:, :, :, one, one, one]
        return bool((self.exponents != base[:, :, :, None, None, None]).any())

    @classmethod
    def trivial(cls, cm: CrossedModule, order: int = 1) -> CrossedCocycle3:
        h, e = cm.H.order, cm.E.order
        return cls(cm, order, np.zeros((h, h, h, e, e, e), dtype=np.int64))

    def with_entry(self, index: tuple[int, ...], exponent: int) -> CrossedCocycle3:
        table = self.exponents.copy()
        table[index] = exponent
        return CrossedCocycle3(self.cm, self.order, table)

    # serialization ------------------------------------------------------
    def to_json(self) -> dict:
        default = int(np.bincount(self.exponents.ravel(), minlength=self.order).argmax())
        entries = []
        for idx in zip(*np.nonzero(self.exponents != default)):
            entries.append(
                {
                    "h": [int(i) for i in idx[:3]],
                    "e": [int(i) for i in idx[3:]],
                    "value": Scalar.root_of_unity(self.order, int(self.exponents[idx])).to_json(),
                }
            )
        return {
            "cyclotomic_order": self.order,
            "default": Scalar.root_of_unity(self.order, default).to_json(),
            "entries": entries,
        }

    @classmethod
    def from_json(cls, cm: CrossedModule, doc: dict) -> CrossedCocycle3:
        try:
            n = int(doc["cyclotomic_order"])
            roots = {tuple(Scalar.root_of_unity(n, k).coeffs): k for k in range(n)}

            def to_exp(v: object) -> int:
                s = Scalar.from_json(v).lift(n) if isinstance(v, dict) else Scalar.rational(v, n)
                s = s.lift(n) if s.order != n else s
                k = roots.get(tuple(s.coeffs))
                if k is None:
                    raise StructuralError(f"cocycle value {v} is not an n-th root of unity for n={n}")
                return k

            h, e = cm.H.order, cm.E.order
            table = np.full((h, h, h, e, e, e), to_exp(doc.get("default", 1)), dtype=np.int64)
            for ent in doc.get("entries", []):
                table[tuple(ent["h"]) + tuple(ent["e"])] = to_exp(ent["value"])
        except (KeyError, IndexError, TypeError) as exc:
            raise StructuralError(f"bad cocycle document: {exc}") from exc
        return cls(cm, n, table)


def cocycle_defect(w: CrossedCocycle3) -> np.ndarray:
    """Exponent of LHS/RHS of the crossed 3-cocycle identity on all of H^4 x E^6."""
    Em, Ei, Hm, bnd, act = _tables(w.cm)
    h, e = w.cm.H.order, w.cm.E.order
    x, y, z, t, a, b, c, d, ee, f = np.indices((h, h, h, h, e, e, e, e, e, e), sparse=True)
    W = w.exponents
    lhs = (
        W[x, y, z, a, b, c]
        + W[x, Hm[Hm[bnd[c], y], z], t, Em[Em[b, a], act[x, Ei[c]]], f, d]
        + W[y, z, t, c, d, ee]
    )
    rhs = W[Hm[Hm[bnd[a], x], y], z, t, b, f, ee] + W[
        x,
        y,
        Hm[Hm[bnd[ee], z], t],
        a,
        Em[Em[Em[Em[f, b], a], act[Hm[x, y], Ei[ee]]], Ei[a]],
        Em[Em[d, c], act[y, Ei[ee]]],
    ]
    return np.mod(lhs - rhs, w.order)


def normalization_defects(w: CrossedCocycle3) -> list[Violation]:
    out = []
    one_h, one_e = w.cm.H.identity, w.cm.E.identity
    for x, y, ee in product(w.cm.H.elements(), w.cm.H.elements(), w.cm.E.elements()):
        if w.exp(one_h, x, y, one_e, ee, one_e):
            out.append(Violation("normalized", (one_h, x, y, one_e, ee, one_e), "omega(1,x,y,1,e,1) != 1"))
            break
    for x, y in product(w.cm.H.elements(), repeat=2):
        if w.exp(x, one_h, y, one_e, one_e, one_e):
            out.append(Violation("normalized", (x, one_h, y, one_e, one_e, one_e), "omega(x,1,y,1,1,1) != 1"))
            break
    return out


def check_cocycle(w: CrossedCocycle3) -> list[Violation]:
    """Exhaustive check of the cocycle identity and normalization; first violation reported."""
    out = []
    defect = cocycle_defect(w)
    bad = np.argwhere(defect)
    if len(bad):
        out.append(Violation("cocycle-identity", tuple(int(i) for i in bad[0]), "(x,y,z,t,a,b,c,d,e,f) violates the identity"))
    return out + normalization_defects(w)


def group_cocycle_defects(group: FiniteGroup, exps: np.ndarray, order: int) -> list[Violation]:
    """Ordinary normalized group 3-cocycle check for a table H^3 -> Z/order."""
    n = group.order
    Hm = np.array(group.cayley, dtype=np.int64)
    x, y, z, t = np.indices((n, n, n, n), sparse=True)
    W = exps
    d = np.mod(W[y, z, t] + W[x, Hm[y, z], t] + W[x, y, z] - W[Hm[x, y], z, t] - W[x, y, Hm[z, t]], order)
    out = []
    bad = np.argwhere(d)
    if len(bad):
        out.append(Violation("group-cocycle-identity", tuple(int(i) for i in bad[0]), "group 3-cocycle identity fails"))
    one = group.identity
    if np.mod(W[one, :, :], order).any() or np.mod(W[:, one, :], order).any() or np.mod(W[:, :, one], order).any():
        out.append(Violation("group-normalized", (), "group cocycle not normalized"))
    return out


def derive_group_cocycle(w: CrossedCocycle3) -> np.ndarray:
    """The H-cocycle omega~(x,y,z) = omega(x,y,z,1,1,1), verified before return."""
    one = w.cm.E.identity
    tilde = np.array(w.exponents[:, :, :, one, one, one])
    bad = group_cocycle_defects(w.cm.H, tilde, w.order)
    if bad:
        raise ValueError(f"derived group cocycle invalid: {bad[0]}")
    return tilde


@dataclass(frozen=True)
class Inflation:
    cocycle: CrossedCocycle3
    report: list[Violation]

    @property
    def valid(self) -> bool:
        return not self.report


def inflate_group_cocycle(cm: CrossedModule, tilde: np.ndarray, order: int) -> Inflation:
    """Candidate omega(x,y,z,a,b,c) = tilde(x,y,z), checked exhaustively and flagged."""
    bad = group_cocycle_defects(cm.H, tilde, order)
    if bad:
        raise ValueError(f"input is not a normalized group 3-cocycle: {bad[0]}")
    e = cm.E.order
    table = np.broadcast_to(np.asarray(tilde)[:, :, :, None, None, None], tilde.shape + (e, e, e)).copy()
    w = CrossedCocycle3(cm, order, table)
    return Inflation(w, check_cocycle(w))


def pullback_group_cocycle(cm: CrossedModule, proj: Callable[[int], int], tilde: np.ndarray, order: int) -> Inflation:
    """Inflate a cocycle on a quotient of H along proj: H -> quotient."""
    h = cm.H.order
    table = np.empty((h, h, h), dtype=np.int64)
    for x, y, z in product(range(h), repeat=3):
        table[x, y, z] = tilde[proj(x), proj(y), proj(z)]
    return inflate_group_cocycle(cm, table, order)


def carry_cocycle(n: int, k: int = 1) -> np.ndarray:
    """zeta_n ** (k a carry(b, c)) on Z/n; for n = 2, k = 1 this is (-1)^(abc)."""
    a, b, c = np.indices((n, n, n))
    return np.mod(k * a * ((b + c) // n), n)


def search_cocycles(cm: CrossedModule, order: int, limit: int | None = None) -> list[CrossedCocycle3]:
    """Exhaustive search for normalized cocycles on H = 1 with values in mu_order.

    Only intended for tiny E (|E| <= 3); entries forced to 1 by normalization are fixed.
    """
    if cm.H.order != 1:
        raise ValueError("search is restricted to crossed modules with trivial H")
    e = cm.E.order
    one = cm.E.identity
    free = [
        idx
        for idx in product(range(e), repeat=3)
        if not (idx[0] == one and idx[2] == one)
    ]
    found = []
    for values in product(range(order), repeat=len(free)):
        table = np.zeros((1, 1, 1, e, e, e), dtype=np.int64)
        for idx, v in zip(free, values):
            table[(0, 0, 0) + idx] = v
        w = CrossedCocycle3(cm, order, table)
        if not cocycle_defect(w).any() and not normalization_defects(w):
            found.append(w)
            if limit is not None and len(found) >= limit:
                break
    return found


def pullback_cocycle(psi: tuple[int, ...], phi: tuple[int, ...], cm: CrossedModule, w: CrossedCocycle3) -> CrossedCocycle3:
    """omega o (phi^3 x psi^3) along a crossed-module morphism (psi, phi): cm -> w.cm."""
    P = np.array(phi, dtype=np.int64)
    S = np.array(psi, dtype=np.int64)
    h, e = cm.H.order, cm.E.order
    x, y, z, a, b, c = np.indices((h, h, h, e, e, e), sparse=True)
    return CrossedCocycle3(cm, w.order, w.exponents[P[x], P[y], P[z], S[a], S[b], S[c]])


def multiply_cocycles(u: CrossedCocycle3, v: CrossedCocycle3) -> CrossedCocycle3:
    if u.cm is not v.cm:
        raise ValueError("cocycles live on different crossed modules")
    n = u.order * v.order // np.gcd(u.order, v.order)
    return CrossedCocycle3(u.cm, int(n), u.exponents * (n // u.order) + v.exponents * (n // v.order))


def builtin_cocycles() -> dict[str, tuple[str, Callable[[CrossedModule], CrossedCocycle3]]]:
    """Named test cocycles: name -> (builtin crossed module, constructor)."""

    def sign(cm: CrossedModule) -> CrossedCocycle3:
        return inflate_group_cocycle(cm, carry_cocycle(cm.H.order), cm.H.order).cocycle

    def mu4(k: int) -> Callable[[CrossedModule], CrossedCocycle3]:
        return lambda cm: search_cocycles(cm, 4)[k]

    def pulled(k: int, with_coker: bool) -> Callable[[CrossedModule], CrossedCocycle3]:
        def make(cm: CrossedModule) -> CrossedCocycle3:
            from .xmod import trivial_boundary
            from .groups import trivial_group

            src = trivial_boundary(cm.E, trivial_group())
            w = pullback_cocycle(tuple(cm.E.elements()), (0,) * cm.H.order, cm, search_cocycles(src, 4)[k])
            if with_coker:
                w = multiply_cocycles(w, pullback_group_cocycle(cm, lambda h: h % 2, carry_cocycle(2), 2).cocycle)
            return w

        return make

    return {
        "sign_1_to_z2": ("1_to_z2", sign),
        "sign_1_to_z3": ("1_to_z3", sign),
        "mu4_z2_to_1_a": ("z2_to_1", mu4(1)),
        "mu4_z2_to_1_b": ("z2_to_1", mu4(2)),
        "mu4_z2_to_1_c": ("z2_to_1", mu4(3)),
        "mu4_z2_in_z4": ("z2_in_z4", pulled(1, False)),
        "mu4_sign_z2_in_z4": ("z2_in_z4", pulled(1, True)),
        "mu4_rp3_source": ("rp3_source", pulled(3, False)),
    }


def builtin_cocycle(name: str, cm: CrossedModule) -> CrossedCocycle3:
    table = builtin_cocycles()
    if name not in table:
        raise KeyError(f"unknown builtin cocycle {name!r}; choose from {sorted(table)}")
    return table[name][1](cm)

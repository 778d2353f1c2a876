"""Exel's inverse semigroup S(G), the partial group algebra and idempotents.

Every s in S(G) has a unique normal form e_{h1} ... e_{hk} [g] with the
h_i distinct and different from 1 and from g.  Internally the idempotent set
is a bitmask over group indices; :class:`ExelElement` is the public value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .field_linalg import Field
from .finite_group import GroupTable

__all__ = ["ExelElement", "ExelSemigroup", "KParElement", "semigroup_size"]


@dataclass(frozen=True, order=True)
class ExelElement:
    tail: int
    idempotents: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "idempotents", tuple(sorted(set(int(h) for h in self.idempotents))))
        object.__setattr__(self, "tail", int(self.tail))

    @property
    def mask(self) -> int:
        m = 0
        for h in self.idempotents:
            m |= 1 << h
        return m

    def to_json(self) -> dict:
        return {"idempotents": list(self.idempotents), "tail": self.tail}

    @classmethod
    def from_json(cls, data) -> ExelElement:
        return cls(int(data["tail"]), tuple(data.get("idempotents", ())))


def semigroup_size(order: int) -> int:
    return 2 ** (order - 1) + (order - 1) * 2 ** (order - 2) if order > 1 else 1


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


class ExelSemigroup:
    """S(G) for a finite group, with a precomputed multiplication table."""

    def __init__(self, group: GroupTable):
        self.group = group
        n = group.order
        if n > 12:
            raise ValueError(f"|S(G)| grows like 2^|G|; refusing |G| = {n} > 12")
        elems = []
        for g in range(n):
            free = [h for h in range(1, n) if h != g]
            for sub in range(1 << len(free)):
                m = 0
                for k, h in enumerate(free):
                    if sub >> k & 1:
                        m |= 1 << h
                elems.append((g, m))
        elems.sort(key=lambda gm: (gm[0], gm[1]))
        self._pairs = elems
        self._index = {gm: i for i, gm in enumerate(elems)}
        self.elements = tuple(ExelElement(g, tuple(_bits(m))) for g, m in elems)

    # -- raw normal-form arithmetic -------------------------------------
    def _translate(self, g: int, mask: int) -> int:
        out = 0
        row = self.group.mul[g]
        for h in _bits(mask):
            out |= 1 << int(row[h])
        return out

    def _normalize(self, mask: int, tail: int) -> tuple[int, int]:
        return tail, mask & ~1 & ~(1 << tail)

    def _mul_raw(self, s: tuple[int, int], t: tuple[int, int]) -> tuple[int, int]:
        g, a = s
        h, b = t
        mask = a | self._translate(g, b) | (1 << g)
        return self._normalize(mask, int(self.group.mul[g, h]))

    def _inv_raw(self, s: tuple[int, int]) -> tuple[int, int]:
        g, a = s
        gi = self.group.inverse(g)
        return self._normalize(self._translate(gi, a | (1 << g)), gi)

    # -- public API ---------------------------------------------------------
    def _check(self, s: ExelElement) -> tuple[int, int]:
        if not isinstance(s, ExelElement):
            raise TypeError(f"expected ExelElement, got {type(s).__name__}")
        key = (s.tail, s.mask)
        if key not in self._index:
            raise ValueError(f"{s} is not a normal form in S({self.group.label})")
        return key

    def element(self, i: int) -> ExelElement:
        return self.elements[i]

    def index(self, s: ExelElement) -> int:
        return self._index[self._check(s)]

    def __len__(self) -> int:
        return len(self.elements)

    def enumerate(self) -> tuple[ExelElement, ...]:
        return self.elements

    def gen(self, g: int) -> ExelElement:
        """The generator [g]."""
        return ExelElement(g)

    def e(self, *hs: int) -> ExelElement:
        """The idempotent e_{h1} ... e_{hk}."""
        return ExelElement(0, tuple(h for h in hs if h != 0))

    def multiply(self, s: ExelElement, t: ExelElement, *more: ExelElement) -> ExelElement:
        out = self.elements[self.table[self.index(s), self.index(t)]]
        for u in more:
            out = self.multiply(out, u)
        return out

    def inverse(self, s: ExelElement) -> ExelElement:
        return self.elements[self.inv_table[self.index(s)]]

    def epsilon(self, s: ExelElement) -> ExelElement:
        """s s^{-1}."""
        i = self.index(s)
        return self.elements[self.table[i, self.inv_table[i]]]

    def source(self, s: ExelElement) -> ExelElement:
        """s^{-1} s."""
        i = self.index(s)
        return self.elements[self.table[self.inv_table[i], i]]

    def is_idempotent(self, s: ExelElement) -> bool:
        return self._check(s)[0] == 0

    def conj_act(self, s: ExelElement, e: ExelElement) -> ExelElement:
        """s . e = s e s^{-1} for an idempotent e."""
        if not self.is_idempotent(e):
            raise ValueError(f"{self.render(e)} is not an idempotent")
        return self.multiply(s, e, self.inverse(s))

    def leq(self, s: ExelElement, t: ExelElement) -> bool:
        """Natural partial order: s <= t iff s = s s^{-1} t."""
        return self.multiply(self.epsilon(s), t) == s

    def e_tuple(self, tup) -> ExelElement:
        """e_{(g1,...,gn)} = e_{g1} e_{g1 g2} ... e_{g1...gn}."""
        prod = 0
        hs = []
        for g in tup:
            prod = int(self.group.mul[prod, g])
            hs.append(prod)
        return self.e(*hs)

    def render(self, s: ExelElement) -> str:
        names = self.group.names
        parts = [f"e_{{{names[h]}}}" for h in s.idempotents]
        if s.tail != 0 or not parts:
            parts.append(f"[{names[s.tail]}]")
        return " ".join(parts)

    @cached_property
    def table(self) -> np.ndarray:
        k = len(self._pairs)
        t = np.empty((k, k), dtype=np.int64)
        for i, s in enumerate(self._pairs):
            for j, u in enumerate(self._pairs):
                t[i, j] = self._index[self._mul_raw(s, u)]
        t.setflags(write=False)
        return t

    @cached_property
    def inv_table(self) -> np.ndarray:
        t = np.array([self._index[self._inv_raw(s)] for s in self._pairs], dtype=np.int64)
        t.setflags(write=False)
        return t

    @cached_property
    def idempotent_indices(self) -> tuple[int, ...]:
        return tuple(i for i, (g, _) in enumerate(self._pairs) if g == 0)

    @cached_property
    def tails(self) -> np.ndarray:
        return np.array([g for g, _ in self._pairs], dtype=np.int64)

    def certify_axioms(self) -> dict:
        """Exhaustive inverse-semigroup axioms and the defining relations."""
        t = self.table
        inv = self.inv_table
        k = len(self)
        idx = np.arange(k)
        assoc = bool(np.array_equal(t[t[:, :, None], idx[None, None, :]], t[idx[:, None, None], t[None, :, :]]))
        sss = t[t[idx, inv], idx]
        iii = t[t[inv, idx], inv]
        inverse_law = bool(np.array_equal(sss, idx) and np.array_equal(iii, inv))
        ids = np.array(self.idempotent_indices)
        commute = bool(np.array_equal(t[np.ix_(ids, ids)], t[np.ix_(ids, ids)].T))
        idem_are_idem = bool(np.array_equal(t[ids, ids], ids))
        # inverses are unique: among all x with s x s = s and x s x = x, only inv[s]
        unique_inv = True
        for s in range(k):
            cand = np.flatnonzero((t[t[s, idx], s] == s) & (t[t[idx, s], idx] == idx))
            if cand.tolist() != [inv[s]]:
                unique_inv = False
                break
        closure = bool(t.min() >= 0 and t.max() < k)
        g = self.group
        gen = [self.index(ExelElement(x)) for x in g.elements]
        rel = {"partial_rep_left": True, "partial_rep_right": True, "unit": True, "e_g": True,
               "push_right": True, "push_left": True}
        for x in g.elements:
            xi = g.inverse(x)
            if t[gen[x], gen[0]] != gen[x] or t[gen[0], gen[x]] != gen[x]:
                rel["unit"] = False
            ex = self.index(self.e(x))
            if t[gen[x], gen[xi]] != ex:
                rel["e_g"] = False
            for y in g.elements:
                xy = int(g.mul[x, y])
                yi = g.inverse(y)
                if t[t[gen[xi], gen[x]], gen[y]] != t[gen[xi], gen[xy]]:
                    rel["partial_rep_left"] = False
                if t[t[gen[x], gen[y]], gen[yi]] != t[gen[xy], gen[yi]]:
                    rel["partial_rep_right"] = False
                ey = self.index(self.e(y))
                if t[gen[x], ey] != t[self.index(self.e(xy)), gen[x]]:
                    rel["push_right"] = False
                if t[ey, gen[x]] != t[gen[x], self.index(self.e(int(g.mul[xi, y])))]:
                    rel["push_left"] = False
        checks = {
            "size_formula": k == semigroup_size(g.order),
            "closure": closure,
            "associativity": assoc,
            "inverse_law": inverse_law,
            "unique_inverses": unique_inv,
            "idempotents_commute": commute,
            "idempotents_idempotent": idem_are_idem,
            **rel,
        }
        return {"size": k, "checks": checks, "passed": all(checks.values())}


class KParElement:
    """A finite formal combination of S(G) elements: an element of K_par G."""

    __slots__ = ("semigroup", "field", "terms")

    def __init__(self, semigroup: ExelSemigroup, field: Field, terms=None):
        self.semigroup = semigroup
        self.field = field
        clean = {}
        for s, c in (terms or {}).items():
            semigroup.index(s)
            c = field.scalar(c)
            if c != 0:
                clean[s] = c
        self.terms = clean

    @classmethod
    def basis(cls, semigroup, field, s: ExelElement) -> KParElement:
        return cls(semigroup, field, {s: 1})

    def _same(self, other: KParElement):
        if other.semigroup is not self.semigroup or other.field != self.field:
            raise ValueError("K_par G elements over different groups or fields")

    def __add__(self, other: KParElement) -> KParElement:
        self._same(other)
        terms = dict(self.terms)
        for s, c in other.terms.items():
            terms[s] = terms.get(s, 0) + c
        return KParElement(self.semigroup, self.field, terms)

    def __neg__(self) -> KParElement:
        return KParElement(self.semigroup, self.field, {s: -c for s, c in self.terms.items()})

    def __sub__(self, other: KParElement) -> KParElement:
        return self + (-other)

    def scale(self, c) -> KParElement:
        c = self.field.scalar(c)
        return KParElement(self.semigroup, self.field, {s: c * v for s, v in self.terms.items()})

    def __mul__(self, other: KParElement) -> KParElement:
        self._same(other)
        terms: dict = {}
        for s, a in self.terms.items():
            for t, b in other.terms.items():
                st = self.semigroup.multiply(s, t)
                terms[st] = terms.get(st, 0) + a * b
        return KParElement(self.semigroup, self.field, terms)

    def is_idempotent_vector(self) -> bool:
        """Supported on E(S(G)), i.e. lies in B = K E(S(G))."""
        return all(self.semigroup.is_idempotent(s) for s in self.terms)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, KParElement)
            and other.semigroup is self.semigroup
            and self.terms == other.terms
        )

    def to_json(self) -> list:
        return [
            {"element": s.to_json(), "coeff": self.field.encode(c)}
            for s, c in sorted(self.terms.items())
        ]

    def __repr__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"{c}*({self.semigroup.render(s)})" for s, c in sorted(self.terms.items()))

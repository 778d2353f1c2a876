"""Finite groups as multiplication tables, subgroups and left transversals.

Elements are dense indices ``0..order-1`` with the identity at index 0.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GroupAxiomError",
    "GroupTable",
    "Subgroup",
    "Transversal",
    "build_group",
    "from_table",
    "cyclic",
    "dihedral",
    "symmetric",
    "direct_product",
    "left_transversal",
    "bar",
    "eta",
]


class GroupAxiomError(ValueError):
    def __init__(self, message: str, witness: tuple = ()):
        super().__init__(message if not witness else f"{message} at {witness}")
        self.witness = witness


@dataclass(frozen=True, eq=False)
class GroupTable:
    mul: np.ndarray
    names: tuple[str, ...]
    label: str = "G"
    inv: np.ndarray = field(init=False)

    def __post_init__(self):
        mul = np.asarray(self.mul, dtype=np.int64)
        mul.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        inv = np.argmax(mul == 0, axis=1).astype(np.int64)
        inv.setflags(write=False)
        object.__setattr__(self, "inv", inv)

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    @property
    def identity(self) -> int:
        return 0

    @property
    def elements(self) -> range:
        return range(self.order)

    def m(self, *xs: int) -> int:
        out = 0
        for x in xs:
            out = int(self.mul[out, x])
        return out

    def inverse(self, x: int) -> int:
        return int(self.inv[x])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def name(self, x: int) -> str:
        return self.names[x]

    def to_json(self) -> dict:
        return {"order": self.order, "mul": self.mul.tolist(), "names": list(self.names)}

    def __eq__(self, other):
        return isinstance(other, GroupTable) and np.array_equal(self.mul, other.mul)

    def __hash__(self):
        return hash(self.mul.tobytes())

    def __repr__(self):
        return f"GroupTable({self.label}, order={self.order})"


def _check_axioms(mul: np.ndarray) -> None:
    n = mul.shape[0]
    if mul.shape != (n, n):
        raise GroupAxiomError("multiplication table must be square")
    if n == 0:
        raise GroupAxiomError("empty group")
    if mul.min() < 0 or mul.max() >= n:
        raise GroupAxiomError("table entries out of range")
    ids = [e for e in range(n) if np.array_equal(mul[e], np.arange(n)) and np.array_equal(mul[:, e], np.arange(n))]
    if not ids:
        raise GroupAxiomError("no identity element")
    for a in range(n):
        if not np.any(mul[a] == ids[0]):
            raise GroupAxiomError("element without inverse", (a,))
    # (ab)c vs a(bc), all triples at once
    left = mul[mul[:, :, None], np.arange(n)[None, None, :]]
    right = mul[np.arange(n)[:, None, None], mul[None, :, :]]
    bad = np.argwhere(left != right)
    if bad.size:
        a, b, c = (int(x) for x in bad[0])
        raise GroupAxiomError("associativity fails", (a, b, c))


def from_table(mul, names=None, label: str = "G") -> GroupTable:
    """Validate an explicit table and move the identity to index 0."""
    mul = np.asarray(mul, dtype=np.int64)
    _check_axioms(mul)
    n = mul.shape[0]
    e = next(i for i in range(n) if np.array_equal(mul[i], np.arange(n)))
    names = list(names) if names is not None else [str(i) for i in range(n)]
    if len(names) != n:
        raise GroupAxiomError("names list has the wrong length")
    if e != 0:
        perm = list(range(n))
        perm[0], perm[e] = perm[e], perm[0]  # old index of new element i
        where = np.argsort(perm)
        mul = where[mul[np.ix_(perm, perm)]]
        names = [names[i] for i in perm]
    return GroupTable(mul, tuple(names), label)


def cyclic(n: int) -> GroupTable:
    if n < 1:
        raise ValueError("cyclic(n) needs n >= 1")
    idx = np.arange(n)
    names = ["1"] + ["a" if k == 1 else f"a^{k}" for k in range(1, n)]
    return GroupTable((idx[:, None] + idx[None, :]) % n, tuple(names), f"Z/{n}")


def dihedral(n: int) -> GroupTable:
    """Symmetries of the n-gon, order 2n; index j*n + i stands for r^i s^j."""
    if n < 1:
        raise ValueError("dihedral(n) needs n >= 1")
    size = 2 * n
    mul = np.zeros((size, size), dtype=np.int64)
    for x in range(size):
        a, b = x % n, x // n
        for y in range(size):
            c, d = y % n, y // n
            i = (a + (c if b == 0 else -c)) % n
            mul[x, y] = ((b + d) % 2) * n + i
    names = []
    for x in range(size):
        i, j = x % n, x // n
        r = "" if i == 0 else ("r" if i == 1 else f"r^{i}")
        s = "s" if j else ""
        names.append((r + s) or "1")
    return GroupTable(mul, tuple(names), f"D_{n}")


def symmetric(n: int) -> GroupTable:
    """Permutations of range(n) in lexicographic order; (st)(i) = s(t(i))."""
    perms = list(itertools.permutations(range(n)))
    where = {p: k for k, p in enumerate(perms)}
    size = len(perms)
    mul = np.zeros((size, size), dtype=np.int64)
    for x, s in enumerate(perms):
        for y, t in enumerate(perms):
            mul[x, y] = where[tuple(s[t[i]] for i in range(n))]
    names = ["".join(str(v) for v in p) for p in perms]
    names[0] = "1"
    return GroupTable(mul, tuple(names), f"S_{n}")


def direct_product(g: GroupTable, h: GroupTable) -> GroupTable:
    """Pairs (a, b) at index a*|H| + b."""
    ng, nh = g.order, h.order
    a = np.arange(ng * nh) // nh
    b = np.arange(ng * nh) % nh
    mul = g.mul[a[:, None], a[None, :]] * nh + h.mul[b[:, None], b[None, :]]
    names = tuple(
        "1" if (x == 0 and y == 0) else f"({g.names[x]},{h.names[y]})"
        for x in range(ng)
        for y in range(nh)
    )
    return GroupTable(mul, names, f"{g.label}x{h.label}")


_FAMILY = re.compile(r"^\s*(cyclic|dihedral|symmetric|Z/|C|D_?|S_?)\s*\(?\s*(\d+)\s*\)?\s*$", re.I)


def _parse_family(text: str) -> GroupTable:
    m = _FAMILY.match(text)
    if not m:
        raise ValueError(f"unrecognised group name {text!r}")
    kind, n = m.group(1).lower(), int(m.group(2))
    if kind in ("cyclic", "z/", "c"):
        return cyclic(n)
    if kind.startswith("d"):
        return dihedral(n)
    return symmetric(n)


def build_group(spec) -> GroupTable:
    """A named family (``"cyclic(3)"``, ``"Z/2xZ/2"``, ``"symmetric(3)"``) or a JSON table."""
    if isinstance(spec, GroupTable):
        return spec
    if isinstance(spec, dict):
        if "mul" not in spec:
            if "name" in spec:
                return build_group(spec["name"])
            raise ValueError("group JSON needs a 'mul' table or a 'name'")
        g = from_table(spec["mul"], spec.get("names"), spec.get("label", "G"))
        if "order" in spec and int(spec["order"]) != g.order:
            raise GroupAxiomError(f"declared order {spec['order']} but table has {g.order} rows")
        return g
    text = str(spec).strip()
    parts = [p for p in re.split(r"\s*(?:\*|×|\bx\b|(?<=[\d)])x(?=[A-Za-z]))\s*", text) if p]
    group = _parse_family(parts[0])
    for p in parts[1:]:
        group = direct_product(group, _parse_family(p))
    return group


@dataclass(frozen=True, eq=False)
class Subgroup:
    parent: GroupTable
    members: tuple[int, ...]

    def __post_init__(self):
        members = tuple(sorted(set(int(x) for x in self.members)))
        object.__setattr__(self, "members", members)
        g = self.parent
        s = set(members)
        if 0 not in s:
            raise GroupAxiomError("subgroup must contain the identity")
        for a in members:
            if g.inverse(a) not in s:
                raise GroupAxiomError("subgroup not closed under inverses", (a,))
            for b in members:
                if int(g.mul[a, b]) not in s:
                    raise GroupAxiomError("subgroup not closed under multiplication", (a, b))

    @property
    def order(self) -> int:
        return len(self.members)

    def __contains__(self, x) -> bool:
        return int(x) in set(self.members)

    @classmethod
    def generated_by(cls, parent: GroupTable, gens) -> Subgroup:
        members = {0}
        frontier = [0]
        gens = list(gens)
        while frontier:
            x = frontier.pop()
            for s in gens:
                y = int(parent.mul[x, s])
                if y not in members:
                    members.add(y)
                    frontier.append(y)
        return cls(parent, tuple(members))


@dataclass(frozen=True, eq=False)
class Transversal:
    subgroup: Subgroup
    reps: tuple[int, ...]
    bar_table: np.ndarray
    eta_table: np.ndarray

    @property
    def group(self) -> GroupTable:
        return self.subgroup.parent


def left_transversal(h: Subgroup, choice: int = 0) -> Transversal:
    """Left coset representatives of ``h``; reps[0] is the identity.

    Each coset xH is represented by its smallest-index element.  With
    ``choice = k`` the k-th smallest element (mod |H|) is used instead for
    every coset other than H itself, which gives an alternative transversal.
    """
    g = h.parent
    n = g.order
    seen = np.full(n, -1, dtype=np.int64)
    cosets = []
    for x in range(n):
        if seen[x] >= 0:
            continue
        coset = sorted(int(g.mul[x, y]) for y in h.members)
        for y in coset:
            seen[y] = len(cosets)
        cosets.append(coset)
    reps = []
    for k, coset in enumerate(cosets):
        reps.append(0 if k == 0 else coset[choice % len(coset)])
    bar_table = np.array([reps[seen[x]] for x in range(n)], dtype=np.int64)
    eta_table = np.array([g.mul[g.inv[x], bar_table[x]] for x in range(n)], dtype=np.int64)
    bar_table.setflags(write=False)
    eta_table.setflags(write=False)
    return Transversal(h, tuple(reps), bar_table, eta_table)


def bar(x: int, t: Transversal) -> int:
    """The representative r in t with r^{-1} x in H."""
    return int(t.bar_table[x])


def eta(x: int, t: Transversal) -> int:
    """x^{-1} bar(x), an element of H."""
    return int(t.eta_table[x])

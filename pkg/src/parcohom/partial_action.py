"""Unital partial actions on finite products of blocks.

A block is the truncated polynomial algebra K[x]/(x^d): commutative, unital
and indecomposable, with basis 1, x, ..., x^{d-1}.  For d = 1 it is just K.
A partial action is given by block subsets S_g (so D_g = 1_g A with 1_g the
indicator of S_g) and, for every block of S_{g^-1}, a target block in S_g
together with a unital algebra isomorphism between them.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from .field_linalg import Field, parse_field, rank
from .finite_group import (
    GroupTable,
    Subgroup,
    Transversal,
    build_group,
    left_transversal,
)

__all__ = [
    "BlockAlgebra",
    "PartialActionSpec",
    "ActionCertificate",
    "Orbit",
    "validate",
    "restrict_global",
    "subaction",
    "global_action",
    "regular_action",
    "coset_action",
    "trivial_partial",
    "action_from_json",
    "induced_module_action",
    "orbit_data",
    "theta",
    "theta_matrix",
    "eta_n",
    "tau",
    "sigma",
    "tau_sigma",
]


@dataclass(frozen=True)
class BlockAlgebra:
    block_dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.block_dims)
        if any(d < 1 for d in dims):
            raise ValueError("block dimensions must be positive")
        object.__setattr__(self, "block_dims", dims)

    @property
    def n_blocks(self) -> int:
        return len(self.block_dims)

    @cached_property
    def offsets(self) -> tuple[int, ...]:
        out, acc = [], 0
        for d in self.block_dims:
            out.append(acc)
            acc += d
        return tuple(out)

    @property
    def total_dim(self) -> int:
        return sum(self.block_dims)

    def block_slice(self, b: int) -> slice:
        o = self.offsets[b]
        return slice(o, o + self.block_dims[b])

    @cached_property
    def coord_block(self) -> np.ndarray:
        return np.repeat(np.arange(self.n_blocks), self.block_dims)

    def indicator(self, field: Field, blocks) -> np.ndarray:
        """The central idempotent 1_S: the unit of every block in S."""
        v = field.zeros(self.total_dim)
        for b in blocks:
            v[self.offsets[b]] = field.scalar(1)
        return v

    def mask(self, blocks) -> np.ndarray:
        """0/1 integer vector over coordinates; multiplying by it is multiplying by 1_S."""
        m = np.zeros(self.total_dim, dtype=np.int64)
        for b in blocks:
            m[self.block_slice(b)] = 1
        return m

    def unit(self, field: Field) -> np.ndarray:
        return self.indicator(field, range(self.n_blocks))

    def multiply(self, field: Field, a, b) -> np.ndarray:
        """Blockwise truncated-polynomial product; coordinates on the last axis."""
        a = np.asarray(a)
        b = np.asarray(b)
        shape = np.broadcast_shapes(a.shape, b.shape)
        out = field.zeros(shape)
        for blk, d in enumerate(self.block_dims):
            o = self.offsets[blk]
            for i in range(d):
                out[..., o + i:o + d] = out[..., o + i:o + d] + a[..., o + i, None] * b[..., o:o + d - i]
        return field.reduce(out)

    def is_unit(self, field: Field, a) -> bool:
        """Units of K[x]/(x^d) are exactly the elements with nonzero constant term."""
        return all(a[o] != 0 for o in self.offsets)


@dataclass(frozen=True, eq=False)
class PartialActionSpec:
    group: GroupTable
    field: Field
    algebra: BlockAlgebra
    domains: tuple[frozenset, ...]
    maps: tuple[dict, ...]  # maps[g][src] = (target, matrix)
    label: str = "action"

    @property
    def dim(self) -> int:
        return self.algebra.total_dim

    def target(self, g: int, block: int):
        hit = self.maps[g].get(block)
        return None if hit is None else hit[0]

    @cached_property
    def pi(self) -> np.ndarray:
        """pi[g] is the matrix of a -> alpha_g(1_{g^-1} a), i.e. of [g] on A."""
        F, alg = self.field, self.algebra
        out = F.zeros((self.group.order, alg.total_dim, alg.total_dim))
        for g in self.group.elements:
            for src, (tgt, mat) in self.maps[g].items():
                out[g, alg.block_slice(tgt), alg.block_slice(src)] = mat
        out.setflags(write=False)
        return out

    @cached_property
    def one(self) -> np.ndarray:
        """one[g] is the 0/1 coordinate mask of 1_g."""
        out = np.stack([self.algebra.mask(self.domains[g]) for g in self.group.elements])
        out.setflags(write=False)
        return out

    def is_global(self) -> bool:
        full = frozenset(range(self.algebra.n_blocks))
        return all(d == full for d in self.domains)

    def to_json(self) -> dict:
        F = self.field
        return {
            "label": self.label,
            "group": self.group.to_json(),
            "field": "rational" if F.name == "QQ" else F.p,
            "blocks": [{"dim": d} for d in self.algebra.block_dims],
            "domains": {str(g): sorted(self.domains[g]) for g in self.group.elements},
            "maps": {
                str(g): {
                    str(src): {"target": tgt, "matrix": [[F.encode(x) for x in row] for row in mat]}
                    for src, (tgt, mat) in sorted(self.maps[g].items())
                }
                for g in self.group.elements
            },
        }


def _make_spec(group, field, dims, domains, maps, label="action") -> PartialActionSpec:
    alg = BlockAlgebra(tuple(dims))
    doms = tuple(frozenset(int(b) for b in domains[g]) for g in group.elements)
    clean = []
    for g in group.elements:
        entry = {}
        for src, (tgt, mat) in maps[g].items():
            src, tgt = int(src), int(tgt)
            mat = field.array(mat)
            if mat.shape != (alg.block_dims[tgt], alg.block_dims[src]):
                raise ValueError(
                    f"map for g={g}, block {src}->{tgt} has shape {mat.shape}, "
                    f"expected {(alg.block_dims[tgt], alg.block_dims[src])}"
                )
            mat.setflags(write=False)
            entry[src] = (tgt, mat)
        clean.append(entry)
    return PartialActionSpec(group, field, alg, doms, tuple(clean), label)


# ---------------------------------------------------------------------------
# validation


@dataclass
class ActionCertificate:
    passed: bool
    checks: dict = dc_field(default_factory=dict)
    failure: dict | None = None

    def to_json(self) -> dict:
        return {"passed": self.passed, "checks": self.checks, "failure": self.failure}


def _is_algebra_map(field: Field, mat, d: int) -> bool:
    unit = field.zeros(d)
    unit[0] = field.scalar(1)
    if not field.equal(field.reduce(field.matmul(mat, unit)), unit):
        return False
    alg = BlockAlgebra((d,))
    eye = field.eye(d)
    for i in range(d):
        for j in range(d):
            prod = alg.multiply(field, eye[i], eye[j])
            lhs = field.reduce(field.matmul(mat, prod))
            rhs = alg.multiply(field, field.matmul(mat, eye[i]), field.matmul(mat, eye[j]))
            if not field.equal(lhs, rhs):
                return False
    return True


def validate(spec: PartialActionSpec) -> ActionCertificate:
    """Check the partial action axioms exhaustively; stop at the first failure."""
    G, F, alg = spec.group, spec.field, spec.algebra
    nb = alg.n_blocks
    full = frozenset(range(nb))
    checks: dict[str, bool] = {}

    def fail(name, **witness):
        checks[name] = False
        return ActionCertificate(False, checks, {"check": name, **witness})

    if spec.domains[0] != full:
        return fail("identity_domain", g=0)
    for b in range(nb):
        tgt, mat = spec.maps[0].get(b, (None, None))
        if tgt != b or not F.equal(mat, F.eye(alg.block_dims[b])):
            return fail("identity_map", g=0, block=b)
    checks["identity"] = True

    for g in G.elements:
        gi = G.inverse(g)
        if set(spec.maps[g]) != set(spec.domains[gi]):
            return fail("map_domain", g=g)
        targets = [t for t, _ in spec.maps[g].values()]
        if sorted(targets) != sorted(spec.domains[g]) or len(set(targets)) != len(targets):
            return fail("map_bijective", g=g)
        for src, (tgt, mat) in spec.maps[g].items():
            d = alg.block_dims[src]
            if alg.block_dims[tgt] != d or rank(F, mat) != d:
                return fail("block_isomorphism", g=g, block=src)
            if not _is_algebra_map(F, mat, d):
                return fail("algebra_homomorphism", g=g, block=src)
    checks["maps_are_block_isomorphisms"] = True

    for g in G.elements:
        for h in G.elements:
            gh = int(G.mul[g, h])
            for b in range(nb):
                hb = spec.maps[h].get(b)
                if hb is None or hb[0] not in spec.domains[G.inverse(g)]:
                    continue
                gb = spec.maps[g][hb[0]]
                ghb = spec.maps[gh].get(b)
                if ghb is None:
                    return fail("composition_domain", g=g, h=h, block=b)
                if ghb[0] != gb[0] or not F.equal(F.reduce(F.matmul(gb[1], hb[1])), ghb[1]):
                    return fail("composition", g=g, h=h, block=b)
            # alpha_g(S_{g^-1} ∩ S_h) = S_g ∩ S_gh
            img = {spec.maps[g][b][0] for b in spec.domains[G.inverse(g)] & spec.domains[h]}
            if img != set(spec.domains[g] & spec.domains[gh]):
                return fail("domain_compatibility", g=g, h=h)
    checks["composition"] = True
    checks["domain_compatibility"] = True
    return ActionCertificate(True, checks, None)


def induced_module_action(spec: PartialActionSpec, s, a) -> np.ndarray:
    """s . a for s an ExelElement (or a group index g meaning [g]) acting on a in A."""
    from .exel import ExelElement

    F = spec.field
    a = np.asarray(a)
    if isinstance(s, (int, np.integer)):
        return F.reduce(F.matmul(spec.pi[int(s)], a))
    if not isinstance(s, ExelElement):
        raise TypeError("expected a group index or an ExelElement")
    out = F.reduce(F.matmul(spec.pi[s.tail], a))
    G = spec.group
    for h in s.idempotents:
        # e_h = [h][h^-1] acts as multiplication by 1_h
        out = F.reduce(F.matmul(spec.pi[h], F.matmul(spec.pi[G.inverse(h)], out)))
    return out


# ---------------------------------------------------------------------------
# constructors


def global_action(group, field, block_dims, perm, matrices=None, label="global") -> PartialActionSpec:
    """perm[g][b] is the block that g sends b to; matrices[g][b] the block map (identity if omitted)."""
    nb = len(block_dims)
    domains = [range(nb)] * group.order
    maps = []
    for g in group.elements:
        entry = {}
        for b in range(nb):
            mat = field.eye(block_dims[b]) if matrices is None else matrices[g][b]
            entry[b] = (int(perm[g][b]), mat)
        maps.append(entry)
    return _make_spec(group, field, block_dims, domains, maps, label)


def regular_action(group, field, dim: int = 1, label=None) -> PartialActionSpec:
    """G permuting |G| copies of a block by left multiplication."""
    perm = [[int(group.mul[g, b]) for b in group.elements] for g in group.elements]
    return global_action(group, field, [dim] * group.order, perm, label=label or f"regular({group.label})")


def coset_action(group, subgroup_members, field, dim: int = 1, character=None, label=None) -> PartialActionSpec:
    """G on the left cosets of a subgroup; block i is the i-th coset in transversal order.

    ``character`` (a function G -> field scalar, multiplicative) twists the
    algebra maps x -> chi(g) x on every block, which needs dim >= 2 to matter.
    """
    h = Subgroup(group, tuple(subgroup_members))
    t = left_transversal(h)
    reps = list(t.reps)
    where = {r: i for i, r in enumerate(reps)}
    nb = len(reps)
    perm = [[where[int(t.bar_table[group.mul[g, r]])] for r in reps] for g in group.elements]
    mats = None
    if character is not None:
        mats = []
        for g in group.elements:
            c = field.scalar(character(g))
            m = field.zeros((dim, dim))
            for i in range(dim):
                m[i, i] = field.scalar(c**i)
            mats.append([m] * nb)
    return global_action(group, field, [dim] * nb, perm, mats, label or f"cosets({group.label})")


def trivial_partial(group, field, block_dims=(1,), label=None) -> PartialActionSpec:
    """S_g empty for every g != 1."""
    nb = len(block_dims)
    domains = [range(nb)] + [()] * (group.order - 1)
    maps = [{b: (b, field.eye(block_dims[b])) for b in range(nb)}] + [{} for _ in range(group.order - 1)]
    return _make_spec(group, field, block_dims, domains, maps, label or f"zero({group.label})")


def restrict_global(glob: PartialActionSpec, support, label=None) -> PartialActionSpec:
    """Restriction of a global action to the product of the ``support`` blocks."""
    if not glob.is_global():
        raise ValueError("restrict_global needs a global action")
    return subaction(glob, support, label=label or f"{glob.label}|{sorted(support)}")


def subaction(spec: PartialActionSpec, support, label=None) -> PartialActionSpec:
    """Restrict a (partial) action to a subset of blocks: S'_g = support ∩ alpha_g(support ∩ S_{g^-1})."""
    support = sorted(set(int(b) for b in support))
    new = {b: i for i, b in enumerate(support)}
    G = spec.group
    dims = [spec.algebra.block_dims[b] for b in support]
    domains, maps = [], []
    for g in G.elements:
        entry = {}
        for src, (tgt, mat) in spec.maps[g].items():
            if src in new and tgt in new:
                entry[new[src]] = (new[tgt], mat)
        maps.append(entry)
        domains.append(sorted(t for t, _ in entry.values()))
    return _make_spec(G, spec.field, dims, domains, maps, label or f"{spec.label}|{support}")


def action_from_json(data: dict, field=None) -> PartialActionSpec:
    """Parse the action JSON format; ``field`` overrides the file's field entry."""
    if "group" not in data:
        raise ValueError("action JSON needs a 'group' entry")
    group = build_group(data["group"])
    F = parse_field(field if field is not None else data.get("field", "rational"))
    blocks = data.get("blocks")
    if not blocks:
        raise ValueError("action JSON needs a non-empty 'blocks' list")
    dims = [int(b["dim"]) if isinstance(b, dict) else int(b) for b in blocks]
    nb = len(dims)
    raw_dom = data.get("domains", {})
    raw_maps = data.get("maps", {})
    domains, maps = [], []
    for g in group.elements:
        key = str(g)
        if g == 0:
            domains.append(raw_dom.get(key, list(range(nb))))
        else:
            if key not in raw_dom:
                raise ValueError(f"missing domain for group element {g}")
            domains.append(raw_dom[key])
        entry = {}
        for src, val in raw_maps.get(key, {}).items():
            if isinstance(val, dict):
                entry[int(src)] = (int(val["target"]), val["matrix"])
            else:
                raise ValueError(
                    f"map for g={g}, block {src} must be {{'target': t, 'matrix': M}}"
                )
        if g == 0 and not entry:
            entry = {b: (b, F.eye(dims[b])) for b in range(nb)}
        maps.append(entry)
    return _make_spec(group, F, dims, domains, maps, data.get("label", "action"))


# ---------------------------------------------------------------------------
# orbits, stabilizers and the maps theta, eta, tau, sigma


@dataclass(frozen=True, eq=False)
class Orbit:
    blocks: tuple[int, ...]
    base: int
    stabilizer: Subgroup
    transversal: Transversal
    Lambda: tuple[int, ...]
    block_of: dict  # g in Lambda -> block alpha_g(base)

    @property
    def reps(self) -> tuple[int, ...]:
        return self.transversal.reps


def _orbit_partition(spec: PartialActionSpec) -> list[list[int]]:
    nb = spec.algebra.n_blocks
    parent = list(range(nb))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for g in spec.group.elements:
        for src, (tgt, _) in spec.maps[g].items():
            a, b = find(src), find(tgt)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for b in range(nb):
        groups.setdefault(find(b), []).append(b)
    return [sorted(v) for _, v in sorted(groups.items())]


def orbit_data(spec: PartialActionSpec, choice: int = 0) -> list[Orbit]:
    """Orbits with base block (lowest index), stabilizer, transversal and Lambda.

    ``choice`` selects an alternative transversal (see left_transversal).
    """
    G = spec.group
    out = []
    for blocks in _orbit_partition(spec):
        base = blocks[0]
        members = [x for x in G.elements if spec.target(x, base) == base]
        H = Subgroup(G, tuple(members))
        t = left_transversal(H, choice)
        lam = tuple(g for g in t.reps if base in spec.domains[G.inverse(g)])
        block_of = {g: spec.target(g, base) for g in lam}
        if sorted(block_of.values()) != list(blocks):
            raise RuntimeError(
                f"orbit {blocks}: Lambda {lam} does not enumerate the blocks ({block_of})"
            )
        out.append(Orbit(tuple(blocks), base, H, t, lam, block_of))
    return out


def theta_matrix(spec: PartialActionSpec, orbit: Orbit, g: int) -> np.ndarray:
    """Matrix of theta_g = alpha_g o pr_base, landing in block alpha_g(base)."""
    if g not in orbit.block_of:
        raise ValueError(f"{g} is not in Lambda for the orbit based at block {orbit.base}")
    F, alg = spec.field, spec.algebra
    m = F.zeros((alg.total_dim, alg.total_dim))
    tgt, mat = spec.maps[g][orbit.base]
    m[alg.block_slice(tgt), alg.block_slice(orbit.base)] = mat
    return m


def theta(spec: PartialActionSpec, orbit: Orbit, g: int, a) -> np.ndarray:
    F = spec.field
    return F.reduce(F.matmul(theta_matrix(spec, orbit, g), np.asarray(a)))


# The following work on numpy arrays so they can be applied to all tuples at
# once: ``xs`` has shape (T, m) (one tuple per row) and ``g`` is a scalar or a
# length-T array of transversal elements.


def _walk(t: Transversal, g, xs):
    """Yield (eta_k, y_k) for k = 1..m where y_k = bar(x_k^-1 ... x_1^-1 g)."""
    G = t.group
    y = np.broadcast_to(np.asarray(g, dtype=np.int64), (xs.shape[0],))
    y = t.bar_table[y]
    for k in range(xs.shape[1]):
        z = G.mul[G.inv[xs[:, k]], y]
        yield t.eta_table[z], t.bar_table[z]
        y = t.bar_table[z]


def eta_n(t: Transversal, g, xs) -> np.ndarray:
    """eta_n^g(x_1..x_n) = eta(x_n^-1 bar(x_{n-1}^-1 ... x_1^-1 g)), per row."""
    xs = np.asarray(xs, dtype=np.int64)
    last = None
    for e, _ in _walk(t, g, xs):
        last = e
    if last is None:
        raise ValueError("eta_n needs n >= 1")
    return last


def tau(t: Transversal, g, xs) -> tuple[np.ndarray, np.ndarray]:
    """(tau_n^g(xs), bar(x_n^-1 ... x_1^-1 g)) per row."""
    xs = np.asarray(xs, dtype=np.int64)
    cols = []
    y = t.bar_table[np.broadcast_to(np.asarray(g, dtype=np.int64), (xs.shape[0],))]
    for e, yk in _walk(t, g, xs):
        cols.append(e)
        y = yk
    taus = np.stack(cols, axis=1) if cols else np.zeros((xs.shape[0], 0), dtype=np.int64)
    return taus, y


def sigma(t: Transversal, g, i: int, xs) -> np.ndarray:
    """sigma_{m,i}^g(xs) for xs of shape (T, m), 0 <= i <= m; returns shape (T, m+1)."""
    xs = np.asarray(xs, dtype=np.int64)
    T, m = xs.shape
    if not 0 <= i <= m:
        raise ValueError(f"sigma index {i} out of range for m = {m}")
    G = t.group
    gg = np.broadcast_to(np.asarray(g, dtype=np.int64), (T,))
    if i == 0:
        return np.concatenate([G.inv[gg][:, None], xs], axis=1)
    taus, y = tau(t, gg, xs[:, :i])
    return np.concatenate([taus, G.inv[y][:, None], xs[:, i:]], axis=1)


def tau_sigma(orbit: Orbit, g: int, n: int, xs, i: int | None = None, kind: str = "tau"):
    """Scalar front end: eta_n^g, tau_n^g or sigma_{n,i}^g of a single tuple."""
    xs = tuple(int(x) for x in xs)
    if len(xs) != n:
        raise ValueError(f"expected an {n}-tuple, got {xs}")
    t = orbit.transversal
    arr = np.array([xs], dtype=np.int64).reshape(1, n)
    if kind == "eta":
        return int(eta_n(t, g, arr)[0])
    if kind == "tau":
        return tuple(int(v) for v in tau(t, g, arr)[0][0])
    if kind == "sigma":
        if i is None:
            raise ValueError("sigma needs an index i")
        if n == 0:
            if i != 0:
                raise ValueError("sigma_{0,i} only exists for i = 0")
            return (t.group.inverse(g),)
        return tuple(int(v) for v in sigma(t, g, i, arr)[0])
    raise ValueError(f"unknown kind {kind!r}")

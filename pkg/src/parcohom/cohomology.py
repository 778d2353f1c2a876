"""Partial cochain complexes of K_par G-modules and the classical bar complex.

A K_par G-module is given by the matrices of the generators [g]; any element
of S(G) acts through the normal form e_{h1}...e_{hk}[g] with e_h = [h][h^-1].

Cochains are arrays of shape (|G|^n, dim M): row t holds f(t) for the t-th
tuple in lexicographic order.  Internally many cochains are processed at once
as arrays of shape (|G|^n, dim M, k).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np

from . import tuples
from .exel import ExelElement, ExelSemigroup
from .field_linalg import (
    ComplexError,
    Field,
    Subspace,
    complement,
    image,
    kernel,
    quotient_dim,
    rank,
    span,
)
from .finite_group import GroupTable

__all__ = [
    "GuardError",
    "KParModule",
    "Cochain",
    "CochainSpace",
    "PartialComplex",
    "CohomologyReport",
    "coboundary_apply",
    "cochain_basis",
    "coboundary_matrix",
    "cohomology",
    "ClassicalComplex",
    "classical_cohomology",
    "derivation_spaces",
    "h0_comparison",
    "DEFAULT_GUARD",
    "MAX_DEGREE",
]

DEFAULT_GUARD = 100_000
MAX_DEGREE = 4


class GuardError(ValueError):
    pass


def check_guard(order: int, n: int, dim: int, guard: int = DEFAULT_GUARD, max_degree: int = MAX_DEGREE):
    if n < 0:
        raise ValueError("degree must be non-negative")
    if n > max_degree:
        raise GuardError(f"degree {n} exceeds the limit {max_degree}; lower n or raise --max-degree")
    size = order ** (n + 1) * dim
    if size > guard:
        raise GuardError(
            f"|G|^{n + 1} * dim M = {size} exceeds the guard {guard}; "
            "lower n, use a smaller group, or raise --guard-dim"
        )


@dataclass(frozen=True, eq=False)
class KParModule:
    group: GroupTable
    field: Field
    gen: np.ndarray  # gen[g] is the matrix of [g]
    label: str = "M"

    def __post_init__(self):
        gen = self.field.array(self.gen)
        n = self.group.order
        if gen.ndim != 3 or gen.shape[0] != n or gen.shape[1] != gen.shape[2]:
            raise ValueError(f"generator array must have shape ({n}, d, d), got {gen.shape}")
        gen.setflags(write=False)
        object.__setattr__(self, "gen", gen)

    @property
    def dim(self) -> int:
        return self.gen.shape[1]

    @cached_property
    def e(self) -> np.ndarray:
        """e[g] is the matrix of e_g = [g][g^-1]."""
        F, G = self.field, self.group
        out = F.reduce(F.matmul(self.gen, self.gen[G.inv]))
        out.setflags(write=False)
        return out

    def act(self, s: ExelElement) -> np.ndarray:
        F = self.field
        m = self.gen[s.tail]
        for h in s.idempotents:
            m = F.reduce(F.matmul(self.e[h], m))
        return m

    def act_all(self, semigroup: ExelSemigroup) -> np.ndarray:
        return np.stack([self.act(s) for s in semigroup.elements])

    def idempotent(self, hs) -> np.ndarray:
        """Matrix of the product of e_h over h in hs."""
        F = self.field
        m = F.eye(self.dim)
        for h in sorted(set(int(x) for x in hs)):
            if h:
                m = F.reduce(F.matmul(self.e[h], m))
        return m

    def certify(self) -> dict:
        """The partial-representation relations, as matrix identities on all pairs."""
        F, G = self.field, self.group
        gen = self.gen
        checks = {"unit": F.equal(gen[0], F.eye(self.dim)), "left": True, "right": True}
        for g in G.elements:
            gi = G.inverse(g)
            left_base = F.reduce(F.matmul(gen[gi], gen[g]))
            for h in G.elements:
                gh = int(G.mul[g, h])
                hi = G.inverse(h)
                if checks["left"]:
                    lhs = F.reduce(F.matmul(left_base, gen[h]))
                    rhs = F.reduce(F.matmul(gen[gi], gen[gh]))
                    if not F.equal(lhs, rhs):
                        checks["left"] = False
                        checks["left_witness"] = [g, h]
                if checks["right"]:
                    lhs = F.reduce(F.matmul(F.reduce(F.matmul(gen[g], gen[h])), gen[hi]))
                    rhs = F.reduce(F.matmul(gen[gh], gen[hi]))
                    if not F.equal(lhs, rhs):
                        checks["right"] = False
                        checks["right_witness"] = [g, h]
        checks["passed"] = bool(checks["unit"] and checks["left"] and checks["right"])
        return checks

    def is_global(self) -> bool:
        """Every e_g acts as the identity, i.e. the module is a genuine G-module."""
        eye = self.field.eye(self.dim)
        return all(self.field.equal(self.e[g], eye) for g in self.group.elements)

    @classmethod
    def from_action(cls, spec) -> KParModule:
        """The induced module: [g] a = alpha_g(1_{g^-1} a)."""
        return cls(spec.group, spec.field, spec.pi, label=spec.label)

    @classmethod
    def from_idempotents(cls, group: GroupTable, field: Field) -> KParModule:
        """B = K E(S(G)) with s . e = s e s^-1."""
        S = ExelSemigroup(group)
        idem = S.idempotent_indices
        where = {i: k for k, i in enumerate(idem)}
        gen = field.zeros((group.order, len(idem), len(idem)))
        for g in group.elements:
            s = S.gen(g)
            for k, i in enumerate(idem):
                img = S.conj_act(s, S.elements[i])
                gen[g, where[S.index(img)], k] = field.scalar(1)
        return cls(group, field, gen, label=f"KE(S({group.label}))")

    @classmethod
    def from_matrices(cls, group: GroupTable, field: Field, mats, label="M") -> KParModule:
        return cls(group, field, field.array(mats), label=label)


@dataclass(frozen=True, eq=False)
class Cochain:
    n: int
    values: np.ndarray  # shape (|G|^n, d)
    field: Field
    order: int

    def to_json(self, sparse: bool = True) -> dict:
        digs = tuples.digits(self.order, self.n)
        entries = {}
        for t in range(digs.shape[0]):
            row = self.values[t]
            if sparse and not np.any(row != 0):
                continue
            entries[tuples.key(digs[t])] = self.field.encode_array(row)
        return {"n": self.n, "entries": entries}

    @classmethod
    def from_json(cls, data: dict, order: int, dim: int, field: Field) -> Cochain:
        n = int(data["n"])
        values = field.zeros((order**n, dim))
        for k, row in data.get("entries", {}).items():
            tup = tuples.parse_key(k)
            if len(tup) != n or any(not 0 <= x < order for x in tup):
                raise ValueError(f"bad tuple key {k!r} for degree {n}")
            row = field.array(row)
            if row.shape != (dim,):
                raise ValueError(f"entry {k!r} has {row.shape[0]} coordinates, expected {dim}")
            values[int(tuples.index(order, np.array(tup)))] = row
        return cls(n, values, field, order)

    def is_zero(self) -> bool:
        return not np.any(self.values != 0)


# ---------------------------------------------------------------------------
# the constrained cochain spaces C^n_par


class CochainSpace:
    """C^n_par(G, M) = {f : f(g_1..g_n) in e_{(g_1..g_n)} M} with a per-tuple basis."""

    def __init__(self, module: KParModule, n: int):
        self.module = module
        self.n = n
        G, F = module.group, module.field
        self.order = G.order
        self.digits = tuples.digits(G.order, n)
        self.T = self.digits.shape[0]
        pre = tuples.prefix_products(G, self.digits)
        masks = np.zeros(self.T, dtype=np.int64)
        for k in range(n):
            masks |= np.left_shift(1, pre[:, k])
        masks &= ~1
        self.masks = masks
        self.keys = sorted(set(int(m) for m in masks))
        self.idem: dict[int, np.ndarray] = {}
        self.basis: dict[int, Subspace] = {}
        for key in self.keys:
            hs = [h for h in range(G.order) if key >> h & 1]
            e = module.idempotent(hs)
            self.idem[key] = e
            self.basis[key] = image(F, e)
        self.ranks = np.array([self.basis[int(m)].dim for m in masks], dtype=np.int64)
        self.offsets = np.concatenate([[0], np.cumsum(self.ranks)]).astype(np.int64)
        self.dim = int(self.offsets[-1])
        self.groups = {key: np.flatnonzero(masks == key) for key in self.keys}

    def to_full(self, coords) -> np.ndarray:
        """(dim C, k) coordinates -> (T, d, k) values."""
        F = self.module.field
        coords = np.asarray(coords)
        k = coords.shape[1]
        out = F.zeros((self.T, self.module.dim, k))
        for key, idx in self.groups.items():
            b = self.basis[key]
            r = b.dim
            if r == 0 or idx.size == 0:
                continue
            pos = self.offsets[idx][:, None] + np.arange(r)[None, :]
            c = coords[pos]  # (m, r, k)
            out[idx] = F.matmul(b.basis.T, c)
        return F.reduce(out)

    def from_full(self, values) -> np.ndarray:
        """(T, d, k) values -> (dim C, k) coordinates (reads pivot entries; no membership check)."""
        F = self.module.field
        values = np.asarray(values)
        k = values.shape[2]
        out = F.zeros((self.dim, k))
        for key, idx in self.groups.items():
            b = self.basis[key]
            if b.dim == 0 or idx.size == 0:
                continue
            pos = self.offsets[idx][:, None] + np.arange(b.dim)[None, :]
            out[pos] = values[idx][:, list(b.pivots), :]
        return out

    def contains(self, values) -> np.ndarray:
        """Per-tuple test f(t) = e_t f(t), for a (T, d, k) array; returns (T,) booleans."""
        F = self.module.field
        values = np.asarray(values)
        ok = np.ones(self.T, dtype=bool)
        for key, idx in self.groups.items():
            v = values[idx]
            proj = F.reduce(F.matmul(self.idem[key], v))
            ok[idx] = ~np.any(proj != v, axis=(1, 2))
        return ok

    def random(self, rng, k: int = 1) -> np.ndarray:
        F = self.module.field
        return self.to_full(F.random(rng, (self.dim, k)))


def coboundary_apply(module: KParModule, n: int, f) -> np.ndarray:
    """delta^n on a batch: f of shape (|G|^n, d, k) -> (|G|^(n+1), d, k).

    (delta f)(g_1..g_{n+1}) = [g_1] f(g_2..) + sum_i (-1)^i e_{g_1..g_i} f(.., g_i g_{i+1}, ..)
                               + (-1)^{n+1} e_{g_1..g_{n+1}} f(g_1..g_n)
    """
    G, F = module.group, module.field
    N = G.order
    f = np.asarray(f)
    Tn, d, k = f.shape
    if Tn != N**n or d != module.dim:
        raise ValueError(f"cochain of shape {f.shape} does not match degree {n}")
    digs = tuples.digits(N, n + 1)
    first = F.matmul(module.gen[:, None], f[None])  # (N, Tn, d, k)
    out = first.reshape(N * Tn, d, k)
    pre = tuples.prefix_products(G, digs)
    terms = []
    for i in range(1, n + 1):
        terms.append(((-1) ** i, tuples.index(N, tuples.glue(G, digs, i - 1)), pre[:, i - 1]))
    terms.append(((-1) ** (n + 1), tuples.index(N, digs[:, :n]), pre[:, n]))
    for sign, src, hs in terms:
        vals = f[src]
        for h in range(N):
            rows = np.flatnonzero(hs == h)
            if rows.size == 0:
                continue
            part = F.matmul(module.e[h], vals[rows])
            out[rows] = out[rows] + part if sign > 0 else out[rows] - part
    return F.reduce(out)


def cochain_basis(module: KParModule, n: int) -> CochainSpace:
    return CochainSpace(module, n)


class PartialComplex:
    """delta^n in constrained coordinates, with cached kernels and images."""

    def __init__(self, module: KParModule, guard: int = DEFAULT_GUARD, max_degree: int = MAX_DEGREE):
        self.module = module
        self.guard = guard
        self.max_degree = max_degree
        self._spaces: dict[int, CochainSpace] = {}
        self._delta: dict[int, np.ndarray] = {}
        self._preserved: dict[int, bool] = {}
        self._Z: dict[int, Subspace] = {}
        self._B: dict[int, Subspace] = {}

    @property
    def field(self) -> Field:
        return self.module.field

    def space(self, n: int) -> CochainSpace:
        if n not in self._spaces:
            check_guard(self.module.group.order, max(n - 1, 0), self.module.dim, self.guard, self.max_degree + 1)
            self._spaces[n] = CochainSpace(self.module, n)
        return self._spaces[n]

    def delta(self, n: int) -> np.ndarray:
        """Matrix of delta^n : C^n_par -> C^{n+1}_par in basis coordinates."""
        if n not in self._delta:
            check_guard(self.module.group.order, n, self.module.dim, self.guard, self.max_degree)
            src, dst = self.space(n), self.space(n + 1)
            F = self.field
            full = coboundary_apply(self.module, n, src.to_full(F.eye(src.dim)))
            self._preserved[n] = bool(np.all(dst.contains(full)))
            self._delta[n] = dst.from_full(full)
        return self._delta[n]

    def preserves_constraint(self, n: int) -> bool:
        self.delta(n)
        return self._preserved[n]

    def Z(self, n: int) -> Subspace:
        if n not in self._Z:
            self._Z[n] = kernel(self.field, self.delta(n))
        return self._Z[n]

    def B(self, n: int) -> Subspace:
        if n not in self._B:
            dim = self.space(n).dim
            if n == 0:
                self._B[n] = span(self.field, self.field.zeros((0, dim)), dim)
            else:
                self._B[n] = image(self.field, self.delta(n - 1))
        return self._B[n]

    def cohomology(self, n: int, representatives: bool = True) -> CohomologyReport:
        Z, B = self.Z(n), self.B(n)
        try:
            dim_h = quotient_dim(Z, B)
        except ComplexError as exc:
            raise ComplexError(f"degree {n}: boundaries not inside cycles ({exc})") from None
        reps = []
        if representatives and dim_h:
            rows = complement(Z, B)
            full = self.space(n).to_full(rows.T)
            reps = [Cochain(n, full[:, :, j], self.field, self.module.group.order) for j in range(full.shape[2])]
        return CohomologyReport(
            degree=n,
            field=self.field.name,
            dim_C=self.space(n).dim,
            dim_Z=Z.dim,
            dim_B=B.dim,
            dim_H=dim_h,
            representatives=reps,
        )

    def cocycle_basis(self, n: int) -> np.ndarray:
        """Kernel basis of delta^n as a (T, d, k) batch of cochains."""
        Z = self.Z(n)
        return self.space(n).to_full(Z.basis.T if Z.dim else self.field.zeros((self.space(n).dim, 0)))

    def coboundary_basis(self, n: int) -> np.ndarray:
        B = self.B(n)
        return self.space(n).to_full(B.basis.T if B.dim else self.field.zeros((self.space(n).dim, 0)))

    def apply(self, n: int, f) -> np.ndarray:
        """delta^n on a (T, d) or (T, d, k) array."""
        f = np.asarray(f)
        if f.ndim == 2:
            return coboundary_apply(self.module, n, f[:, :, None])[:, :, 0]
        return coboundary_apply(self.module, n, f)

    def residual(self, n: int, f) -> np.ndarray:
        """delta^n f for a single (T, d) cochain."""
        f = np.asarray(f)
        return self.apply(n, f[:, :, None])[:, :, 0]

    def is_cocycle(self, n: int, f) -> bool:
        return not np.any(self.residual(n, f) != 0)

    def in_space(self, n: int, f) -> bool:
        f = np.asarray(f)
        return bool(np.all(self.space(n).contains(f[:, :, None])))

    def coboundary_preimage(self, n: int, f):
        """Some xi in C^{n-1}_par with delta xi = f, or None."""
        from .field_linalg import solve

        if n == 0:
            return None if np.any(np.asarray(f) != 0) else self.field.zeros((1, self.module.dim))
        sp = self.space(n)
        if not self.in_space(n, f):
            return None
        rhs = sp.from_full(np.asarray(f)[:, :, None])[:, 0]
        x = solve(self.field, self.delta(n - 1), rhs)
        if x is None:
            return None
        return self.space(n - 1).to_full(x[:, None])[:, :, 0]


@dataclass
class CohomologyReport:
    degree: int
    field: str
    dim_C: int
    dim_Z: int
    dim_B: int
    dim_H: int
    representatives: list = dc_field(default_factory=list)

    def __post_init__(self):
        if self.dim_H != self.dim_Z - self.dim_B or self.dim_H < 0:
            raise ComplexError("inconsistent cohomology dimensions")

    def to_json(self, with_representatives: bool = True) -> dict:
        out = {
            "degree": self.degree,
            "field": self.field,
            "dim_C": self.dim_C,
            "dim_Z": self.dim_Z,
            "dim_B": self.dim_B,
            "dim_H": self.dim_H,
        }
        if with_representatives:
            out["representatives"] = [r.to_json() for r in self.representatives]
        return out


def coboundary_matrix(module: KParModule, n: int) -> np.ndarray:
    return PartialComplex(module).delta(n)


def cohomology(module: KParModule, n: int, guard: int = DEFAULT_GUARD) -> CohomologyReport:
    return PartialComplex(module, guard).cohomology(n)


# ---------------------------------------------------------------------------
# the classical bar complex, assembled tuple by tuple


class ClassicalComplex:
    """Standard inhomogeneous cochains C^n(G, M) = Map(G^n, M) for a G-module M."""

    def __init__(self, group: GroupTable, field: Field, gen, guard: int = DEFAULT_GUARD, label: str = "M"):
        self.group = group
        self.field = field
        self.gen = field.array(gen)
        self.label = label
        self.guard = guard
        n, d = group.order, self.gen.shape[1]
        self.dim = d
        eye = field.eye(d)
        for g in group.elements:
            if rank(field, self.gen[g]) != d:
                raise ValueError(f"generator {g} is not invertible: not a G-module")
            for h in group.elements:
                lhs = field.reduce(field.matmul(self.gen[g], self.gen[h]))
                if not field.equal(lhs, self.gen[int(group.mul[g, h])]):
                    raise ValueError(f"[g][h] != [gh] at {(g, h)}: not a G-module")
        if not field.equal(self.gen[0], eye):
            raise ValueError("identity does not act trivially")
        self._delta: dict[int, np.ndarray] = {}
        self._Z: dict[int, Subspace] = {}
        self._B: dict[int, Subspace] = {}

    @classmethod
    def from_module(cls, module: KParModule, guard: int = DEFAULT_GUARD) -> ClassicalComplex:
        return cls(module.group, module.field, module.gen, guard, module.label)

    def cochain_dim(self, n: int) -> int:
        return self.group.order**n * self.dim

    def delta(self, n: int) -> np.ndarray:
        """Dense matrix of delta^n: rows indexed by (tuple, coordinate) of degree n+1."""
        if n in self._delta:
            return self._delta[n]
        check_guard(self.group.order, n, self.dim, self.guard)
        G, F, d = self.group, self.field, self.dim
        N = G.order
        eye = F.eye(d)
        neg = F.neg(eye)
        m = F.zeros((N ** (n + 1) * d, N**n * d))

        def idx(tup):
            out = 0
            for x in tup:
                out = out * N + x
            return out

        def add(r, c, block):
            m[r * d:(r + 1) * d, c * d:(c + 1) * d] = m[r * d:(r + 1) * d, c * d:(c + 1) * d] + block

        for r, tup in enumerate(itertools.product(range(N), repeat=n + 1)):
            add(r, idx(tup[1:]), self.gen[tup[0]])
            for i in range(1, n + 1):
                glued = tup[:i - 1] + (int(G.mul[tup[i - 1], tup[i]]),) + tup[i + 1:]
                add(r, idx(glued), eye if i % 2 == 0 else neg)
            add(r, idx(tup[:n]), eye if (n + 1) % 2 == 0 else neg)
        m = F.reduce(m)
        self._delta[n] = m
        return m

    def apply(self, n: int, f) -> np.ndarray:
        """delta^n on a (T, d) or (T, d, k) array."""
        F = self.field
        f = np.asarray(f)
        single = f.ndim == 2
        if single:
            f = f[:, :, None]
        T, d, k = f.shape
        out = F.reduce(F.matmul(self.delta(n), f.reshape(T * d, k))).reshape(T * self.group.order, d, k)
        return out[:, :, 0] if single else out

    def Z(self, n: int) -> Subspace:
        if n not in self._Z:
            self._Z[n] = kernel(self.field, self.delta(n))
        return self._Z[n]

    def B(self, n: int) -> Subspace:
        if n not in self._B:
            if n == 0:
                dim = self.cochain_dim(0)
                self._B[n] = span(self.field, self.field.zeros((0, dim)), dim)
            else:
                self._B[n] = image(self.field, self.delta(n - 1))
        return self._B[n]

    def dims(self, n: int) -> tuple[int, int, int]:
        """(dim Z, dim B, dim H) from ranks only."""
        F = self.field
        dz = self.cochain_dim(n) - rank(F, self.delta(n))
        db = 0 if n == 0 else rank(F, self.delta(n - 1))
        return dz, db, dz - db

    def cohomology(self, n: int, representatives: bool = True) -> CohomologyReport:
        if not representatives:
            dz, db, dh = self.dims(n)
            return CohomologyReport(n, self.field.name, self.cochain_dim(n), dz, db, dh, [])
        Z, B = self.Z(n), self.B(n)
        dh = quotient_dim(Z, B)
        reps = []
        if dh:
            rows = complement(Z, B)
            reps = [Cochain(n, r.reshape(-1, self.dim), self.field, self.group.order) for r in rows]
        return CohomologyReport(n, self.field.name, self.cochain_dim(n), Z.dim, B.dim, dh, reps)

    def coboundary_preimage(self, n: int, f):
        """Some xi with delta^{n-1} xi = f, or None."""
        from .field_linalg import solve

        f = np.asarray(f)
        if n == 0:
            return None if np.any(f != 0) else self.field.zeros((1, self.dim))
        x = solve(self.field, self.delta(n - 1), f.reshape(-1))
        return None if x is None else x.reshape(-1, self.dim)


def classical_cohomology(group: GroupTable, module_or_gen, n: int, field: Field | None = None) -> CohomologyReport:
    if isinstance(module_or_gen, KParModule):
        cx = ClassicalComplex.from_module(module_or_gen)
    else:
        cx = ClassicalComplex(group, field, module_or_gen)
    return cx.cohomology(n)


# ---------------------------------------------------------------------------
# derivations and the degree-0 comparison


def _kernel_dim_by_blocks(field: Field, blocks, cols: int) -> Subspace:
    """Kernel of the matrix whose rows are the concatenation of ``blocks``, reduced incrementally."""
    from .field_linalg import rref

    basis = field.zeros((0, cols))
    for blk in blocks:
        basis, _ = rref(field, np.concatenate([basis, blk], axis=0))
    return kernel(field, basis if basis.shape[0] else field.zeros((0, cols)))


def derivation_spaces(module: KParModule, complex_: PartialComplex | None = None) -> dict:
    """Dimensions of Der_par, PDer_par, D(G,M), PD(G,M) and their consistency checks."""
    G, F, d = module.group, module.field, module.dim
    S = ExelSemigroup(G)
    acts = module.act_all(S)
    nS = len(S)
    table, inv = S.table, S.inv_table
    eps = table[np.arange(nS), inv]
    eye = F.eye(d)

    # Der_par: unknowns delta(s) for every s; delta(st) = s.delta(t) + eps(st).delta(s)
    def der_blocks():
        for s in range(nS):
            blk = F.zeros((nS * d, nS * d))
            for t in range(nS):
                st = int(table[s, t])
                r = slice(t * d, (t + 1) * d)
                blk[r, st * d:(st + 1) * d] = blk[r, st * d:(st + 1) * d] + eye
                blk[r, t * d:(t + 1) * d] = blk[r, t * d:(t + 1) * d] - acts[s]
                blk[r, s * d:(s + 1) * d] = blk[r, s * d:(s + 1) * d] - acts[eps[st]]
            yield F.reduce(blk)

    der = _kernel_dim_by_blocks(F, der_blocks(), nS * d)

    # D(G,M): e_g d(gh) = [g] d(h) + e_gh d(g)
    N = G.order
    rows = F.zeros((N * N * d, N * d))
    for g in G.elements:
        for h in G.elements:
            gh = int(G.mul[g, h])
            r = slice((g * N + h) * d, (g * N + h + 1) * d)
            rows[r, gh * d:(gh + 1) * d] = rows[r, gh * d:(gh + 1) * d] + module.e[g]
            rows[r, h * d:(h + 1) * d] = rows[r, h * d:(h + 1) * d] - module.gen[g]
            rows[r, g * d:(g + 1) * d] = rows[r, g * d:(g + 1) * d] - module.e[gh]
    D = kernel(F, F.reduce(rows))

    pd_map = F.reduce(np.concatenate([module.gen[g] - module.e[g] for g in G.elements], axis=0))
    PD = image(F, pd_map)
    pder_map = F.reduce(np.concatenate([acts[s] - acts[eps[s]] for s in range(nS)], axis=0))
    PDer = image(F, pder_map)

    # restriction Der_par -> D : delta |-> (g |-> delta([g]))
    gen_idx = [S.index(S.gen(g)) for g in G.elements]
    cols = np.concatenate([np.arange(i * d, (i + 1) * d) for i in gen_idx])
    restricted = der.basis[:, cols] if der.dim else F.zeros((0, N * d))
    restriction_into_D = bool(np.all(D.contains_rows(restricted))) if der.dim else True
    restriction_rank = rank(F, restricted) if der.dim else 0
    # every d in D has d(1) = 0 and d(g) = e_g d(g)
    normal = True
    for vec in D.basis:
        vals = vec.reshape(N, d)
        if np.any(vals[0] != 0):
            normal = False
        for g in G.elements:
            if not F.equal(F.reduce(F.matmul(module.e[g], vals[g])), vals[g]):
                normal = False
    cx = complex_ or PartialComplex(module)
    h1 = cx.cohomology(1, representatives=False).dim_H
    out = {
        "dim_Der_par": der.dim,
        "dim_PDer_par": PDer.dim,
        "dim_D": D.dim,
        "dim_PD": PD.dim,
        "dim_H1_par": h1,
        "PD_inside_D": bool(np.all(D.contains_rows(PD.basis))) if PD.dim else True,
        "restriction_lands_in_D": restriction_into_D,
        "restriction_is_bijective": restriction_rank == D.dim == der.dim,
        "d_normalized": normal,
    }
    out["D_minus_PD_equals_H1"] = out["dim_D"] - out["dim_PD"] == h1
    out["Der_equals_D"] = out["dim_Der_par"] == out["dim_D"]
    out["Der_minus_PDer_equals_H1"] = out["dim_Der_par"] - out["dim_PDer_par"] == h1
    out["passed"] = all(v for k, v in out.items() if isinstance(v, bool))
    return out


def _enumerate_space(field: Field, basis: np.ndarray, limit: int):
    """Every element of the F_p-span of the rows of ``basis``."""
    p = field.p
    k = basis.shape[0]
    if p**k > limit:
        raise GuardError(f"{p}^{k} elements exceed the enumeration limit {limit}")
    for coeffs in itertools.product(range(p), repeat=k):
        if k == 0:
            yield field.zeros(basis.shape[1])
        else:
            yield field.reduce(np.array(coeffs, dtype=np.int64) @ basis)


def h0_comparison(spec, limit: int = 200_000) -> dict:
    """H^0_par(G,A) is a unital subalgebra and its units are exactly H^0(G,A).

    Only over prime fields, where the unit group is finite and enumerable.
    """
    F, G, alg = spec.field, spec.group, spec.algebra
    if F.name == "QQ":
        raise ValueError("unit enumeration needs a finite field")
    module = KParModule.from_action(spec)
    cx = PartialComplex(module)
    Z0 = cx.Z(0)
    one = alg.unit(F)
    contains_one = Z0.contains(one)
    closed = True
    for a in Z0.basis:
        for b in Z0.basis:
            if not Z0.contains(alg.multiply(F, a, b)):
                closed = False
    # alpha-form of the degree-0 condition
    def h0_condition(a):
        for g in G.elements:
            lhs = F.reduce(F.matmul(spec.pi[g], a))
            rhs = a * spec.one[g]
            if not F.equal(lhs, F.reduce(rhs)):
                return False
        return True

    units_par = []
    for a in _enumerate_space(F, Z0.basis, limit):
        if alg.is_unit(F, a):
            units_par.append(tuple(int(x) for x in a))
    units_dk = []
    for a in _enumerate_space(F, F.eye(alg.total_dim), limit):
        if alg.is_unit(F, a) and h0_condition(a):
            units_dk.append(tuple(int(x) for x in a))
    every_par_unit_ok = all(h0_condition(np.array(u, dtype=np.int64)) for u in units_par)
    out = {
        "dim_H0_par": Z0.dim,
        "contains_one": bool(contains_one),
        "closed_under_product": closed,
        "units_of_H0_par": len(units_par),
        "H0_dk": len(units_dk),
        "units_satisfy_condition": every_par_unit_ok,
        "sets_equal": sorted(units_par) == sorted(units_dk),
    }
    out["passed"] = all(v for v in out.values() if isinstance(v, bool))
    return out

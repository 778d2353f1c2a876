"""The projective resolution P_n -> B of B = K E(S(G)) by K_par G-modules.

P_n has K-basis the symbols s(g_1..g_n) with s^-1 s <= e_{(g_1..g_n)}; two
symbols are equal when their tuples agree and s e_{(g)} = t e_{(g)}, so the
canonical representative of s(g) is (s e_{(g)})(g).  P_0 has basis s( ) for
every s in S(G) and P_{-1} = B has basis the idempotents.

All boundary and homotopy matrices have integer entries (0, +-1 and their
sums), so they are stored as int64 and make sense over every field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import tuples
from .cohomology import CochainSpace, KParModule, coboundary_apply
from .exel import ExelSemigroup
from .finite_group import GroupTable

__all__ = ["ResolutionLevel", "Resolution", "build_resolution", "RESOLUTION_GUARD"]

RESOLUTION_GUARD = 20_000_000


def _imatmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Integer product through BLAS; exact because every entry stays far below 2^53."""
    return np.rint(a.astype(np.float64) @ b.astype(np.float64)).astype(np.int64)


@dataclass(frozen=True, eq=False)
class ResolutionLevel:
    """Level n: basis symbols as (semigroup index, tuple index) pairs.

    ``boundary`` is the matrix of d_n : P_n -> P_{n-1} (P_{-1} = B) and
    ``homotopy`` the matrix of sigma_{n-1} : P_{n-1} -> P_n.
    """

    n: int
    elems: np.ndarray
    tuple_index: np.ndarray
    boundary: np.ndarray
    homotopy: np.ndarray

    @property
    def size(self) -> int:
        return self.elems.shape[0]

    def symbols(self, semigroup: ExelSemigroup) -> list[str]:
        G = semigroup.group
        digs = tuples.digits(G.order, self.n)
        out = []
        for s, t in zip(self.elems, self.tuple_index):
            args = ",".join(G.names[x] for x in digs[t])
            out.append(f"({semigroup.render(semigroup.elements[s])})({args})")
        return out


class Resolution:
    def __init__(self, group: GroupTable, n_max: int, guard: int = RESOLUTION_GUARD):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        self.group = group
        self.S = ExelSemigroup(group)
        self.n_max = n_max
        N, S = group.order, self.S
        table = S.table
        self._gen = np.array([S.index(S.gen(g)) for g in group.elements], dtype=np.int64)
        self._idem = np.array(S.idempotent_indices, dtype=np.int64)
        self._bpos = np.full(len(S), -1, dtype=np.int64)
        self._bpos[self._idem] = np.arange(self._idem.size)
        top = n_max + 1
        sizes = []
        self._etab: list[np.ndarray] = []
        self._elems: list[np.ndarray] = []
        self._tups: list[np.ndarray] = []
        self._pos: list[np.ndarray] = []
        for n in range(top + 1):
            digs = tuples.digits(N, n)
            etab = np.array([S.index(S.e_tuple(t)) for t in digs], dtype=np.int64)
            # t is a canonical representative for tuple k iff t e_k = t
            ok = table[:, etab].T == np.arange(len(S))[None, :]
            tup_idx, elems = np.nonzero(ok)
            pos = np.full((digs.shape[0], len(S)), -1, dtype=np.int64)
            pos[tup_idx, elems] = np.arange(tup_idx.size)
            sizes.append(tup_idx.size)
            dense = max(a * b for a, b in zip([self._idem.size] + sizes, sizes))
            if dense > guard:
                raise MemoryError(
                    f"resolution basis sizes {sizes} need a {dense}-entry boundary matrix, over the guard {guard}"
                )
            self._etab.append(etab)
            self._elems.append(elems.astype(np.int64))
            self._tups.append(tup_idx.astype(np.int64))
            self._pos.append(pos)
        self.levels = [
            ResolutionLevel(n, self._elems[n], self._tups[n], self._boundary(n), self._homotopy(n))
            for n in range(top + 1)
        ]

    # -- helpers ------------------------------------------------------------
    def _key(self, n: int, s: np.ndarray, tup_idx: np.ndarray) -> np.ndarray:
        """Position of s(tuple) in the basis of P_n after normalising to s e_(tuple)."""
        canon = self.S.table[s, self._etab[n][tup_idx]]
        pos = self._pos[n][tup_idx, canon]
        assert np.all(pos >= 0)
        return pos

    def size(self, n: int) -> int:
        return self._elems[n].size if n >= 0 else self._idem.size

    def _boundary(self, n: int) -> np.ndarray:
        S, G, N = self.S, self.group, self.group.order
        s = self._elems[n]
        cols = np.arange(s.size)
        if n == 0:
            m = np.zeros((self._idem.size, s.size), dtype=np.int64)
            eps = S.table[s, S.inv_table[s]]
            np.add.at(m, (self._bpos[eps], cols), 1)
            return m
        m = np.zeros((self.size(n - 1), s.size), dtype=np.int64)
        digs = tuples.digits(N, n)[self._tups[n]]
        first = S.table[s, self._gen[digs[:, 0]]]
        np.add.at(m, (self._key(n - 1, first, tuples.index(N, digs[:, 1:])), cols), 1)
        for i in range(1, n):
            glued = tuples.index(N, tuples.glue(G, digs, i - 1))
            np.add.at(m, (self._key(n - 1, s, glued), cols), (-1) ** i)
        np.add.at(m, (self._key(n - 1, s, tuples.index(N, digs[:, : n - 1])), cols), (-1) ** n)
        return m

    def _homotopy(self, n: int) -> np.ndarray:
        """sigma_{n-1} : P_{n-1} -> P_n."""
        S, N = self.S, self.group.order
        if n == 0:
            m = np.zeros((self.size(0), self._idem.size), dtype=np.int64)
            m[self._key(0, self._idem, np.zeros(self._idem.size, dtype=np.int64)), np.arange(self._idem.size)] = 1
            return m
        s = self._elems[n - 1]
        eps = S.table[s, S.inv_table[s]]
        eta = S.tails[s]
        digs = tuples.digits(N, n - 1)[self._tups[n - 1]]
        new = tuples.index(N, np.concatenate([eta[:, None], digs], axis=1))
        rows = self._key(n, eps, new)
        # ss^-1 <= e_(eta(s), g), so the symbol is already canonical
        assert np.array_equal(S.table[eps, self._etab[n][new]], eps)
        m = np.zeros((self.size(n), s.size), dtype=np.int64)
        m[rows, np.arange(s.size)] = 1
        return m

    def boundary(self, n: int) -> np.ndarray:
        return self.levels[n].boundary

    def homotopy(self, n: int) -> np.ndarray:
        """sigma_n : P_n -> P_{n+1} (n >= -1)."""
        return self.levels[n + 1].homotopy

    # -- certification ------------------------------------------------------
    def certify(self) -> dict:
        checks = {}
        nb = self._idem.size
        checks["d0_sigma_minus1"] = bool(
            np.array_equal(_imatmul(self.boundary(0), self.homotopy(-1)), np.eye(nb, dtype=np.int64))
        )
        for n in range(self.n_max + 1):
            checks[f"dd_{n}"] = not np.any(_imatmul(self.boundary(n), self.boundary(n + 1)))
            lhs = _imatmul(self.boundary(n + 1), self.homotopy(n)) + _imatmul(self.homotopy(n - 1), self.boundary(n))
            checks[f"homotopy_{n}"] = bool(np.array_equal(lhs, np.eye(self.size(n), dtype=np.int64)))
        checks["P0_is_free_rank_one"] = self.size(0) == len(self.S)
        return {
            "group": self.group.label,
            "n_max": self.n_max,
            "sizes": [self.size(n) for n in range(-1, self.n_max + 2)],
            "checks": checks,
            "passed": all(checks.values()),
        }

    def _acts(self, module: KParModule) -> np.ndarray:
        if getattr(self, "_acts_for", None) is not module:
            self._acts_for, self._acts_cache = module, module.act_all(self.S)
        return self._acts_cache

    def hom_matrix(self, module: KParModule, n: int, f) -> np.ndarray:
        """The K_par G-map P_n -> M attached to f in C^n_par: s(g) |-> s . f(g)."""
        F = module.field
        acts = self._acts(module)
        f = np.asarray(f)
        s, t = self._elems[n], self._tups[n]
        cols = F.matmul(acts[s], f[t][:, :, None])[:, :, 0]
        return F.reduce(cols.T)

    def hom_transport(self, module: KParModule, n: int, f) -> bool:
        """delta^n f = f o d_{n+1} as maps P_{n+1} -> M."""
        F = module.field
        df = coboundary_apply(module, n, np.asarray(f)[:, :, None])[:, :, 0]
        lhs = self.hom_matrix(module, n + 1, df)
        hom = self.hom_matrix(module, n, f)
        # d_{n+1} is very sparse: compose column by column instead of a dense product
        d = self.boundary(n + 1)
        rows, cols = np.nonzero(d)
        rhs = F.zeros(lhs.shape)
        np.add.at(rhs.T, cols, (hom[:, rows] * d[rows, cols]).T)
        return F.equal(lhs, F.reduce(rhs))

    def certify_hom_transport(self, module: KParModule, rng: np.random.Generator, samples: int = 20) -> dict:
        out = {}
        for n in range(self.n_max + 1):
            sp = CochainSpace(module, n)
            ok = 0
            for _ in range(samples):
                f = sp.random(rng)[:, :, 0]
                ok += self.hom_transport(module, n, f)
            out[f"degree_{n}"] = {"samples": samples, "passed": ok}
        out["passed"] = all(v["passed"] == samples for v in out.values())
        return out


def build_resolution(group: GroupTable, n_max: int, guard: int = RESOLUTION_GUARD) -> Resolution:
    """P_0..P_{n_max+1} with d and sigma; certification via ``Resolution.certify``."""
    return Resolution(group, n_max, guard)

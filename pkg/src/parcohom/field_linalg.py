"""Exact scalar fields (F_p and Q) and dense linear algebra over them.

Matrices and vectors are plain numpy arrays: ``int64`` residues in ``[0, p)``
for prime fields, ``object`` arrays of :class:`fractions.Fraction` for the
rationals.  A :class:`Field` descriptor carries the arithmetic, so every
routine here takes the field as its first argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import numpy as np

__all__ = [
    "ComplexError",
    "Field",
    "PrimeField",
    "RationalField",
    "QQ",
    "GF",
    "parse_field",
    "Scalar",
    "Subspace",
    "rref",
    "rank",
    "kernel",
    "image",
    "span",
    "solve",
    "solve_membership",
    "quotient_dim",
    "complement",
]


class ComplexError(ArithmeticError):
    """Raised when a subspace that must contain another does not (d∘d != 0 upstream)."""


_FLOAT_EXACT = 2**53
_INT64_SAFE = 2**63 - 1


def _to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        if not x.is_integer():
            raise TypeError(f"refusing inexact float {x!r}; pass a string or Fraction")
        return Fraction(int(x))
    return Fraction(x)


class Field:
    """Base class; concrete subclasses are :class:`PrimeField` and :class:`RationalField`."""

    name: str
    dtype: object

    # scalars
    def scalar(self, x):
        raise NotImplementedError

    def inverse(self, x):
        raise NotImplementedError

    def encode(self, x):
        """JSON-friendly form of a canonical scalar."""
        raise NotImplementedError

    # arrays
    def array(self, data) -> np.ndarray:
        raise NotImplementedError

    def zeros(self, shape) -> np.ndarray:
        raise NotImplementedError

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.scalar(1)
        return out

    def reduce(self, a: np.ndarray) -> np.ndarray:
        return a

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(-a)

    def mul(self, a, b):
        return self.reduce(a * b)

    def scale(self, c, a):
        return self.reduce(self.scalar(c) * a)

    def matmul(self, a, b):
        raise NotImplementedError

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        raise NotImplementedError

    def is_zero(self, a) -> bool:
        return not np.any(a != 0)

    def equal(self, a, b) -> bool:
        return a.shape == b.shape and not np.any(a != b)

    def rref(self, m: np.ndarray) -> tuple[np.ndarray, tuple[int, ...]]:
        raise NotImplementedError

    def encode_array(self, a: np.ndarray):
        return [self.encode(x) for x in np.asarray(a).ravel()]

    def __repr__(self) -> str:
        return self.name


class PrimeField(Field):
    def __init__(self, p: int):
        p = int(p)
        if p < 2 or p >= 2**31 or not _is_prime(p):
            raise ValueError(f"prime field needs a prime 2 <= p < 2^31, got {p}")
        self.p = p
        self.name = f"GF({p})"
        self.dtype = np.int64

    def scalar(self, x) -> int:
        if isinstance(x, (int, np.integer)):
            return int(x) % self.p
        f = _to_fraction(x)
        if f.denominator % self.p == 0:
            raise ZeroDivisionError(f"{f} has no image in {self.name}")
        return f.numerator * pow(f.denominator, -1, self.p) % self.p

    def inverse(self, x) -> int:
        x = self.scalar(x)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(x, -1, self.p)

    def encode(self, x) -> int:
        return int(x)

    def array(self, data) -> np.ndarray:
        a = np.asarray(data)
        if a.dtype == object or a.dtype.kind in "USf":
            flat = [self.scalar(x) for x in a.ravel()]
            return np.array(flat, dtype=np.int64).reshape(a.shape)
        return np.mod(a.astype(np.int64), self.p)

    def zeros(self, shape) -> np.ndarray:
        return np.zeros(shape, dtype=np.int64)

    def reduce(self, a):
        return np.mod(a, self.p)

    def matmul(self, a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        k = a.shape[-1] if a.ndim else 1
        bound = max(k, 1) * (self.p - 1) ** 2
        if bound < _FLOAT_EXACT:
            out = np.matmul(a.astype(np.float64), b.astype(np.float64))
            return np.mod(out, self.p).astype(np.int64)
        if bound < _INT64_SAFE:
            return np.mod(np.matmul(a, b), self.p)
        out = np.matmul(a.astype(object), b.astype(object))
        return np.mod(out, self.p).astype(np.int64)

    def random(self, rng, shape):
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def rref(self, m):
        return _rref_modp(np.asarray(m, dtype=np.int64), self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("GF", self.p))


class RationalField(Field):
    name = "QQ"
    dtype = object

    def scalar(self, x) -> Fraction:
        return _to_fraction(x)

    def inverse(self, x) -> Fraction:
        x = _to_fraction(x)
        if x == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / x

    def encode(self, x):
        x = _to_fraction(x)
        return x.numerator if x.denominator == 1 else str(x)

    def array(self, data) -> np.ndarray:
        a = np.asarray(data, dtype=object)
        flat = [_to_fraction(x) for x in a.ravel()]
        out = np.empty(len(flat), dtype=object)
        out[:] = flat
        return out.reshape(a.shape)

    def zeros(self, shape) -> np.ndarray:
        return np.full(shape, Fraction(0), dtype=object)

    def matmul(self, a, b):
        a = np.asarray(a, dtype=object)
        b = np.asarray(b, dtype=object)
        out = np.matmul(a, b)
        if a.shape[-1] == 0 and isinstance(out, np.ndarray):
            return self.zeros(out.shape)
        return out

    def random(self, rng, shape):
        # small integers keep coefficient growth tame in property tests
        vals = rng.integers(-3, 4, size=shape)
        return self.array(vals)

    def rref(self, m):
        return _rref_rational(np.asarray(m, dtype=object))

    def __eq__(self, other):
        return isinstance(other, RationalField)

    def __hash__(self):
        return hash("QQ")


QQ = RationalField()


@lru_cache(maxsize=None)
def GF(p: int) -> PrimeField:
    return PrimeField(p)


def parse_field(text) -> Field:
    """``"rational"``/``"QQ"``/``"Q"`` or a prime (``7``, ``"GF(7)"``, ``"F7"``)."""
    if isinstance(text, Field):
        return text
    s = str(text).strip()
    if s.lower() in {"rational", "rationals", "qq", "q"}:
        return QQ
    for prefix in ("GF(", "gf(", "F_", "F", "f"):
        if s.startswith(prefix):
            s = s[len(prefix):].rstrip(")")
            break
    return GF(int(s))


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class Scalar:
    """A single exact field element; mostly for tests and interactive use."""

    value: object
    field: Field

    def __post_init__(self):
        object.__setattr__(self, "value", self.field.scalar(self.value))

    def _other(self, other):
        if isinstance(other, Scalar):
            if other.field != self.field:
                raise TypeError("field mismatch")
            return other.value
        return self.field.scalar(other)

    def __add__(self, other):
        return Scalar(self.value + self._other(other), self.field)

    def __sub__(self, other):
        return Scalar(self.value - self._other(other), self.field)

    def __mul__(self, other):
        return Scalar(self.value * self._other(other), self.field)

    def __truediv__(self, other):
        return Scalar(self.value * self.field.inverse(self._other(other)), self.field)

    def __neg__(self):
        return Scalar(-self.value, self.field)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.field == other.field and self.value == other.value
        return self.value == self.field.scalar(other)

    def __hash__(self):
        return hash((self.value, self.field))


# ---------------------------------------------------------------------------
# elimination


def _rref_modp(m: np.ndarray, p: int):
    a = np.mod(m, p).astype(np.int64, copy=True)
    if a.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    rows, cols = a.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        inv = pow(int(a[r, c]), -1, p)
        if inv != 1:
            a[r, c:] = a[r, c:] * inv % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a[:r].copy(), tuple(pivots)


def _row_content(rows: np.ndarray) -> np.ndarray:
    g = np.gcd.reduce(rows, axis=1) if rows.shape[1] else np.ones(rows.shape[0], dtype=object)
    g = np.array([int(x) if x else 1 for x in g], dtype=object)
    return g


def _rref_rational(m: np.ndarray):
    if m.ndim != 2:
        raise ValueError("rref needs a 2-d array")
    rows, cols = m.shape
    # fraction-free: clear denominators row by row and keep rows primitive
    a = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        row = [_to_fraction(x) for x in m[i]]
        den = 1
        for x in row:
            den = lcm(den, x.denominator)
        a[i] = [x.numerator * (den // x.denominator) for x in row]
    if rows and cols:
        content = _row_content(a)
        a = a // content[:, None]
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c] != 0)
        if nz.size == 0:
            continue
        i = r + int(nz[0])
        if i != r:
            a[[r, i]] = a[[i, r]]
        pv = a[r, c]
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col != 0)
        if hit.size:
            upd = a[hit] * pv - np.outer(col[hit], a[r])
            a[hit] = upd // _row_content(upd)[:, None]
        pivots.append(c)
        r += 1
    out = np.empty((r, cols), dtype=object)
    for i, c in enumerate(pivots):
        pv = a[i, c]
        out[i] = [Fraction(x, pv) for x in a[i]]
    return out, tuple(pivots)


def rref(field: Field, m, chunk: int = 256) -> tuple[np.ndarray, tuple[int, ...]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns.

    Tall matrices are reduced a block of rows at a time, so the working
    matrix never has many more rows than columns.
    """
    m = np.asarray(m)
    rows, cols = m.shape
    if rows <= 2 * cols + chunk:
        return field.rref(m)
    step = max(cols, chunk)
    basis = m[:0]
    piv: tuple[int, ...] = ()
    for start in range(0, rows, step):
        block = m[start:start + step]
        basis, piv = field.rref(np.concatenate([basis, block], axis=0))
    return basis, piv


def rank(field: Field, m) -> int:
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(field, m)[1])


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of field^ambient_dim held as an RREF basis (rows)."""

    field: Field
    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...]

    @property
    def dim(self) -> int:
        return len(self.pivots)

    def coordinates(self, v) -> np.ndarray | None:
        v = np.asarray(v)
        if v.shape != (self.ambient_dim,):
            raise ValueError(f"vector of length {v.shape} in ambient dimension {self.ambient_dim}")
        coords = v[list(self.pivots)] if self.pivots else self.field.zeros(0)
        recon = self.field.matmul(coords, self.basis) if self.pivots else self.field.zeros(self.ambient_dim)
        if not self.field.equal(self.field.reduce(recon), v):
            return None
        return coords

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def contains_rows(self, vs) -> np.ndarray:
        """Vectorised membership test for the rows of ``vs``."""
        vs = np.asarray(vs)
        if vs.shape[-1] != self.ambient_dim:
            raise ValueError("dimension mismatch")
        if not self.pivots:
            return ~np.any(vs != 0, axis=-1)
        recon = self.field.matmul(vs[..., list(self.pivots)], self.basis)
        return ~np.any(recon != vs, axis=-1)

    def canonicalize(self) -> Subspace:
        return span(self.field, self.basis, self.ambient_dim)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.ambient_dim == other.ambient_dim
            and self.pivots == other.pivots
            and self.field.equal(self.basis, other.basis)
        )

    __hash__ = None


def span(field: Field, vectors, ambient_dim: int | None = None) -> Subspace:
    vectors = np.asarray(vectors)
    if vectors.ndim == 1:
        vectors = vectors.reshape(1, -1)
    n = vectors.shape[1] if ambient_dim is None else ambient_dim
    if vectors.shape[0] == 0:
        return Subspace(field, n, field.zeros((0, n)), ())
    basis, piv = rref(field, vectors)
    return Subspace(field, n, basis, piv)


def kernel(field: Field, m) -> Subspace:
    """Basis of {v : m v = 0}, canonicalised to RREF."""
    m = np.asarray(m)
    rows, cols = m.shape
    if rows == 0:
        return Subspace(field, cols, field.eye(cols), tuple(range(cols)))
    r, piv = rref(field, m)
    pset = set(piv)
    free = [c for c in range(cols) if c not in pset]
    vecs = field.zeros((len(free), cols))
    for k, f in enumerate(free):
        vecs[k, f] = field.scalar(1)
        for i, c in enumerate(piv):
            vecs[k, c] = field.neg(r[i, f])
    assert len(piv) + len(free) == cols, "rank-nullity violated"
    if not free:
        return Subspace(field, cols, field.zeros((0, cols)), ())
    return span(field, vecs, cols)


def image(field: Field, m) -> Subspace:
    """Column span of ``m``."""
    m = np.asarray(m)
    return span(field, m.T, m.shape[0])


def solve(field: Field, m, v) -> np.ndarray | None:
    """Some x with m x = v, or None when v is outside the column span."""
    m = np.asarray(m)
    v = np.asarray(v)
    rows, cols = m.shape
    if v.shape != (rows,):
        raise ValueError(f"right-hand side has shape {v.shape}, expected ({rows},)")
    aug = np.concatenate([m, v.reshape(-1, 1)], axis=1)
    if field is QQ or isinstance(field, RationalField):
        aug = field.array(aug)
    r, piv = field.rref(aug)
    if piv and piv[-1] == cols:
        return None
    x = field.zeros(cols)
    for i, c in enumerate(piv):
        x[c] = r[i, cols]
    return x


def solve_membership(s: Subspace, v) -> np.ndarray | None:
    return s.coordinates(v)


def quotient_dim(big: Subspace, small: Subspace) -> int:
    if big.ambient_dim != small.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if small.dim and not np.all(big.contains_rows(small.basis)):
        raise ComplexError("subspace containment failed: the complex is broken")
    return big.dim - small.dim


def complement(big: Subspace, small: Subspace) -> np.ndarray:
    """Rows of ``big``'s basis completing a basis of ``small`` to one of ``big``.

    Greedy over the RREF basis of ``big``, so the choice is deterministic.
    """
    field = big.field
    chosen = []
    current = small
    for row in big.basis:
        if not current.contains(row):
            chosen.append(row)
            stack = np.concatenate([current.basis, row.reshape(1, -1)], axis=0)
            current = span(field, stack, big.ambient_dim)
    if not chosen:
        return field.zeros((0, big.ambient_dim))
    return np.stack(chosen)

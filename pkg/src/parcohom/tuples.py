"""Lexicographic indexing of G^n and the index maps used by coboundaries."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .finite_group import GroupTable


@lru_cache(maxsize=64)
def digits(order: int, n: int) -> np.ndarray:
    """All n-tuples over range(order), first coordinate most significant."""
    if n == 0:
        out = np.zeros((1, 0), dtype=np.int64)
    else:
        grids = np.meshgrid(*[np.arange(order)] * n, indexing="ij")
        out = np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    out.setflags(write=False)
    return out


def index(order: int, digs) -> np.ndarray:
    digs = np.asarray(digs, dtype=np.int64)
    out = np.zeros(digs.shape[:-1], dtype=np.int64)
    for k in range(digs.shape[-1]):
        out = out * order + digs[..., k]
    return out


def prefix_products(group: GroupTable, digs) -> np.ndarray:
    """Column k holds g_1 g_2 ... g_{k+1}."""
    digs = np.asarray(digs, dtype=np.int64)
    out = np.empty_like(digs)
    acc = np.zeros(digs.shape[0], dtype=np.int64)
    for k in range(digs.shape[1]):
        acc = group.mul[acc, digs[:, k]]
        out[:, k] = acc
    return out


def glue(group: GroupTable, digs, i: int) -> np.ndarray:
    """Replace columns i, i+1 (0-based) by their product."""
    digs = np.asarray(digs, dtype=np.int64)
    merged = group.mul[digs[:, i], digs[:, i + 1]][:, None]
    return np.concatenate([digs[:, :i], merged, digs[:, i + 2:]], axis=1)


def key(tup) -> str:
    return ",".join(str(int(x)) for x in tup)


def parse_key(text: str) -> tuple[int, ...]:
    text = text.strip()
    return tuple(int(x) for x in text.split(",")) if text else ()

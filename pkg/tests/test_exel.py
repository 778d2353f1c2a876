import numpy as np
import pytest

from oracles import compose, partial_bijection_closure
from parcohom.exel import ExelElement, ExelSemigroup, semigroup_size
from parcohom.finite_group import cyclic, direct_product, symmetric

GROUPS = [cyclic(2), cyclic(3), cyclic(4), direct_product(cyclic(2), cyclic(2)), symmetric(3)]


def as_partial_map(S, gens, s: ExelElement):
    """e_{h1} ... e_{hk} [g] as a partial bijection, with e_h = [h][h^-1]."""
    G = S.group
    out = gens[s.tail]
    for h in reversed(s.idempotents):
        e_h = compose(gens[h], gens[G.inverse(h)])
        out = compose(e_h, out)
    return out


@pytest.mark.parametrize("G", GROUPS, ids=lambda g: g.label)
def test_matches_partial_bijection_closure(G):
    S = ExelSemigroup(G)
    _, gens, closure = partial_bijection_closure(G.mul)
    images = {s: as_partial_map(S, gens, s) for s in S.elements}
    keys = {tuple(v) for v in images.values()}
    assert len(keys) == len(S) == len(closure)
    assert keys == closure
    for s in S.elements:
        for t in S.elements:
            assert np.array_equal(images[S.multiply(s, t)], compose(images[s], images[t]))


@pytest.mark.parametrize("order,size", [(1, 1), (2, 3), (3, 8), (4, 20), (6, 112)])
def test_size_formula(order, size):
    assert semigroup_size(order) == size


@pytest.mark.parametrize("G", GROUPS, ids=lambda g: g.label)
def test_axioms(G):
    cert = ExelSemigroup(G).certify_axioms()
    assert cert["passed"], cert


def test_normal_form_and_order():
    S = ExelSemigroup(cyclic(3))
    a = S.gen(1)
    assert S.multiply(a, S.inverse(a)) == S.e(1)
    assert S.is_idempotent(S.e(1, 2))
    assert S.leq(S.multiply(S.e(2), a), a)
    assert not S.leq(a, S.multiply(S.e(2), a))
    assert S.render(S.multiply(S.e(2), a)) == "e_{" + S.group.names[2] + "} [" + S.group.names[1] + "]"


def test_element_json_roundtrip():
    s = ExelElement(2, (1,))
    assert ExelElement.from_json(s.to_json()) == s

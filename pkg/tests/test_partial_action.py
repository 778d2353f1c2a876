import numpy as np
import pytest

from conftest import CORPUS, build, corpus_id
from parcohom.field_linalg import GF, QQ
from parcohom.finite_group import cyclic, symmetric
from parcohom.partial_action import (
    _make_spec,
    action_from_json,
    eta_n,
    orbit_data,
    regular_action,
    restrict_global,
    sigma,
    subaction,
    tau,
    tau_sigma,
    theta,
    validate,
)
from parcohom import tuples


@pytest.mark.parametrize("case", CORPUS, ids=corpus_id)
def test_corpus_validates(case):
    cert = validate(build(case))
    assert cert.passed, cert.failure


def test_corrupted_map_rejected():
    spec = build(("z2-swap", "QQ"))
    maps = [dict(m) for m in spec.maps]
    maps[1][0] = (1, QQ.array([[2]]))
    bad = _make_spec(spec.group, QQ, [1, 1], [list(d) for d in spec.domains], maps)
    cert = validate(bad)
    assert not cert.passed
    assert cert.failure["check"] in {"algebra_homomorphism", "composition"}


def test_composition_enforced():
    G = cyclic(3)
    F = GF(2)
    eye = F.eye(1)
    # both non-identity elements swap the two blocks, so alpha_1 alpha_1 != alpha_2
    swap = {0: (1, eye), 1: (0, eye)}
    maps = [{0: (0, eye), 1: (1, eye)}, swap, swap]
    spec = _make_spec(G, F, [1, 1], [[0, 1]] * 3, maps)
    assert not validate(spec).passed


def test_restriction_domains():
    spec = restrict_global(regular_action(cyclic(3), GF(2)), [0, 1])
    assert spec.domains[1] == frozenset({1}) and spec.domains[2] == frozenset({0})
    assert validate(subaction(spec, [0])).passed


def test_json_roundtrip():
    spec = build(("two-orbit", "QQ"))
    again = action_from_json(spec.to_json())
    assert np.array_equal(again.pi, spec.pi) and again.domains == spec.domains


def test_orbits_and_lambda():
    spec = build(("two-orbit", "QQ"))
    orbits = orbit_data(spec)
    assert [o.blocks for o in orbits] == [(0,), (1, 2)]
    assert orbits[0].Lambda == (0,) and len(orbits[0].reps) == 2
    assert sorted(orbits[1].block_of.values()) == [1, 2]


@pytest.mark.parametrize("case", [("s3-cosets-2", "GF(3)"), ("z3-regular-2", "GF(2)")], ids=corpus_id)
def test_tau_sigma_against_scalar_definitions(case):
    spec = build(case)
    (orb,) = orbit_data(spec)
    t = orb.transversal
    G = spec.group
    xs = tuples.digits(G.order, 3)
    for g in orb.reps:
        taus, y = tau(t, g, xs)
        for row, tr, yr in zip(xs, taus, y):
            # walk the definition by hand: y_k = bar(x_k^-1 y_{k-1}), tau_k = eta(x_k^-1 y_{k-1})
            cur = g
            expect = []
            for x in row:
                z = G.m(G.inverse(int(x)), cur)
                expect.append(int(t.eta_table[z]))
                cur = int(t.bar_table[z])
            assert list(tr) == expect and yr == cur
        assert np.array_equal(eta_n(t, g, xs), taus[:, -1])
        s0 = sigma(t, g, 0, xs)
        assert np.all(s0[:, 0] == G.inverse(g))
        s3 = sigma(t, g, 3, xs)
        assert np.array_equal(s3[:, :3], taus)
        assert tau_sigma(orb, g, 3, xs[5]) == tuple(int(v) for v in taus[5])


def test_theta_is_alpha_of_base_projection():
    spec = build(("z3-character", "GF(7)"))
    (orb,) = orbit_data(spec)
    a = spec.field.array([1, 2, 3, 4, 5, 6])
    for g in orb.Lambda:
        tgt, mat = spec.maps[g][orb.base]
        out = theta(spec, orb, g, a)
        sl = spec.algebra.block_slice(tgt)
        assert np.array_equal(out[sl], spec.field.reduce(mat @ a[spec.algebra.block_slice(orb.base)]))
        assert not np.any(np.delete(out, np.arange(sl.start, sl.stop)))


def test_s3_coset_action_is_global():
    spec = build(("s3-cosets-2", "GF(3)"))
    assert spec.group == symmetric(3)
    assert not spec.is_global()

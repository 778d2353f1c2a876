import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import CORPUS, build, corpus_id
from oracles import bar_complex_dims
from parcohom.cohomology import (
    ClassicalComplex,
    Cochain,
    GuardError,
    KParModule,
    PartialComplex,
    check_guard,
    coboundary_apply,
    derivation_spaces,
    h0_comparison,
)
from parcohom.corpus import example
from parcohom.field_linalg import GF, QQ
from parcohom.finite_group import cyclic, direct_product


def module(case):
    return KParModule.from_action(build(case))


@pytest.mark.parametrize("case", CORPUS, ids=corpus_id)
def test_module_is_partial_representation(case):
    assert module(case).certify()["passed"]


@pytest.mark.parametrize("G", [cyclic(2), cyclic(3), direct_product(cyclic(2), cyclic(2))], ids=lambda g: g.label)
def test_idempotent_module(G):
    M = KParModule.from_idempotents(G, GF(2))
    assert M.certify()["passed"]
    cx = PartialComplex(M)
    for n in range(3):
        assert not np.any(cx.apply(n + 1, cx.apply(n, cx.space(n).random(np.random.default_rng(n), 2))))


def test_cochain_space_constraint():
    cx = PartialComplex(module(("z3-regular-2", "GF(2)")))
    sp = cx.space(2)
    f = sp.random(np.random.default_rng(0), 3)
    assert np.all(sp.contains(f))
    assert np.array_equal(sp.to_full(sp.from_full(f)), f)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(CORPUS), st.integers(0, 2), st.integers(0, 2**31))
def test_delta_squared_zero_property(case, n, seed):
    cx = PartialComplex(module(case))
    f = cx.space(n).random(np.random.default_rng(seed), 2)
    assert not np.any(cx.apply(n + 1, cx.apply(n, f)))


@pytest.mark.parametrize(
    "case",
    [("z2-trivial", "GF(2)"), ("z2-trivial", "QQ"), ("z2-swap", "GF(3)"), ("z3-character", "GF(7)")],
    ids=corpus_id,
)
def test_global_actions_match_bar_oracle(case):
    spec = build(case)
    M = KParModule.from_action(spec)
    cx = PartialComplex(M)
    ours = [cx.cohomology(n, representatives=False).dim_H for n in range(4)]
    classical = ClassicalComplex.from_module(M)
    assert ours == [classical.dims(n)[2] for n in range(4)]
    assert ours == bar_complex_dims(spec.group.mul, spec.pi.tolist(), spec.field.name, 3)


def test_known_values():
    assert [PartialComplex(module(("z2-trivial", "GF(2)"))).cohomology(n).dim_H for n in range(4)] == [1, 1, 1, 1]
    assert [PartialComplex(module(("z2-trivial", "QQ"))).cohomology(n).dim_H for n in range(4)] == [1, 0, 0, 0]
    assert [PartialComplex(module(("z2-zero", "QQ"))).cohomology(n).dim_H for n in range(3)] == [1, 0, 0]


def test_representatives_are_cocycles_and_roundtrip_json():
    cx = PartialComplex(module(("s3-cosets-2", "GF(2)")))
    rep = cx.cohomology(1)
    assert rep.dim_H == 1
    for c in rep.representatives:
        assert cx.is_cocycle(1, c.values)
        again = Cochain.from_json(c.to_json(), 6, 2, GF(2))
        assert np.array_equal(again.values, c.values)


def test_coboundary_preimage():
    cx = PartialComplex(module(("z3-regular-2", "QQ")))
    xi = cx.space(1).random(np.random.default_rng(3))[:, :, 0]
    f = cx.apply(1, xi)
    pre = cx.coboundary_preimage(2, f)
    assert pre is not None and QQ.equal(cx.apply(1, pre), f)


def test_vectorised_delta_matches_classical_loop_on_global_action():
    spec = example("z2-swap", "QQ")
    M = KParModule.from_action(spec)
    classical = ClassicalComplex.from_module(M)
    f = QQ.random(np.random.default_rng(0), (4, 2, 1))
    assert QQ.equal(coboundary_apply(M, 2, f)[:, :, 0], classical.apply(2, f[:, :, 0]))


def test_guard():
    with pytest.raises(GuardError):
        check_guard(6, 6, 2, guard=1000)
    with pytest.raises(GuardError):
        PartialComplex(module(("s3-cosets-2", "GF(3)")), guard=100).cohomology(3)


def test_classical_rejects_non_module():
    with pytest.raises(ValueError):
        ClassicalComplex(cyclic(2), QQ, QQ.array([[[1]], [[0]]]))


@pytest.mark.parametrize("case", CORPUS, ids=corpus_id)
def test_derivations(case):
    out = derivation_spaces(module(case))
    assert out["passed"], out


@pytest.mark.parametrize("case", [c for c in CORPUS if c[1] != "QQ"], ids=corpus_id)
def test_h0_units(case):
    out = h0_comparison(build(case))
    assert out["passed"], out


def test_h0_needs_finite_field():
    with pytest.raises(ValueError):
        h0_comparison(build(("z2-zero", "QQ")))

import numpy as np
import pytest

from conftest import build, corpus_id
from parcohom.cohomology import KParModule
from parcohom.finite_group import cyclic
from parcohom.resolution import build_resolution


@pytest.mark.parametrize("case", [("z2-swap", "QQ"), ("z3-regular-2", "GF(2)"), ("v4-regular-2", "GF(2)")], ids=corpus_id)
def test_resolution_certificates(case):
    spec = build(case)
    res = build_resolution(spec.group, 2)
    cert = res.certify()
    assert cert["passed"], cert
    hom = res.certify_hom_transport(KParModule.from_action(spec), np.random.default_rng(0), samples=5)
    assert hom["passed"], hom


def test_sizes_z2():
    # P_{-1} = B has the 2 idempotents, P_0 = K S(Z/2) has 3 basis elements
    assert build_resolution(cyclic(2), 1).certify()["sizes"][:2] == [2, 3]


def test_symbols_render():
    res = build_resolution(cyclic(2), 0)
    syms = res.levels[1].symbols(res.S)
    assert len(syms) == res.size(1)


def test_guard():
    with pytest.raises(MemoryError):
        build_resolution(cyclic(4), 3, guard=100)


def test_broken_boundary_detected():
    res = build_resolution(cyclic(3), 1)
    res.levels[1].boundary[0, 0] += 1
    assert not res.certify()["passed"]

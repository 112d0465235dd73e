"""Nerve of a crossed module, Duskin complex, and the matching results."""

import pytest

from xmodgerbe.fingroup import (cokernel, cyclic_group, groups_isomorphic,
                                kernel, symmetric_group, xmod_identity,
                                xmod_mod, xmod_trivial_base,
                                xmod_trivial_fiber)
from xmodgerbe.simplicial import moore_homotopy, validate_map, validate_simplicial
from xmodgerbe.util import Budget
from xmodgerbe.xnerve import (build_duskin, build_nerve, exactness_check,
                              homotopy_quotient, match_wbar_duskin,
                              nerve_homotopy, semidirect_model)


def test_nerve_level_sizes(corpus):
    # composable n-strings in a groupoid with |D| objects and |H| choices
    # per arrow: |D| * |H|^n at level n
    for xm in corpus:
        n = build_nerve(xm, 3)
        want = [xm.D.order * xm.H.order ** k for k in range(4)]
        assert [g.order for g in n.groups] == want, xm.name


def test_nerve_underlying_sset_validates(corpus):
    for xm in corpus[:6]:
        n = build_nerve(xm, 3)
        assert validate_simplicial(n.sset()).ok, xm.name


def test_nerve_homotopy_matches_kernel_cokernel(corpus):
    for xm in corpus:
        pi0, pi1 = nerve_homotopy(xm, 2)
        coker, _ = cokernel(xm.alpha)
        ker, _ = kernel(xm.alpha)
        assert groups_isomorphic(pi0, coker), xm.name
        assert groups_isomorphic(pi1, ker), xm.name


def test_moore_route_agrees_with_nerve_homotopy():
    xm = xmod_mod(6, 3)
    n = build_nerve(xm, 2)
    pi0, pi1 = nerve_homotopy(xm, 2)
    assert moore_homotopy(n, 0).order == pi0.order
    assert moore_homotopy(n, 1).order == pi1.order


def test_duskin_validates_and_is_small():
    for xm in (xmod_trivial_fiber(cyclic_group(2)),
               xmod_mod(4, 2), xmod_identity(cyclic_group(3))):
        d = build_duskin(xm, 3)
        assert validate_simplicial(d).ok
        assert d.sizes[0] == 1


def test_match_wbar_duskin_small_modules(corpus):
    small = [xm for xm in corpus if xm.H.order * xm.D.order <= 8]
    assert small
    for xm in small:
        m = match_wbar_duskin(xm, N=3, budget=Budget(what="match"))
        assert m.found, xm.name
        assert validate_map(m.iso).ok
        # the stored inverse permutations undo the witness levelwise
        for lvl in range(m.wbar.N + 1):
            for s in range(m.wbar.sizes[lvl]):
                assert int(m.inverse[lvl][m.iso.levels[lvl][s]]) == s
            for s in range(m.duskin.sizes[lvl]):
                assert int(m.iso.levels[lvl][m.inverse[lvl][s]]) == s


def test_match_dimensions_agree():
    xm = xmod_mod(4, 2)
    m = match_wbar_duskin(xm, N=3, budget=Budget(what="match"))
    assert m.found
    assert m.wbar.sizes == m.duskin.sizes


def test_homotopy_quotient_model():
    for xm in (xmod_mod(4, 2), xmod_identity(cyclic_group(3)),
               xmod_trivial_base(symmetric_group(3))):
        hq = homotopy_quotient(xm, 2)
        assert hq.report.ok, xm.name


def test_semidirect_model_and_exactness(corpus):
    for xm in corpus[:8]:
        sm = semidirect_model(xm, 2)
        assert sm.report.ok, xm.name
        assert all(k == xm.H.order for k in sm.kernel_orders)
        assert exactness_check(xm, 2).ok, xm.name

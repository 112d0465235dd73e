"""Twistings, twisted products, and bundle classification."""

import numpy as np
import pytest

from xmodgerbe.fingroup import cyclic_group, symmetric_group
from xmodgerbe.simplicial import (SimplicialMap, circle,
                                  constant_simplicial_group, delta1,
                                  validate_simplicial)
from xmodgerbe.twist import (Twisting, build_twisted_product, build_wbar,
                             classify_bundles, enumerate_twistings,
                             pullback_twisting, twistings_equivalent,
                             validate_twisting, witness_compose,
                             witness_invert)
from xmodgerbe.util import Budget, StructureError

from _oracles import scan_sigma_bar


def test_enumerate_twistings_circle_s3():
    sg = constant_simplicial_group(symmetric_group(3), 2)
    ts = enumerate_twistings(circle(2), sg, budget=Budget(what="tw"))
    # one free value on the nondegenerate loop, forced elsewhere
    assert len(ts) == 6
    for t in ts:
        assert validate_twisting(t).ok


def test_twisting_corpus_size_and_validity(twisting_corpus):
    total = sum(len(ts) for _, _, ts in twisting_corpus)
    assert total >= 50
    for _, _, ts in twisting_corpus:
        for t in ts:
            assert validate_twisting(t).ok


def test_twisted_products_pass_both_routes(twisting_corpus):
    for base, sg, ts in twisting_corpus:
        for t in ts:
            tp = build_twisted_product(t)
            assert tp.report.ok, (t.name, tp.report.summary())
            assert validate_simplicial(tp.total).ok
            # independent scalar-loop transcription of the face laws
            assert scan_sigma_bar(tp) == []


def test_corrupted_twisting_rejected():
    sg = constant_simplicial_group(cyclic_group(4), 2)
    t = enumerate_twistings(circle(2), sg, budget=Budget(what="tw"))[1]
    bad_values = [v.copy() for v in t.values]
    bad_values[2][-1] = (bad_values[2][-1] + 1) % 4
    bad = Twisting(t.base, t.group, bad_values, name="bad")
    assert not validate_twisting(bad).ok
    with pytest.raises(StructureError):
        build_twisted_product(bad)


def test_classify_bundles_counts(bundle_counts):
    s3 = bundle_counts["S3"]
    z4 = bundle_counts["Z4"]
    assert len(s3.twisting_classes) == 3
    assert len(z4.twisting_classes) == 4
    for bc in (s3, z4):
        assert bc.bijection_ok
        assert len(bc.map_classes) == len(bc.twisting_classes)
        assert sorted(bc.matching) == list(range(len(bc.twisting_classes)))
        assert bc.report.ok


def test_witness_compose_and_invert():
    sg = constant_simplicial_group(cyclic_group(4), 2)
    ts = enumerate_twistings(circle(2), sg, budget=Budget(what="tw"))
    t1 = ts[1]
    psi = twistings_equivalent(t1, t1, budget=Budget(what="eq"))
    assert psi is not None
    inv = witness_invert(t1, psi)
    round_trip = witness_compose(t1, psi, inv)
    # composing a witness with its inverse is again a self-equivalence
    for lvl, arr in enumerate(round_trip.levels):
        assert arr.shape == psi.levels[lvl].shape
    # inequivalent pair has no witness
    t3 = ts[3]
    assert twistings_equivalent(t1, t3, budget=Budget(what="eq")) is None


def test_pullback_along_identity():
    sg = constant_simplicial_group(cyclic_group(4), 2)
    t = enumerate_twistings(circle(2), sg, budget=Budget(what="tw"))[1]
    x = t.base
    ident = SimplicialMap(x, x, [np.arange(n) for n in x.sizes], name="id")
    back = pullback_twisting(t, ident)
    assert validate_twisting(back).ok
    for a, b in zip(back.values, t.values):
        assert np.array_equal(a, b)


def test_wbar_sizes():
    w2, tau2 = build_wbar(constant_simplicial_group(cyclic_group(2), 3))
    assert w2.sizes == [1, 2, 4, 8]
    assert validate_simplicial(w2).ok
    assert validate_twisting(tau2).ok
    w6, _ = build_wbar(constant_simplicial_group(symmetric_group(3), 3))
    assert w6.sizes == [1, 6, 36, 216]


def test_wbar_universal_twisted_product():
    w, tau = build_wbar(constant_simplicial_group(cyclic_group(3), 2))
    tp = build_twisted_product(tau)
    assert tp.report.ok
    assert scan_sigma_bar(tp) == []
    # total space of the universal twisting is the contractible W construction
    assert tp.total.sizes == [3, 9, 27]

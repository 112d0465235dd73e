"""Cocycle enumeration, stable equivalence, products, pullback, lifting."""

import numpy as np
import pytest

from xmodgerbe.fingroup import (cyclic_group, derived_crossed_modules,
                                symmetric_group, xmod_automorphism,
                                xmod_identity, xmod_mod, xmod_trivial_base,
                                xmod_trivial_fiber)
from xmodgerbe.gerbe import (CMBundleCocycle, CoverMap, GerbeCocycle,
                             StableWitness, abelian_oracle, apply_witness,
                             bundle_product, classify_gerbes, cocycle_from_json,
                             cocycle_to_json, cocycle_to_simplicial_map,
                             compose_witness, enumerate_cocycles,
                             identity_witness, lift_gerbe, map_to_cocycle,
                             pullback_cocycle, trivial_bundle, trivial_cocycle,
                             validate_bundle_cocycle, validate_cocycle)
from xmodgerbe.simplicial import ball_cover, circle_cover, sphere_cover
from xmodgerbe.util import Budget, BudgetError, StructureError
from xmodgerbe.xnerve import match_wbar_duskin

from _oracles import brute_cech_h2_order


def test_cocycle_counts_trivial_base_modules():
    z2 = xmod_trivial_fiber(cyclic_group(2))
    # no tetra constraint on the sphere model: every assignment is closed
    cs = enumerate_cocycles(sphere_cover(4), z2)
    assert len(cs) == 16
    # the solid model adds the single tetra equation, halving the count
    assert len(enumerate_cocycles(ball_cover(4), z2)) == 8
    # the circle has no triple overlaps at all
    assert len(enumerate_cocycles(circle_cover(3), z2)) == 1
    for c in cs:
        assert validate_cocycle(c).ok


def test_classification_counts(gerbe_runs):
    assert len(gerbe_runs["sphere-z2"][2].classes) == 2
    assert len(gerbe_runs["circle-z2"][2].classes) == 1
    assert len(gerbe_runs["circle-s3"][2].classes) == 3
    for cover, xm, cl in gerbe_runs.values():
        assert cl.exhaustive
        assert sum(k.orbit_size for k in cl.classes) == len(cl.cocycles)


def test_corrupted_cocycle_rejected():
    xm = xmod_mod(4, 2)
    c = enumerate_cocycles(ball_cover(3), xm)[1]
    h = dict(c.h)
    key = next(iter(h))
    h[key] = xm.H.mul(h[key], 1)
    bad = GerbeCocycle(c.cover, c.xm, dict(c.d), h, name="bad")
    assert not validate_cocycle(bad).ok


def test_witness_compose_and_identity():
    cover = sphere_cover(4)
    xm = xmod_trivial_fiber(cyclic_group(2))
    cs = enumerate_cocycles(cover, xm)
    rng = np.random.default_rng(3)

    def rand_witness():
        r = {a: int(rng.integers(xm.D.order)) for a in range(cover.charts)}
        s = {p: int(rng.integers(xm.H.order)) for p in cover.simplices(1)}
        return StableWitness(r, s)

    c = cs[5]
    for _ in range(10):
        w1, w2 = rand_witness(), rand_witness()
        lhs = apply_witness(apply_witness(c, w1), w2)
        rhs = apply_witness(c, compose_witness(w2, w1, cover, xm))
        assert lhs.d == rhs.d and lhs.h == rhs.h
    out = apply_witness(c, identity_witness(cover, xm))
    assert out.d == c.d and out.h == c.h


def test_witness_final_factor_transcription():
    """The last factor of the triple-overlap transformation is indexed by the
    outer pair (a, c).  Re-indexing it by (b, c) looks equally plausible but
    sends valid cocycles to invalid ones; the library formula never does."""
    cover = ball_cover(4)
    xm = xmod_automorphism(cyclic_group(3))
    cs = enumerate_cocycles(cover, xm)
    assert len(cs) == 216
    rng = np.random.default_rng(7)

    def rand_witness():
        r = {a: int(rng.integers(xm.D.order)) for a in range(cover.charts)}
        s = {p: int(rng.integers(xm.H.order)) for p in cover.simplices(1)}
        return StableWitness(r, s)

    def apply_dual(c, w):
        D, H = c.xm.D, c.xm.H
        d2, h2 = {}, {}
        for (a, b) in c.cover.simplices(1):
            d2[(a, b)] = D.mul(D.mul(D.mul(w.r[a], c.xm.alpha(w.s[(a, b)])),
                                     c.d[(a, b)]), D.inv(w.r[b]))
        for (a, b, cc) in c.cover.simplices(2):
            ra = w.r[a]
            t1 = c.xm.act(ra, w.s[(a, b)])
            t2 = c.xm.act(D.mul(ra, c.d[(a, b)]), w.s[(b, cc)])
            t3 = c.xm.act(ra, c.h[(a, b, cc)])
            t4 = H.inv(c.xm.act(ra, w.s[(b, cc)]))
            h2[(a, b, cc)] = H.mul(H.mul(H.mul(t1, t2), t3), t4)
        return GerbeCocycle(c.cover, c.xm, d2, h2, name="dual")

    dual_invalid = 0
    for _ in range(50):
        c = cs[int(rng.integers(len(cs)))]
        w = rand_witness()
        apply_witness(c, w)  # raises on any violation
        if not validate_cocycle(apply_dual(c, w)).ok:
            dual_invalid += 1
    assert dual_invalid == 32


def test_pullback_refinement():
    xm = xmod_trivial_base(cyclic_group(2))
    coarse, fine = circle_cover(3), circle_cover(6)
    f = CoverMap(fine, coarse, [i // 2 for i in range(6)])
    for c in enumerate_cocycles(coarse, xm):
        p = pullback_cocycle(c, f)
        assert validate_cocycle(p).ok
    # refinement does not change the count of classes
    assert len(classify_gerbes(coarse, xm).classes) == 2
    assert len(classify_gerbes(fine, xm, force=True).classes) == 2
    ident = CoverMap(coarse, coarse, [0, 1, 2])
    c = enumerate_cocycles(coarse, xm)[1]
    same = pullback_cocycle(c, ident)
    assert same.d == c.d and same.h == c.h
    nonmono = CoverMap(fine, coarse, [1, 1, 2, 2, 0, 0])
    with pytest.raises(StructureError):
        pullback_cocycle(c, nonmono)


def test_bundle_product_monoid():
    cover = ball_cover(3)
    xm = xmod_identity(cyclic_group(4))

    def bundle(dvals):
        d = {a: dvals[a] for a in range(3)}
        g = {(a, b): xm.H.mul(dvals[a], xm.H.inv(dvals[b]))
             for (a, b) in cover.simplices(1)}
        return CMBundleCocycle(cover, xm, d, g, name=f"b{dvals}")

    b1, b2, b3 = bundle([0, 1, 2]), bundle([3, 1, 0]), bundle([2, 2, 1])
    for b in (b1, b2, b3):
        assert validate_bundle_cocycle(b).ok
    left = bundle_product(bundle_product(b1, b2), b3)
    right = bundle_product(b1, bundle_product(b2, b3))
    assert left.d == right.d and left.g == right.g
    e = trivial_bundle(cover, xm)
    assert bundle_product(b1, e).g == b1.g
    assert bundle_product(e, b1).g == b1.g


def test_abelian_oracle_reference_values():
    z2 = cyclic_group(2)
    assert abelian_oracle(circle_cover(3), z2, 1).order == 2
    assert abelian_oracle(circle_cover(3), z2, 2).order == 1
    assert abelian_oracle(sphere_cover(4), z2, 2).invariants == [2]
    assert abelian_oracle(sphere_cover(5), z2, 3).invariants == [2]
    assert abelian_oracle(ball_cover(4), z2, 2).order == 1
    z3 = cyclic_group(3)
    assert abelian_oracle(circle_cover(3), z3, 1).order == 3
    assert abelian_oracle(sphere_cover(4), z3, 2).order == 3


def test_abelian_oracle_vs_direct_enumeration():
    z2 = cyclic_group(2)
    for cover in (sphere_cover(4), ball_cover(4), circle_cover(3)):
        assert abelian_oracle(cover, z2, 2).order == \
            brute_cech_h2_order(cover, z2)


def test_classification_matches_oracle(gerbe_runs):
    z2 = cyclic_group(2)
    assert len(gerbe_runs["sphere-z2"][2].classes) == \
        abelian_oracle(sphere_cover(4), z2, 2).order
    assert len(gerbe_runs["circle-z2"][2].classes) == \
        abelian_oracle(circle_cover(3), z2, 2).order


def test_base_only_module_matches_bundle_count():
    # (1 -> Z3) gerbes over the circle = conjugacy classes of Z3 = 3,
    # the same count the bundle classifier produces
    from xmodgerbe.simplicial import circle, constant_simplicial_group
    from xmodgerbe.twist import classify_bundles
    xm = xmod_trivial_base(cyclic_group(3))
    cl = classify_gerbes(circle_cover(3), xm)
    sg = constant_simplicial_group(cyclic_group(3), 2)
    bc = classify_bundles(circle(2), sg)
    assert len(cl.classes) == len(bc.twisting_classes) == 3


def test_guard_requires_force():
    with pytest.raises(BudgetError):
        classify_gerbes(ball_cover(6), xmod_identity(symmetric_group(3)))


def test_cocycle_map_round_trip(gerbe_runs):
    cover, xm, cl = gerbe_runs["circle-s3"]
    match = match_wbar_duskin(xm, N=2)
    assert match.found
    for k in cl.classes:
        c = k.representative
        maps = cocycle_to_simplicial_map(c, match, budget=Budget(what="ext"))
        back = map_to_cocycle(maps.wbar_map, cover, xm, match)
        assert back.d == c.d and back.h == c.h
        back2 = map_to_cocycle(maps.duskin_map, cover, xm)
        assert back2.d == c.d and back2.h == c.h


def test_lift_solid_cover_all_lift():
    target = xmod_mod(4, 2)
    base = derived_crossed_modules(target)["image-in-base"]
    for c in enumerate_cocycles(ball_cover(3), base):
        r = lift_gerbe(c, target)
        assert r.central and r.lifted and r.obstruction_zero and r.agreement
        assert r.oracle.order == 1


def test_cocycle_json_round_trip(tmp_path):
    xm = xmod_mod(4, 2)
    c = enumerate_cocycles(ball_cover(3), xm)[2]
    d = cocycle_to_json(c)
    back = cocycle_from_json(d)
    assert back.d == c.d and back.h == c.h
    assert validate_cocycle(back).ok


def test_trivial_cocycle_validates():
    for cover in (circle_cover(3), sphere_cover(4)):
        c = trivial_cocycle(cover, xmod_mod(4, 2))
        assert validate_cocycle(c).ok

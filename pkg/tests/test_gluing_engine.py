import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from strataglue.fields import REAL
from strataglue.linear_strata import (LinearStratification, OrderError,
                                      chain_stratification,
                                      enumerate_stratifications, mask_of)
from strataglue.gluing_engine import (
    EngineError,
    build_atlas,
    check_compatible,
    coincide,
    evaluate,
    glue,
    image_region,
    induce,
    inward_extend,
    is_boundary_type,
    linear_model,
    normalize,
    phi,
    point_in_image,
    psi,
    region_is_empty,
    restrict,
    sew,
    tagged_samples,
    verify_cover,
    words_equal,
)
from strataglue.regions import Region, full_box, whole_stratum


def strat(m, classes):
    return LinearStratification(
        m, REAL, tuple(tuple(sorted(mask_of(I) for I in c)) for c in classes))


M1 = linear_model(strat(1, [[()], [(1,)]]))
CHAIN2 = linear_model(strat(2, [[()], [(1,), (2,)], [(1, 2)]]))
SEP2 = linear_model(strat(2, [[()], [(1,)], [(2,)], [(1, 2)]]))
CHAIN3 = linear_model(chain_stratification(3))


class TestLinearModel:
    def test_m1_shape(self):
        assert M1.strat.num_classes == 2
        assert M1.fiber_dim(0, 1) == 1

    def test_chain2_fiber_dims(self):
        assert [CHAIN2.fiber_dim(0, b) for b in (0, 1, 2)] == [0, 1, 2]
        assert CHAIN2.dim(2) == 2

    def test_chain3_strata(self):
        assert CHAIN3.strat.num_classes == 4
        assert [CHAIN3.fiber_dim(a, 3) for a in range(4)] == [3, 2, 1, 0]

    def test_layers_bottom_up(self):
        assert CHAIN2.layers == ((0,), (1,), (2,))
        assert SEP2.layers == ((0,), (1, 2), (3,))


class TestWords:
    def test_phi_chain_collapses(self):
        w = (phi(0, 1), phi(1, 2))
        assert normalize(w) == (phi(0, 2),)

    def test_glue_absorbs_phi(self):
        assert normalize((phi(0, 1), glue(1))) == (glue(0),)

    def test_phi_identity_drops(self):
        assert normalize((phi(1, 1), glue(1))) == (glue(1),)

    def test_psi_glue(self):
        w = (psi(1, 0, {mask_of((1,)): 0, mask_of((2,)): 0}), glue(0))
        assert normalize(w) == (glue(1),)

    def test_psi_phi(self):
        w = (psi(1, 0, {mask_of((1,)): 0, mask_of((2,)): 0}), phi(0, 2))
        assert normalize(w) == (phi(1, 2),)

    def test_idempotent(self):
        w = (psi(2, 1, {mask_of((1, 2)): mask_of((1,))}),
             phi(1, 1), phi(1, 2), glue(2))
        assert normalize(normalize(w)) == normalize(w)

    @given(st.lists(st.sampled_from(
        [glue(0), glue(1), glue(2), phi(0, 1), phi(1, 2), phi(0, 2),
         phi(1, 1), phi(2, 2), phi(0, 0)]), max_size=6))
    def test_normalize_idempotent_property(self, word):
        w = tuple(word)
        assert normalize(normalize(w)) == normalize(w)


class TestEvaluate:
    def test_glue_forgets_tags(self):
        s = CHAIN2.strat
        v = (Fraction(1), Fraction(1, 2))
        assert evaluate(s, (glue(0),), ((0,), v)) == v

    def test_phi_advances_chain(self):
        s = CHAIN2.strat
        v = (Fraction(1), Fraction(1, 2))
        chain = (0, mask_of((1,)))
        out = evaluate(s, (phi(0, 1),), (chain, v))
        assert out == ((mask_of((1,)),), v)

    def test_phi_falls_back_to_support(self):
        s = CHAIN2.strat
        v = (Fraction(1), Fraction(1, 2))
        out = evaluate(s, (phi(0, 2),), ((0,), v))
        assert out == ((mask_of((1, 2)),), v)

    def test_wrong_stratum_rejected(self):
        s = CHAIN2.strat
        with pytest.raises(EngineError):
            evaluate(s, (glue(2),), ((0,), (Fraction(1), Fraction(1))))

    def test_identity_phi_after_glue(self):
        # phi^a = phi^b . Phi^a_b at every sample point
        s = CHAIN2.strat
        for a, b in [(0, 1), (0, 2), (1, 2)]:
            lhs = (glue(a),)
            rhs = (phi(a, b), glue(b))
            assert words_equal(s, REAL, lhs, rhs, (a, b))

    def test_identity_phi_composition(self):
        # Phi^a_c = Phi^b_c . Phi^a_b along every chain of three
        for model in (CHAIN2, CHAIN3, SEP2):
            s = model.strat
            n = s.num_classes
            for a in range(n):
                for b in s.above(a):
                    for c in s.above(b):
                        if len({a, b, c}) < 3:
                            continue
                        lhs = (phi(a, c),)
                        rhs = (phi(a, b), phi(b, c))
                        assert normalize(lhs) == normalize(rhs)
                        assert words_equal(s, model.field, lhs, rhs,
                                           (a, b, c))


class TestRestrict:
    def test_identity_restriction(self):
        d = M1.canonical_datum(1)
        assert restrict(M1, d, d.region, d.epsilon) == d

    def test_halved_radius_same_values(self):
        d = CHAIN2.canonical_datum(0)
        r = restrict(CHAIN2, d, d.region, d.epsilon / 2)
        s = CHAIN2.strat
        for point in tagged_samples(s, REAL, (0, 2), 20):
            assert (evaluate(s, r.phi_word, point)
                    == evaluate(s, d.phi_word, point))

    def test_sub_box_membership(self):
        d = M1.canonical_datum(1)
        sub = Region(1, (((Fraction(-1), Fraction(1)),),))
        r = restrict(M1, d, sub, d.epsilon)
        assert point_in_image(M1, r, (Fraction(1, 2),))
        assert not point_in_image(M1, r, (Fraction(2),))
        assert point_in_image(M1, d, (Fraction(2),))

    def test_larger_radius_rejected(self):
        d = M1.canonical_datum(1)
        with pytest.raises(EngineError):
            restrict(M1, d, d.region, d.epsilon * 2)

    def test_outside_region_rejected(self):
        d = M1.canonical_datum(1)
        sub = Region(1, (((Fraction(-1), Fraction(1)),),))
        r = restrict(M1, d, sub, d.epsilon)
        with pytest.raises(EngineError):
            restrict(M1, r, d.region, d.epsilon)


class TestInduce:
    def test_collapses_to_canonical(self):
        d = CHAIN2.canonical_datum(0)
        img = image_region(CHAIN2, d, 1)
        e = induce(CHAIN2, d, 1, img, d.epsilon / 2)
        assert e.phi_word == (glue(1),)
        assert e.bundle_words[2] == (phi(1, 2),)

    def test_evaluation_matches_source(self):
        # evaluating the induced chart equals evaluating the source chart
        d = CHAIN2.canonical_datum(0)
        img = image_region(CHAIN2, d, 1)
        e = induce(CHAIN2, d, 1, img, d.epsilon / 2)
        s = CHAIN2.strat
        for point in tagged_samples(s, REAL, (1, 2), 30):
            assert (evaluate(s, e.phi_word, point)
                    == evaluate(s, (glue(1),), point))

    def test_same_stratum_rejected(self):
        d = CHAIN2.canonical_datum(1)
        with pytest.raises(OrderError):
            induce(CHAIN2, d, 1, d.region, d.epsilon)

    def test_region_outside_image_rejected(self):
        d = M1.canonical_datum(0)
        big = Region(1, (((Fraction(-9), Fraction(9)),),))
        with pytest.raises(EngineError):
            induce(M1, d, 1, big, d.epsilon / 2)

    def test_commutes_with_restriction(self):
        d = CHAIN2.canonical_datum(0)
        img = image_region(CHAIN2, d, 1)
        small = Region(1, (
            ((Fraction(-1, 2), Fraction(1, 2)),
             (Fraction(-1, 4), Fraction(1, 4))),))
        a = restrict(CHAIN2, induce(CHAIN2, d, 1, img, d.epsilon / 2),
                     small, d.epsilon / 4)
        b = induce(CHAIN2, restrict(CHAIN2, d, d.region, d.epsilon / 2),
                   1, small, d.epsilon / 4)
        assert coincide(CHAIN2, a, b)


class TestCoincideSew:
    def test_self_coincides(self):
        d = M1.canonical_datum(1)
        assert coincide(M1, d, d)
        merged = sew(M1, d, d)
        assert merged.epsilon < d.epsilon

    def test_overlapping_restrictions(self):
        d = M1.canonical_datum(1)
        left = restrict(M1, d, Region(1, (((Fraction(-2), Fraction(1)),),)),
                        d.epsilon)
        right = restrict(M1, d, Region(1, (((Fraction(-1), Fraction(2)),),)),
                         d.epsilon)
        assert coincide(M1, left, right)
        merged = sew(M1, left, right)
        assert point_in_image(M1, merged, (Fraction(-3, 2),))
        assert point_in_image(M1, merged, (Fraction(3, 2),))

    def test_metric_mismatch(self):
        d1 = M1.canonical_datum(1)
        d2 = M1.canonical_datum(1, scales=(Fraction(2),))
        assert not coincide(M1, d1, d2)
        with pytest.raises(EngineError):
            sew(M1, d1, d2)


class TestBoundaryType:
    def test_whole_stratum(self):
        assert is_boundary_type(M1, whole_stratum(M1.strat, REAL, 1))

    def test_punctured_disk(self):
        u = Region(1, (((Fraction(-1), Fraction(1)),),))
        assert is_boundary_type(M1, u)

    def test_interval_away_from_zero(self):
        u = Region(1, (((Fraction(1), Fraction(2)),),))
        assert not is_boundary_type(M1, u)

    def test_chain2_strip_union(self):
        e = Fraction(1, 2)
        u = Region(2, (
            ((-e, e), (-Fraction(9), Fraction(9))),
            ((-Fraction(9), Fraction(9)), (-e, e))))
        assert not is_boundary_type(CHAIN2, u)
        unbounded = Region(2, (
            ((-e, e), (float("-inf"), float("inf"))),
            ((float("-inf"), float("inf")), (-e, e))))
        assert is_boundary_type(CHAIN2, unbounded)


class TestInwardExtend:
    def test_global_datum_extends_to_itself(self):
        d = M1.canonical_datum(1)
        out, radius = inward_extend(M1, d)
        assert coincide(M1, out, d)
        assert out.region == d.region

    def test_restriction_extends_back(self):
        d = M1.canonical_datum(1)
        u = Region(1, (((Fraction(-1), Fraction(1)),),))
        r = restrict(M1, d, u, d.epsilon)
        out, radius = inward_extend(M1, r)
        assert out.region == whole_stratum(M1.strat, REAL, 1)
        assert coincide(M1, restrict(M1, out, u, out.epsilon), r)

    def test_perturbed_metric_kept(self):
        d = M1.canonical_datum(1, scales=(Fraction(3),))
        u = Region(1, (((Fraction(-1), Fraction(1)),),))
        r = restrict(M1, d, u, d.epsilon)
        out, _ = inward_extend(M1, r)
        assert out.scales == (Fraction(3),)

    def test_non_boundary_type_rejected(self):
        u = Region(1, (((Fraction(1), Fraction(2)),),))
        d = restrict(M1, M1.canonical_datum(1), u, Fraction(1))
        with pytest.raises(EngineError):
            inward_extend(M1, d)


class TestCompatibility:
    def test_with_own_restriction(self):
        d = CHAIN2.canonical_datum(0)
        r = restrict(CHAIN2, d, d.region, d.epsilon / 2)
        assert check_compatible(CHAIN2, d, r)

    def test_canonical_cross_strata(self):
        for model in (M1, CHAIN2, CHAIN3):
            data = [model.canonical_datum(a)
                    for a in range(model.strat.num_classes)]
            for d1, d2 in itertools.combinations(data, 2):
                assert check_compatible(model, d1, d2)

    def test_rescaled_metric_incompatible(self):
        d0 = M1.canonical_datum(0)
        d1 = M1.canonical_datum(1, scales=(Fraction(2),))
        assert not check_compatible(M1, d0, d1)


class TestBuildAtlas:
    def test_m1(self):
        rep = build_atlas(M1)
        assert len(rep.data) == 2
        assert rep.all_compatible
        assert rep.passes == 2

    def test_chain2(self):
        rep = build_atlas(CHAIN2)
        assert len(rep.data) == 3
        assert rep.all_compatible
        assert rep.separation_ok and rep.cover_ok

    def test_separated_classes(self):
        rep = build_atlas(SEP2)
        assert rep.all_compatible
        assert rep.separation_ok
        assert rep.passes == 3

    def test_exactly_k_passes(self):
        for model in (M1, CHAIN2, SEP2):
            rep = build_atlas(model)
            assert rep.passes == len(model.layers)

    def test_cover_fails_without_deep_chart(self):
        rep = build_atlas(CHAIN2)
        data = {a: d for a, d in rep.data.items() if a != 0}
        ok, witnesses = verify_cover(CHAIN2, data)
        assert not ok
        origin = (Fraction(0), Fraction(0))
        assert origin in witnesses

    def test_report_json_shape(self):
        rep = build_atlas(M1)
        js = rep.to_json()
        assert js["all_compatible"] is True
        assert js["separation"]["ok"] is True
        assert js["cover"]["ok"] is True
        assert js["passes"] == 2


class TestImages:
    def test_image_region_matches_pointwise(self):
        d = CHAIN2.canonical_datum(1, epsilon=Fraction(1, 2))
        img = image_region(CHAIN2, d, 2)
        from strataglue.regions import region_contains
        vals = [Fraction(n, 4) for n in range(-6, 7)]
        for x in vals:
            for y in vals:
                v = (x, y)
                if CHAIN2.strat.stratum_of(v)[0] != 2:
                    continue
                assert (region_contains(CHAIN2.strat, REAL, img, v)
                        == point_in_image(CHAIN2, d, v))

    def test_empty_region_detection(self):
        r = Region(2, ())
        assert region_is_empty(CHAIN2, r)
        tiny = Region(2, (((Fraction(1), Fraction(2)),
                           (Fraction(0), Fraction(0))),))
        assert region_is_empty(CHAIN2, tiny)

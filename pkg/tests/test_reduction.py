import math

import numpy as np
import pytest

from germstable.jet_funcs.curve import extend_invariant_jet
from germstable.jet_funcs.germ import HORIZONTAL, VectorFieldJet, exp_vector_field
from germstable.proc_funcs.reduction import (
    DirectionKind,
    attracting_directions,
    direction_reports,
    reduce_pair,
    refine_contact,
    saddle_count_bound,
)
from germstable.util_funcs.errors import NotParabolic, RestrictionIsIdentity
from testgerms_germstable.model_germs import ConjugatedModel, ReducedModel

from conftest import axis_curve, germ_from_terms


def kinds(rp):
    return [change.kind.name for change in rp.history]


class TestReducePair:
    def test_node_germ_is_already_reduced(self, node_pair):
        assert (node_pair.k, node_pair.p) == (1, 1)
        assert node_pair.mu == pytest.approx(1)
        assert np.allclose(node_pair.a.coeffs, [-1, 0])
        assert np.allclose(node_pair.A.coeffs, [-1, -0.5])
        assert node_pair.history == ()
        assert node_pair.contact_order is None
        assert node_pair.is_reduced()

    def test_saddle_germ(self, saddle_pair):
        assert (saddle_pair.k, saddle_pair.p, saddle_pair.r) == (1, 0, 1)
        assert np.allclose(saddle_pair.A.coeffs, [1])

    def test_x_normalization(self):
        F = germ_from_terms({(1, 0): 1, (2, 0): 1}, {(0, 1): 1, (1, 1): 1})
        rp = reduce_pair(F, axis_curve())
        assert (rp.k, rp.p) == (1, 0)
        assert rp.a[0] == pytest.approx(-1)
        assert kinds(rp) == ["POLYNOMIAL"]
        assert rp.is_reduced()

    def test_semi_hyperbolic_curve_needs_a_blow_up(self):
        F = germ_from_terms({(1, 0): 1, (2, 0): -1}, {(0, 1): 2, (2, 0): 1})
        gamma = extend_invariant_jet(F, HORIZONTAL, F.order)
        rp = reduce_pair(F, gamma)
        assert kinds(rp) == ["SHEAR", "BLOW_UP", "SHEAR"]
        assert rp.blowups == 1
        assert (rp.k, rp.p) == (1, 0)
        assert rp.mu == pytest.approx(2)
        assert rp.a[0] == pytest.approx(1)
        assert rp.is_reduced()

    def test_identity_on_the_curve(self):
        F = exp_vector_field(VectorFieldJet.from_terms({(2, 1): 1}, {(0, 2): 1}, 8))
        with pytest.raises(RestrictionIsIdentity):
            reduce_pair(F, axis_curve(8))

    def test_hyperbolic_restriction(self):
        F = germ_from_terms({(1, 0): 0.5}, {(0, 1): 2})
        with pytest.raises(NotParabolic):
            reduce_pair(F, axis_curve())

    @pytest.mark.slow
    def test_recovers_conjugated_models(self, rng):
        shapes = [(1, 0), (1, 1), (2, 1), (1, 2)]
        for trial in range(20):
            k, p = shapes[trial % len(shapes)]
            mu = complex(*rng.normal(size=2))
            a = rng.normal(size=p + 1) + 1j * rng.normal(size=p + 1)
            model = ConjugatedModel(ReducedModel(k, p, mu, a), rng)
            rp = reduce_pair(model.get_germ(), model.get_curve())
            expected = a.copy()
            expected[p] += rp.blowups
            assert (rp.k, rp.p) == (k, p)
            assert rp.mu == pytest.approx(mu, abs=1e-8)
            assert np.allclose(rp.a.coeffs, expected, rtol=0, atol=1e-8)
            assert rp.is_reduced(1e-10)


class TestRefineContact:
    def test_small_exponent_rejected(self, saddle_pair):
        with pytest.raises(ValueError):
            refine_contact(saddle_pair, 1)

    def test_flat_curve_is_unchanged(self, saddle_pair):
        refined = refine_contact(saddle_pair, 2)
        assert refined.germ.allclose(saddle_pair.germ)
        assert refined.blowups == 0

    def test_blow_ups_make_re_A_p_positive(self, node_pair):
        refined = refine_contact(node_pair, node_pair.p + 2, want_re_positive=True)
        assert refined.blowups == 1
        assert refined.A[refined.p] == pytest.approx(0.5)
        assert refined.a[refined.p] == pytest.approx(1)
        assert refined.is_reduced()

    def test_contact_raise_keeps_the_normal_form(self, rng):
        model = ConjugatedModel(ReducedModel(1, 1, 1, [-1, 0.5]), rng)
        rp = reduce_pair(model.get_germ(), model.get_curve())
        low = refine_contact(rp, rp.p + 2)
        high = refine_contact(rp, rp.p + 4)
        assert (low.k, low.p) == (high.k, high.p) == (rp.k, rp.p)
        assert np.allclose(low.a.coeffs, rp.a.coeffs, rtol=0, atol=1e-8)
        assert np.allclose(high.a.coeffs, low.a.coeffs, rtol=0, atol=1e-8)
        expected = [d.kind for d in attracting_directions(rp)]
        assert expected == [DirectionKind.NODE, DirectionKind.SADDLE]
        assert [d.kind for d in attracting_directions(low)] == expected
        assert [d.kind for d in attracting_directions(high)] == expected
        assert high.gamma2.truncate(high.r + high.p + 3).norm() <= 1e-10

    def test_rotation_to_the_opposite_direction(self, node_pair):
        rotated = node_pair.rotated(-1)
        assert np.allclose(rotated.a.coeffs, [1, 0])
        assert rotated.is_reduced()
        assert node_pair.rotated(1) is node_pair


class TestDirections:
    def test_node_and_saddle(self, node_directions):
        node, saddle = node_directions
        assert node.kind == DirectionKind.NODE
        assert node.xi == 1
        assert node.witness == pytest.approx((0, -1))
        assert saddle.kind == DirectionKind.SADDLE
        assert saddle.witness == pytest.approx((0, 1))
        assert node.label == "Node"
        assert saddle.label == "Saddle"

    def test_expanding_mu_gives_saddles(self):
        reports = direction_reports(1, 1, 2, [-1, -0.5])
        assert all(report.kind == DirectionKind.SADDLE for report in reports)

    def test_unit_mu_without_p_gives_saddles(self):
        reports = direction_reports(3, 0, np.exp(0.7j), [-1 + 0.2j])
        assert len(reports) == 3
        assert all(report.kind == DirectionKind.SADDLE for report in reports)

    def test_vanishing_real_parts(self):
        model = ReducedModel(1, 1, 1, [1j, 0.5])
        rp = reduce_pair(model.get_germ(), model.get_curve())
        assert np.allclose(rp.A.coeffs, [1j, 1])
        first = direction_reports(rp.k, rp.p, rp.mu, rp.A)[0]
        assert first.kind == DirectionKind.SADDLE
        assert first.r_l == 1

    def test_radius_index_off_the_unit_circle(self):
        assert all(report.r_l is None for report in direction_reports(1, 1, 2, [-1, 0]))

    def test_saddle_count_bound(self, rng):
        for _ in range(1000):
            k = int(rng.integers(1, 5))
            p = int(rng.integers(0, 7))
            A = rng.normal(size=p + 1) + 1j * rng.normal(size=p + 1)
            phase = np.exp(2j * np.pi * rng.uniform())
            mu = phase if rng.uniform() < 0.5 else phase * rng.uniform(1.0, 3.0)
            reports = direction_reports(k, p, mu, A)
            saddles = sum(report.kind == DirectionKind.SADDLE for report in reports)
            assert len(reports) == k + p
            assert saddles >= saddle_count_bound(k, p) == math.ceil((k + p) / 4)

import cmath
import math

import numpy as np
import pytest

from germstable.jet_funcs.curve import (
    FormalCurveJet,
    InnerClass,
    RestrictionData,
    classify_inner,
    curve_basics,
    cusp_pattern,
    extend_invariant_jet,
    solve_restriction,
    strict_transform_chain,
)
from germstable.jet_funcs.germ import HORIZONTAL, VERTICAL
from germstable.jet_funcs.jets import UniJet
from germstable.util_funcs.errors import NotInvariant, Obstructed, ZeroParametrization

from conftest import axis_curve, germ_from_terms

ORDER = 10


def curve(g1, g2, order=ORDER):
    return FormalCurveJet(UniJet(g1, order), UniJet(g2, order))


CUSP = ([0, 0, 1], [0, 0, 0, 1])


class TestCurveBasics:
    def test_smooth(self):
        basics = curve_basics(curve([0, 1], [0, 0, 0, 1]))
        assert basics.multiplicity == 1
        assert basics.tangent == HORIZONTAL
        assert basics.irreducible

    def test_cusp(self):
        basics = curve_basics(curve(*CUSP))
        assert basics.multiplicity == 2
        assert basics.tangent == HORIZONTAL
        assert basics.irreducible

    def test_reducible_parametrization(self):
        assert not curve_basics(curve([0, 0, 1], [0, 0, 0, 0, 1])).irreducible

    def test_vertical_tangent(self):
        assert curve([0, 0, 1], [0, 1]).tangent == VERTICAL

    def test_vanishing_parametrization(self):
        with pytest.raises(ZeroParametrization):
            curve_basics(curve([0], [0]))

    def test_curve_off_the_origin(self):
        with pytest.raises(ZeroParametrization):
            curve_basics(curve([1, 1], [0, 1]))


class TestRestriction:
    def test_cusp_with_sign_flip(self):
        F = germ_from_terms({(1, 0): 1}, {(0, 1): -1}, order=ORDER)
        rd = solve_restriction(F, curve(*CUSP))
        assert rd.theta.allclose(UniJet([0, -1], ORDER))
        assert rd.multiplicity == 2
        assert rd.inner_eigenvalue == pytest.approx(-1)
        assert rd.tangent_eigenvalue == pytest.approx(1)
        assert rd.inner_eigenvalue**rd.multiplicity == pytest.approx(rd.tangent_eigenvalue)

    def test_cusp_of_resonant_linear_map(self):
        F = germ_from_terms({(1, 0): 0.25}, {(0, 1): 0.125}, order=ORDER)
        rd = solve_restriction(F, curve(*CUSP))
        assert rd.theta.allclose(UniJet([0, 0.5], ORDER))
        assert rd.inner_eigenvalue**2 == pytest.approx(rd.tangent_eigenvalue)

    def test_invariant_axis(self, saddle_germ):
        rd = solve_restriction(saddle_germ, axis_curve())
        assert rd.theta.allclose(UniJet([0, 1, -1], rd.theta.order))
        assert rd.inner_eigenvalue == pytest.approx(1)
        assert rd.restriction_order == 2
        assert rd.r == 1

    def test_identity_restriction(self):
        F = germ_from_terms({(1, 0): 1, (1, 1): 1}, {(0, 1): 1, (0, 2): 1}, order=ORDER)
        rd = solve_restriction(F, axis_curve(ORDER))
        assert rd.restriction_order is None
        assert rd.r is None

    def test_not_invariant(self):
        F = germ_from_terms({(1, 0): 2}, {(0, 1): 3}, order=ORDER)
        with pytest.raises(NotInvariant) as info:
            solve_restriction(F, curve([0, 1], [0, 1]))
        assert info.value.order == 1


class TestExtendInvariantJet:
    def test_invariant_axis(self):
        F = germ_from_terms({(1, 0): 1, (2, 0): -1}, {(0, 1): 2}, order=ORDER)
        gamma = extend_invariant_jet(F, HORIZONTAL, ORDER)
        assert gamma.gamma2.norm() == pytest.approx(0)
        assert gamma.gamma1.allclose(UniJet.variable(ORDER))

    def test_semi_hyperbolic(self):
        F = germ_from_terms({(1, 0): 1, (2, 0): -1}, {(0, 1): 2, (2, 0): 1}, order=ORDER)
        gamma = extend_invariant_jet(F, HORIZONTAL, ORDER)
        assert gamma.gamma2[2] == pytest.approx(-1)
        assert gamma.gamma2[3] == pytest.approx(2)
        rd = solve_restriction(F, gamma)
        assert rd.residual <= 1e-10

    def test_obstructed(self):
        F = germ_from_terms({(1, 0): 1}, {(0, 1): 1, (1, 0): 1}, order=ORDER)
        with pytest.raises(Obstructed) as info:
            extend_invariant_jet(F, HORIZONTAL, ORDER)
        assert info.value.order == 1

    def test_vertical_seed(self):
        F = germ_from_terms({(1, 0): 2, (0, 2): 1}, {(0, 1): 1, (0, 2): -1}, order=ORDER)
        gamma = extend_invariant_jet(F, VERTICAL, ORDER)
        assert gamma.gamma2.allclose(UniJet.variable(ORDER))
        assert gamma.gamma1[2] == pytest.approx(-1)
        assert gamma.tangent == VERTICAL

    def test_resonant_order_is_recorded(self):
        F = germ_from_terms({(1, 0): 2}, {(0, 1): 4}, order=6)
        gamma = extend_invariant_jet(F, HORIZONTAL, 6)
        assert gamma.non_unique == (2,)


class TestStrictTransformChain:
    def test_axis_stays_put(self, saddle_germ):
        steps = strict_transform_chain(saddle_germ, axis_curve(), 3)
        assert [step.point for step in steps] == [HORIZONTAL] * 3
        assert all(step.curve.gamma2.norm() == 0 for step in steps)

    def test_cusp_resolves_after_one_blow_up(self):
        F = germ_from_terms({(1, 0): 1}, {(0, 1): -1}, order=ORDER)
        steps = strict_transform_chain(F, curve(*CUSP), 1)
        assert steps[0].multiplicity == 1
        assert steps[0].curve.gamma2.allclose(UniJet.variable(steps[0].curve.order))
        rd = solve_restriction(steps[0].germ, steps[0].curve)
        assert rd.inner_eigenvalue == pytest.approx(-1)

    def test_jordan_block_chain(self):
        a = 0.5
        F = germ_from_terms({(1, 0): a, (0, 1): a}, {(0, 1): a}, order=ORDER)
        steps = strict_transform_chain(F, axis_curve(ORDER), 4)
        assert len(steps) == 4
        assert all(step.point == HORIZONTAL for step in steps)


class TestClassifyInner:
    @staticmethod
    def data(lam, multiplicity=1, curve_jet=None, eigenvalues=None):
        return RestrictionData(
            theta=UniJet([0, lam], 4),
            inner_eigenvalue=lam,
            tangent_eigenvalue=lam**multiplicity,
            restriction_order=1,
            residual=0.0,
            multiplicity=multiplicity,
            curve=curve_jet,
            eigenvalues=eigenvalues,
        )

    @pytest.mark.parametrize(
        "lam, kind, period",
        [
            (0.5, InnerClass.HYPERBOLIC_ATTRACTING, None),
            (2.0, InnerClass.HYPERBOLIC_REPELLING, None),
            (1.0, InnerClass.PARABOLIC, None),
            (-1.0, InnerClass.RATIONALLY_NEUTRAL, 2),
            (cmath.exp(2j * math.pi / 3), InnerClass.RATIONALLY_NEUTRAL, 3),
            (cmath.exp(2j * math.pi * math.sqrt(2)), InnerClass.IRRATIONALLY_NEUTRAL, None),
        ],
    )
    def test_kinds(self, lam, kind, period):
        c = classify_inner(self.data(lam))
        assert c.kind == kind
        assert c.period == period

    def test_labels(self):
        assert classify_inner(self.data(-1.0)).label == "RationallyNeutral(2)"
        assert classify_inner(self.data(1.0)).label == "Parabolic"

    def test_cusp_pattern_of_hyperbolic_curve(self):
        F = germ_from_terms({(1, 0): 0.25}, {(0, 1): 0.125}, order=ORDER)
        c = classify_inner(solve_restriction(F, curve(*CUSP)))
        assert c.kind == InnerClass.HYPERBOLIC_ATTRACTING
        assert (c.cusp.p, c.cusp.q) == (2, 3)
        assert c.cusp.resonance_defect == 0.0
        assert c.cusp.membership_residual == 0.0
        assert c.cusp.matches

    def test_cusp_pattern_with_vertical_tangent(self):
        # (1/4)^3 = (1/8)^2 with 1/4 the eigenvalue of the tangent [0:1]
        F = germ_from_terms({(1, 0): 0.125}, {(0, 1): 0.25}, order=ORDER)
        rd = solve_restriction(F, curve([0, 0, 0, 1], [0, 0, 1]))
        assert rd.tangent_eigenvalue == pytest.approx(0.25)
        c = classify_inner(rd)
        assert c.kind == InnerClass.HYPERBOLIC_ATTRACTING
        assert (c.cusp.p, c.cusp.q) == (2, 3)
        assert c.cusp.resonance_defect == pytest.approx(0, abs=1e-15)
        assert c.cusp.matches

    def test_vertical_cusp_pattern_uses_tangent_eigenvalue(self):
        assert cusp_pattern(curve([0, 0, 0, 1], [0, 0, 1]), 0.25, 0.125).matches
        assert not cusp_pattern(curve([0, 0, 0, 1], [0, 0, 1]), 0.125, 0.25).matches

    def test_cusp_pattern_rejects_non_resonant_eigenvalues(self):
        pattern = cusp_pattern(curve(*CUSP), 0.25, 0.1)
        assert not pattern.matches
        assert pattern.resonance_defect > 0
        assert np.isclose(pattern.c, 1)

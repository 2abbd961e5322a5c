import cmath

import numpy as np

from germstable.jet_funcs.curve import FormalCurveJet
from germstable.jet_funcs.germ import (
    GermDiffeo,
    PolynomialMap,
    VectorFieldJet,
    compose,
    exp_vector_field,
    inverse,
)
from germstable.jet_funcs.jets import BiJet, UniJet
from testgerms_germstable.util.enums import ModelClass


def _coefficients(terms, degree):
    c = np.zeros((degree + 1, degree + 1), dtype=np.complex128)
    for (i, j), value in terms.items():
        c[i, j] += value
    return c


class ModelGerm:
    """A germ with a known invariant curve; ``c1``/``c2`` are the coefficients handed to specs and orbits."""

    model_class = None

    def __init__(self, c1, c2, gamma1, gamma2, order):
        self._c1 = np.asarray(c1, dtype=np.complex128)
        self._c2 = np.asarray(c2, dtype=np.complex128)
        self._gamma1 = np.asarray(gamma1, dtype=np.complex128)
        self._gamma2 = np.asarray(gamma2, dtype=np.complex128)
        self._order = order

    @property
    def order(self):
        return self._order

    @property
    def coefficients(self):
        return self._c1, self._c2

    @property
    def curve_coefficients(self):
        return self._gamma1, self._gamma2

    def get_germ(self, order=None):
        order = self._order if order is None else order
        return GermDiffeo(BiJet(self._c1, order), BiJet(self._c2, order))

    def get_curve(self, order=None):
        order = self._order if order is None else order
        return FormalCurveJet(UniJet(self._gamma1, order), UniJet(self._gamma2, order))

    def get_map(self):
        return PolynomialMap.from_coefficients(self._c1, self._c2)


class ReducedModel(ModelGerm):
    """(x - x^(k+p+1), mu (y + x^k a(x) y)) with the x-axis invariant."""

    model_class = ModelClass.REDUCED

    def __init__(self, k, p, mu, a, order=16):
        self.k, self.p, self.mu = k, p, complex(mu)
        self.a = tuple(complex(v) for v in a)
        r = k + p
        terms1 = {(1, 0): 1.0, (r + 1, 0): -1.0}
        terms2 = {(0, 1): self.mu}
        for j, value in enumerate(self.a):
            terms2[(k + j, 1)] = terms2.get((k + j, 1), 0) + self.mu * value
        degree = max(r + 1, k + len(self.a))
        super().__init__(_coefficients(terms1, degree), _coefficients(terms2, degree), [0, 1], [0], order)


class ConjugatedModel(ModelGerm):
    """
    phi o F o phi^-1 for a random polynomial phi tangent to the identity; the
    model curve is mapped by phi, so its image stays polynomial.
    """

    model_class = ModelClass.CONJUGATED

    def __init__(self, base, rng, degree=3, scale=0.2, order=None):
        order = base.order if order is None else order
        self.base = base
        terms = [{(1, 0): 1.0}, {(0, 1): 1.0}]
        for component in terms:
            for i in range(degree + 1):
                for j in range(degree + 1 - i):
                    if i + j >= 2:
                        component[(i, j)] = scale * complex(*rng.normal(size=2))
        self.phi_terms = terms
        phi = GermDiffeo.from_terms(terms[0], terms[1], order)
        G = compose(compose(phi, base.get_germ(order)), inverse(phi))
        g1, g2 = base.get_curve(order).gamma1, base.get_curve(order).gamma2
        image1 = phi.F1.along_curve(g1, g2)
        image2 = phi.F2.along_curve(g1, g2)
        super().__init__(G.F1.coeffs, G.F2.coeffs, image1.coeffs, image2.coeffs, order)


class ToyFlowModel(ModelGerm):
    """Time-one map of -x^(k+p+1) d/dx + (log mu + x^k A(x)) y d/dy."""

    model_class = ModelClass.TOY_FLOW

    def __init__(self, k, p, mu, A, order=16):
        self.k, self.p, self.mu = k, p, complex(mu)
        self.A = tuple(complex(v) for v in A)
        terms1 = {(k + p + 1, 0): -1.0}
        terms2 = {(0, 1): cmath.log(self.mu)}
        for j, value in enumerate(self.A):
            terms2[(k + j, 1)] = value
        self.field = VectorFieldJet.from_terms(terms1, terms2, order)
        F = exp_vector_field(self.field)
        super().__init__(F.F1.coeffs, F.F2.coeffs, [0, 1], [0], order)


class LinearModel(ModelGerm):
    """(lam x + coupling y, mu y) with the x-axis invariant."""

    model_class = ModelClass.LINEAR

    def __init__(self, lam, mu, coupling=0.0, order=8):
        self.lam, self.mu, self.coupling = complex(lam), complex(mu), complex(coupling)
        c1 = [[0, self.coupling], [self.lam, 0]]
        c2 = [[0, self.mu], [0, 0]]
        super().__init__(c1, c2, [0, 1], [0], order)

"""
Germs of diffeomorphisms of (C^2, 0) stored as pairs of two-variable jets.

A germ keeps the log of coordinate changes that produced it from the germ the
user supplied, so that points, curves and regions found in the current chart
can be pushed back with ``to_original`` and pulled in with ``from_original``.
"""
import logging
from dataclasses import dataclass, field, replace
from enum import IntEnum
from functools import cached_property

import numpy as np

from germstable.jet_funcs.jets import ZERO_TOL, BiJet, UniJet, writable
from germstable.proc_funcs.kernels import poly_values
from germstable.util_funcs.errors import (
    NonzeroConstantTerm,
    NotFixedDirection,
    NotInvertible,
)

logger = logging.getLogger(__name__)

DIRECTION_TOL = 1e-10
HORIZONTAL = (1 + 0j, 0j)
VERTICAL = (0j, 1 + 0j)


class ChangeKind(IntEnum):
    LINEAR = 0
    SHEAR = 1
    BLOW_UP = 2
    POLYNOMIAL = 3


def _evaluate_pair(pair, xs, ys):
    xs = writable(np.ravel(xs))
    ys = writable(np.ravel(ys))
    return (
        poly_values(writable(pair[0].coeffs), xs, ys),
        poly_values(writable(pair[1].coeffs), xs, ys),
    )


@dataclass(frozen=True)
class CoordinateChange:
    """phi maps the new chart to the previous one; inverse goes back."""

    kind: ChangeKind
    forward: tuple | None
    inverse: tuple | None
    note: str = ""

    def push(self, xs, ys):
        """New chart -> previous chart."""
        xs = np.asarray(xs, dtype=np.complex128)
        ys = np.asarray(ys, dtype=np.complex128)
        match self.kind:
            case ChangeKind.BLOW_UP:
                return xs, xs * ys
            case _:
                return _evaluate_pair(self.forward, xs, ys)

    def pull(self, xs, ys):
        """Previous chart -> new chart."""
        xs = np.asarray(xs, dtype=np.complex128)
        ys = np.asarray(ys, dtype=np.complex128)
        match self.kind:
            case ChangeKind.BLOW_UP:
                with np.errstate(divide="ignore", invalid="ignore"):
                    return xs, np.where(xs == 0, np.nan + 0j, ys / np.where(xs == 0, 1, xs))
            case _:
                return _evaluate_pair(self.inverse, xs, ys)

    def to_dict(self):
        return {"kind": self.kind.name, "note": self.note}


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: tuple
    directions: tuple
    diagonalizable: bool

    @property
    def repeated(self):
        return abs(self.eigenvalues[0] - self.eigenvalues[1]) <= 1e-12 * max(
            1.0, abs(self.eigenvalues[0])
        )

    def direction_for(self, eigenvalue):
        """Eigen-direction whose eigenvalue is closest to the given one."""
        if len(self.directions) == 1:
            return self.directions[0]
        i = int(np.argmin([abs(ev - eigenvalue) for ev in self.eigenvalues]))
        return self.directions[i]


def normalize_direction(direction):
    a, b = (complex(v) for v in direction)
    if abs(a) <= ZERO_TOL and abs(b) <= ZERO_TOL:
        raise ValueError("direction must be a nonzero vector")
    if abs(a) >= abs(b):
        return (1 + 0j, b / a)
    return (a / b, 1 + 0j)


def is_fixed_direction(L, direction, tol=DIRECTION_TOL):
    v = np.asarray(normalize_direction(direction))
    w = L @ v
    cross = w[0] * v[1] - w[1] * v[0]
    return abs(cross) <= tol * max(1.0, np.linalg.norm(w)) * np.linalg.norm(v)


def direction_eigenvalue(L, direction):
    v = np.asarray(normalize_direction(direction))
    w = L @ v
    return complex(np.vdot(v, w) / np.vdot(v, v))


@dataclass(frozen=True)
class GermDiffeo:
    F1: BiJet
    F2: BiJet
    history: tuple = field(default=(), compare=False)

    def __post_init__(self):
        if abs(self.F1[0, 0]) > 1e-12 or abs(self.F2[0, 0]) > 1e-12:
            raise NonzeroConstantTerm("germ does not fix the origin", "GermDiffeo")
        if abs(np.linalg.det(self.linear_part)) <= 1e-14:
            raise NotInvertible("linear part is singular", "GermDiffeo")

    @classmethod
    def from_terms(cls, terms1, terms2, order):
        return cls(BiJet.from_terms(terms1, order), BiJet.from_terms(terms2, order))

    @classmethod
    def identity(cls, order):
        return cls(BiJet.x(order), BiJet.y(order))

    @classmethod
    def linear(cls, matrix, order):
        m = np.asarray(matrix, dtype=np.complex128)
        return cls.from_terms(
            {(1, 0): m[0, 0], (0, 1): m[0, 1]}, {(1, 0): m[1, 0], (0, 1): m[1, 1]}, order
        )

    @property
    def order(self):
        return min(self.F1.order, self.F2.order)

    @cached_property
    def linear_part(self):
        return np.array(
            [[self.F1[1, 0], self.F1[0, 1]], [self.F2[1, 0], self.F2[0, 1]]],
            dtype=np.complex128,
        )

    @property
    def pair(self):
        return (self.F1, self.F2)

    def __call__(self, xs, ys):
        return self.F1(xs, ys), self.F2(xs, ys)

    def truncate(self, n):
        return replace(self, F1=self.F1.truncate(n), F2=self.F2.truncate(n))

    def with_order(self, n):
        return replace(self, F1=self.F1.with_order(n), F2=self.F2.with_order(n))

    def residual(self, other):
        return max(self.F1.residual(other.F1), self.F2.residual(other.F2))

    def allclose(self, other, tol=1e-10):
        return self.residual(other) <= tol

    def recorded(self, change):
        return replace(self, history=self.history + (change,))

    def to_original(self, xs, ys):
        xs = np.asarray(xs, dtype=np.complex128)
        ys = np.asarray(ys, dtype=np.complex128)
        for change in reversed(self.history):
            xs, ys = change.push(xs, ys)
        return xs, ys

    def from_original(self, xs, ys):
        xs = np.asarray(xs, dtype=np.complex128)
        ys = np.asarray(ys, dtype=np.complex128)
        for change in self.history:
            xs, ys = change.pull(xs, ys)
        return xs, ys


def _substitute_pair(F, g1, g2):
    return F.F1.substitute(g1, g2), F.F2.substitute(g1, g2)


def compose(F, G):
    """F o G; the result carries the history of F."""
    H1, H2 = _substitute_pair(F, G.F1, G.F2)
    return GermDiffeo(H1, H2, F.history)


def inverse(F):
    """Jet inverse by the fixed point G = L^-1 (id - NL(G)), one order per sweep."""
    n = F.order
    L = F.linear_part
    if abs(np.linalg.det(L)) <= 1e-14:
        raise NotInvertible("linear part is singular", "inverse")
    Li = np.linalg.inv(L)
    lin = GermDiffeo.linear(L, n)
    nl1 = F.F1.truncate(n) - lin.F1
    nl2 = F.F2.truncate(n) - lin.F2
    x, y = BiJet.x(n), BiJet.y(n)
    g1 = x * Li[0, 0] + y * Li[0, 1]
    g2 = x * Li[1, 0] + y * Li[1, 1]
    for _ in range(n):
        r1 = x - nl1.substitute(g1, g2)
        r2 = y - nl2.substitute(g1, g2)
        g1 = r1 * Li[0, 0] + r2 * Li[0, 1]
        g2 = r1 * Li[1, 0] + r2 * Li[1, 1]
    return GermDiffeo(g1, g2)


def compose_iterate(F, n):
    if n == 0:
        return GermDiffeo(BiJet.x(F.order), BiJet.y(F.order), F.history)
    base = F if n > 0 else replace(inverse(F), history=F.history)
    result = base
    for _ in range(abs(n) - 1):
        result = compose(result, base)
    return result


def spectrum(F, tol=1e-12):
    L = F.linear_part
    scale = max(1.0, float(np.max(np.abs(L))))
    if abs(L[1, 0]) <= tol * scale:
        eigenvalues = (complex(L[0, 0]), complex(L[1, 1]))
    else:
        values = np.linalg.eigvals(L)
        eigenvalues = (complex(values[0]), complex(values[1]))
    lam, mu = eigenvalues
    if abs(lam - mu) <= 1e-12 * max(1.0, abs(lam)):
        diagonalizable = np.linalg.matrix_rank(L - lam * np.eye(2), tol=1e-10 * scale) == 0
        if diagonalizable:
            directions = (HORIZONTAL, VERTICAL)
        else:
            directions = (_null_direction(L, lam),)
        return Spectrum(eigenvalues, directions, bool(diagonalizable))
    directions = tuple(_null_direction(L, ev) for ev in eigenvalues)
    return Spectrum(eigenvalues, directions, True)


def _null_direction(L, eigenvalue):
    _, _, vh = np.linalg.svd(L - eigenvalue * np.eye(2))
    v = vh[-1].conj()
    return normalize_direction(v)


def linear_change(F, matrix, kind=ChangeKind.LINEAR, note=""):
    """Conjugate by the linear map (x, y) -> M (x, y)."""
    m = np.asarray(matrix, dtype=np.complex128)
    n = F.order
    phi = GermDiffeo.linear(m, n)
    phi_inv = GermDiffeo.linear(np.linalg.inv(m), n)
    return change_coordinates(F, phi, kind=kind, phi_inverse=phi_inv, note=note)


def shear(F, g, note="shear"):
    """Conjugate by (x, y) -> (x, y + g(x))."""
    n = F.order
    gx = BiJet.from_unijet_x(g.with_order(n) - g[0], n)
    x, y = BiJet.x(n), BiJet.y(n)
    phi = GermDiffeo(x, y + gx)
    phi_inv = GermDiffeo(x, y - gx)
    return change_coordinates(F, phi, kind=ChangeKind.SHEAR, phi_inverse=phi_inv, note=note)


def change_coordinates(F, phi, kind=ChangeKind.POLYNOMIAL, phi_inverse=None, note=""):
    """phi^-1 o F o phi, with phi appended to the coordinate-change log."""
    if phi_inverse is None:
        phi_inverse = inverse(phi)
    inner1, inner2 = _substitute_pair(F, phi.F1, phi.F2)
    G1 = phi_inverse.F1.substitute(inner1, inner2)
    G2 = phi_inverse.F2.substitute(inner1, inner2)
    change = CoordinateChange(kind, phi.pair, phi_inverse.pair, note)
    logger.debug("coordinate change %s (%s)", kind.name, note)
    return GermDiffeo(G1, G2, F.history + (change,))


def straightening_matrix(direction):
    """Matrix sending [1:0] to the direction: (x, y + c x) or (y + c x, x); None for [1:0]."""
    a, b = normalize_direction(direction)
    if abs(b) <= ZERO_TOL and abs(a - 1) <= ZERO_TOL:
        return None
    if abs(a) >= abs(b):
        return np.array([[1, 0], [b / a, 1]], dtype=np.complex128)
    return np.array([[a / b, 1], [1, 0]], dtype=np.complex128)


def straighten(F, direction):
    """Linear change putting a direction on the x-axis."""
    M = straightening_matrix(direction)
    if M is None:
        return F
    kind = ChangeKind.SHEAR if M[0, 0] == 1 and M[0, 1] == 0 else ChangeKind.LINEAR
    return linear_change(F, M, kind, f"straighten {normalize_direction(direction)}")


def blow_up_transform(F, direction=HORIZONTAL):
    """
    Germ at the infinitely near point of the direction, in the chart
    (x, y) -> (x, x y) after the direction is put on the x-axis.
    The exceptional divisor is {x = 0}; one jet order is consumed.
    """
    if not is_fixed_direction(F.linear_part, direction):
        raise NotFixedDirection(
            f"direction {normalize_direction(direction)} is not fixed by DF(0)",
            "blow_up_transform",
        )
    G = straighten(F, direction)
    n = G.order
    if n < 2:
        raise ValueError("blow-up needs jets of order at least 2")
    H1 = G.F1.blow_up_substitution()
    H2 = G.F2.blow_up_substitution()
    unit = H1.shift_x_down(1)
    B1 = H1.truncate(n - 1)
    B2 = H2.shift_x_down(1) * unit.reciprocal()
    change = CoordinateChange(ChangeKind.BLOW_UP, None, None, "blow-up at [1:0]")
    return GermDiffeo(B1, B2, G.history + (change,))


def eigen_recursion(F, eigenvalue, depth):
    """Spectra of the successive blow-ups along the eigen-direction of one eigenvalue."""
    spectra = [spectrum(F)]
    G = F
    for _ in range(depth):
        G = blow_up_transform(G, spectra[-1].direction_for(eigenvalue))
        spectra.append(spectrum(G))
    return spectra


@dataclass(frozen=True)
class VectorFieldJet:
    Z1: BiJet
    Z2: BiJet

    def __post_init__(self):
        if abs(self.Z1[0, 0]) > ZERO_TOL or abs(self.Z2[0, 0]) > ZERO_TOL:
            raise NonzeroConstantTerm("vector field is not singular at 0", "VectorFieldJet")

    @classmethod
    def from_terms(cls, terms1, terms2, order):
        return cls(BiJet.from_terms(terms1, order), BiJet.from_terms(terms2, order))

    @property
    def order(self):
        return min(self.Z1.order, self.Z2.order)

    def scaled(self, t):
        return VectorFieldJet(self.Z1 * t, self.Z2 * t)

    def lie_derivative(self, g):
        n = g.order
        return self.Z1 * g.dx().with_order(n) + self.Z2 * g.dy().with_order(n)


def exp_vector_field(Z, max_terms=200, threshold=1e-18):
    """Time-one flow from the Lie series sum Z^j(coordinate)/j!."""
    n = Z.order
    components = []
    for coordinate in (BiJet.x(n), BiJet.y(n)):
        term = coordinate
        total = coordinate
        for j in range(1, max_terms):
            term = Z.lie_derivative(term) * (1.0 / j)
            total = total + term
            if term.norm() < threshold:
                break
        components.append(total)
    return GermDiffeo(*components)


@dataclass(frozen=True, eq=False)
class PolynomialMap:
    """Exact polynomial map; ``substeps`` applications per call realise F^n."""

    c1: np.ndarray
    c2: np.ndarray
    substeps: int = 1

    @classmethod
    def from_germ(cls, F):
        return cls(writable(F.F1.coeffs), writable(F.F2.coeffs))

    @classmethod
    def from_coefficients(cls, c1, c2):
        return cls(writable(np.atleast_2d(c1)), writable(np.atleast_2d(c2)))

    def iterated(self, n):
        return replace(self, substeps=self.substeps * n)

    def __call__(self, xs, ys):
        shape = np.shape(xs)
        xs = writable(np.ravel(xs))
        ys = writable(np.ravel(ys))
        for _ in range(self.substeps):
            xs, ys = poly_values(self.c1, xs, ys), poly_values(self.c2, xs, ys)
        return xs.reshape(shape), ys.reshape(shape)

    def to_germ(self, order):
        return GermDiffeo(BiJet(self.c1, order), BiJet(self.c2, order))

"""
Truncated power series.

``UniJet`` is a series in one complex variable modulo s^(N+1), ``BiJet`` a
series in two variables modulo total degree N+1. Both are immutable; every
operation returns a new jet whose order is the smallest order of its inputs
(derivatives drop one order, integrals gain one).
"""
import cmath
import logging
import math

import numpy as np

from germstable.proc_funcs.kernels import bijet_product, poly_values
from germstable.util_funcs.errors import (
    NonzeroConstantTerm,
    NotInvertible,
    UndefinedForPZero,
    ZeroConstantTerm,
    ZeroLeadingCoefficient,
)

logger = logging.getLogger(__name__)

ZERO_TOL = 1e-14


def principal_log(z):
    """Logarithm with imaginary part in (-pi, pi]."""
    w = cmath.log(z)
    if w.imag <= -math.pi:
        w += 2j * math.pi
    return w


def _frozen(array):
    array.setflags(write=False)
    return array


def writable(array):
    # compiled kernels reject read-only buffers
    return np.array(array, dtype=np.complex128, order="C", copy=True)


class UniJet:
    __slots__ = ("_c",)

    def __init__(self, coefficients, order=None):
        c = np.asarray(coefficients, dtype=np.complex128).ravel()
        if order is None:
            order = max(c.size - 1, 0)
        if order < 0:
            raise ValueError("order must be non-negative")
        buf = np.zeros(order + 1, dtype=np.complex128)
        n = min(c.size, order + 1)
        buf[:n] = c[:n]
        self._c = _frozen(buf)

    @classmethod
    def variable(cls, order):
        return cls([0, 1], order)

    @classmethod
    def constant(cls, value, order):
        return cls([value], order)

    @property
    def coeffs(self):
        return self._c

    @property
    def order(self):
        return self._c.size - 1

    def __getitem__(self, n):
        # coefficients beyond the order read as zero
        if 0 <= n <= self.order:
            return complex(self._c[n])
        return 0j

    def __len__(self):
        return self._c.size

    def __repr__(self):
        terms = ", ".join(f"{c:.6g}" for c in self._c)
        return f"UniJet([{terms}], order={self.order})"

    def _coerce(self, other):
        if isinstance(other, UniJet):
            return other
        if np.isscalar(other):
            return UniJet.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        return UniJet(self._c[: n + 1] + other._c[: n + 1], n)

    __radd__ = __add__

    def __neg__(self):
        return UniJet(-self._c, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, UniJet):
            n = min(self.order, other.order)
            product = np.convolve(self._c[: n + 1], other._c[: n + 1])
            return UniJet(product[: n + 1], n)
        if np.isscalar(other):
            return UniJet(self._c * other, self.order)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, UniJet):
            return self * other.reciprocal()
        if np.isscalar(other):
            return UniJet(self._c / other, self.order)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("only non-negative integer powers; use unit_power")
        result = UniJet.constant(1.0, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __call__(self, s):
        return np.polynomial.polynomial.polyval(s, self._c)

    def reciprocal(self):
        c0 = self._c[0]
        if abs(c0) <= ZERO_TOL:
            raise ZeroConstantTerm("reciprocal of a non-unit", "UniJet.reciprocal")
        b = np.zeros_like(self._c)
        b[0] = 1 / c0
        for n in range(1, self.order + 1):
            b[n] = -np.dot(self._c[1 : n + 1], b[n - 1 :: -1][:n]) / c0
        return UniJet(b, self.order)

    def derivative(self):
        if self.order == 0:
            return UniJet([0], 0)
        return UniJet(self._c[1:] * np.arange(1, self.order + 1), self.order - 1)

    def integral(self):
        c = np.zeros(self.order + 2, dtype=np.complex128)
        c[1:] = self._c / np.arange(1, self.order + 2)
        return UniJet(c, self.order + 1)

    def valuation(self, tol=ZERO_TOL):
        nonzero = np.flatnonzero(np.abs(self._c) > tol)
        return int(nonzero[0]) if nonzero.size else None

    def truncate(self, n):
        return UniJet(self._c, min(n, self.order))

    def with_order(self, n):
        """Truncate or zero pad to order n (padding is exact for polynomials)."""
        return UniJet(self._c, n)

    def shift_up(self, k):
        """Multiply by s^k."""
        return UniJet(np.concatenate([np.zeros(k), self._c]), self.order + k)

    def shift_down(self, k, tol=1e-9):
        """Divide by s^k; the first k coefficients must vanish."""
        if k > self.order:
            return UniJet([0], 0)
        if k and np.max(np.abs(self._c[:k])) > tol * max(1.0, self.norm()):
            raise ValueError(f"series is not divisible by s^{k}")
        return UniJet(self._c[k:], self.order - k)

    def unit_power(self, alpha):
        """u^alpha for a unit u, principal branch at the constant term."""
        c0 = self[0]
        if abs(c0) <= ZERO_TOL:
            raise ZeroConstantTerm("power of a non-unit", "UniJet.unit_power")
        _, log_series = log_unit_series(self)
        return exp_series(log_series * alpha) * cmath.exp(alpha * principal_log(c0))

    def norm(self):
        return float(np.max(np.abs(self._c))) if self._c.size else 0.0

    def residual(self, other, upto=None):
        n = min(self.order, other.order)
        if upto is not None:
            n = min(n, upto)
        return float(np.max(np.abs(self._c[: n + 1] - other._c[: n + 1])))

    def allclose(self, other, tol=1e-10):
        if not isinstance(other, UniJet):
            other = UniJet(other, self.order)
        return self.residual(other) <= tol


def compose(f, g):
    """f(g(s)) for g without constant term."""
    if abs(g[0]) > ZERO_TOL:
        raise NonzeroConstantTerm("inner series has a constant term", "compose")
    n = min(f.order, g.order)
    g = UniJet(np.concatenate([[0], g.coeffs[1:]]), n)
    acc = UniJet.constant(f[n], n)
    for k in range(n - 1, -1, -1):
        acc = acc * g + f[k]
    return acc


def comp_inverse(f):
    """Series g with f(g(s)) = g(f(s)) = s, solved coefficient by coefficient."""
    if abs(f[0]) > ZERO_TOL:
        raise NonzeroConstantTerm("series has a constant term", "comp_inverse")
    if abs(f[1]) <= ZERO_TOL:
        raise NotInvertible("linear coefficient vanishes", "comp_inverse")
    n = f.order
    g = np.zeros(n + 1, dtype=np.complex128)
    g[1] = 1 / f[1]
    for k in range(2, n + 1):
        g[k] = -compose(f, UniJet(g, n))[k] / f[1]
    return UniJet(g, n)


def log_unit_series(u):
    """Split log u = log u_0 + L(s) with L(0) = 0, principal log u_0."""
    mu = u[0]
    if abs(mu) <= ZERO_TOL:
        raise ZeroConstantTerm("logarithm of a non-unit", "log_unit_series")
    v = u / mu
    if v.order == 0:
        return principal_log(mu), UniJet([0], 0)
    quotient = v.derivative() * v.reciprocal().truncate(v.order - 1)
    return principal_log(mu), quotient.integral()


def exp_series(L):
    """exp(L) for L without constant term."""
    if abs(L[0]) > ZERO_TOL:
        raise NonzeroConstantTerm("exponent has a constant term", "exp_series")
    n = L.order
    e = np.zeros(n + 1, dtype=np.complex128)
    e[0] = 1
    weighted = L.coeffs * np.arange(n + 1)
    for m in range(1, n + 1):
        e[m] = np.dot(weighted[1 : m + 1], e[m - 1 :: -1][:m]) / m
    return UniJet(e, n)


def solve_power_conjugacy(A, k, order=None):
    """
    rho(x) = x (A(x)/A(0))^(1/k) with rho(x)^k A(0) = x^k A(x).

    A is treated as a polynomial, so padding it to the requested order is exact.
    """
    if k < 1:
        raise ValueError("k must be positive")
    if abs(A[0]) <= ZERO_TOL:
        raise ZeroLeadingCoefficient("A(0) vanishes", "solve_power_conjugacy")
    n = order if order is not None else A.order + 1
    ratio = (A / A[0]).with_order(n - 1)
    return ratio.unit_power(1.0 / k).shift_up(1)


def solve_meromorphic_conjugacy(A, p, order=None):
    """
    zeta(x) = x S(x)^(-1/p) with -A_0/(p zeta^p) equal to the principal part
    sum_{j<p} A_j x^(j-p)/(j-p).
    """
    if p == 0:
        raise UndefinedForPZero("no meromorphic part for p = 0", "solve_meromorphic_conjugacy")
    if abs(A[0]) <= ZERO_TOL:
        raise ZeroLeadingCoefficient("A(0) vanishes", "solve_meromorphic_conjugacy")
    n = order if order is not None else max(A.order, p) + 1
    s = np.zeros(n, dtype=np.complex128)
    s[0] = 1
    for j in range(1, p):
        s[j] = p * A[j] / ((p - j) * A[0])
    return UniJet(s, n - 1).unit_power(-1.0 / p).shift_up(1)


def _degree_mask(order):
    idx = np.arange(order + 1)
    return np.add.outer(idx, idx) > order


class BiJet:
    """Series sum c[i, j] x^i y^j modulo total degree N + 1."""

    __slots__ = ("_c",)

    def __init__(self, coefficients, order=None):
        c = np.asarray(coefficients, dtype=np.complex128)
        if c.ndim == 1:
            c = c[:, None]
        if order is None:
            order = max(c.shape[0] + c.shape[1] - 2, 0)
        buf = np.zeros((order + 1, order + 1), dtype=np.complex128)
        a = min(c.shape[0], order + 1)
        b = min(c.shape[1], order + 1)
        buf[:a, :b] = c[:a, :b]
        buf[_degree_mask(order)] = 0
        self._c = _frozen(buf)

    @classmethod
    def zeros(cls, order):
        return cls(np.zeros((1, 1)), order)

    @classmethod
    def constant(cls, value, order):
        return cls([[value]], order)

    @classmethod
    def x(cls, order):
        return cls.from_terms({(1, 0): 1}, order)

    @classmethod
    def y(cls, order):
        return cls.from_terms({(0, 1): 1}, order)

    @classmethod
    def from_terms(cls, terms, order):
        c = np.zeros((order + 1, order + 1), dtype=np.complex128)
        for (i, j), value in terms.items():
            if i + j <= order:
                c[i, j] += value
        return cls(c, order)

    @classmethod
    def from_unijet_x(cls, u, order=None):
        """The series u(x) as a function of (x, y)."""
        order = u.order if order is None else order
        c = np.zeros((order + 1, 1), dtype=np.complex128)
        n = min(order, u.order)
        c[: n + 1, 0] = u.coeffs[: n + 1]
        return cls(c, order)

    @property
    def coeffs(self):
        return self._c

    @property
    def order(self):
        return self._c.shape[0] - 1

    def __getitem__(self, index):
        i, j = index
        if i >= 0 and j >= 0 and i + j <= self.order:
            return complex(self._c[i, j])
        return 0j

    def __repr__(self):
        terms = {
            (int(i), int(j)): complex(self._c[i, j])
            for i, j in zip(*np.nonzero(np.abs(self._c) > ZERO_TOL))
        }
        return f"BiJet({terms}, order={self.order})"

    def _coerce(self, other):
        if isinstance(other, BiJet):
            return other
        if np.isscalar(other):
            return BiJet.constant(other, self.order)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = min(self.order, other.order)
        return BiJet(self._c[: n + 1, : n + 1] + other._c[: n + 1, : n + 1], n)

    __radd__ = __add__

    def __neg__(self):
        return BiJet(-self._c, self.order)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, BiJet):
            n = min(self.order, other.order)
            product = bijet_product(
                writable(self._c[: n + 1, : n + 1]), writable(other._c[: n + 1, : n + 1]), n
            )
            return BiJet(product, n)
        if np.isscalar(other):
            return BiJet(self._c * other, self.order)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, BiJet):
            return self * other.reciprocal()
        if np.isscalar(other):
            return BiJet(self._c / other, self.order)
        return NotImplemented

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)) or n < 0:
            raise ValueError("only non-negative integer powers")
        result = BiJet.constant(1.0, self.order)
        for _ in range(n):
            result = result * self
        return result

    def __call__(self, x, y):
        xa, ya = np.broadcast_arrays(
            np.asarray(x, dtype=np.complex128), np.asarray(y, dtype=np.complex128)
        )
        out = poly_values(writable(self._c), writable(xa.ravel()), writable(ya.ravel()))
        if xa.ndim == 0:
            return complex(out[0])
        return out.reshape(xa.shape)

    def truncate(self, n):
        return BiJet(self._c, min(n, self.order))

    def with_order(self, n):
        return BiJet(self._c, n)

    def norm(self):
        return float(np.max(np.abs(self._c)))

    def residual(self, other):
        n = min(self.order, other.order)
        return float(np.max(np.abs(self._c[: n + 1, : n + 1] - other._c[: n + 1, : n + 1])))

    def allclose(self, other, tol=1e-10):
        return self.residual(other) <= tol

    def reciprocal(self):
        c0 = self._c[0, 0]
        if abs(c0) <= ZERO_TOL:
            raise ZeroConstantTerm("reciprocal of a non-unit", "BiJet.reciprocal")
        w = self / c0 - 1.0
        term = BiJet.constant(1.0, self.order)
        acc = term
        for _ in range(self.order):
            term = term * (-w)
            acc = acc + term
        return acc / c0

    def dx(self):
        if self.order == 0:
            return BiJet.zeros(0)
        c = self._c[1:, :-1] * np.arange(1, self.order + 1)[:, None]
        return BiJet(c, self.order - 1)

    def dy(self):
        if self.order == 0:
            return BiJet.zeros(0)
        c = self._c[:-1, 1:] * np.arange(1, self.order + 1)[None, :]
        return BiJet(c, self.order - 1)

    def on_axis(self):
        """F(x, 0) as a series in x."""
        return UniJet(self._c[:, 0], self.order)

    def y_linear(self):
        """dF/dy (x, 0) as a series in x."""
        if self.order == 0:
            return UniJet([0], 0)
        return UniJet(self._c[:-1, 1], self.order - 1)

    def y_slice(self, j):
        """Coefficient of y^j as a series in x."""
        if j > self.order:
            return UniJet([0], 0)
        return UniJet(self._c[: self.order + 1 - j, j], self.order - j)

    def substitute(self, g1, g2):
        """F(g1(x, y), g2(x, y)) for g1, g2 without constant terms."""
        if abs(g1[0, 0]) > ZERO_TOL or abs(g2[0, 0]) > ZERO_TOL:
            raise NonzeroConstantTerm("substituted series has a constant term", "BiJet.substitute")
        n = min(self.order, g1.order, g2.order)
        g1 = g1.truncate(n) - g1[0, 0]
        g2 = g2.truncate(n) - g2[0, 0]
        powers = [BiJet.constant(1.0, n)]
        for _ in range(n):
            powers.append(powers[-1] * g2)
        acc = BiJet.zeros(n)
        for i in range(n, -1, -1):
            inner = np.zeros((n + 1, n + 1), dtype=np.complex128)
            for j in range(n + 1 - i):
                if self._c[i, j] != 0:
                    inner += self._c[i, j] * powers[j].coeffs
            acc = acc * g1 + BiJet(inner, n)
        return acc

    def along_curve(self, gamma1, gamma2):
        """F(gamma1(s), gamma2(s)) for curve jets without constant terms."""
        if abs(gamma1[0]) > ZERO_TOL or abs(gamma2[0]) > ZERO_TOL:
            raise NonzeroConstantTerm("curve does not pass through the origin", "BiJet.along_curve")
        n = min(self.order, gamma1.order, gamma2.order)
        g1 = gamma1.truncate(n)
        g2 = gamma2.truncate(n)
        powers = [UniJet.constant(1.0, n)]
        for _ in range(n):
            powers.append(powers[-1] * g2)
        acc = UniJet([0], n)
        for i in range(n, -1, -1):
            inner = np.zeros(n + 1, dtype=np.complex128)
            for j in range(n + 1 - i):
                inner += self._c[i, j] * powers[j].coeffs
            acc = acc * g1 + UniJet(inner, n)
        return acc

    def blow_up_substitution(self):
        """F(x, x y); the result is divisible by x when F(0, 0) = 0."""
        n = self.order
        c = np.zeros((n + 1, n + 1), dtype=np.complex128)
        for i in range(n + 1):
            for j in range(n + 1 - i):
                if i + 2 * j <= n:
                    c[i + j, j] = self._c[i, j]
        return BiJet(c, n)

    def shift_x_down(self, k=1):
        """Divide by x^k; the terms of x-degree below k must vanish."""
        if k > self.order:
            return BiJet.zeros(0)
        n = self.order - k
        c = np.zeros((n + 1, n + 1), dtype=np.complex128)
        c[:, :] = self._c[k:, : n + 1]
        return BiJet(c, n)

    def max_x_valuation_defect(self, k):
        """Largest coefficient with x-degree below k."""
        if k <= 0:
            return 0.0
        return float(np.max(np.abs(self._c[:k, :])))

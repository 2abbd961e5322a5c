"""
Formal curves given by parametrization jets s -> (gamma1(s), gamma2(s)).
"""
import cmath
import logging
import math
from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property, reduce

import numpy as np

from germstable.jet_funcs.germ import (
    GermDiffeo,
    blow_up_transform,
    direction_eigenvalue,
    is_fixed_direction,
    normalize_direction,
    spectrum,
    straightening_matrix,
)
from germstable.jet_funcs.jets import ZERO_TOL, BiJet, UniJet, comp_inverse, compose
from germstable.util_funcs.errors import (
    NotFixedDirection,
    NotInvariant,
    Obstructed,
    OrderExhausted,
    ZeroParametrization,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CurveBasics:
    multiplicity: int
    tangent: tuple
    irreducible: bool


@dataclass(frozen=True)
class FormalCurveJet:
    gamma1: UniJet
    gamma2: UniJet
    non_unique: tuple = ()

    @classmethod
    def graph(cls, g):
        """The curve y = g(x) as (s, g(s))."""
        return cls(UniJet.variable(g.order), g)

    @property
    def order(self):
        return min(self.gamma1.order, self.gamma2.order)

    @cached_property
    def basics(self):
        return curve_basics(self)

    @property
    def multiplicity(self):
        return self.basics.multiplicity

    @property
    def tangent(self):
        return self.basics.tangent

    @property
    def irreducible(self):
        return self.basics.irreducible

    def truncate(self, n):
        return FormalCurveJet(self.gamma1.truncate(n), self.gamma2.truncate(n), self.non_unique)

    def __call__(self, s):
        return self.gamma1(s), self.gamma2(s)


def curve_basics(gamma, tol=ZERO_TOL):
    v1 = gamma.gamma1.valuation(tol)
    v2 = gamma.gamma2.valuation(tol)
    if v1 is None and v2 is None:
        raise ZeroParametrization("parametrization vanishes to its order", "curve_basics")
    if v1 == 0 or v2 == 0:
        raise ZeroParametrization("curve does not pass through the origin", "curve_basics")
    nu = min(v for v in (v1, v2) if v is not None)
    tangent = normalize_direction((gamma.gamma1[nu], gamma.gamma2[nu]))
    support = np.flatnonzero(
        (np.abs(gamma.gamma1.coeffs[: gamma.order + 1]) > tol)
        | (np.abs(gamma.gamma2.coeffs[: gamma.order + 1]) > tol)
    )
    irreducible = reduce(math.gcd, (int(e) for e in support), 0) == 1
    return CurveBasics(nu, tangent, irreducible)


@dataclass(frozen=True)
class RestrictionData:
    theta: UniJet
    inner_eigenvalue: complex
    tangent_eigenvalue: complex
    restriction_order: int | None
    residual: float
    multiplicity: int
    curve: FormalCurveJet | None = field(default=None, compare=False)
    eigenvalues: tuple | None = None

    @property
    def r(self):
        """Exponent r of theta(s) = s + a s^(r+1) + ..., None when theta = id."""
        if self.restriction_order is None:
            return None
        return self.restriction_order - 1


def _unit_root(series, nu):
    """Series tau with tau^nu = series, for series of order exactly nu."""
    unit = series.shift_down(nu)
    if abs(unit[0]) <= ZERO_TOL:
        return None
    return unit.unit_power(1.0 / nu).shift_up(1)


def _curve_defect(F, gamma, theta, n):
    lhs1 = F.F1.along_curve(gamma.gamma1, gamma.gamma2)
    lhs2 = F.F2.along_curve(gamma.gamma1, gamma.gamma2)
    th = theta.with_order(n)
    rhs1 = compose(gamma.gamma1.truncate(n), th)
    rhs2 = compose(gamma.gamma2.truncate(n), th)
    d1 = (lhs1.truncate(n) - rhs1).coeffs
    d2 = (lhs2.truncate(n) - rhs2).coeffs
    return np.maximum(np.abs(d1), np.abs(d2))


def solve_restriction(F, gamma, tol=1e-9):
    """Solve F o gamma = gamma o theta for the one-variable germ theta."""
    basics = gamma.basics
    if not basics.irreducible:
        logger.warning("curve parametrization is not certified irreducible")
    nu = basics.multiplicity
    n = min(F.order, gamma.order)
    components = (gamma.gamma1.truncate(n), gamma.gamma2.truncate(n))
    image = (
        F.F1.along_curve(*components),
        F.F2.along_curve(*components),
    )
    i = max(
        (c for c in (0, 1) if components[c].valuation() == nu),
        key=lambda c: abs(components[c][nu]),
    )
    sigma = _unit_root(components[i], nu)
    tau = _unit_root(image[i], nu)
    if tau is None:
        raise NotInvariant(nu, "image of the curve has higher multiplicity", "solve_restriction")
    sigma_inv = comp_inverse(sigma)
    best = None
    for j in range(nu):
        omega = cmath.exp(2j * math.pi * j / nu)
        theta = compose(sigma_inv, tau * omega)
        defect = _curve_defect(F, gamma, theta, n)
        if best is None or np.max(defect) < np.max(best[1]):
            best = (theta, defect)
    theta, defect = best
    scale = max(1.0, gamma.gamma1.norm(), gamma.gamma2.norm())
    bad = np.flatnonzero(defect > tol * scale)
    if bad.size:
        raise NotInvariant(
            int(bad[0]),
            f"F o gamma - gamma o theta = {defect[bad[0]]:.3e}",
            "solve_restriction",
        )
    lam_inner = theta[1]
    L = F.linear_part
    lam_tangent = direction_eigenvalue(L, basics.tangent)
    rest = (theta - UniJet.variable(theta.order)).valuation(tol)
    sp = spectrum(F)
    logger.debug("restriction solved: lambda_G=%s, order=%s", lam_inner, rest)
    return RestrictionData(
        theta=theta,
        inner_eigenvalue=complex(lam_inner),
        tangent_eigenvalue=lam_tangent,
        restriction_order=rest,
        residual=float(np.max(defect)),
        multiplicity=nu,
        curve=gamma,
        eigenvalues=sp.eigenvalues,
    )


def _slope_and_swap(direction):
    a, b = normalize_direction(direction)
    if abs(a) >= abs(b):
        return b / a, False
    return a / b, True


def _swapped(F):
    x, y = BiJet.x(F.order), BiJet.y(F.order)
    return GermDiffeo(F.F2.substitute(y, x), F.F1.substitute(y, x))


def extend_invariant_jet(F, seed, target_order, tol=1e-10):
    """
    Non-singular invariant curve (s, g(s)) through a fixed direction, solved
    order by order. Resonant orders with a consistent right side get the
    coefficient 0 and are listed in ``non_unique``.
    """
    if isinstance(seed, FormalCurveJet):
        seed = seed.tangent
    if F.order < target_order:
        raise OrderExhausted(target_order, "germ jet is too short", "extend_invariant_jet")
    slope, swap = _slope_and_swap(seed)
    G = _swapped(F) if swap else F
    L = G.linear_part
    scale = max(1.0, float(np.max(np.abs(L))))
    if abs(L[0, 1]) <= tol * scale:
        coef = L[0, 0] - L[1, 1]
        if abs(coef) > tol * scale:
            solved = L[1, 0] / coef
            if abs(solved - slope) > 1e-8 * max(1.0, abs(solved)):
                raise NotFixedDirection(
                    f"invariant direction has slope {solved:.6g}", "extend_invariant_jet"
                )
            slope = solved
        elif abs(L[1, 0]) > tol * scale:
            raise Obstructed(1, "resonant linear part with nonzero coupling", "extend_invariant_jet")
    elif not is_fixed_direction(L, (1, slope)):
        raise NotFixedDirection("seed is not an eigen-direction", "extend_invariant_jet")

    g = np.zeros(target_order + 1, dtype=np.complex128)
    g[1] = slope
    non_unique = []
    for n in range(2, target_order + 1):
        Gn1 = G.F1.truncate(n)
        Gn2 = G.F2.truncate(n)
        s = UniJet.variable(n)

        def defect(value):
            g[n] = value
            gj = UniJet(g, n)
            theta = Gn1.along_curve(s, gj)
            return (Gn2.along_curve(s, gj) - compose(gj, theta))[n]

        e0 = defect(0.0)
        e1 = defect(1.0)
        coef = e1 - e0
        size = max(1.0, float(np.max(np.abs(g[:n]))))
        if abs(coef) <= tol * scale:
            if abs(e0) > tol * scale * size:
                raise Obstructed(n, f"resonant order with right side {abs(e0):.3e}", "extend_invariant_jet")
            g[n] = 0
            non_unique.append(n)
            logger.info("resonant order %d: coefficient set to 0", n)
        else:
            g[n] = -e0 / coef
        logger.debug("invariant jet order %d: coefficient %s", n, g[n])
    gj = UniJet(g, target_order)
    s = UniJet.variable(target_order)
    curve = FormalCurveJet(gj, s) if swap else FormalCurveJet(s, gj)
    return FormalCurveJet(curve.gamma1, curve.gamma2, tuple(non_unique))


@dataclass(frozen=True)
class ChainStep:
    point: tuple
    germ: GermDiffeo
    curve: FormalCurveJet
    multiplicity: int


def strict_transform(gamma, direction):
    """Strict transform of a curve tangent to the direction, in the blow-up chart."""
    M = straightening_matrix(direction)
    g1, g2 = gamma.gamma1, gamma.gamma2
    if M is not None:
        Mi = np.linalg.inv(M)
        g1, g2 = g1 * Mi[0, 0] + g2 * Mi[0, 1], g1 * Mi[1, 0] + g2 * Mi[1, 1]
    nu = g1.valuation()
    quotient = g2.shift_down(nu) / g1.shift_down(nu)
    return FormalCurveJet(g1.truncate(quotient.order), quotient)


def strict_transform_chain(F, gamma, depth):
    steps = []
    G, curve = F, gamma
    for step in range(1, depth + 1):
        basics = curve.basics
        if not is_fixed_direction(G.linear_part, basics.tangent):
            raise NotInvariant(step, f"tangent {basics.tangent} is not fixed", "strict_transform_chain")
        if G.order < 2 or curve.order < basics.multiplicity + 1:
            raise OrderExhausted(
                step + basics.multiplicity, "jets too short for another blow-up", "strict_transform_chain"
            )
        G = blow_up_transform(G, basics.tangent)
        curve = strict_transform(curve, basics.tangent)
        steps.append(ChainStep(basics.tangent, G, curve, curve.multiplicity))
        logger.debug("strict transform %d: multiplicity %d", step, curve.multiplicity)
    return steps


class InnerClass(IntEnum):
    PARABOLIC = 0
    RATIONALLY_NEUTRAL = 1
    HYPERBOLIC_ATTRACTING = 2
    HYPERBOLIC_REPELLING = 3
    IRRATIONALLY_NEUTRAL = 4


@dataclass(frozen=True)
class CuspPattern:
    p: int
    q: int
    c: complex
    resonance_defect: float
    membership_residual: float
    matches: bool


@dataclass(frozen=True)
class Classification:
    kind: InnerClass
    period: int | None = None
    cusp: CuspPattern | None = None

    @property
    def label(self):
        match self.kind:
            case InnerClass.RATIONALLY_NEUTRAL:
                return f"RationallyNeutral({self.period})"
            case InnerClass.PARABOLIC:
                return "Parabolic"
            case InnerClass.HYPERBOLIC_ATTRACTING:
                return "HyperbolicAttracting"
            case InnerClass.HYPERBOLIC_REPELLING:
                return "HyperbolicRepelling"
            case _:
                return "IrrationallyNeutral"


def cusp_pattern(curve, lam, mu, tol=1e-9):
    """
    Check the curve against v^p = c u^q with coprime q > p > 1 and lam^q = mu^p,
    u the tangent coordinate (eigenvalue lam) and v the transverse one (mu).
    """
    g1, g2 = curve.gamma1, curve.gamma2
    p, q = g1.valuation(), g2.valuation()
    if p is None or q is None:
        return None
    if p > q:
        # vertical tangent, the eigenvalues already follow the tangent
        g1, g2, p, q = g2, g1, q, p
    c = g2[q] ** p / g1[p] ** q
    resonance = abs(lam**q - mu**p)
    membership = (g2**p - g1**q * c).norm()
    matches = math.gcd(p, q) == 1 and q > p > 1 and resonance <= tol and membership <= tol
    return CuspPattern(p, q, complex(c), float(resonance), float(membership), matches)


def classify_inner(rd, root_tol=1e-9, order_bound=64, hyperbolic_tol=1e-9):
    lam = rd.inner_eigenvalue
    if abs(lam - 1) <= root_tol:
        return Classification(InnerClass.PARABOLIC)
    for n in range(2, order_bound + 1):
        if abs(lam**n - 1) <= root_tol:
            return Classification(InnerClass.RATIONALLY_NEUTRAL, period=n)
    if abs(lam) < 1 - hyperbolic_tol:
        cusp = None
        if rd.multiplicity > 1 and rd.curve is not None and rd.eigenvalues is not None:
            lam_t = rd.tangent_eigenvalue
            others = [ev for ev in rd.eigenvalues if abs(ev - lam_t) > 1e-12] or [rd.eigenvalues[1]]
            cusp = cusp_pattern(rd.curve, lam_t, others[0], root_tol)
        return Classification(InnerClass.HYPERBOLIC_ATTRACTING, cusp=cusp)
    if abs(lam) > 1 + hyperbolic_tol:
        return Classification(InnerClass.HYPERBOLIC_REPELLING)
    return Classification(InnerClass.IRRATIONALLY_NEUTRAL)

"""
Reduction of a parabolic pair (F, Gamma) to the form

    x o F = x - x^(k+p+1) + O(x^(k+p+1) y, x^(2k+2p+1))
    y o F = mu [y + x^k a(x) y + O(x^(k+p+1) y) + b(x)]

followed by the classification of the k+p attracting directions.
"""
import cmath
import logging
import math
from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from germstable.jet_funcs.curve import (
    InnerClass,
    classify_inner,
    solve_restriction,
    strict_transform,
)
from germstable.jet_funcs.germ import (
    ChangeKind,
    GermDiffeo,
    blow_up_transform,
    change_coordinates,
    linear_change,
    shear,
    straightening_matrix,
)
from germstable.jet_funcs.jets import BiJet, UniJet, comp_inverse, compose, log_unit_series
from germstable.util_funcs.errors import (
    NotParabolic,
    OrderExhausted,
    ReductionFailed,
    RestrictionIsIdentity,
)

logger = logging.getLogger(__name__)

PREDICATE_TOL = 1e-10


@dataclass(frozen=True)
class ReducedPair:
    germ: GermDiffeo
    k: int
    p: int
    mu: complex
    a: UniJet
    A: UniJet
    log_mu: complex
    gamma2: UniJet
    blowups: int = 0

    @property
    def r(self):
        return self.k + self.p

    @property
    def contact_order(self):
        """Order of contact of the curve with the x-axis, None for a vanishing jet."""
        return self.gamma2.valuation(PREDICATE_TOL)

    @property
    def b_order(self):
        return self.germ.F2.on_axis().valuation(PREDICATE_TOL)

    @property
    def history(self):
        return self.germ.history

    def predicate_defects(self):
        return reduced_form_defects(self.germ, self.k, self.p)

    def is_reduced(self, tol=PREDICATE_TOL):
        return max(self.predicate_defects().values()) <= tol

    def rotated(self, xi):
        """Conjugate by (xi x, y), sending the direction xi R+ to R+."""
        xi = complex(xi)
        if abs(xi - 1) <= 1e-15:
            return self
        G = linear_change(self.germ, np.diag([xi, 1]), ChangeKind.LINEAR, f"rotate by {xi:.6g}")
        gamma2 = compose(self.gamma2, UniJet([0, xi], self.gamma2.order))
        return _assemble(G, self.k, self.p, gamma2, self.blowups)


def reduced_form_defects(G, k, p):
    """Largest violation of each reduced-form coefficient predicate."""
    r = k + p
    F1, F2 = G.F1, G.F2
    n = G.order
    mu = F2[0, 1]
    scale = max(1.0, abs(mu))
    defects = {
        "F1 x coefficient": abs(F1[1, 0] - 1),
        "F1 x^(r+1) coefficient": abs(F1[r + 1, 0] + 1),
        "F1 x^i terms": max([abs(F1[i, 0]) for i in range(2, min(2 * r, n) + 1) if i != r + 1] or [0.0]),
        "F1 y terms": max(
            [abs(F1[i, j]) for i in range(0, min(r + 1, n + 1)) for j in range(1, n + 1 - i)] or [0.0]
        ),
        "F2 y coefficient": 0.0 if abs(mu) > PREDICATE_TOL else 1.0,
        "F2 low x^j y terms": max([abs(F2[j, 1]) for j in range(1, k)] or [0.0]) / scale,
        "F2 a(0)": 0.0 if abs(F2[k, 1]) > PREDICATE_TOL * scale else 1.0,
        "F2 y^2 terms": max(
            [abs(F2[i, j]) for i in range(0, min(r + 1, n + 1)) for j in range(2, n + 1 - i)] or [0.0]
        )
        / scale,
        "F2 b terms": max([abs(F2[i, 0]) for i in range(0, min(r + 1, n) + 1)] or [0.0]) / scale,
    }
    return {name: float(value) for name, value in defects.items()}


def principal_part(G, k, p):
    """(mu, a, log mu, A) read off a germ in reduced form."""
    mu = G.F2[0, 1]
    a = UniJet([G.F2[k + j, 1] / mu for j in range(p + 1)], p)
    unit = UniJet.constant(1.0, k + p) + a.shift_up(k).with_order(k + p)
    log_mu, L = log_unit_series(unit * mu)
    A = UniJet([L[k + j] for j in range(p + 1)], p)
    return complex(mu), a, log_mu, A


def _assemble(G, k, p, gamma2, blowups):
    mu, a, log_mu, A = principal_part(G, k, p)
    return ReducedPair(G, k, p, mu, a, A, log_mu, gamma2, blowups)


def _split_k_p(G, r, tol):
    mu = G.F2[0, 1]
    c = G.F2.y_linear() / mu - 1.0
    t = c.truncate(r).valuation(tol)
    if t is None or t >= r:
        return r, 0
    return t, r - t


def _x_normalization(G, r):
    """h(x) with h^-1 o F1(., 0) o h = x - x^(r+1) + O(x^(2r+1))."""
    f = G.F1.on_axis()
    n = f.order
    alpha = f[r + 1]
    beta = (-1.0 / alpha) ** (1.0 / r)
    h = UniJet([0, beta], n)
    f = compose(f, h) / beta
    for m in range(2, r + 1):
        e = f[r + m]
        if abs(e) <= 1e-15:
            continue
        step = UniJet.variable(n) + UniJet([0] * m + [e / (r + 1 - m)], n)
        f = compose(comp_inverse(step), compose(f, step))
        h = compose(h, step)
    return h


def _polynomial_change(G, h, note):
    n = G.order
    hx = BiJet.from_unijet_x(h.with_order(n), n)
    hix = BiJet.from_unijet_x(comp_inverse(h.with_order(n)), n)
    y = BiJet.y(n)
    return change_coordinates(
        G,
        GermDiffeo(hx, y),
        kind=ChangeKind.POLYNOMIAL,
        phi_inverse=GermDiffeo(hix, y),
        note=note,
    )


def _nonsingular_graph(F, curve, tol):
    """Blow up until the curve is non-singular, put it tangent to the x-axis, return (G, g, blowups)."""
    G = F
    blowups = 0
    while curve.multiplicity > 1:
        tangent = curve.tangent
        G = blow_up_transform(G, tangent)
        curve = strict_transform(curve, tangent)
        blowups += 1
        logger.info("desingularizing blow-up %d, multiplicity %d", blowups, curve.multiplicity)
    M = straightening_matrix(curve.tangent)
    g1, g2 = curve.gamma1, curve.gamma2
    if M is not None:
        G = linear_change(G, M, ChangeKind.LINEAR, "tangent to x-axis")
        Mi = np.linalg.inv(M)
        g1, g2 = g1 * Mi[0, 0] + g2 * Mi[0, 1], g1 * Mi[1, 0] + g2 * Mi[1, 1]
    g = compose(g2, comp_inverse(g1))
    return G, g, blowups


def reduce_pair(F, gamma, tol=PREDICATE_TOL, restriction=None):
    rd = restriction if restriction is not None else solve_restriction(F, gamma)
    kind = classify_inner(rd).kind
    if kind != InnerClass.PARABOLIC:
        raise NotParabolic(f"inner eigenvalue {rd.inner_eigenvalue:.6g}", "reduce_pair")
    if rd.restriction_order is None:
        raise RestrictionIsIdentity("F restricted to the curve is the identity", "reduce_pair")
    r = rd.restriction_order - 1
    if F.order < 2 * r + 2:
        raise OrderExhausted(2 * r + 2 + rd.multiplicity - 1, "jet order too small", "reduce_pair")

    G, g, blowups = _nonsingular_graph(F, gamma, tol)
    for attempt in range(r + 3):
        if G.order < 2 * r + 2:
            raise OrderExhausted(F.order - G.order + 2 * r + 2, "jet order too small", "reduce_pair")
        jet = g.truncate(r + 1)
        if jet.norm() > 1e-15:
            G = shear(G, jet, f"shear by J_{r + 1} gamma2")
            g = g - jet.with_order(g.order)
        k, p = _split_k_p(G, r, tol)
        h = _x_normalization(G, r)
        if (h - UniJet.variable(h.order)).norm() > 1e-15:
            trial = _polynomial_change(G, h, "x normalization")
            trial_g = compose(g, h.with_order(g.order))
        else:
            trial, trial_g = G, g
        defects = reduced_form_defects(trial, k, p)
        worst = max(defects, key=defects.get)
        logger.info("reduction pass %d: k=%d p=%d worst predicate %s = %.3e", attempt, k, p, worst, defects[worst])
        if defects[worst] <= tol:
            return _assemble(trial, k, p, trial_g, blowups)
        G = blow_up_transform(G)
        g = g.shift_down(1)
        blowups += 1
    raise ReductionFailed(f"no reduced form after {r + 3} passes", "reduce_pair")


def refine_contact(rp, m, want_re_positive=False):
    """Raise the contact order to k+p+m and, when asked, make Re A_p positive by blow-ups."""
    if m < rp.p + 2:
        raise ValueError("contact exponent m must be at least p + 2")
    n_blow = 0
    if want_re_positive and rp.A[rp.p].real <= 0:
        n_blow = math.floor(-rp.A[rp.p].real) + 1
    target = rp.r + m + n_blow - 1
    needed = rp.r + m + n_blow
    if rp.germ.order < needed:
        raise OrderExhausted(needed, "jet order too small for the requested contact", "refine_contact")
    G, g = rp.germ, rp.gamma2
    jet = g.truncate(target)
    if jet.norm() > 1e-15:
        G = shear(G, jet, f"shear by J_{target} gamma2")
        g = g - jet.with_order(g.order)
    for _ in range(n_blow):
        G = blow_up_transform(G)
        g = g.shift_down(1)
    refined = _assemble(G, rp.k, rp.p, g, rp.blowups + n_blow)
    logger.info("refined contact: m=%d, %d blow-ups, A_p=%s", m, n_blow, refined.A[rp.p])
    return refined


class DirectionKind(IntEnum):
    SADDLE = 0
    NODE = 1


@dataclass(frozen=True)
class DirectionReport:
    index: int
    xi: complex
    kind: DirectionKind
    witness: tuple
    r_l: int | None

    @property
    def label(self):
        return "Node" if self.kind == DirectionKind.NODE else "Saddle"


def direction_reports(k, p, mu, A, zero_band=1e-9, unit_tol=1e-9):
    r = k + p
    log_abs = math.log(abs(mu))
    on_circle = abs(abs(mu) - 1) <= unit_tol
    reports = []
    for j in range(r):
        xi = cmath.exp(2j * math.pi * j / r)
        if j == 0:
            xi = 1 + 0j
        witness = (log_abs,) + tuple((xi ** (k + i) * A[i]).real for i in range(p))
        leading = next((v for v in witness if abs(v) > zero_band), 0.0)
        kind = DirectionKind.NODE if leading < 0 else DirectionKind.SADDLE
        r_l = None
        if on_circle:
            r_l = next((i for i, v in enumerate(witness[1:]) if abs(v) > zero_band), p)
        reports.append(DirectionReport(j, xi, kind, witness, r_l))
    return reports


def attracting_directions(rp, zero_band=1e-9):
    return direction_reports(rp.k, rp.p, rp.mu, rp.A, zero_band)


def saddle_count_bound(k, p):
    return math.ceil((k + p) / 4)

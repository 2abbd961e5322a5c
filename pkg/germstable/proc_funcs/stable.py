"""
Stable sets attached to the attracting directions of a reduced pair.

Saddle directions carry a parabolic curve y = u(x), found as the fixed point
of the orbit-sum operator

    T u(x0) = sum_j mu^-j E(x0) E(x_j)^-1 H(x_j, u(x_j)),

node directions carry the open set S = {x in R, |y - J gamma2(x)| < |x|^(p+1)}.
Everything here works in coordinates rotated so that the direction is R+.
"""
import logging
import math
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from germstable.jet_funcs.jets import UniJet, writable
from germstable.proc_funcs.kernels import picard_sweep, poly_values
from germstable.proc_funcs.reduction import DirectionKind, refine_contact
from germstable.util_funcs.errors import (
    AtOrigin,
    CannotFit,
    InterpolationBreakdown,
    NoContraction,
    NotNode,
    NotSaddle,
)

logger = logging.getLogger(__name__)

# largest exponent handed to exp, leaves headroom below the float64 overflow at 709.78
LOG_CEILING = 700.0


class WeightMode(IntEnum):
    RESTRICTED = 0
    FULL = 1


class RegionCase(IntEnum):
    GENERIC_WEDGE = 0
    UPPER_FLAT = 1
    LOWER_FLAT = 2


class StableKind(IntEnum):
    PARABOLIC_CURVE = 0
    NODE_BASIN = 1


def _mode(mode):
    if isinstance(mode, str):
        return WeightMode[mode.upper()]
    return WeightMode(mode)


def weight_exponent(rp, x, mode=WeightMode.RESTRICTED):
    """r(x) = sum_{j<p} A_j x^(j-p)/(p-j) - A_p log x, plus log mu/((k+p) x^(k+p)) in full mode."""
    x = np.asarray(x, dtype=np.complex128)
    if np.any(x == 0):
        raise AtOrigin("weight is singular at x = 0", "eval_weight")
    p, A = rp.p, rp.A
    acc = -A[p] * np.log(x)
    for j in range(p):
        acc = acc + A[j] * x ** (j - p) / (p - j)
    if _mode(mode) == WeightMode.FULL:
        acc = acc + rp.log_mu / (rp.r * x**rp.r)
    return acc


def eval_weight(rp, x, mode=WeightMode.RESTRICTED):
    value = np.exp(weight_exponent(rp, x, mode))
    return complex(value) if np.ndim(value) == 0 else value


def first_integral(rp, x, y):
    """y / E_full(x), constant along the time-one map of the model vector field."""
    return np.asarray(y, dtype=np.complex128) / eval_weight(rp, x, WeightMode.FULL)


def eval_residual_H(rp, x, y):
    """H(x, y) = y - mu^-1 E(x) E(F1(x, y))^-1 F2(x, y)."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    f1, f2 = rp.germ(x, y)
    f1 = np.asarray(f1)
    ratio = np.exp(weight_exponent(rp, x) - weight_exponent(rp, f1))
    value = y - ratio * np.asarray(f2) / rp.mu
    return complex(value) if np.ndim(value) == 0 else value


def residual_constant(rp, x, y, m):
    """Fitted C with |H| <= C (|x|^(k+p+1)|y| + |x|^k |y|^2 + |x|^(k+p+m))."""
    x = np.asarray(x, dtype=np.complex128)
    y = np.asarray(y, dtype=np.complex128)
    ax, ay = np.abs(x), np.abs(y)
    scale = ax ** (rp.r + 1) * ay + ax**rp.k * ay**2 + ax ** (rp.r + m)
    return float(np.max(np.abs(eval_residual_H(rp, x, y)) / scale))


@dataclass(frozen=True)
class RegionDescriptor:
    """Region in coordinates rotated by conj(xi): |x| < eps, Re x > 0, lower(t) < Im x < upper(t)."""

    xi: complex
    case: RegionCase
    d: float
    e: float
    eps: float
    r: int
    mode: DirectionKind
    c_fit: float = 0.0
    halvings: int = 0

    @property
    def powers(self):
        match self.case:
            case RegionCase.UPPER_FLAT:
                return 1.0, float(self.r + 1)
            case RegionCase.LOWER_FLAT:
                return float(self.r + 1), 1.0
            case _:
                return 1.0, 1.0

    @property
    def t_max(self):
        return self.eps / math.sqrt(1 + max(self.d, self.e) ** 2)

    def bounds(self, t):
        lp, up = self.powers
        t = np.asarray(t, dtype=float)
        return -self.d * t**lp, self.e * t**up

    def contains(self, x, slack=0.0):
        x = np.asarray(x, dtype=np.complex128)
        t = x.real
        with np.errstate(invalid="ignore"):
            lower, upper = self.bounds(np.maximum(t, 0.0))
            span = upper - lower
            return (
                (t > 0)
                & (np.abs(x) < self.eps * (1 + slack))
                & (x.imag > lower - slack * span)
                & (x.imag < upper + slack * span)
            )

    def shape_array(self):
        lp, up = self.powers
        return np.array([self.d, self.e, lp, up, self.t_max], dtype=np.float64)

    def mesh(self, n_radial=24, n_angular=7, floor=1e-3, margin=1e-3):
        t = np.geomspace(self.eps * floor, self.t_max * (1 - margin), n_radial)
        tau = np.linspace(margin, 1 - margin, n_angular)
        lower, upper = self.bounds(t)
        return t[:, None] + 1j * (lower[:, None] + tau[None, :] * (upper - lower)[:, None])

    def boundary(self, n=64):
        """Closed boundary polygon (rotated coordinates)."""
        t = np.linspace(0.0, self.t_max, n)
        lower, upper = self.bounds(t)
        return np.concatenate([t + 1j * lower, (t + 1j * upper)[::-1]])

    def to_dict(self):
        return {
            "xi": self.xi,
            "case": self.case.name,
            "d": self.d,
            "e": self.e,
            "eps": self.eps,
            "r": self.r,
            "mode": self.mode.name,
            "c_fit": self.c_fit,
            "halvings": self.halvings,
        }


def _region_case(rpr, direction):
    unit = abs(abs(rpr.mu) - 1) <= 1e-9
    r_l = direction.r_l if direction.r_l is not None else 0
    if not unit or r_l == 0:
        return RegionCase.GENERIC_WEDGE, r_l
    upper = rpr.a[0].imag > 0
    if direction.kind == DirectionKind.NODE:
        upper = not upper
    return (RegionCase.UPPER_FLAT if upper else RegionCase.LOWER_FLAT), r_l


def _y_samples(x, exponent, centre=None, fraction=0.9, n_phase=4):
    """Points y with |y - centre(x)| = fraction |x|^exponent, plus y = centre(x)."""
    x = np.ravel(x)
    base = np.zeros_like(x) if centre is None else centre(x)
    phases = np.exp(2j * np.pi * np.arange(n_phase) / n_phase)
    rad = fraction * np.abs(x) ** exponent
    xs = np.concatenate([x] + [x] * n_phase)
    ys = np.concatenate([base] + [base + rad * ph for ph in phases])
    return xs, ys


def _region_violation(rpr, region, n_radial, n_angular, floor):
    """First violated predicate on the sample mesh and the fitted constant."""
    x = region.mesh(n_radial, n_angular, floor).ravel()
    xs, ys = _y_samples(x, rpr.p + 1)
    f1, _ = rpr.germ(xs, ys)
    if not np.all(region.contains(f1, slack=1e-9)):
        return "F1-invariance", 0.0
    k = rpr.k
    xA = x**k * np.polynomial.polynomial.polyval(x, rpr.A.coeffs)
    unit = abs(abs(rpr.mu) - 1) <= 1e-9
    c_fit = 0.0
    if unit:
        sign = 1.0 if region.mode == DirectionKind.SADDLE else -1.0
        ratio = sign * xA.real / np.abs(x) ** (k + region.r)
        c_fit = float(np.min(ratio))
        if c_fit <= 0:
            return "Re(x^k A) sign", c_fit
    elif region.mode == DirectionKind.SADDLE:
        factor = np.abs(np.exp(-xA) / rpr.mu)
        if np.max(factor) > 1:
            return "weight contraction", 0.0
    return None, c_fit


def fit_region(rp, direction, max_halvings=12, n_radial=24, n_angular=7, floor=1e-3):
    rpr = rp.rotated(direction.xi)
    case, r_l = _region_case(rpr, direction)
    violated = None
    for h in range(max_halvings + 1):
        d = e = 0.5 / 2**h
        eps = 0.1 / 2**h
        region = RegionDescriptor(direction.xi, case, d, e, eps, r_l, direction.kind)
        violated, c_fit = _region_violation(rpr, region, n_radial, n_angular, floor)
        if violated is None:
            logger.info("region for xi=%s: %s d=e=%.3g eps=%.3g", direction.xi, case.name, d, eps)
            return RegionDescriptor(direction.xi, case, d, e, eps, r_l, direction.kind, c_fit, h)
        logger.debug("region attempt %d violates %s", h, violated)
    raise CannotFit(violated, f"no region after {max_halvings} halvings", "fit_region")


@dataclass(frozen=True)
class ConstantsFit:
    """Sampled constants of the orbit-sum estimates."""

    C: float
    M: float
    C_H: float
    K: float

    def to_dict(self):
        return {"C": self.C, "M": self.M, "C_H": self.C_H, "K": self.K}


def _axis_orbits(rpr, starts, steps):
    """Orbits of x -> F1(x, 0) for the constant fits."""
    c1 = writable(rpr.germ.F1.coeffs)
    zeros = np.zeros(starts.size, dtype=np.complex128)
    orbit = np.empty((steps + 1, starts.size), dtype=np.complex128)
    orbit[0] = starts
    x = writable(starts)
    for j in range(steps):
        x = poly_values(c1, x, zeros)
        orbit[j + 1] = x
    return orbit


def fit_constants(rpr, region, m, steps=4000, safety=2.0):
    r, k = rpr.r, rpr.k
    mesh = region.mesh(6, 3)
    starts = mesh[-1]
    orbit = _axis_orbits(rpr, starts, steps)
    ax = np.abs(orbit)
    a0 = ax[0]
    j = np.arange(steps + 1)[:, None]
    C = float(np.max(ax**r * (1 + j * a0**r) / a0**r))
    log_w = (weight_exponent(rpr, orbit[0]) - weight_exponent(rpr, orbit)).real - j * math.log(abs(rpr.mu))
    log_M = float(np.max(log_w))
    if log_M > LOG_CEILING:
        logger.warning("weight bound exp(%.1f) saturated at exp(%.0f)", log_M, LOG_CEILING)
    M = math.exp(min(log_M, LOG_CEILING))
    K = float(np.max(np.sum(ax ** (r + 1), axis=0) / a0))
    xs, ys = _y_samples(mesh.ravel(), rpr.p + 1)
    C_H = residual_constant(rpr, xs, ys, m)
    return ConstantsFit(safety * C, safety * max(M, 1.0), safety * C_H, safety * K)


@dataclass(frozen=True, eq=False)
class ParabolicCurveSolution:
    region: RegionDescriptor
    log_t: np.ndarray
    tau: np.ndarray
    profile: np.ndarray
    q: int
    m: int
    nodes: np.ndarray
    values: np.ndarray
    norm_history: tuple
    delta_history: tuple
    residual: float
    derivative_ok: bool
    constants: ConstantsFit
    iterations: int
    truncated_sums: int = 0
    extrapolated_sums: int = 0
    reduced: object = None
    direction: object = None
    _interp: RegularGridInterpolator = field(default=None, init=False, repr=False)

    def __post_init__(self):
        interp = RegularGridInterpolator(
            (self.log_t, self.tau), self.profile, bounds_error=False, fill_value=None
        )
        object.__setattr__(self, "_interp", interp)

    @property
    def norm(self):
        return self.norm_history[-1] if self.norm_history else 0.0

    def is_invariant(self, tol):
        return self.residual <= 10 * tol

    def evaluate(self, x):
        """u(x) at points of the region (rotated coordinates)."""
        x = np.asarray(x, dtype=np.complex128)
        t = np.clip(x.real, np.exp(self.log_t[0]), None)
        lower, upper = self.region.bounds(t)
        s = np.clip((x.imag - lower) / (upper - lower), self.tau[0], self.tau[-1])
        lt = np.clip(np.log(t), self.log_t[0], self.log_t[-1])
        v = self.interp_profile(lt, s)
        return v * x**self.q

    def interp_profile(self, lt, s):
        points = np.stack([np.ravel(lt), np.ravel(s)], axis=-1)
        return self._interp(points).reshape(np.shape(lt))

    def contraction_ratios(self):
        d = np.asarray(self.delta_history)
        with np.errstate(divide="ignore", invalid="ignore"):
            return d[1:] / d[:-1]


def _needs_refinement(rp, m, want_re_positive):
    contact = rp.contact_order
    b_order = rp.b_order
    short = (contact is not None and contact < rp.r + m) or (b_order is not None and b_order < rp.r + m)
    return short or (want_re_positive and rp.A[rp.p].real <= 0)


def picard_solve_parabolic(
    rp,
    direction,
    m=None,
    tol=1e-10,
    max_iter=60,
    n_radial=48,
    n_angular=7,
    floor=1e-3,
    max_steps=20000,
    initial=None,
    region=None,
):
    """
    Picard iteration u <- T u from u = 0 (or ``initial``) on a grid uniform in
    (log Re x, relative height). Returns the solution in coordinates rotated
    to the direction, together with the reduced pair it refers to.
    """
    if direction.kind != DirectionKind.SADDLE:
        raise NotSaddle(f"direction {direction.xi:.6g} is a node", "picard_solve_parabolic")
    m = rp.p + 4 if m is None else m
    if _needs_refinement(rp, m, True):
        rp = refine_contact(rp, m, want_re_positive=True)
    rpr = rp.rotated(direction.xi)
    if region is None:
        region = fit_region(rp, direction)
    q = rp.r + m
    t_min = region.eps * floor
    log_t = np.linspace(math.log(t_min), math.log(region.t_max * (1 - 1e-3)), n_radial)
    tau = np.linspace(0.05, 0.95, n_angular)
    t = np.exp(log_t)
    lower, upper = region.bounds(t)
    nodes = t[:, None] + 1j * (lower[:, None] + tau[None, :] * (upper - lower)[:, None])
    flat = writable(nodes.ravel())
    xq = nodes**q
    weight_norm = np.abs(nodes) ** (m - 1)

    constants = fit_constants(rpr, region, m)
    p = rp.p
    rc = np.zeros(max(p, 1), dtype=np.complex128)
    for j in range(p):
        rc[j] = rpr.A[j] / (p - j)
    c1 = writable(rpr.germ.F1.coeffs)
    c2 = writable(rpr.germ.F2.coeffs)
    shape = region.shape_array()
    r = rp.r
    s1, s2, s3 = r + 1 + q, rp.k + 2 * q, r + m

    u = np.zeros_like(nodes) if initial is None else np.asarray(initial(nodes), dtype=np.complex128)
    v = writable(u / xq)
    out = np.empty(flat.size, dtype=np.complex128)
    steps = np.empty(flat.size, dtype=np.int64)
    status = np.empty(flat.size, dtype=np.int64)
    wmax = np.empty(flat.size, dtype=np.float64)
    clamped = np.empty(flat.size, dtype=np.int64)
    norms, deltas = [], []
    non_decreasing = 0
    truncated = 0
    extrapolated = 0
    converged = False
    for it in range(1, max_iter + 1):
        V = float(np.max(np.abs(v)))
        tail = np.array(
            [constants.M * constants.C_H * constants.K, V, s1 - r, s2 - r, s3 - r, m - 1, tol],
            dtype=np.float64,
        )
        picard_sweep(
            c1, c2, flat, log_t, tau, v, q, shape, rc, p, complex(rpr.A[p]),
            complex(1 / rpr.mu), tail, max_steps, out, steps, status, wmax, clamped,
        )
        if np.any(status == 1):
            raise InterpolationBreakdown(
                f"{int(np.sum(status == 1))} orbits left the gridded region", "picard_solve_parabolic"
            )
        truncated = int(np.sum(status == 2))
        if truncated:
            logger.warning("%d orbit sums stopped at the step cap", truncated)
        extrapolated = int(np.count_nonzero(clamped))
        if extrapolated:
            logger.info("%d orbit sums used the profile below the grid floor", extrapolated)
        new_u = out.reshape(nodes.shape).copy()
        delta = float(np.max(np.abs(new_u - u) / weight_norm))
        norm = float(np.max(np.abs(new_u) / weight_norm))
        if deltas and delta >= deltas[-1]:
            non_decreasing += 1
        else:
            non_decreasing = 0
        deltas.append(delta)
        norms.append(norm)
        u = new_u
        v = writable(u / xq)
        logger.info("picard iteration %d: delta %.3e norm %.3e", it, delta, norm)
        if delta < tol:
            converged = True
            break
        if non_decreasing >= 5:
            raise NoContraction(region.to_dict(), "Banach deltas stopped decreasing", "picard_solve_parabolic")
    if not converged:
        raise NoContraction(region.to_dict(), f"no convergence within {max_iter} iterations", "picard_solve_parabolic")

    solution = ParabolicCurveSolution(
        region=region,
        log_t=log_t,
        tau=tau,
        profile=v.copy(),
        q=q,
        m=m,
        nodes=nodes,
        values=u,
        norm_history=tuple(norms),
        delta_history=tuple(deltas),
        residual=0.0,
        derivative_ok=True,
        constants=constants,
        iterations=len(deltas),
        truncated_sums=truncated,
        extrapolated_sums=extrapolated,
        reduced=rpr,
        direction=direction,
    )
    return replace(
        solution,
        residual=invariance_residual(rpr, solution),
        derivative_ok=_derivative_bound(solution, rp.p),
    )


def parabolic_curve_set(solution, tol=1e-10):
    return StableSetDescriptor(
        kind=StableKind.PARABOLIC_CURVE,
        direction=solution.direction,
        region=solution.region,
        reduced=solution.reduced,
        q=solution.q,
        jet=solution.reduced.gamma2,
        solution=solution,
        invariant=solution.is_invariant(tol),
    )


def invariance_residual(rpr, solution):
    """sup |u(f_u(x)) - F2(x, u(x))| over interior nodes."""
    x = solution.nodes[1:-1, 1:-1].ravel()
    u = solution.values[1:-1, 1:-1].ravel()
    f1, f2 = rpr.germ(x, u)
    return float(np.max(np.abs(solution.evaluate(np.asarray(f1)) - np.asarray(f2))))


def _derivative_bound(solution, p):
    x = solution.nodes
    u = solution.values
    du = np.abs(np.diff(u, axis=0) / np.diff(x, axis=0))
    bound = np.abs(x[1:]) ** (solution.m - p - 2)
    return bool(np.all(du <= bound))


@dataclass(frozen=True)
class BasinAnnulus:
    inner: float
    outer: float
    entry_index: int | None
    samples: int


@dataclass(frozen=True, eq=False)
class StableSetDescriptor:
    kind: StableKind
    direction: object
    region: RegionDescriptor
    reduced: object
    q: int
    jet: UniJet
    solution: ParabolicCurveSolution | None = None
    invariant: bool = True
    basin: tuple | None = None
    curve_tol: float = 1e-8

    def to_reduced(self, xs, ys):
        return self.reduced.germ.from_original(xs, ys)

    def to_original(self, xs, ys):
        return self.reduced.germ.to_original(xs, ys)

    def contains(self, x, y):
        """Membership in the rotated reduced chart."""
        x = np.asarray(x, dtype=np.complex128)
        y = np.asarray(y, dtype=np.complex128)
        inside = self.region.contains(x)
        with np.errstate(invalid="ignore", over="ignore"):
            match self.kind:
                case StableKind.NODE_BASIN:
                    return inside & (np.abs(y - self.jet(x)) < np.abs(x) ** self.q)
                case _:
                    safe = np.where(inside, x, self.region.eps / 2)
                    return inside & (np.abs(y - self.solution.evaluate(safe)) <= self.curve_tol)

    def contains_original(self, xs, ys):
        x, y = self.to_reduced(np.ravel(xs), np.ravel(ys))
        return self.contains(np.nan_to_num(x, nan=-1.0), np.nan_to_num(y, nan=0.0))

    def boundary_original(self, n=64):
        x = self.region.boundary(n)[1:]
        return self.to_original(x, np.zeros_like(x))

    @property
    def label(self):
        return "ParabolicCurve" if self.kind == StableKind.PARABOLIC_CURVE else "NodeBasin"

    def to_dict(self):
        payload = {
            "type": self.label,
            "direction": self.direction.xi,
            "region": self.region.to_dict(),
            "q": self.q,
            "invariant": self.invariant,
        }
        if self.solution is not None:
            payload.update(
                {
                    "m": self.solution.m,
                    "residual": self.solution.residual,
                    "norm": self.solution.norm,
                    "iterations": self.solution.iterations,
                    "deltas": list(self.solution.delta_history),
                    "extrapolated_sums": self.solution.extrapolated_sums,
                    "derivative_ok": self.solution.derivative_ok,
                    "constants": self.solution.constants.to_dict(),
                }
            )
        if self.basin is not None:
            payload["basin"] = [
                {"inner": b.inner, "outer": b.outer, "entry_index": b.entry_index} for b in self.basin
            ]
        return payload


def _node_samples(rpr, region, jet, q, n_radial=16, n_angular=5, floor=1e-2):
    x = region.mesh(n_radial, n_angular, floor).ravel()
    return _y_samples(x, q, centre=jet)


def node_stable_set(rp, direction, m=None, max_halvings=12, basin_annuli=0, basin_steps=5000):
    if direction.kind != DirectionKind.NODE:
        raise NotNode(f"direction {direction.xi:.6g} is a saddle", "node_stable_set")
    m = rp.p + 4 if m is None else m
    if _needs_refinement(rp, m, False):
        rp = refine_contact(rp, m, want_re_positive=False)
    rpr = rp.rotated(direction.xi)
    region = fit_region(rp, direction)
    q = rp.p + 1
    jet = rpr.gamma2.truncate(min(rpr.gamma2.order, rp.r + m))
    candidate = None
    for h in range(max_halvings + 1):
        region_h = RegionDescriptor(
            region.xi, region.case, region.d, region.e, region.eps / 2**h, region.r,
            region.mode, region.c_fit, region.halvings + h,
        )
        candidate = StableSetDescriptor(StableKind.NODE_BASIN, direction, region_h, rpr, q, jet)
        xs, ys = _node_samples(rpr, region_h, jet, q)
        f1, f2 = rpr.germ(xs, ys)
        if np.all(candidate.contains(f1, f2)):
            break
        logger.debug("node set not forward invariant at eps=%.3g", region_h.eps)
    else:
        raise CannotFit("forward invariance", "node set is not forward invariant", "node_stable_set")
    logger.info("node stable set for xi=%s with eps=%.3g", direction.xi, candidate.region.eps)
    if basin_annuli:
        basin = asymptotic_basin(rpr, candidate, basin_annuli, basin_steps)
        candidate = StableSetDescriptor(
            StableKind.NODE_BASIN, direction, candidate.region, rpr, q, jet, basin=basin
        )
    return candidate


def asymptotic_basin(rpr, descriptor, annuli, steps=5000, n_samples=24):
    """Entry indices k_j after which orbits of each annulus of S stay in V_1 ... V_(j+1)."""
    eps = descriptor.region.eps
    c1 = writable(rpr.germ.F1.coeffs)
    c2 = writable(rpr.germ.F2.coeffs)
    g = rpr.gamma2
    rings = []
    for j in range(annuli):
        inner, outer = eps / 2 ** (j + 2), eps / 2**j
        x = descriptor.region.mesh(6, 4, floor=inner / eps).ravel()
        x = x[(np.abs(x) > inner) & (np.abs(x) < outer)][:n_samples]
        if x.size == 0:
            rings.append(BasinAnnulus(inner, outer, None, 0))
            continue
        xs, ys = _y_samples(x, descriptor.q, centre=descriptor.jet, n_phase=2)
        xs, ys = writable(xs), writable(ys)
        last_out = np.full(xs.size, -1, dtype=np.int64)
        for n in range(steps + 1):
            if n:
                xs, ys = poly_values(c1, xs, ys), poly_values(c2, xs, ys)
            ax = np.abs(xs)
            inside = np.ones(xs.size, dtype=bool)
            for N in range(1, j + 2):
                jet_n = g.truncate(N)
                inside &= np.abs(ys - jet_n(xs)) < ax**N
            last_out[~inside] = n
        worst = int(np.max(last_out))
        rings.append(BasinAnnulus(inner, outer, worst + 1 if worst < steps else None, xs.size))
    return tuple(rings)


def weight_escape(rpr, xs, l):
    """|mu|^j |E(x0)^-1 E(x_j) / x_j^l| along an orbit given in rotated coordinates."""
    xs = np.asarray(xs, dtype=np.complex128)
    j = np.arange(xs.size)
    log_ratio = weight_exponent(rpr, xs) - weight_exponent(rpr, xs[0])
    return np.abs(rpr.mu) ** j * np.exp(log_ratio.real) / np.abs(xs) ** l

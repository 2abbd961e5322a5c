"""
Compiled inner loops: jet products, polynomial evaluation, orbit iteration and
the Picard orbit sums. All kernels are compiled eagerly with explicit
signatures, the arrays passed in must be C-contiguous complex128 / float64.
"""
import cmath
import math

import numpy as np
from numba import njit


@njit("c16[:,:](c16[:,:], c16[:,:], i8)")
def bijet_product(a, b, order):
    result = np.zeros((order + 1, order + 1), dtype=np.complex128)
    for i1 in range(order + 1):
        for j1 in range(order + 1 - i1):
            c = a[i1, j1]
            if c == 0:
                continue
            rest = order - i1 - j1
            for i2 in range(rest + 1):
                for j2 in range(rest + 1 - i2):
                    result[i1 + i2, j1 + j2] += c * b[i2, j2]
    return result


@njit("c16(c16[:,:], c16, c16)")
def poly_value(c, x, y):
    acc = 0j
    for i in range(c.shape[0] - 1, -1, -1):
        inner = 0j
        for j in range(c.shape[1] - 1, -1, -1):
            inner = inner * y + c[i, j]
        acc = acc * x + inner
    return acc


@njit("c16[:](c16[:,:], c16[:], c16[:])")
def poly_values(c, xs, ys):
    out = np.empty(xs.shape[0], dtype=np.complex128)
    for n in range(xs.shape[0]):
        out[n] = poly_value(c, xs[n], ys[n])
    return out


@njit("i8(c16[:,:], c16[:,:], i8, c16[:], c16[:], f8, f8, i8, b1)")
def iterate_map(
    c1, c2, substeps, xs, ys, escape_radius, conv_radius, window, stop_when_converged
):
    # xs[0], ys[0] hold the seed; returns the index of the last written iterate
    inside = 0
    last = xs.shape[0] - 1
    for n in range(last):
        x = xs[n]
        y = ys[n]
        for _ in range(substeps):
            fx = poly_value(c1, x, y)
            fy = poly_value(c2, x, y)
            x = fx
            y = fy
        xs[n + 1] = x
        ys[n + 1] = y
        radius = math.sqrt(abs(x) ** 2 + abs(y) ** 2)
        if not np.isfinite(radius) or radius > escape_radius:
            return n + 1
        if radius < conv_radius:
            inside += 1
        else:
            inside = 0
        if stop_when_converged and inside >= window:
            return n + 1
    return last


@njit("c16(c16, i8)")
def ipow(x, n):
    acc = 1 + 0j
    for _ in range(n):
        acc *= x
    return acc


@njit("c16(c16, c16[:], i8, c16)")
def weight_exponent(x, rc, p, a_p):
    # sum_{j<p} rc[j] x^(j-p) - a_p log x
    acc = 0j
    for j in range(p - 1, -1, -1):
        acc = acc * x + rc[j]
    if p > 0:
        acc = acc / ipow(x, p)
    return acc - a_p * cmath.log(x)


@njit("c16(c16, f8[:], f8[:], c16[:,:], f8[:])")
def profile_value(x, log_t, tau, v, shape):
    # shape = (d, e, lower_pow, upper_pow, t_max); uniform grids in log t and tau
    # below the floor log_t[0] the profile is held at its floor value, callers count those steps
    t = x.real
    lt = math.log(t)
    if lt < log_t[0]:
        lt = log_t[0]
    if lt > log_t[-1]:
        lt = log_t[-1]
    lower = -shape[0] * t ** shape[2]
    upper = shape[1] * t ** shape[3]
    s = (x.imag - lower) / (upper - lower)
    if s < 0.0:
        s = 0.0
    if s > 1.0:
        s = 1.0
    nr = log_t.shape[0]
    na = tau.shape[0]
    i = int((lt - log_t[0]) / (log_t[1] - log_t[0]))
    if i > nr - 2:
        i = nr - 2
    k = int((s - tau[0]) / (tau[1] - tau[0]))
    if k < 0:
        k = 0
    if k > na - 2:
        k = na - 2
    wi = (lt - log_t[i]) / (log_t[i + 1] - log_t[i])
    wk = (s - tau[k]) / (tau[k + 1] - tau[k])
    if wk < 0.0:
        wk = 0.0
    if wk > 1.0:
        wk = 1.0
    return (
        (1 - wi) * (1 - wk) * v[i, k]
        + wi * (1 - wk) * v[i + 1, k]
        + (1 - wi) * wk * v[i, k + 1]
        + wi * wk * v[i + 1, k + 1]
    )


@njit(
    "void(c16[:,:], c16[:,:], c16[:], f8[:], f8[:], c16[:,:], i8, f8[:], "
    "c16[:], i8, c16, c16, f8[:], i8, c16[:], i8[:], i8[:], f8[:], i8[:])"
)
def picard_sweep(
    c1,
    c2,
    starts,
    log_t,
    tau,
    v,
    q,
    shape,
    rc,
    p,
    a_p,
    inv_mu,
    tail,
    max_steps,
    out,
    steps,
    status,
    wmax,
    clamped,
):
    """
    One application of the orbit-sum operator at every start point.

    The profile is u(x) = v(x) x^q. For every start x_0 the sum
    sum_j w_j H(x_j) is accumulated along x_{j+1} = F1(x_j, u(x_j)) with
    w_{j+1} = w_j mu^-1 E(x_j)/E(x_{j+1}) and
    H = u - mu^-1 E(x)/E(F1) F2. The sum stops when the tail bound
    tail[0] |w| (tail[1] |x|^tail[2] + tail[1]^2 |x|^tail[3] + |x|^tail[4])
    drops below tail[6]/10 |x_0|^tail[5].
    status: 0 tail reached, 1 orbit left the region, 2 step cap reached.
    clamped: steps evaluated below the grid floor, where the profile is
    held at its value on the floor.
    """
    slack = 1e-6
    t_floor = math.exp(log_t[0])
    for n in range(starts.shape[0]):
        x0 = starts[n]
        x = x0
        rx = weight_exponent(x, rc, p, a_p)
        w = 1 + 0j
        acc = 0j
        wm = 1.0
        below = 0
        thresh = tail[6] / 10.0 * abs(x0) ** tail[5]
        st = 0
        j = 0
        while j < max_steps:
            if x.real < t_floor:
                below += 1
            u = profile_value(x, log_t, tau, v, shape) * ipow(x, q)
            fx = poly_value(c1, x, u)
            fy = poly_value(c2, x, u)
            if not fx.real > 0.0:
                st = 1
                break
            rf = weight_exponent(fx, rc, p, a_p)
            ratio = cmath.exp(rx - rf)
            acc += w * (u - inv_mu * ratio * fy)
            w = w * inv_mu * ratio
            aw = abs(w)
            if aw > wm:
                wm = aw
            x = fx
            rx = rf
            j += 1
            t = x.real
            if t > shape[4] * (1 + slack):
                st = 1
                break
            if t >= t_floor:
                lower = -shape[0] * t ** shape[2]
                upper = shape[1] * t ** shape[3]
                span = upper - lower
                if x.imag < lower - slack * span or x.imag > upper + slack * span:
                    st = 1
                    break
            ax = abs(x)
            bound = (
                aw
                * tail[0]
                * (
                    tail[1] * ax ** tail[2]
                    + tail[1] * tail[1] * ax ** tail[3]
                    + ax ** tail[4]
                )
            )
            if bound < thresh:
                break
        if j >= max_steps:
            st = 2
        out[n] = acc
        steps[n] = j
        status[n] = st
        wmax[n] = wm
        clamped[n] = below

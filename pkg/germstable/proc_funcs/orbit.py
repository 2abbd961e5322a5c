"""
Orbit engine: exact iteration of the polynomial map, the per-iterate
diagnostic table, the asymptoticity test against a curve jet and the capture
of converging orbits by computed stable sets.
"""
import cmath
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from enum import IntEnum

import numpy as np

from germstable.jet_funcs.jets import UniJet
from germstable.proc_funcs.kernels import iterate_map
from germstable.proc_funcs.reduction import attracting_directions
from germstable.util_funcs.errors import TailTooShort

logger = logging.getLogger(__name__)

LOG_CLIP = 700.0


class OrbitStatus(IntEnum):
    CONVERGED_TO_ORIGIN = 0
    ESCAPED = 1
    UNDECIDED = 2

    @property
    def label(self):
        return {0: "ConvergedToOrigin", 1: "Escaped", 2: "Undecided"}[int(self)]


@dataclass(frozen=True, eq=False)
class OrbitRecord:
    start: tuple
    xs: np.ndarray
    ys: np.ndarray
    status: OrbitStatus
    tangent: complex | None
    diagnostics: dict = field(default_factory=dict)

    @property
    def steps(self):
        return self.xs.size - 1

    @property
    def is_origin(self):
        return self.start[0] == 0 and self.start[1] == 0

    def to_dict(self, with_points=False):
        payload = {
            "start": list(self.start),
            "status": self.status.label,
            "steps": self.steps,
            "tangent": self.tangent,
            "end": [complex(self.xs[-1]), complex(self.ys[-1])],
        }
        if with_points:
            payload["xs"] = self.xs.tolist()
            payload["ys"] = self.ys.tolist()
        return payload


def nearest_root_of_unity(z, r):
    """Attracting direction xi with xi^r = 1 closest to the argument of z."""
    j = round(cmath.phase(z) * r / (2 * math.pi)) % r
    return 1 + 0j if j == 0 else cmath.exp(2j * math.pi * j / r)


def _safe_log_abs(z):
    a = np.abs(z)
    out = np.full(a.shape, -np.inf)
    np.log(a, out=out, where=a > 0)
    return out


def leau_fatou_column(xs, r):
    """(k+p) j x_j^(k+p), tending to 1 along orbits converging to 0 in an attracting direction."""
    j = np.arange(xs.size)
    return r * j * xs**r


def tangency_column(xs, r, xi):
    """Im / Re^(r+1) of the iterates rotated so that xi lands on the positive axis."""
    xr = xs / xi
    re = xr.real
    out = np.zeros(xs.size)
    with np.errstate(over="ignore", invalid="ignore"):
        np.divide(xr.imag, re ** (r + 1), out=out, where=re != 0)
    return np.nan_to_num(out, nan=0.0, posinf=np.finfo(float).max, neginf=-np.finfo(float).max)


def tangency_radius(rp, xi):
    """Exponent of the tangency column in the direction xi: its radius index, kept below k+p."""
    for d in attracting_directions(rp):
        if abs(d.xi - xi) <= 1e-9:
            return min(d.r_l or 0, rp.r - 1)
    return 0


def asymptotic_ratio(xs, ys, gamma2, N):
    """|y - J_N gamma2(x)| / |x|^(N+1), zero where both sides vanish."""
    jet = gamma2.truncate(N) if gamma2.order > N else gamma2
    log_num = _safe_log_abs(ys - jet(xs))
    log_den = (N + 1) * _safe_log_abs(xs)
    with np.errstate(invalid="ignore"):
        log_ratio = log_num - log_den
    out = np.exp(np.clip(np.nan_to_num(log_ratio, nan=-np.inf), -np.inf, LOG_CLIP))
    out[~np.isfinite(log_num)] = 0.0
    return out


def _tangent_estimate(xs):
    nonzero = np.flatnonzero(np.abs(xs) > 0)
    if nonzero.size == 0:
        return None
    last = xs[nonzero[-1]]
    return complex(last / abs(last))


def diagnostic_table(xs, ys, r=None, gamma2=None, orders=(), reduced=None):
    table = {}
    if r is not None:
        table["leau_fatou"] = leau_fatou_column(xs, r)
        tangent = _tangent_estimate(xs)
        xi = nearest_root_of_unity(tangent, r) if tangent is not None else 1 + 0j
        radius = tangency_radius(reduced, xi) if reduced is not None else 0
        table["tangency"] = tangency_column(xs, radius, xi)
    if gamma2 is not None:
        for N in orders:
            table[f"asym_{N}"] = asymptotic_ratio(xs, ys, gamma2, N)
    return table


def _status(xs, ys, last, escape_radius, conv_radius, window):
    radius = np.hypot(np.abs(xs[last]), np.abs(ys[last]))
    if not np.isfinite(radius) or radius > escape_radius:
        return OrbitStatus.ESCAPED
    tail = np.hypot(np.abs(xs[max(0, last - window + 1) : last + 1]), np.abs(ys[max(0, last - window + 1) : last + 1]))
    if last + 1 >= window and np.all(tail < conv_radius):
        return OrbitStatus.CONVERGED_TO_ORIGIN
    if xs[0] == 0 and ys[0] == 0:
        return OrbitStatus.CONVERGED_TO_ORIGIN
    return OrbitStatus.UNDECIDED


def simulate_orbit(
    pmap,
    p0,
    max_iter=20000,
    escape_radius=1.0,
    conv_radius=1e-8,
    window=50,
    r=None,
    reduced=None,
    gamma2=None,
    orders=(),
    stop_when_converged=True,
):
    """
    Iterate the exact polynomial map from p0.

    With a reduced pair the diagnostics are computed in its coordinates
    (iterates pulled through the recorded coordinate changes), with its
    k+p and curve jet unless given explicitly.
    """
    x0, y0 = complex(p0[0]), complex(p0[1])
    xs = np.zeros(max_iter + 1, dtype=np.complex128)
    ys = np.zeros(max_iter + 1, dtype=np.complex128)
    xs[0], ys[0] = x0, y0
    if x0 == 0 and y0 == 0:
        last = 0
    else:
        last = int(
            iterate_map(
                pmap.c1, pmap.c2, pmap.substeps, xs, ys,
                float(escape_radius), float(conv_radius), int(window), bool(stop_when_converged),
            )
        )
    xs, ys = xs[: last + 1].copy(), ys[: last + 1].copy()
    status = _status(xs, ys, last, escape_radius, conv_radius, window)

    dx, dy = xs, ys
    if reduced is not None:
        with np.errstate(all="ignore"):
            dx, dy = reduced.germ.from_original(xs, ys)
        dx = np.nan_to_num(dx, nan=0.0, posinf=0.0, neginf=0.0)
        dy = np.nan_to_num(dy, nan=0.0, posinf=0.0, neginf=0.0)
        r = reduced.r if r is None else r
        gamma2 = reduced.gamma2 if gamma2 is None else gamma2
    diagnostics = diagnostic_table(dx, dy, r, gamma2, orders, reduced)
    return OrbitRecord((x0, y0), xs, ys, status, _tangent_estimate(dx), diagnostics)


def _simulate_job(args):
    pmap, p0, kwargs = args
    return simulate_orbit(pmap, p0, **kwargs)


def simulate_orbits(pmap, starts, workers=1, **kwargs):
    """Independent orbits, fanned out to a process pool when workers > 1; records come back in start order."""
    starts = list(starts)
    if workers <= 1 or len(starts) < 2:
        records = [simulate_orbit(pmap, p0, **kwargs) for p0 in starts]
    else:
        with ProcessPoolExecutor(workers) as pool:
            futures = [pool.submit(_simulate_job, (pmap, p0, kwargs)) for p0 in starts]
            records = [f.result() for f in futures]
    counts = {s.label: sum(rec.status == s for rec in records) for s in OrbitStatus}
    logger.info("simulated %d orbits on %d workers: %s", len(records), max(workers, 1), counts)
    return records


@dataclass(frozen=True)
class AsymptoticVerdict:
    order: int
    passed: bool
    C: float
    q3_max: float
    q4_max: float

    def to_dict(self):
        return {"N": self.order, "pass": self.passed, "C": self.C, "q3_max": self.q3_max, "q4_max": self.q4_max}


def asymptoticity_test(record, gamma2, n_max, factor=10.0, min_tail=8, orders=None):
    """
    Bounded-tail surrogate for |y_j - J_N gamma2(x_j)| <= C_N |x_j|^(N+1):
    PASS when the maximum over the last quarter of the orbit is at most
    ``factor`` times the maximum over the third quarter.
    """
    if record.status != OrbitStatus.CONVERGED_TO_ORIGIN:
        raise TailTooShort(f"orbit status is {record.status.label}", "asymptoticity_test")
    nonzero = np.flatnonzero(np.abs(record.xs) > 0)
    if nonzero.size < min_tail:
        raise TailTooShort(f"{nonzero.size} non-zero iterates, need {min_tail}", "asymptoticity_test")
    xs, ys = record.xs[nonzero], record.ys[nonzero]
    if not isinstance(gamma2, UniJet):
        gamma2 = UniJet(gamma2)
    quarter = xs.size // 4
    verdicts = []
    for N in orders if orders is not None else range(1, n_max + 1):
        ratio = asymptotic_ratio(xs, ys, gamma2, N)
        q3 = float(np.max(ratio[2 * quarter : 3 * quarter]))
        q4 = float(np.max(ratio[3 * quarter :]))
        passed = bool(np.isfinite(q4) and q4 <= factor * q3) or q4 == 0.0
        verdicts.append(AsymptoticVerdict(N, passed, float(np.max(ratio[2 * quarter :])), q3, q4))
    return verdicts


class CaptureKind(IntEnum):
    ASSIGNED = 0
    UNASSIGNED = 1
    NOT_CONVERGING = 2


@dataclass(frozen=True)
class CaptureEntry:
    orbit: int
    kind: CaptureKind
    status: OrbitStatus
    direction: complex | None = None
    set_type: str | None = None
    set_index: int | None = None
    entry_index: int | None = None
    tangency: float | None = None
    reason: str = ""

    def to_dict(self):
        return {
            "orbit": self.orbit,
            "assigned": self.kind == CaptureKind.ASSIGNED,
            "status": self.status.label,
            "direction": self.direction,
            "set_type": self.set_type,
            "set_index": self.set_index,
            "entry_index": self.entry_index,
            "tangency": self.tangency,
            "reason": self.reason,
        }


@dataclass(frozen=True)
class CaptureReport:
    entries: tuple
    excluded: tuple

    @property
    def assigned(self):
        return [e for e in self.entries if e.kind == CaptureKind.ASSIGNED]

    @property
    def unassigned(self):
        return [e for e in self.entries if e.kind == CaptureKind.UNASSIGNED]

    def to_dict(self):
        return {"entries": [e.to_dict() for e in self.entries], "excluded": list(self.excluded)}


def _entry_index(inside):
    if inside.size == 0 or not inside[-1]:
        return None
    outside = np.flatnonzero(~inside)
    return 0 if outside.size == 0 else int(outside[-1]) + 1


def capture_report(records, descriptors, rp, tangency_tol=1e-2):
    """Assign every converging orbit to the stable set of its tangent attracting direction."""
    entries = []
    excluded = []
    for i, rec in enumerate(records):
        if rec.is_origin:
            excluded.append(i)
            continue
        if rec.status != OrbitStatus.CONVERGED_TO_ORIGIN:
            entries.append(CaptureEntry(i, CaptureKind.NOT_CONVERGING, rec.status, reason=rec.status.label))
            continue
        with np.errstate(all="ignore"):
            rx, _ = rp.germ.from_original(rec.xs, rec.ys)
        rx = np.nan_to_num(rx, nan=0.0, posinf=0.0, neginf=0.0)
        tangent = _tangent_estimate(rx)
        if tangent is None:
            entries.append(
                CaptureEntry(i, CaptureKind.UNASSIGNED, rec.status, reason="orbit lands on x = 0")
            )
            continue
        xi = nearest_root_of_unity(tangent, rp.r)
        tangency = tangency_column(rx[-1:], tangency_radius(rp, xi), xi)[0]
        candidates = [
            (j, d) for j, d in enumerate(descriptors) if abs(complex(d.direction.xi) - xi) <= 1e-9
        ]
        if not candidates:
            entries.append(
                CaptureEntry(
                    i, CaptureKind.UNASSIGNED, rec.status, xi, tangency=float(tangency),
                    reason="no stable set for the tangent direction",
                )
            )
            continue
        best = None
        for j, d in candidates:
            inside = np.asarray(d.contains_original(rec.xs, rec.ys), dtype=bool)
            entry = _entry_index(inside)
            if entry is not None and (best is None or entry < best[2]):
                best = (j, d, entry)
        if best is None:
            entries.append(
                CaptureEntry(
                    i, CaptureKind.UNASSIGNED, rec.status, xi, tangency=float(tangency),
                    reason="orbit never stays in the stable set",
                )
            )
            continue
        j, d, entry = best
        if abs(tangency) > tangency_tol:
            logger.warning("orbit %d captured with tangency ratio %.3g", i, tangency)
        entries.append(
            CaptureEntry(i, CaptureKind.ASSIGNED, rec.status, xi, d.label, j, entry, float(tangency))
        )
    report = CaptureReport(tuple(entries), tuple(excluded))
    logger.info("capture: %d assigned, %d unassigned, %d excluded", len(report.assigned), len(report.unassigned), len(excluded))
    return report


def orbit_rows(record):
    """CSV rows: j, re_x, im_x, re_y, im_y, then the diagnostic columns in table order."""
    names = list(record.diagnostics)
    header = ["j", "re_x", "im_x", "re_y", "im_y"]
    for name in names:
        column = record.diagnostics[name]
        if np.iscomplexobj(column):
            header += [f"re_{name}", f"im_{name}"]
        else:
            header.append(name)
    rows = []
    for j in range(record.xs.size):
        row = [j, record.xs[j].real, record.xs[j].imag, record.ys[j].real, record.ys[j].imag]
        for name in names:
            value = record.diagnostics[name][j]
            if np.iscomplexobj(record.diagnostics[name]):
                row += [value.real, value.imag]
            else:
                row.append(float(value))
        rows.append(row)
    return header, rows


def in_chart(record, germ):
    """The same orbit expressed in the coordinates of a germ with a coordinate-change log."""
    with np.errstate(all="ignore"):
        x, y = germ.from_original(record.xs, record.ys)
    x = np.nan_to_num(np.asarray(x, dtype=np.complex128), nan=0.0, posinf=0.0, neginf=0.0)
    y = np.nan_to_num(np.asarray(y, dtype=np.complex128), nan=0.0, posinf=0.0, neginf=0.0)
    return replace(record, xs=x, ys=y)

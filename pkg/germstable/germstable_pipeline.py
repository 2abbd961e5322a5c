"""
Orchestration of one analysis run: curve, classification, reduction,
directions, stable sets, probe orbits and capture. Stage failures are kept
in the report as warnings; only parse errors and invalid germs abort.
"""
import logging
import math

import numpy as np

from dataformat_germstable.datatype import (
    AnalysisReport,
    AsymptoticRecord,
    BasinRecord,
    CaptureRecord,
    ChangeRecord,
    ClassificationRecord,
    CuspRecord,
    DirectionRecord,
    ProbeRecord,
    ReducedRecord,
    StableSetRecord,
    WarningRecord,
    encode_complex,
)
from germstable.jet_funcs.curve import (
    FormalCurveJet,
    InnerClass,
    classify_inner,
    extend_invariant_jet,
    solve_restriction,
)
from germstable.jet_funcs.germ import (
    HORIZONTAL,
    PolynomialMap,
    compose_iterate,
    inverse,
    is_fixed_direction,
    spectrum,
)
from germstable.jet_funcs.jets import UniJet
from germstable.proc_funcs.orbit import (
    OrbitStatus,
    asymptoticity_test,
    capture_report,
    in_chart,
    simulate_orbits,
)
from germstable.proc_funcs.reduction import DirectionKind, attracting_directions, reduce_pair
from germstable.proc_funcs.stable import node_stable_set, parabolic_curve_set, picard_solve_parabolic
from germstable.util_funcs.errors import GermError, TailTooShort
from germstable.util_funcs.settings import PipelineSettings

logger = logging.getLogger(__name__)

STAGES = ("classify", "reduce", "directions", "stable-sets", "probe", "report")


def _stage_index(stage):
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}, expected one of {STAGES}")
    return STAGES.index(stage)


def default_seed(F):
    """[1:0] when fixed by DF(0), otherwise the eigen-direction of the eigenvalue closest to 1."""
    if is_fixed_direction(F.linear_part, HORIZONTAL):
        return HORIZONTAL
    sp = spectrum(F)
    eigenvalue = min(sp.eigenvalues, key=lambda ev: abs(ev - 1))
    return sp.direction_for(eigenvalue)


def probe_starts(count, radius, seed):
    """Points of the sphere of given radius in C^2, drawn from a fixed-seed generator."""
    rng = np.random.default_rng(seed)
    v = rng.normal(size=(count, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return [(complex(a, b) * radius, complex(c, d) * radius) for a, b, c, d in v]


def _direction_record(d):
    return DirectionRecord(d.index, d.xi, d.label, [float(w) for w in d.witness], d.r_l)


def _stable_set_record(descriptor):
    payload = descriptor.to_dict()
    region = dict(payload["region"])
    region["xi"] = encode_complex(region["xi"])
    boundary = descriptor.region.xi * descriptor.region.boundary(32)
    basin = [BasinRecord(**b, samples=a.samples) for b, a in zip(payload.get("basin", []), descriptor.basin or ())]
    return StableSetRecord(
        type=payload["type"],
        direction=payload["direction"],
        region=region,
        q=payload["q"],
        invariant=bool(payload["invariant"]),
        m=payload.get("m"),
        residual=payload.get("residual"),
        norm=payload.get("norm"),
        iterations=payload.get("iterations"),
        deltas=list(payload.get("deltas", [])),
        extrapolated_sums=payload.get("extrapolated_sums"),
        derivative_ok=payload.get("derivative_ok"),
        constants=payload.get("constants", {}),
        basin=basin,
        boundary=list(boundary),
    )


class GermStablePipeline:
    def __init__(self, spec, overrides=None):
        self.spec = spec
        settings = PipelineSettings().with_overrides(**spec.settings_overrides())
        self.settings = settings.with_overrides(**(overrides or {}))
        self.report = AnalysisReport(settings=self.settings.as_dict(), source=spec.source)
        self.germ = spec.germ(self.settings.order)
        self.pmap = spec.polynomial_map()
        self.curve = None
        self.restriction = None
        self.classification = None
        self.reduced = None
        self.directions = []
        self.descriptors = []
        self.records = []

    def _warn(self, stage, error):
        logger.warning("%s failed: %s", stage, error)
        self.report.warn(stage, error)

    def _iterate(self, n, reason):
        self.germ = compose_iterate(self.germ, n)
        self.pmap = self.pmap.iterated(n)
        self.report.iterate *= n
        self.report.notes.append(f"analysing F^{self.report.iterate} ({reason})")
        logger.info("replaced the germ by its %d-th iterate: %s", n, reason)

    def run(self, until="report"):
        last = _stage_index(until)
        if self.settings.iterate > 1:
            self._iterate(self.settings.iterate, "iterate exponent of the run")
        if not self.classify():
            return self.report
        kind = self.classification.kind
        if kind == InnerClass.HYPERBOLIC_ATTRACTING:
            if last >= _stage_index("probe"):
                self.hyperbolic_probes()
            return self.report
        if kind != InnerClass.PARABOLIC:
            return self.report
        if last < _stage_index("reduce") or not self.reduce():
            return self.report
        if last < _stage_index("directions"):
            return self.report
        self.classify_directions()
        if last < _stage_index("stable-sets"):
            return self.report
        self.stable_sets()
        self.periodic_notes()
        if last < _stage_index("probe"):
            return self.report
        self.parabolic_probes()
        return self.report

    # stages

    def solve_curve(self):
        spec, order = self.spec, self.settings.order
        if spec.has_curve:
            g1, g2 = spec.curve_series(order)
            self.curve = FormalCurveJet(g1, g2)
            return "supplied"
        seed = spec.tangent if spec.tangent is not None else default_seed(self.germ)
        self.curve = extend_invariant_jet(self.germ, seed, order, tol=self.settings.tol)
        if self.curve.non_unique:
            self.report.notes.append(f"resonant orders {list(self.curve.non_unique)} set to 0")
        return "solved"

    def _restrict_and_classify(self):
        s = self.settings
        self.restriction = solve_restriction(self.germ, self.curve)
        self.classification = classify_inner(self.restriction, s.root_tol, s.root_order_bound)

    def classify(self):
        try:
            source = self.solve_curve()
        except GermError as error:
            self._warn("curve", error)
            return False
        try:
            self._restrict_and_classify()
            self.report.classification = self._classification_record(source)
            match self.classification.kind:
                case InnerClass.RATIONALLY_NEUTRAL:
                    self._iterate(self.classification.period, f"restriction is {self.classification.label}")
                    self._restrict_and_classify()
                    self.report.notes.append(f"restriction of the iterate is {self.classification.label}")
                case InnerClass.HYPERBOLIC_REPELLING:
                    self.germ = inverse(self.germ)
                    self.pmap = PolynomialMap.from_germ(self.germ)
                    self.report.analysed_inverse = True
                    self._restrict_and_classify()
                    self.report.notes.append(
                        f"restriction is repelling, the jet of F^-1 is {self.classification.label}"
                    )
                case InnerClass.IRRATIONALLY_NEUTRAL:
                    self.report.warnings.append(
                        WarningRecord("classify", "IrrationallyNeutral", "no analysis for irrationally neutral curves")
                    )
        except GermError as error:
            self._warn("classify", error)
            return False
        logger.info("classification: %s", self.report.classification.label)
        return True

    def _classification_record(self, source):
        rd, c = self.restriction, self.classification
        cusp = None
        if c.cusp is not None:
            cp = c.cusp
            cusp = CuspRecord(cp.p, cp.q, cp.c, cp.resonance_defect, cp.membership_residual, cp.matches)
        return ClassificationRecord(
            label=c.label,
            period=c.period,
            inner_eigenvalue=rd.inner_eigenvalue,
            tangent_eigenvalue=rd.tangent_eigenvalue,
            eigenvalues=list(rd.eigenvalues or ()),
            multiplicity=rd.multiplicity,
            restriction_order=rd.restriction_order,
            restriction_residual=rd.residual,
            curve_source=source,
            cusp=cusp,
        )

    def reduce(self):
        try:
            rp = reduce_pair(self.germ, self.curve, restriction=self.restriction)
        except GermError as error:
            self._warn("reduce", error)
            return False
        self.reduced = rp
        self.report.reduced = ReducedRecord(
            k=rp.k,
            p=rp.p,
            mu=rp.mu,
            log_mu=rp.log_mu,
            a=list(rp.a.coeffs),
            A=list(rp.A.coeffs),
            contact_order=rp.contact_order,
            blowups=rp.blowups,
            predicate_defects=rp.predicate_defects(),
            changes=[ChangeRecord(change.kind.name, change.note) for change in rp.history],
        )
        logger.info("reduced pair: k=%d p=%d mu=%s", rp.k, rp.p, rp.mu)
        return True

    def classify_directions(self):
        self.directions = attracting_directions(self.reduced, self.settings.zero_band)
        self.report.directions = [_direction_record(d) for d in self.directions]

    def stable_sets(self):
        s, rp = self.settings, self.reduced
        m = s.contact_for(rp.p)
        for d in self.directions:
            stage = f"stable-set {d.index}"
            try:
                if d.kind == DirectionKind.SADDLE:
                    solution = picard_solve_parabolic(
                        rp, d, m=m, tol=s.tol, max_iter=s.max_iter, n_radial=s.grid_radial,
                        n_angular=s.grid_angular, floor=s.grid_floor, max_steps=s.picard_steps,
                    )
                    descriptor = parabolic_curve_set(solution, s.tol)
                else:
                    descriptor = node_stable_set(rp, d, m=m, basin_annuli=s.basin_annuli)
            except GermError as error:
                self._warn(stage, error)
                continue
            self.descriptors.append(descriptor)
            self.report.stable_sets.append(_stable_set_record(descriptor))

    def periodic_notes(self):
        n = self.report.iterate
        if n <= 1 or self.report.analysed_inverse:
            return
        base = self.spec.polynomial_map()
        for i, descriptor in enumerate(self.descriptors):
            bx, by = descriptor.boundary_original(16)
            radii = []
            for _ in range(1, n):
                bx, by = base(bx, by)
                radii.append(float(np.max(np.hypot(np.abs(bx), np.abs(by)))))
            self.report.notes.append(
                f"stable set {i} is F^{n}-stable; its pieces are S, F(S), ..., F^{n - 1}(S) "
                f"with boundary radii {[round(r, 12) for r in radii]}"
            )

    def _probe(self, reduced_chart=None, gamma2=None):
        s = self.settings
        starts = probe_starts(s.probes, s.probe_radius, s.seed)
        parabolic = self.classification.kind == InnerClass.PARABOLIC
        records = simulate_orbits(
            self.pmap,
            starts,
            workers=s.workers,
            max_iter=s.orbit_iter,
            escape_radius=s.escape_radius,
            conv_radius=s.parabolic_conv_radius if parabolic else s.conv_radius,
            window=s.conv_window,
            reduced=reduced_chart,
        )
        self.records = records
        for i, rec in enumerate(records):
            verdicts = []
            if gamma2 is not None and rec.status == OrbitStatus.CONVERGED_TO_ORIGIN:
                chart = in_chart(rec, reduced_chart.germ) if reduced_chart is not None else rec
                try:
                    verdicts = asymptoticity_test(chart, gamma2, s.asymptotic_orders)
                except TailTooShort as error:
                    logger.info("probe %d: %s", i, error)
            self.report.probes.append(
                ProbeRecord(
                    index=i,
                    start=list(rec.start),
                    status=rec.status.label,
                    steps=rec.steps,
                    tangent=rec.tangent,
                    end=[complex(rec.xs[-1]), complex(rec.ys[-1])],
                    asymptotic=[AsymptoticRecord(v.order, v.passed, v.C) for v in verdicts],
                )
            )
        return records

    def hyperbolic_probes(self):
        curve = self.curve
        gamma2 = None
        if (curve.gamma1 - UniJet.variable(curve.gamma1.order)).norm() <= 1e-14:
            gamma2 = curve.gamma2
        else:
            self.report.notes.append("curve is not a graph over x, asymptoticity is not tested")
        if self.restriction.residual > math.sqrt(self.settings.tol):
            self.report.notes.append(f"curve jet residual {self.restriction.residual:.3e}")
        records = self._probe(gamma2=gamma2)
        converged = [r for r in records if r.status == OrbitStatus.CONVERGED_TO_ORIGIN]
        self.report.notes.append(f"{len(converged)} of {len(records)} probe orbits converge to the origin")

    def parabolic_probes(self):
        rp = self.reduced
        records = self._probe(reduced_chart=rp, gamma2=rp.gamma2)
        if not self.descriptors:
            return
        capture = capture_report(records, self.descriptors, rp)
        self.report.capture = [CaptureRecord(**entry.to_dict()) for entry in capture.entries]
        self.report.excluded_orbits = list(capture.excluded)


def run_pipeline(spec, overrides=None, until="report"):
    """Analyse a parsed germ spec; the report is always returned."""
    return GermStablePipeline(spec, overrides).run(until)

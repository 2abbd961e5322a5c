import logging
from dataclasses import dataclass, field, fields, replace

logger = logging.getLogger(__name__)


def setting(default, doc):
    return field(default=default, metadata={"doc": doc})


@dataclass(frozen=True)
class PipelineSettings:
    """
    Tunables of one analysis run.

    Precedence is defaults < keys of the germ spec file < command line flags,
    applied with ``with_overrides`` in that order.
    """

    order: int = setting(16, "jet truncation order N used for every series")
    iterate: int = setting(1, "analyze F^n instead of F")
    contact_m: int | None = setting(
        None, "contact exponent m of the refined jet, p + 4 when unset"
    )
    tol: float = setting(1e-10, "tolerance of Picard iteration and jet checks")
    max_iter: int = setting(60, "maximal number of Picard iterations")
    orbit_iter: int = setting(20000, "maximal number of iterates per probe orbit")
    escape_radius: float = setting(1.0, "orbits leaving this ball are escaped")
    conv_radius: float = setting(
        1e-8, "hyperbolic orbits staying in this ball are converged"
    )
    parabolic_conv_radius: float = setting(
        1e-2, "parabolic orbits staying in this ball are converged"
    )
    conv_window: int = setting(50, "number of final iterates checked for convergence")
    root_tol: float = setting(1e-9, "tolerance for roots of unity and unit moduli")
    root_order_bound: int = setting(64, "largest n tested for lambda^n = 1")
    zero_band: float = setting(1e-9, "real parts below this are treated as zero")
    probes: int = setting(8, "number of probe orbits")
    probe_radius: float = setting(0.05, "distance of probe seeds to the origin")
    seed: int = setting(0, "seed of the probe generator")
    workers: int = setting(1, "processes used for probe orbits")
    grid_radial: int = setting(48, "radial nodes of the Picard grid")
    grid_angular: int = setting(7, "angular nodes of the Picard grid")
    grid_floor: float = setting(1e-3, "innermost Picard node relative to epsilon")
    picard_steps: int = setting(20000, "step cap of one Picard orbit sum")
    basin_annuli: int = setting(4, "number of annuli of the asymptotic basin")
    asymptotic_orders: int = setting(6, "largest N tested for N-asymptoticity")

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("order must be positive")
        if self.iterate < 1:
            raise ValueError("iterate must be positive")
        if self.contact_m is not None and self.contact_m < 1:
            raise ValueError("contact_m must be positive")
        if self.tol <= 0:
            raise ValueError("tol must be positive")

    def with_overrides(self, **overrides):
        known = {f.name for f in fields(self)}
        unknown = set(overrides) - known
        if unknown:
            raise KeyError(f"unknown settings: {sorted(unknown)}")
        changes = {key: value for key, value in overrides.items() if value is not None}
        if changes:
            logger.debug("settings override: %s", changes)
        return replace(self, **changes)

    def contact_for(self, p):
        return self.contact_m if self.contact_m is not None else p + 4

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    @classmethod
    def describe(cls):
        lines = []
        for f in fields(cls):
            lines.append(f"{f.name:<22} {f.default!r:<10} {f.metadata['doc']}")
        return "\n".join(lines)

"""
Report records. Complex numbers are stored as [re, im] pairs; every record
converts to plain JSON types with ``to_dict`` and back with ``from_dict``.
"""
from dataclasses import dataclass, field, fields

REPORT_VERSION = 1


def cfield(default=None):
    return field(default=default, metadata={"complex": True})


def clist():
    return field(default_factory=list, metadata={"complex_list": True})


def nested(cls, many=False, default=None):
    if many:
        return field(default_factory=list, metadata={"records": cls})
    return field(default=default, metadata={"record": cls})


def encode_complex(z):
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(pair):
    if pair is None:
        return None
    return complex(pair[0], pair[1])


class Record:
    def to_dict(self):
        payload = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if f.metadata.get("complex"):
                value = encode_complex(value)
            elif f.metadata.get("complex_list"):
                value = [encode_complex(z) for z in value]
            elif "record" in f.metadata:
                value = None if value is None else value.to_dict()
            elif "records" in f.metadata:
                value = [item.to_dict() for item in value]
            elif isinstance(value, tuple):
                value = list(value)
            payload[f.name] = value
        return payload

    @classmethod
    def from_dict(cls, payload):
        kwargs = {}
        for f in fields(cls):
            if f.name not in payload:
                continue
            value = payload[f.name]
            if f.metadata.get("complex"):
                value = decode_complex(value)
            elif f.metadata.get("complex_list"):
                value = [decode_complex(z) for z in value]
            elif "record" in f.metadata:
                value = None if value is None else f.metadata["record"].from_dict(value)
            elif "records" in f.metadata:
                value = [f.metadata["records"].from_dict(item) for item in value]
            kwargs[f.name] = value
        return cls(**kwargs)


@dataclass
class CuspRecord(Record):
    p: int = 0
    q: int = 0
    c: complex = cfield()
    resonance_defect: float = 0.0
    membership_residual: float = 0.0
    matches: bool = False


@dataclass
class ClassificationRecord(Record):
    label: str = ""
    period: int | None = None
    inner_eigenvalue: complex = cfield()
    tangent_eigenvalue: complex = cfield()
    eigenvalues: list = clist()
    multiplicity: int = 1
    restriction_order: int | None = None
    restriction_residual: float = 0.0
    curve_source: str = ""
    cusp: CuspRecord | None = nested(CuspRecord)


@dataclass
class ChangeRecord(Record):
    kind: str = ""
    note: str = ""


@dataclass
class ReducedRecord(Record):
    k: int = 0
    p: int = 0
    mu: complex = cfield()
    log_mu: complex = cfield()
    a: list = clist()
    A: list = clist()
    contact_order: int | None = None
    blowups: int = 0
    predicate_defects: dict = field(default_factory=dict)
    changes: list = nested(ChangeRecord, many=True)


@dataclass
class DirectionRecord(Record):
    index: int = 0
    xi: complex = cfield()
    kind: str = ""
    witness: list = field(default_factory=list)
    r_l: int | None = None


@dataclass
class BasinRecord(Record):
    inner: float = 0.0
    outer: float = 0.0
    entry_index: int | None = None
    samples: int = 0


@dataclass
class StableSetRecord(Record):
    type: str = ""
    direction: complex = cfield()
    region: dict = field(default_factory=dict)
    q: int = 0
    invariant: bool = True
    m: int | None = None
    residual: float | None = None
    norm: float | None = None
    iterations: int | None = None
    deltas: list = field(default_factory=list)
    extrapolated_sums: int | None = None
    derivative_ok: bool | None = None
    constants: dict = field(default_factory=dict)
    basin: list = nested(BasinRecord, many=True)
    boundary: list = clist()


@dataclass
class AsymptoticRecord(Record):
    N: int = 0
    passed: bool = False
    C: float = 0.0


@dataclass
class ProbeRecord(Record):
    index: int = 0
    start: list = clist()
    status: str = ""
    steps: int = 0
    tangent: complex | None = cfield()
    end: list = clist()
    asymptotic: list = nested(AsymptoticRecord, many=True)


@dataclass
class CaptureRecord(Record):
    orbit: int = 0
    assigned: bool = False
    status: str = ""
    direction: complex | None = cfield()
    set_type: str | None = None
    set_index: int | None = None
    entry_index: int | None = None
    tangency: float | None = None
    reason: str = ""


@dataclass
class WarningRecord(Record):
    stage: str = ""
    reason: str = ""
    description: str = ""


@dataclass
class AnalysisReport(Record):
    report_version: int = REPORT_VERSION
    settings: dict = field(default_factory=dict)
    source: str = ""
    iterate: int = 1
    analysed_inverse: bool = False
    classification: ClassificationRecord | None = nested(ClassificationRecord)
    reduced: ReducedRecord | None = nested(ReducedRecord)
    directions: list = nested(DirectionRecord, many=True)
    stable_sets: list = nested(StableSetRecord, many=True)
    probes: list = nested(ProbeRecord, many=True)
    capture: list = nested(CaptureRecord, many=True)
    excluded_orbits: list = field(default_factory=list)
    warnings: list = nested(WarningRecord, many=True)
    notes: list = field(default_factory=list)

    def warn(self, stage, error):
        self.warnings.append(
            WarningRecord(stage, getattr(error, "reason", type(error).__name__), getattr(error, "description", str(error)))
        )


report_version = {1: AnalysisReport}

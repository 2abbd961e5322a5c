import logging
import re
from dataclasses import dataclass, field

import numpy as np
from sympy import I, Poly, Symbol
from sympy.parsing.sympy_parser import convert_xor, parse_expr, standard_transformations
from sympy.polys.polyerrors import PolynomialError

from germstable.jet_funcs.germ import GermDiffeo, PolynomialMap
from germstable.jet_funcs.jets import BiJet, UniJet
from germstable.util_funcs.errors import ParseError

logger = logging.getLogger(__name__)

_X, _Y = Symbol("x"), Symbol("y")
_TRANSFORMATIONS = standard_transformations + (convert_xor,)
# 2.5i, 3i, 1e-3i -> (...)*I
_IMAGINARY = re.compile(r"(?<![\w.])((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)i\b")
_EXPR_ALLOWED = re.compile(r"[0-9xyieE+\-*/^().\s]")
_INT = re.compile(r"^\d+$")
_TANGENT = re.compile(r"^\[\s*([^:\]]+?)\s*:\s*([^:\]]+?)\s*\]$")
_LIST = re.compile(r"^\[(.*)\]$")
_PROBES = re.compile(r"^(\d+)\s*@\s*(\S+)$")

KEYS = (
    "F1",
    "F2",
    "order",
    "iterate",
    "curve.tangent",
    "curve.gamma1",
    "curve.gamma2",
    "probes",
    "tol",
    "max_iter",
    "contact_m",
    "seed",
)


@dataclass(frozen=True, eq=False)
class GermSpec:
    """Parsed germ specification; polynomial coefficients are exact (untruncated)."""

    c1: np.ndarray
    c2: np.ndarray
    order: int | None = None
    iterate: int | None = None
    tangent: tuple | None = None
    gamma1: tuple | None = None
    gamma2: tuple | None = None
    probes: tuple | None = None
    tol: float | None = None
    max_iter: int | None = None
    contact_m: int | None = None
    seed: int | None = None
    source: str = field(default="", repr=False)

    @property
    def has_curve(self):
        return self.gamma1 is not None or self.gamma2 is not None

    def germ(self, order):
        return GermDiffeo(BiJet(self.c1, order), BiJet(self.c2, order))

    def polynomial_map(self):
        return PolynomialMap.from_coefficients(self.c1, self.c2)

    def curve_series(self, order):
        """(gamma1, gamma2) as jets; gamma1 defaults to s when only gamma2 is given."""
        g1 = self.gamma1 if self.gamma1 is not None else (0, 1)
        g2 = self.gamma2 if self.gamma2 is not None else (0,)
        return UniJet(list(g1), order), UniJet(list(g2), order)

    def settings_overrides(self):
        overrides = {
            "order": self.order,
            "iterate": self.iterate,
            "tol": self.tol,
            "max_iter": self.max_iter,
            "contact_m": self.contact_m,
            "seed": self.seed,
        }
        if self.probes is not None:
            overrides["probes"], overrides["probe_radius"] = self.probes
        return overrides


def _complex_literals(text):
    return _IMAGINARY.sub(r"(\1*I)", text)


def _sympify(text, line, col, expected):
    try:
        return parse_expr(
            _complex_literals(text),
            local_dict={"x": _X, "y": _Y, "I": I},
            transformations=_TRANSFORMATIONS,
            evaluate=True,
        )
    except (SyntaxError, TypeError, ValueError) as exc:
        offset = getattr(exc, "offset", None) or 1
        raise ParseError(line, col + min(offset, len(text)) - 1, expected, str(exc)) from None
    except Exception as exc:  # tokenizer errors of sympy
        raise ParseError(line, col, expected, str(exc)) from None


def parse_polynomial(text, line=1, col=1):
    """Coefficient array c[i, j] of x^i y^j of a polynomial expression."""
    for k, char in enumerate(text):
        if not _EXPR_ALLOWED.match(char):
            raise ParseError(line, col + k, "expression over x, y", f"unexpected {char!r}")
    if not text.strip():
        raise ParseError(line, col, "expression over x, y")
    expr = _sympify(text, line, col, "expression over x, y")
    stray = expr.free_symbols - {_X, _Y}
    if stray:
        raise ParseError(line, col, "expression over x, y", f"unknown symbols {sorted(map(str, stray))}")
    try:
        poly = Poly(expr, _X, _Y)
    except PolynomialError as exc:
        raise ParseError(line, col, "polynomial in x, y", str(exc)) from None
    degree = max(poly.total_degree(), 1)
    c = np.zeros((degree + 1, degree + 1), dtype=np.complex128)
    for (i, j), coeff in poly.terms():
        c[i, j] = complex(coeff.evalf())
    return c


def parse_number(text, line=1, col=1):
    text = text.strip()
    expr = _sympify(text, line, col, "number")
    if expr.free_symbols:
        raise ParseError(line, col, "number", f"symbols {sorted(map(str, expr.free_symbols))}")
    return complex(expr.evalf())


def _parse_list(value, line, col):
    match = _LIST.match(value)
    if not match:
        raise ParseError(line, col, "[c0, c1, ...]")
    body = match.group(1)
    items, offset = [], value.index("[") + 1
    for item in body.split(","):
        items.append(parse_number(item, line, col + offset))
        offset += len(item) + 1
    return tuple(items)


def _parse_value(key, value, line, col):
    match key:
        case "F1" | "F2":
            return parse_polynomial(value, line, col)
        case "order" | "iterate" | "max_iter" | "contact_m" | "seed":
            if not _INT.match(value):
                raise ParseError(line, col, "non-negative integer")
            return int(value)
        case "tol":
            try:
                return float(value)
            except ValueError:
                raise ParseError(line, col, "real number") from None
        case "curve.tangent":
            match = _TANGENT.match(value)
            if not match:
                raise ParseError(line, col, "[a:b]")
            return (parse_number(match.group(1), line, col), parse_number(match.group(2), line, col))
        case "curve.gamma1" | "curve.gamma2":
            return _parse_list(value, line, col)
        case "probes":
            match = _PROBES.match(value)
            if not match:
                raise ParseError(line, col, "<count>@<radius>")
            try:
                radius = float(match.group(2))
            except ValueError:
                raise ParseError(line, col + match.start(2), "real radius") from None
            return int(match.group(1)), radius


def parse_germ_spec(text):
    """
    Parse ``key = value`` lines (``#`` starts a comment) into a ``GermSpec``.

    Raises ``ParseError(line, col, expected)`` with 1-based positions.
    """
    values = {}
    lines = text.splitlines()
    for number, raw in enumerate(lines, start=1):
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        if "=" not in content:
            raise ParseError(number, len(content.rstrip()) + 1, "'='")
        key_part, value_part = content.split("=", 1)
        key = key_part.strip()
        key_col = len(key_part) - len(key_part.lstrip()) + 1
        if key not in KEYS:
            raise ParseError(number, key_col, "one of " + ", ".join(KEYS), f"unknown key {key!r}")
        if key in values:
            raise ParseError(number, key_col, "each key at most once", f"duplicate key {key!r}")
        value = value_part.strip()
        value_col = len(key_part) + 2 + len(value_part) - len(value_part.lstrip())
        if not value:
            raise ParseError(number, value_col, f"value for {key}")
        values[key] = _parse_value(key, value, number, value_col)

    for required in ("F1", "F2"):
        if required not in values:
            raise ParseError(len(lines) + 1, 1, f"{required} = <expr>", f"missing {required}")
    if "curve.tangent" in values and ("curve.gamma1" in values or "curve.gamma2" in values):
        raise ParseError(len(lines) + 1, 1, "either curve.tangent or curve.gamma1/gamma2")

    spec = GermSpec(
        c1=values["F1"],
        c2=values["F2"],
        order=values.get("order"),
        iterate=values.get("iterate"),
        tangent=values.get("curve.tangent"),
        gamma1=values.get("curve.gamma1"),
        gamma2=values.get("curve.gamma2"),
        probes=values.get("probes"),
        tol=values.get("tol"),
        max_iter=values.get("max_iter"),
        contact_m=values.get("contact_m"),
        seed=values.get("seed"),
        source=text,
    )
    spec.germ(max(spec.c1.shape[0], spec.c2.shape[0], 2))
    logger.debug("parsed germ spec with keys %s", sorted(values))
    return spec


def read_germ_spec(filepath):
    with open(filepath, "r", encoding="utf-8") as handle:
        return parse_germ_spec(handle.read())
